//! Diagonal model for log-conductor `c >= 2`: the fixed space of a segment
//! is spanned by the basis vectors indexed by `n` with `n..n+c` inside the
//! segment, and each segment projector is the 0/1 diagonal matrix of that
//! containment test.  Every composition identity holds entrywise here, with
//! or without any overlap hypothesis.

use crate::error::{Error, Result};
use crate::seg::Segment;

#[derive(Debug, Clone)]
pub struct DiagonalModel {
    conductor: u32,
    ambient: Segment,
    basis: Vec<i64>,
}

impl DiagonalModel {
    pub fn new(conductor: u32, ambient: Segment) -> Self {
        assert!(conductor >= 2, "the diagonal model needs log-conductor >= 2");
        let basis = (ambient.lo()..=ambient.hi() - conductor as i64).collect();
        DiagonalModel {
            conductor,
            ambient,
            basis,
        }
    }

    pub fn conductor(&self) -> u32 {
        self.conductor
    }

    pub fn ambient(&self) -> Segment {
        self.ambient
    }

    /// Basis indices `n` with `n..n+c` inside the ambient segment;
    /// dimension `max(0, card(ambient) - c)`.
    pub fn basis(&self) -> &[i64] {
        &self.basis
    }

    /// 0/1 diagonal of the projector onto the `seg`-fixed subspace.
    pub fn diagonal_e(&self, seg: &Segment) -> Result<Vec<i64>> {
        if !self.ambient.contains_seg(seg) {
            return Err(Error::OutsideAmbient(*seg, self.ambient));
        }
        Ok(self
            .basis
            .iter()
            .map(|&n| {
                let supp_ok = seg.lo() <= n && n + self.conductor as i64 <= seg.hi();
                supp_ok as i64
            })
            .collect())
    }

    /// Dimension of the `seg`-fixed subspace.
    pub fn fixed_dim(&self, seg: &Segment) -> Result<i64> {
        Ok(self.diagonal_e(seg)?.iter().sum())
    }

    /// The signed four-term star operator as an integer diagonal.
    pub fn star_diagonal(&self, seg: &Segment) -> Result<StarDiagonalReport> {
        if seg.card() < 3 {
            return Err(Error::StarTooShort(*seg));
        }
        let combo = seg.star_combo()?;
        let mut diag = vec![0i64; self.basis.len()];
        for (coeff, term) in combo.terms() {
            for (slot, v) in self.diagonal_e(term)?.iter().enumerate() {
                diag[slot] += *coeff as i64 * v;
            }
        }
        let nonzero: Vec<usize> = diag
            .iter()
            .enumerate()
            .filter(|(_, v)| **v != 0)
            .map(|(i, _)| i)
            .collect();
        let is_projector = diag.iter().all(|v| *v == 0 || *v == 1);
        let rank_one_at = (nonzero.len() == 1 && is_projector)
            .then(|| self.basis[nonzero[0]]);
        Ok(StarDiagonalReport {
            diag,
            is_zero: nonzero.is_empty(),
            is_projector,
            rank: nonzero.len(),
            rank_one_at,
        })
    }

    /// Checks `e_l e_l' = e_(l∩l')` for every ordered pair of subsegments of
    /// the ambient range, with the empty intersection read as the zero
    /// operator.  Exact 0/1 arithmetic; returns the first violation if any.
    pub fn check_all_compositions(&self) -> Result<Option<(Segment, Segment)>> {
        let subs = subsegments(&self.ambient);
        for l1 in &subs {
            let d1 = self.diagonal_e(l1)?;
            for l2 in &subs {
                let d2 = self.diagonal_e(l2)?;
                let expect = match l1.intersect(l2) {
                    Some(i) => self.diagonal_e(&i)?,
                    None => vec![0; self.basis.len()],
                };
                let product: Vec<i64> =
                    d1.iter().zip(&d2).map(|(a, b)| a * b).collect();
                if product != expect {
                    return Ok(Some((*l1, *l2)));
                }
            }
        }
        Ok(None)
    }
}

/// All segments contained in `ambient`.
pub fn subsegments(ambient: &Segment) -> Vec<Segment> {
    let mut out = Vec::new();
    for lo in ambient.lo()..=ambient.hi() {
        for hi in lo..=ambient.hi() {
            out.push(Segment::new(lo, hi).unwrap());
        }
    }
    out
}

#[derive(Debug, Clone)]
pub struct StarDiagonalReport {
    pub diag: Vec<i64>,
    pub is_zero: bool,
    pub is_projector: bool,
    pub rank: usize,
    /// basis index carrying the single 1 when the star is a rank-1 projector
    pub rank_one_at: Option<i64>,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(lo: i64, hi: i64) -> Segment {
        Segment::new(lo, hi).unwrap()
    }

    #[test]
    fn dimension_formula() {
        let m = DiagonalModel::new(2, seg(0, 4));
        assert_eq!(m.basis(), &[0, 1, 2]);
        assert_eq!(m.fixed_dim(&seg(0, 4)).unwrap(), 3);
        assert_eq!(m.fixed_dim(&seg(1, 3)).unwrap(), 1); // only n = 1
        assert_eq!(m.fixed_dim(&seg(0, 1)).unwrap(), 0); // too short
        for l in subsegments(&seg(0, 4)) {
            assert_eq!(
                m.fixed_dim(&l).unwrap(),
                (l.card() - 2).max(0),
                "segment {l}"
            );
        }
    }

    #[test]
    fn diagonal_e_examples() {
        let m = DiagonalModel::new(2, seg(0, 4));
        assert_eq!(m.diagonal_e(&seg(0, 4)).unwrap(), vec![1, 1, 1]); // identity
        assert_eq!(m.diagonal_e(&seg(1, 3)).unwrap(), vec![0, 1, 0]);
        assert_eq!(m.diagonal_e(&seg(2, 3)).unwrap(), vec![0, 0, 0]); // card-1 < c
        assert!(m.diagonal_e(&seg(0, 9)).is_err());
    }

    #[test]
    fn star_is_zero_off_conductor_and_rank_one_on_it() {
        let m = DiagonalModel::new(3, seg(0, 6));
        let r = m.star_diagonal(&seg(0, 3)).unwrap();
        assert!(!r.is_zero);
        assert!(r.is_projector);
        assert_eq!(r.rank, 1);
        assert_eq!(r.rank_one_at, Some(0));

        let m2 = DiagonalModel::new(2, seg(0, 6));
        let r = m2.star_diagonal(&seg(0, 3)).unwrap();
        assert!(r.is_zero, "{r:?}");
    }

    #[test]
    fn compositions_hold_even_with_tiny_overlap() {
        for c in [2u32, 3, 4] {
            let m = DiagonalModel::new(c, seg(0, 8));
            assert_eq!(m.check_all_compositions().unwrap(), None);
        }
        // the specific overlap-one pair
        let m = DiagonalModel::new(2, seg(0, 4));
        let d1 = m.diagonal_e(&seg(0, 1)).unwrap();
        let d2 = m.diagonal_e(&seg(1, 2)).unwrap();
        let prod: Vec<i64> = d1.iter().zip(&d2).map(|(a, b)| a * b).collect();
        assert_eq!(prod, m.diagonal_e(&seg(1, 1)).unwrap());
    }
}
