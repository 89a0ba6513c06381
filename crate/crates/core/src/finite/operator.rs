//! Exact rational Hecke operators on a coset module.
//!
//! The module plays the role of the ambient function space: the base-
//! subgroup average is the identity on it, exactly as the level-q averaging
//! operator is the identity on level-q forms.  Averaging over `H ⊇ B`
//! sends a coset uniformly across its fiber under `G/B -> G/H`, so its
//! matrix is block-constant over the fiber partition; the summation
//! definition `(1/|H|) Σ_h δ(r_j h B)` is kept in the tests as the
//! independent oracle.

use super::{eichler_members, segment_embed, CosetSpace, EichlerPair, ModelParams};
use crate::error::{Error, Result};
use crate::seg::Segment;
use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};

/// Dense square matrix of arbitrary-precision rationals.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeckeOperator {
    dim: usize,
    entries: Vec<BigRational>, // row major
}

impl HeckeOperator {
    pub fn zero(dim: usize) -> Self {
        HeckeOperator {
            dim,
            entries: vec![BigRational::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zero(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = BigRational::one();
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, row: usize, col: usize) -> &BigRational {
        &self.entries[row * self.dim + col]
    }

    pub fn set_entry(&mut self, row: usize, col: usize, v: BigRational) {
        self.entries[row * self.dim + col] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.is_zero())
    }

    /// Largest absolute entry.
    pub fn max_abs_entry(&self) -> BigRational {
        let mut best = BigRational::zero();
        for e in &self.entries {
            let a = e.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// First nonzero entry with its position, if any.
    pub fn witness_nonzero(&self) -> Option<(usize, usize, BigRational)> {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let e = self.entry(i, j);
                if !e.is_zero() {
                    return Some((i, j, e.clone()));
                }
            }
        }
        None
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        HeckeOperator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        HeckeOperator {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Matrix product, exact.
    ///
    /// Rescales both factors to integer matrices over a common denominator
    /// first; the denominators here are subgroup orders, so this turns the
    /// inner loop into integer arithmetic.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let (da, na) = scale_to_integers(&self.entries);
        let (db, nb) = scale_to_integers(&other.entries);
        let den = &da * &db;
        let mut entries = Vec::with_capacity(n * n);
        // i128 fast path when every product row*col stays well below overflow
        let fits = |v: &[BigInt]| v.iter().all(|x| x.abs() < BigInt::from(1u64 << 40));
        if n < 1 << 10 && fits(&na) && fits(&nb) {
            let a: Vec<i128> = na.iter().map(|x| int_to_i128(x)).collect();
            let b: Vec<i128> = nb.iter().map(|x| int_to_i128(x)).collect();
            for i in 0..n {
                for j in 0..n {
                    let mut acc: i128 = 0;
                    for k in 0..n {
                        acc += a[i * n + k] * b[k * n + j];
                    }
                    entries.push(BigRational::new(BigInt::from(acc), den.clone()));
                }
            }
        } else {
            for i in 0..n {
                for j in 0..n {
                    let mut acc = BigInt::zero();
                    for k in 0..n {
                        acc += &na[i * n + k] * &nb[k * n + j];
                    }
                    entries.push(BigRational::new(acc, den.clone()));
                }
            }
        }
        HeckeOperator { dim: n, entries }
    }

    pub fn is_idempotent(&self) -> bool {
        self.mul(self) == *self
    }

    pub fn is_doubly_stochastic(&self) -> bool {
        let one = BigRational::one();
        for i in 0..self.dim {
            let row: BigRational = (0..self.dim).map(|j| self.entry(i, j).clone()).sum();
            let col: BigRational = (0..self.dim).map(|j| self.entry(j, i).clone()).sum();
            if row != one || col != one {
                return false;
            }
        }
        self.entries.iter().all(|e| !e.is_negative())
    }

    /// Exact rank by fraction-free elimination on the scaled integer matrix.
    pub fn rank(&self) -> usize {
        let (_, num) = scale_to_integers(&self.entries);
        rank_integer(num, self.dim, self.dim)
    }

    /// Rank of `[self | other]` stacked side by side (the joint column span).
    pub fn rank_column_stack(&self, other: &Self) -> usize {
        assert_eq!(self.dim, other.dim);
        let n = self.dim;
        let mut joined = Vec::with_capacity(n * 2 * n);
        for i in 0..n {
            for j in 0..n {
                joined.push(self.entry(i, j).clone());
            }
            for j in 0..n {
                joined.push(other.entry(i, j).clone());
            }
        }
        let (_, num) = scale_to_integers(&joined);
        rank_integer(num, n, 2 * n)
    }
}

fn int_to_i128(x: &BigInt) -> i128 {
    let (sign, digits) = x.to_u64_digits();
    let mut v: i128 = 0;
    for d in digits.iter().rev() {
        v = (v << 64) | *d as i128;
    }
    if sign == num::bigint::Sign::Minus {
        -v
    } else {
        v
    }
}

/// lcm of denominators and the rescaled integer entries.
fn scale_to_integers(entries: &[BigRational]) -> (BigInt, Vec<BigInt>) {
    let mut den = BigInt::one();
    for e in entries {
        den = num::integer::lcm(den, e.denom().clone());
    }
    let nums = entries
        .iter()
        .map(|e| e.numer() * (&den / e.denom()))
        .collect();
    (den, nums)
}

/// Bareiss fraction-free Gaussian elimination, returning the rank.
fn rank_integer(mut m: Vec<BigInt>, rows: usize, cols: usize) -> usize {
    let mut rank = 0;
    let mut prev = BigInt::one();
    let mut row = 0;
    for col in 0..cols {
        if row >= rows {
            break;
        }
        // find pivot
        let Some(p) = (row..rows).find(|&r| !m[r * cols + col].is_zero()) else {
            continue;
        };
        if p != row {
            for c in 0..cols {
                m.swap(row * cols + c, p * cols + c);
            }
        }
        let pivot = m[row * cols + col].clone();
        for r in (row + 1)..rows {
            let factor = m[r * cols + col].clone();
            for c in (col + 1)..cols {
                let v = (&pivot * &m[r * cols + c] - &factor * &m[row * cols + c]) / &prev;
                m[r * cols + c] = v;
            }
            m[r * cols + col] = BigInt::zero();
        }
        prev = pivot;
        row += 1;
        rank += 1;
    }
    rank
}

/// The averaging idempotent of `H` acting on the coset module of `B ⊆ H`.
///
/// Averaging a coset over `H` lands uniformly on the cosets of its fiber
/// under `G/B -> G/H` (each fiber coset is reached by exactly one left
/// `B`-coset of `H`), so the matrix is `1/[H:B]` on each fiber block.  In
/// particular `H = B` gives the identity and `H = G` the all-`1/dim` matrix.
pub fn averaging_matrix(
    params: &ModelParams,
    subgroup: EichlerPair,
    cosets: &CosetSpace,
) -> Result<HeckeOperator> {
    if !cosets.base().contained_in(&subgroup) {
        return Err(Error::BaseNotContained {
            bi: cosets.base().i,
            bj: cosets.base().j,
            hi: subgroup.i,
            hj: subgroup.j,
        });
    }
    let members = eichler_members(params, cosets.group(), &subgroup);
    let (fiber_of, count) = cosets.fibers(&members);
    let block = cosets.dim() / count as usize;
    debug_assert_eq!(cosets.dim() % count as usize, 0);
    let mass = BigRational::new(BigInt::one(), BigInt::from(block));
    let mut by_fiber: Vec<Vec<u32>> = vec![Vec::with_capacity(block); count as usize];
    for (coset, &f) in fiber_of.iter().enumerate() {
        by_fiber[f as usize].push(coset as u32);
    }
    let mut m = HeckeOperator::zero(cosets.dim());
    for fiber in &by_fiber {
        assert_eq!(fiber.len(), block, "fibers of G/B -> G/H must be equal");
        for &j in fiber {
            for &i in fiber {
                m.set_entry(i as usize, j as usize, mass.clone());
            }
        }
    }
    Ok(m)
}

/// Rank of the averaging idempotent: the number of `H`-orbits of the coset
/// module, i.e. the index of `H`.
pub fn orbit_count(params: &ModelParams, subgroup: EichlerPair, cosets: &CosetSpace) -> usize {
    let members = eichler_members(params, cosets.group(), &subgroup);
    cosets.fibers(&members).1 as usize
}

/// The signed four-term star operator of a segment, on the given cosets.
///
/// Needs the pivot strictly inside the segment so that all four embedded
/// pairs are valid, and a base contained in all four subgroups.
pub fn star_matrix(
    seg: &Segment,
    pivot: i64,
    params: &ModelParams,
    cosets: &CosetSpace,
) -> Result<HeckeOperator> {
    if !(seg.lo() < pivot && pivot < seg.hi()) {
        return Err(Error::PivotOutside {
            pivot,
            segment: *seg,
        });
    }
    let combo = seg.star_combo()?;
    let mut acc = HeckeOperator::zero(cosets.dim());
    for (coeff, term) in combo.terms() {
        let pair = segment_embed(term, pivot, params)?;
        let m = averaging_matrix(params, pair, cosets)?;
        acc = if *coeff > 0 { acc.add(&m) } else { acc.sub(&m) };
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::super::{eichler_members, enumerate_group, GroupElement};
    use super::*;

    /// Brute-force `(1/|H|) Σ_(h in H) [r_j h B = coset_i]` — the summation
    /// definition of the averaging operator.
    fn averaging_brute(
        params: &ModelParams,
        group: &[GroupElement],
        subgroup: EichlerPair,
        cosets: &CosetSpace,
    ) -> HeckeOperator {
        let members = eichler_members(params, group, &subgroup);
        let mut m = HeckeOperator::zero(cosets.dim());
        let mass = BigRational::new(BigInt::one(), BigInt::from(members.len()));
        for h in &members {
            for (j, r) in cosets.reps().iter().enumerate() {
                let i = cosets.coset_index(&r.mul(h, params));
                let v = m.entry(i as usize, j).clone() + &mass;
                m.set_entry(i as usize, j, v);
            }
        }
        m
    }

    #[test]
    fn orbit_matrix_matches_brute_force_average() {
        for (p, l, bi, bj) in [(2u64, 2u32, 1u32, 1u32), (3, 1, 0, 1), (2, 3, 1, 2)] {
            let params = ModelParams::new(p, l).unwrap();
            let group = enumerate_group(&params);
            let base = EichlerPair::new(bi, bj, &params).unwrap();
            let cosets = CosetSpace::build(&params, &group, base).unwrap();
            for i in 0..=l {
                for j in 0..=(l - i) {
                    let h = EichlerPair::new(i, j, &params).unwrap();
                    if !base.contained_in(&h) {
                        continue;
                    }
                    let fast = averaging_matrix(&params, h, &cosets).unwrap();
                    let brute = averaging_brute(&params, &group, h, &cosets);
                    assert_eq!(fast, brute, "p={p} L={l} H=({i},{j}) B=({bi},{bj})");
                }
            }
        }
    }

    #[test]
    fn averaging_over_base_is_identity() {
        let params = ModelParams::new(2, 3).unwrap();
        let group = enumerate_group(&params);
        let base = EichlerPair::new(1, 2, &params).unwrap();
        let cosets = CosetSpace::build(&params, &group, base).unwrap();
        let m = averaging_matrix(&params, base, &cosets).unwrap();
        assert_eq!(m, HeckeOperator::identity(cosets.dim()));
    }

    #[test]
    fn full_group_average_is_projection_onto_constants() {
        let params = ModelParams::new(2, 2).unwrap();
        let group = enumerate_group(&params);
        let base = EichlerPair::new(1, 1, &params).unwrap();
        let cosets = CosetSpace::build(&params, &group, base).unwrap();
        let m = averaging_matrix(&params, EichlerPair::new(0, 0, &params).unwrap(), &cosets)
            .unwrap();
        let dim = cosets.dim();
        let expect = BigRational::new(BigInt::one(), BigInt::from(dim));
        for i in 0..dim {
            for j in 0..dim {
                assert_eq!(m.entry(i, j), &expect);
            }
        }
        assert_eq!(m.rank(), 1);
    }

    #[test]
    fn averaging_is_doubly_stochastic_idempotent_with_orbit_rank() {
        let params = ModelParams::new(2, 3).unwrap();
        let group = enumerate_group(&params);
        let base = EichlerPair::new(1, 2, &params).unwrap();
        let cosets = CosetSpace::build(&params, &group, base).unwrap();
        let h = EichlerPair::new(1, 1, &params).unwrap();
        let m = averaging_matrix(&params, h, &cosets).unwrap();
        assert!(m.is_doubly_stochastic());
        assert!(m.is_idempotent());
        assert_eq!(m.dim(), 12);
        // rank = number of H-orbits of cosets = index of H
        assert_eq!(m.rank(), orbit_count(&params, h, &cosets));
        assert_eq!(m.rank() as u128, h.index(&params));
    }

    #[test]
    fn base_containment_enforced() {
        let params = ModelParams::new(2, 2).unwrap();
        let group = enumerate_group(&params);
        let base = EichlerPair::new(1, 0, &params).unwrap();
        let cosets = CosetSpace::build(&params, &group, base).unwrap();
        assert!(matches!(
            averaging_matrix(&params, EichlerPair::new(0, 1, &params).unwrap(), &cosets),
            Err(Error::BaseNotContained { .. })
        ));
    }

    #[test]
    fn rank_stack_and_bareiss_sanity() {
        let mut a = HeckeOperator::zero(3);
        a.set_entry(0, 0, BigRational::new(1.into(), 2.into()));
        a.set_entry(1, 1, BigRational::new(3.into(), 7.into()));
        assert_eq!(a.rank(), 2);
        let b = HeckeOperator::identity(3);
        assert_eq!(a.rank_column_stack(&b), 3);
        assert_eq!(a.mul(&b), a);
    }
}
