//! Segment arithmetic and the signed combinators indexing every projector
//! identity in the crate.
//!
//! A segment is a nonempty consecutive range of integers `m..n` (inclusive on
//! both ends).  Segments serialize as the string `"m..n"`.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Nonempty inclusive range of integers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Segment {
    lo: i64,
    hi: i64,
}

impl Segment {
    pub fn new(lo: i64, hi: i64) -> Result<Self> {
        if lo > hi {
            return Err(Error::InvalidSegment { lo, hi });
        }
        Ok(Segment { lo, hi })
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    pub fn hi(&self) -> i64 {
        self.hi
    }

    /// Number of integers in the segment (always >= 1).
    pub fn card(&self) -> i64 {
        self.hi - self.lo + 1
    }

    pub fn contains(&self, k: i64) -> bool {
        self.lo <= k && k <= self.hi
    }

    pub fn contains_seg(&self, other: &Segment) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// `max(lo,lo')..min(hi,hi')` when nonempty.  Empty intersection is a
    /// valid result, not an error; the negative controls branch on it.
    pub fn intersect(&self, other: &Segment) -> Option<Segment> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Segment { lo, hi })
    }

    /// `min(lo,lo')..max(hi,hi')`.
    pub fn hull(&self, other: &Segment) -> Segment {
        Segment {
            lo: self.lo.min(other.lo),
            hi: self.hi.max(other.hi),
        }
    }

    /// The four-term signed combination `+(m..n) -(m+1..n) -(m..n-1) +(m+1..n-1)`.
    ///
    /// Requires `card >= 3` so the inner segment is nonempty.
    pub fn star_combo(&self) -> Result<SignedSegmentCombo> {
        if self.card() < 3 {
            return Err(Error::StarTooShort(*self));
        }
        let (m, n) = (self.lo, self.hi);
        Ok(SignedSegmentCombo {
            terms: vec![
                (1, Segment { lo: m, hi: n }),
                (-1, Segment { lo: m + 1, hi: n }),
                (-1, Segment { lo: m, hi: n - 1 }),
                (1, Segment { lo: m + 1, hi: n - 1 }),
            ],
        })
    }

    /// Symbolic composition of the two averaging idempotents.
    ///
    /// Determined (and equal to the idempotent of the intersection) exactly
    /// when one segment contains the other or the overlap has at least two
    /// points; otherwise the composition is not an averaging idempotent in
    /// general and `Undetermined` is returned.
    pub fn symbolic_compose(&self, other: &Segment) -> Composition {
        let nested = self.contains_seg(other) || other.contains_seg(self);
        match self.intersect(other) {
            Some(i) if nested || i.card() >= 2 => Composition::Determined(i),
            _ => Composition::Undetermined,
        }
    }

    /// Whether the pair satisfies the composition-law hypothesis.
    pub fn composes_with(&self, other: &Segment) -> bool {
        matches!(self.symbolic_compose(other), Composition::Determined(_))
    }
}

/// Outcome of [`Segment::symbolic_compose`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Composition {
    Determined(Segment),
    Undetermined,
}

impl fmt::Display for Segment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

impl FromStr for Segment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once("..")
            .ok_or_else(|| Error::SegmentParse(s.to_owned()))?;
        let lo: i64 = a.trim().parse().map_err(|_| Error::SegmentParse(s.to_owned()))?;
        let hi: i64 = b.trim().parse().map_err(|_| Error::SegmentParse(s.to_owned()))?;
        Segment::new(lo, hi)
    }
}

/// Integer-signed combination of segments, e.g. the star combination.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignedSegmentCombo {
    terms: Vec<(i32, Segment)>,
}

impl SignedSegmentCombo {
    pub fn terms(&self) -> &[(i32, Segment)] {
        &self.terms
    }

    pub fn coefficient_sum(&self) -> i32 {
        self.terms.iter().map(|(c, _)| c).sum()
    }
}
