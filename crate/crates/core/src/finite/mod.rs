//! Segment-indexed congruence subgroups realized inside `SL2(Z/p^L)`, and
//! the exact rational linear algebra verifying the idempotent calculus there.
//!
//! The subgroups are the Eichler-type groups `E(i,j)` of unit-determinant
//! matrices with `b == 0 mod p^i` and `c == 0 mod p^j`.  A segment `m..n`
//! containing a pivot `t` embeds as the pair `(t-m, n-t)`.  All operator
//! identities are checked on the permutation module of cosets `G/B`, where
//! `B` contains every subgroup in play, so a matrix identity is equivalent
//! to the corresponding group-algebra identity.

mod cache;
mod checks;
mod coset;
mod operator;

pub use cache::{load_group, save_group};
pub use checks::{
    check_lemma_composition, check_product_decomposition, check_product_with_group,
    check_theorem_main, composition_residual, CompositionReport, ProductReport, SegmentContext,
    TheoremReport,
};
pub use coset::CosetSpace;
pub use operator::{averaging_matrix, orbit_count, star_matrix, HeckeOperator};

use crate::error::{Error, Result};
use crate::seg::Segment;

/// Default cap on the order of the enumerated group.
pub const DEFAULT_GROUP_BUDGET: u128 = 1_000_000;

/// Arithmetic parameters: everything happens mod `p^L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ModelParams {
    p: u64,
    depth: u32,
    modulus: u64,
    budget: u128,
}

impl ModelParams {
    pub fn new(p: u64, depth: u32) -> Result<Self> {
        Self::with_budget(p, depth, DEFAULT_GROUP_BUDGET)
    }

    pub fn with_budget(p: u64, depth: u32, budget: u128) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        assert!(depth >= 1, "depth must be at least 1");
        let modulus = p
            .checked_pow(depth)
            .filter(|m| *m < (1 << 31))
            .ok_or(Error::SizeBudget {
                what: "modulus p^L",
                size: u128::MAX,
                limit: 1 << 31,
            })?;
        let params = ModelParams {
            p,
            depth,
            modulus,
            budget,
        };
        let size = params.group_order();
        if size > budget {
            return Err(Error::SizeBudget {
                what: "group SL2(Z/p^L)",
                size,
                limit: budget,
            });
        }
        Ok(params)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `|SL2(Z/p^L)| = p^(3L-2) (p^2 - 1)`.
    pub fn group_order(&self) -> u128 {
        let p = self.p as u128;
        p.pow(3 * self.depth - 2) * (p * p - 1)
    }
}

/// Unit-determinant 2x2 matrix over `Z/p^L`, entries in `[0, p^L)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct GroupElement {
    pub a: u64,
    pub b: u64,
    pub c: u64,
    pub d: u64,
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement { a: 1, b: 0, c: 0, d: 1 }
    }

    pub fn mul(&self, other: &GroupElement, params: &ModelParams) -> GroupElement {
        let m = params.modulus;
        GroupElement {
            a: (self.a * other.a + self.b * other.c) % m,
            b: (self.a * other.b + self.b * other.d) % m,
            c: (self.c * other.a + self.d * other.c) % m,
            d: (self.c * other.b + self.d * other.d) % m,
        }
    }

    pub fn inv(&self, params: &ModelParams) -> GroupElement {
        // det = 1, so the adjugate is the inverse.
        let m = params.modulus;
        GroupElement {
            a: self.d,
            b: (m - self.b) % m,
            c: (m - self.c) % m,
            d: self.a,
        }
    }

    pub fn det(&self, params: &ModelParams) -> u64 {
        let m = params.modulus;
        ((self.a * self.d) % m + m - (self.b * self.c) % m) % m
    }

    /// Packs the four residues into a single key; modulus < 2^16 would allow
    /// u64, but residues are < 2^31 so u128 is used for safety.
    pub fn pack(&self) -> u128 {
        ((self.a as u128) << 96) | ((self.b as u128) << 64) | ((self.c as u128) << 32) | self.d as u128
    }
}

/// Congruence exponents: membership means `b == 0 mod p^i`, `c == 0 mod p^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EichlerPair {
    pub i: u32,
    pub j: u32,
}

impl EichlerPair {
    pub fn new(i: u32, j: u32, params: &ModelParams) -> Result<Self> {
        if i + j > params.depth {
            return Err(Error::InvalidEichlerPair {
                i,
                j,
                depth: params.depth,
            });
        }
        Ok(EichlerPair { i, j })
    }

    /// `E(i,j) ⊆ E(i',j')` iff the congrence conditions are stronger.
    pub fn contained_in(&self, other: &EichlerPair) -> bool {
        self.i >= other.i && self.j >= other.j
    }

    /// Member-set intersection is the componentwise max.
    pub fn intersect(&self, other: &EichlerPair) -> EichlerPair {
        EichlerPair {
            i: self.i.max(other.i),
            j: self.j.max(other.j),
        }
    }

    /// Index of `E(i,j)` in the full group: 1 when `i=j=0`, else
    /// `p^(i+j-1) (p+1)`.
    pub fn index(&self, params: &ModelParams) -> u128 {
        let p = params.p as u128;
        let s = self.i + self.j;
        if s == 0 {
            1
        } else {
            p.pow(s - 1) * (p + 1)
        }
    }

    pub fn order(&self, params: &ModelParams) -> u128 {
        params.group_order() / self.index(params)
    }

    pub fn is_member(&self, g: &GroupElement, params: &ModelParams) -> bool {
        let pi = params.p.pow(self.i);
        let pj = params.p.pow(self.j);
        g.b % pi == 0 && g.c % pj == 0
    }
}

/// Conjugating a segment subgroup by `diag(p^pivot, 1)` lands it on the
/// Eichler pair `(pivot - lo, hi - pivot)`.
pub fn segment_embed(seg: &Segment, pivot: i64, params: &ModelParams) -> Result<EichlerPair> {
    if !seg.contains(pivot) {
        return Err(Error::PivotOutside {
            pivot,
            segment: *seg,
        });
    }
    if seg.card() - 1 > params.depth as i64 {
        return Err(Error::DepthOverflow {
            segment: *seg,
            depth: params.depth,
        });
    }
    EichlerPair::new((pivot - seg.lo()) as u32, (seg.hi() - pivot) as u32, params)
}

/// All of `SL2(Z/p^L)` in lexicographic `(a,b,c,d)` order.
///
/// Enumerates `(a,b,c)` and solves `a d = 1 + b c` for `d`; the solution set
/// for fixed `(a,b,c)` is either empty or an arithmetic progression.
pub fn enumerate_group(params: &ModelParams) -> Vec<GroupElement> {
    let m = params.modulus;
    let p = params.p;
    let mut out = Vec::with_capacity(params.group_order() as usize);
    for a in 0..m {
        let va = val_p(a, p, params.depth);
        for b in 0..m {
            for c in 0..m {
                let e = (1 + b * c) % m;
                if a == 0 {
                    // d free, need bc == -1 mod p^L
                    if e == 0 {
                        for d in 0..m {
                            out.push(GroupElement { a, b, c, d });
                        }
                    }
                    continue;
                }
                let ve = val_p(e, p, params.depth);
                if va > ve {
                    continue;
                }
                let pv = p.pow(va);
                let m_red = m / pv;
                let a_red = a / pv;
                let e_red = (e / pv) % m_red;
                let d0 = (e_red * mod_inverse(a_red, m_red)) % m_red;
                // all d with d == d0 mod m/p^va
                let mut d = d0;
                while d < m {
                    out.push(GroupElement { a, b, c, d });
                    d += m_red;
                }
            }
        }
    }
    debug_assert_eq!(out.len() as u128, params.group_order());
    out
}

/// The sublist of the group satisfying the pair's congruences, in group order.
pub fn eichler_members(
    params: &ModelParams,
    group: &[GroupElement],
    pair: &EichlerPair,
) -> Vec<GroupElement> {
    let members: Vec<_> = group
        .iter()
        .copied()
        .filter(|g| pair.is_member(g, params))
        .collect();
    debug_assert_eq!(members.len() as u128, pair.order(params));
    members
}

/// A small generating set for `E(i,j)`.
///
/// For `i+j >= 1` every member factors as lower-unipotent x torus x
/// upper-unipotent (the upper-left entry is a unit), so the two unipotent
/// generators and torus generators suffice; for the full group the
/// unipotents alone generate and the torus generators are harmless extras.
pub fn eichler_generators(params: &ModelParams, pair: &EichlerPair) -> Vec<GroupElement> {
    let m = params.modulus;
    let p = params.p;
    let mut gens = vec![
        GroupElement {
            a: 1,
            b: p.pow(pair.i) % m,
            c: 0,
            d: 1,
        },
        GroupElement {
            a: 1,
            b: 0,
            c: p.pow(pair.j) % m,
            d: 1,
        },
    ];
    if p == 2 {
        if m > 2 {
            gens.push(GroupElement {
                a: m - 1,
                b: 0,
                c: 0,
                d: m - 1,
            });
        }
        if m > 4 {
            gens.push(GroupElement {
                a: 5 % m,
                b: 0,
                c: 0,
                d: mod_inverse(5 % m, m),
            });
        }
    } else {
        let g = primitive_root_mod_p_power(p, m);
        gens.push(GroupElement {
            a: g,
            b: 0,
            c: 0,
            d: mod_inverse(g, m),
        });
    }
    gens
}

pub(crate) fn val_p(x: u64, p: u64, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    let mut x = x;
    while x % p == 0 {
        x /= p;
        v += 1;
    }
    v
}

pub(crate) fn mod_inverse(a: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    assert_eq!(old_r, 1, "{a} not invertible mod {m}");
    old_s.rem_euclid(m as i128) as u64
}

pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

/// Smallest generator of `(Z/p^L)^x` for odd p: a primitive root mod p that
/// stays primitive mod p^2 generates every power.
fn primitive_root_mod_p_power(p: u64, m: u64) -> u64 {
    let mut g = 2;
    'outer: loop {
        // check g is a primitive root mod p
        let order_target = p - 1;
        for q in prime_factors(order_target) {
            if pow_mod(g, order_target / q, p) == 1 {
                g += 1;
                continue 'outer;
            }
        }
        break;
    }
    if m > p && pow_mod(g, p - 1, p * p) == 1 {
        g += p;
    }
    g % m
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn pow_mod(b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc: u128 = 1;
    let mut bb = b as u128 % m as u128;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * bb % m as u128;
        }
        bb = bb * bb % m as u128;
        e >>= 1;
    }
    acc as u64
}
