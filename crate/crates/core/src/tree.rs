//! Exact calculus of segment-conditioned resampling operators on
//! non-backtracking paths of the `(q+1)`-regular tree.
//!
//! Paths are never materialized as tree vertices.  A distribution carries a
//! conditioning segment `s` (the window where all its atoms agree with the
//! base path) and each atom is a pair of choice vectors: the backward vector
//! lists the choices taken stepping from `s.lo` down to the ambient low end,
//! the forward vector from `s.hi` up to the ambient high end.  Each choice
//! picks one of the `q` continuations excluding the reverse edge; at a
//! vertex lying on the base path with the base-path context intact, choice 0
//! means "follow the base path".  Conditioning windows of at least two
//! points keep the reverse-edge anchors inside the shared window, which is
//! exactly what makes the encoding closed under composition.

use crate::error::{Error, Result};
use crate::seg::Segment;
use num::rational::BigRational;
use num::{BigInt, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use std::collections::BTreeMap;

/// Cap on materialized cylinder sizes.
pub const DEFAULT_SUPPORT_BUDGET: u128 = 4_000_000;

/// Branching number `q` (vertex degree `q+1`) and the ambient index range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkParams {
    q: u32,
    ambient: Segment,
}

impl WalkParams {
    pub fn new(q: u32, ambient: Segment) -> Result<Self> {
        assert!(q >= 2, "branching number must be at least 2");
        if ambient.card() < 2 {
            return Err(Error::ConditioningTooShort(ambient));
        }
        Ok(WalkParams { q, ambient })
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn ambient(&self) -> Segment {
        self.ambient
    }
}

/// A non-backtracking path relative to the base path, as two choice vectors.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NBPath {
    pub backward: Vec<u8>,
    pub forward: Vec<u8>,
}

impl NBPath {
    /// Atom label used in reports: backward digits `|` forward digits.
    pub fn label(&self) -> String {
        let join = |v: &[u8]| {
            v.iter()
                .map(|c| c.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        format!("{}|{}", join(&self.backward), join(&self.forward))
    }
}

/// Finitely supported exact probability distribution on conditioned paths.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathDistribution {
    params: WalkParams,
    cond: Segment,
    support: BTreeMap<NBPath, BigRational>,
}

impl PathDistribution {
    /// Point mass at the base path itself (conditioned on everything).
    pub fn delta(params: &WalkParams) -> Self {
        let mut support = BTreeMap::new();
        support.insert(
            NBPath {
                backward: vec![],
                forward: vec![],
            },
            BigRational::one(),
        );
        PathDistribution {
            params: *params,
            cond: params.ambient,
            support,
        }
    }

    pub fn cond(&self) -> Segment {
        self.cond
    }

    pub fn support(&self) -> &BTreeMap<NBPath, BigRational> {
        &self.support
    }

    pub fn total_mass(&self) -> BigRational {
        self.support.values().sum()
    }

    /// Largest atomwise difference against another distribution.
    pub fn max_discrepancy(&self, other: &Self) -> BigRational {
        let mut best = BigRational::zero();
        if self.cond != other.cond {
            // different conditioning windows never share atoms
            for v in self.support.values().chain(other.support.values()) {
                if *v > best {
                    best = v.clone();
                }
            }
            return best;
        }
        let keys: std::collections::BTreeSet<_> =
            self.support.keys().chain(other.support.keys()).collect();
        for k in keys {
            let a = self.support.get(k).cloned().unwrap_or_else(BigRational::zero);
            let b = other.support.get(k).cloned().unwrap_or_else(BigRational::zero);
            let d = if a > b { a - b } else { b - a };
            if d > best {
                best = d;
            }
        }
        best
    }
}

fn check_budget(q: u32, slots: u32) -> Result<()> {
    let size = (q as u128).checked_pow(slots).unwrap_or(u128::MAX);
    if size > DEFAULT_SUPPORT_BUDGET {
        return Err(Error::SizeBudget {
            what: "path cylinder",
            size,
            limit: DEFAULT_SUPPORT_BUDGET,
        });
    }
    Ok(())
}

/// All paths on the ambient range agreeing with the base path on `fixed`.
pub fn support_set(params: &WalkParams, fixed: Segment) -> Result<Vec<NBPath>> {
    if !params.ambient.contains_seg(&fixed) {
        return Err(Error::OutsideAmbient(fixed, params.ambient));
    }
    if fixed.card() < 2 {
        return Err(Error::ConditioningTooShort(fixed));
    }
    let b = (fixed.lo() - params.ambient.lo()) as u32;
    let f = (params.ambient.hi() - fixed.hi()) as u32;
    check_budget(params.q, b + f)?;
    let mut out = Vec::new();
    let mut bwd = enumerate_vectors(params.q, b);
    let fwd = enumerate_vectors(params.q, f);
    for backward in bwd.drain(..) {
        for forward in &fwd {
            out.push(NBPath {
                backward: backward.clone(),
                forward: forward.clone(),
            });
        }
    }
    Ok(out)
}

fn enumerate_vectors(q: u32, len: u32) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        let mut next = Vec::with_capacity(out.len() * q as usize);
        for v in &out {
            for c in 0..q as u8 {
                let mut w = v.clone();
                w.push(c);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

/// Redistributes each atom's mass uniformly over all paths agreeing with it
/// on `seg`.  Total mass is preserved exactly.
///
/// The result is conditioned on `seg ∩ cond`, which must keep at least two
/// points for the choice-vector encoding to stay closed.
pub fn rho(seg: Segment, dist: &PathDistribution) -> Result<PathDistribution> {
    let params = dist.params;
    if !params.ambient.contains_seg(&seg) {
        return Err(Error::OutsideAmbient(seg, params.ambient));
    }
    if seg.card() < 2 {
        return Err(Error::ConditioningTooShort(seg));
    }
    let new_cond = seg
        .intersect(&dist.cond)
        .filter(|i| i.card() >= 2)
        .ok_or_else(|| Error::ConditioningTooShort(seg))?;

    // Choices inherited from an atom: the stretch of `seg` outside the old
    // conditioning window.  Everything beyond `seg` is resampled.
    let inherit_b = (dist.cond.lo() - seg.lo()).max(0) as usize;
    let inherit_f = (seg.hi() - dist.cond.hi()).max(0) as usize;
    let fresh_b = (seg.lo() - params.ambient.lo()) as u32;
    let fresh_f = (params.ambient.hi() - seg.hi()) as u32;
    check_budget(params.q, fresh_b + fresh_f)?;

    let fresh_bwd = enumerate_vectors(params.q, fresh_b);
    let fresh_fwd = enumerate_vectors(params.q, fresh_f);
    let scale = BigRational::new(
        BigInt::one(),
        BigInt::from(params.q).pow(fresh_b + fresh_f),
    );

    let mut support: BTreeMap<NBPath, BigRational> = BTreeMap::new();
    for (atom, mass) in &dist.support {
        let kept_b = &atom.backward[..inherit_b.min(atom.backward.len())];
        let kept_f = &atom.forward[..inherit_f.min(atom.forward.len())];
        debug_assert_eq!(kept_b.len(), inherit_b);
        debug_assert_eq!(kept_f.len(), inherit_f);
        let part = mass * &scale;
        for nb in &fresh_bwd {
            for nf in &fresh_fwd {
                let mut backward = Vec::with_capacity(inherit_b + nb.len());
                backward.extend_from_slice(kept_b);
                backward.extend_from_slice(nb);
                let mut forward = Vec::with_capacity(inherit_f + nf.len());
                forward.extend_from_slice(kept_f);
                forward.extend_from_slice(nf);
                let key = NBPath { backward, forward };
                support
                    .entry(key)
                    .and_modify(|m| *m += &part)
                    .or_insert_with(|| part.clone());
            }
        }
    }
    Ok(PathDistribution {
        params,
        cond: new_cond,
        support,
    })
}

/// Report of the two-sided composition identity test.
#[derive(Debug, Clone)]
pub struct GoalReport {
    pub pass: bool,
    pub max_discrepancy: BigRational,
    pub atoms: usize,
}

/// Checks `rho_(m..n) rho_(m'..n') δ = rho_(m'..n) δ` exactly, atom by atom.
///
/// Requires the index hypothesis `m < m' < n < n'`.
pub fn verify_goal_paths(q: u32, m: i64, m1: i64, n: i64, n1: i64) -> Result<GoalReport> {
    if !(m < m1 && m1 < n && n < n1) {
        return Err(Error::IndexHypothesis { m, m1, n, n1 });
    }
    let params = WalkParams::new(q, Segment::new(m, n1)?)?;
    let delta = PathDistribution::delta(&params);
    let lhs = rho(Segment::new(m, n)?, &rho(Segment::new(m1, n1)?, &delta)?)?;
    let rhs = rho(Segment::new(m1, n)?, &delta)?;
    let max_discrepancy = lhs.max_discrepancy(&rhs);
    Ok(GoalReport {
        pass: lhs == rhs,
        max_discrepancy,
        atoms: rhs.support.len(),
    })
}

/// Empirical two-stage sampler: the middle window is deterministic, the
/// forward and backward extensions are chosen independently and uniformly.
/// Returns atom counts; deterministic for a given seed.
pub fn sample_two_stage(
    seed: u64,
    q: u32,
    m: i64,
    m1: i64,
    n: i64,
    n1: i64,
    trials: u64,
) -> Result<BTreeMap<NBPath, u64>> {
    if !(m < m1 && m1 < n && n < n1) {
        return Err(Error::IndexHypothesis { m, m1, n, n1 });
    }
    assert!(trials >= 1, "need at least one trial");
    let bwd_len = (m1 - m) as usize;
    let fwd_len = (n1 - n) as usize;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut counts: BTreeMap<NBPath, u64> = BTreeMap::new();
    for _ in 0..trials {
        let forward: Vec<u8> = (0..fwd_len).map(|_| rng.gen_range(0..q) as u8).collect();
        let backward: Vec<u8> = (0..bwd_len).map(|_| rng.gen_range(0..q) as u8).collect();
        *counts.entry(NBPath { backward, forward }).or_insert(0) += 1;
    }
    Ok(counts)
}

/// Exact law the two-stage sampler targets: `rho_(m'..n) δ`.
pub fn exact_goal_law(q: u32, m: i64, m1: i64, n: i64, n1: i64) -> Result<PathDistribution> {
    let params = WalkParams::new(q, Segment::new(m, n1)?)?;
    rho(Segment::new(m1, n)?, &PathDistribution::delta(&params))
}

/// Outcome of comparing the two-stage sampler against the exact law.
#[derive(Debug, Clone)]
pub struct MonteCarloSummary {
    pub total_variation: f64,
    pub within_three_sigma: bool,
    pub atoms: usize,
}

/// Runs the sampler and measures it against the exact law: per-atom
/// frequencies within three binomial sigmas and the total-variation
/// distance.
pub fn monte_carlo_summary(
    seed: u64,
    q: u32,
    m: i64,
    m1: i64,
    n: i64,
    n1: i64,
    trials: u64,
) -> Result<MonteCarloSummary> {
    use num::ToPrimitive;
    let exact = exact_goal_law(q, m, m1, n, n1)?;
    let counts = sample_two_stage(seed, q, m, m1, n, n1, trials)?;
    let mut tv = 0.0f64;
    let mut ok = true;
    for (atom, mass) in exact.support() {
        let p = mass.to_f64().expect("exact mass fits f64");
        let freq = counts.get(atom).copied().unwrap_or(0) as f64 / trials as f64;
        tv += (freq - p).abs();
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        if (freq - p).abs() > 3.0 * sigma {
            ok = false;
        }
    }
    // an atom outside the exact support would be a sampler bug
    for (atom, count) in &counts {
        if !exact.support().contains_key(atom) {
            ok = false;
            tv += *count as f64 / trials as f64;
        }
    }
    Ok(MonteCarloSummary {
        total_variation: tv / 2.0,
        within_three_sigma: ok,
        atoms: exact.support().len(),
    })
}
