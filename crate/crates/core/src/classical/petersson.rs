//! The harmonic-weight Petersson bracket and its newform refinement.
//!
//! `delta_full(k, N, m, n)` evaluates `δ_(m=n) + 2 pi i^(-k) sum over c = 0
//! mod N of S(m,n;c) J_(k-1)(4 pi sqrt(mn)/c) / c` with a certified
//! truncation bound from `|S(m,n;c)| <= c` and `|J_(k-1)(x)| <=
//! (x/2)^(k-1)/(k-1)!`.  The newform version is the signed double-divisor
//! combination with conversion weight `1/e`: re-expressing the
//! coefficient-normalized averages in the harmonic bracket contributes a
//! factor `d` per pair, and the volume normalization contributes the index
//! ratio `psi(q/(de))/psi(q) = 1/(de)` for cubefull `q`.

use super::arith::{gcd, is_cubefull, mobius_pairs, psi};
use super::bessel::bessel_j;
use super::kloosterman::kloosterman;
use super::trace::LevelWeight;
use crate::error::{Error, Result};

/// A float value carrying a rigorous truncation bound for its omitted tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeterssonValue {
    pub value: f64,
    pub tail_bound: f64,
    /// largest modulus included in the kernel sum
    pub cutoff: u64,
}

/// Upper bound for `sum over c > cutoff, c = 0 mod level` of
/// `|S| |J| / c <= (2 pi sqrt(mn))^(k-1)/(k-1)! c^(1-k)`.
fn tail_bound_beyond(k: u32, level: u64, m: u64, n: u64, cutoff: u64) -> f64 {
    let a = 2.0 * std::f64::consts::PI * ((m as f64) * (n as f64)).sqrt();
    let mut coeff = 1.0f64; // a^(k-1)/(k-1)!
    for j in 1..k {
        coeff *= a / j as f64;
    }
    // sum over c > cutoff with level | c of c^(1-k), by integral comparison:
    // level^(1-k) * J0^(2-k)/(k-2) with J0 = floor(cutoff/level)
    let j0 = (cutoff / level).max(1) as f64;
    coeff * (level as f64).powi(1 - k as i32) * j0.powf(2.0 - k as f64) / (k as f64 - 2.0)
}

/// The harmonic Petersson bracket for the full space.
pub fn petersson_delta(k: u32, level: u64, m: u64, n: u64, tol: f64) -> Result<PeterssonValue> {
    let lw = LevelWeight::new(k, level)?;
    assert!(m >= 1 && n >= 1);
    assert!(tol > 0.0);
    let sign = if lw.k % 4 == 0 { 1.0 } else { -1.0 }; // i^(-k) for even k
    let x_of = |c: u64| 4.0 * std::f64::consts::PI * ((m as f64) * (n as f64)).sqrt() / c as f64;

    // grow the cutoff geometrically until the certified tail fits
    let mut cutoff = level * 8;
    let hard_budget = 1u64 << 23;
    while tail_bound_beyond(lw.k, level, m, n, cutoff) > tol / 2.0 {
        cutoff *= 2;
        if cutoff > hard_budget {
            return Err(Error::ToleranceUnreachable {
                tol,
                detail: format!("kernel cutoff beyond {hard_budget} for k={k} N={level} m={m} n={n}"),
            });
        }
    }

    let mut kernel = 0.0f64;
    let mut c = level;
    while c <= cutoff {
        let s = kloosterman(m as i64, n as i64, c);
        if s != 0.0 {
            let j = bessel_j(lw.k - 1, x_of(c), tol / (16.0 * (cutoff / level) as f64))?;
            kernel += s * j / c as f64;
        }
        c += level;
    }
    let delta = if m == n { 1.0 } else { 0.0 };
    Ok(PeterssonValue {
        value: delta + 2.0 * std::f64::consts::PI * sign * kernel,
        tail_bound: tail_bound_beyond(lw.k, level, m, n, cutoff) + tol / 8.0,
        cutoff,
    })
}

/// The newform bracket for cubefull `q`: signed double-divisor combination
/// of full-space brackets at the divisor levels, weight `1/e`, with `d`
/// restricted to divisors of `gcd(m, n, q)`.
pub fn petersson_delta_new(k: u32, q: u64, m: u64, n: u64, tol: f64) -> Result<PeterssonValue> {
    if !is_cubefull(q) {
        return Err(Error::NotCubefull(q));
    }
    assert!(m >= 1 && n >= 1);
    let g = gcd(gcd(m, n), q);
    let pairs = mobius_pairs(q);
    let active: Vec<_> = pairs.iter().filter(|p| g % p.d == 0).collect();
    let per_term_tol = tol / active.len().max(1) as f64;
    let mut value = 0.0f64;
    let mut tail = 0.0f64;
    let mut cutoff = 0u64;
    for pair in active {
        let sub_level = q / (pair.d * pair.e);
        debug_assert_eq!(psi(q) / psi(sub_level), pair.d * pair.e);
        let v = petersson_delta(k, sub_level, m / pair.d, n / pair.d, per_term_tol)?;
        let w = pair.weight as f64 / pair.e as f64;
        value += w * v.value;
        tail += w.abs() * v.tail_bound;
        cutoff = cutoff.max(v.cutoff);
    }
    Ok(PeterssonValue {
        value,
        tail_bound: tail,
        cutoff,
    })
}
