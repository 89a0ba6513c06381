//! Spherical coefficient sequences, their Gram-matrix inner-product models,
//! and the diagonal model for higher log-conductor.
//!
//! For an unramified parameter `alpha` the normalized correlation sequence
//! `a_n` starts from `a_0 = 1`, `a_1 = (alpha + 1/alpha)/(sqrt(q) +
//! 1/sqrt(q))` and extends by the Hecke recurrence with coefficients
//! `b_1 = a_1 (1 + 1/q)`, `b_0 = -1/q`.  The Gram matrix `<v_i, v_j> =
//! a_(|i-j|)` is then positive definite and the projection identities below
//! hold; all of that is checked here rather than assumed.

pub mod diagonal;
mod scalar;

pub use diagonal::{DiagonalModel, StarDiagonalReport};
pub use scalar::Scalar;

use crate::error::{Error, Result};
use num::rational::BigRational;
use num::{BigInt, Signed};
use num_complex::Complex64;

/// Tolerance below which a float invariant check is accepted.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Unramified spectral parameter: `alpha` on the unit circle (tempered) or
/// real in `(q^-1/2, q^1/2)` (complementary), away from `±1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatakeParam {
    alpha: Complex64,
    q: u32,
}

impl SatakeParam {
    pub fn new(alpha: Complex64, q: u32) -> Result<Self> {
        assert!(q >= 2, "residue cardinality must be at least 2");
        let eps = 1e-9;
        let tempered = (alpha.norm() - 1.0).abs() <= eps;
        let real = alpha.im.abs() <= eps;
        let sq = (q as f64).sqrt();
        let complementary = real && alpha.re > 1.0 / sq + eps && alpha.re < sq - eps;
        if !(tempered || complementary) {
            return Err(Error::Degenerate(format!(
                "alpha {alpha} is neither on the unit circle nor real in (q^-1/2, q^1/2)"
            )));
        }
        if real && (alpha.re - 1.0).abs() <= eps {
            return Err(Error::Degenerate("alpha = 1 excluded".into()));
        }
        if real && (alpha.re + 1.0).abs() <= eps {
            return Err(Error::Degenerate("alpha = -1 excluded".into()));
        }
        Ok(SatakeParam { alpha, q })
    }

    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn is_tempered(&self) -> bool {
        (self.alpha.norm() - 1.0).abs() <= 1e-9
    }

    /// `a_1 = (alpha + 1/alpha) / (sqrt q + 1/sqrt q)`.
    pub fn a1(&self) -> Complex64 {
        let sq = (self.q as f64).sqrt();
        (self.alpha + self.alpha.inv()) / Complex64::new(sq + 1.0 / sq, 0.0)
    }

    /// Sharp tempered bound `2 / (sqrt q + 1/sqrt q)`.
    pub fn tempered_bound(&self) -> f64 {
        let sq = (self.q as f64).sqrt();
        2.0 / (sq + 1.0 / sq)
    }
}

/// Two-sided symmetric sequence `a_n`, stored for `0 <= n <= n_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientSeq<S: Scalar> {
    q: u32,
    values: Vec<S>,
}

impl<S: Scalar> CoefficientSeq<S> {
    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n_max(&self) -> i64 {
        self.values.len() as i64 - 1
    }

    /// Symmetric accessor: `a(-n) = a(n)`.
    pub fn at(&self, n: i64) -> S {
        self.values[n.unsigned_abs() as usize].clone()
    }

    /// Seeds `a_0 = 1`, `a_1` and extends by `a_(k+2) = b_1 a_(k+1) + b_0 a_k`.
    pub fn generate(q: u32, a1: S, b0: S, b1: S, n_max: usize) -> Self {
        let mut values = vec![S::one(), a1];
        for k in 0..n_max.saturating_sub(1) {
            let next = b1.mul(&values[k + 1]).add(&b0.mul(&values[k]));
            values.push(next);
        }
        values.truncate(n_max + 1);
        CoefficientSeq { q, values }
    }

    /// Mutable poke used by corruption-detection tests.
    pub fn perturb(&mut self, n: usize, delta: S) {
        self.values[n] = self.values[n].add(&delta);
    }
}

/// Hecke-recurrence coefficients for residue cardinality `q`:
/// `b_1 = a_1 (1 + 1/q)`, `b_0 = -1/q`.
fn recurrence_coeffs<S: Scalar>(a1: &S, q: u32) -> (S, S) {
    let b1 = a1.mul(&S::from_ratio(q as i64 + 1, q as i64));
    let b0 = S::from_ratio(-1, q as i64);
    (b0, b1)
}

/// The float-mode spherical sequence for a spectral parameter.
pub fn spherical_coeffs(s: &SatakeParam, n_max: usize) -> CoefficientSeq<Complex64> {
    let a1 = s.a1();
    let (b0, b1) = recurrence_coeffs(&a1, s.q());
    CoefficientSeq::generate(s.q(), a1, b0, b1, n_max)
}

/// Exact-mode sequence from a rational `a_1`.
///
/// The input must satisfy the sharp tempered bound `|a_1| < 2 sqrt(q)/(q+1)`,
/// checked exactly by squaring.
pub fn spherical_coeffs_exact(
    a1: &BigRational,
    q: u32,
    n_max: usize,
) -> Result<CoefficientSeq<BigRational>> {
    let qq = BigInt::from(q);
    let bound_ok = a1 * a1 * (&qq + 1) * (&qq + 1) < BigRational::from(4 * &qq);
    if !bound_ok {
        return Err(Error::Degenerate(format!(
            "rational a1 = {a1} violates the sharp bound 2 sqrt(q)/(q+1)"
        )));
    }
    let (b0, b1) = recurrence_coeffs(a1, q);
    Ok(CoefficientSeq::generate(q, a1.clone(), b0, b1, n_max))
}

/// Solves the 2x2 system `a_1 = b_1 a_0 + b_0 a_(-1)`, `a_2 = b_1 a_1 + b_0 a_0`
/// for `(b_0, b_1)`.  Singular exactly when `a_1 = ±1`.
pub fn solve_b<S: Scalar>(seq: &CoefficientSeq<S>) -> Result<(S, S)> {
    let a1 = seq.at(1);
    let a2 = seq.at(2);
    let det = S::one().sub(&a1.mul(&a1));
    let singular = if S::EXACT {
        det.is_zero()
    } else {
        det.abs() < 1e-12
    };
    if singular {
        return Err(Error::Degenerate("a1 = ±1: system is singular".into()));
    }
    let b1 = a1.mul(&S::one().sub(&a2)).div(&det);
    let b0 = a2.sub(&a1.mul(&a1)).div(&det);
    Ok((b0, b1))
}

/// Residuals of the defining 2x2 system.
pub fn linear_system_residuals<S: Scalar>(seq: &CoefficientSeq<S>, b0: &S, b1: &S) -> (f64, f64) {
    let r1 = seq.at(1).sub(&b1.mul(&seq.at(0))).sub(&b0.mul(&seq.at(-1)));
    let r2 = seq.at(2).sub(&b1.mul(&seq.at(1))).sub(&b0.mul(&seq.at(0)));
    (r1.abs(), r2.abs())
}

/// Max residual of the recurrence over instances indexed by `lo..=hi`.
///
/// The symmetric extension satisfies the recurrence outward from the center
/// in both directions, so an index `n <= -2` checks the mirror image of the
/// forward instance (the literal two-sided reading would compare decaying
/// against growing solutions and is false for every correlation sequence).
pub fn recurrence_check<S: Scalar>(seq: &CoefficientSeq<S>, b0: &S, b1: &S, lo: i64, hi: i64) -> f64 {
    let mut worst: f64 = 0.0;
    for n in lo..=hi {
        let k = if n >= -1 { n } else { -n - 2 };
        let r = seq
            .at(k + 2)
            .sub(&b1.mul(&seq.at(k + 1)))
            .sub(&b0.mul(&seq.at(k)));
        worst = worst.max(r.abs());
    }
    worst
}

/// Gram model on a window of shift indices: entry `(i,j)` is `a_(|idx_i - idx_j|)`.
#[derive(Debug, Clone)]
pub struct GramModel<S: Scalar> {
    indices: Vec<i64>,
    gram: Vec<S>, // row major, square
}

impl<S: Scalar> GramModel<S> {
    pub fn build(seq: &CoefficientSeq<S>, indices: &[i64]) -> Self {
        let n = indices.len();
        let mut gram = Vec::with_capacity(n * n);
        for &i in indices {
            for &j in indices {
                gram.push(seq.at(i - j));
            }
        }
        GramModel {
            indices: indices.to_vec(),
            gram,
        }
    }

    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn entry(&self, r: usize, c: usize) -> &S {
        &self.gram[r * self.indices.len() + c]
    }

    /// Largest deviation from Hermitian symmetry.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.indices.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max(self.entry(i, j).sub(&self.entry(j, i).conj()).abs());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the symmetrized real part (entries are real up
    /// to rounding here).
    pub fn min_eigenvalue(&self) -> f64 {
        let n = self.indices.len();
        let mut m = vec![0.0f64; n * n];
        for i in 0..n {
            for j in 0..n {
                m[i * n + j] = (self.entry(i, j).re() + self.entry(j, i).re()) / 2.0;
            }
        }
        jacobi_min_eigenvalue(&mut m, n)
    }

    /// Exact positive-semidefiniteness via leading principal minors.
    pub fn psd_exact(&self) -> bool
    where
        S: ExactDet,
    {
        let n = self.indices.len();
        for k in 1..=n {
            let mut sub = Vec::with_capacity(k * k);
            for i in 0..k {
                for j in 0..k {
                    sub.push(self.entry(i, j).clone());
                }
            }
            if S::det_is_negative(&sub, k) {
                return false;
            }
        }
        true
    }
}

/// Exact determinant-sign support for PSD tests in exact mode.
pub trait ExactDet: Scalar {
    fn det_is_negative(entries: &[Self], n: usize) -> bool;
}

impl ExactDet for BigRational {
    fn det_is_negative(entries: &[Self], n: usize) -> bool {
        // plain fraction Gaussian elimination; n <= 8 so growth is harmless
        let mut m = entries.to_vec();
        let mut det = BigRational::from(BigInt::from(1));
        for col in 0..n {
            let Some(p) = (col..n).find(|&r| !num::Zero::is_zero(&m[r * n + col])) else {
                return false; // singular: det = 0, not negative
            };
            if p != col {
                for c in 0..n {
                    m.swap(col * n + c, p * n + c);
                }
                det = -det;
            }
            let pivot = m[col * n + col].clone();
            det *= &pivot;
            for r in (col + 1)..n {
                let f = &m[r * n + col] / &pivot;
                for c in col..n {
                    let v = &m[r * n + c] - &f * &m[col * n + c];
                    m[r * n + c] = v;
                }
            }
        }
        det.is_negative()
    }
}

/// Cyclic-by-cyclic Jacobi sweep; adequate for the 8x8 checks here.
fn jacobi_min_eigenvalue(m: &mut [f64], n: usize) -> f64 {
    for _sweep in 0..64 {
        let mut off = 0.0;
        for p in 0..n {
            for q in (p + 1)..n {
                off += m[p * n + q] * m[p * n + q];
            }
        }
        if off < 1e-28 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m[p * n + p];
                let aqq = m[q * n + q];
                let theta = 0.5 * (2.0 * apq).atan2(aqq - app);
                let (s, c) = theta.sin_cos();
                for k in 0..n {
                    let akp = m[k * n + p];
                    let akq = m[k * n + q];
                    m[k * n + p] = c * akp - s * akq;
                    m[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[p * n + k];
                    let aqk = m[q * n + k];
                    m[p * n + k] = c * apk - s * aqk;
                    m[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| m[i * n + i]).fold(f64::INFINITY, f64::min)
}

/// Coefficients of the orthogonal projection of `v_target` onto the span of
/// `v_i, i in span`, from Gram data alone, plus the residual norm squared.
pub fn project<S: Scalar>(
    seq: &CoefficientSeq<S>,
    target: i64,
    span: &[i64],
) -> Result<(Vec<S>, S)> {
    let k = span.len();
    if k == 0 {
        return Ok((vec![], seq.at(0)));
    }
    // normal equations G c = rhs, rhs_i = <v_target, v_i>
    let mut g = Vec::with_capacity(k * k);
    for &i in span {
        for &j in span {
            g.push(seq.at(i - j));
        }
    }
    let rhs: Vec<S> = span.iter().map(|&i| seq.at(target - i)).collect();
    let coeffs = solve_linear(g, rhs.clone(), k)
        .ok_or_else(|| Error::SingularGram(span.to_vec()))?;
    // residual^2 = a_0 - 2 Re <c, rhs> + c* G c, computed as
    // <v_t - p, v_t - p> = a_0 - c*.rhs - rhs*.c + c* G c; all on Gram data
    let mut r2 = seq.at(0);
    for (ci, rhsi) in coeffs.iter().zip(&rhs) {
        r2 = r2.sub(&ci.conj().mul(rhsi));
    }
    for (ci, &i) in coeffs.iter().zip(span) {
        // rhs*_i c_i term and the quadratic term folded together:
        // <p, v_t> = sum_i c_i <v_i, v_t>, and <p, p> = sum c_i <v_i, p>
        let mut inner = S::zero(); // <v_i, p> = sum_j conj(c_j) a(i-j)
        for (cj, &j) in coeffs.iter().zip(span) {
            inner = inner.add(&cj.conj().mul(&seq.at(i - j)));
        }
        let vt_vi = seq.at(i - target); // <v_i, v_t>
        r2 = r2.add(&ci.mul(&inner.sub(&vt_vi)));
    }
    Ok((coeffs, r2))
}

/// Norm of the difference of the two projections of `v_target`, in the Gram
/// metric of the union span.
pub fn projection_discrepancy<S: Scalar>(
    seq: &CoefficientSeq<S>,
    target: i64,
    span1: &[i64],
    span2: &[i64],
) -> Result<f64> {
    let (c1, _) = project(seq, target, span1)?;
    let (c2, _) = project(seq, target, span2)?;
    // difference vector on the union index set
    let mut union: Vec<i64> = span1.iter().chain(span2.iter()).copied().collect();
    union.sort_unstable();
    union.dedup();
    let coeff_at = |idx: i64| -> S {
        let mut v = S::zero();
        if let Some(p) = span1.iter().position(|&i| i == idx) {
            v = v.add(&c1[p]);
        }
        if let Some(p) = span2.iter().position(|&i| i == idx) {
            v = v.sub(&c2[p]);
        }
        v
    };
    let mut norm2 = S::zero();
    for &i in &union {
        for &j in &union {
            norm2 = norm2.add(&coeff_at(i).conj().mul(&coeff_at(j)).mul(&seq.at(i - j)));
        }
    }
    Ok(norm2.abs().sqrt())
}

fn solve_linear<S: Scalar>(mut g: Vec<S>, mut rhs: Vec<S>, n: usize) -> Option<Vec<S>> {
    let mut scale: f64 = 0.0;
    for e in &g {
        scale = scale.max(e.abs());
    }
    for col in 0..n {
        let pivot_row = (col..n).max_by(|&a, &b| {
            g[a * n + col]
                .abs()
                .partial_cmp(&g[b * n + col].abs())
                .unwrap()
        })?;
        let pv = g[pivot_row * n + col].clone();
        let bad = if S::EXACT {
            pv.is_zero()
        } else {
            pv.abs() <= scale * 1e-12
        };
        if bad {
            return None;
        }
        if pivot_row != col {
            for c in 0..n {
                g.swap(col * n + c, pivot_row * n + c);
            }
            rhs.swap(col, pivot_row);
        }
        for r in 0..n {
            if r == col {
                continue;
            }
            let f = g[r * n + col].div(&pv);
            for c in col..n {
                let v = g[r * n + c].sub(&f.mul(&g[col * n + c]));
                g[r * n + c] = v;
            }
            rhs[r] = rhs[r].sub(&f.mul(&rhs[col]));
        }
    }
    Some(
        (0..n)
            .map(|i| rhs[i].div(&g[i * n + i]))
            .collect(),
    )
}

/// All residual magnitudes from one full check of the projection identity.
#[derive(Debug, Clone)]
pub struct C0Report {
    pub linear1: f64,
    pub linear2: f64,
    pub recurrence: f64,
    /// `|<v_3 - w, v_j>|` for j = 2, 1, 0
    pub orthogonality: [f64; 3],
    /// projections of v_3 onto {1,2} vs {0,1,2}
    pub projection_i3: f64,
    /// mirror case: projections of v_0 onto {1,2} vs {1,2,3}
    pub projection_i0: f64,
    pub gram_min_eigenvalue: f64,
    pub gram_hermitian_defect: f64,
    /// set in exact mode when every residual is identically zero
    pub exact_zero: bool,
}

impl C0Report {
    pub fn pass(&self, tol: f64) -> bool {
        self.linear1 <= 1e-12
            && self.linear2 <= 1e-12
            && self.recurrence <= 1e-12
            && self.orthogonality.iter().all(|r| *r <= tol)
            && self.projection_i3 <= tol
            && self.projection_i0 <= tol
            && self.gram_min_eigenvalue >= -tol
            && self.gram_hermitian_defect <= tol
    }
}

/// Runs every check of the `c = 0` projection identity on a sequence.
pub fn verify_c0_seq<S: Scalar>(seq: &CoefficientSeq<S>) -> Result<C0Report> {
    let (b0, b1) = solve_b(seq)?;
    let (linear1, linear2) = linear_system_residuals(seq, &b0, &b1);
    let recurrence = recurrence_check(seq, &b0, &b1, -5, 5);

    // w = b_1 v_2 + b_0 v_1; <v_3 - w, v_j> for j = 2, 1, 0
    let mut orthogonality = [0.0f64; 3];
    for (slot, j) in [(0usize, 2i64), (1, 1), (2, 0)] {
        let w_vj = b1.mul(&seq.at(2 - j)).add(&b0.mul(&seq.at(1 - j)));
        orthogonality[slot] = seq.at(3 - j).sub(&w_vj).abs();
    }

    let projection_i3 = projection_discrepancy(seq, 3, &[1, 2], &[0, 1, 2])?;
    let projection_i0 = projection_discrepancy(seq, 0, &[1, 2], &[1, 2, 3])?;

    let gram = GramModel::build(seq, &[0, 1, 2, 3, 4, 5, 6, 7]);
    let gram_min_eigenvalue = gram.min_eigenvalue();
    let gram_hermitian_defect = gram.hermitian_defect();

    let exact_zero = S::EXACT
        && linear1 == 0.0
        && linear2 == 0.0
        && recurrence == 0.0
        && orthogonality.iter().all(|r| *r == 0.0)
        && projection_i3 == 0.0
        && projection_i0 == 0.0;

    Ok(C0Report {
        linear1,
        linear2,
        recurrence,
        orthogonality,
        projection_i3,
        projection_i0,
        gram_min_eigenvalue,
        gram_hermitian_defect,
        exact_zero,
    })
}

/// Float-mode entry point from a spectral parameter.
pub fn verify_c0_case(s: &SatakeParam) -> Result<C0Report> {
    let seq = spherical_coeffs(s, 12);
    verify_c0_seq(&seq)
}

/// The parameter sweep used by the acceptance run: `count` tempered
/// parameters `exp(2 pi i j / 41)` with `q` cycling over {2, 3, 4}, then
/// five complementary real parameters at `q = 2`.
pub fn acceptance_parameters(count: usize) -> Vec<SatakeParam> {
    let mut out = Vec::new();
    let qs = [2u32, 3, 4];
    for j in 1..=count {
        let theta = 2.0 * std::f64::consts::PI * j as f64 / 41.0;
        let alpha = Complex64::from_polar(1.0, theta);
        out.push(SatakeParam::new(alpha, qs[(j - 1) % 3]).expect("tempered parameter"));
    }
    for re in [0.75, 0.8, 1.1, 1.2, 1.3] {
        out.push(
            SatakeParam::new(Complex64::new(re, 0.0), 2).expect("complementary parameter"),
        );
    }
    out
}
