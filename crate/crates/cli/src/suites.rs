//! Case builders for each verification suite.

use crate::report::{CaseReport, Residual};
use anyhow::Result;
use newspace_core::classical::{
    self, dim_new, dim_new_inversion_oracle, petersson_delta_new, trace_hecke_new,
};
use newspace_core::finite::{
    self, check_product_with_group, composition_residual, EichlerPair, GroupElement, ModelParams,
    SegmentContext,
};
use newspace_core::kirillov::{
    self, spherical_coeffs_exact, verify_c0_case, verify_c0_seq, DiagonalModel, SatakeParam,
};
use newspace_core::tree;
use newspace_core::Segment;
use num::rational::BigRational;
use num_complex::Complex64;
use std::path::PathBuf;
use std::time::Instant;

fn timed(mut report: CaseReport, start: Instant) -> CaseReport {
    report.runtime_ms = start.elapsed().as_millis();
    report
}

/// Group cache path under `NEWSPACE_CACHE_DIR`, when the variable is set.
pub fn cache_path(p: u64, depth: u32) -> Option<PathBuf> {
    std::env::var_os("NEWSPACE_CACHE_DIR")
        .map(|dir| PathBuf::from(dir).join(format!("group_p{p}_L{depth}.txt")))
}

/// Loads the enumerated group from the cache when possible, else enumerates
/// (and fills the cache when a cache dir is configured).
pub fn group_with_cache(params: &ModelParams) -> Result<Vec<GroupElement>> {
    if let Some(path) = cache_path(params.prime(), params.depth()) {
        if path.exists() {
            if let Ok(group) = finite::load_group(params, &path) {
                return Ok(group);
            }
        }
        let group = finite::enumerate_group(params);
        std::fs::create_dir_all(path.parent().expect("cache path has a parent"))?;
        finite::save_group(params, &group, &path)?;
        return Ok(group);
    }
    Ok(finite::enumerate_group(params))
}

/// All segments inside `ambient` containing `pivot`.
fn pivot_segments(ambient: Segment, pivot: i64) -> Vec<Segment> {
    let mut out = Vec::new();
    for lo in ambient.lo()..=pivot {
        for hi in pivot..=ambient.hi() {
            out.push(Segment::new(lo, hi).unwrap());
        }
    }
    out
}

pub struct FiniteArgs {
    pub p: u64,
    pub depth: u32,
    pub pivot: i64,
    pub ambient: Option<Segment>,
    pub exhaustive: bool,
}

pub fn finite_suite(args: &FiniteArgs) -> Result<Vec<CaseReport>> {
    let params = ModelParams::new(args.p, args.depth)?;
    let ambient = args
        .ambient
        .unwrap_or(Segment::new(0, args.depth as i64).unwrap());
    let group = group_with_cache(&params)?;
    let mut ctx = SegmentContext::with_group(&params, &group, ambient, args.pivot)?;
    let mut cases = Vec::new();

    // composition law over ordered pairs of pivot-containing segments
    let segs = pivot_segments(ambient, args.pivot);
    let pairs: Vec<(Segment, Segment)> = if args.exhaustive {
        segs.iter()
            .flat_map(|a| segs.iter().map(move |b| (*a, *b)))
            .collect()
    } else {
        let a = Segment::new(ambient.lo(), args.pivot + 1)?;
        let b = Segment::new(ambient.lo() + 1, ambient.hi())?;
        vec![(a, b), (b, a)]
    };
    for (l1, l2) in pairs {
        let start = Instant::now();
        let id = format!("lemma6 p={} L={} {} ∘ {}", args.p, args.depth, l1, l2);
        let case = CaseReport::new(id)
            .input("p", args.p)
            .input("L", args.depth)
            .input("pivot", args.pivot)
            .input("segments", format!("{l1},{l2}"));
        let case = if l1.composes_with(&l2) {
            let r = composition_residual(&mut ctx, l1, l2)?;
            case.pass_if(r.pass).with_residual(Residual::exact(&r.residual))
        } else {
            case.skip()
        };
        cases.push(timed(case, start));
    }

    // star projector on the ambient segment, when long enough
    if ambient.card() - 1 >= 3 {
        let start = Instant::now();
        let r = finite::check_theorem_main(&params, args.pivot, ambient)?;
        cases.push(timed(
            CaseReport::new(format!(
                "star p={} L={} segment={ambient}",
                args.p, args.depth
            ))
            .input("p", args.p)
            .input("L", args.depth)
            .input("pivot", args.pivot)
            .input("segments", ambient)
            .pass_if(r.pass()),
            start,
        ));
    }

    // product decomposition for the basic surjectivity configuration
    if args.depth >= 3 {
        let start = Instant::now();
        let r = check_product_with_group(
            &params,
            &group,
            EichlerPair::new(1, 1, &params)?,
            EichlerPair::new(0, 2, &params)?,
            EichlerPair::new(0, 1, &params)?,
            args.p == 2,
        )?;
        cases.push(timed(
            CaseReport::new(format!("product p={} L={} (1,1)x(0,2)", args.p, args.depth))
                .input("p", args.p)
                .input("L", args.depth)
                .pass_if(r.pass()),
            start,
        ));
    }
    Ok(cases)
}

pub struct TreeArgs {
    pub q: u32,
    pub indices: (i64, i64, i64, i64),
    pub trials: u64,
    pub seed: u64,
}

pub fn tree_suite(args: &TreeArgs) -> Result<Vec<CaseReport>> {
    let (m, m1, n, n1) = args.indices;
    let mut cases = Vec::new();

    let start = Instant::now();
    let r = tree::verify_goal_paths(args.q, m, m1, n, n1)?;
    let exact = tree::exact_goal_law(args.q, m, m1, n, n1)?;
    let atoms: std::collections::BTreeMap<String, String> = exact
        .support()
        .iter()
        .map(|(path, mass)| (path.label(), format!("{}/{}", mass.numer(), mass.denom())))
        .collect();
    cases.push(timed(
        CaseReport::new(format!("tree-goal q={} idx={m},{m1},{n},{n1}", args.q))
            .input("q", args.q)
            .input("indices", format!("{m},{m1},{n},{n1}"))
            .pass_if(r.pass)
            .with_residual(Residual::exact(&r.max_discrepancy))
            .with_atoms(atoms),
        start,
    ));

    if args.trials > 0 {
        let start = Instant::now();
        let mc = tree::monte_carlo_summary(args.seed, args.q, m, m1, n, n1, args.trials)?;
        cases.push(timed(
            CaseReport::new(format!(
                "tree-mc q={} idx={m},{m1},{n},{n1} trials={}",
                args.q, args.trials
            ))
            .input("q", args.q)
            .input("indices", format!("{m},{m1},{n},{n1}"))
            .input("trials", args.trials)
            .input("seed", args.seed)
            .pass_if(mc.within_three_sigma && mc.total_variation < 0.02)
            .with_residual(Residual::float(mc.total_variation, 0.0)),
            start,
        ));
    }
    Ok(cases)
}

pub struct KirillovArgs {
    pub q: u32,
    pub alpha: Option<Complex64>,
    pub a1_exact: Option<BigRational>,
    pub sweep: usize,
    pub tol: f64,
}

pub fn kirillov_suite(args: &KirillovArgs) -> Result<Vec<CaseReport>> {
    let mut cases = Vec::new();
    let push_float = |cases: &mut Vec<CaseReport>, s: &SatakeParam| -> Result<()> {
        let start = Instant::now();
        let r = verify_c0_case(s)?;
        let worst = r
            .orthogonality
            .iter()
            .copied()
            .fold(r.projection_i3.max(r.projection_i0), f64::max);
        cases.push(timed(
            CaseReport::new(format!(
                "kirillov q={} alpha={:.6}{:+.6}i",
                s.q(),
                s.alpha().re,
                s.alpha().im
            ))
            .input("q", s.q())
            .input("alpha", format!("{},{}", s.alpha().re, s.alpha().im))
            .pass_if(r.pass(args.tol))
            .with_residual(Residual::float(worst, 0.0)),
            start,
        ));
        Ok(())
    };

    if let Some(alpha) = args.alpha {
        push_float(&mut cases, &SatakeParam::new(alpha, args.q)?)?;
    }
    if let Some(a1) = &args.a1_exact {
        let start = Instant::now();
        let seq = spherical_coeffs_exact(a1, args.q, 12)?;
        let r = verify_c0_seq(&seq)?;
        cases.push(timed(
            CaseReport::new(format!("kirillov-exact q={} a1={a1}", args.q))
                .input("q", args.q)
                .input("a1", a1)
                .pass_if(r.exact_zero)
                .with_residual(Residual::float(r.projection_i3, 0.0)),
            start,
        ));
    }
    for j in 1..=args.sweep {
        let theta = std::f64::consts::PI * j as f64 / (args.sweep as f64 + 1.0);
        let s = SatakeParam::new(Complex64::from_polar(1.0, theta), args.q)?;
        push_float(&mut cases, &s)?;
    }

    // diagonal model: star ranks and compositions across conductors
    for c in [2u32, 3, 4] {
        let start = Instant::now();
        let model = DiagonalModel::new(c, Segment::new(0, 8).unwrap());
        let mut ok = model.check_all_compositions()?.is_none();
        for seg in kirillov::diagonal::subsegments(&model.ambient()) {
            if seg.card() < 3 {
                continue;
            }
            let r = model.star_diagonal(&seg)?;
            let want_rank_one = seg.card() - 1 == c as i64;
            ok &= if want_rank_one {
                r.is_projector && r.rank == 1 && r.rank_one_at == Some(seg.lo())
            } else {
                r.is_zero
            };
        }
        cases.push(timed(
            CaseReport::new(format!("diagonal c={c} ambient=0..8"))
                .input("c", c)
                .pass_if(ok),
            start,
        ));
    }
    Ok(cases)
}

/// Cubefull levels up to the bound, ascending (1 included: vacuously
/// cubefull).
pub fn cubefull_levels(max: u64) -> Vec<u64> {
    (1..=max).filter(|q| classical::is_cubefull(*q)).collect()
}

pub fn dims_suite(k: u32, qmax: u64) -> Result<(Vec<CaseReport>, Vec<(u32, u64, u64, String)>)> {
    let mut cases = Vec::new();
    let mut rows = Vec::new();
    for q in cubefull_levels(qmax) {
        let start = Instant::now();
        let d = dim_new(k, q)?;
        let oracle = dim_new_inversion_oracle(k, q)?;
        rows.push((k, q, 1u64, d.to_string()));
        cases.push(timed(
            CaseReport::new(format!("dims k={k} q={q:04}"))
                .input("k", k)
                .input("q", q)
                .pass_if(d == oracle && d >= 0)
                .with_residual(Residual::exact(&BigRational::from_integer(
                    (d - oracle).into(),
                ))),
            start,
        ));
    }
    Ok((cases, rows))
}

pub fn trace_new_case(k: u32, q: u64, n: u64) -> Result<(CaseReport, (u32, u64, u64, String))> {
    let start = Instant::now();
    let t = trace_hecke_new(k, q, n)?;
    let row = (k, q, n, t.to_string());
    let case = timed(
        CaseReport::new(format!("trace-new k={k} q={q} n={n}"))
            .input("k", k)
            .input("q", q)
            .input("n", n)
            .pass_if(true)
            .with_value(&t),
        start,
    );
    Ok((case, row))
}

pub fn petersson_new_case(k: u32, q: u64, m: u64, n: u64, tol: f64) -> Result<CaseReport> {
    let start = Instant::now();
    let v = petersson_delta_new(k, q, m, n, tol)?;
    Ok(timed(
        CaseReport::new(format!("petersson-new k={k} q={q} m={m} n={n}"))
            .input("k", k)
            .input("q", q)
            .input("m", m)
            .input("n", n)
            .input("tol", tol)
            .input("cutoff", v.cutoff)
            .pass_if(v.tail_bound <= tol)
            .with_residual(Residual::float(v.value, v.tail_bound)),
        start,
    ))
}
