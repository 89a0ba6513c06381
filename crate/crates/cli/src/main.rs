//! Batch verification driver: runs the exact-arithmetic suites, emits
//! reports, and manages the group caches.
//!
//! Exit codes: 0 all pass, 1 any fail, 2 usage errors.

mod report;
mod suites;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use newspace_core::finite::{self, ModelParams};
use newspace_core::Segment;
use num::rational::BigRational;
use num_complex::Complex64;
use rayon::prelude::*;
use report::{render_trace_csv, CaseReport, SuiteReport};
use std::str::FromStr;

#[derive(Parser)]
#[command(
    name = "newspace",
    about = "exact verification suites for segment-indexed averaging idempotents",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Worker threads for case-parallel suites (deterministic merge).
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,

    /// Global seed; per-case seeds derive from it.
    #[arg(long, global = true, default_value_t = 7)]
    seed: u64,

    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Human)]
    output: OutputFormat,

    /// Shorthand for --output json.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Human,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Finite-model checks in SL2(Z/p^L).
    Finite(FiniteCmd),
    /// Non-backtracking path calculus on the (q+1)-regular tree.
    TreeCheck(TreeCmd),
    /// Gram-model and diagonal-model checks.
    KirillovCheck(KirillovCmd),
    /// Newspace dimensions over cubefull levels.
    Dims(DimsCmd),
    /// Trace of a Hecke operator on the newspace.
    TraceNew(TraceCmd),
    /// Petersson average over newforms.
    PeterssonNew(PeterssonCmd),
    /// Write (and optionally verify) a group cache file.
    CacheGroup(CacheCmd),
    /// Run every suite on a small fixed grid.
    All,
}

#[derive(Args)]
struct FiniteCmd {
    #[arg(long)]
    p: u64,
    #[arg(long = "L")]
    depth: u32,
    #[arg(long)]
    pivot: Option<i64>,
    /// Segment range to quantify over, e.g. "0..4" (default 0..L).
    #[arg(long)]
    ambient: Option<String>,
    /// Check every eligible ordered pair of segments.
    #[arg(long)]
    exhaustive: bool,
}

#[derive(Args)]
struct TreeCmd {
    #[arg(long)]
    q: u32,
    /// Four comma-separated indices m,m',n,n'.
    #[arg(long)]
    indices: String,
    #[arg(long, default_value_t = 0)]
    trials: u64,
}

#[derive(Args)]
struct KirillovCmd {
    #[arg(long)]
    q: u32,
    /// Spectral parameter as "re,im".
    #[arg(long)]
    alpha: Option<String>,
    /// Exact rational a1 as "num/den" (exact mode).
    #[arg(long)]
    a1: Option<String>,
    /// Number of additional tempered sweep parameters.
    #[arg(long, default_value_t = 0)]
    sweep: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
}

#[derive(Args)]
struct DimsCmd {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    qmax: u64,
}

#[derive(Args)]
struct TraceCmd {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    n: u64,
}

#[derive(Args)]
struct PeterssonCmd {
    #[arg(long)]
    k: u32,
    #[arg(long)]
    q: u64,
    #[arg(long)]
    m: u64,
    #[arg(long)]
    n: u64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
}

#[derive(Args)]
struct CacheCmd {
    #[arg(long)]
    p: u64,
    #[arg(long = "L")]
    depth: u32,
    /// Output path (default: under NEWSPACE_CACHE_DIR, else the cwd).
    #[arg(long)]
    out: Option<std::path::PathBuf>,
    /// Reload the written file and compare.
    #[arg(long)]
    check: bool,
}

fn main() {
    let cli = Cli::parse();
    if cli.jobs > 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.jobs)
            .build_global()
            .ok();
    }
    match run(&cli) {
        Ok(all_pass) => std::process::exit(if all_pass { 0 } else { 1 }),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn parse_indices(s: &str) -> Result<(i64, i64, i64, i64)> {
    let v: Vec<i64> = s
        .split(',')
        .map(|t| t.trim().parse())
        .collect::<std::result::Result<_, _>>()?;
    anyhow::ensure!(v.len() == 4, "need exactly four indices m,m',n,n'");
    Ok((v[0], v[1], v[2], v[3]))
}

fn parse_alpha(s: &str) -> Result<Complex64> {
    let (re, im) = s
        .split_once(',')
        .ok_or_else(|| anyhow::anyhow!("alpha must be \"re,im\""))?;
    Ok(Complex64::new(re.trim().parse()?, im.trim().parse()?))
}

fn parse_rational(s: &str) -> Result<BigRational> {
    Ok(BigRational::from_str(s)?)
}

fn emit(cli: &Cli, suite: &str, cases: Vec<CaseReport>, csv: Option<String>) -> bool {
    let report = SuiteReport::assemble(suite, cli.seed, cases);
    let format = if cli.json { OutputFormat::Json } else { cli.output };
    match format {
        OutputFormat::Json => println!("{}", report.to_json()),
        OutputFormat::Csv => match csv {
            Some(table) => print!("{table}"),
            None => print!("{}", report.render_human()),
        },
        OutputFormat::Human => print!("{}", report.render_human()),
    }
    !report.any_fail()
}

fn run(cli: &Cli) -> Result<bool> {
    match &cli.command {
        Command::Finite(cmd) => {
            let ambient = cmd
                .ambient
                .as_deref()
                .map(Segment::from_str)
                .transpose()?;
            let args = suites::FiniteArgs {
                p: cmd.p,
                depth: cmd.depth,
                // default: the smallest pivot valid for the ambient range
                pivot: cmd.pivot.unwrap_or_else(|| ambient.map_or(0, |a| a.lo())),
                ambient,
                exhaustive: cmd.exhaustive,
            };
            Ok(emit(cli, "finite", suites::finite_suite(&args)?, None))
        }
        Command::TreeCheck(cmd) => {
            let args = suites::TreeArgs {
                q: cmd.q,
                indices: parse_indices(&cmd.indices)?,
                trials: cmd.trials,
                seed: cli.seed,
            };
            Ok(emit(cli, "tree", suites::tree_suite(&args)?, None))
        }
        Command::KirillovCheck(cmd) => {
            let args = suites::KirillovArgs {
                q: cmd.q,
                alpha: cmd.alpha.as_deref().map(parse_alpha).transpose()?,
                a1_exact: cmd.a1.as_deref().map(parse_rational).transpose()?,
                sweep: cmd.sweep,
                tol: cmd.tol,
            };
            Ok(emit(cli, "kirillov", suites::kirillov_suite(&args)?, None))
        }
        Command::Dims(cmd) => {
            let (cases, rows) = suites::dims_suite(cmd.k, cmd.qmax)?;
            Ok(emit(cli, "dims", cases, Some(render_trace_csv(&rows))))
        }
        Command::TraceNew(cmd) => {
            let (case, row) = suites::trace_new_case(cmd.k, cmd.q, cmd.n)?;
            Ok(emit(cli, "trace", vec![case], Some(render_trace_csv(&[row]))))
        }
        Command::PeterssonNew(cmd) => {
            let case = suites::petersson_new_case(cmd.k, cmd.q, cmd.m, cmd.n, cmd.tol)?;
            Ok(emit(cli, "petersson", vec![case], None))
        }
        Command::CacheGroup(cmd) => {
            let params = ModelParams::new(cmd.p, cmd.depth)?;
            let path = cmd
                .out
                .clone()
                .or_else(|| suites::cache_path(cmd.p, cmd.depth))
                .unwrap_or_else(|| {
                    std::path::PathBuf::from(format!("group_p{}_L{}.txt", cmd.p, cmd.depth))
                });
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            let group = finite::enumerate_group(&params);
            finite::save_group(&params, &group, &path)?;
            let mut ok = true;
            if cmd.check {
                let reloaded = finite::load_group(&params, &path)?;
                ok = reloaded == group;
            }
            println!(
                "wrote {} elements to {}{}",
                group.len(),
                path.display(),
                if cmd.check && ok { " (verified)" } else { "" }
            );
            Ok(ok)
        }
        Command::All => run_all(cli),
    }
}

/// Fixed quick grid across every suite; fully reproducible from the seed.
fn run_all(cli: &Cli) -> Result<bool> {
    type Job = Box<dyn Fn(u64) -> Result<Vec<CaseReport>> + Send + Sync>;
    let jobs: Vec<Job> = vec![
        Box::new(|_| {
            suites::finite_suite(&suites::FiniteArgs {
                p: 2,
                depth: 3,
                pivot: 1,
                ambient: Some(Segment::new(0, 3).unwrap()),
                exhaustive: true,
            })
        }),
        Box::new(|_| {
            suites::finite_suite(&suites::FiniteArgs {
                p: 3,
                depth: 2,
                pivot: 1,
                ambient: Some(Segment::new(0, 2).unwrap()),
                exhaustive: true,
            })
        }),
        Box::new(|seed| {
            suites::tree_suite(&suites::TreeArgs {
                q: 2,
                indices: (0, 1, 2, 3),
                trials: 100_000,
                seed,
            })
        }),
        Box::new(|seed| {
            suites::tree_suite(&suites::TreeArgs {
                q: 3,
                indices: (0, 2, 3, 5),
                trials: 100_000,
                seed: seed.wrapping_add(1),
            })
        }),
        Box::new(|_| {
            suites::kirillov_suite(&suites::KirillovArgs {
                q: 3,
                alpha: None,
                a1_exact: Some(BigRational::new(1.into(), 2.into())),
                sweep: 6,
                tol: 1e-10,
            })
        }),
        Box::new(|_| Ok(suites::dims_suite(8, 256)?.0)),
        Box::new(|_| Ok(vec![suites::trace_new_case(12, 8, 3)?.0])),
        Box::new(|_| Ok(vec![suites::petersson_new_case(14, 1, 2, 3, 1e-6)?])),
    ];
    let seed = cli.seed;
    let results: Vec<Result<Vec<CaseReport>>> =
        jobs.par_iter().map(|job| job(seed)).collect();
    let mut cases = Vec::new();
    for r in results {
        cases.extend(r?);
    }
    Ok(emit(cli, "all", cases, None))
}
