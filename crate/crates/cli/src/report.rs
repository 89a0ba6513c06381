//! Case reports and the three output formats.
//!
//! JSON output is byte-stable for a fixed (suite, params, seed): cases are
//! sorted by id, maps are ordered, and volatile fields (runtimes) stay out
//! of the machine format.

use num::rational::BigRational;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Debug, Clone, Serialize)]
#[serde(untagged)]
pub enum Residual {
    Exact {
        residual_numerator: String,
        residual_denominator: String,
    },
    Float {
        value: f64,
        tail_bound: f64,
    },
    None {},
}

impl Residual {
    pub fn exact(r: &BigRational) -> Self {
        Residual::Exact {
            residual_numerator: r.numer().to_string(),
            residual_denominator: r.denom().to_string(),
        }
    }

    pub fn float(value: f64, tail_bound: f64) -> Self {
        Residual::Float { value, tail_bound }
    }

    fn magnitude(&self) -> f64 {
        match self {
            Residual::Exact {
                residual_numerator,
                residual_denominator,
            } => {
                let n: f64 = residual_numerator.parse().unwrap_or(f64::NAN);
                let d: f64 = residual_denominator.parse().unwrap_or(1.0);
                (n / d).abs()
            }
            Residual::Float { value, .. } => value.abs(),
            Residual::None {} => 0.0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseReport {
    pub case_id: String,
    #[serde(flatten)]
    pub inputs: BTreeMap<String, String>,
    pub status: Status,
    /// computed value for table-style cases (traces, dimensions)
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<String>,
    #[serde(flatten)]
    pub residual: Residual,
    /// exact distribution atoms, as choice-vector label -> "num/den"
    #[serde(skip_serializing_if = "Option::is_none")]
    pub atoms: Option<BTreeMap<String, String>>,
    /// wall time; human output only, excluded from the reproducible JSON
    #[serde(skip)]
    pub runtime_ms: u128,
}

impl CaseReport {
    pub fn new(case_id: impl Into<String>) -> Self {
        CaseReport {
            case_id: case_id.into(),
            inputs: BTreeMap::new(),
            status: Status::Skip,
            value: None,
            residual: Residual::None {},
            atoms: None,
            runtime_ms: 0,
        }
    }

    pub fn input(mut self, key: &str, value: impl ToString) -> Self {
        self.inputs.insert(key.to_owned(), value.to_string());
        self
    }

    pub fn pass_if(mut self, ok: bool) -> Self {
        self.status = if ok { Status::Pass } else { Status::Fail };
        self
    }

    pub fn skip(mut self) -> Self {
        self.status = Status::Skip;
        self
    }

    pub fn with_residual(mut self, r: Residual) -> Self {
        self.residual = r;
        self
    }

    pub fn with_value(mut self, v: impl ToString) -> Self {
        self.value = Some(v.to_string());
        self
    }

    pub fn with_atoms(mut self, atoms: BTreeMap<String, String>) -> Self {
        self.atoms = Some(atoms);
        self
    }
}

#[derive(Debug, Serialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub skip: usize,
    pub max_residual: f64,
}

#[derive(Debug, Serialize)]
pub struct SuiteReport {
    pub schema: &'static str,
    pub suite: String,
    pub seed: u64,
    pub cases: Vec<CaseReport>,
    pub summary: Summary,
}

impl SuiteReport {
    pub fn assemble(suite: &str, seed: u64, mut cases: Vec<CaseReport>) -> Self {
        cases.sort_by(|a, b| a.case_id.cmp(&b.case_id));
        let summary = Summary {
            pass: cases.iter().filter(|c| c.status == Status::Pass).count(),
            fail: cases.iter().filter(|c| c.status == Status::Fail).count(),
            skip: cases.iter().filter(|c| c.status == Status::Skip).count(),
            max_residual: cases
                .iter()
                .map(|c| c.residual.magnitude())
                .fold(0.0, f64::max),
        };
        SuiteReport {
            schema: "1",
            suite: suite.to_owned(),
            seed,
            cases,
            summary,
        }
    }

    pub fn any_fail(&self) -> bool {
        self.summary.fail > 0
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn render_human(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("suite: {} (seed {})\n", self.suite, self.seed));
        for c in &self.cases {
            let status = match c.status {
                Status::Pass => "pass",
                Status::Fail => "FAIL",
                Status::Skip => "skip",
            };
            let res = match (&c.value, &c.residual) {
                (Some(v), _) => format!("value {v}"),
                (
                    None,
                    Residual::Exact {
                        residual_numerator: num,
                        residual_denominator: den,
                    },
                ) => format!("residual {num}/{den}"),
                (None, Residual::Float { value, tail_bound }) => {
                    format!("value {value:.6e} (tail {tail_bound:.1e})")
                }
                (None, Residual::None {}) => String::new(),
            };
            out.push_str(&format!(
                "  [{status}] {:<44} {res} ({} ms)\n",
                c.case_id, c.runtime_ms
            ));
        }
        out.push_str(&format!(
            "summary: {} pass, {} fail, {} skip, max residual {:.3e}\n",
            self.summary.pass, self.summary.fail, self.summary.skip, self.summary.max_residual
        ));
        out
    }
}

/// CSV rows with the `k,q,n,value` header used by the trace tables.
pub fn render_trace_csv(rows: &[(u32, u64, u64, String)]) -> String {
    let mut out = String::from("k,q,n,value\n");
    for (k, q, n, v) in rows {
        out.push_str(&format!("{k},{q},{n},{v}\n"));
    }
    out
}
