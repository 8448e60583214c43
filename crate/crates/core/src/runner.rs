//! Suite orchestration and RESULT-line reporting.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use thiserror::Error;

use crate::algebra::BlockAlgebra;
use crate::cone::{canonical_cone, check_cone_axioms, is_divisible, CheckMode, Scaler};
use crate::config::{Format, RunConfig, Suite};
use crate::hom::{as_presheaf, HomPresheaf};
use crate::moduli::{
    bounded_subsets, build_moduli, check_dedekind, check_join_formula, check_leq_fast,
    check_meet_fast, check_monoid, check_poset, check_wedge_vee, BuildMode, ElemId, JoinOutcome,
    ModuliMonoid, SubsetSampler,
};
use crate::report::CheckReport;
use crate::sketch::{build_truncated_sketch, check_sheaf, TruncatedSketch};

/// Bounded subsets sampled for the join-formula check.
pub const JOIN_SAMPLES: usize = 1000;
/// Grid of the cone table when the monoid turns out divisible.
pub const CONE_RESOLUTION: u32 = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RunError {
    #[error("usage: {0}")]
    Usage(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub passed: bool,
    pub elements: usize,
    pub checked: u64,
    pub counterexample: Option<String>,
    /// Extra `key=value` fields appended to the RESULT line.
    pub notes: Vec<(String, String)>,
    pub elapsed: Duration,
}

impl SuiteReport {
    fn from_check(suite: Suite, elements: usize, report: CheckReport) -> Self {
        Self {
            suite,
            passed: report.passed(),
            elements,
            checked: report.checked,
            counterexample: report.first_violation,
            notes: Vec::new(),
            elapsed: Duration::ZERO,
        }
    }

    fn fields(&self, seed: u64, with_time: bool) -> Vec<String> {
        let mut fields = vec![
            "RESULT".to_string(),
            format!("suite={}", self.suite),
            format!("status={}", if self.passed { "pass" } else { "fail" }),
            format!("elements={}", self.elements),
            format!("checked={}", self.checked),
            format!("seed={seed}"),
        ];
        if with_time {
            fields.push(format!("ms={}", self.elapsed.as_millis()));
        }
        fields.extend(self.notes.iter().map(|(k, v)| format!("{k}={v}")));
        fields
    }
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub seed: u64,
    pub reports: Vec<SuiteReport>,
}

impl RunOutput {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    /// Text prints each RESULT line with its timing, followed by the first
    /// counterexample of a failing suite; tsv prints the same fields
    /// tab-separated, without timing or prose.
    pub fn render(&self, format: Format) -> String {
        let mut out = String::new();
        for r in &self.reports {
            match format {
                Format::Text => {
                    let _ = writeln!(out, "{}", r.fields(self.seed, true).join(" "));
                    if let Some(c) = &r.counterexample {
                        let _ = writeln!(out, "  counterexample: {c}");
                    }
                }
                Format::Tsv => {
                    let mut fields = r.fields(self.seed, false);
                    if let Some(c) = &r.counterexample {
                        fields.push(format!("counterexample={}", c.replace('\t', " ")));
                    }
                    let _ = writeln!(out, "{}", fields.join("\t"));
                }
            }
        }
        out
    }
}

/// The objects every suite works on, built once per run.
pub struct Instance {
    pub sketch: TruncatedSketch,
    pub presheaf: HomPresheaf,
    pub monoid: ModuliMonoid,
}

pub fn build_instance(config: &RunConfig) -> Result<Instance, RunError> {
    let usage = |e: &dyn std::fmt::Display| RunError::Usage(e.to_string());
    let m = BlockAlgebra::new(config.m_blocks.clone()).map_err(|e| usage(&e))?;
    let n = BlockAlgebra::new(config.n_blocks.clone()).map_err(|e| usage(&e))?;
    let sketch =
        build_truncated_sketch(&m, &[m.full_projection()], config.depth).map_err(|e| usage(&e))?;
    let presheaf = as_presheaf(&n, &sketch);
    let monoid = build_moduli(&presheaf, &sketch, BuildMode::Canonical).map_err(|e| usage(&e))?;
    Ok(Instance {
        sketch,
        presheaf,
        monoid,
    })
}

fn run_suite(suite: Suite, config: &RunConfig, inst: &Instance) -> SuiteReport {
    let x = &inst.monoid;
    match suite {
        Suite::Monoid => SuiteReport::from_check(suite, x.len(), check_monoid(x)),
        Suite::Poset => {
            let mut report = check_poset(x.order());
            report.merge(check_leq_fast(x));
            SuiteReport::from_check(suite, x.len(), report)
        }
        Suite::Sheaf => {
            let sheaf = check_sheaf(inst.presheaf.table(), &inst.sketch);
            let mut out = SuiteReport {
                suite,
                passed: sheaf.passed(),
                elements: inst.presheaf.table().total_size(),
                checked: sheaf.checked() as u64,
                counterexample: sheaf.functoriality_failures.first().cloned().or_else(|| {
                    sheaf
                        .first_failure()
                        .map(|c| format!("cocone not limiting: {c}"))
                }),
                notes: vec![
                    ("objects".into(), inst.sketch.objects().len().to_string()),
                    ("dropped".into(), sheaf.dropped_arrows.to_string()),
                ],
                elapsed: Duration::ZERO,
            };
            if !sheaf.functorial() {
                out.passed = false;
            }
            out
        }
        Suite::Complete => {
            let sampler =
                SubsetSampler::new(config.subset_budget, config.sample_count, config.seed);
            let dedekind = check_dedekind(x.order(), &sampler);
            let meets = check_meet_fast(x, sampler.subsets(x.len()));
            let sets = bounded_subsets(x.order(), JOIN_SAMPLES, config.seed.wrapping_add(1));
            let joins = check_join_formula(x, &sets);
            let mode = if sampler.is_exhaustive(x.len()) {
                "exhaustive"
            } else {
                "sampled"
            };
            let notes = vec![
                ("subsets".into(), mode.to_string()),
                ("meet_fast".into(), meets.checked.to_string()),
                ("join_formula".into(), joins.checked.to_string()),
            ];
            let passed = dedekind.passed() && meets.passed() && joins.passed();
            let counterexample = dedekind
                .first_violation
                .clone()
                .or(meets.first_violation)
                .or(joins.first_violation);
            SuiteReport {
                suite,
                passed,
                elements: x.len(),
                checked: dedekind.checked,
                counterexample,
                notes,
                elapsed: Duration::ZERO,
            }
        }
        Suite::WedgeVee => SuiteReport::from_check(suite, x.len(), check_wedge_vee(x)),
        Suite::Cone => cone_suite(x),
    }
}

/// Halves are unique wherever they exist; a divisible monoid must carry a
/// cone, and a non-divisible one is reported with its witness.
fn cone_suite(x: &ModuliMonoid) -> SuiteReport {
    let mut report = CheckReport::new();
    let mut scaler = Scaler::new(x);
    for e in x.ids() {
        let unique = x.halves(e).len() <= 1;
        let consistent = match scaler.half(&e) {
            Ok(h) => x.add(h, h) == Some(e),
            Err(crate::cone::ConeError::NoHalf(_)) => x.halves(e).is_empty(),
            Err(_) => false,
        };
        report.record(unique && consistent, || {
            format!("{} has {} halves", x.name(e), x.halves(e).len())
        });
    }
    let mut notes = Vec::new();
    match is_divisible(x) {
        Ok(div) if div.divisible => {
            notes.push(("divisible".into(), "true".into()));
            match canonical_cone(x, CONE_RESOLUTION) {
                Ok(table) => report.merge(check_cone_axioms(x, &table, CheckMode::All)),
                Err(e) => report.record(false, || e.to_string()),
            }
        }
        Ok(div) => {
            notes.push(("divisible".into(), "false".into()));
            let w: ElemId = div.witness.expect("non-divisible monoids carry a witness");
            notes.push(("witness".into(), x.name(w).to_string()));
            report.record(x.halves(w).is_empty(), || {
                format!("witness {} has a half", x.name(w))
            });
        }
        Err(e) => report.record(false, || e.to_string()),
    }
    let mut out = SuiteReport::from_check(Suite::Cone, x.len(), report);
    out.notes = notes;
    out
}

/// Builds the instance and runs the configured suites in their fixed order.
pub fn run(config: &RunConfig) -> Result<RunOutput, RunError> {
    let inst = build_instance(config)?;
    let reports = config
        .suites
        .iter()
        .map(|&suite| {
            let start = Instant::now();
            let mut report = run_suite(suite, config, &inst);
            report.elapsed = start.elapsed();
            report
        })
        .collect();
    Ok(RunOutput {
        seed: config.seed,
        reports,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleOp {
    Meet,
    Join,
    Add,
}

/// Answers a meet, join or sum query on the configured monoid. Elements are
/// `;`-separated, each written like its printed form, e.g. `2,1;1,3` or
/// `1:1,0:0`.
pub fn oracle(config: &RunConfig, op: OracleOp, elems: &str) -> Result<String, RunError> {
    let inst = build_instance(config)?;
    let x = &inst.monoid;
    let set = elems
        .split(';')
        .map(|s| {
            x.lookup(s)
                .ok_or_else(|| RunError::Usage(format!("'{}' is not an element", s.trim())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let usage = |e: &dyn std::fmt::Display| RunError::Usage(e.to_string());
    Ok(match op {
        OracleOp::Meet => match x.meet(&set).map_err(|e| usage(&e))? {
            Some(m) => x.name(m).to_string(),
            None => "no greatest lower bound".into(),
        },
        OracleOp::Join => match x.join(&set).map_err(|e| usage(&e))? {
            JoinOutcome::Join(j) => x.name(j).to_string(),
            JoinOutcome::NoUpperBound => "no upper bound".into(),
        },
        OracleOp::Add => {
            let [a, b] = set[..] else {
                return Err(RunError::Usage("add takes exactly two elements".into()));
            };
            x.add(a, b)
                .map_or_else(|| "undefined".into(), |s| x.name(s).to_string())
        }
    })
}
