//! The end-to-end analysis pipeline behind the `analyze` and `check`
//! commands.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::mpsc;
use std::time::{Duration, Instant};

use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::dt::{canonical_parallel_problem, has_no_parallelism, parallel_dts, DtProblem};
use crate::exec::Execution;
use crate::poly::{
    prove_upper_bound, reduction_pair_step, resolve_symbol, BoundConfig, BoundKind, InterpError,
    Interpretation,
};
use crate::rewrite::{
    empirical_complexity_with, fit_growth_degree, DerivationHeight, EmpiricalTable, Strategy,
    DEFAULT_FUEL,
};
use crate::transform::{confluence_parallel_innermost, ConfluenceVerdict};
use crate::trs::Trs;

/// Marks sampled values as evidence, not proof.
pub const EMPIRICAL_LABEL: &str = "empirical — not a proof";

#[derive(Debug, Clone)]
pub struct AnalysisConfig {
    pub bound: BoundConfig,
    pub empirical: bool,
    pub max_size: usize,
    pub fuel: usize,
    /// Largest number of start terms enumerated for the empirical table.
    pub cap: usize,
    /// Per-phase wall-clock limit.
    pub timeout: Option<Duration>,
    pub execution: Execution,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            bound: BoundConfig::default(),
            empirical: true,
            max_size: 8,
            fuel: DEFAULT_FUEL,
            cap: 200_000,
            timeout: None,
            execution: Execution::default(),
        }
    }
}

/// Outcome of a phase that may hit its time limit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Phase<T> {
    Done(T),
    Timeout,
}

impl<T: Serialize> Serialize for Phase<T> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Phase::Done(t) => t.serialize(s),
            Phase::Timeout => s.serialize_str("timeout"),
        }
    }
}

impl<T> Phase<T> {
    pub fn done(&self) -> Option<&T> {
        match self {
            Phase::Done(t) => Some(t),
            Phase::Timeout => None,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RulePdts {
    pub rule: String,
    pub pdts: Vec<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBound {
    /// Proven degree `k` of `O(n^k)`, absent without a proof.
    pub degree: Option<u32>,
    pub bound: String,
    pub witness: Value,
    /// Proven degree equals the fitted parallel degree and confluence holds.
    pub tight: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalRow {
    pub n: usize,
    pub irc: DerivationHeight,
    pub pirc: DerivationHeight,
}

#[derive(Debug, Clone, Serialize)]
pub struct EmpiricalSummary {
    pub label: &'static str,
    pub rows: Vec<EmpiricalRow>,
    pub fitted_irc_degree: Option<u32>,
    pub fitted_pirc_degree: Option<u32>,
    pub truncated: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Timing {
    pub phase: &'static str,
    pub millis: u128,
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalysisReport {
    pub input: String,
    pub no_parallelism: bool,
    pub confluence: ConfluenceVerdict,
    pub pdts: Vec<RulePdts>,
    pub upper_bound: Phase<UpperBound>,
    pub delta_path: Option<String>,
    pub empirical: Option<Phase<EmpiricalSummary>>,
    /// Excluded from the determinism guarantee.
    pub timings: Vec<Timing>,
}

impl AnalysisReport {
    /// JSON with the timing block removed, for reproducibility checks.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serialises");
        if let Value::Object(m) = &mut v {
            m.remove("timings");
        }
        serde_json::to_string_pretty(&v).expect("report serialises")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialises")
    }
}

/// Runs `f` on a worker thread and gives up after `limit`. The worker is
/// left to finish in the background.
fn with_timeout<T: Send + 'static>(
    limit: Option<Duration>,
    f: impl FnOnce() -> T + Send + 'static,
) -> Phase<T> {
    let Some(limit) = limit else {
        return Phase::Done(crate::exec::with_large_stack(f));
    };
    let (tx, rx) = mpsc::channel();
    std::thread::Builder::new()
        .stack_size(256 << 20)
        .spawn(move || {
            let _ = tx.send(f());
        })
        .expect("spawn analysis phase");
    match rx.recv_timeout(limit) {
        Ok(t) => Phase::Done(t),
        Err(_) => Phase::Timeout,
    }
}

pub fn pdt_listing(trs: &Trs) -> Vec<RulePdts> {
    trs.rules()
        .iter()
        .map(|r| RulePdts {
            rule: r.to_string(),
            pdts: parallel_dts(r, trs).iter().map(|d| d.to_string()).collect(),
        })
        .collect()
}

/// Sampled innermost and parallel-innermost complexity with fitted degrees.
pub fn empirical_summary(trs: &Trs, config: &AnalysisConfig) -> EmpiricalSummary {
    let table = |s: Strategy| {
        empirical_complexity_with(
            trs,
            &s,
            config.max_size,
            config.fuel,
            config.cap,
            config.execution,
        )
    };
    let irc: EmpiricalTable = table(Strategy::Innermost);
    let pirc = table(Strategy::ParallelInnermost);
    EmpiricalSummary {
        label: EMPIRICAL_LABEL,
        rows: irc
            .rows
            .iter()
            .zip(&pirc.rows)
            .map(|((n, i), (_, p))| EmpiricalRow {
                n: *n,
                irc: *i,
                pirc: *p,
            })
            .collect(),
        fitted_irc_degree: fit_growth_degree(&irc.rows),
        fitted_pirc_degree: fit_growth_degree(&pirc.rows),
        truncated: irc.truncated || pirc.truncated,
    }
}

pub fn analyze(trs: &Trs, input: &str, config: &AnalysisConfig) -> AnalysisReport {
    let mut timings = Vec::new();
    let mut timed = |phase: &'static str, start: Instant| {
        timings.push(Timing {
            phase,
            millis: start.elapsed().as_millis(),
        })
    };

    let start = Instant::now();
    let no_parallelism = has_no_parallelism(trs);
    let problem = canonical_parallel_problem(trs);
    let pdts = pdt_listing(trs);
    timed("pdts", start);

    let start = Instant::now();
    let confluence = confluence_parallel_innermost(trs);
    timed("confluence", start);

    let start = Instant::now();
    let mut bound_config = config.bound.clone();
    bound_config.deadline = config.timeout.map(|t| start + t);
    let bound_problem = problem.clone();
    let bound = with_timeout(config.timeout, move || {
        prove_upper_bound(&bound_problem, &bound_config)
    });
    let bound = match bound {
        Phase::Done(b)
            if b.kind == BoundKind::Unknown
                && config.timeout.is_some_and(|t| start.elapsed() >= t) =>
        {
            Phase::Timeout
        }
        other => other,
    };
    timed("upper_bound", start);

    let start = Instant::now();
    let empirical = config.empirical.then(|| {
        let (trs, config) = (trs.clone(), config.clone());
        with_timeout(config.timeout, move || empirical_summary(&trs, &config))
    });
    timed("empirical", start);

    let upper_bound = match bound {
        Phase::Timeout => Phase::Timeout,
        Phase::Done(b) => {
            let nonterminating = empirical
                .as_ref()
                .and_then(Phase::done)
                .is_some_and(|e| e.rows.iter().any(|r| r.pirc == DerivationHeight::Omega));
            let kind = if b.kind == BoundKind::Unknown && nonterminating {
                BoundKind::Unbounded
            } else {
                b.kind
            };
            let fitted = empirical
                .as_ref()
                .and_then(Phase::done)
                .and_then(|e| e.fitted_pirc_degree);
            let tight = b.degree().is_some()
                && b.degree() == fitted
                && confluence == ConfluenceVerdict::Confluent;
            Phase::Done(UpperBound {
                degree: b.degree(),
                bound: kind.to_string(),
                witness: b.witness_json(&problem),
                tight,
            })
        }
    };

    AnalysisReport {
        input: input.to_string(),
        no_parallelism,
        confluence,
        pdts,
        upper_bound,
        delta_path: None,
        empirical,
        timings,
    }
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "input: {}", self.input)?;
        if self.no_parallelism {
            writeln!(
                f,
                "parallelism: none (every right-hand side has one chain; pirc = irc)"
            )?;
        } else {
            writeln!(f, "parallelism: present")?;
        }
        match &self.confluence {
            ConfluenceVerdict::Confluent => writeln!(f, "confluence: confluent (non-overlapping)")?,
            ConfluenceVerdict::Unknown(w) => writeln!(f, "confluence: unknown, overlap {w}")?,
        }
        writeln!(f, "parallel dependency tuples:")?;
        for group in &self.pdts {
            writeln!(f, "  {}", group.rule)?;
            for d in &group.pdts {
                writeln!(f, "    {d}")?;
            }
        }
        match &self.upper_bound {
            Phase::Timeout => writeln!(f, "pirc upper bound: timeout")?,
            Phase::Done(b) => {
                let tight = if b.tight {
                    " (matches the empirical degree)"
                } else {
                    ""
                };
                writeln!(f, "pirc upper bound: {}{tight}", b.bound)?;
                if let Value::Array(steps) = &b.witness {
                    for (i, s) in steps.iter().enumerate() {
                        writeln!(
                            f,
                            "  step {}: degree {}, removes {}",
                            i + 1,
                            s["degree"],
                            s["removed"]
                        )?;
                    }
                }
            }
        }
        if let Some(path) = &self.delta_path {
            writeln!(f, "relative system written to {path}")?;
        }
        match &self.empirical {
            None => {}
            Some(Phase::Timeout) => writeln!(f, "empirical: timeout")?,
            Some(Phase::Done(e)) => {
                writeln!(f, "{}:", e.label)?;
                writeln!(f, "  {:>4} {:>10} {:>10}", "n", "irc", "pirc")?;
                for r in &e.rows {
                    writeln!(
                        f,
                        "  {:>4} {:>10} {:>10}",
                        r.n,
                        r.irc.to_string(),
                        r.pirc.to_string()
                    )?;
                }
                let show = |d: Option<u32>| d.map_or("none".to_string(), |d| d.to_string());
                writeln!(
                    f,
                    "  fitted degree: irc {}, pirc {}{}",
                    show(e.fitted_irc_degree),
                    show(e.fitted_pirc_degree),
                    if e.truncated {
                        " (enumeration truncated)"
                    } else {
                        ""
                    }
                )?;
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum CertificateError {
    #[error("certificate is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("certificate has no steps")]
    NoSteps,
    #[error("step {step}: {reason}")]
    Step { step: usize, reason: InterpError },
}

/// Result of replaying a certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub degree: u32,
    /// Counted tuples left after the last step; empty when accepted.
    pub remaining: BTreeSet<usize>,
}

impl CheckOutcome {
    pub fn accepted(&self) -> bool {
        self.remaining.is_empty()
    }
}

/// Reads the interpretations of a certificate: either
/// `{"steps": [{"interpretation": {...}}, ...]}` or a full analysis report.
pub fn parse_certificate(text: &str, trs: &Trs) -> Result<Vec<Interpretation>, CertificateError> {
    let v: Value = serde_json::from_str(text)?;
    let steps = v
        .get("steps")
        .or_else(|| v.get("upper_bound").and_then(|b| b.get("witness")))
        .and_then(Value::as_array)
        .ok_or(CertificateError::NoSteps)?;
    steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let interp = s.get("interpretation").unwrap_or(s);
            Interpretation::from_json(interp, |n| resolve_symbol(trs, n)).map_err(|reason| {
                CertificateError::Step {
                    step: i + 1,
                    reason,
                }
            })
        })
        .collect()
}

/// Replays reduction pair steps on `problem`.
pub fn check_certificate(
    problem: &DtProblem,
    steps: &[Interpretation],
) -> Result<CheckOutcome, CertificateError> {
    if steps.is_empty() {
        return Err(CertificateError::NoSteps);
    }
    let mut current = problem.clone();
    let mut degree = 0;
    for (i, interp) in steps.iter().enumerate() {
        let (next, d) =
            reduction_pair_step(&current, interp).map_err(|reason| CertificateError::Step {
                step: i + 1,
                reason,
            })?;
        degree = degree.max(d);
        current = next;
    }
    Ok(CheckOutcome {
        degree,
        remaining: current.counted,
    })
}
