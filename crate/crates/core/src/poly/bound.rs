use std::collections::BTreeSet;
use std::fmt;
use std::time::Instant;

use serde_json::{json, Value};

use super::interpretation::{reduction_pair_step, Interpretation};
use super::search::{search_interpretation, DEFAULT_BUDGET};
use crate::dt::DtProblem;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundConfig {
    /// Largest sharp-symbol degree tried.
    pub degree_bound: u32,
    /// Initial coefficient bound.
    pub coeff_bound: u64,
    /// Coefficient bound used when a step fails at `coeff_bound`.
    pub coeff_escalation: u64,
    /// Candidate assignments per interpretation search.
    pub budget: u64,
    pub deadline: Option<Instant>,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            degree_bound: 2,
            coeff_bound: 2,
            coeff_escalation: 3,
            budget: DEFAULT_BUDGET,
            deadline: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    PolyDegree(u32),
    Unbounded,
    Unknown,
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundKind::PolyDegree(0) => f.write_str("O(1)"),
            BoundKind::PolyDegree(1) => f.write_str("O(n)"),
            BoundKind::PolyDegree(k) => write!(f, "O(n^{k})"),
            BoundKind::Unbounded => f.write_str("unbounded"),
            BoundKind::Unknown => f.write_str("unknown"),
        }
    }
}

/// One application of the reduction pair processor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofStep {
    pub interpretation: Interpretation,
    /// Indices of the tuples removed from the counted set.
    pub removed: BTreeSet<usize>,
    pub degree: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexityBound {
    pub kind: BoundKind,
    pub witness: Vec<ProofStep>,
}

impl ComplexityBound {
    pub fn degree(&self) -> Option<u32> {
        match self.kind {
            BoundKind::PolyDegree(k) => Some(k),
            _ => None,
        }
    }

    /// Steps as `{"interpretation": ..., "removed": [...], "degree": k}`.
    pub fn witness_json(&self, problem: &DtProblem) -> Value {
        Value::Array(
            self.witness
                .iter()
                .map(|s| {
                    let removed: Vec<String> = s.removed.iter().map(|&i| problem.dts[i].to_string()).collect();
                    json!({ "interpretation": s.interpretation.to_json(), "removed": removed, "degree": s.degree })
                })
                .collect(),
        )
    }
}

fn expired(config: &BoundConfig) -> bool {
    config.deadline.is_some_and(|d| Instant::now() >= d)
}

/// Tries complete proofs whose steps all have degree at most `k`, for
/// `k = 0, 1, ..., degree_bound`; the first success gives the bound.
pub fn prove_upper_bound(problem: &DtProblem, config: &BoundConfig) -> ComplexityBound {
    if problem.counted.is_empty() {
        return ComplexityBound {
            kind: BoundKind::PolyDegree(0),
            witness: Vec::new(),
        };
    }
    for target in 0..=config.degree_bound {
        if expired(config) {
            break;
        }
        if let Some(steps) = prove_with_degree(problem, target, config) {
            let degree = steps.iter().map(|s| s.degree).max().unwrap_or(0);
            return ComplexityBound {
                kind: BoundKind::PolyDegree(degree),
                witness: steps,
            };
        }
    }
    ComplexityBound {
        kind: BoundKind::Unknown,
        witness: Vec::new(),
    }
}

fn prove_with_degree(
    problem: &DtProblem,
    degree: u32,
    config: &BoundConfig,
) -> Option<Vec<ProofStep>> {
    let mut current = problem.clone();
    let mut steps = Vec::new();
    while !current.counted.is_empty() {
        let coeffs = config.coeff_bound..=config.coeff_escalation.max(config.coeff_bound);
        let found = coeffs.into_iter().find_map(|c| {
            if expired(config) {
                return None;
            }
            search_interpretation(&current, degree, c, config.budget)
        })?;
        let (next, step_degree) = reduction_pair_step(&current, &found).ok()?;
        let removed = current.counted.difference(&next.counted).copied().collect();
        steps.push(ProofStep {
            interpretation: found,
            removed,
            degree: step_degree,
        });
        current = next;
    }
    Some(steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dt::canonical_parallel_problem;
    use crate::fixtures;
    use crate::poly::interpretation::orient;

    #[test]
    fn known_bounds() {
        let size = canonical_parallel_problem(&fixtures::size());
        assert_eq!(
            prove_upper_bound(&size, &BoundConfig::default()).kind,
            BoundKind::PolyDegree(2)
        );
        let doubles = canonical_parallel_problem(&fixtures::doubles());
        assert_eq!(
            prove_upper_bound(&doubles, &BoundConfig::default()).kind,
            BoundKind::PolyDegree(1)
        );
    }

    #[test]
    fn recursion_family_needs_escalation() {
        let p = canonical_parallel_problem(&fixtures::recursion(3));
        let b = prove_upper_bound(&p, &BoundConfig::default());
        assert_eq!(b.kind, BoundKind::PolyDegree(1));
        let strict = BoundConfig {
            coeff_escalation: 2,
            ..BoundConfig::default()
        };
        assert_ne!(
            prove_upper_bound(&p, &strict).kind,
            BoundKind::PolyDegree(1)
        );
    }

    #[test]
    fn subtraction_defeats_plain_interpretations() {
        let p = canonical_parallel_problem(&fixtures::modulo());
        assert_eq!(
            prove_upper_bound(&p, &BoundConfig::default()).kind,
            BoundKind::Unknown
        );
    }

    #[test]
    fn empty_counted_set_is_constant() {
        let p = canonical_parallel_problem(&fixtures::size());
        let none = p.without_counted(&p.counted.clone());
        assert_eq!(
            prove_upper_bound(&none, &BoundConfig::default()).kind,
            BoundKind::PolyDegree(0)
        );
    }

    #[test]
    fn witnesses_replay() {
        let mut p = canonical_parallel_problem(&fixtures::size());
        let bound = prove_upper_bound(&p, &BoundConfig::default());
        for step in &bound.witness {
            let o = orient(&p, &step.interpretation).unwrap();
            assert!(o.weak_ok);
            assert_eq!(o.strict, step.removed);
            p = p.without_counted(&step.removed);
        }
        assert!(p.counted.is_empty());
    }
}
