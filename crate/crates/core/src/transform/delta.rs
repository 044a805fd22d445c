use crate::dt::DtProblem;
use crate::trs::{RelativeTrs, Rule, TrsError};

/// `δ(⟨D, S, R⟩) = S / ((D \ S) ∪ R)`, with compound symbols as ordinary
/// constructors.
pub fn delta(problem: &DtProblem) -> Result<RelativeTrs, TrsError> {
    let counted: Vec<Rule> = problem.counted_dts().map(|d| d.as_rule()).collect();
    let free: Vec<Rule> = problem
        .free_dts()
        .map(|d| d.as_rule())
        .chain(problem.trs.rules().iter().cloned())
        .collect();
    RelativeTrs::with_signature(
        counted,
        free,
        problem.trs.signature().cloned().collect::<Vec<_>>(),
    )
}
