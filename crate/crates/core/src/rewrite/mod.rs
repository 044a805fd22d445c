//! Innermost, parallel-innermost and relative-innermost rewriting, and the
//! derivation-height oracles built on them.

mod empirical;
mod height;

use std::collections::{HashSet, VecDeque};
use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::term::{match_term, matches, Position, Term};
use crate::trs::{RelativeTrs, Trs};

pub use empirical::{
    empirical_complexity, empirical_complexity_with, fit_growth_degree, EmpiricalTable,
};
pub use height::{graph_height, HeightSolver, NormalForms};

/// Deep memoised searches grow the stack in chunks of this size once less
/// than `RED_ZONE` bytes remain.
pub(crate) const RED_ZONE: usize = 128 * 1024;
pub(crate) const STACK_CHUNK: usize = 8 << 20;

/// Default bound on explored states.
pub const DEFAULT_FUEL: usize = 100_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RewriteError {
    #[error("argument normalisation needs a non-overlapping system: {0}")]
    NotSupported(String),
    #[error("fuel exhausted after {0} states")]
    FuelExhausted(usize),
}

/// Length of the longest reduction, `ω` for an infinite one, or a lower
/// bound when exploration ran out of fuel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DerivationHeight {
    Finite(u64),
    Omega,
    AtLeast(u64),
}

impl DerivationHeight {
    pub fn finite(self) -> Option<u64> {
        match self {
            DerivationHeight::Finite(n) => Some(n),
            _ => None,
        }
    }

    /// Least upper bound of two heights; exhaustion is contagious.
    pub fn sup(self, other: DerivationHeight) -> DerivationHeight {
        use DerivationHeight::*;
        match (self, other) {
            (Omega, _) | (_, Omega) => Omega,
            (AtLeast(a), AtLeast(b)) | (AtLeast(a), Finite(b)) | (Finite(a), AtLeast(b)) => {
                AtLeast(a.max(b))
            }
            (Finite(a), Finite(b)) => Finite(a.max(b)),
        }
    }
}

impl fmt::Display for DerivationHeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DerivationHeight::Finite(n) => write!(f, "{n}"),
            DerivationHeight::Omega => f.write_str("omega"),
            DerivationHeight::AtLeast(n) => write!(f, ">={n}"),
        }
    }
}

impl Serialize for DerivationHeight {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            DerivationHeight::Finite(n) => s.serialize_u64(*n),
            other => s.serialize_str(&other.to_string()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Strategy {
    Innermost,
    ParallelInnermost,
    RelativeInnermost(RelativeTrs),
}

/// Results of rewriting `t` at its root with any rule, paired with the
/// index of the rule used. Duplicates are kept.
pub(crate) fn root_steps(trs: &Trs, t: &Term) -> Vec<(Term, usize)> {
    let Some(f) = t.root() else { return Vec::new() };
    trs.rules_for(f)
        .iter()
        .filter_map(|&i| {
            let rule = &trs.rules()[i];
            match_term(&rule.lhs, t).map(|sigma| (sigma.apply(&rule.rhs), i))
        })
        .collect()
}

pub(crate) fn is_redex(trs: &Trs, t: &Term) -> bool {
    t.root().is_some_and(|f| {
        trs.rules_for(f)
            .iter()
            .any(|&i| matches(&trs.rules()[i].lhs, t))
    })
}

pub fn is_normal_form(trs: &Trs, t: &Term) -> bool {
    !is_redex(trs, t) && t.args().iter().all(|a| is_normal_form(trs, a))
}

/// Collects innermost redex positions; returns whether `t` is a normal form.
fn scan_innermost(trs: &Trs, t: &Term, at: &mut Position, out: &mut Vec<Position>) -> bool {
    let mut args_normal = true;
    for (i, a) in t.args().iter().enumerate() {
        *at = at.child(i + 1);
        args_normal &= scan_innermost(trs, a, at, out);
        *at = Position::new(at.path()[..at.len() - 1].to_vec());
    }
    if args_normal && is_redex(trs, t) {
        out.push(at.clone());
        return false;
    }
    args_normal
}

/// Positions of all innermost redexes, in pre-order.
pub fn innermost_redexes(t: &Term, trs: &Trs) -> Vec<Position> {
    let mut out = Vec::new();
    scan_innermost(trs, t, &mut Position::root(), &mut out);
    out.sort();
    out
}

fn dedup(terms: Vec<Term>) -> Vec<Term> {
    let mut seen = HashSet::new();
    terms
        .into_iter()
        .filter(|t| seen.insert(t.clone()))
        .collect()
}

/// One innermost step, tagged with the rule index used.
pub(crate) fn innermost_steps(t: &Term, trs: &Trs) -> Vec<(Term, usize)> {
    let mut out = Vec::new();
    for p in innermost_redexes(t, trs) {
        let redex = t.get(&p).expect("redex position");
        for (r, i) in root_steps(trs, redex) {
            out.push((t.replace_at(&p, r).expect("valid position"), i));
        }
    }
    out
}

pub fn innermost_successors(t: &Term, trs: &Trs) -> Vec<Term> {
    dedup(
        innermost_steps(t, trs)
            .into_iter()
            .map(|(s, _)| s)
            .collect(),
    )
}

/// `None` when `t` is a normal form.
fn parallel_step(trs: &Trs, t: &Term) -> Option<Vec<Term>> {
    let Term::App(f, args) = t else { return None };
    let stepped: Vec<Option<Vec<Term>>> = args.iter().map(|a| parallel_step(trs, a)).collect();
    if stepped.iter().all(Option::is_none) {
        if is_redex(trs, t) {
            return Some(dedup(
                root_steps(trs, t).into_iter().map(|(s, _)| s).collect(),
            ));
        }
        return None;
    }
    let choices: Vec<Vec<Term>> = stepped
        .into_iter()
        .zip(args.iter())
        .map(|(s, a)| s.unwrap_or_else(|| vec![a.clone()]))
        .collect();
    let mut out: Vec<Vec<Term>> = vec![Vec::new()];
    for options in &choices {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                options.iter().map(move |o| {
                    let mut next = prefix.clone();
                    next.push(o.clone());
                    next
                })
            })
            .collect();
    }
    Some(dedup(
        out.into_iter()
            .map(|a| Term::App(f.clone(), a.into()))
            .collect(),
    ))
}

/// All results of rewriting every innermost redex at once, with an
/// independent rule choice per redex.
pub fn parallel_innermost_successors(t: &Term, trs: &Trs) -> Vec<Term> {
    parallel_step(trs, t).unwrap_or_default()
}

/// Innermost steps of `R1 ∪ R2`, tagged with whether the counted part fired.
pub(crate) fn relative_steps(t: &Term, rel: &RelativeTrs) -> Vec<(Term, bool)> {
    innermost_steps(t, rel.union())
        .into_iter()
        .map(|(s, i)| (s, rel.is_counted(i)))
        .collect()
}

/// Successors under one relative step `→*R2 · →R1 · →*R2`. Each counts one
/// step. `fuel` bounds the number of intermediate terms visited.
pub fn relative_innermost_successors(
    t: &Term,
    rel: &RelativeTrs,
    fuel: usize,
) -> Result<Vec<(Term, u64)>, RewriteError> {
    let mut visited = 0usize;
    let mut free_closure = |starts: Vec<Term>| -> Result<Vec<Term>, RewriteError> {
        let mut seen: HashSet<Term> = starts.iter().cloned().collect();
        let mut order = starts.clone();
        let mut queue: VecDeque<Term> = starts.into();
        while let Some(s) = queue.pop_front() {
            visited += 1;
            if visited > fuel {
                return Err(RewriteError::FuelExhausted(fuel));
            }
            for (next, counted) in relative_steps(&s, rel) {
                if !counted && seen.insert(next.clone()) {
                    order.push(next.clone());
                    queue.push_back(next);
                }
            }
        }
        Ok(order)
    };
    let before = free_closure(vec![t.clone()])?;
    let mut after_counted = Vec::new();
    for s in &before {
        after_counted.extend(
            relative_steps(s, rel)
                .into_iter()
                .filter(|(_, c)| *c)
                .map(|(n, _)| n),
        );
    }
    let after = free_closure(dedup(after_counted))?;
    Ok(dedup(after).into_iter().map(|s| (s, 1)).collect())
}

/// Longest derivation from `t` under `strategy`; `trs` is ignored for the
/// relative strategy, which carries its own rules.
pub fn derivation_height(
    t: &Term,
    strategy: &Strategy,
    trs: &Trs,
    fuel: usize,
) -> DerivationHeight {
    match strategy {
        Strategy::Innermost => HeightSolver::new(trs, false, fuel).height(t),
        Strategy::ParallelInnermost => HeightSolver::new(trs, true, fuel).height(t),
        Strategy::RelativeInnermost(rel) => graph_height(
            t,
            |s| {
                relative_steps(s, rel)
                    .into_iter()
                    .map(|(n, c)| (n, u64::from(c)))
                    .collect()
            },
            fuel,
        ),
    }
}

/// Rewrites every argument of `t` to its (unique) normal form.
///
/// Returns `Ok(None)` if some argument has no normal form within `fuel`.
pub fn argument_normalize(t: &Term, trs: &Trs, fuel: usize) -> Result<Option<Term>, RewriteError> {
    if let Some(w) = crate::transform::is_non_overlapping(trs) {
        return Err(RewriteError::NotSupported(w.to_string()));
    }
    let Term::App(f, args) = t else {
        return Ok(Some(t.clone()));
    };
    let mut solver = HeightSolver::new(trs, true, fuel);
    let mut out = Vec::with_capacity(args.len());
    for a in args.iter() {
        match solver.normal_forms(a) {
            Ok(NormalForms::Terminating(nfs)) => {
                let (nf, _) = nfs
                    .into_iter()
                    .next()
                    .expect("terminating terms have a normal form");
                out.push(nf);
            }
            Ok(NormalForms::Omega) | Err(_) => return Ok(None),
        }
    }
    Ok(Some(Term::App(f.clone(), out.into())))
}

/// Deterministic choice: leftmost innermost redex, first matching rule.
pub fn leftmost_innermost_step(t: &Term, trs: &Trs) -> Option<(Position, Term)> {
    let p = innermost_redexes(t, trs).into_iter().next()?;
    let redex = t.get(&p)?;
    let (r, _) = root_steps(trs, redex).into_iter().next()?;
    Some((p.clone(), t.replace_at(&p, r).ok()?))
}

/// Deterministic parallel step: every innermost redex with its first matching rule.
pub fn first_parallel_step(t: &Term, trs: &Trs) -> Option<(Vec<Position>, Term)> {
    let redexes = innermost_redexes(t, trs);
    if redexes.is_empty() {
        return None;
    }
    let mut out = t.clone();
    for p in &redexes {
        let redex = t.get(p)?;
        let (r, _) = root_steps(trs, redex).into_iter().next()?;
        out = out.replace_at(p, r).ok()?;
    }
    Some((redexes, out))
}
