//! Sharp terms, dependency tuples, structural dependency chains and DT
//! problems.

mod cplx;

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::term::{Position, Substitution, Symbol, Term};
use crate::trs::{Rule, Trs};

pub use cplx::cplx_bruteforce;

/// Marks the root of `t` if it is a defined symbol of `trs`.
pub fn sharp(t: &Term, trs: &Trs) -> Term {
    match t {
        Term::App(f, args) if trs.is_defined(f) => Term::App(f.to_sharp(), args.clone()),
        _ => t.clone(),
    }
}

/// Total order on positions used for the arguments of sequential DTs:
/// deeper positions first, then lexicographic.
pub fn position_order(a: &Position, b: &Position) -> Ordering {
    b.len().cmp(&a.len()).then_with(|| a.cmp(b))
}

/// A dependency tuple `lhs -> Com_k(rhs_parts)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DtRule {
    pub lhs: Term,
    pub rhs_parts: Vec<Term>,
}

impl DtRule {
    pub fn new(lhs: Term, rhs_parts: Vec<Term>) -> Self {
        DtRule { lhs, rhs_parts }
    }

    pub fn rhs(&self) -> Term {
        Term::app(
            Symbol::compound(self.rhs_parts.len()),
            self.rhs_parts.clone(),
        )
    }

    /// The tuple as an ordinary rule over compound symbols.
    pub fn as_rule(&self) -> Rule {
        Rule::new(self.lhs.clone(), self.rhs()).expect("dependency tuples are well-formed rules")
    }

    fn canonical_key(&self) -> (Term, Vec<Term>) {
        let mut sigma = Substitution::new();
        for (i, x) in self.lhs.variables().iter().enumerate() {
            sigma.insert(x, Term::var(&format!("_{i}")));
        }
        let mut parts: Vec<Term> = self.rhs_parts.iter().map(|p| sigma.apply(p)).collect();
        parts.sort();
        (sigma.apply(&self.lhs), parts)
    }

    /// Equality up to variable renaming and the order of `Com` arguments.
    pub fn equivalent(&self, other: &DtRule) -> bool {
        self.rhs_parts.len() == other.rhs_parts.len()
            && self.canonical_key() == other.canonical_key()
    }

    /// Sharp terms with plain arguments on both sides.
    pub fn is_well_formed(&self) -> bool {
        let plain_args = |t: &Term| {
            t.args().iter().all(|a| {
                a.symbols()
                    .iter()
                    .all(|f| !f.is_sharp() && !f.is_compound())
            })
        };
        std::iter::once(&self.lhs)
            .chain(&self.rhs_parts)
            .all(|t| t.root().is_some_and(Symbol::is_sharp) && plain_args(t))
    }
}

impl fmt::Display for DtRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> Com_{}", self.lhs, self.rhs_parts.len())?;
        if !self.rhs_parts.is_empty() {
            let parts: Vec<String> = self.rhs_parts.iter().map(Term::to_string).collect();
            write!(f, "({})", parts.join(", "))?;
        }
        Ok(())
    }
}

impl Serialize for DtRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// The sequential DT of a rule: every defined position of the right-hand
/// side, in [`position_order`].
pub fn sequential_dt(rule: &Rule, trs: &Trs) -> DtRule {
    let mut positions = trs.defined_positions(&rule.rhs);
    positions.sort_by(position_order);
    DtRule::new(
        sharp(&rule.lhs, trs),
        sharp_parts(&rule.rhs, &positions, trs),
    )
}

fn sharp_parts(rhs: &Term, positions: &[Position], trs: &Trs) -> Vec<Term> {
    positions
        .iter()
        .map(|p| sharp(rhs.get(p).expect("defined position"), trs))
        .collect()
}

/// `DT(R)`, one tuple per rule.
pub fn sequential_dts(trs: &Trs) -> Vec<DtRule> {
    trs.rules().iter().map(|r| sequential_dt(r, trs)).collect()
}

/// Maximal structural dependency chains of `t`, each listed from the
/// deepest position up to the outermost one. Chains are ordered by their
/// first position in pre-order; a term without defined positions has the
/// single empty chain.
pub fn msdc(t: &Term, trs: &Trs) -> Vec<Vec<Position>> {
    let defined = trs.defined_positions(t);
    if defined.is_empty() {
        return vec![Vec::new()];
    }
    defined
        .iter()
        .filter(|p| !defined.iter().any(|q| q.is_below(p)))
        .map(|leaf| {
            let mut chain: Vec<Position> = defined
                .iter()
                .filter(|q| q.is_above(leaf))
                .cloned()
                .collect();
            chain.push(leaf.clone());
            chain.sort_by(position_order);
            chain
        })
        .collect()
}

/// One parallel dependency tuple per maximal structural dependency chain of
/// the right-hand side.
pub fn parallel_dts(rule: &Rule, trs: &Trs) -> Vec<DtRule> {
    let lhs = sharp(&rule.lhs, trs);
    msdc(&rule.rhs, trs)
        .into_iter()
        .map(|chain| DtRule::new(lhs.clone(), sharp_parts(&rule.rhs, &chain, trs)))
        .collect()
}

/// Every rule has exactly one maximal chain, so parallel and sequential
/// rewriting coincide from basic terms.
pub fn has_no_parallelism(trs: &Trs) -> bool {
    trs.rules().iter().all(|r| msdc(&r.rhs, trs).len() == 1)
}

/// A DT problem `⟨D, S, R⟩`; `counted` indexes the tuples of `S` in `dts`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DtProblem {
    pub dts: Vec<DtRule>,
    pub counted: BTreeSet<usize>,
    pub trs: Trs,
}

impl DtProblem {
    /// `⟨D, D, R⟩`.
    pub fn new(dts: Vec<DtRule>, trs: Trs) -> Self {
        let counted = (0..dts.len()).collect();
        DtProblem { dts, counted, trs }
    }

    pub fn is_counted(&self, index: usize) -> bool {
        self.counted.contains(&index)
    }

    pub fn counted_dts(&self) -> impl Iterator<Item = &DtRule> {
        self.counted.iter().map(|&i| &self.dts[i])
    }

    pub fn free_dts(&self) -> impl Iterator<Item = &DtRule> {
        self.dts
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.is_counted(*i))
            .map(|(_, d)| d)
    }

    /// The same problem with `removed` taken out of the counted set.
    pub fn without_counted(&self, removed: &BTreeSet<usize>) -> DtProblem {
        DtProblem {
            dts: self.dts.clone(),
            counted: self.counted.difference(removed).copied().collect(),
            trs: self.trs.clone(),
        }
    }
}

impl fmt::Display for DtProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, d) in self.dts.iter().enumerate() {
            let mark = if self.is_counted(i) { "" } else { "  [free]" };
            writeln!(f, "{d}{mark}")?;
        }
        Ok(())
    }
}

/// `⟨PDT(R), PDT(R), R⟩`, grouped by rule in input order with exact
/// duplicates removed.
pub fn canonical_parallel_problem(trs: &Trs) -> DtProblem {
    let mut dts: Vec<DtRule> = Vec::new();
    for rule in trs.rules() {
        for d in parallel_dts(rule, trs) {
            if !dts.iter().any(|e| e.as_rule().alpha_eq(&d.as_rule())) {
                dts.push(d);
            }
        }
    }
    DtProblem::new(dts, trs.clone())
}
