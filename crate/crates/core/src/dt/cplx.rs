use std::collections::{HashMap, HashSet};

use super::DtProblem;
use crate::rewrite::{DerivationHeight, HeightSolver, NormalForms, RewriteError};
use crate::term::{match_term, Term};

/// Supremum of counted nodes over all chain trees for `t_sharp`, whose
/// arguments must be normal forms.
///
/// A node for `u` picks any matching tuple; each of its parts may get one
/// child, rooted at the part with its arguments rewritten to some innermost
/// normal form. Subtrees of different parts are independent, so their
/// values add up. A state reached again below itself yields `Omega`.
pub fn cplx_bruteforce(t_sharp: &Term, problem: &DtProblem, fuel: usize) -> DerivationHeight {
    let mut search = Search {
        problem,
        fuel,
        explored: 0,
        memo: HashMap::new(),
        active: HashSet::new(),
        normaliser: HeightSolver::new(&problem.trs, false, fuel),
    };
    match search.cplx(t_sharp) {
        Ok(h) => h,
        Err(_) => DerivationHeight::AtLeast(
            search
                .memo
                .values()
                .filter_map(|h| h.finite())
                .max()
                .unwrap_or(0),
        ),
    }
}

struct Search<'a> {
    problem: &'a DtProblem,
    fuel: usize,
    explored: usize,
    memo: HashMap<Term, DerivationHeight>,
    active: HashSet<Term>,
    normaliser: HeightSolver<'a>,
}

fn add(a: DerivationHeight, b: DerivationHeight) -> DerivationHeight {
    use DerivationHeight::*;
    match (a, b) {
        (Omega, _) | (_, Omega) => Omega,
        (AtLeast(x), y) | (y, AtLeast(x)) => AtLeast(x + y.finite().unwrap_or(0)),
        (Finite(x), Finite(y)) => Finite(x + y),
    }
}

use crate::rewrite::{RED_ZONE, STACK_CHUNK};

impl Search<'_> {
    fn cplx(&mut self, u: &Term) -> Result<DerivationHeight, RewriteError> {
        if let Some(h) = self.memo.get(u) {
            return Ok(*h);
        }
        if self.active.contains(u) {
            return Ok(DerivationHeight::Omega);
        }
        self.explored += 1;
        if self.explored > self.fuel {
            return Err(RewriteError::FuelExhausted(self.fuel));
        }
        self.active.insert(u.clone());
        let result = stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.node_value(u));
        self.active.remove(u);
        let h = result?;
        self.memo.insert(u.clone(), h);
        Ok(h)
    }

    fn node_value(&mut self, u: &Term) -> Result<DerivationHeight, RewriteError> {
        let mut best = DerivationHeight::Finite(0);
        for (index, dt) in self.problem.dts.iter().enumerate() {
            let Some(mu) = match_term(&dt.lhs, u) else {
                continue;
            };
            let mut value = DerivationHeight::Finite(u64::from(self.problem.is_counted(index)));
            for part in &dt.rhs_parts {
                let mut child = DerivationHeight::Finite(0);
                for w in self.reachable_instances(&mu.apply(part))? {
                    child = child.sup(self.cplx(&w)?);
                    if child == DerivationHeight::Omega {
                        return Ok(child);
                    }
                }
                value = add(value, child);
            }
            best = best.sup(value);
            if best == DerivationHeight::Omega {
                break;
            }
        }
        Ok(best)
    }

    /// `f#(s1..sn)` with every `si` replaced by each of its innermost normal
    /// forms; `Omega` from a non-terminating argument is reported as such.
    fn reachable_instances(&mut self, part: &Term) -> Result<Vec<Term>, RewriteError> {
        let Term::App(f, args) = part else {
            return Ok(vec![part.clone()]);
        };
        let mut combos: Vec<Vec<Term>> = vec![Vec::new()];
        for a in args.iter() {
            let nfs = match self.normaliser.normal_forms(a)? {
                NormalForms::Terminating(nfs) => nfs,
                NormalForms::Omega => return Err(RewriteError::FuelExhausted(self.fuel)),
            };
            combos = combos
                .into_iter()
                .flat_map(|prefix| {
                    nfs.iter().map(move |(nf, _)| {
                        let mut next = prefix.clone();
                        next.push(nf.clone());
                        next
                    })
                })
                .collect();
        }
        Ok(combos
            .into_iter()
            .map(|a| Term::App(f.clone(), a.into()))
            .collect())
    }
}
