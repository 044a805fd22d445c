use std::collections::{HashMap, HashSet, VecDeque};
use std::rc::Rc;

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{
    first_parallel_step, leftmost_innermost_step, root_steps, DerivationHeight, RewriteError,
    RED_ZONE, STACK_CHUNK,
};
use crate::term::Term;
use crate::trs::Trs;

/// Every normal form reachable from a term with the length of the longest
/// derivation reaching it, or `Omega` if some derivation is infinite.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NormalForms {
    Terminating(Vec<(Term, u64)>),
    Omega,
}

/// Memoised longest-derivation solver for innermost and parallel-innermost
/// rewriting.
///
/// Innermost rewriting never touches the root before all arguments are
/// normal, so a derivation of `f(t1..tn)` splits into independent argument
/// derivations followed by a root step. Their lengths add up sequentially
/// and combine by maximum in parallel.
pub struct HeightSolver<'a> {
    trs: &'a Trs,
    parallel: bool,
    fuel: usize,
    explored: usize,
    memo: HashMap<Term, Rc<NormalForms>>,
    active: HashSet<Term>,
}

impl<'a> HeightSolver<'a> {
    pub fn new(trs: &'a Trs, parallel: bool, fuel: usize) -> Self {
        HeightSolver {
            trs,
            parallel,
            fuel,
            explored: 0,
            memo: HashMap::new(),
            active: HashSet::new(),
        }
    }

    pub fn normal_forms(&mut self, t: &Term) -> Result<NormalForms, RewriteError> {
        self.eval(t).map(|r| (*r).clone())
    }

    pub fn height(&mut self, t: &Term) -> DerivationHeight {
        match self.eval(t) {
            Ok(r) => match &*r {
                NormalForms::Omega => DerivationHeight::Omega,
                NormalForms::Terminating(nfs) => {
                    DerivationHeight::Finite(nfs.iter().map(|(_, c)| *c).max().unwrap_or(0))
                }
            },
            Err(_) => DerivationHeight::AtLeast(self.follow_path(t)),
        }
    }

    /// Length of the deterministic derivation from `t`, cut off at the fuel.
    fn follow_path(&self, t: &Term) -> u64 {
        let mut current = t.clone();
        let mut steps = 0u64;
        while (steps as usize) < self.fuel {
            let next = if self.parallel {
                first_parallel_step(&current, self.trs).map(|(_, s)| s)
            } else {
                leftmost_innermost_step(&current, self.trs).map(|(_, s)| s)
            };
            match next {
                Some(s) => current = s,
                None => break,
            }
            steps += 1;
        }
        steps
    }

    fn eval(&mut self, t: &Term) -> Result<Rc<NormalForms>, RewriteError> {
        if let Some(r) = self.memo.get(t) {
            return Ok(r.clone());
        }
        if self.active.contains(t) {
            return Ok(Rc::new(NormalForms::Omega));
        }
        self.explored += 1;
        if self.explored > self.fuel {
            return Err(RewriteError::FuelExhausted(self.fuel));
        }
        self.active.insert(t.clone());
        let result = stacker::maybe_grow(RED_ZONE, STACK_CHUNK, || self.eval_uncached(t));
        self.active.remove(t);
        let result = Rc::new(result?);
        self.memo.insert(t.clone(), result.clone());
        Ok(result)
    }

    fn eval_uncached(&mut self, t: &Term) -> Result<NormalForms, RewriteError> {
        let Term::App(f, args) = t else {
            return Ok(NormalForms::Terminating(vec![(t.clone(), 0)]));
        };
        let mut per_arg = Vec::with_capacity(args.len());
        for a in args.iter() {
            match &*self.eval(a)? {
                NormalForms::Omega => return Ok(NormalForms::Omega),
                NormalForms::Terminating(nfs) => per_arg.push(nfs.clone()),
            }
        }
        let mut combos: Vec<(Vec<Term>, u64)> = vec![(Vec::new(), 0)];
        for nfs in &per_arg {
            let mut next = Vec::with_capacity(combos.len() * nfs.len());
            for (prefix, cost) in &combos {
                for (nf, c) in nfs {
                    let mut p = prefix.clone();
                    p.push(nf.clone());
                    let combined = if self.parallel {
                        (*cost).max(*c)
                    } else {
                        cost + c
                    };
                    next.push((p, combined));
                }
            }
            combos = next;
        }
        let mut best: HashMap<Term, u64> = HashMap::new();
        let mut order: Vec<Term> = Vec::new();
        let mut record = |nf: Term, cost: u64| match best.get_mut(&nf) {
            Some(c) => *c = (*c).max(cost),
            None => {
                order.push(nf.clone());
                best.insert(nf, cost);
            }
        };
        for (normal_args, cost) in combos {
            let u = Term::App(f.clone(), normal_args.into());
            let steps = root_steps(self.trs, &u);
            if steps.is_empty() {
                record(u, cost);
                continue;
            }
            for (v, _) in steps {
                match &*self.eval(&v)? {
                    NormalForms::Omega => return Ok(NormalForms::Omega),
                    NormalForms::Terminating(nfs) => {
                        for (nf, c) in nfs {
                            record(nf.clone(), cost + 1 + c);
                        }
                    }
                }
            }
        }
        Ok(NormalForms::Terminating(
            order
                .into_iter()
                .map(|nf| {
                    let c = best[&nf];
                    (nf, c)
                })
                .collect(),
        ))
    }
}

/// Longest weighted path from `start` in the graph spanned by `successors`.
///
/// Returns `Omega` when a cycle carries positive weight. On exhaustion the
/// weight of the deepest explored breadth-first path is a lower bound.
pub fn graph_height(
    start: &Term,
    successors: impl Fn(&Term) -> Vec<(Term, u64)>,
    fuel: usize,
) -> DerivationHeight {
    let mut graph: DiGraph<(), u64> = DiGraph::new();
    let mut index: HashMap<Term, NodeIndex> = HashMap::new();
    let mut depth: Vec<u64> = Vec::new();
    let root = graph.add_node(());
    index.insert(start.clone(), root);
    depth.push(0);
    let mut queue = VecDeque::from([(start.clone(), root)]);
    while let Some((t, node)) = queue.pop_front() {
        if graph.node_count() > fuel {
            return DerivationHeight::AtLeast(depth.iter().copied().max().unwrap_or(0));
        }
        for (next, w) in successors(&t) {
            let target = match index.get(&next) {
                Some(&n) => n,
                None => {
                    let n = graph.add_node(());
                    index.insert(next.clone(), n);
                    depth.push(depth[node.index()] + w);
                    queue.push_back((next, n));
                    n
                }
            };
            graph.add_edge(node, target, w);
        }
    }
    // Tarjan emits components in reverse topological order.
    let sccs = tarjan_scc(&graph);
    let mut component = vec![0usize; graph.node_count()];
    for (c, nodes) in sccs.iter().enumerate() {
        for n in nodes {
            component[n.index()] = c;
        }
    }
    let mut best = vec![0u64; sccs.len()];
    for (c, nodes) in sccs.iter().enumerate() {
        let mut value = 0u64;
        for &n in nodes {
            for e in graph.edges(n) {
                use petgraph::visit::EdgeRef;
                let d = component[e.target().index()];
                if d == c {
                    if *e.weight() > 0 {
                        return DerivationHeight::Omega;
                    }
                } else {
                    value = value.max(e.weight() + best[d]);
                }
            }
        }
        best[c] = value;
    }
    DerivationHeight::Finite(best[component[root.index()]])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rewrite::{innermost_successors, parallel_innermost_successors};

    fn unit(succ: Vec<Term>) -> Vec<(Term, u64)> {
        succ.into_iter().map(|t| (t, 1)).collect()
    }

    #[test]
    fn solver_agrees_with_state_graph() {
        for trs in [fixtures::size(), fixtures::doubles(), fixtures::modulo()] {
            for t in trs.enumerate_ground_basic(6, 400).terms {
                let seq = HeightSolver::new(&trs, false, 100_000).height(&t);
                let par = HeightSolver::new(&trs, true, 100_000).height(&t);
                assert_eq!(
                    seq,
                    graph_height(&t, |s| unit(innermost_successors(s, &trs)), 100_000),
                    "{t}"
                );
                assert_eq!(
                    par,
                    graph_height(
                        &t,
                        |s| unit(parallel_innermost_successors(s, &trs)),
                        100_000
                    ),
                    "{t}"
                );
            }
        }
    }

    #[test]
    fn nonconfluent_system_is_nonterminating() {
        let trs = fixtures::nonconfluent();
        let a = trs.parse_term("a").unwrap();
        assert_eq!(
            HeightSolver::new(&trs, true, 1000).height(&a),
            DerivationHeight::Omega
        );
        assert_eq!(
            graph_height(&a, |s| unit(parallel_innermost_successors(s, &trs)), 1000),
            DerivationHeight::Omega
        );
    }

    #[test]
    fn zero_weight_cycles_are_finite() {
        let trs = crate::tpdb::parse_trs("(RULES a -> b b -> a)").unwrap();
        let a = trs.parse_term("a").unwrap();
        assert_eq!(
            graph_height(
                &a,
                |s| innermost_successors(s, &trs)
                    .into_iter()
                    .map(|t| (t, 0))
                    .collect(),
                10
            ),
            DerivationHeight::Finite(0)
        );
    }

    #[test]
    fn overlapping_rules_keep_all_normal_forms() {
        let trs = crate::tpdb::parse_trs("(RULES a -> b a -> c c -> b)").unwrap();
        let a = trs.parse_term("a").unwrap();
        let NormalForms::Terminating(nfs) = HeightSolver::new(&trs, false, 100)
            .normal_forms(&a)
            .unwrap()
        else {
            panic!("terminating")
        };
        assert_eq!(nfs, vec![(trs.parse_term("b").unwrap(), 2)]);
    }
}
