mod common;

use std::collections::{HashSet, VecDeque};

use common::{ground_term, trs};
use parcomp::dt::msdc;
use parcomp::rewrite::{
    argument_normalize, derivation_height, empirical_complexity, innermost_redexes,
    innermost_successors, is_normal_form, parallel_innermost_successors, HeightSolver, NormalForms,
};
use parcomp::term::match_term;
use parcomp::{fixtures, DerivationHeight, Strategy, Term, Trs};
use proptest::prelude::*;

const FUEL: usize = 20_000;
/// Random systems may grow terms without bound; keep their searches shallow.
const RANDOM_FUEL: usize = 500;

/// Terms reachable from `t` in at most `depth` innermost steps.
fn innermost_reach(t: &Term, trs: &Trs, depth: usize) -> HashSet<Term> {
    let mut seen = HashSet::from([t.clone()]);
    let mut queue = VecDeque::from([(t.clone(), 0)]);
    while let Some((s, d)) = queue.pop_front() {
        if d == depth {
            continue;
        }
        for n in innermost_successors(&s, trs) {
            if seen.insert(n.clone()) {
                queue.push_back((n, d + 1));
            }
        }
    }
    seen
}

/// Whether any rule matches anywhere in `t`, ignoring strategy.
fn has_any_redex(t: &Term, trs: &Trs) -> bool {
    t.positions().iter().any(|p| {
        let sub = t.get(p).unwrap();
        trs.rules()
            .iter()
            .any(|r| match_term(&r.lhs, sub).is_some())
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn parallel_step_is_a_sequence_of_innermost_steps(r in trs(3), t in ground_term(3)) {
        let redexes = innermost_redexes(&t, &r).len();
        let succ = parallel_innermost_successors(&t, &r);
        if !succ.is_empty() && succ.len() <= 16 {
            let reach = innermost_reach(&t, &r, redexes);
            for u in succ {
                prop_assert!(reach.contains(&u), "{} not reachable from {}", u, t);
            }
        }
    }

    #[test]
    fn normal_forms_agree_across_relations(r in trs(3), t in ground_term(3)) {
        let nf = is_normal_form(&r, &t);
        prop_assert_eq!(nf, innermost_redexes(&t, &r).is_empty());
        prop_assert_eq!(nf, parallel_innermost_successors(&t, &r).is_empty());
        prop_assert_eq!(nf, !has_any_redex(&t, &r));
    }

    #[test]
    fn parallel_is_never_slower(r in trs(3), t in ground_term(3)) {
        let seq = derivation_height(&t, &Strategy::Innermost, &r, RANDOM_FUEL);
        let par = derivation_height(&t, &Strategy::ParallelInnermost, &r, RANDOM_FUEL);
        if let (Some(s), Some(p)) = (seq.finite(), par.finite()) {
            prop_assert!(p <= s);
        }
        if seq.finite().is_some() {
            prop_assert!(par != DerivationHeight::Omega);
        }
    }

    #[test]
    fn without_parallelism_parallel_steps_are_innermost_steps(r in trs(3)) {
        prop_assume!(parcomp::dt::has_no_parallelism(&r));
        for start in r.enumerate_ground_basic(3, 40).terms {
            let mut seen = HashSet::from([start.clone()]);
            let mut queue = VecDeque::from([start]);
            while let Some(s) = queue.pop_front() {
                if seen.len() > 60 {
                    break;
                }
                let seq: HashSet<Term> = innermost_successors(&s, &r).into_iter().collect();
                for u in parallel_innermost_successors(&s, &r) {
                    prop_assert!(seq.contains(&u), "{} => {} is not an innermost step", s, u);
                    if seen.insert(u.clone()) {
                        queue.push_back(u);
                    }
                }
            }
        }
    }
}

#[test]
fn plus_tables_coincide() {
    let trs = fixtures::plus();
    let irc = empirical_complexity(&trs, &Strategy::Innermost, 8, FUEL, 100_000);
    let pirc = empirical_complexity(&trs, &Strategy::ParallelInnermost, 8, FUEL, 100_000);
    assert_eq!(irc.rows, pirc.rows);
}

/// `max over MSDC(t)` of chain sums of argument-normalised heights.
fn chain_bound(t: &Term, trs: &Trs) -> u64 {
    msdc(t, trs)
        .iter()
        .map(|chain| {
            chain
                .iter()
                .map(|p| {
                    let sub = argument_normalize(t.get(p).unwrap(), trs, FUEL)
                        .unwrap()
                        .unwrap();
                    derivation_height(&sub, &Strategy::ParallelInnermost, trs, FUEL)
                        .finite()
                        .unwrap()
                })
                .sum::<u64>()
        })
        .max()
        .unwrap_or(0)
}

#[test]
fn nested_heights_decompose_along_chains() {
    let trs = fixtures::size();
    for t in trs.enumerate_ground_terms(5, 100_000).terms {
        let dh = derivation_height(&t, &Strategy::ParallelInnermost, &trs, FUEL)
            .finite()
            .unwrap();
        assert_eq!(dh, chain_bound(&t, &trs), "{t}");
    }
}

#[test]
fn overlapping_cycle_has_two_disjoint_omega_branches() {
    let trs = fixtures::nonconfluent();
    let a = trs.parse_term("a").unwrap();
    let branches = parallel_innermost_successors(&a, &trs);
    assert_eq!(branches.len(), 2);
    let mut visited: Vec<HashSet<Term>> = Vec::new();
    for b in &branches {
        assert_eq!(
            derivation_height(b, &Strategy::ParallelInnermost, &trs, FUEL),
            DerivationHeight::Omega
        );
        let mut seen = HashSet::from([b.clone()]);
        let mut queue = VecDeque::from([b.clone()]);
        while let Some(s) = queue.pop_front() {
            for n in parallel_innermost_successors(&s, &trs) {
                if seen.insert(n.clone()) {
                    queue.push_back(n);
                }
            }
        }
        visited.push(seen);
    }
    assert!(visited[0].is_disjoint(&visited[1]));
}

#[test]
fn solver_keeps_every_normal_form_of_an_overlapping_system() {
    let trs = parcomp::tpdb::parse_trs("(RULES a -> b a -> c)").unwrap();
    let a = trs.parse_term("a").unwrap();
    let NormalForms::Terminating(nfs) =
        HeightSolver::new(&trs, true, 100).normal_forms(&a).unwrap()
    else {
        panic!("a terminates")
    };
    assert_eq!(nfs.len(), 2);
}
