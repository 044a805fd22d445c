mod common;

use std::collections::BTreeSet;

use common::{any_term, trs};
use parcomp::dt::{
    canonical_parallel_problem, cplx_bruteforce, has_no_parallelism, msdc, parallel_dts,
    sequential_dt, sharp,
};
use parcomp::rewrite::derivation_height;
use parcomp::term::{strictly_above, Position};
use parcomp::transform::is_non_overlapping;
use parcomp::{fixtures, DerivationHeight, Strategy, Term, Trs};
use proptest::prelude::*;

const FUEL: usize = 20_000;
/// Random systems may grow terms without bound; keep their searches shallow.
const RANDOM_FUEL: usize = 500;

/// Every maximal structural dependency chain of `t`, found by testing the
/// maximality condition on each subset of defined positions.
fn brute_force_msdc(t: &Term, trs: &Trs) -> BTreeSet<Vec<Position>> {
    let defined = trs.defined_positions(t);
    if defined.is_empty() {
        return BTreeSet::from([Vec::new()]);
    }
    assert!(
        defined.len() <= 14,
        "too many defined positions for subset enumeration"
    );
    let mut out = BTreeSet::new();
    for mask in 1u32..(1 << defined.len()) {
        let mut chain: Vec<Position> = defined
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, p)| p.clone())
            .collect();
        chain.sort_by_key(|p| std::cmp::Reverse(p.len()));
        // pi_1 > pi_2 > ... where `a > b` holds when b is a proper prefix of a.
        let is_chain = chain
            .iter()
            .enumerate()
            .all(|(i, p)| chain[i + 1..].iter().all(|q| strictly_above(p, q)));
        if !is_chain {
            continue;
        }
        let first = &chain[0];
        let maximal = defined.iter().all(|p| {
            let deeper = strictly_above(p, first);
            let shallower = strictly_above(first, p);
            !deeper && (!shallower || chain[1..].contains(p))
        });
        if maximal {
            out.insert(chain);
        }
    }
    out
}

fn sup_le(a: DerivationHeight, b: DerivationHeight) -> Option<bool> {
    match (a, b) {
        (DerivationHeight::AtLeast(_), _) | (_, DerivationHeight::AtLeast(_)) => None,
        (_, DerivationHeight::Omega) => Some(true),
        (DerivationHeight::Omega, _) => Some(false),
        (DerivationHeight::Finite(x), DerivationHeight::Finite(y)) => Some(x <= y),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(192))]

    #[test]
    fn msdc_matches_the_maximality_condition(r in trs(3), t in any_term(4)) {
        let ours: BTreeSet<Vec<Position>> = msdc(&t, &r).into_iter().collect();
        prop_assert_eq!(ours, brute_force_msdc(&t, &r));
    }

    #[test]
    fn one_tuple_per_chain(r in trs(4)) {
        for rule in r.rules() {
            let dts = parallel_dts(rule, &r);
            prop_assert_eq!(dts.len(), msdc(&rule.rhs, &r).len());
            for d in &dts {
                prop_assert!(d.is_well_formed(), "{}", d);
            }
        }
    }

    #[test]
    fn single_chains_give_sequential_tuples(r in trs(4)) {
        prop_assume!(has_no_parallelism(&r));
        for rule in r.rules() {
            let dts = parallel_dts(rule, &r);
            prop_assert_eq!(dts.len(), 1);
            prop_assert!(dts[0].equivalent(&sequential_dt(rule, &r)));
        }
    }

    #[test]
    fn tuple_complexity_bounds_parallel_height(r in trs(3)) {
        let problem = canonical_parallel_problem(&r);
        let confluent = is_non_overlapping(&r).is_none();
        for t in r.enumerate_ground_basic(4, 60).terms {
            let dh = derivation_height(&t, &Strategy::ParallelInnermost, &r, RANDOM_FUEL);
            let cplx = cplx_bruteforce(&sharp(&t, &r), &problem, RANDOM_FUEL);
            if let Some(le) = sup_le(dh, cplx) {
                prop_assert!(le, "{}: dh {} > cplx {}", t, dh, cplx);
                if confluent {
                    prop_assert_eq!(dh, cplx, "{}", t);
                }
            }
        }
    }
}

#[test]
fn checker_agrees_on_fixture_right_hand_sides() {
    for trs in [
        fixtures::size(),
        fixtures::doubles(),
        fixtures::modulo(),
        fixtures::recursion(3),
    ] {
        for rule in trs.rules() {
            let ours: BTreeSet<Vec<Position>> = msdc(&rule.rhs, &trs).into_iter().collect();
            assert_eq!(ours, brute_force_msdc(&rule.rhs, &trs), "{rule}");
        }
    }
}

#[test]
fn fixture_tuple_complexity_equals_parallel_height() {
    for trs in [fixtures::size(), fixtures::modulo(), fixtures::doubles()] {
        let problem = canonical_parallel_problem(&trs);
        for t in trs.enumerate_ground_basic(5, 10_000).terms {
            let dh = derivation_height(&t, &Strategy::ParallelInnermost, &trs, FUEL);
            assert_eq!(dh, cplx_bruteforce(&sharp(&t, &trs), &problem, FUEL), "{t}");
        }
    }
}
