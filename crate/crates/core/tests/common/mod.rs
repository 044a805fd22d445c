//! Random terms and rewrite systems over a small fixed signature.
#![allow(dead_code)]

use parcomp::term::Position;
use parcomp::{Rule, Symbol, Term, Trs};
use proptest::prelude::*;

pub const DEFINED: &[(&str, usize)] = &[("f", 1), ("g", 2), ("h", 0)];
pub const CONSTRUCTORS: &[(&str, usize)] = &[("Z", 0), ("S", 1), ("P", 2)];
pub const VARS: &[&str] = &["x", "y"];

pub fn sym(name: &str, arity: usize) -> Symbol {
    Symbol::new(name, arity)
}

/// Terms over `symbols` and `vars`, nested at most `depth` deep.
pub fn term_over(
    symbols: &'static [(&'static str, usize)],
    vars: &'static [&'static str],
    depth: u32,
) -> BoxedStrategy<Term> {
    let constants: Vec<Term> = symbols
        .iter()
        .filter(|(_, a)| *a == 0)
        .map(|(n, _)| Term::constant(sym(n, 0)))
        .collect();
    let mut leaves: Vec<BoxedStrategy<Term>> = Vec::new();
    if !constants.is_empty() {
        leaves.push(proptest::sample::select(constants).boxed());
    }
    if !vars.is_empty() {
        leaves.push(
            proptest::sample::select(vars.to_vec())
                .prop_map(Term::var)
                .boxed(),
        );
    }
    let leaf = proptest::strategy::Union::new(leaves).boxed();
    let compound: Vec<(&'static str, usize)> =
        symbols.iter().copied().filter(|(_, a)| *a > 0).collect();
    leaf.prop_recursive(depth, 24, 2, move |inner| {
        proptest::sample::select(compound.clone())
            .prop_flat_map(move |(name, arity)| {
                proptest::collection::vec(inner.clone(), arity)
                    .prop_map(move |args| Term::app(sym(name, arity), args))
            })
            .boxed()
    })
    .boxed()
}

const ALL: &[(&str, usize)] = &[("f", 1), ("g", 2), ("h", 0), ("Z", 0), ("S", 1), ("P", 2)];

pub fn any_term(depth: u32) -> BoxedStrategy<Term> {
    term_over(ALL, VARS, depth)
}

pub fn ground_term(depth: u32) -> BoxedStrategy<Term> {
    term_over(ALL, &[], depth)
}

pub fn constructor_term(depth: u32) -> BoxedStrategy<Term> {
    term_over(CONSTRUCTORS, VARS, depth)
}

pub fn ground_constructor_term(depth: u32) -> BoxedStrategy<Term> {
    term_over(CONSTRUCTORS, &[], depth)
}

/// A constructor-based rule whose right-hand side only uses left-hand side variables.
pub fn rule() -> impl Strategy<Value = Option<Rule>> {
    let lhs = proptest::sample::select(DEFINED.to_vec()).prop_flat_map(|(name, arity)| {
        proptest::collection::vec(constructor_term(2), arity)
            .prop_map(move |args| Term::app(sym(name, arity), args))
    });
    (lhs, any_term(3)).prop_map(|(l, r)| Rule::new(l, r).ok())
}

/// A TRS of up to `max_rules` rules, every one of which has a defined root.
pub fn trs(max_rules: usize) -> impl Strategy<Value = Trs> {
    proptest::collection::vec(rule(), 1..=max_rules).prop_filter_map("no valid rule", |rules| {
        let rules: Vec<Rule> = rules.into_iter().flatten().collect();
        if rules.is_empty() {
            return None;
        }
        let extra = ALL.iter().map(|(n, a)| sym(n, *a));
        Trs::with_signature(rules, extra).ok()
    })
}

pub fn position(max_len: usize) -> impl Strategy<Value = Position> {
    proptest::collection::vec(1usize..=3, 0..=max_len).prop_map(Position::new)
}
