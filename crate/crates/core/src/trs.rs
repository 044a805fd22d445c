//! Rewrite rules, term rewrite systems and relative systems.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use indexmap::IndexSet;
use thiserror::Error;

use crate::term::{Position, Symbol, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TrsError {
    #[error("left-hand side of rule {0} is a variable")]
    VariableLhs(String),
    #[error("variable {var} of the right-hand side of rule {rule} does not occur on the left")]
    UnboundVariable { rule: String, var: String },
    #[error("symbol {name} used with arities {first} and {second}")]
    ArityClash {
        name: String,
        first: usize,
        second: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Rule {
    pub lhs: Term,
    pub rhs: Term,
}

impl Rule {
    pub fn new(lhs: Term, rhs: Term) -> Result<Self, TrsError> {
        let rule = Rule { lhs, rhs };
        rule.validate()?;
        Ok(rule)
    }

    fn validate(&self) -> Result<(), TrsError> {
        if self.lhs.is_var() {
            return Err(TrsError::VariableLhs(self.to_string()));
        }
        let lhs_vars = self.lhs.variables();
        if let Some(x) = self
            .rhs
            .variables()
            .into_iter()
            .find(|x| !lhs_vars.contains(x))
        {
            return Err(TrsError::UnboundVariable {
                rule: self.to_string(),
                var: x.to_string(),
            });
        }
        Ok(())
    }

    pub fn variables(&self) -> Vec<Arc<str>> {
        self.lhs.variables()
    }

    /// Renames every variable to a fresh name outside `avoid`.
    pub fn rename_apart(&self, avoid: &BTreeSet<String>) -> Rule {
        let own: BTreeSet<String> = self.variables().iter().map(|x| x.to_string()).collect();
        let mut taken: BTreeSet<String> = avoid.union(&own).cloned().collect();
        let mut sigma = crate::term::Substitution::new();
        for x in self.variables() {
            let fresh = (0..)
                .map(|k| format!("{x}{k}"))
                .find(|name| !taken.contains(name))
                .expect("unbounded supply of names");
            taken.insert(fresh.clone());
            sigma.insert(&x, Term::var(&fresh));
        }
        Rule {
            lhs: sigma.apply(&self.lhs),
            rhs: sigma.apply(&self.rhs),
        }
    }

    /// Variables renamed to `_0, _1, ...` in order of first occurrence.
    pub fn canonical(&self) -> Rule {
        let mut sigma = crate::term::Substitution::new();
        for (i, x) in self.variables().iter().enumerate() {
            sigma.insert(x, Term::var(&format!("_{i}")));
        }
        Rule {
            lhs: sigma.apply(&self.lhs),
            rhs: sigma.apply(&self.rhs),
        }
    }

    pub fn alpha_eq(&self, other: &Rule) -> bool {
        self.canonical() == other.canonical()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {}", self.lhs, self.rhs)
    }
}

/// A term rewrite system. Rule order is the input order; the signature
/// lists symbols in order of first appearance.
#[derive(Debug, Clone)]
pub struct Trs {
    rules: Vec<Rule>,
    signature: IndexSet<Symbol>,
    defined: IndexSet<Symbol>,
    by_root: HashMap<Symbol, Vec<usize>>,
}

impl PartialEq for Trs {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules && self.signature == other.signature
    }
}

impl Eq for Trs {}

impl Trs {
    pub fn new(rules: Vec<Rule>) -> Result<Self, TrsError> {
        Self::with_signature(rules, std::iter::empty())
    }

    /// Builds a system whose signature also contains `extra` symbols, e.g.
    /// constructors that only occur in start terms.
    pub fn with_signature(
        rules: Vec<Rule>,
        extra: impl IntoIterator<Item = Symbol>,
    ) -> Result<Self, TrsError> {
        let mut signature = IndexSet::new();
        let mut defined = IndexSet::new();
        let mut by_root: HashMap<Symbol, Vec<usize>> = HashMap::new();
        for (i, rule) in rules.iter().enumerate() {
            rule.validate()?;
            let root = rule.lhs.root().expect("validated").clone();
            defined.insert(root.clone());
            by_root.entry(root).or_default().push(i);
            for side in [&rule.lhs, &rule.rhs] {
                side.visit(&mut Position::root(), &mut |_, t| {
                    if let Some(f) = t.root() {
                        signature.insert(f.clone());
                    }
                });
            }
        }
        signature.extend(extra);
        let mut arities: HashMap<(String, crate::term::SymbolKind), usize> = HashMap::new();
        for f in &signature {
            let key = (f.name().to_string(), f.kind());
            if let Some(&first) = arities.get(&key) {
                if first != f.arity() {
                    return Err(TrsError::ArityClash {
                        name: f.to_string(),
                        first,
                        second: f.arity(),
                    });
                }
            }
            arities.insert(key, f.arity());
        }
        Ok(Trs {
            rules,
            signature,
            defined,
            by_root,
        })
    }

    pub fn empty() -> Self {
        Trs::new(Vec::new()).expect("empty system is valid")
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn signature(&self) -> impl Iterator<Item = &Symbol> {
        self.signature.iter()
    }

    pub fn defined_symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.defined.iter()
    }

    pub fn constructor_symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.signature.iter().filter(|f| !self.defined.contains(*f))
    }

    pub fn is_defined(&self, f: &Symbol) -> bool {
        self.defined.contains(f)
    }

    pub fn symbol_index(&self, f: &Symbol) -> Option<usize> {
        self.signature.get_index_of(f)
    }

    pub fn lookup(&self, name: &str) -> Option<&Symbol> {
        self.signature.iter().find(|f| f.to_string() == name)
    }

    /// Indices of the rules whose left-hand side has root `f`.
    pub fn rules_for(&self, f: &Symbol) -> &[usize] {
        self.by_root.get(f).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Positions whose subterm has a defined root symbol, in pre-order.
    pub fn defined_positions(&self, t: &Term) -> Vec<Position> {
        let mut out = Vec::new();
        t.visit(&mut Position::root(), &mut |p, s| {
            if s.root().is_some_and(|f| self.is_defined(f)) {
                out.push(p.clone());
            }
        });
        out
    }

    /// Whether `t` contains no defined symbol (variables allowed).
    pub fn is_constructor_term(&self, t: &Term) -> bool {
        match t {
            Term::Var(_) => true,
            Term::App(f, args) => {
                !self.is_defined(f) && args.iter().all(|a| self.is_constructor_term(a))
            }
        }
    }

    pub fn is_basic(&self, t: &Term) -> bool {
        match t {
            Term::App(f, args) => {
                self.is_defined(f) && args.iter().all(|a| self.is_constructor_term(a))
            }
            Term::Var(_) => false,
        }
    }

    /// All ground basic terms of size at most `max_size`, ordered by size and
    /// then lexicographically (symbols compared by signature order).
    pub fn enumerate_ground_basic(&self, max_size: usize, cap: usize) -> Enumeration {
        let constructors: Vec<Symbol> = self.constructor_symbols().cloned().collect();
        let roots: Vec<Symbol> = self
            .signature
            .iter()
            .filter(|f| self.is_defined(f))
            .cloned()
            .collect();
        enumerate(&roots, &constructors, max_size, cap)
    }

    /// All ground terms over the whole signature of size at most `max_size`.
    pub fn enumerate_ground_terms(&self, max_size: usize, cap: usize) -> Enumeration {
        let all: Vec<Symbol> = self.signature.iter().cloned().collect();
        enumerate(&all, &all, max_size, cap)
    }
}

impl fmt::Display for Trs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for rule in &self.rules {
            writeln!(f, "{rule}")?;
        }
        Ok(())
    }
}

pub fn defined_symbols(trs: &Trs) -> BTreeSet<Symbol> {
    trs.defined_symbols().cloned().collect()
}

pub fn constructor_symbols(trs: &Trs) -> BTreeSet<Symbol> {
    trs.constructor_symbols().cloned().collect()
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Enumeration {
    pub terms: Vec<Term>,
    /// Set when `cap` cut the enumeration short.
    pub truncated: bool,
}

/// Terms rooted in `roots` whose arguments are built from `inner` symbols.
fn enumerate(roots: &[Symbol], inner: &[Symbol], max_size: usize, cap: usize) -> Enumeration {
    assert!(cap > 0, "enumeration cap must be positive");
    let mut out = Enumeration::default();
    if roots.is_empty() || max_size == 0 {
        return out;
    }
    // by_size[s] holds every ground term over `inner` of size s, in order.
    let mut by_size: Vec<Vec<Term>> = vec![Vec::new(); max_size];
    let mut truncated_inner = false;
    for size in 1..max_size {
        let mut level = Vec::new();
        for f in inner {
            for args in arg_tuples(&by_size, size - 1, f.arity()) {
                if level.len() >= cap {
                    truncated_inner = true;
                    break;
                }
                level.push(Term::App(f.clone(), args.into()));
            }
        }
        by_size[size] = level;
    }
    'outer: for size in 1..=max_size {
        for f in roots {
            for args in arg_tuples(&by_size, size - 1, f.arity()) {
                if out.terms.len() >= cap {
                    out.truncated = true;
                    break 'outer;
                }
                out.terms.push(Term::App(f.clone(), args.into()));
            }
        }
    }
    out.truncated |= truncated_inner;
    out
}

/// Argument tuples of total size `budget` with `arity` entries, first
/// argument most significant.
fn arg_tuples(by_size: &[Vec<Term>], budget: usize, arity: usize) -> Vec<Vec<Term>> {
    if arity == 0 {
        return if budget == 0 {
            vec![Vec::new()]
        } else {
            Vec::new()
        };
    }
    let mut out = Vec::new();
    for first_size in 1..=budget.saturating_sub(arity - 1) {
        if first_size >= by_size.len() {
            break;
        }
        let rests = arg_tuples(by_size, budget - first_size, arity - 1);
        if rests.is_empty() {
            continue;
        }
        for first in &by_size[first_size] {
            for rest in &rests {
                let mut tuple = Vec::with_capacity(arity);
                tuple.push(first.clone());
                tuple.extend(rest.iter().cloned());
                out.push(tuple);
            }
        }
    }
    out
}

/// `R1/R2`: only steps with the counted rules contribute to derivation height.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelativeTrs {
    counted: Trs,
    free: Trs,
    union: Trs,
}

impl RelativeTrs {
    pub fn new(counted: Vec<Rule>, free: Vec<Rule>) -> Result<Self, TrsError> {
        Self::with_signature(counted, free, std::iter::empty())
    }

    pub fn with_signature(
        counted: Vec<Rule>,
        free: Vec<Rule>,
        extra: impl IntoIterator<Item = Symbol> + Clone,
    ) -> Result<Self, TrsError> {
        let union_rules: Vec<Rule> = counted.iter().chain(free.iter()).cloned().collect();
        let union = Trs::with_signature(union_rules, extra.clone())?;
        let shared: Vec<Symbol> = union.signature().cloned().collect();
        Ok(RelativeTrs {
            counted: Trs::with_signature(counted, shared.iter().cloned())?,
            free: Trs::with_signature(free, shared)?,
            union,
        })
    }

    pub fn counted(&self) -> &Trs {
        &self.counted
    }

    pub fn free(&self) -> &Trs {
        &self.free
    }

    /// `R1 ∪ R2`; the first `counted().len()` rules are the counted ones.
    pub fn union(&self) -> &Trs {
        &self.union
    }

    pub fn is_counted(&self, rule_index: usize) -> bool {
        rule_index < self.counted.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn size_signature_split() {
        let trs = fixtures::size();
        let defined: Vec<String> = trs.defined_symbols().map(|f| f.to_string()).collect();
        assert_eq!(defined, ["plus", "size"]);
        let cons: BTreeSet<String> = trs.constructor_symbols().map(|f| f.to_string()).collect();
        assert_eq!(
            cons,
            ["Zero", "S", "Nil", "Tree"]
                .iter()
                .map(|s| s.to_string())
                .collect()
        );
        assert_eq!(Trs::empty().defined_symbols().count(), 0);
    }

    #[test]
    fn defined_positions_of_recursive_rhs() {
        let trs = fixtures::size();
        let rhs = &trs.rules()[3].rhs;
        let got: Vec<String> = trs
            .defined_positions(rhs)
            .iter()
            .map(|p| p.to_string())
            .collect();
        assert_eq!(got, ["1", "11", "12"]);
        let zero = trs.parse_term("Zero").unwrap();
        assert!(trs.defined_positions(&zero).is_empty());
        let plus = trs.parse_term("plus(x, y)").unwrap();
        assert_eq!(trs.defined_positions(&plus), vec![Position::root()]);
    }

    #[test]
    fn basic_terms() {
        let trs = fixtures::size();
        assert!(trs.is_basic(&trs.parse_term("size(Tree(Zero, Nil, Nil))").unwrap()));
        assert!(!trs.is_basic(&trs.parse_term("size(size(Nil))").unwrap()));
        assert!(!trs.is_basic(&trs.parse_term("Tree(Zero, Nil, Nil)").unwrap()));
        assert!(trs.is_basic(&trs.parse_term("plus(x, S(y))").unwrap()));
    }

    #[test]
    fn enumeration_of_small_basic_terms() {
        let trs = fixtures::size();
        let e = trs.enumerate_ground_basic(2, 100);
        let got: Vec<String> = e.terms.iter().map(|t| t.to_string()).collect();
        assert_eq!(got, ["size(Zero)", "size(Nil)"]);
        assert!(!e.truncated);
        assert!(trs.enumerate_ground_basic(1, 100).terms.is_empty());
        assert!(Trs::empty().enumerate_ground_basic(5, 100).terms.is_empty());
        let capped = trs.enumerate_ground_basic(6, 3);
        assert_eq!(capped.terms.len(), 3);
        assert!(capped.truncated);
    }

    #[test]
    fn enumeration_brute_force_count() {
        // Independent count: every ground basic term of size <= 5 over the
        // size signature, filtered from all ground terms.
        let trs = fixtures::size();
        let all = trs.enumerate_ground_terms(5, 1_000_000);
        let basic: Vec<&Term> = all.terms.iter().filter(|t| trs.is_basic(t)).collect();
        let e = trs.enumerate_ground_basic(5, 1_000_000);
        assert_eq!(e.terms.len(), basic.len());
        assert!(e.terms.windows(2).all(|w| w[0].size() <= w[1].size()));
        assert!(e.terms.iter().all(|t| trs.is_basic(t) && t.size() <= 5));
    }

    #[test]
    fn rule_validation() {
        let x = Term::var("x");
        let y = Term::var("y");
        let f = Symbol::new("f", 1);
        assert!(matches!(
            Rule::new(x.clone(), x.clone()),
            Err(TrsError::VariableLhs(_))
        ));
        assert!(matches!(
            Rule::new(Term::app(f.clone(), vec![x.clone()]), y),
            Err(TrsError::UnboundVariable { .. })
        ));
        let clash = Trs::new(vec![
            Rule::new(Term::app(f.clone(), vec![x.clone()]), x.clone()).unwrap(),
            Rule::new(
                Term::app(Symbol::new("f", 2), vec![x.clone(), x.clone()]),
                x,
            )
            .unwrap(),
        ]);
        assert!(matches!(clash, Err(TrsError::ArityClash { .. })));
    }

    #[test]
    fn renaming_apart() {
        let trs = fixtures::size();
        let rule = &trs.rules()[1];
        let avoid: BTreeSet<String> = ["x", "y"].iter().map(|s| s.to_string()).collect();
        let renamed = rule.rename_apart(&avoid);
        assert!(renamed.variables().iter().all(|x| !avoid.contains(&**x)));
        assert!(renamed.alpha_eq(rule));
        let ground = &trs.rules()[2];
        assert_eq!(&ground.rename_apart(&avoid), ground);
        let other: BTreeSet<String> = ["x0", "y0"].iter().map(|s| s.to_string()).collect();
        assert!(renamed
            .rename_apart(&other)
            .alpha_eq(&rule.rename_apart(&avoid)));
    }
}
