//! First-order terms, positions, substitutions, matching and unification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("position {position} is not a position of {term}")]
    InvalidPosition { position: Position, term: String },
}

/// Distinguishes ordinary signature symbols from the marked copies used
/// by dependency tuples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SymbolKind {
    Plain,
    /// `f#`, the marked twin of a defined symbol `f` of the same arity.
    Sharp,
    /// `Com_k`; its arity is `k`.
    Compound,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol {
    name: Arc<str>,
    arity: usize,
    kind: SymbolKind,
}

impl Symbol {
    pub fn new(name: &str, arity: usize) -> Self {
        Symbol {
            name: name.into(),
            arity,
            kind: SymbolKind::Plain,
        }
    }

    pub fn compound(arity: usize) -> Self {
        Symbol {
            name: format!("Com_{arity}").into(),
            arity,
            kind: SymbolKind::Compound,
        }
    }

    /// The sharp twin of a plain symbol. Sharp and compound symbols are
    /// returned unchanged.
    pub fn to_sharp(&self) -> Self {
        match self.kind {
            SymbolKind::Plain => Symbol {
                kind: SymbolKind::Sharp,
                ..self.clone()
            },
            _ => self.clone(),
        }
    }

    /// Inverse of [`Symbol::to_sharp`].
    pub fn to_plain(&self) -> Self {
        match self.kind {
            SymbolKind::Sharp => Symbol {
                kind: SymbolKind::Plain,
                ..self.clone()
            },
            _ => self.clone(),
        }
    }

    /// The base name, without the `#` marker of sharp symbols.
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn kind(&self) -> SymbolKind {
        self.kind
    }

    pub fn is_sharp(&self) -> bool {
        self.kind == SymbolKind::Sharp
    }

    pub fn is_compound(&self) -> bool {
        self.kind == SymbolKind::Compound
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            SymbolKind::Sharp => write!(f, "{}#", self.name),
            _ => f.write_str(&self.name),
        }
    }
}

/// A path from the root; `[1, 2, 1]` is written `121` and the root is `ε`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn new(path: Vec<usize>) -> Self {
        debug_assert!(path.iter().all(|&i| i >= 1));
        Position(path)
    }

    pub fn path(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, index: usize) -> Self {
        let mut path = self.0.clone();
        path.push(index);
        Position(path)
    }

    pub fn concat(&self, other: &Position) -> Self {
        let mut path = self.0.clone();
        path.extend_from_slice(&other.0);
        Position(path)
    }

    /// `self` is a strict prefix of `other`, i.e. `other > self` in the
    /// prefix order: `other` lies strictly below `self`.
    pub fn is_above(&self, other: &Position) -> bool {
        self.0.len() < other.0.len() && other.0.starts_with(&self.0)
    }

    pub fn is_below(&self, other: &Position) -> bool {
        other.is_above(self)
    }

    pub fn is_parallel_to(&self, other: &Position) -> bool {
        self != other && !self.is_above(other) && !other.is_above(self)
    }
}

impl From<&[usize]> for Position {
    fn from(path: &[usize]) -> Self {
        Position::new(path.to_vec())
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        let sep = if self.0.iter().any(|&i| i > 9) {
            "."
        } else {
            ""
        };
        let parts: Vec<String> = self.0.iter().map(|i| i.to_string()).collect();
        f.write_str(&parts.join(sep))
    }
}

/// `τ > π` in the prefix order, with arguments given as `(τ, π)`.
pub fn strictly_above(tau: &Position, pi: &Position) -> bool {
    pi.is_above(tau)
}

pub fn parallel_positions(pi: &Position, tau: &Position) -> bool {
    pi.is_parallel_to(tau)
}

/// A tree-shaped term. Argument slices are reference counted so clones are
/// cheap, but equality, hashing and size are purely structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Arc<str>),
    App(Symbol, Arc<[Term]>),
}

impl Term {
    pub fn var(name: &str) -> Self {
        Term::Var(name.into())
    }

    /// Panics if `args.len()` differs from the symbol's arity.
    pub fn app(symbol: Symbol, args: Vec<Term>) -> Self {
        assert_eq!(symbol.arity(), args.len(), "arity mismatch for {symbol}");
        Term::App(symbol, args.into())
    }

    pub fn constant(symbol: Symbol) -> Self {
        Term::app(symbol, Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn root(&self) -> Option<&Symbol> {
        match self {
            Term::Var(_) => None,
            Term::App(f, _) => Some(f),
        }
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::App(_, args) => args,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(_, args) => 1 + args.iter().map(Term::size).sum::<usize>(),
        }
    }

    /// All positions in pre-order (parents before children, left to right).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        self.visit(&mut Position::root(), &mut |p, _| out.push(p.clone()));
        out
    }

    /// Calls `f` on every (position, subterm) pair in pre-order.
    pub fn visit<'a>(&'a self, at: &mut Position, f: &mut impl FnMut(&Position, &'a Term)) {
        f(at, self);
        for (i, arg) in self.args().iter().enumerate() {
            at.0.push(i + 1);
            arg.visit(at, f);
            at.0.pop();
        }
    }

    pub fn get(&self, position: &Position) -> Option<&Term> {
        let mut current = self;
        for &i in position.path() {
            current = current.args().get(i.checked_sub(1)?)?;
        }
        Some(current)
    }

    pub fn subterm_at(&self, position: &Position) -> Result<&Term, TermError> {
        self.get(position)
            .ok_or_else(|| TermError::InvalidPosition {
                position: position.clone(),
                term: self.to_string(),
            })
    }

    pub fn replace_at(&self, position: &Position, replacement: Term) -> Result<Term, TermError> {
        if self.get(position).is_none() {
            return Err(TermError::InvalidPosition {
                position: position.clone(),
                term: self.to_string(),
            });
        }
        Ok(self.replace_path(position.path(), replacement))
    }

    fn replace_path(&self, path: &[usize], replacement: Term) -> Term {
        match (path.split_first(), self) {
            (None, _) => replacement,
            (Some((&i, rest)), Term::App(f, args)) => {
                let mut new_args = args.to_vec();
                new_args[i - 1] = args[i - 1].replace_path(rest, replacement);
                Term::App(f.clone(), new_args.into())
            }
            (Some(_), Term::Var(_)) => unreachable!("path checked by caller"),
        }
    }

    /// Variables in order of first occurrence.
    pub fn variables(&self) -> Vec<Arc<str>> {
        let mut seen = Vec::new();
        self.collect_vars(&mut seen);
        seen
    }

    fn collect_vars(&self, out: &mut Vec<Arc<str>>) {
        match self {
            Term::Var(x) => {
                if !out.contains(x) {
                    out.push(x.clone());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn contains_var(&self, name: &str) -> bool {
        match self {
            Term::Var(x) => &**x == name,
            Term::App(_, args) => args.iter().any(|a| a.contains_var(name)),
        }
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut Position::root(), &mut |_, t| {
            if let Some(f) = t.root() {
                out.insert(f.clone());
            }
        });
        out
    }

    /// Rebuilds the term, mapping every function symbol through `f`.
    pub fn map_symbols(&self, f: &impl Fn(&Symbol) -> Symbol) -> Term {
        match self {
            Term::Var(_) => self.clone(),
            Term::App(g, args) => Term::App(
                f(g),
                args.iter()
                    .map(|a| a.map_symbols(f))
                    .collect::<Vec<_>>()
                    .into(),
            ),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => f.write_str(x),
            Term::App(g, args) if args.is_empty() => write!(f, "{g}"),
            Term::App(g, args) => {
                write!(f, "{g}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

/// Finite mapping from variables to terms; identity elsewhere.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<Arc<str>, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, var: &str, term: Term) {
        self.0.insert(var.into(), term);
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Arc<str>, &Term)> {
        self.0.iter()
    }

    pub fn apply(&self, t: &Term) -> Term {
        match t {
            Term::Var(x) => self.0.get(x).cloned().unwrap_or_else(|| t.clone()),
            Term::App(f, args) => {
                if self.0.is_empty() {
                    return t.clone();
                }
                Term::App(
                    f.clone(),
                    args.iter()
                        .map(|a| self.apply(a))
                        .collect::<Vec<_>>()
                        .into(),
                )
            }
        }
    }
}

impl FromIterator<(Arc<str>, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (Arc<str>, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().collect())
    }
}

pub fn apply_substitution(sigma: &Substitution, t: &Term) -> Term {
    sigma.apply(t)
}

/// Syntactic matching: `pattern·σ = subject`, with `dom(σ) ⊆ vars(pattern)`.
pub fn match_term(pattern: &Term, subject: &Term) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    match_into(pattern, subject, &mut sigma).then_some(sigma)
}

pub(crate) fn match_into(pattern: &Term, subject: &Term, sigma: &mut Substitution) -> bool {
    match pattern {
        Term::Var(x) => match sigma.0.get(x) {
            Some(bound) => bound == subject,
            None => {
                sigma.0.insert(x.clone(), subject.clone());
                true
            }
        },
        Term::App(f, pargs) => match subject {
            Term::App(g, sargs) if f == g => pargs
                .iter()
                .zip(sargs.iter())
                .all(|(p, s)| match_into(p, s, sigma)),
            _ => false,
        },
    }
}

/// Cheap test of whether `pattern` matches `subject`, without building σ
/// unless the pattern is non-linear.
pub(crate) fn matches(pattern: &Term, subject: &Term) -> bool {
    let mut sigma = Substitution::new();
    match_into(pattern, subject, &mut sigma)
}

/// Most general unifier, with occurs check. The result is idempotent.
pub fn unify(s: &Term, t: &Term) -> Option<Substitution> {
    let mut bindings: BTreeMap<Arc<str>, Term> = BTreeMap::new();
    let mut stack = vec![(s.clone(), t.clone())];
    while let Some((a, b)) = stack.pop() {
        let a = resolve(&a, &bindings);
        let b = resolve(&b, &bindings);
        match (&a, &b) {
            (Term::Var(x), Term::Var(y)) if x == y => {}
            (Term::Var(x), other) | (other, Term::Var(x)) => {
                if occurs(x, other, &bindings) {
                    return None;
                }
                bindings.insert(x.clone(), other.clone());
            }
            (Term::App(f, fa), Term::App(g, ga)) => {
                if f != g {
                    return None;
                }
                stack.extend(fa.iter().cloned().zip(ga.iter().cloned()));
            }
        }
    }
    let keys: Vec<_> = bindings.keys().cloned().collect();
    Some(
        keys.into_iter()
            .map(|x| {
                let t = deep_resolve(&Term::Var(x.clone()), &bindings);
                (x, t)
            })
            .collect(),
    )
}

fn resolve(t: &Term, bindings: &BTreeMap<Arc<str>, Term>) -> Term {
    let mut current = t.clone();
    while let Term::Var(x) = &current {
        match bindings.get(x) {
            Some(next) => current = next.clone(),
            None => break,
        }
    }
    current
}

fn deep_resolve(t: &Term, bindings: &BTreeMap<Arc<str>, Term>) -> Term {
    match resolve(t, bindings) {
        v @ Term::Var(_) => v,
        Term::App(f, args) => Term::App(
            f,
            args.iter()
                .map(|a| deep_resolve(a, bindings))
                .collect::<Vec<_>>()
                .into(),
        ),
    }
}

fn occurs(x: &str, t: &Term, bindings: &BTreeMap<Arc<str>, Term>) -> bool {
    match resolve(t, bindings) {
        Term::Var(y) => &*y == x,
        Term::App(_, args) => args.iter().any(|a| occurs(x, a, bindings)),
    }
}
