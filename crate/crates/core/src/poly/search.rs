use std::collections::{BTreeMap, HashMap};

use super::interpretation::{orient, Interpretation};
use super::polynomial::{Monomial, Polynomial};
use crate::dt::DtProblem;
use crate::term::{Symbol, Term};

/// Default number of candidate assignments a search may test.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

type Param = Polynomial<Polynomial<u64>>;

/// Polynomial over the unknowns in flattened form.
#[derive(Debug, Clone)]
struct Flat(Vec<(u64, Vec<(u32, u32)>)>);

impl Flat {
    fn new(p: &Polynomial<u64>) -> Self {
        Flat(p.terms().map(|(m, c)| (*c, m.factors().to_vec())).collect())
    }

    fn eval(&self, values: &[u64]) -> u64 {
        self.0.iter().fold(0u64, |acc, (c, factors)| {
            let v = factors.iter().fold(*c, |p, &(u, e)| {
                p.saturating_mul(values[u as usize].saturating_pow(e))
            });
            acc.saturating_add(v)
        })
    }
}

/// `lhs(u) >= rhs(u) + req` for a coefficient of one monomial.
#[derive(Debug, Clone)]
struct Atom {
    lhs: Flat,
    rhs: Flat,
    req: u64,
    unknowns: Vec<u32>,
}

impl Atom {
    /// Cancels common terms; `None` if the atom holds for all values.
    fn new(lhs: &Polynomial<u64>, rhs: &Polynomial<u64>, req: u64) -> Option<(Atom, Vec<u32>)> {
        let mut l = BTreeMap::new();
        let mut r = BTreeMap::new();
        for (m, c) in lhs.terms() {
            let d = rhs.coefficient(m);
            if *c > d {
                l.insert(m.clone(), c - d);
            }
        }
        for (m, c) in rhs.terms() {
            let d = lhs.coefficient(m);
            if *c > d {
                r.insert(m.clone(), c - d);
            }
        }
        if r.is_empty() && req == 0 {
            return None;
        }
        let to_poly = |t: BTreeMap<Monomial, u64>| {
            t.into_iter().fold(Polynomial::zero(), |acc, (m, c)| {
                acc.add(&Polynomial::monomial(m, c))
            })
        };
        let (l, r) = (to_poly(l), to_poly(r));
        let mut unknowns: Vec<u32> = l
            .terms()
            .chain(r.terms())
            .flat_map(|(m, _)| m.factors().iter().map(|(u, _)| *u))
            .collect();
        unknowns.sort_unstable();
        unknowns.dedup();
        Some((
            Atom {
                lhs: Flat::new(&l),
                rhs: Flat::new(&r),
                req,
                unknowns: unknowns.clone(),
            },
            unknowns,
        ))
    }

    fn possible(&self, lo: &[u64], hi: &[u64]) -> bool {
        self.lhs.eval(hi) >= self.rhs.eval(lo).saturating_add(self.req)
    }
}

/// One template coefficient: symbol, monomial over its arguments, bound.
#[derive(Debug, Clone)]
struct Unknown {
    symbol: Symbol,
    monomial: Monomial,
    max: u64,
}

struct Templates {
    unknowns: Vec<Unknown>,
    polys: HashMap<Symbol, Param>,
}

fn monomials_up_to(arity: usize, degree: u32) -> Vec<Monomial> {
    let mut out = vec![vec![0u32; arity]];
    let mut frontier = out.clone();
    for _ in 0..degree {
        let mut next = Vec::new();
        for e in &frontier {
            let start = e.iter().rposition(|x| *x > 0).unwrap_or(0);
            for i in start..arity {
                let mut f = e.clone();
                f[i] += 1;
                next.push(f);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    let mut ms: Vec<Monomial> = out.iter().map(|e| Monomial::from_exponents(e)).collect();
    ms.sort_by(|a, b| a.degree().cmp(&b.degree()).then_with(|| a.cmp(b)));
    ms
}

fn problem_terms(problem: &DtProblem) -> Vec<(Term, Term)> {
    problem
        .dts
        .iter()
        .map(|d| (d.lhs.clone(), d.rhs()))
        .chain(
            problem
                .trs
                .rules()
                .iter()
                .map(|r| (r.lhs.clone(), r.rhs.clone())),
        )
        .collect()
}

fn count_symbols(t: &Term, counts: &mut BTreeMap<Symbol, usize>) {
    if let Term::App(f, args) = t {
        *counts.entry(f.clone()).or_insert(0) += 1;
        for a in args.iter() {
            count_symbols(a, counts);
        }
    }
}

fn build_templates(problem: &DtProblem, sharp_degree: u32, coeff: u64) -> Templates {
    let mut counts = BTreeMap::new();
    for (l, r) in problem_terms(problem) {
        count_symbols(&l, &mut counts);
        count_symbols(&r, &mut counts);
    }
    let mut symbols: Vec<(Symbol, usize)> = counts
        .into_iter()
        .filter(|(f, _)| !f.is_compound())
        .collect();
    symbols.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let mut unknowns = Vec::new();
    let mut polys = HashMap::new();
    for (f, _) in symbols {
        let n = f.arity();
        let (monomials, var_max) = if f.is_sharp() {
            (monomials_up_to(n, sharp_degree), coeff)
        } else if problem.trs.is_defined(&f) {
            (monomials_up_to(n, 1), coeff)
        } else {
            (monomials_up_to(n, 1), 1)
        };
        let mut p = Param::zero();
        for m in monomials {
            let u = unknowns.len() as u32;
            let max = if m.is_one() { coeff } else { var_max };
            p = p.add(&Param::monomial(m.clone(), Polynomial::var(u)));
            unknowns.push(Unknown {
                symbol: f.clone(),
                monomial: m,
                max,
            });
        }
        polys.insert(f, p);
    }
    Templates { unknowns, polys }
}

fn interpret(t: &Term, templates: &Templates, vars: &[std::sync::Arc<str>]) -> Param {
    match t {
        Term::Var(x) => Param::var(vars.iter().position(|v| v == x).expect("listed") as u32),
        Term::App(f, args) => {
            let args: Vec<Param> = args.iter().map(|a| interpret(a, templates, vars)).collect();
            if f.is_compound() {
                return args.iter().fold(Param::zero(), |acc, a| acc.add(a));
            }
            templates.polys[f].substitute(&args)
        }
    }
}

struct Constraints {
    hard: Vec<Atom>,
    soft: Vec<Atom>,
    hard_by_unknown: Vec<Vec<usize>>,
    soft_by_unknown: Vec<Vec<usize>>,
    /// Which counted tuple each soft atom belongs to.
    soft_owner: Vec<usize>,
}

fn build_constraints(problem: &DtProblem, templates: &Templates) -> Constraints {
    let n = templates.unknowns.len();
    let mut c = Constraints {
        hard: Vec::new(),
        soft: Vec::new(),
        hard_by_unknown: vec![Vec::new(); n],
        soft_by_unknown: vec![Vec::new(); n],
        soft_owner: Vec::new(),
    };
    let dts = problem.dts.len();
    for (i, (lhs, rhs)) in problem_terms(problem).into_iter().enumerate() {
        let vars = lhs.variables();
        let l = interpret(&lhs, templates, &vars);
        let r = interpret(&rhs, templates, &vars);
        let mut monomials: Vec<&Monomial> = l
            .terms()
            .map(|(m, _)| m)
            .chain(r.terms().map(|(m, _)| m))
            .collect();
        monomials.sort();
        monomials.dedup();
        for m in monomials {
            if let Some((atom, us)) = Atom::new(&l.coefficient(m), &r.coefficient(m), 0) {
                for u in us {
                    c.hard_by_unknown[u as usize].push(c.hard.len());
                }
                c.hard.push(atom);
            }
        }
        if i < dts && problem.is_counted(i) {
            let one = Monomial::one();
            if let Some((atom, us)) = Atom::new(&l.coefficient(&one), &r.coefficient(&one), 1) {
                for u in us {
                    c.soft_by_unknown[u as usize].push(c.soft.len());
                }
                c.soft.push(atom);
                c.soft_owner.push(i);
            }
        }
    }
    c
}

#[derive(Clone)]
struct State {
    lo: Vec<u64>,
    hi: Vec<u64>,
    refuted: Vec<bool>,
    alive: usize,
}

struct Dfs<'a> {
    constraints: &'a Constraints,
    hard_vars: Vec<Vec<u32>>,
    soft_vars: Vec<Vec<u32>>,
    required: usize,
    budget: u64,
}

enum Outcome {
    Found(State),
    Exhausted,
    Infeasible,
}

impl Dfs<'_> {
    /// Narrows the domains of `vars` to values that keep `atom` satisfiable.
    /// Returns false if it cannot be satisfied.
    fn revise(atom: &Atom, vars: &[u32], st: &mut State, changed: &mut Vec<u32>) -> bool {
        if !atom.possible(&st.lo, &st.hi) {
            return false;
        }
        for &w in vars {
            let w = w as usize;
            let (lo, hi) = (st.lo[w], st.hi[w]);
            if lo == hi {
                continue;
            }
            let mut feasible = None::<(u64, u64)>;
            for v in lo..=hi {
                st.lo[w] = v;
                st.hi[w] = v;
                if atom.possible(&st.lo, &st.hi) {
                    feasible = Some(feasible.map_or((v, v), |(a, _)| (a, v)));
                }
            }
            match feasible {
                None => return false,
                Some((a, b)) => {
                    st.lo[w] = a;
                    st.hi[w] = b;
                    if (a, b) != (lo, hi) {
                        changed.push(w as u32);
                    }
                }
            }
        }
        true
    }

    /// Propagates domain changes to a fixpoint; false on a contradiction.
    fn propagate(&self, st: &mut State, mut queue: Vec<u32>) -> bool {
        let c = self.constraints;
        let mut forced = st.alive == self.required;
        while let Some(u) = queue.pop() {
            let mut changed = Vec::new();
            for &a in &c.hard_by_unknown[u as usize] {
                if !Self::revise(&c.hard[a], &self.hard_vars[a], st, &mut changed) {
                    return false;
                }
            }
            for &a in &c.soft_by_unknown[u as usize] {
                if st.refuted[a] {
                    continue;
                }
                if forced {
                    if !Self::revise(&c.soft[a], &self.soft_vars[a], st, &mut changed) {
                        return false;
                    }
                } else if !c.soft[a].possible(&st.lo, &st.hi) {
                    st.refuted[a] = true;
                    st.alive -= 1;
                    if st.alive < self.required {
                        return false;
                    }
                }
            }
            if !forced && st.alive == self.required {
                forced = true;
                for a in 0..c.soft.len() {
                    if !st.refuted[a]
                        && !Self::revise(&c.soft[a], &self.soft_vars[a], st, &mut changed)
                    {
                        return false;
                    }
                }
            }
            queue.extend(changed);
        }
        true
    }

    fn run(&mut self, st: State) -> Outcome {
        let Some(u) = (0..st.lo.len()).find(|&u| st.lo[u] < st.hi[u]) else {
            return Outcome::Found(st);
        };
        for v in st.lo[u]..=st.hi[u] {
            if self.budget == 0 {
                return Outcome::Exhausted;
            }
            self.budget -= 1;
            let mut next = st.clone();
            next.lo[u] = v;
            next.hi[u] = v;
            if !self.propagate(&mut next, vec![u as u32]) {
                continue;
            }
            match self.run(next) {
                Outcome::Infeasible => {}
                other => return other,
            }
        }
        Outcome::Infeasible
    }
}

fn concrete(templates: &Templates, values: &[u64]) -> Interpretation {
    let mut by_symbol: BTreeMap<Symbol, Polynomial<u64>> = BTreeMap::new();
    for (u, v) in templates.unknowns.iter().zip(values) {
        let entry = by_symbol.entry(u.symbol.clone()).or_default();
        *entry = entry.add(&Polynomial::monomial(u.monomial.clone(), *v));
    }
    let mut out = Interpretation::new();
    for (f, p) in by_symbol {
        out.insert(f, p).expect("templates respect arity");
    }
    out
}

/// Searches for an interpretation with all sharp symbols of degree at most
/// `sharp_degree` that orients at least `required` counted tuples strictly.
/// `Err(())` means the budget ran out.
fn search_fixed(
    problem: &DtProblem,
    sharp_degree: u32,
    coeff: u64,
    required: usize,
    budget: &mut u64,
) -> Result<Option<Interpretation>, ()> {
    let templates = build_templates(problem, sharp_degree, coeff);
    let constraints = build_constraints(problem, &templates);
    if constraints.soft.len() < required {
        return Ok(None);
    }
    let vars_of =
        |atoms: &[Atom]| -> Vec<Vec<u32>> { atoms.iter().map(|a| a.unknowns.clone()).collect() };
    let mut dfs = Dfs {
        constraints: &constraints,
        hard_vars: vars_of(&constraints.hard),
        soft_vars: vars_of(&constraints.soft),
        required,
        budget: *budget,
    };
    let mut st = State {
        lo: vec![0; templates.unknowns.len()],
        hi: templates.unknowns.iter().map(|u| u.max).collect(),
        refuted: vec![false; constraints.soft.len()],
        alive: constraints.soft.len(),
    };
    for (i, a) in constraints.soft.iter().enumerate() {
        if !a.possible(&st.lo, &st.hi) {
            st.refuted[i] = true;
            st.alive -= 1;
        }
    }
    let consistent = st.alive >= required
        && constraints.hard.iter().zip(&dfs.hard_vars).all(|(a, vs)| {
            let mut changed = Vec::new();
            Dfs::revise(a, vs, &mut st, &mut changed)
        })
        && dfs.propagate(&mut st, (0..templates.unknowns.len() as u32).collect());
    let outcome = if consistent {
        dfs.run(st)
    } else {
        Outcome::Infeasible
    };
    *budget = dfs.budget;
    match outcome {
        Outcome::Exhausted => Err(()),
        Outcome::Infeasible => Ok(None),
        Outcome::Found(st) => Ok(Some(concrete(&templates, &st.lo))),
    }
}

/// A CPI orienting every tuple and rule weakly and some counted tuples
/// strictly, preferring more strict tuples, then lower sharp degree, then
/// smaller coefficients in search order. `None` if none exists within the
/// templates or the budget is spent.
pub fn search_interpretation(
    problem: &DtProblem,
    degree_bound: u32,
    coeff_bound: u64,
    budget: u64,
) -> Option<Interpretation> {
    let mut remaining = budget;
    for required in (1..=problem.counted.len()).rev() {
        for degree in 0..=degree_bound {
            match search_fixed(problem, degree, coeff_bound, required, &mut remaining) {
                Ok(Some(found)) => {
                    debug_assert!(orient(problem, &found)
                        .is_ok_and(|o| o.weak_ok && o.strict.len() >= required));
                    return Some(found);
                }
                Ok(None) => {}
                Err(()) => return None,
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dt::canonical_parallel_problem;
    use crate::fixtures;
    use crate::poly::interpretation::{reduction_pair_step, sharp_degree};

    #[test]
    fn monomial_enumeration() {
        assert_eq!(monomials_up_to(2, 2).len(), 6);
        assert_eq!(monomials_up_to(3, 1).len(), 4);
        assert_eq!(monomials_up_to(0, 2).len(), 1);
    }

    #[test]
    fn finds_linear_proof_for_doubles() {
        let p = canonical_parallel_problem(&fixtures::doubles());
        let found = search_interpretation(&p, 1, 2, DEFAULT_BUDGET).expect("interpretation");
        let (rest, degree) = reduction_pair_step(&p, &found).unwrap();
        assert!(rest.counted.is_empty());
        assert!(degree <= 1);
    }

    #[test]
    fn finds_quadratic_proof_for_size() {
        let p = canonical_parallel_problem(&fixtures::size());
        let found = search_interpretation(&p, 2, 2, DEFAULT_BUDGET).expect("interpretation");
        let o = orient(&p, &found).unwrap();
        assert!(o.weak_ok && !o.strict.is_empty());
        assert!(sharp_degree(&found) <= 2);
    }

    #[test]
    fn self_loop_cannot_be_oriented() {
        let trs = crate::tpdb::parse_trs("(VAR x) (RULES f(x) -> f(x))").unwrap();
        let p = canonical_parallel_problem(&trs);
        assert!(search_interpretation(&p, 2, 2, DEFAULT_BUDGET).is_none());
    }
}
