use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde_json::{json, Map, Value};
use thiserror::Error;

use super::polynomial::{poly_ge, poly_gt, Polynomial};
use crate::dt::DtProblem;
use crate::term::{Symbol, Term};
use crate::trs::Trs;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InterpError {
    #[error("no interpretation for symbol {0}")]
    MissingSymbol(String),
    #[error("interpretation of {symbol} uses variable x{index} beyond arity {arity}")]
    ArityExceeded {
        symbol: String,
        index: usize,
        arity: usize,
    },
    #[error("not a complexity polynomial interpretation: {0}")]
    NotCpi(String),
    #[error("reduction pair step not applicable: {0}")]
    NotApplicable(String),
    #[error("malformed interpretation: {0}")]
    Malformed(String),
}

/// Symbols mapped to polynomials over their argument positions. Compound
/// symbols default to the sum of their arguments.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Interpretation {
    map: BTreeMap<Symbol, Polynomial>,
}

impl Interpretation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, symbol: Symbol, p: Polynomial) -> Result<(), InterpError> {
        if p.var_count() > symbol.arity() {
            return Err(InterpError::ArityExceeded {
                symbol: symbol.to_string(),
                index: p.var_count(),
                arity: symbol.arity(),
            });
        }
        self.map.insert(symbol, p);
        Ok(())
    }

    pub fn get(&self, symbol: &Symbol) -> Option<Polynomial> {
        match self.map.get(symbol) {
            Some(p) => Some(p.clone()),
            None if symbol.is_compound() => Some(Polynomial::sum_of_vars(symbol.arity())),
            None => None,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Symbol, &Polynomial)> {
        self.map.iter()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `{"f#": [[coefficient, [e1, ..., en]], ...], ...}`, keys sorted.
    pub fn to_json(&self) -> Value {
        let mut entries: Vec<(String, Value)> = self
            .map
            .iter()
            .map(|(f, p)| {
                let terms: Vec<Value> = p
                    .to_dense(f.arity())
                    .into_iter()
                    .map(|(c, e)| json!([c, e]))
                    .collect();
                (f.to_string(), Value::Array(terms))
            })
            .collect();
        entries.sort_by(|a, b| a.0.cmp(&b.0));
        Value::Object(entries.into_iter().collect::<Map<String, Value>>())
    }

    /// Inverse of [`Interpretation::to_json`]; `resolve` maps names to symbols.
    pub fn from_json(
        value: &Value,
        resolve: impl Fn(&str) -> Option<Symbol>,
    ) -> Result<Self, InterpError> {
        let obj = value
            .as_object()
            .ok_or_else(|| InterpError::Malformed("expected an object".into()))?;
        let mut out = Interpretation::new();
        for (name, terms) in obj {
            let symbol = resolve(name).ok_or_else(|| InterpError::MissingSymbol(name.clone()))?;
            let bad = || InterpError::Malformed(format!("bad polynomial for {name}"));
            let mut dense = Vec::new();
            for term in terms.as_array().ok_or_else(bad)? {
                let pair = term.as_array().filter(|p| p.len() == 2).ok_or_else(bad)?;
                let coef = pair[0].as_u64().ok_or_else(bad)?;
                let exps: Vec<u32> = pair[1]
                    .as_array()
                    .ok_or_else(bad)?
                    .iter()
                    .map(|e| e.as_u64().and_then(|e| u32::try_from(e).ok()))
                    .collect::<Option<_>>()
                    .ok_or_else(bad)?;
                if exps.len() > symbol.arity() && exps[symbol.arity()..].iter().any(|e| *e > 0) {
                    return Err(InterpError::ArityExceeded {
                        symbol: name.clone(),
                        index: exps.len(),
                        arity: symbol.arity(),
                    });
                }
                dense.push((coef, exps));
            }
            out.insert(symbol, Polynomial::from_dense(&dense))?;
        }
        Ok(out)
    }
}

/// Interpretation of `t` with variable `vars[i]` as `x(i+1)`.
pub fn interpret_in(
    t: &Term,
    interp: &Interpretation,
    vars: &[Arc<str>],
) -> Result<Polynomial, InterpError> {
    match t {
        Term::Var(x) => {
            let i = vars.iter().position(|v| v == x).expect("variable listed");
            Ok(Polynomial::var(i as u32))
        }
        Term::App(f, args) => {
            let p = interp
                .get(f)
                .ok_or_else(|| InterpError::MissingSymbol(f.to_string()))?;
            let args = args
                .iter()
                .map(|a| interpret_in(a, interp, vars))
                .collect::<Result<Vec<_>, _>>()?;
            Ok(p.substitute(&args))
        }
    }
}

/// Interpretation of `t` over its variables in order of first occurrence.
pub fn interpret_term(t: &Term, interp: &Interpretation) -> Result<Polynomial, InterpError> {
    interpret_in(t, interp, &t.variables())
}

/// Compound symbols are sums and constructors are affine with argument
/// coefficients in `{0, 1}`.
pub fn check_cpi(interp: &Interpretation, trs: &Trs) -> bool {
    cpi_violation(interp, trs).is_none()
}

fn cpi_violation(interp: &Interpretation, trs: &Trs) -> Option<String> {
    for (f, p) in interp.iter() {
        if f.is_compound() {
            if *p != Polynomial::sum_of_vars(f.arity()) {
                return Some(format!("{f} must be the sum of its arguments"));
            }
        } else if !f.is_sharp() && !trs.is_defined(f) {
            let affine = p
                .terms()
                .all(|(m, c)| m.is_one() || (m.degree() == 1 && *c <= 1));
            if !affine {
                return Some(format!(
                    "constructor {f} must be affine with coefficients 0 or 1"
                ));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrientationResult {
    /// Every tuple and every rule is weakly decreasing.
    pub weak_ok: bool,
    /// Indices of counted tuples that are strictly decreasing.
    pub strict: BTreeSet<usize>,
}

fn compare(lhs: &Term, rhs: &Term, interp: &Interpretation) -> Result<(bool, bool), InterpError> {
    let vars = lhs.variables();
    let l = interpret_in(lhs, interp, &vars)?;
    let r = interpret_in(rhs, interp, &vars)?;
    Ok((poly_ge(&l, &r), poly_gt(&l, &r)))
}

pub fn orient(
    problem: &DtProblem,
    interp: &Interpretation,
) -> Result<OrientationResult, InterpError> {
    if let Some(v) = cpi_violation(interp, &problem.trs) {
        return Err(InterpError::NotCpi(v));
    }
    let mut weak_ok = true;
    let mut strict = BTreeSet::new();
    for (i, dt) in problem.dts.iter().enumerate() {
        let (ge, gt) = compare(&dt.lhs, &dt.rhs(), interp)?;
        weak_ok &= ge;
        if gt && problem.is_counted(i) {
            strict.insert(i);
        }
    }
    for rule in problem.trs.rules() {
        weak_ok &= compare(&rule.lhs, &rule.rhs, interp)?.0;
    }
    Ok(OrientationResult { weak_ok, strict })
}

/// Largest degree among the interpretations of sharp symbols.
pub fn sharp_degree(interp: &Interpretation) -> u32 {
    interp
        .iter()
        .filter(|(f, _)| f.is_sharp())
        .map(|(_, p)| p.degree())
        .max()
        .unwrap_or(0)
}

/// Removes the strictly oriented tuples from the counted set and reports
/// the degree of the bound they contribute.
pub fn reduction_pair_step(
    problem: &DtProblem,
    interp: &Interpretation,
) -> Result<(DtProblem, u32), InterpError> {
    if problem.counted.is_empty() {
        return Err(InterpError::NotApplicable("no counted tuples left".into()));
    }
    let o = orient(problem, interp)?;
    if !o.weak_ok {
        return Err(InterpError::NotApplicable(
            "some rule or tuple is not weakly decreasing".into(),
        ));
    }
    if o.strict.is_empty() {
        return Err(InterpError::NotApplicable(
            "no counted tuple is strictly decreasing".into(),
        ));
    }
    Ok((problem.without_counted(&o.strict), sharp_degree(interp)))
}

/// Builds an interpretation from `(symbol, [(coefficient, exponents)])`
/// entries, resolving names against `trs` and its sharp twins.
pub fn interpretation_for(
    trs: &Trs,
    entries: &[(&str, &[(u64, &[u32])])],
) -> Result<Interpretation, InterpError> {
    let mut out = Interpretation::new();
    for (name, terms) in entries {
        let symbol = resolve_symbol(trs, name)
            .ok_or_else(|| InterpError::MissingSymbol(name.to_string()))?;
        let dense: Vec<(u64, Vec<u32>)> = terms.iter().map(|(c, e)| (*c, e.to_vec())).collect();
        out.insert(symbol, Polynomial::from_dense(&dense))?;
    }
    Ok(out)
}

/// Looks up `name` among the symbols of `trs`, sharp twins of its defined
/// symbols and `Com_k`.
pub fn resolve_symbol(trs: &Trs, name: &str) -> Option<Symbol> {
    if let Some(f) = trs.lookup(name) {
        return Some(f.clone());
    }
    if let Some(plain) = name.strip_suffix('#') {
        return trs
            .lookup(plain)
            .filter(|f| trs.is_defined(f))
            .map(Symbol::to_sharp);
    }
    name.strip_prefix("Com_")
        .and_then(|k| k.parse().ok())
        .map(Symbol::compound)
}
