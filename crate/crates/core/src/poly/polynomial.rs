use std::collections::BTreeMap;
use std::fmt;

/// Coefficient domain of a [`Polynomial`].
pub trait Semiring: Clone + PartialEq + fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn is_zero(&self) -> bool;
}

impl Semiring for u64 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn add(&self, other: &Self) -> Self {
        self.saturating_add(*other)
    }
    fn mul(&self, other: &Self) -> Self {
        self.saturating_mul(*other)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
}

/// Product of variables: sorted `(variable, exponent)` pairs, exponents > 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Monomial(Vec<(u32, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(index: u32) -> Self {
        Monomial(vec![(index, 1)])
    }

    /// From a dense exponent vector, variable `i` having exponent `exps[i]`.
    pub fn from_exponents(exps: &[u32]) -> Self {
        Monomial(
            exps.iter()
                .enumerate()
                .filter(|(_, e)| **e > 0)
                .map(|(i, e)| (i as u32, *e))
                .collect(),
        )
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        let mut out = vec![0; nvars];
        for &(v, e) in &self.0 {
            if (v as usize) < nvars {
                out[v as usize] = e;
            }
        }
        out
    }

    pub fn factors(&self) -> &[(u32, u32)] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max_var(&self) -> Option<u32> {
        self.0.last().map(|(v, _)| *v)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out: BTreeMap<u32, u32> = self.0.iter().copied().collect();
        for &(v, e) in &other.0 {
            *out.entry(v).or_insert(0) += e;
        }
        Monomial(out.into_iter().collect())
    }
}

/// Multivariate polynomial with variables indexed from 0; shown as `x1, x2, ...`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Polynomial<C = u64> {
    terms: BTreeMap<Monomial, C>,
}

impl<C: Semiring> Default for Polynomial<C> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<C: Semiring> Polynomial<C> {
    pub fn zero() -> Self {
        Polynomial {
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(c: C) -> Self {
        Self::monomial(Monomial::one(), c)
    }

    pub fn var(index: u32) -> Self {
        Self::monomial(Monomial::var(index), C::one())
    }

    pub fn monomial(m: Monomial, c: C) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Polynomial { terms }
    }

    /// Sum of the variables `0..n`.
    pub fn sum_of_vars(n: usize) -> Self {
        (0..n as u32).fold(Self::zero(), |acc, i| acc.add(&Self::var(i)))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &C)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &Monomial) -> C {
        self.terms.get(m).cloned().unwrap_or_else(C::zero)
    }

    pub fn constant_term(&self) -> C {
        self.coefficient(&Monomial::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Largest total degree of a monomial; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// One more than the largest variable index in use.
    pub fn var_count(&self) -> usize {
        self.terms
            .keys()
            .filter_map(Monomial::max_var)
            .max()
            .map_or(0, |v| v as usize + 1)
    }

    fn insert_add(terms: &mut BTreeMap<Monomial, C>, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match terms.get_mut(&m) {
            Some(old) => {
                *old = old.add(&c);
                if old.is_zero() {
                    terms.remove(&m);
                }
            }
            None => {
                terms.insert(m, c);
            }
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut terms = self.terms.clone();
        for (m, c) in &other.terms {
            Self::insert_add(&mut terms, m.clone(), c.clone());
        }
        Polynomial { terms }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut terms = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                Self::insert_add(&mut terms, m1.mul(m2), c1.mul(c2));
            }
        }
        Polynomial { terms }
    }

    pub fn scale(&self, c: &C) -> Self {
        let mut terms = BTreeMap::new();
        for (m, d) in &self.terms {
            Self::insert_add(&mut terms, m.clone(), d.mul(c));
        }
        Polynomial { terms }
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::constant(C::one()), |acc, _| acc.mul(self))
    }

    /// Composition: variable `i` replaced by `args[i]`.
    pub fn substitute(&self, args: &[Polynomial<C>]) -> Polynomial<C> {
        let mut out = Self::zero();
        for (m, c) in &self.terms {
            let mut prod = Self::constant(c.clone());
            for &(v, e) in m.factors() {
                prod = prod.mul(&args[v as usize].pow(e));
            }
            out = out.add(&prod);
        }
        out
    }

    /// Applies `f` to every coefficient.
    pub fn map_coefficients<D: Semiring>(&self, f: impl Fn(&C) -> D) -> Polynomial<D> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            Polynomial::<D>::insert_add(&mut terms, m.clone(), f(c));
        }
        Polynomial { terms }
    }
}

impl Polynomial<u64> {
    pub fn evaluate(&self, point: &[u64]) -> u64 {
        self.terms.iter().fold(0u64, |acc, (m, c)| {
            let v = m.factors().iter().fold(*c, |p, &(i, e)| {
                p.saturating_mul(point[i as usize].saturating_pow(e))
            });
            acc.saturating_add(v)
        })
    }

    /// `[[coefficient, [e1, ..., en]], ...]` over `nvars` variables.
    pub fn to_dense(&self, nvars: usize) -> Vec<(u64, Vec<u32>)> {
        self.terms
            .iter()
            .map(|(m, c)| (*c, m.exponents(nvars)))
            .collect()
    }

    pub fn from_dense(terms: &[(u64, Vec<u32>)]) -> Self {
        terms.iter().fold(Self::zero(), |acc, (c, exps)| {
            acc.add(&Self::monomial(Monomial::from_exponents(exps), *c))
        })
    }
}

impl fmt::Display for Polynomial<u64> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let mut ordered: Vec<(&Monomial, &u64)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| a.0.cmp(b.0)));
        let parts: Vec<String> = ordered
            .into_iter()
            .map(|(m, c)| {
                let vars: Vec<String> = m
                    .factors()
                    .iter()
                    .map(|&(v, e)| {
                        if e == 1 {
                            format!("x{}", v + 1)
                        } else {
                            format!("x{}^{e}", v + 1)
                        }
                    })
                    .collect();
                match (vars.is_empty(), *c) {
                    (true, c) => c.to_string(),
                    (false, 1) => vars.join("*"),
                    (false, c) => format!("{c}*{}", vars.join("*")),
                }
            })
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

impl Semiring for Polynomial<u64> {
    fn zero() -> Self {
        Polynomial::zero()
    }
    fn one() -> Self {
        Polynomial::constant(1)
    }
    fn add(&self, other: &Self) -> Self {
        Polynomial::add(self, other)
    }
    fn mul(&self, other: &Self) -> Self {
        Polynomial::mul(self, other)
    }
    fn is_zero(&self) -> bool {
        Polynomial::is_zero(self)
    }
}

/// Every coefficient of `p - q` is non-negative.
pub fn poly_ge(p: &Polynomial<u64>, q: &Polynomial<u64>) -> bool {
    q.terms().all(|(m, c)| p.coefficient(m) >= *c)
}

/// [`poly_ge`] and the constant of `p - q` is at least 1.
pub fn poly_gt(p: &Polynomial<u64>, q: &Polynomial<u64>) -> bool {
    poly_ge(p, q) && p.constant_term() > q.constant_term()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: u32) -> Polynomial {
        Polynomial::var(i)
    }

    #[test]
    fn evaluation() {
        let p = x(0).scale(&2).add(&x(0).pow(2));
        assert_eq!(p.evaluate(&[3]), 15);
        assert_eq!(Polynomial::constant(1).evaluate(&[]), 1);
        assert_eq!(x(0).add(&x(1)).evaluate(&[2, 5]), 7);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.to_string(), "x1^2 + 2*x1");
    }

    #[test]
    fn composition() {
        let p = x(0).mul(&x(1));
        let q = p.substitute(&[x(0).add(&Polynomial::constant(1)), x(0)]);
        assert_eq!(q, x(0).pow(2).add(&x(0)));
    }

    #[test]
    fn orders() {
        let one = Polynomial::constant(1);
        assert!(poly_ge(&x(0).add(&one), &x(0)) && poly_gt(&x(0).add(&one), &x(0)));
        assert!(poly_ge(&x(0), &x(0)) && !poly_gt(&x(0), &x(0)));
        assert!(!poly_ge(&x(0).pow(2), &x(0)));
    }

    #[test]
    fn dense_round_trip() {
        let p = x(0)
            .scale(&2)
            .add(&x(2).pow(2))
            .add(&Polynomial::constant(3));
        assert_eq!(Polynomial::from_dense(&p.to_dense(3)), p);
    }

    #[test]
    fn parametric_coefficients() {
        type P = Polynomial<Polynomial<u64>>;
        let a = Polynomial::<u64>::var(0);
        let p: P = P::var(0)
            .scale(&a)
            .add(&P::constant(Polynomial::constant(1)));
        let q = p.substitute(&[P::var(0).add(&P::constant(a.clone()))]);
        assert_eq!(q.constant_term(), a.mul(&a).add(&Polynomial::constant(1)));
    }
}
