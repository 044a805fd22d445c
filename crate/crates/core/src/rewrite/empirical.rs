use serde::Serialize;

use super::{derivation_height, DerivationHeight, Strategy};
use crate::exec::{par_map, Execution};
use crate::trs::Trs;

/// Sampled complexity function: the supremum of derivation heights over
/// ground basic terms of size at most `n`, for `n = 1..=max_size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EmpiricalTable {
    pub rows: Vec<(usize, DerivationHeight)>,
    /// The enumeration hit its cap, so larger terms were skipped.
    pub truncated: bool,
}

impl EmpiricalTable {
    pub fn value_at(&self, n: usize) -> Option<DerivationHeight> {
        self.rows.iter().find(|(m, _)| *m == n).map(|(_, v)| *v)
    }
}

pub fn empirical_complexity(
    trs: &Trs,
    strategy: &Strategy,
    max_size: usize,
    fuel: usize,
    cap: usize,
) -> EmpiricalTable {
    empirical_complexity_with(trs, strategy, max_size, fuel, cap, Execution::default())
}

pub fn empirical_complexity_with(
    trs: &Trs,
    strategy: &Strategy,
    max_size: usize,
    fuel: usize,
    cap: usize,
    exec: Execution,
) -> EmpiricalTable {
    let system = match strategy {
        Strategy::RelativeInnermost(rel) => rel.union(),
        _ => trs,
    };
    let starts = system.enumerate_ground_basic(max_size, cap);
    let heights = par_map(&starts.terms, exec, |t| {
        (t.size(), derivation_height(t, strategy, trs, fuel))
    });
    let mut by_size = vec![DerivationHeight::Finite(0); max_size + 1];
    for (size, h) in heights {
        by_size[size] = by_size[size].sup(h);
    }
    let mut rows = Vec::with_capacity(max_size);
    let mut acc = DerivationHeight::Finite(0);
    for (n, h) in by_size.into_iter().enumerate().skip(1) {
        acc = acc.sup(h);
        rows.push((n, acc));
    }
    EmpiricalTable {
        rows,
        truncated: starts.truncated,
    }
}

const MAX_FIT_DEGREE: u32 = 6;

/// Smallest `d` such that `value(n) / n^d` is stable over the upper half of
/// the finite samples.
///
/// Stable means the ratio varies by at most a factor of two and does not
/// itself grow faster than `n^(1/2)` (least-squares slope in log-log space).
/// Returns `None` with fewer than four finite samples or when no `d <= 6` fits.
pub fn fit_growth_degree(samples: &[(usize, DerivationHeight)]) -> Option<u32> {
    let finite: Vec<(f64, f64)> = samples
        .iter()
        .filter(|(n, _)| *n > 0)
        .filter_map(|(n, v)| v.finite().map(|v| (*n as f64, v as f64)))
        .collect();
    if finite.len() < 4 {
        return None;
    }
    let top = &finite[finite.len() / 2..];
    if top.iter().all(|(_, v)| *v == 0.0) {
        return Some(0);
    }
    if top.iter().any(|(_, v)| *v == 0.0) {
        return None;
    }
    (0..=MAX_FIT_DEGREE).find(|&d| {
        let ratios: Vec<(f64, f64)> = top
            .iter()
            .map(|(n, v)| (n.ln(), (v / n.powi(d as i32)).ln()))
            .collect();
        let (lo, hi) = ratios
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), (_, r)| {
                (lo.min(*r), hi.max(*r))
            });
        hi - lo <= 2f64.ln() + 1e-9 && slope(&ratios) <= 0.5
    })
}

fn slope(points: &[(f64, f64)]) -> f64 {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let cov: f64 = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let var: f64 = points.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    if var == 0.0 {
        0.0
    } else {
        cov / var
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::rewrite::DEFAULT_FUEL;
    use DerivationHeight::Finite;

    #[test]
    fn size_system_small_rows() {
        let trs = fixtures::size();
        let irc = empirical_complexity(&trs, &Strategy::Innermost, 2, DEFAULT_FUEL, 1000);
        assert_eq!(irc.rows, vec![(1, Finite(0)), (2, Finite(1))]);
        let pirc = empirical_complexity(&trs, &Strategy::ParallelInnermost, 2, DEFAULT_FUEL, 1000);
        assert_eq!(pirc.value_at(2), Some(Finite(1)));
        assert!(!irc.truncated);
    }

    #[test]
    fn execution_modes_agree() {
        let trs = fixtures::size();
        let a = empirical_complexity_with(
            &trs,
            &Strategy::ParallelInnermost,
            7,
            DEFAULT_FUEL,
            10_000,
            Execution::Sequential,
        );
        let b = empirical_complexity_with(
            &trs,
            &Strategy::ParallelInnermost,
            7,
            DEFAULT_FUEL,
            10_000,
            Execution::Parallel,
        );
        assert_eq!(a, b);
    }

    #[test]
    fn fits_reference_shapes() {
        let constant: Vec<_> = (1..=10).map(|n| (n, Finite(3))).collect();
        assert_eq!(fit_growth_degree(&constant), Some(0));
        let linear: Vec<_> = (1..=10).map(|n| (n, Finite(2 * n as u64 + 1))).collect();
        assert_eq!(fit_growth_degree(&linear), Some(1));
        let quadratic: Vec<_> = (1..=12).map(|n| (n, Finite((n * n / 2) as u64))).collect();
        assert_eq!(fit_growth_degree(&quadratic), Some(2));
        assert_eq!(fit_growth_degree(&constant[..3]), None);
        let exponential: Vec<_> = (1..=12).map(|n| (n, Finite(1u64 << (2 * n)))).collect();
        assert_eq!(fit_growth_degree(&exponential), None);
    }

    #[test]
    fn doubles_diverges() {
        let trs = fixtures::doubles();
        let irc = empirical_complexity(&trs, &Strategy::Innermost, 12, DEFAULT_FUEL, 100_000);
        let pirc = empirical_complexity(
            &trs,
            &Strategy::ParallelInnermost,
            12,
            DEFAULT_FUEL,
            100_000,
        );
        assert_eq!(fit_growth_degree(&irc.rows), Some(2));
        assert_eq!(fit_growth_degree(&pirc.rows), Some(1));
    }
}
