//! Rank-correlation utilities shared by the complexity and framing comparisons.

use serde::Serialize;
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::{Error, Result};

/// How the two-sided p-value of a Spearman coefficient is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PValueMethod {
    /// Student's t approximation with n − 2 degrees of freedom.
    #[default]
    TApprox,
    /// Full permutation distribution. Only allowed for n ≤ [`MAX_EXACT_N`].
    Exact,
}

pub const MAX_EXACT_N: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationResult {
    pub rho: f64,
    pub p_value: f64,
    pub n: usize,
}

/// Ranks starting at 1, ties resolved by the average of the positions they span.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = (start + 1 + end) as f64 / 2.0;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Pearson correlation. Returns `None` when either input has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Option<f64> {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return None;
    }
    Some((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

pub fn spearman(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    spearman_with(x, y, PValueMethod::TApprox)
}

pub fn spearman_with(x: &[f64], y: &[f64], method: PValueMethod) -> Result<CorrelationResult> {
    if x.len() != y.len() {
        return Err(Error::invalid(format!(
            "spearman inputs differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::invalid(format!("spearman needs at least 3 pairs, got {n}")));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::invalid("spearman inputs must be finite"));
    }
    let rx = average_ranks(x);
    let ry = average_ranks(y);
    let mut rho = pearson(&rx, &ry)
        .ok_or_else(|| Error::Degenerate("constant input vector, ranks degenerate".into()))?;
    // rounding leaves a perfect monotone relation a few ulps short of ±1
    let perfect = (rho.abs() - 1.0).abs() < 1e-12;
    if perfect {
        rho = rho.signum();
    }

    let p_value = match method {
        _ if perfect => degenerate_p(n),
        PValueMethod::TApprox => t_approx_p(rho, n),
        PValueMethod::Exact => {
            if n > MAX_EXACT_N {
                return Err(Error::invalid(format!(
                    "exact permutation p-value limited to n <= {MAX_EXACT_N}, got {n}"
                )));
            }
            permutation_p(&rx, &ry, rho)
        }
    };
    Ok(CorrelationResult { rho, p_value, n })
}

/// Permutation bound 2/n! for a perfect monotone relation, capped at 1.
fn degenerate_p(n: usize) -> f64 {
    let mut factorial = 1.0_f64;
    for k in 2..=n {
        factorial *= k as f64;
    }
    (2.0 / factorial).min(1.0)
}

fn t_approx_p(rho: f64, n: usize) -> f64 {
    let df = (n - 2) as f64;
    let t = rho * (df / (1.0 - rho * rho)).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df is positive");
    (2.0 * dist.sf(t.abs())).clamp(0.0, 1.0)
}

/// Fraction of all permutations of `ry` whose |rho| reaches the observed one.
fn permutation_p(rx: &[f64], ry: &[f64], observed: f64) -> f64 {
    let mut perm = ry.to_vec();
    let target = observed.abs() - 1e-12;
    let mut hits = 0u64;
    let mut total = 0u64;
    heap_permutations(&mut perm, &mut |p| {
        total += 1;
        if pearson(rx, p).is_some_and(|r| r.abs() >= target) {
            hits += 1;
        }
    });
    hits as f64 / total as f64
}

fn heap_permutations(items: &mut [f64], visit: &mut impl FnMut(&[f64])) {
    let n = items.len();
    let mut counters = vec![0usize; n];
    visit(items);
    let mut i = 0;
    while i < n {
        if counters[i] < i {
            if i % 2 == 0 {
                items.swap(0, i);
            } else {
                items.swap(counters[i], i);
            }
            visit(items);
            counters[i] += 1;
            i = 0;
        } else {
            counters[i] = 0;
            i += 1;
        }
    }
}
