use encyclodiff::features::{editor_fraction, gini_index};
use encyclodiff::stats::{average_ranks, spearman, spearman_with, PValueMethod};
use proptest::prelude::*;

fn gini_oracle(x: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let mut total = 0.0;
    for a in x {
        for b in x {
            total += (a - b).abs();
        }
    }
    total / (2.0 * n * n * mean)
}

fn ranks_oracle(x: &[f64]) -> Vec<f64> {
    // rank = 1 + #smaller + (#equal − 1)/2
    x.iter()
        .map(|v| {
            let smaller = x.iter().filter(|w| *w < v).count() as f64;
            let equal = x.iter().filter(|w| *w == v).count() as f64;
            1.0 + smaller + (equal - 1.0) / 2.0
        })
        .collect()
}

fn pearson_oracle(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let cov: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}

#[test]
fn gini_fixed_values() {
    assert_eq!(gini_index(&[5.0; 4]).unwrap(), 0.0);
    let mut one = vec![0.0; 10];
    one[3] = 1.0;
    assert!((gini_index(&one).unwrap() - 0.9).abs() < 1e-15);
    let g = gini_index(&[1.0, 2.0, 3.0, 4.0]).unwrap();
    assert!((g - gini_oracle(&[1.0, 2.0, 3.0, 4.0])).abs() < 1e-12);
    assert!((g - 0.25).abs() < 1e-12);
}

#[test]
fn gini_errors() {
    assert!(gini_index(&[]).is_err());
    assert!(gini_index(&[0.0, 0.0]).is_err());
    assert!(gini_index(&[1.0, -1.0]).is_err());
}

#[test]
fn editor_fraction_values() {
    assert_eq!(editor_fraction(["a", "b", "c"], 3).unwrap(), 1.0);
    assert_eq!(editor_fraction(Vec::<&str>::new(), 3).unwrap(), 0.0);
    assert_eq!(editor_fraction(["a", "b", "c", "d", "e", "a"], 50).unwrap(), 0.1);
    assert!(editor_fraction(["a"], 0).is_err());
}

#[test]
fn spearman_fixed_values() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0];
    assert_eq!(spearman(&x, &x).unwrap().rho, 1.0);
    let rev: Vec<f64> = x.iter().rev().copied().collect();
    let r = spearman(&x, &rev).unwrap();
    assert_eq!(r.rho, -1.0);
    assert!((r.p_value - 2.0 / 120.0).abs() < 1e-15);
    assert!(spearman(&[1.0, 1.0, 1.0], &[1.0, 2.0, 3.0]).is_err());
    assert!(spearman(&[1.0, 2.0], &[1.0]).is_err());
}

#[test]
fn spearman_eight_with_tie() {
    let x = [3.0, 1.0, 4.0, 1.0, 5.0, 9.0, 2.0, 6.0];
    let y = [2.0, 7.0, 1.0, 8.0, 2.5, 8.5, 4.0, 5.0];
    let expected = pearson_oracle(&ranks_oracle(&x), &ranks_oracle(&y));
    let r = spearman(&x, &y).unwrap();
    assert!((r.rho - expected).abs() < 1e-12, "{} vs {expected}", r.rho);
    assert_eq!(r.n, 8);
}

#[test]
fn exact_p_matches_enumeration() {
    let x = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0];
    let y = [2.0, 1.0, 4.0, 3.0, 6.0, 5.0];
    let rho = pearson_oracle(&x, &y);
    // enumerate all 720 permutations of y's ranks
    let mut perm: Vec<f64> = y.to_vec();
    let mut hits = 0usize;
    let mut total = 0usize;
    permute(&mut perm, 0, &mut |p| {
        total += 1;
        if pearson_oracle(&x, p).abs() >= rho.abs() - 1e-12 {
            hits += 1;
        }
    });
    let r = spearman_with(&x, &y, PValueMethod::Exact).unwrap();
    assert!((r.p_value - hits as f64 / total as f64).abs() < 1e-12);
}

fn permute(v: &mut Vec<f64>, k: usize, f: &mut impl FnMut(&[f64])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

proptest! {
    #[test]
    fn gini_matches_pairwise_oracle(v in prop::collection::vec(0u32..1000, 1..40)) {
        let v: Vec<f64> = v.into_iter().map(f64::from).collect();
        prop_assume!(v.iter().any(|x| *x > 0.0));
        let g = gini_index(&v).unwrap();
        prop_assert!((g - gini_oracle(&v)).abs() < 1e-12);
        prop_assert!((0.0..1.0).contains(&g));
    }

    #[test]
    fn ranks_match_oracle(v in prop::collection::vec(0u8..8, 1..30)) {
        let v: Vec<f64> = v.into_iter().map(f64::from).collect();
        prop_assert_eq!(average_ranks(&v), ranks_oracle(&v));
    }

    #[test]
    fn spearman_matches_rank_pearson(pairs in prop::collection::vec((0u8..20, 0u8..20), 3..40)) {
        let x: Vec<f64> = pairs.iter().map(|p| f64::from(p.0)).collect();
        let y: Vec<f64> = pairs.iter().map(|p| f64::from(p.1)).collect();
        prop_assume!(x.iter().any(|a| *a != x[0]) && y.iter().any(|b| *b != y[0]));
        let r = spearman(&x, &y).unwrap();
        prop_assert!((r.rho - pearson_oracle(&ranks_oracle(&x), &ranks_oracle(&y))).abs() < 1e-12);
        prop_assert!((-1.0..=1.0).contains(&r.rho));
        prop_assert!((0.0..=1.0).contains(&r.p_value));
        let s = spearman(&y, &x).unwrap();
        prop_assert!((r.rho - s.rho).abs() < 1e-12);
    }
}
