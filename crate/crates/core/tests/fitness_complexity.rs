use std::collections::{BTreeMap, BTreeSet};

use encyclodiff::complexity::{
    build_bipartite, fitness_complexity, fitness_complexity_step, rank_delta, BipartiteMatrix, EditEvent,
};
use proptest::prelude::*;
use rand::Rng;

/// Dense, independently written recursion: F = M·Q, Q = 1 / (Mᵀ·(1/F)),
/// each divided by its mean, starting from ones.
fn oracle(m: &[Vec<bool>], iterations: usize) -> (Vec<f64>, Vec<f64>) {
    let (ne, np) = (m.len(), m[0].len());
    let mut f = vec![1.0; ne];
    let mut q = vec![1.0; np];
    for _ in 0..iterations {
        let mut f2 = vec![0.0; ne];
        let mut q2 = vec![0.0; np];
        for e in 0..ne {
            for p in 0..np {
                if m[e][p] {
                    f2[e] += q[p];
                    q2[p] += 1.0 / f[e];
                }
            }
        }
        let q2: Vec<f64> = q2.iter().map(|s| 1.0 / s).collect();
        let mf = f2.iter().sum::<f64>() / ne as f64;
        let mq = q2.iter().sum::<f64>() / np as f64;
        f = f2.iter().map(|x| x / mf).collect();
        q = q2.iter().map(|x| x / mq).collect();
    }
    (f, q)
}

fn dense(rows: &[&[u8]]) -> Vec<Vec<bool>> {
    rows.iter().map(|r| r.iter().map(|&b| b == 1).collect()).collect()
}

#[test]
fn single_node() {
    let m = BipartiteMatrix::from_dense(&dense(&[&[1]])).unwrap();
    let r = fitness_complexity(&m, 1e-12, 100).unwrap();
    assert_eq!((r.fitness.clone(), r.complexity.clone()), (vec![1.0], vec![1.0]));
    assert!(r.converged);
}

#[test]
fn identity_is_symmetric() {
    let m = BipartiteMatrix::from_dense(&dense(&[&[1, 0], &[0, 1]])).unwrap();
    let r = fitness_complexity(&m, 1e-12, 100).unwrap();
    assert_eq!(r.fitness, vec![1.0, 1.0]);
    assert_eq!(r.complexity, vec![1.0, 1.0]);
}

#[test]
fn triangular_ordering() {
    // editor A edits both pages, editor B only page 2
    let rows = dense(&[&[1, 1], &[0, 1]]);
    let m = BipartiteMatrix::from_dense(&rows).unwrap();
    let r = fitness_complexity(&m, 0.0, 200).unwrap();
    assert!(r.complexity[0] > r.complexity[1]);
    assert!(r.fitness[0] > r.fitness[1]);
    let (of, oq) = oracle(&rows, r.iterations);
    for (a, b) in r.fitness.iter().chain(&r.complexity).zip(of.iter().chain(&oq)) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn fixed_point_residual_below_tolerance() {
    let rows = dense(&[&[1, 1, 0, 1], &[1, 0, 1, 0], &[0, 1, 1, 1], &[1, 0, 0, 1]]);
    let m = BipartiteMatrix::from_dense(&rows).unwrap();
    let tol = 1e-10;
    let r = fitness_complexity(&m, tol, 10_000).unwrap();
    assert!(r.converged);
    let (f, q) = fitness_complexity_step(&m, &r.fitness, &r.complexity).unwrap();
    let residual = f.iter().zip(&r.fitness).chain(q.iter().zip(&r.complexity)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(residual < tol, "{residual}");
}

#[test]
fn empty_and_zero_lines_rejected() {
    assert!(build_bipartite(&[], &BTreeSet::new()).is_err());
    let m = BipartiteMatrix::from_dense(&dense(&[&[1, 0], &[1, 0]])).unwrap();
    assert!(m.has_empty_lines());
    assert!(fitness_complexity(&m, 1e-9, 10).is_err());
}

#[test]
fn incidence_from_three_editor_fixture() {
    let events = [
        EditEvent::new("P1", "alice"),
        EditEvent::new("P1", "bob"),
        EditEvent::new("P2", "bob"),
        EditEvent::new("P2", "carol"),
        EditEvent::new("P2", "carol"),
    ];
    let eligible: BTreeSet<String> = ["P1", "P2"].iter().map(|s| s.to_string()).collect();
    let m = build_bipartite(&events, &eligible).unwrap();
    assert_eq!(m.editors(), ["alice", "bob", "carol"]);
    assert_eq!(m.pages(), ["P1", "P2"]);
    let got: Vec<Vec<bool>> = (0..3).map(|e| (0..2).map(|p| m.get(e, p)).collect()).collect();
    assert_eq!(got, dense(&[&[1, 0], &[1, 1], &[0, 1]]));
}

fn map(pairs: &[(&str, f64)]) -> BTreeMap<String, f64> {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[test]
fn rank_deltas() {
    let a = map(&[("x", 1.0), ("y", 2.0), ("z", 3.0)]);
    assert!(rank_delta(&a, &a).unwrap().iter().all(|d| d.delta == 0.0));
    let b = map(&[("x", 3.0), ("y", 2.0), ("z", 1.0)]);
    let d: Vec<f64> = rank_delta(&a, &b).unwrap().iter().map(|d| d.delta).collect();
    assert_eq!(d, vec![-2.0, 0.0, 2.0]);
    // one swap of the two middle pages
    let a = map(&[("p", 0.1), ("q", 0.5), ("r", 0.7), ("s", 0.9)]);
    let b = map(&[("p", 0.2), ("q", 0.8), ("r", 0.6), ("s", 1.5)]);
    let d: Vec<f64> = rank_delta(&a, &b).unwrap().iter().map(|d| d.delta).collect();
    assert_eq!(d, vec![0.0, -1.0, 1.0, 0.0]);
    assert!(rank_delta(&a, &map(&[("p", 1.0)])).is_err());
}

fn random_full_matrix(seed: u64) -> Vec<Vec<bool>> {
    let mut rng = encyclodiff::synth::seeded_rng(seed);
    loop {
        let m: Vec<Vec<bool>> = (0..10).map(|_| (0..10).map(|_| rng.random_bool(0.35)).collect()).collect();
        let rows_ok = m.iter().all(|r| r.iter().any(|&b| b));
        let cols_ok = (0..10).all(|j| m.iter().any(|r| r[j]));
        if rows_ok && cols_ok {
            return m;
        }
    }
}

#[test]
fn oracle_agreement_on_random_matrices() {
    for seed in 0..10 {
        let rows = random_full_matrix(seed);
        let m = BipartiteMatrix::from_dense(&rows).unwrap();
        let r = fitness_complexity(&m, 0.0, 200).unwrap();
        assert_eq!(r.iterations, 200);
        let (f, q) = oracle(&rows, 200);
        for (a, b) in r.fitness.iter().chain(&r.complexity).zip(f.iter().chain(&q)) {
            assert!((a - b).abs() < 1e-6, "seed {seed}: {a} vs {b}");
        }
    }
}

proptest! {
    #[test]
    fn outputs_positive_with_unit_mean(seed in 0u64..5000) {
        let rows = random_full_matrix(seed);
        let m = BipartiteMatrix::from_dense(&rows).unwrap();
        let r = fitness_complexity(&m, 1e-9, 300).unwrap();
        prop_assert!(r.fitness.iter().chain(&r.complexity).all(|x| *x > 0.0 && x.is_finite()));
        let mf = r.fitness.iter().sum::<f64>() / 10.0;
        let mq = r.complexity.iter().sum::<f64>() / 10.0;
        prop_assert!((mf - 1.0).abs() < 1e-9 && (mq - 1.0).abs() < 1e-9);
    }

    #[test]
    fn editor_permutation_invariant(seed in 0u64..5000) {
        let rows = random_full_matrix(seed);
        let mut flipped = rows.clone();
        flipped.reverse();
        let a = fitness_complexity(&BipartiteMatrix::from_dense(&rows).unwrap(), 0.0, 50).unwrap();
        let b = fitness_complexity(&BipartiteMatrix::from_dense(&flipped).unwrap(), 0.0, 50).unwrap();
        for (x, y) in a.complexity.iter().zip(&b.complexity) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }
}
