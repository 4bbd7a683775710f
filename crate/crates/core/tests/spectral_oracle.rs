//! Power iteration and Lanczos against a dense symmetric eigensolver.

use ensemble_spectra::ensembles::{calibrate, sample_canonical};
use ensemble_spectra::graph::pair_count;
use ensemble_spectra::spectral::{degree_ratio, expansion_estimate, lambda1, lambda2, residual_decomposition};
use ensemble_spectra::{ConstraintSpec, Graph};
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn dense(g: &Graph) -> DMatrix<f64> {
    let n = g.n();
    DMatrix::from_fn(n, n, |i, j| if i != j && g.has_edge(i, j) { 1.0 } else { 0.0 })
}

/// Eigenvalues in decreasing order.
fn spectrum(g: &Graph) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(dense(g)).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| b.partial_cmp(a).unwrap());
    ev
}

fn check(g: &Graph) {
    let ev = spectrum(g);
    let l1 = lambda1(g, 1e-12).unwrap();
    assert!((l1 - ev[0]).abs() <= 1e-8, "lambda1 {l1} vs {} on {g:?}", ev[0]);
    if g.n() >= 2 {
        let l2 = lambda2(g, 1e-10).unwrap();
        assert!((l2 - ev[1]).abs() <= 1e-8, "lambda2 {l2} vs {} on {g:?}", ev[1]);
    }
}

#[test]
fn exhaustive_up_to_five_vertices() {
    for n in 1..=5 {
        for mask in 0..1u64 << pair_count(n) {
            check(&Graph::from_pair_mask(n, mask));
        }
    }
}

#[test]
fn sampled_six_to_eight_vertices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in 6..=8 {
        for _ in 0..1500 {
            let mask = rng.gen::<u64>() & ((1u64 << pair_count(n)) - 1);
            check(&Graph::from_pair_mask(n, mask));
        }
    }
}

#[test]
fn disconnected_regular_components() {
    // two disjoint triangles: lambda1 = lambda2 = 2
    let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
    check(&g);
    // K4 plus an isolated edge
    let g = Graph::from_edges(6, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3), (4, 5)]).unwrap();
    check(&g);
}

#[test]
fn residual_identity_against_dense_eigenvector() {
    let model = calibrate(&ConstraintSpec::edge_count(50, pair_count(50) / 2)).unwrap();
    for seed in 0..5 {
        let g = sample_canonical(&model, seed);
        let eig = SymmetricEigen::new(dense(&g));
        let top = (0..50)
            .max_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap())
            .unwrap();
        let lambda = eig.eigenvalues[top];
        let v = eig.eigenvectors.column(top);
        // 1 = c v + r with r orthogonal to v; ratio - lambda = (|Ar|^2 - lambda <r, Ar>) / sum K
        let c: f64 = v.iter().sum();
        let r: Vec<f64> = v.iter().map(|x| 1.0 - c * x).collect();
        let a = dense(&g);
        let rv = nalgebra::DVector::from_vec(r);
        let ar = &a * &rv;
        let total: f64 = (0..50).map(|i| g.degree(i) as f64).sum();
        let oracle = (ar.norm_squared() - lambda * rv.dot(&ar)) / total;

        let dec = residual_decomposition(&g, 1e-12).unwrap();
        let ratio = degree_ratio(&g).unwrap();
        assert!((dec.lambda1 - lambda).abs() <= 1e-9);
        assert!((dec.residual - oracle).abs() <= 1e-9, "{} vs {oracle}", dec.residual);
        assert!((ratio - dec.lambda1 - dec.residual).abs() <= 1e-9);
        assert!((ratio - lambda - oracle).abs() <= 1e-9);
    }
}

#[test]
fn star_residual_matches_explicit_eigenvector() {
    let g = Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)]).unwrap();
    let dec = residual_decomposition(&g, 1e-13).unwrap();
    assert!((dec.residual - (2.0 - 3f64.sqrt())).abs() < 1e-10);
}

#[test]
fn expansion_tracks_lambda1_at_n2000() {
    let n = 2000;
    let model = calibrate(&ConstraintSpec::edge_count(n, pair_count(n) / 2)).unwrap();
    let samples = 100;
    let close = (0..samples)
        .filter(|&s| {
            let g = sample_canonical(&model, 1000 + s);
            let est = expansion_estimate(&g, 0.5, 3).unwrap();
            (est - lambda1(&g, 1e-10).unwrap()).abs() <= 0.1
        })
        .count();
    assert!(close * 100 >= 95 * samples as usize, "{close}/{samples} within 0.1");
}
