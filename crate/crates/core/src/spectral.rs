//! Adjacency eigenvalues and the largest-eigenvalue estimators.
//!
//! `lambda1` runs power iteration on `A + cI` with `c` the maximum degree,
//! which makes every eigenvalue of the iteration matrix nonnegative so the
//! Perron root dominates without sign oscillation. `lambda2` deflates the
//! converged top eigenvector and runs Lanczos with full
//! reorthogonalization on the complement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_ITER: usize = 100_000;
/// Lower end of the admissible exponent range for the density window.
pub const DEFAULT_REGIME_BETA: f64 = 6.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Converged when `||Ax - lambda x|| <= tol * max(1, |lambda|)`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
        }
    }
}

impl SolverOptions {
    pub fn with_tol(tol: f64) -> Self {
        SolverOptions {
            tol,
            ..Default::default()
        }
    }
}

/// Compressed adjacency lists, built once per graph for repeated products.
#[derive(Clone, Debug)]
pub struct AdjacencyOperator {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl AdjacencyOperator {
    pub fn new(g: &Graph) -> Self {
        let n = g.n();
        let mut offsets = Vec::with_capacity(n + 1);
        let mut targets = Vec::with_capacity(2 * g.edge_count());
        offsets.push(0);
        for i in 0..n {
            targets.extend(g.neighbors(i).map(|j| j as u32));
            offsets.push(targets.len());
        }
        AdjacencyOperator { offsets, targets }
    }

    pub fn n(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn degree(&self, i: usize) -> usize {
        self.offsets[i + 1] - self.offsets[i]
    }

    pub fn max_degree(&self) -> usize {
        (0..self.n()).map(|i| self.degree(i)).max().unwrap_or(0)
    }

    /// `y = A x`
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let row = &self.targets[self.offsets[i]..self.offsets[i + 1]];
            *yi = row.iter().map(|&j| x[j as usize]).sum();
        }
    }
}

#[inline]
fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Converged (or best) top eigenpair of the adjacency matrix.
#[derive(Clone, Debug)]
pub struct TopEigenpair {
    pub value: f64,
    /// Unit norm, nonnegative entries.
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    pub converged: bool,
}

impl TopEigenpair {
    pub fn into_result(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                residual: self.residual,
                estimate: self.value,
            })
        }
    }
}

fn start_vector(n: usize) -> Vec<f64> {
    let mut x = vec![1.0; n];
    if n > 0 {
        x[0] += 0.5;
    }
    let s = norm(&x);
    x.iter_mut().for_each(|v| *v /= s);
    x
}

pub fn top_eigenpair_op(op: &AdjacencyOperator, opts: SolverOptions) -> TopEigenpair {
    let n = op.n();
    let mut x = start_vector(n);
    let shift = op.max_degree() as f64;
    if shift == 0.0 {
        return TopEigenpair {
            value: 0.0,
            vector: x,
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let mut ax = vec![0.0; n];
    let mut best = (f64::INFINITY, 0.0, x.clone());
    for it in 1..=opts.max_iter {
        op.apply(&x, &mut ax);
        let lambda = dot(&x, &ax);
        let res = ax.iter().zip(&x).map(|(a, v)| (a - lambda * v).powi(2)).sum::<f64>().sqrt();
        if res <= opts.tol * lambda.abs().max(1.0) {
            return TopEigenpair {
                value: lambda,
                vector: x,
                iterations: it,
                residual: res,
                converged: true,
            };
        }
        if res < best.0 {
            best = (res, lambda, x.clone());
        }
        for (a, v) in ax.iter_mut().zip(&x) {
            *a += shift * v;
        }
        let s = norm(&ax);
        for (v, a) in x.iter_mut().zip(&ax) {
            *v = a / s;
        }
    }
    TopEigenpair {
        value: best.1,
        vector: best.2,
        iterations: opts.max_iter,
        residual: best.0,
        converged: false,
    }
}

pub fn top_eigenpair(g: &Graph, opts: SolverOptions) -> TopEigenpair {
    top_eigenpair_op(&AdjacencyOperator::new(g), opts)
}

/// Largest adjacency eigenvalue.
pub fn lambda1(g: &Graph, tol: f64) -> Result<f64> {
    top_eigenpair(g, SolverOptions::with_tol(tol)).into_result().map(|t| t.value)
}

#[derive(Clone, Debug)]
pub struct SecondEigenvalue {
    pub value: f64,
    pub iterations: usize,
    /// Ritz residual bound `|beta_k s_k|`.
    pub residual: f64,
    pub converged: bool,
}

/// Largest eigenvalue of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off`, together with the last component of its
/// unit eigenvector. Implicit QL with Wilkinson shifts; only the last row
/// of the eigenvector matrix is accumulated.
fn tridiagonal_top(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = vec![0.0; n];
    e[..n - 1].copy_from_slice(&off[..n - 1]);
    let mut z = vec![0.0; n];
    z[n - 1] = 1.0;

    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 200 {
                break;
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    let (k, &top) = d
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("nonempty");
    (top, z[k])
}

fn pseudo_random_unit(n: usize, salt: u64) -> Vec<f64> {
    let mut state = 0x2545_f491_4f6c_dd1d ^ salt;
    (0..n)
        .map(|_| {
            state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
            z ^= z >> 31;
            (z >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        })
        .collect()
}

/// Second-largest eigenvalue, given the converged top eigenvector.
pub fn second_eigenvalue_op(op: &AdjacencyOperator, top: &TopEigenpair, opts: SolverOptions) -> Result<SecondEigenvalue> {
    let n = op.n();
    if n < 2 {
        return Err(Error::OutOfRange("second eigenvalue needs n >= 2".into()));
    }
    let u = &top.vector;
    let dim = n - 1;
    let steps = opts.max_iter.min(dim).max(1);
    let scale = top.value.abs().max(1.0);

    let project = |w: &mut Vec<f64>, basis: &[Vec<f64>]| {
        for _ in 0..2 {
            let cu = dot(u, w);
            axpy(-cu, u, w);
            for q in basis {
                let c = dot(q, w);
                axpy(-c, q, w);
            }
        }
    };

    let mut basis: Vec<Vec<f64>> = Vec::new();
    let mut q = pseudo_random_unit(n, 0);
    project(&mut q, &basis);
    let s = norm(&q);
    q.iter_mut().for_each(|v| *v /= s);

    let mut alpha = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![0.0; n];
    let mut estimate = (f64::NAN, f64::INFINITY);
    for k in 0..steps {
        op.apply(&q, &mut w);
        let a = dot(&q, &w);
        alpha.push(a);
        basis.push(std::mem::take(&mut q));
        let mut next = w.clone();
        project(&mut next, &basis);
        let b = norm(&next);
        let breakdown = b <= 1e-12 * scale;
        let done = breakdown || k + 1 == steps;
        if done || k % 5 == 4 {
            let mut off = beta.clone();
            off.push(0.0);
            let (theta, last) = tridiagonal_top(&alpha, &off);
            let res = if breakdown { 0.0 } else { (b * last).abs() };
            estimate = (theta, res);
            if res <= opts.tol * theta.abs().max(1.0) || breakdown {
                return Ok(SecondEigenvalue {
                    value: theta,
                    iterations: k + 1,
                    residual: res,
                    converged: true,
                });
            }
        }
        if done {
            break;
        }
        beta.push(b);
        q = next.into_iter().map(|v| v / b).collect();
    }
    // a full Krylov basis of the complement is exact
    let converged = basis.len() == dim;
    Ok(SecondEigenvalue {
        value: estimate.0,
        iterations: basis.len(),
        residual: estimate.1,
        converged,
    })
}

/// Second-largest adjacency eigenvalue.
pub fn lambda2(g: &Graph, tol: f64) -> Result<f64> {
    let op = AdjacencyOperator::new(g);
    let opts = SolverOptions::with_tol(tol);
    let top = top_eigenpair_op(&op, SolverOptions::with_tol(tol.min(DEFAULT_TOL))).into_result()?;
    let second = second_eigenvalue_op(&op, &top, opts)?;
    if !second.converged {
        return Err(Error::NotConverged {
            iterations: second.iterations,
            residual: second.residual,
            estimate: second.value,
        });
    }
    Ok(second.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FkPrediction {
    /// `(n-1)p + (1-p)`
    pub value: f64,
    /// Order of the correction, `(1-p)^{3/2} / (q sqrt((n-1)p))`.
    pub error_scale: f64,
    /// Whether `p` lies in the density window for the default exponent.
    pub in_regime: bool,
}

/// `n^{-1} (log n)^beta <= p < 1 - n^{-1} (log n)^beta`
pub fn in_density_window(n: usize, p: f64, beta: f64) -> bool {
    let nf = n as f64;
    let edge = nf.ln().powf(beta) / nf;
    edge <= p && p < 1.0 - edge
}

pub fn fk_prediction(n: usize, p: f64) -> FkPrediction {
    let m = (n as f64 - 1.0).max(0.0);
    let value = m * p + (1.0 - p);
    // q uses the sparse-side form unless the complement is the sparser graph
    let q = (m * p.min(1.0 - p)).sqrt();
    let error_scale = if p >= 1.0 {
        0.0
    } else {
        (1.0 - p).powf(1.5) / (q * (m * p).sqrt())
    };
    FkPrediction {
        value,
        error_scale,
        in_regime: in_density_window(n, p, DEFAULT_REGIME_BETA),
    }
}

/// `sum K_i^2 / sum K_i`
pub fn degree_ratio(g: &Graph) -> Result<f64> {
    let k = g.degrees();
    let total = k.total();
    if total == 0 {
        return Err(Error::EmptyGraph);
    }
    Ok(k.sum_of_squares() / total as f64)
}

/// Split of the all-ones vector along the top eigenvector,
/// `1 = v1 + r` with `<v1, r> = 0`.
#[derive(Clone, Debug)]
pub struct ResidualDecomposition {
    pub lambda1: f64,
    pub v1: Vec<f64>,
    pub r: Vec<f64>,
    pub r_norm2: f64,
    pub ar_norm2: f64,
    /// `<r, A r>`
    pub cross: f64,
    /// `(||Ar||^2 - lambda1 <r, Ar>) / sum K_i`, equal to `degree_ratio - lambda1`.
    pub residual: f64,
}

pub fn residual_decomposition_op(op: &AdjacencyOperator, top: &TopEigenpair) -> Result<ResidualDecomposition> {
    let n = op.n();
    let total: usize = (0..n).map(|i| op.degree(i)).sum();
    if total == 0 {
        return Err(Error::EmptyGraph);
    }
    let v = &top.vector;
    let c: f64 = v.iter().sum();
    let v1: Vec<f64> = v.iter().map(|x| c * x).collect();
    let r: Vec<f64> = v1.iter().map(|x| 1.0 - x).collect();
    let mut ar = vec![0.0; n];
    op.apply(&r, &mut ar);
    let r_norm2 = dot(&r, &r);
    let ar_norm2 = dot(&ar, &ar);
    let cross = dot(&r, &ar);
    let residual = (ar_norm2 - top.value * cross) / total as f64;
    Ok(ResidualDecomposition {
        lambda1: top.value,
        v1,
        r,
        r_norm2,
        ar_norm2,
        cross,
        residual,
    })
}

pub fn residual_decomposition(g: &Graph, tol: f64) -> Result<ResidualDecomposition> {
    if g.edge_count() == 0 {
        return Err(Error::EmptyGraph);
    }
    let op = AdjacencyOperator::new(g);
    let top = top_eigenpair_op(&op, SolverOptions::with_tol(tol)).into_result()?;
    residual_decomposition_op(&op, &top)
}

/// First two moments `<e, X e>` and `<e, X^2 e>` of the centred, normalized
/// matrix `X = (A + pI - pJ) / sqrt(np(1-p))`, with `e` the unit all-ones
/// vector. `X` has zero diagonal and off-diagonal entries `(a_ij - p)/s`.
pub fn expansion_moments(g: &Graph, p: f64) -> (f64, f64) {
    let n = g.n() as f64;
    let scale = (n * p * (1.0 - p)).sqrt();
    let base = (n - 1.0) * p;
    // (X e)_i = (K_i - (n-1)p) / (scale sqrt(n))
    let xe: Vec<f64> = (0..g.n())
        .map(|i| (g.degree(i) as f64 - base) / (scale * n.sqrt()))
        .collect();
    let m1 = xe.iter().sum::<f64>() / n.sqrt();
    let m2 = dot(&xe, &xe);
    (m1, m2)
}

/// Series estimate of `lambda1` from the moment expansion around the mean
/// matrix, truncated after order `k_max`.
///
/// In normalized units, with `s = sqrt(np/(1-p))`, `m1 = <e,Xe>` and
/// `m2 = <e,X^2 e>`:
/// `s + m1 + (m2 - m1^2)/s + (m1^3 - 3 m1 m2)/s^2`. The result is scaled
/// back by `sqrt(np(1-p))` and the restored diagonal `p` is removed.
pub fn expansion_estimate(g: &Graph, p: f64, k_max: usize) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::OutOfRange(format!("expansion needs 0 < p < 1, got {p}")));
    }
    if k_max > 3 {
        return Err(Error::OutOfRange(format!("k_max must be in 0..=3, got {k_max}")));
    }
    let n = g.n() as f64;
    let s = (n * p / (1.0 - p)).sqrt();
    let scale = (n * p * (1.0 - p)).sqrt();
    let (m1, m2) = expansion_moments(g, p);
    let terms = [s, m1, (m2 - m1 * m1) / s, (m1.powi(3) - 3.0 * m1 * m2) / (s * s)];
    let lambda: f64 = terms[..=k_max].iter().sum();
    Ok(scale * lambda - p)
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub lambda1: f64,
    pub lambda2: f64,
    pub degree_ratio: Option<f64>,
    pub fk_prediction: f64,
    /// `degree_ratio - lambda1`
    pub residual: Option<f64>,
    pub iterations: usize,
    pub tol_achieved: f64,
}

/// Everything the spectral module computes for one graph; `p` feeds the
/// Füredi–Komlós prediction.
pub fn summarize(g: &Graph, p: f64, opts: SolverOptions) -> Result<SpectralSummary> {
    let op = AdjacencyOperator::new(g);
    let top = top_eigenpair_op(&op, opts).into_result()?;
    let lambda2 = if g.n() >= 2 {
        let s = second_eigenvalue_op(&op, &top, opts)?;
        if !s.converged {
            return Err(Error::NotConverged {
                iterations: s.iterations,
                residual: s.residual,
                estimate: s.value,
            });
        }
        s.value
    } else {
        f64::NEG_INFINITY
    };
    let residual = match residual_decomposition_op(&op, &top) {
        Ok(d) => Some(d.residual),
        Err(Error::EmptyGraph) => None,
        Err(e) => return Err(e),
    };
    Ok(SpectralSummary {
        lambda1: top.value,
        lambda2,
        degree_ratio: degree_ratio(g).ok(),
        fk_prediction: fk_prediction(g.n(), p).value,
        residual,
        iterations: top.iterations,
        tol_achieved: top.residual / top.value.abs().max(1.0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn star(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|j| (0, j))).unwrap()
    }

    fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i.min((i + 1) % n), i.max((i + 1) % n)))).unwrap()
    }

    #[test]
    fn lambda1_examples() {
        for n in 2..12 {
            assert!((lambda1(&Graph::complete(n), 1e-12).unwrap() - (n - 1) as f64).abs() < 1e-9);
        }
        assert!((lambda1(&star(4), 1e-12).unwrap() - 3f64.sqrt()).abs() < 1e-9);
        assert_eq!(lambda1(&Graph::empty(5), 1e-10).unwrap(), 0.0);
        // 2-regular, 3-regular (prism), and a disconnected 2-regular graph
        assert!((lambda1(&cycle(7), 1e-12).unwrap() - 2.0).abs() < 1e-9);
        let prism = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (0, 3), (1, 4), (2, 5)]).unwrap();
        assert!((lambda1(&prism, 1e-12).unwrap() - 3.0).abs() < 1e-9);
        let two_triangles = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!((lambda1(&two_triangles, 1e-12).unwrap() - 2.0).abs() < 1e-9);
    }

    #[test]
    fn lambda2_examples() {
        assert!((lambda2(&Graph::complete(4), 1e-12).unwrap() + 1.0).abs() < 1e-9);
        assert!(lambda2(&cycle(4), 1e-12).unwrap().abs() < 1e-9);
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert!(lambda2(&path, 1e-12).unwrap().abs() < 1e-9);
        let two_triangles = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]).unwrap();
        assert!((lambda2(&two_triangles, 1e-12).unwrap() - 2.0).abs() < 1e-9);
        assert_eq!(lambda2(&Graph::empty(3), 1e-12).unwrap(), 0.0);
        assert!(lambda2(&Graph::empty(1), 1e-12).is_err());
    }

    #[test]
    fn tridiagonal_top_matches_closed_form() {
        // path graph P_m: eigenvalues 2cos(k pi/(m+1))
        for m in 1..30 {
            let (top, last) = tridiagonal_top(&vec![0.0; m], &vec![1.0; m.saturating_sub(1)]);
            let expect = 2.0 * (std::f64::consts::PI / (m + 1) as f64).cos();
            assert!((top - expect).abs() < 1e-12, "m = {m}");
            // eigenvector sin(k j pi/(m+1)), normalized
            let norm: f64 = (1..=m).map(|j| (j as f64 * std::f64::consts::PI / (m + 1) as f64).sin().powi(2)).sum::<f64>().sqrt();
            let expect_last = (m as f64 * std::f64::consts::PI / (m + 1) as f64).sin() / norm;
            assert!((last.abs() - expect_last).abs() < 1e-10, "m = {m}");
        }
    }

    #[test]
    fn fk_examples() {
        assert_eq!(fk_prediction(1000, 0.5).value, 500.0);
        assert!((fk_prediction(100, 0.2).value - 20.6).abs() < 1e-12);
        assert_eq!(fk_prediction(17, 1.0).value, 16.0);
        assert_eq!(fk_prediction(17, 1.0).error_scale, 0.0);
        assert!(!fk_prediction(1000, 0.5).in_regime);
        assert!(in_density_window(1000, 0.5, 1.0));
        assert!(!in_density_window(1000, 0.001, 1.0));
    }

    #[test]
    fn degree_ratio_examples() {
        assert_eq!(degree_ratio(&cycle(9)).unwrap(), 2.0);
        assert_eq!(degree_ratio(&star(4)).unwrap(), 2.0);
        assert!(matches!(degree_ratio(&Graph::empty(4)), Err(Error::EmptyGraph)));
    }

    #[test]
    fn residual_examples() {
        let d = residual_decomposition(&cycle(8), 1e-12).unwrap();
        assert!(d.residual.abs() < 1e-12 && d.r_norm2 < 1e-20);
        let d = residual_decomposition(&star(4), 1e-12).unwrap();
        assert!((d.residual - (2.0 - 3f64.sqrt())).abs() < 1e-10);
        // explicit Perron vector of the star: (sqrt 3, 1, 1, 1)/sqrt 6
        let c = (3f64.sqrt() + 3.0) / 6f64.sqrt();
        let v1_expect = [c * 3f64.sqrt() / 6f64.sqrt(), c / 6f64.sqrt(), c / 6f64.sqrt(), c / 6f64.sqrt()];
        for (a, b) in d.v1.iter().zip(v1_expect) {
            assert!((a - b).abs() < 1e-9);
        }
        let inner: f64 = d.v1.iter().zip(&d.r).map(|(a, b)| a * b).sum();
        assert!(inner.abs() < 1e-10);
        assert!((d.v1.iter().map(|x| x * x).sum::<f64>() + d.r_norm2 - 4.0).abs() < 1e-8);
    }

    #[test]
    fn expansion_leading_term() {
        let g = cycle(100);
        let est = expansion_estimate(&g, 0.5, 0).unwrap();
        assert!((est - 49.5).abs() < 1e-10);
        assert!(expansion_estimate(&g, 0.0, 1).is_err());
        assert!(expansion_estimate(&g, 0.5, 4).is_err());
    }

    #[test]
    fn first_moment_matches_double_sum() {
        let g = Graph::from_edges(7, [(0, 1), (0, 2), (1, 3), (2, 3), (4, 5), (5, 6), (0, 6), (3, 6)]).unwrap();
        for p in [0.1, 0.37, 0.5, 0.9] {
            let n = 7.0f64;
            let mut s = 0.0;
            for i in 0..7 {
                for j in 0..7 {
                    if i != j {
                        s += if g.has_edge(i, j) { 1.0 } else { 0.0 } - p;
                    }
                }
            }
            let oracle = s / (n * (n * p * (1.0 - p)).sqrt());
            let (m1, _) = expansion_moments(&g, p);
            assert!((m1 - oracle).abs() < 1e-12);
        }
    }

    #[test]
    fn summary_on_k5() {
        let s = summarize(&Graph::complete(5), 1.0, SolverOptions::default()).unwrap();
        assert!((s.lambda1 - 4.0).abs() < 1e-9 && (s.lambda2 + 1.0).abs() < 1e-9);
        assert_eq!(s.degree_ratio, Some(4.0));
        assert_eq!(s.fk_prediction, 4.0);
        assert!(s.residual.unwrap().abs() < 1e-9);
        let s = summarize(&Graph::empty(3), 0.0, SolverOptions::default()).unwrap();
        assert_eq!((s.lambda1, s.degree_ratio), (0.0, None));
    }
}
