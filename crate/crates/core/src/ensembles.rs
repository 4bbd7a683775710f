//! Canonical and microcanonical graph ensembles.
//!
//! The canonical ensemble under either constraint family is an
//! independent-edge law: pair `{i, j}` is present with probability `p_ij`,
//! where the `p_ij` are chosen so the expected constraint equals the target.
//! The microcanonical ensemble is the uniform law on graphs meeting the
//! constraint exactly.

use rand::distributions::{Bernoulli, Distribution};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{is_graphical, pair_count, pair_index, pairs, ConstraintKind, ConstraintSpec, Graph};
use crate::rng::{rng_from_seed, StreamRng};

/// Tolerance on the expected-degree residual of the fixed-point solve.
pub const CALIBRATION_TOL: f64 = 1e-10;
/// Largest residual a calibrated model may carry.
pub const CALIBRATION_ACCEPT: f64 = 1e-8;
pub const CALIBRATION_MAX_ITER: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PairProbabilities {
    Homogeneous(f64),
    /// Indexed by [`pair_index`].
    PerPair(Vec<f64>),
}

/// Calibrated canonical ensemble.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CanonicalModel {
    pub n: usize,
    pub spec: ConstraintSpec,
    /// Lagrange multipliers: one entry for an edge-count constraint, one per
    /// vertex for a degree constraint. Boundary vertices carry `±inf`.
    pub theta_star: Vec<f64>,
    pub pair_prob: PairProbabilities,
    /// `max |E[C] - C*|` at the calibrated multipliers.
    pub residual: f64,
    pub iterations: usize,
}

impl CanonicalModel {
    #[inline]
    pub fn pair_prob(&self, i: usize, j: usize) -> f64 {
        if i == j {
            return 0.0;
        }
        match &self.pair_prob {
            PairProbabilities::Homogeneous(p) => *p,
            PairProbabilities::PerPair(v) => v[pair_index(self.n, i, j)],
        }
    }

    pub fn homogeneous_p(&self) -> Option<f64> {
        match self.pair_prob {
            PairProbabilities::Homogeneous(p) => Some(p),
            PairProbabilities::PerPair(_) => None,
        }
    }

    /// Per-edge mean `mu`; the average pair probability when heterogeneous.
    pub fn mu(&self) -> f64 {
        match &self.pair_prob {
            PairProbabilities::Homogeneous(p) => *p,
            PairProbabilities::PerPair(v) if v.is_empty() => 0.0,
            PairProbabilities::PerPair(v) => v.iter().sum::<f64>() / v.len() as f64,
        }
    }

    /// Per-edge variance `sigma^2 = p(1-p)`; averaged over pairs when heterogeneous.
    pub fn sigma2(&self) -> f64 {
        match &self.pair_prob {
            PairProbabilities::Homogeneous(p) => p * (1.0 - p),
            PairProbabilities::PerPair(v) if v.is_empty() => 0.0,
            PairProbabilities::PerPair(v) => v.iter().map(|p| p * (1.0 - p)).sum::<f64>() / v.len() as f64,
        }
    }

    /// Expected degree of every vertex under the model.
    pub fn expected_degrees(&self) -> Vec<f64> {
        let n = self.n;
        let mut out = vec![0.0; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let p = self.pair_prob(i, j);
                out[i] += p;
                out[j] += p;
            }
        }
        out
    }
}

/// Solves `E_can[C] = C*` for the canonical pair probabilities.
pub fn calibrate(spec: &ConstraintSpec) -> Result<CanonicalModel> {
    spec.validate()?;
    if !is_graphical(spec) {
        return Err(Error::NotGraphical);
    }
    let n = spec.n;
    let model = match &spec.kind {
        ConstraintKind::EdgeCount(l) => {
            let m = pair_count(n);
            let p = if m == 0 { 0.0 } else { *l as f64 / m as f64 };
            CanonicalModel {
                n,
                spec: spec.clone(),
                theta_star: vec![((1.0 - p) / p).ln()],
                pair_prob: PairProbabilities::Homogeneous(p),
                residual: (p * m as f64 - *l as f64).abs(),
                iterations: 0,
            }
        }
        ConstraintKind::DegreeSequence(d) => match d.constant_value() {
            Some(k) if n >= 2 => {
                let p = k as f64 / (n - 1) as f64;
                let theta = -0.5 * (p / (1.0 - p)).ln();
                CanonicalModel {
                    n,
                    spec: spec.clone(),
                    theta_star: vec![theta; n],
                    pair_prob: PairProbabilities::Homogeneous(p),
                    residual: ((n - 1) as f64 * p - k as f64).abs(),
                    iterations: 0,
                }
            }
            _ => calibrate_degrees(spec, d)?,
        },
    };
    if !(model.residual <= CALIBRATION_ACCEPT) {
        return Err(Error::CalibrationDiverged {
            iterations: model.iterations,
            residual: model.residual,
        });
    }
    Ok(model)
}

/// Soft configuration model: `p_ij = x_i x_j / (1 + x_i x_j)`.
///
/// Vertices whose residual degree is 0 or saturates the remaining vertices
/// get their pairs fixed to 0 or 1 first (their multipliers diverge), and
/// the fixed-point map runs on what is left.
fn calibrate_degrees(spec: &ConstraintSpec, degrees: &[usize]) -> Result<CanonicalModel> {
    let n = degrees.len();
    let mut prob = vec![f64::NAN; pair_count(n)];
    let mut theta = vec![0.0; n];
    let mut active: Vec<usize> = (0..n).collect();
    let mut rem: Vec<i64> = degrees.iter().map(|&k| k as i64).collect();

    loop {
        let m = active.len() as i64;
        let Some(pos) = active.iter().position(|&i| rem[i] == 0 || rem[i] == m - 1) else {
            break;
        };
        let i = active.swap_remove(pos);
        let full = rem[i] == m - 1 && rem[i] > 0;
        for &j in &active {
            prob[pair_index(n, i, j)] = if full { 1.0 } else { 0.0 };
            if full {
                rem[j] -= 1;
                if rem[j] < 0 {
                    return Err(Error::NotGraphical);
                }
            }
        }
        theta[i] = if full { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    active.sort_unstable();

    let mut iterations = 0;
    if !active.is_empty() {
        let target: Vec<f64> = active.iter().map(|&i| rem[i] as f64).collect();
        let (x, iters) = solve_fitness(&target)?;
        iterations = iters;
        for (a, &i) in active.iter().enumerate() {
            theta[i] = -x[a].ln();
            for (b, &j) in active.iter().enumerate().skip(a + 1) {
                let xx = x[a] * x[b];
                prob[pair_index(n, i, j)] = xx / (1.0 + xx);
            }
        }
    }

    let mut model = CanonicalModel {
        n,
        spec: spec.clone(),
        theta_star: theta,
        pair_prob: PairProbabilities::PerPair(prob),
        residual: 0.0,
        iterations,
    };
    model.residual = model
        .expected_degrees()
        .iter()
        .zip(degrees)
        .map(|(e, &k)| (e - k as f64).abs())
        .fold(0.0, f64::max);
    Ok(model)
}

fn fitness_residual(x: &[f64], target: &[f64]) -> f64 {
    let mut worst: f64 = 0.0;
    for (i, &xi) in x.iter().enumerate() {
        let s: f64 = x
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, &xj)| xi * xj / (1.0 + xi * xj))
            .sum();
        worst = worst.max((s - target[i]).abs());
    }
    worst
}

/// Fixed-point map `x_i <- k_i / sum_j x_j/(1 + x_i x_j)`, damped by 0.5
/// once the residual grows. Sequences on the boundary of the degree
/// polytope (some pair forced present or absent in every realization) only
/// converge at rate `1/k` under this map; when it stalls the solve switches
/// to Newton steps on `theta = -ln x`.
fn solve_fitness(target: &[f64]) -> Result<(Vec<f64>, usize)> {
    let total: f64 = target.iter().sum();
    let mut x: Vec<f64> = target.iter().map(|&k| k / total.sqrt()).collect();
    let mut next = vec![0.0; x.len()];
    let mut residual = fitness_residual(&x, target);
    let mut damping = 1.0;
    let mut checkpoint = residual;
    for iter in 1..=CALIBRATION_MAX_ITER {
        for (i, &xi) in x.iter().enumerate() {
            let denom: f64 = x
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &xj)| xj / (1.0 + xi * xj))
                .sum();
            let mapped = target[i] / denom;
            next[i] = damping * mapped + (1.0 - damping) * xi;
        }
        std::mem::swap(&mut x, &mut next);
        let r = fitness_residual(&x, target);
        if r <= CALIBRATION_TOL {
            return Ok((x, iter));
        }
        if !r.is_finite() {
            break;
        }
        if r > residual {
            damping = 0.5;
        }
        residual = r;
        if iter % 500 == 0 {
            // less than a factor 2 gained over 500 sweeps: sublinear regime
            if residual > 0.5 * checkpoint {
                return newton_fitness(target, &x, iter);
            }
            checkpoint = residual;
        }
    }
    Err(Error::CalibrationDiverged {
        iterations: CALIBRATION_MAX_ITER,
        residual,
    })
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Convex dual `F(theta) = sum_{i<j} ln(1 + e^{-theta_i - theta_j}) + sum_i theta_i k_i`.
fn dual_objective(theta: &[f64], target: &[f64]) -> f64 {
    let m = theta.len();
    let mut f: f64 = theta.iter().zip(target).map(|(t, k)| t * k).sum();
    for i in 0..m {
        for j in (i + 1)..m {
            f += softplus(-theta[i] - theta[j]);
        }
    }
    f
}

fn cholesky_solve(mut a: Vec<f64>, mut b: Vec<f64>, m: usize) -> Option<Vec<f64>> {
    for j in 0..m {
        let mut d = a[j * m + j];
        for k in 0..j {
            d -= a[j * m + k] * a[j * m + k];
        }
        if !(d > 0.0) {
            return None;
        }
        let d = d.sqrt();
        a[j * m + j] = d;
        for i in (j + 1)..m {
            let mut s = a[i * m + j];
            for k in 0..j {
                s -= a[i * m + k] * a[j * m + k];
            }
            a[i * m + j] = s / d;
        }
    }
    for i in 0..m {
        let mut s = b[i];
        for k in 0..i {
            s -= a[i * m + k] * b[k];
        }
        b[i] = s / a[i * m + i];
    }
    for i in (0..m).rev() {
        let mut s = b[i];
        for k in (i + 1)..m {
            s -= a[k * m + i] * b[k];
        }
        b[i] = s / a[i * m + i];
    }
    Some(b)
}

fn newton_fitness(target: &[f64], x0: &[f64], start_iter: usize) -> Result<(Vec<f64>, usize)> {
    let m = target.len();
    let mut theta: Vec<f64> = x0.iter().map(|x| -x.ln()).collect();
    let mut residual = f64::INFINITY;
    for iter in start_iter + 1..=CALIBRATION_MAX_ITER {
        let x: Vec<f64> = theta.iter().map(|t| (-t).exp()).collect();
        let mut grad: Vec<f64> = target.to_vec();
        let mut hess = vec![0.0; m * m];
        for i in 0..m {
            for j in (i + 1)..m {
                let p = 1.0 / (1.0 + (theta[i] + theta[j]).exp());
                let w = p * (1.0 - p);
                grad[i] -= p;
                grad[j] -= p;
                hess[i * m + i] += w;
                hess[j * m + j] += w;
                hess[i * m + j] += w;
                hess[j * m + i] += w;
            }
        }
        residual = grad.iter().fold(0.0, |a: f64, g| a.max(g.abs()));
        if residual <= CALIBRATION_TOL {
            return Ok((x, iter));
        }
        let ridge = 1e-12 * (0..m).map(|i| hess[i * m + i]).fold(0.0, f64::max);
        for i in 0..m {
            hess[i * m + i] += ridge;
        }
        let rhs: Vec<f64> = grad.iter().map(|g| -g).collect();
        let step = cholesky_solve(hess, rhs, m).ok_or(Error::CalibrationDiverged {
            iterations: iter,
            residual,
        })?;
        let f0 = dual_objective(&theta, target);
        let slope: f64 = grad.iter().zip(&step).map(|(g, s)| g * s).sum();
        let mut t = 1.0;
        loop {
            let trial: Vec<f64> = theta.iter().zip(&step).map(|(a, s)| a + t * s).collect();
            if dual_objective(&trial, target) <= f0 + 1e-4 * t * slope || t < 1e-12 {
                theta = trial;
                break;
            }
            t *= 0.5;
        }
    }
    Err(Error::CalibrationDiverged {
        iterations: CALIBRATION_MAX_ITER,
        residual,
    })
}

/// Draws every pair independently with its calibrated probability.
pub fn sample_canonical_with<R: Rng + ?Sized>(model: &CanonicalModel, rng: &mut R) -> Graph {
    let n = model.n;
    let mut g = Graph::empty(n);
    match &model.pair_prob {
        PairProbabilities::Homogeneous(p) => {
            let coin = Bernoulli::new(p.clamp(0.0, 1.0)).expect("probability in [0, 1]");
            for i in 0..n {
                for j in (i + 1)..n {
                    if coin.sample(rng) {
                        g.insert_edge(i, j);
                    }
                }
            }
        }
        PairProbabilities::PerPair(v) => {
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    if rng.gen::<f64>() < v[k] {
                        g.insert_edge(i, j);
                    }
                    k += 1;
                }
            }
        }
    }
    g
}

pub fn sample_canonical(model: &CanonicalModel, seed: u64) -> Graph {
    sample_canonical_with(model, &mut rng_from_seed(seed))
}

#[inline]
fn log_bernoulli(present: bool, p: f64) -> f64 {
    match (present, p) {
        (true, 1.0) => 0.0,
        (false, 0.0) => 0.0,
        (true, p) => p.ln(),
        (false, p) => (-p).ln_1p(),
    }
}

/// `log P_can(g)`; `-inf` when `g` contains a forbidden pair or misses a
/// forced one.
pub fn canonical_logprob(model: &CanonicalModel, g: &Graph) -> Result<f64> {
    if g.n() != model.n {
        return Err(Error::DimensionMismatch {
            expected: model.n,
            got: g.n(),
        });
    }
    let n = model.n;
    Ok(match &model.pair_prob {
        PairProbabilities::Homogeneous(p) => {
            let present = g.edge_count();
            let absent = pair_count(n) - present;
            let mut lp = 0.0;
            if present > 0 {
                lp += present as f64 * log_bernoulli(true, *p);
            }
            if absent > 0 {
                lp += absent as f64 * log_bernoulli(false, *p);
            }
            lp
        }
        PairProbabilities::PerPair(v) => {
            let mut lp = 0.0;
            let mut k = 0;
            for i in 0..n {
                for j in (i + 1)..n {
                    lp += log_bernoulli(g.has_edge(i, j), v[k]);
                    k += 1;
                }
            }
            lp
        }
    })
}

/// Exact membership in the constraint set.
pub fn in_gamma(g: &Graph, spec: &ConstraintSpec) -> bool {
    if g.n() != spec.n {
        return false;
    }
    match &spec.kind {
        ConstraintKind::EdgeCount(l) => g.edge_count() == *l,
        ConstraintKind::DegreeSequence(d) => (0..g.n()).all(|i| g.degree(i) == d[i]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MicMethod {
    EdgeSwapMcmc,
    PairingRejection,
    UniformEdgeSubset,
}

fn default_max_rejections() -> usize {
    1_000_000
}

/// Microcanonical sampler settings. `None` fields take size-dependent
/// defaults: automatic method choice, `20|E|` burn-in and `5|E|` thinning.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MicSamplerConfig {
    #[serde(default)]
    pub method: Option<MicMethod>,
    #[serde(default)]
    pub burn_in_swaps: Option<usize>,
    #[serde(default)]
    pub thinning_swaps: Option<usize>,
    #[serde(default = "default_max_rejections")]
    pub max_rejections: usize,
}

impl Default for MicSamplerConfig {
    fn default() -> Self {
        MicSamplerConfig {
            method: None,
            burn_in_swaps: None,
            thinning_swaps: None,
            max_rejections: default_max_rejections(),
        }
    }
}

impl MicSamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.thinning_swaps == Some(0) {
            return Err(Error::OutOfRange("thinning_swaps must be at least 1".into()));
        }
        Ok(())
    }

    /// Method used for `spec` once automatic selection is resolved.
    pub fn resolve_method(&self, spec: &ConstraintSpec) -> Result<MicMethod> {
        match (&spec.kind, self.method) {
            (ConstraintKind::EdgeCount(_), None | Some(MicMethod::UniformEdgeSubset)) => Ok(MicMethod::UniformEdgeSubset),
            (ConstraintKind::EdgeCount(_), Some(m)) => Err(Error::InvalidConstraint(format!(
                "{m:?} samples degree constraints, not edge counts"
            ))),
            (ConstraintKind::DegreeSequence(_), Some(MicMethod::UniformEdgeSubset)) => Err(Error::InvalidConstraint(
                "uniform_edge_subset samples edge-count constraints only".into(),
            )),
            (ConstraintKind::DegreeSequence(_), Some(m)) => Ok(m),
            (ConstraintKind::DegreeSequence(d), None) => {
                let max = d.iter().copied().max().unwrap_or(0);
                Ok(if max <= 3 && spec.n <= 10_000 {
                    MicMethod::PairingRejection
                } else {
                    MicMethod::EdgeSwapMcmc
                })
            }
        }
    }
}

/// A realization of a graphical degree sequence (Havel–Hakimi).
pub fn havel_hakimi(degrees: &[usize]) -> Result<Graph> {
    let n = degrees.len();
    let mut g = Graph::empty(n);
    let mut rem: Vec<(usize, usize)> = degrees.iter().copied().zip(0..n).collect();
    loop {
        rem.sort_unstable_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let (d, v) = rem[0];
        if d == 0 {
            break;
        }
        if d >= rem.len() {
            return Err(Error::NotGraphical);
        }
        for slot in rem.iter_mut().skip(1).take(d) {
            if slot.0 == 0 {
                return Err(Error::NotGraphical);
            }
            slot.0 -= 1;
            g.insert_edge(v, slot.1);
        }
        rem[0].0 = 0;
    }
    Ok(g)
}

/// Degree-preserving double-edge-swap chain.
///
/// A move picks an ordered pair of distinct edges `(a, b)`, `(c, d)` and a
/// random orientation of the second, and rewires them to `(a, d)`, `(c, b)`
/// unless that creates a loop or a multi-edge. Rejected moves leave the
/// state unchanged, so the uniform law on the constraint set is stationary.
#[derive(Clone, Debug)]
pub struct EdgeSwapChain {
    graph: Graph,
    edges: Vec<(usize, usize)>,
    burn_in: usize,
    thinning: usize,
    burned: bool,
    pub proposed: u64,
    pub accepted: u64,
}

impl EdgeSwapChain {
    pub fn new(start: Graph, burn_in: Option<usize>, thinning: Option<usize>) -> Self {
        let edges: Vec<_> = start.edges().collect();
        let m = edges.len();
        EdgeSwapChain {
            graph: start,
            edges,
            burn_in: burn_in.unwrap_or(20 * m),
            thinning: thinning.unwrap_or((5 * m).max(1)),
            burned: false,
            proposed: 0,
            accepted: 0,
        }
    }

    pub fn state(&self) -> &Graph {
        &self.graph
    }

    pub fn step<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        let m = self.edges.len();
        if m < 2 {
            return false;
        }
        self.proposed += 1;
        let e1 = rng.gen_range(0..m);
        let mut e2 = rng.gen_range(0..m - 1);
        if e2 >= e1 {
            e2 += 1;
        }
        let (a, b) = self.edges[e1];
        let (mut c, mut d) = self.edges[e2];
        if rng.gen::<bool>() {
            std::mem::swap(&mut c, &mut d);
        }
        if a == d || c == b || self.graph.has_edge(a, d) || self.graph.has_edge(c, b) {
            return false;
        }
        self.graph.remove_edge(a, b);
        self.graph.remove_edge(c, d);
        self.graph.insert_edge(a, d);
        self.graph.insert_edge(c, b);
        self.edges[e1] = (a, d);
        self.edges[e2] = (c, b);
        self.accepted += 1;
        true
    }

    /// Runs burn-in on the first call and `thinning` swaps on later calls,
    /// then returns the current state.
    pub fn next_sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Graph {
        let swaps = if self.burned { self.thinning } else { self.burn_in };
        self.burned = true;
        for _ in 0..swaps {
            self.step(rng);
        }
        self.graph.clone()
    }
}

#[derive(Debug)]
enum SamplerState {
    EdgeSubset { pairs: Vec<(usize, usize)>, edges: usize },
    Pairing { stubs: Vec<usize>, max_rejections: usize },
    Swap(Box<EdgeSwapChain>),
}

/// Stream of microcanonical samples for one constraint.
#[derive(Debug)]
pub struct MicSampler {
    spec: ConstraintSpec,
    method: MicMethod,
    state: SamplerState,
    rng: StreamRng,
}

impl MicSampler {
    pub fn new(spec: &ConstraintSpec, config: &MicSamplerConfig, seed: u64) -> Result<Self> {
        spec.validate()?;
        config.validate()?;
        if !is_graphical(spec) {
            return Err(Error::NotGraphical);
        }
        let method = config.resolve_method(spec)?;
        let state = match (&spec.kind, method) {
            (ConstraintKind::EdgeCount(l), _) => SamplerState::EdgeSubset {
                pairs: pairs(spec.n),
                edges: *l,
            },
            (ConstraintKind::DegreeSequence(d), MicMethod::PairingRejection) => SamplerState::Pairing {
                stubs: d.iter().enumerate().flat_map(|(v, &k)| std::iter::repeat_n(v, k)).collect(),
                max_rejections: config.max_rejections,
            },
            (ConstraintKind::DegreeSequence(d), _) => SamplerState::Swap(Box::new(EdgeSwapChain::new(
                havel_hakimi(d)?,
                config.burn_in_swaps,
                config.thinning_swaps,
            ))),
        };
        Ok(MicSampler {
            spec: spec.clone(),
            method,
            state,
            rng: rng_from_seed(seed),
        })
    }

    pub fn method(&self) -> MicMethod {
        self.method
    }

    pub fn spec(&self) -> &ConstraintSpec {
        &self.spec
    }

    pub fn sample(&mut self) -> Result<Graph> {
        let n = self.spec.n;
        match &mut self.state {
            SamplerState::EdgeSubset { pairs, edges } => {
                let mut g = Graph::empty(n);
                for k in rand::seq::index::sample(&mut self.rng, pairs.len(), *edges) {
                    let (i, j) = pairs[k];
                    g.insert_edge(i, j);
                }
                Ok(g)
            }
            SamplerState::Pairing { stubs, max_rejections } => {
                let mut rejections = 0;
                loop {
                    stubs.shuffle(&mut self.rng);
                    let mut g = Graph::empty(n);
                    let simple = stubs.chunks_exact(2).all(|pair| {
                        let (i, j) = (pair[0], pair[1]);
                        if i == j || g.has_edge(i, j) {
                            return false;
                        }
                        g.insert_edge(i, j);
                        true
                    });
                    if simple {
                        return Ok(g);
                    }
                    rejections += 1;
                    if rejections > *max_rejections {
                        return Err(Error::TooManyRejections(*max_rejections));
                    }
                }
            }
            SamplerState::Swap(chain) => Ok(chain.next_sample(&mut self.rng)),
        }
    }
}

/// One uniform draw from graphs with exactly `edges` edges.
pub fn sample_mic_edge_count(n: usize, edges: usize, seed: u64) -> Result<Graph> {
    let spec = ConstraintSpec::edge_count(n, edges);
    spec.validate().map_err(|_| Error::OutOfRange(format!("edge count {edges} outside [0, {}]", pair_count(n))))?;
    MicSampler::new(&spec, &MicSamplerConfig::default(), seed)?.sample()
}

/// One draw from graphs with exactly the target degrees.
pub fn sample_mic_degrees(spec: &ConstraintSpec, config: &MicSamplerConfig, seed: u64) -> Result<Graph> {
    if !spec.is_degree() {
        return Err(Error::InvalidConstraint("expected a degree-sequence constraint".into()));
    }
    MicSampler::new(spec, config, seed)?.sample()
}
