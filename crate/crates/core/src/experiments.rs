//! Monte Carlo experiments: the eigenvalue shift between ensembles, the
//! variance of the top eigenvalue, tail calibration of the degree and
//! eigenvalue concentration statistics, and the transfer scale.
//!
//! Sample `i` at size `n` draws from stream `child_seed(child_seed(seed, n), e)`
//! split again by `i`, with `e = 0` for the canonical and `e = 1` for the
//! microcanonical ensemble. Samples are evaluated in parallel but collected
//! and reduced in index order, so reports are bit-identical for a fixed seed.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, Discrete};

use crate::ensembles::{calibrate, havel_hakimi, sample_canonical_with, CanonicalModel, MicSampler, MicSamplerConfig};
use crate::entropy::relative_entropy;
use crate::enumeration::{exact_p_can, exact_p_can_gamma, DEFAULT_BUDGET};
use crate::error::{Error, Result};
use crate::graph::{pair_count, ConstraintKind, ConstraintSpec, Graph};
use crate::report::{self, sig17, sig17_opt};
use crate::rng::{child_rng, child_seed};
use crate::schedule::{FamilyKind, ScheduledSpec, SpecFamily};
use crate::spectral::{
    expansion_estimate, fk_prediction, in_density_window, residual_decomposition_op, second_eigenvalue_op,
    top_eigenpair_op, AdjacencyOperator, SolverOptions, DEFAULT_REGIME_BETA, DEFAULT_TOL,
};
use crate::stats::{clopper_pearson_upper, linear_fit, quantile, sorted, Summary};

/// One-sided level of the Clopper–Pearson bounds.
pub const CP_LEVEL: f64 = 0.95;
/// Two-sided level of the variance interval.
pub const VARIANCE_CI_LEVEL: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Estimator {
    /// `sum K^2 / sum K`
    DegreeRatio,
    /// Third-order moment expansion around the mean matrix.
    Expansion,
}

fn default_beta() -> f64 {
    DEFAULT_REGIME_BETA
}
fn default_tol() -> f64 {
    DEFAULT_TOL
}
fn default_lambda2_tol() -> f64 {
    1e-6
}
fn default_gammas() -> Vec<f64> {
    vec![1.0, 2.0]
}
fn default_betas() -> Vec<f64> {
    vec![2.5, 3.0]
}
fn default_hoeffding_gamma2() -> f64 {
    1.5
}
fn default_true() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub family: SpecFamily,
    pub n_list: Vec<usize>,
    pub samples_per_n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub estimators: Vec<Estimator>,
    /// Exponent of the density window; only used to flag rows.
    #[serde(default = "default_beta")]
    pub regime_beta: f64,
    #[serde(default)]
    pub sampler: MicSamplerConfig,
    #[serde(default = "default_tol")]
    pub tol: f64,
    #[serde(default = "default_lambda2_tol")]
    pub lambda2_tol: f64,
    /// Thresholds on the `sqrt(n)`-scaled statistics.
    #[serde(default = "default_gammas")]
    pub gammas: Vec<f64>,
    /// `lambda2 >= beta sigma sqrt(n)` thresholds.
    #[serde(default = "default_betas")]
    pub betas: Vec<f64>,
    #[serde(default = "default_hoeffding_gamma2")]
    pub hoeffding_gamma2: f64,
    #[serde(default = "default_true")]
    pub lambda2: bool,
    /// Enumeration cap for exact quantities.
    #[serde(default = "default_cap")]
    pub enumeration_cap: usize,
}

fn default_cap() -> usize {
    DEFAULT_BUDGET
}

impl ExperimentConfig {
    pub fn new(family: SpecFamily, n_list: Vec<usize>, samples_per_n: usize, seed: u64) -> Self {
        ExperimentConfig {
            family,
            n_list,
            samples_per_n,
            seed,
            estimators: Vec::new(),
            regime_beta: default_beta(),
            sampler: MicSamplerConfig::default(),
            tol: default_tol(),
            lambda2_tol: default_lambda2_tol(),
            gammas: default_gammas(),
            betas: default_betas(),
            hoeffding_gamma2: default_hoeffding_gamma2(),
            lambda2: true,
            enumeration_cap: default_cap(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.family.validate()?;
        self.sampler.validate()?;
        if self.samples_per_n < 2 {
            return Err(Error::InvalidConstraint(format!(
                "samples_per_n must be at least 2, got {}",
                self.samples_per_n
            )));
        }
        if self.n_list.is_empty() {
            return Err(Error::InvalidConstraint("n_list is empty".into()));
        }
        if !(self.tol > 0.0 && self.lambda2_tol > 0.0) {
            return Err(Error::InvalidConstraint("solver tolerances must be positive".into()));
        }
        for &n in &self.n_list {
            self.family.at(n)?;
        }
        Ok(())
    }

    /// Hash of everything except the seed, used in report file names.
    pub fn spec_hash(&self) -> String {
        let mut c = self.clone();
        c.seed = 0;
        report::spec_hash(&c)
    }

    fn solver(&self) -> SolverOptions {
        SolverOptions::with_tol(self.tol)
    }

    fn size_seed(&self, n: usize) -> u64 {
        child_seed(self.seed, n as u64)
    }
}

const CAN_STREAM: u64 = 0;
const MIC_STREAM: u64 = 1;

/// Applies `f` to `count` canonical draws, in draw order.
pub fn canonical_map<T, F>(model: &CanonicalModel, seed: u64, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Graph) -> Result<T> + Sync,
{
    let stream = child_seed(seed, CAN_STREAM);
    (0..count)
        .into_par_iter()
        .map(|i| {
            let mut rng = child_rng(stream, i as u64);
            f(&sample_canonical_with(model, &mut rng))
        })
        .collect()
}

/// Applies `f` to `count` microcanonical draws, in draw order. Edge-count
/// draws are independent; degree draws come from one sampler stream.
pub fn microcanonical_map<T, F>(spec: &ConstraintSpec, config: &MicSamplerConfig, seed: u64, count: usize, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&Graph) -> Result<T> + Sync,
{
    let stream = child_seed(seed, MIC_STREAM);
    match spec.kind {
        ConstraintKind::EdgeCount(_) => (0..count)
            .into_par_iter()
            .map(|i| f(&MicSampler::new(spec, config, child_seed(stream, i as u64))?.sample()?))
            .collect(),
        ConstraintKind::DegreeSequence(_) => {
            let mut sampler = MicSampler::new(spec, config, stream)?;
            let graphs = (0..count).map(|_| sampler.sample()).collect::<Result<Vec<_>>>()?;
            graphs.par_iter().map(&f).collect()
        }
    }
}

fn lambda1(g: &Graph, opts: SolverOptions) -> Result<f64> {
    top_eigenpair_op(&AdjacencyOperator::new(g), opts).into_result().map(|t| t.value)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeltaRow {
    pub n: usize,
    /// `d` or `L`.
    pub target: usize,
    #[serde(serialize_with = "sig17")]
    pub p: f64,
    pub samples: usize,
    #[serde(serialize_with = "sig17")]
    pub can_mean: f64,
    #[serde(serialize_with = "sig17")]
    pub can_stderr: f64,
    #[serde(serialize_with = "sig17")]
    pub can_variance: f64,
    #[serde(serialize_with = "sig17")]
    pub mic_mean: f64,
    #[serde(serialize_with = "sig17")]
    pub mic_stderr: f64,
    #[serde(serialize_with = "sig17")]
    pub mic_variance: f64,
    /// `E_mic[lambda1]` known exactly (`d` for the regular ensemble).
    pub mic_exact: bool,
    #[serde(serialize_with = "sig17")]
    pub delta: f64,
    #[serde(serialize_with = "sig17")]
    pub delta_stderr: f64,
    #[serde(serialize_with = "sig17")]
    pub fk_prediction: f64,
    #[serde(serialize_with = "sig17")]
    pub fk_error_scale: f64,
    pub in_regime: bool,
    #[serde(serialize_with = "sig17_opt")]
    pub can_degree_ratio_mean: Option<f64>,
    #[serde(serialize_with = "sig17_opt")]
    pub can_expansion_mean: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DeltaReport {
    pub config: ExperimentConfig,
    pub rows: Vec<DeltaRow>,
}

impl DeltaReport {
    pub fn csv(&self) -> Result<Vec<u8>> {
        report::csv_bytes(&self.rows)
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let path = report::report_path(dir, "delta", &self.config.spec_hash(), self.config.seed);
        report::write_csv(&path, &self.rows)?;
        Ok(vec![path])
    }
}

struct CanDraw {
    lambda1: f64,
    ratio: Option<f64>,
    expansion: Option<f64>,
}

fn mean_of(xs: &[Option<f64>]) -> Option<f64> {
    xs.iter().copied().collect::<Option<Vec<f64>>>().map(|v| Summary::of(&v).mean)
}

/// `E_mic[lambda1]` exactly when every member of `Gamma` is `d`-regular.
fn exact_mic_lambda1(spec: &ConstraintSpec) -> Option<f64> {
    match &spec.kind {
        ConstraintKind::DegreeSequence(d) => d.constant_value().map(|k| k as f64),
        ConstraintKind::EdgeCount(_) => None,
    }
}

/// `Delta_n = E_can[lambda1] - E_mic[lambda1]` for every `n` of the config.
pub fn delta_experiment(config: &ExperimentConfig) -> Result<DeltaReport> {
    config.validate()?;
    let opts = config.solver();
    let want_ratio = config.estimators.contains(&Estimator::DegreeRatio);
    let want_expansion = config.estimators.contains(&Estimator::Expansion);
    let mut rows = Vec::with_capacity(config.n_list.len());
    for &n in &config.n_list {
        let ScheduledSpec { spec, p, target, .. } = config.family.at(n)?;
        let model = calibrate(&spec)?;
        let seed = config.size_seed(n);
        let draws = canonical_map(&model, seed, config.samples_per_n, |g| {
            Ok(CanDraw {
                lambda1: lambda1(g, opts)?,
                ratio: if want_ratio { Some(crate::spectral::degree_ratio(g).unwrap_or(0.0)) } else { None },
                expansion: if want_expansion && p > 0.0 && p < 1.0 {
                    Some(expansion_estimate(g, p, 3)?)
                } else {
                    None
                },
            })
        })?;
        let l1: Vec<f64> = draws.iter().map(|d| d.lambda1).collect();
        let can = Summary::of(&l1);
        let (mic, mic_exact) = match exact_mic_lambda1(&spec) {
            Some(v) => (Summary::exact(v), true),
            None => {
                let l1 = microcanonical_map(&spec, &config.sampler, seed, config.samples_per_n, |g| lambda1(g, opts))?;
                (Summary::of(&l1), false)
            }
        };
        let fk = fk_prediction(n, p);
        rows.push(DeltaRow {
            n,
            target,
            p,
            samples: config.samples_per_n,
            can_mean: can.mean,
            can_stderr: can.stderr,
            can_variance: can.variance,
            mic_mean: mic.mean,
            mic_stderr: mic.stderr,
            mic_variance: mic.variance,
            mic_exact,
            delta: can.mean - mic.mean,
            delta_stderr: (can.stderr.powi(2) + mic.stderr.powi(2)).sqrt(),
            fk_prediction: fk.value,
            fk_error_scale: fk.error_scale,
            in_regime: in_density_window(n, p, config.regime_beta),
            can_degree_ratio_mean: if want_ratio {
                mean_of(&draws.iter().map(|d| d.ratio).collect::<Vec<_>>())
            } else {
                None
            },
            can_expansion_mean: mean_of(&draws.iter().map(|d| d.expansion).collect::<Vec<_>>()),
        });
    }
    Ok(DeltaReport {
        config: config.clone(),
        rows,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VarianceRow {
    pub n: usize,
    #[serde(serialize_with = "sig17")]
    pub p: f64,
    pub samples: usize,
    /// Sample mean of `lambda1 - (n-1)p`.
    #[serde(serialize_with = "sig17")]
    pub mean_shift: f64,
    #[serde(serialize_with = "sig17")]
    pub mean_shift_stderr: f64,
    /// `1 - p`
    #[serde(serialize_with = "sig17")]
    pub target_shift: f64,
    #[serde(serialize_with = "sig17")]
    pub variance: f64,
    #[serde(serialize_with = "sig17")]
    pub variance_ci_low: f64,
    #[serde(serialize_with = "sig17")]
    pub variance_ci_high: f64,
    /// `2p(1-p)`
    #[serde(serialize_with = "sig17")]
    pub target_variance: f64,
}

/// Canonical mean shift and variance of `lambda1` against `1 - p` and `2p(1-p)`.
pub fn variance_check(config: &ExperimentConfig) -> Result<Vec<VarianceRow>> {
    config.validate()?;
    let opts = config.solver();
    config
        .n_list
        .iter()
        .map(|&n| {
            let s = config.family.at(n)?;
            let model = calibrate(&s.spec)?;
            let base = (n - 1) as f64 * s.p;
            let shifts = canonical_map(&model, config.size_seed(n), config.samples_per_n, |g| {
                Ok(lambda1(g, opts)? - base)
            })?;
            let sum = Summary::of(&shifts);
            let (lo, hi) = sum.variance_ci(VARIANCE_CI_LEVEL);
            Ok(VarianceRow {
                n,
                p: s.p,
                samples: sum.count,
                mean_shift: sum.mean,
                mean_shift_stderr: sum.stderr,
                target_shift: 1.0 - s.p,
                variance: sum.variance,
                variance_ci_low: lo,
                variance_ci_high: hi,
                target_variance: 2.0 * s.p * (1.0 - s.p),
            })
        })
        .collect()
}

pub fn write_variance_rows(rows: &[VarianceRow], config: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    let path = report::report_path(dir, "variance", &config.spec_hash(), config.seed);
    report::write_csv(&path, rows)?;
    Ok(vec![path])
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuantileRow {
    pub statistic: String,
    /// `can`, `mic` or `mic_exact`.
    pub ensemble: String,
    pub n: usize,
    pub samples: usize,
    #[serde(serialize_with = "sig17")]
    pub mean: f64,
    #[serde(serialize_with = "sig17")]
    pub q90: f64,
    #[serde(serialize_with = "sig17")]
    pub q99: f64,
    #[serde(serialize_with = "sig17")]
    pub q999: f64,
    #[serde(serialize_with = "sig17")]
    pub max: f64,
    /// Normalizing scale of the statistic at this `n`.
    #[serde(serialize_with = "sig17")]
    pub scale: f64,
    /// `q99 / scale`
    #[serde(serialize_with = "sig17")]
    pub tail_scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceRow {
    pub statistic: String,
    pub ensemble: String,
    pub n: usize,
    pub label: String,
    #[serde(serialize_with = "sig17")]
    pub threshold: f64,
    pub hits: usize,
    pub samples: usize,
    #[serde(serialize_with = "sig17")]
    pub frequency: f64,
    /// One-sided Clopper–Pearson upper bound at [`CP_LEVEL`].
    #[serde(serialize_with = "sig17")]
    pub cp_upper: f64,
}

/// Fit of `P(exceedance) = exp(-nu (ln n)^xi)` across sizes, from the
/// frequencies strictly between 0 and 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    pub statistic: String,
    pub ensemble: String,
    pub label: String,
    pub points: usize,
    #[serde(serialize_with = "sig17")]
    pub xi: f64,
    #[serde(serialize_with = "sig17")]
    pub nu: f64,
    #[serde(serialize_with = "sig17")]
    pub r2: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcentrationReport {
    pub experiment: String,
    pub config: ExperimentConfig,
    pub quantiles: Vec<QuantileRow>,
    pub exceedances: Vec<ExceedanceRow>,
    pub tail_fits: Vec<TailFit>,
}

impl ConcentrationReport {
    fn new(experiment: &str, config: &ExperimentConfig) -> Self {
        ConcentrationReport {
            experiment: experiment.into(),
            config: config.clone(),
            quantiles: Vec::new(),
            exceedances: Vec::new(),
            tail_fits: Vec::new(),
        }
    }

    pub fn quantile_row(&self, statistic: &str, ensemble: &str, n: usize) -> Option<&QuantileRow> {
        self.quantiles
            .iter()
            .find(|r| r.statistic == statistic && r.ensemble == ensemble && r.n == n)
    }

    pub fn exceedance(&self, label: &str, ensemble: &str, n: usize) -> Option<&ExceedanceRow> {
        self.exceedances
            .iter()
            .find(|r| r.label == label && r.ensemble == ensemble && r.n == n)
    }

    fn push_quantiles(&mut self, statistic: &str, ensemble: &str, n: usize, values: &[f64], scale: f64) {
        let s = sorted(values);
        let q99 = quantile(&s, 0.99);
        self.quantiles.push(QuantileRow {
            statistic: statistic.into(),
            ensemble: ensemble.into(),
            n,
            samples: values.len(),
            mean: Summary::of(values).mean,
            q90: quantile(&s, 0.90),
            q99,
            q999: quantile(&s, 0.999),
            max: s.last().copied().unwrap_or(f64::NAN),
            scale,
            tail_scale: q99 / scale,
        });
    }

    /// Counts `value >= threshold`; a zero threshold counts strictly
    /// positive values so degenerate (zero-variance) sizes report no hits.
    #[allow(clippy::too_many_arguments)]
    fn push_exceedance(&mut self, statistic: &str, ensemble: &str, n: usize, label: &str, threshold: f64, values: &[f64]) {
        let hits = values
            .iter()
            .filter(|&&v| if threshold > 0.0 { v >= threshold } else { v > threshold })
            .count();
        self.exceedances.push(ExceedanceRow {
            statistic: statistic.into(),
            ensemble: ensemble.into(),
            n,
            label: label.into(),
            threshold,
            hits,
            samples: values.len(),
            frequency: hits as f64 / values.len() as f64,
            cp_upper: clopper_pearson_upper(hits, values.len(), CP_LEVEL),
        });
    }

    fn fit_tails(&mut self) {
        let mut keys: Vec<(String, String, String)> = Vec::new();
        for r in &self.exceedances {
            let k = (r.statistic.clone(), r.ensemble.clone(), r.label.clone());
            if !keys.contains(&k) {
                keys.push(k);
            }
        }
        for (statistic, ensemble, label) in keys {
            let (x, y): (Vec<f64>, Vec<f64>) = self
                .exceedances
                .iter()
                .filter(|r| r.statistic == statistic && r.ensemble == ensemble && r.label == label)
                .filter(|r| r.frequency > 0.0 && r.frequency < 1.0 && r.n >= 3)
                .map(|r| ((r.n as f64).ln().ln(), (-r.frequency.ln()).ln()))
                .unzip();
            if let Some((a, b, r2)) = linear_fit(&x, &y) {
                self.tail_fits.push(TailFit {
                    statistic,
                    ensemble,
                    label,
                    points: x.len(),
                    xi: b,
                    nu: a.exp(),
                    r2,
                });
            }
        }
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let hash = self.config.spec_hash();
        let seed = self.config.seed;
        let mut out = Vec::new();
        let path = report::report_path(dir, &self.experiment, &hash, seed);
        report::write_csv(&path, &self.quantiles)?;
        out.push(path);
        let path = report::report_path(dir, &format!("{}_exceedances", self.experiment), &hash, seed);
        report::write_csv(&path, &self.exceedances)?;
        out.push(path);
        if !self.tail_fits.is_empty() {
            let path = report::report_path(dir, &format!("{}_tailfit", self.experiment), &hash, seed);
            report::write_csv(&path, &self.tail_fits)?;
            out.push(path);
        }
        Ok(out)
    }
}

/// `|sum_i (K_i - Theta)^2 - sigma^2 n(n-1)|` with `Theta = (n-1)p`.
pub fn degree_fluctuation(g: &Graph, p: f64) -> f64 {
    let n = g.n() as f64;
    let theta = (n - 1.0) * p;
    let s: f64 = (0..g.n()).map(|i| (g.degree(i) as f64 - theta).powi(2)).sum();
    (s - p * (1.0 - p) * n * (n - 1.0)).abs()
}

/// Quantiles of the degree-fluctuation statistic on the `n^{3/2}` scale and
/// hits of the `>= 2 sigma^2 n^2` event.
pub fn degree_concentration_stat(config: &ExperimentConfig) -> Result<ConcentrationReport> {
    config.validate()?;
    let mut rep = ConcentrationReport::new("degree_concentration", config);
    for &n in &config.n_list {
        let s = config.family.at(n)?;
        let model = calibrate(&s.spec)?;
        let values = canonical_map(&model, config.size_seed(n), config.samples_per_n, |g| Ok(degree_fluctuation(g, s.p)))?;
        let nf = n as f64;
        rep.push_quantiles("degree_fluctuation", "can", n, &values, nf.powf(1.5));
        let sigma2 = s.p * (1.0 - s.p);
        rep.push_exceedance("degree_fluctuation", "can", n, "two_sigma2_n2", 2.0 * sigma2 * nf * nf, &values);
    }
    rep.fit_tails();
    Ok(rep)
}

/// `sqrt(n) |sum K^2 / sum K - sum K / n - sigma^2/mu|`
pub fn ratio_deviation_statistic(g: &Graph, p: f64) -> f64 {
    let k = g.degrees();
    let total = k.total() as f64;
    let n = g.n() as f64;
    let ratio = if total > 0.0 { k.sum_of_squares() / total } else { 0.0 };
    let offset = if p > 0.0 { 1.0 - p } else { 0.0 };
    n.sqrt() * (ratio - total / n - offset).abs()
}

/// `|sum_{i<j} a_ij - n(n-1)/2 mu| / n`
pub fn hoeffding_statistic(g: &Graph, p: f64) -> f64 {
    let n = g.n();
    (g.edge_count() as f64 - pair_count(n) as f64 * p).abs() / n as f64
}

/// Canonical tails of the degree-ratio statistic and the edge-count
/// deviation, with the same events replayed in the microcanonical ensemble.
pub fn ratio_concentration(config: &ExperimentConfig) -> Result<ConcentrationReport> {
    config.validate()?;
    let mut rep = ConcentrationReport::new("ratio_concentration", config);
    for &n in &config.n_list {
        let s = config.family.at(n)?;
        let model = calibrate(&s.spec)?;
        let p = s.p;
        let seed = config.size_seed(n);
        let pair_stats = |g: &Graph| Ok((ratio_deviation_statistic(g, p), hoeffding_statistic(g, p)));
        let can = canonical_map(&model, seed, config.samples_per_n, pair_stats)?;
        let (mic, mic_label) = if exact_mic_lambda1(&s.spec).is_some() {
            // every regular graph gives the same values
            let g = match &s.spec.kind {
                ConstraintKind::DegreeSequence(d) => havel_hakimi(d)?,
                ConstraintKind::EdgeCount(_) => unreachable!(),
            };
            (vec![pair_stats(&g)?; config.samples_per_n], "mic_exact")
        } else {
            (
                microcanonical_map(&s.spec, &config.sampler, seed, config.samples_per_n, pair_stats)?,
                "mic",
            )
        };
        let hoeff_threshold = (config.hoeffding_gamma2 * (n as f64).ln()).sqrt();
        for (ens, draws) in [("can", &can), (mic_label, &mic)] {
            let dev: Vec<f64> = draws.iter().map(|d| d.0).collect();
            let hoef: Vec<f64> = draws.iter().map(|d| d.1).collect();
            rep.push_quantiles("ratio_deviation", ens, n, &dev, 1.0);
            rep.push_quantiles("hoeffding", ens, n, &hoef, 1.0);
            for &g in &config.gammas {
                rep.push_exceedance("ratio_deviation", ens, n, &format!("ratio_deviation_gamma_{g}"), g, &dev);
            }
            rep.push_exceedance(
                "hoeffding",
                ens,
                n,
                &format!("hoeffding_gamma2_{}", config.hoeffding_gamma2),
                hoeff_threshold,
                &hoef,
            );
        }
    }
    rep.fit_tails();
    Ok(rep)
}

struct GapDraw {
    gap: f64,
    lambda2: f64,
    r_norm2: f64,
}

/// Tails of `sqrt(n) |sum K^2/sum K - lambda1|`, frequency of
/// `lambda2 >= beta sigma sqrt(n)` and of `||r||^2 >= 4 sigma^2 / mu^2`.
pub fn lambda_ratio_gap(config: &ExperimentConfig) -> Result<ConcentrationReport> {
    config.validate()?;
    let opts = config.solver();
    let opts2 = SolverOptions::with_tol(config.lambda2_tol);
    let mut rep = ConcentrationReport::new("lambda_ratio_gap", config);
    for &n in &config.n_list {
        let s = config.family.at(n)?;
        let model = calibrate(&s.spec)?;
        let nf = n as f64;
        let draws = canonical_map(&model, config.size_seed(n), config.samples_per_n, |g| {
            let op = AdjacencyOperator::new(g);
            let top = top_eigenpair_op(&op, opts).into_result()?;
            let (gap, r_norm2) = match residual_decomposition_op(&op, &top) {
                Ok(d) => (nf.sqrt() * d.residual.abs(), d.r_norm2),
                Err(Error::EmptyGraph) => (0.0, 0.0),
                Err(e) => return Err(e),
            };
            let lambda2 = if config.lambda2 {
                let sec = second_eigenvalue_op(&op, &top, opts2)?;
                if !sec.converged {
                    return Err(Error::NotConverged {
                        iterations: sec.iterations,
                        residual: sec.residual,
                        estimate: sec.value,
                    });
                }
                sec.value
            } else {
                f64::NAN
            };
            Ok(GapDraw { gap, lambda2, r_norm2 })
        })?;
        let gaps: Vec<f64> = draws.iter().map(|d| d.gap).collect();
        rep.push_quantiles("ratio_lambda1_gap", "can", n, &gaps, 1.0);
        for &g in &config.gammas {
            rep.push_exceedance("ratio_lambda1_gap", "can", n, &format!("gap_eta_{g}"), g, &gaps);
        }
        let sigma = (s.p * (1.0 - s.p)).sqrt();
        if config.lambda2 {
            let l2: Vec<f64> = draws.iter().map(|d| d.lambda2).collect();
            rep.push_quantiles("lambda2", "can", n, &l2, sigma * nf.sqrt());
            for &b in &config.betas {
                rep.push_exceedance("lambda2", "can", n, &format!("lambda2_beta_{b}"), b * sigma * nf.sqrt(), &l2);
            }
        }
        let r2: Vec<f64> = draws.iter().map(|d| d.r_norm2).collect();
        rep.push_quantiles("r_norm2", "can", n, &r2, 1.0);
        if s.p > 0.0 {
            rep.push_exceedance("r_norm2", "can", n, "r_norm2_4sigma2_mu2", 4.0 * sigma * sigma / (s.p * s.p), &r2);
        }
        if let Some(d) = exact_mic_lambda1(&s.spec) {
            // d-regular: sum K^2 / sum K = d = lambda1
            let g = havel_hakimi(&vec![d as usize; n])?;
            let op = AdjacencyOperator::new(&g);
            let top = top_eigenpair_op(&op, opts).into_result()?;
            let gap = match residual_decomposition_op(&op, &top) {
                Ok(dec) => nf.sqrt() * dec.residual.abs(),
                Err(_) => 0.0,
            };
            rep.push_quantiles("ratio_lambda1_gap", "mic_exact", n, &[gap], 1.0);
        }
    }
    rep.fit_tails();
    Ok(rep)
}

/// Events whose complement is transferred.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum TransferEvent {
    /// `E` is the whole graph space, so `E^c` is empty.
    Everything,
    /// `E = Gamma`.
    Gamma,
    /// `E = { |sum K^2/sum K - sum K/n - sigma^2/mu| < gamma (ln n)^log_power / sqrt(n) }`.
    RatioDeviation {
        gamma: f64,
        #[serde(default)]
        log_power: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferRow {
    pub n: usize,
    #[serde(serialize_with = "sig17")]
    pub s_n: f64,
    /// `e^{-S_n} = P_can(Gamma)`
    #[serde(serialize_with = "sig17")]
    pub p_can_gamma: f64,
    /// Exact `P_can(E^c)` or its Monte Carlo estimate.
    #[serde(serialize_with = "sig17")]
    pub p_event_c: f64,
    /// Clopper–Pearson upper bound; equal to `p_event_c` when exact.
    #[serde(serialize_with = "sig17")]
    pub p_event_c_upper: f64,
    pub hits: usize,
    pub samples: usize,
    pub exact: bool,
    /// `P_can(E^c) e^{S_n}`
    #[serde(serialize_with = "sig17")]
    pub ratio: f64,
    #[serde(serialize_with = "sig17")]
    pub ratio_upper: f64,
    /// `P_can(Gamma) e^{S_n}` with `P_can(Gamma)` computed independently; 1 in exact arithmetic.
    #[serde(serialize_with = "sig17")]
    pub gamma_identity: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TransferReport {
    pub config: ExperimentConfig,
    pub event: TransferEvent,
    pub rows: Vec<TransferRow>,
}

impl TransferReport {
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        let hash = report::spec_hash(&(&self.config.spec_hash(), &self.event));
        let path = report::report_path(dir, "transfer", &hash, self.config.seed);
        report::write_csv(&path, &self.rows)?;
        Ok(vec![path])
    }
}

fn ratio_deviation_violated(g: &Graph, p: f64, gamma: f64, log_power: f64) -> bool {
    let n = g.n() as f64;
    ratio_deviation_statistic(g, p) >= gamma * n.ln().powf(log_power)
}

/// Compares `P_can(E^c)` with `e^{-S_n}` per `n`. Edge-count constraints use
/// the closed-form `S_n` and Monte Carlo for `E^c`; degree constraints use
/// exhaustive enumeration for both.
pub fn transfer_check(config: &ExperimentConfig, event: TransferEvent) -> Result<TransferReport> {
    config.validate()?;
    let mut rows = Vec::new();
    for &n in &config.n_list {
        let s = config.family.at(n)?;
        let entropy = relative_entropy(&s.spec, config.enumeration_cap)?;
        let s_n = entropy.s_n;
        let p_can_gamma = (-s_n).exp();
        let gamma_identity = match &s.spec.kind {
            ConstraintKind::EdgeCount(l) => {
                let m = pair_count(n) as u64;
                let ln_pmf = Binomial::new(s.p, m)
                    .map_err(|e| Error::InvalidConstraint(e.to_string()))?
                    .ln_pmf(*l as u64);
                (ln_pmf + s_n).exp()
            }
            ConstraintKind::DegreeSequence(_) => {
                let (_, mass) = exact_p_can_gamma(&s.spec, config.enumeration_cap)?;
                mass * s_n.exp()
            }
        };
        let (p_event_c, upper, hits, samples, exact) = match event {
            TransferEvent::Everything => (0.0, 0.0, 0, 0, true),
            TransferEvent::Gamma => {
                let q = 1.0 - p_can_gamma;
                (q, q, 0, 0, true)
            }
            TransferEvent::RatioDeviation { gamma, log_power } => match config.family.kind {
                FamilyKind::DegreeSequence => {
                    let q = exact_p_can(&s.spec, config.enumeration_cap, |g| ratio_deviation_violated(g, s.p, gamma, log_power))?;
                    (q, q, 0, 0, true)
                }
                FamilyKind::EdgeCount => {
                    let model = calibrate(&s.spec)?;
                    let flags = canonical_map(&model, config.size_seed(n), config.samples_per_n, |g| {
                        Ok(ratio_deviation_violated(g, s.p, gamma, log_power))
                    })?;
                    let hits = flags.iter().filter(|&&b| b).count();
                    let k = flags.len();
                    (
                        hits as f64 / k as f64,
                        clopper_pearson_upper(hits, k, CP_LEVEL),
                        hits,
                        k,
                        false,
                    )
                }
            },
        };
        rows.push(TransferRow {
            n,
            s_n,
            p_can_gamma,
            p_event_c,
            p_event_c_upper: upper,
            hits,
            samples,
            exact,
            ratio: p_event_c / p_can_gamma,
            ratio_upper: upper / p_can_gamma,
            gamma_identity,
        });
    }
    Ok(TransferReport {
        config: config.clone(),
        event,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{ensemble_table, Functional, GraphFunctional};
    use crate::schedule::DensitySchedule;

    fn family(kind: FamilyKind, p: f64) -> SpecFamily {
        SpecFamily::new(kind, DensitySchedule::Constant { p })
    }

    #[test]
    fn config_json_defaults() {
        let c: ExperimentConfig = serde_json::from_str(
            r#"{"kind":"edge_count","schedule":{"type":"constant","p":0.5},"n_list":[10],"samples_per_n":5}"#,
        )
        .unwrap();
        assert_eq!(c.seed, 0);
        assert_eq!(c.gammas, vec![1.0, 2.0]);
        assert!(c.validate().is_ok());
        let mut bad = c.clone();
        bad.samples_per_n = 1;
        assert!(bad.validate().is_err());
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let mut other = c.clone();
        other.seed = 9;
        assert_eq!(other.spec_hash(), c.spec_hash());
    }

    #[test]
    fn delta_is_deterministic() {
        let c = ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.5), vec![12, 20], 16, 5);
        let a = delta_experiment(&c).unwrap().csv().unwrap();
        let b = delta_experiment(&c).unwrap().csv().unwrap();
        assert_eq!(a, b);
        let mut c2 = c.clone();
        c2.seed = 6;
        assert_ne!(delta_experiment(&c2).unwrap().csv().unwrap(), a);
    }

    #[test]
    fn delta_at_n4_matches_enumeration() {
        for kind in [FamilyKind::DegreeSequence, FamilyKind::EdgeCount] {
            let c = ExperimentConfig::new(family(kind, 0.5), vec![4], 20_000, 11);
            let row = &delta_experiment(&c).unwrap().rows[0];
            let spec = c.family.at(4).unwrap().spec;
            let fs: [&dyn GraphFunctional; 1] = [&Functional::Lambda1];
            let t = ensemble_table(&spec, &fs, 6).unwrap();
            let exact = t.values[0].can - t.values[0].mic;
            assert!(
                (row.delta - exact).abs() <= 4.0 * row.delta_stderr,
                "{kind:?}: {} vs {exact} (se {})",
                row.delta,
                row.delta_stderr
            );
        }
    }

    #[test]
    fn regular_rows_use_exact_mic() {
        let c = ExperimentConfig::new(family(FamilyKind::DegreeSequence, 0.5), vec![30], 8, 1);
        let row = &delta_experiment(&c).unwrap().rows[0];
        assert!(row.mic_exact);
        assert_eq!(row.mic_stderr, 0.0);
        assert_eq!(row.mic_mean, row.target as f64);
        assert_eq!(row.delta_stderr, row.can_stderr);
    }

    #[test]
    fn optional_estimators_fill_columns() {
        let mut c = ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.5), vec![40], 6, 2);
        c.estimators = vec![Estimator::DegreeRatio, Estimator::Expansion];
        let row = &delta_experiment(&c).unwrap().rows[0];
        let r = row.can_degree_ratio_mean.unwrap();
        let e = row.can_expansion_mean.unwrap();
        assert!((r - row.can_mean).abs() < 1.0 && (e - row.can_mean).abs() < 1.0);
    }

    #[test]
    fn complete_graph_has_no_variance() {
        let c = ExperimentConfig::new(family(FamilyKind::EdgeCount, 1.0), vec![10], 4, 0);
        let rows = variance_check(&c).unwrap();
        assert!(rows[0].variance.abs() < 1e-20);
        assert!((rows[0].mean_shift - 0.0).abs() < 1e-9);
        let rep = degree_concentration_stat(&c).unwrap();
        assert!(rep.quantiles[0].max.abs() < 1e-12);
        assert_eq!(rep.exceedances[0].hits, 0);
        let rep = ratio_concentration(&c).unwrap();
        assert!(rep.quantile_row("ratio_deviation", "can", 10).unwrap().max.abs() < 1e-12);
    }

    #[test]
    fn regular_replay_is_exact() {
        let c = ExperimentConfig::new(family(FamilyKind::DegreeSequence, 0.5), vec![20], 4, 0);
        let rep = ratio_concentration(&c).unwrap();
        let row = rep.quantile_row("ratio_deviation", "mic_exact", 20).unwrap();
        // sum K^2/sum K - sum K/n = 0, leaving sqrt(n) sigma^2/mu
        let p = c.family.at(20).unwrap().p;
        assert!((row.q99 - 20f64.sqrt() * (1.0 - p)).abs() < 1e-12);
        let hoef = rep.quantile_row("hoeffding", "mic_exact", 20).unwrap();
        assert!(hoef.max.abs() < 1e-12);
        let rep = lambda_ratio_gap(&c).unwrap();
        assert!(rep.quantile_row("ratio_lambda1_gap", "mic_exact", 20).unwrap().max < 1e-8);
    }

    #[test]
    fn edge_count_replay_keeps_edges_fixed() {
        let c = ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.5), vec![20], 10, 0);
        let rep = ratio_concentration(&c).unwrap();
        assert!(rep.quantile_row("hoeffding", "mic", 20).unwrap().max.abs() < 1e-12);
        assert!(rep.quantile_row("hoeffding", "can", 20).unwrap().max > 0.0);
    }

    #[test]
    fn transfer_trivial_events() {
        let c = ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.5), vec![4, 30], 10, 0);
        let rep = transfer_check(&c, TransferEvent::Everything).unwrap();
        assert!(rep.rows.iter().all(|r| r.ratio == 0.0));
        let rep = transfer_check(&c, TransferEvent::Gamma).unwrap();
        for r in &rep.rows {
            assert!((r.gamma_identity - 1.0).abs() < 1e-10, "n={}: {}", r.n, r.gamma_identity);
        }
        let c = ExperimentConfig::new(family(FamilyKind::DegreeSequence, 0.5), vec![4, 5, 6], 10, 0);
        let rep = transfer_check(&c, TransferEvent::Gamma).unwrap();
        for r in &rep.rows {
            assert!((r.gamma_identity - 1.0).abs() < 1e-10);
        }
        let rep = transfer_check(&c, TransferEvent::RatioDeviation { gamma: 0.5, log_power: 0.0 }).unwrap();
        assert!(rep.rows.iter().all(|r| r.exact && r.p_event_c <= 1.0));
    }

    #[test]
    fn tail_fit_recovers_planted_law() {
        let mut rep = ConcentrationReport::new("t", &ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.5), vec![10], 2, 0));
        for n in [100usize, 1000, 10_000] {
            let f = (-0.3 * (n as f64).ln().powf(1.5)).exp();
            let hits = (f * 1e6).round() as usize;
            let values: Vec<f64> = (0..1_000_000).map(|i| if i < hits { 1.0 } else { 0.0 }).collect();
            rep.push_exceedance("x", "can", n, "l", 1.0, &values);
        }
        rep.fit_tails();
        let fit = &rep.tail_fits[0];
        assert!((fit.xi - 1.5).abs() < 0.05 && (fit.nu - 0.3).abs() < 0.02, "{fit:?}");
    }
}
