//! Summary statistics and confidence intervals for Monte Carlo output.
//!
//! Sums are Neumaier-compensated and always taken in sample order, so a
//! run's estimates depend only on the sample sequence and not on how the
//! samples were scheduled.

use serde::{Deserialize, Serialize};
use statrs::distribution::{Beta, ChiSquared, ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Neumaier's improved Kahan summation.
#[derive(Clone, Copy, Debug, Default)]
pub struct CompensatedSum {
    sum: f64,
    carry: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

impl Extend<f64> for CompensatedSum {
    fn extend<I: IntoIterator<Item = f64>>(&mut self, iter: I) {
        for x in iter {
            self.add(x);
        }
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut s = CompensatedSum::new();
    s.extend(xs);
    s.value()
}

/// Mean, unbiased variance and standard error of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub count: usize,
    pub mean: f64,
    pub variance: f64,
    pub stderr: f64,
}

impl Summary {
    pub fn of(xs: &[f64]) -> Summary {
        let count = xs.len();
        if count == 0 {
            return Summary {
                count,
                mean: f64::NAN,
                variance: f64::NAN,
                stderr: f64::NAN,
            };
        }
        let mean = compensated_sum(xs.iter().copied()) / count as f64;
        let variance = if count > 1 {
            compensated_sum(xs.iter().map(|x| (x - mean) * (x - mean))) / (count - 1) as f64
        } else {
            0.0
        };
        Summary {
            count,
            mean,
            variance,
            stderr: (variance / count as f64).sqrt(),
        }
    }

    /// A known value reported as a summary with zero spread.
    pub fn exact(value: f64) -> Summary {
        Summary {
            count: 0,
            mean: value,
            variance: 0.0,
            stderr: 0.0,
        }
    }

    /// Two-sided normal-approximation interval for the mean.
    pub fn mean_ci(&self, level: f64) -> (f64, f64) {
        let z = normal_quantile(0.5 + level / 2.0);
        (self.mean - z * self.stderr, self.mean + z * self.stderr)
    }

    /// Two-sided chi-square interval for the variance.
    pub fn variance_ci(&self, level: f64) -> (f64, f64) {
        variance_ci(self.variance, self.count, level)
    }
}

pub fn normal_quantile(q: f64) -> f64 {
    Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(q)
}

pub fn variance_ci(variance: f64, count: usize, level: f64) -> (f64, f64) {
    if count < 2 {
        return (0.0, f64::INFINITY);
    }
    let df = (count - 1) as f64;
    let chi = ChiSquared::new(df).expect("positive degrees of freedom");
    let alpha = 1.0 - level;
    let hi = chi.inverse_cdf(1.0 - alpha / 2.0);
    let lo = chi.inverse_cdf(alpha / 2.0);
    (df * variance / hi, df * variance / lo)
}

/// Sample quantile with linear interpolation between order statistics
/// (Hyndman–Fan type 7). `sorted` must be ascending.
pub fn quantile(sorted: &[f64], q: f64) -> f64 {
    match sorted.len() {
        0 => f64::NAN,
        1 => sorted[0],
        len => {
            let h = (len - 1) as f64 * q.clamp(0.0, 1.0);
            let lo = h.floor() as usize;
            let hi = (lo + 1).min(len - 1);
            sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
        }
    }
}

pub fn sorted(xs: &[f64]) -> Vec<f64> {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    v
}

/// One-sided Clopper–Pearson upper bound on a binomial proportion after
/// `hits` successes in `trials`.
pub fn clopper_pearson_upper(hits: usize, trials: usize, level: f64) -> f64 {
    if trials == 0 || hits >= trials {
        return 1.0;
    }
    Beta::new(hits as f64 + 1.0, (trials - hits) as f64)
        .expect("positive shapes")
        .inverse_cdf(level)
}

/// Two-sided Clopper–Pearson interval.
pub fn clopper_pearson(hits: usize, trials: usize, level: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let alpha = 1.0 - level;
    let lo = if hits == 0 {
        0.0
    } else {
        Beta::new(hits as f64, (trials - hits + 1) as f64)
            .expect("positive shapes")
            .inverse_cdf(alpha / 2.0)
    };
    let hi = if hits == trials {
        1.0
    } else {
        Beta::new(hits as f64 + 1.0, (trials - hits) as f64)
            .expect("positive shapes")
            .inverse_cdf(1.0 - alpha / 2.0)
    };
    (lo, hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson goodness-of-fit of observed counts against cell probabilities.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> Result<ChiSquareTest> {
    if observed.len() != probs.len() {
        return Err(Error::DimensionMismatch {
            expected: probs.len(),
            got: observed.len(),
        });
    }
    if observed.len() < 2 {
        return Err(Error::OutOfRange("goodness of fit needs at least two cells".into()));
    }
    let total: u64 = observed.iter().sum();
    let mut stat = CompensatedSum::new();
    for (&o, &p) in observed.iter().zip(probs) {
        let e = p * total as f64;
        if !(e > 0.0) {
            return Err(Error::OutOfRange("expected cell count must be positive".into()));
        }
        stat.add((o as f64 - e).powi(2) / e);
    }
    let statistic = stat.value();
    let dof = observed.len() - 1;
    let p_value = ChiSquared::new(dof as f64).expect("dof >= 1").sf(statistic);
    Ok(ChiSquareTest {
        statistic,
        dof,
        p_value,
    })
}

/// Ordinary least squares `y = a + b x`; returns `(a, b, r^2)`.
pub fn linear_fit(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    if x.len() != y.len() || x.len() < 2 {
        return None;
    }
    let n = x.len() as f64;
    let mx = compensated_sum(x.iter().copied()) / n;
    let my = compensated_sum(y.iter().copied()) / n;
    let sxx = compensated_sum(x.iter().map(|a| (a - mx) * (a - mx)));
    let sxy = compensated_sum(x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)));
    let syy = compensated_sum(y.iter().map(|b| (b - my) * (b - my)));
    if sxx == 0.0 {
        return None;
    }
    let b = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    Some((my - b * mx, b, r2))
}
