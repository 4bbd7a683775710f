//! Relative entropy `S_n = -ln P_can(Gamma)` of the microcanonical law with
//! respect to the canonical law.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::ensembles::{calibrate, canonical_logprob};
use crate::enumeration::{exact_p_can_gamma, gamma_members, ENUMERATION_CAP};
use crate::error::{Error, Result};
use crate::graph::{is_graphical, pair_count, ConstraintKind, ConstraintSpec, Graph};
use crate::report::sig17;
use crate::schedule::SpecFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyMethod {
    ClosedForm,
    Enumeration,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EntropyReport {
    pub spec: ConstraintSpec,
    /// Nats.
    pub s_n: f64,
    pub method: EntropyMethod,
    /// `|Gamma|` when it fits in 128 bits.
    pub gamma_size: Option<u128>,
    pub log_gamma_size: f64,
    pub p_can_gamma_log: f64,
}

/// `C(m, k)` when it fits in a `u128`.
pub fn binomial_u128(m: u64, k: u64) -> Option<u128> {
    if k > m {
        return Some(0);
    }
    let k = k.min(m - k);
    let mut c: u128 = 1;
    for i in 1..=k as u128 {
        // c (m - k + i) / i is an integer; cancel gcd(c, i) first
        let g = gcd(c, i);
        c = (c / g).checked_mul((m as u128 - k as u128 + i) / (i / g))?;
    }
    Some(c)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// `ln k! - (k ln k - k + ln(2 pi k)/2)`
fn stirlerr(k: u64) -> f64 {
    let x = k as f64;
    if k <= 15 {
        let lnfact: f64 = (2..=k).map(|i| (i as f64).ln()).sum();
        return lnfact - (x * x.ln() - x + 0.5 * (2.0 * PI * x).ln());
    }
    let x2 = x * x;
    (1.0 / 12.0 - (1.0 / 360.0 - (1.0 / 1260.0 - (1.0 / 1680.0 - 1.0 / (1188.0 * x2)) / x2) / x2) / x2) / x
}

/// Closed form for the edge-count constraint with `p = L/M`:
/// `S = -[ln C(M, L) + L ln p + (M - L) ln(1 - p)]`.
pub fn relative_entropy_edge_count(n: usize, edges: usize) -> Result<EntropyReport> {
    let m = pair_count(n);
    if edges > m {
        return Err(Error::OutOfRange(format!("edge count {edges} outside [0, {m}]")));
    }
    let spec = ConstraintSpec::edge_count(n, edges);
    let gamma_size = binomial_u128(m as u64, edges as u64);
    if edges == 0 || edges == m {
        return Ok(EntropyReport {
            spec,
            s_n: 0.0,
            method: EntropyMethod::ClosedForm,
            gamma_size,
            log_gamma_size: 0.0,
            p_can_gamma_log: 0.0,
        });
    }
    let (l, mf) = (edges as f64, m as f64);
    let p = l / mf;
    let log_p_member = l * p.ln() + (mf - l) * (1.0 - p).ln();
    let (s_n, log_gamma_size) = match gamma_size {
        Some(c) => {
            let lc = (c as f64).ln();
            (-(lc + log_p_member), lc)
        }
        None => {
            // Stirling terms cancel against L ln p + (M-L) ln(1-p) exactly
            let s = 0.5 * (2.0 * PI * l * (mf - l) / mf).ln() + stirlerr(edges as u64) + stirlerr((m - edges) as u64)
                - stirlerr(m as u64);
            (s, -s - log_p_member)
        }
    };
    Ok(EntropyReport {
        spec,
        s_n,
        method: EntropyMethod::ClosedForm,
        gamma_size,
        log_gamma_size,
        p_can_gamma_log: -s_n,
    })
}

/// `S = -ln(|Gamma| P_can(g*))` over an exhaustively enumerated `Gamma`,
/// using that `P_can` is constant on `Gamma`.
pub fn relative_entropy_enumerated(spec: &ConstraintSpec, cap: usize) -> Result<EntropyReport> {
    spec.validate()?;
    let cap = cap.min(ENUMERATION_CAP);
    if spec.n > cap {
        return Err(Error::EnumerationCap { n: spec.n, cap });
    }
    if !is_graphical(spec) {
        return Err(Error::NotGraphical);
    }
    let members = gamma_members(spec, cap)?;
    let model = calibrate(spec)?;
    let per_graph = canonical_logprob(&model, &Graph::from_pair_mask(spec.n, members[0]))?;
    let log_gamma_size = (members.len() as f64).ln();
    let p_can_gamma_log = log_gamma_size + per_graph;
    Ok(EntropyReport {
        spec: spec.clone(),
        s_n: (-p_can_gamma_log).max(0.0),
        method: EntropyMethod::Enumeration,
        gamma_size: Some(members.len() as u128),
        log_gamma_size,
        p_can_gamma_log,
    })
}

/// Summed-probability variant of [`relative_entropy_enumerated`], kept as a
/// cross-check of the constancy shortcut.
pub fn relative_entropy_summed(spec: &ConstraintSpec, cap: usize) -> Result<f64> {
    let (_, mass) = exact_p_can_gamma(spec, cap)?;
    Ok(-mass.ln())
}

/// Closed form for edge counts, enumeration for degree constraints.
pub fn relative_entropy(spec: &ConstraintSpec, cap: usize) -> Result<EntropyReport> {
    match spec.kind {
        ConstraintKind::EdgeCount(l) => relative_entropy_edge_count(spec.n, l),
        ConstraintKind::DegreeSequence(_) => relative_entropy_enumerated(spec, cap),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub n: usize,
    #[serde(serialize_with = "sig17")]
    pub s_n: f64,
    #[serde(serialize_with = "sig17")]
    pub s_n_minus_log_n: f64,
    #[serde(serialize_with = "sig17")]
    pub s_n_over_nlogn: f64,
}

pub fn entropy_scaling_scan(family: &SpecFamily, n_list: &[usize], cap: usize) -> Result<Vec<ScanRow>> {
    n_list
        .iter()
        .map(|&n| {
            let s = relative_entropy(&family.at(n)?.spec, cap)?.s_n;
            let ln = (n as f64).ln();
            Ok(ScanRow {
                n,
                s_n: s,
                s_n_minus_log_n: s - ln,
                s_n_over_nlogn: s / (n as f64 * ln),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::DEFAULT_BUDGET;
    use crate::schedule::{DensitySchedule, FamilyKind};

    #[test]
    fn edge_count_examples() {
        let r = relative_entropy_edge_count(4, 3).unwrap();
        assert!((r.s_n - (64.0f64 / 20.0).ln()).abs() < 1e-12);
        assert!((r.s_n - 1.16315).abs() < 1e-5);
        assert_eq!(r.gamma_size, Some(20));
        for n in [1, 4, 30] {
            assert_eq!(relative_entropy_edge_count(n, 0).unwrap().s_n, 0.0);
            assert_eq!(relative_entropy_edge_count(n, pair_count(n)).unwrap().s_n, 0.0);
        }
        assert!(relative_entropy_edge_count(4, 7).is_err());
    }

    #[test]
    fn stirling_path_matches_exact_path() {
        // n = 40: M = 780, C(780, 390) overflows u128; compare neighbours that fit
        for (m, l) in [(120u64, 60u64), (100, 17), (128, 64)] {
            let exact = binomial_u128(m, l).unwrap();
            let lc = (exact as f64).ln();
            let (lf, mf) = (l as f64, m as f64);
            let via = 0.5 * (mf / (2.0 * PI * lf * (mf - lf))).ln() + stirlerr(m) - stirlerr(l) - stirlerr(m - l)
                + mf * mf.ln()
                - lf * lf.ln()
                - (mf - lf) * (mf - lf).ln();
            assert!((lc - via).abs() < 1e-10, "m={m} l={l}: {lc} vs {via}");
        }
        assert!(binomial_u128(780, 390).is_none());
        let s = relative_entropy_edge_count(40, 390).unwrap();
        assert!(s.gamma_size.is_none());
        // S = ln sqrt(2 pi M p(1-p)) + O(1/M)
        let approx = 0.5 * (2.0 * PI * 780.0 * 0.25).ln();
        assert!((s.s_n - approx).abs() < 1e-3);
    }

    #[test]
    fn stirlerr_is_continuous_at_switch() {
        let a = stirlerr(15);
        let b = stirlerr(16);
        assert!(a > b && b > 0.0 && (a * 15.0 - b * 16.0).abs() < 1e-3);
    }

    #[test]
    fn enumerated_examples() {
        let r = relative_entropy_enumerated(&ConstraintSpec::constant_degree(4, 2), DEFAULT_BUDGET).unwrap();
        assert!((r.s_n - (729.0f64 / 48.0).ln()).abs() < 1e-12);
        assert!((r.s_n - 2.72047).abs() < 1e-5);
        assert_eq!(r.gamma_size, Some(3));
        assert_eq!(relative_entropy_enumerated(&ConstraintSpec::constant_degree(4, 3), 6).unwrap().s_n, 0.0);
        assert_eq!(relative_entropy_enumerated(&ConstraintSpec::constant_degree(4, 0), 6).unwrap().s_n, 0.0);
        assert!(matches!(
            relative_entropy_enumerated(&ConstraintSpec::constant_degree(3, 1), 6),
            Err(Error::NotGraphical)
        ));
        assert!(relative_entropy_enumerated(&ConstraintSpec::constant_degree(8, 2), 6).is_err());
    }

    #[test]
    fn summed_and_shortcut_agree() {
        for spec in [
            ConstraintSpec::constant_degree(5, 2),
            ConstraintSpec::degree_sequence(vec![3, 2, 2, 2, 1]),
            ConstraintSpec::edge_count(5, 4),
        ] {
            let a = relative_entropy_enumerated(&spec, 6).unwrap().s_n;
            let b = relative_entropy_summed(&spec, 6).unwrap();
            assert!((a - b).abs() < 1e-12, "{spec:?}");
        }
        for l in 0..=pair_count(5) {
            let spec = ConstraintSpec::edge_count(5, l);
            let a = relative_entropy_enumerated(&spec, 6).unwrap().s_n;
            let b = relative_entropy_edge_count(5, l).unwrap().s_n;
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn complement_symmetry() {
        for n in 4..=6 {
            for d in 0..n {
                let spec = ConstraintSpec::constant_degree(n, d);
                if !is_graphical(&spec) {
                    continue;
                }
                let a = relative_entropy_enumerated(&spec, 6).unwrap().s_n;
                let b = relative_entropy_enumerated(&ConstraintSpec::constant_degree(n, n - 1 - d), 6)
                    .unwrap()
                    .s_n;
                assert!((a - b).abs() <= 1e-12, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn scan_examples() {
        let edge = SpecFamily::new(FamilyKind::EdgeCount, DensitySchedule::Constant { p: 0.5 });
        let rows = entropy_scaling_scan(&edge, &[100, 1000, 10_000], 6).unwrap();
        let (lo, hi) = rows
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r.s_n_minus_log_n), b.max(r.s_n_minus_log_n)));
        assert!(hi - lo <= 2.0);
        let row = &entropy_scaling_scan(&edge, &[4], 6).unwrap()[0];
        assert_eq!(row.s_n, relative_entropy_edge_count(4, 3).unwrap().s_n);

        let deg = SpecFamily::new(FamilyKind::DegreeSequence, DensitySchedule::FixedDegree { d: 2 });
        let edge = SpecFamily::new(FamilyKind::EdgeCount, DensitySchedule::FixedDegree { d: 2 });
        let ns = [4, 5, 6, 7];
        let d_rows = entropy_scaling_scan(&deg, &ns, 7).unwrap();
        let e_rows = entropy_scaling_scan(&edge, &ns, 7).unwrap();
        for w in d_rows.windows(2) {
            assert!(w[1].s_n > w[0].s_n);
        }
        for (d, e) in d_rows.iter().zip(&e_rows) {
            assert!(d.s_n > e.s_n, "n={}", d.n);
        }
    }
}
