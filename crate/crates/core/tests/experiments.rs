//! Monte Carlo estimates against exact values and against each other.

use ensemble_spectra::ensembles::{calibrate, MicSamplerConfig};
use ensemble_spectra::enumeration::{exact_expectation, golden_specs, Functional};
use ensemble_spectra::experiments::{
    canonical_map, degree_concentration_stat, delta_experiment, microcanonical_map, ratio_concentration,
    transfer_check, variance_check, ExperimentConfig, TransferEvent,
};
use ensemble_spectra::schedule::{DensitySchedule, FamilyKind, SpecFamily};
use ensemble_spectra::spectral::lambda1;
use ensemble_spectra::stats::Summary;

fn family(kind: FamilyKind, p: f64) -> SpecFamily {
    SpecFamily::new(kind, DensitySchedule::Constant { p })
}

/// `k` standard errors, plus a rounding floor for degenerate samples.
fn within(a: f64, b: f64, se: f64, k: f64) -> bool {
    (a - b).abs() <= k * se + 1e-9 * b.abs().max(1.0)
}

#[test]
fn sample_means_match_enumerated_expectations() {
    let samples = 20_000;
    for (k, spec) in golden_specs().into_iter().enumerate() {
        let exact = exact_expectation(&spec, &Functional::Lambda1).unwrap();
        let model = calibrate(&spec).unwrap();
        let f = |g: &ensemble_spectra::Graph| if g.edge_count() == 0 { Ok(0.0) } else { lambda1(g, 1e-12) };
        let can = Summary::of(&canonical_map(&model, 40 + k as u64, samples, f).unwrap());
        let mic = Summary::of(&microcanonical_map(&spec, &MicSamplerConfig::default(), 40 + k as u64, samples, f).unwrap());
        assert!(within(can.mean, exact.can, can.stderr, 4.0), "{spec:?}: can {} vs {}", can.mean, exact.can);
        assert!(within(mic.mean, exact.mic, mic.stderr, 4.0), "{spec:?}: mic {} vs {}", mic.mean, exact.mic);
    }
}

#[test]
fn reported_stderrs_cover_seed_to_seed_spread() {
    for kind in [FamilyKind::EdgeCount, FamilyKind::DegreeSequence] {
        let reps: Vec<_> = [1u64, 2, 3]
            .iter()
            .map(|&seed| delta_experiment(&ExperimentConfig::new(family(kind, 0.3), vec![30, 60], 200, seed)).unwrap())
            .collect();
        for i in 0..3 {
            for j in (i + 1)..3 {
                for (a, b) in reps[i].rows.iter().zip(&reps[j].rows) {
                    let comb = |x: f64, y: f64| (x * x + y * y).sqrt();
                    assert!(within(a.can_mean, b.can_mean, comb(a.can_stderr, b.can_stderr), 4.0));
                    assert!(within(a.delta, b.delta, comb(a.delta_stderr, b.delta_stderr), 4.0));
                    if a.mic_exact {
                        assert_eq!(a.mic_mean, b.mic_mean);
                    } else {
                        assert!(within(a.mic_mean, b.mic_mean, comb(a.mic_stderr, b.mic_stderr), 4.0));
                    }
                }
            }
        }
    }
}

#[test]
fn canonical_mean_dominates_regular_and_mean_field_values() {
    let cfg = ExperimentConfig::new(family(FamilyKind::DegreeSequence, 0.4), vec![40, 80, 160], 200, 17);
    for r in delta_experiment(&cfg).unwrap().rows {
        // E_mic = d and lambda1(E_can[A]) = (n-1)p coincide for the regular constraint
        let mean_field = (r.n - 1) as f64 * r.p;
        assert!((r.mic_mean - mean_field).abs() < 1e-9);
        assert!(r.mic_mean <= r.can_mean + 4.0 * r.can_stderr, "n = {}", r.n);
    }
    let cfg = ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.4), vec![40, 80], 300, 17);
    for r in delta_experiment(&cfg).unwrap().rows {
        assert!((r.n - 1) as f64 * r.p <= r.can_mean + 4.0 * r.can_stderr);
    }
}

#[test]
fn degree_shift_exceeds_edge_shift_at_n800() {
    let deg = delta_experiment(&ExperimentConfig::new(family(FamilyKind::DegreeSequence, 0.5), vec![800], 300, 8)).unwrap();
    let edge = delta_experiment(&ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.5), vec![800], 300, 8)).unwrap();
    assert!(deg.rows[0].delta > edge.rows[0].delta + 0.2, "{} vs {}", deg.rows[0].delta, edge.rows[0].delta);
}

#[test]
fn shift_variance_at_low_density() {
    let cfg = ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.2), vec![1000], 400, 21);
    let row = &variance_check(&cfg).unwrap()[0];
    assert!((row.target_variance - 0.32).abs() < 1e-12);
    assert!((0.22..=0.42).contains(&row.variance), "variance {}", row.variance);
    assert!(row.variance_ci_low <= row.variance && row.variance <= row.variance_ci_high);
}

#[test]
fn degree_fluctuation_scale_and_zero_hits() {
    let cfg = ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.5), vec![100, 200, 400], 2000, 5);
    let rep = degree_concentration_stat(&cfg).unwrap();
    let scaled: Vec<f64> = cfg
        .n_list
        .iter()
        .map(|&n| rep.quantile_row("degree_fluctuation", "can", n).unwrap().tail_scale)
        .collect();
    let (lo, hi) = (scaled.iter().cloned().fold(f64::INFINITY, f64::min), scaled.iter().cloned().fold(0.0, f64::max));
    assert!(hi <= 2.0 * lo, "{scaled:?}");
    for q in &rep.quantiles {
        assert!(q.q90 <= q.q99 && q.q99 <= q.q999 && q.q999 <= q.max);
    }

    let cfg = ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.5), vec![400], 10_000, 6);
    let rep = degree_concentration_stat(&cfg).unwrap();
    assert_eq!(rep.exceedance("two_sigma2_n2", "can", 400).unwrap().hits, 0);
}

#[test]
fn ratio_statistic_is_bounded_on_root_n_scale() {
    let cfg = ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.5), vec![100, 200, 400], 1000, 9);
    let rep = ratio_concentration(&cfg).unwrap();
    let q: Vec<f64> = cfg.n_list.iter().map(|&n| rep.quantile_row("ratio_deviation", "can", n).unwrap().q99).collect();
    let (lo, hi) = (q.iter().cloned().fold(f64::INFINITY, f64::min), q.iter().cloned().fold(0.0, f64::max));
    assert!(hi <= 1.5 * lo, "{q:?}");
}

/// With a fixed threshold the canonical violation probability does not
/// shrink while `e^{S_n}` grows like `n`, so the transfer ratio grows; a
/// `gamma ln n` threshold makes the violation probability fall faster.
#[test]
fn transfer_ratio_depends_on_threshold_growth() {
    let cfg = ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.5), vec![100, 400], 10_000, 3);
    let fixed = transfer_check(&cfg, TransferEvent::RatioDeviation { gamma: 1.0, log_power: 0.0 }).unwrap();
    let (a, b) = (&fixed.rows[0], &fixed.rows[1]);
    assert!(a.hits > 100 && b.hits > 100);
    assert!(b.ratio > a.ratio, "fixed gamma: {} -> {}", a.ratio, b.ratio);

    let growing = transfer_check(&cfg, TransferEvent::RatioDeviation { gamma: 0.35, log_power: 1.0 }).unwrap();
    let (a, b) = (&growing.rows[0], &growing.rows[1]);
    assert!(a.hits >= 50 && b.hits >= 5, "hits {} and {}", a.hits, b.hits);
    assert!(b.ratio < a.ratio, "log threshold: {} -> {}", a.ratio, b.ratio);
}

#[test]
fn degree_transfer_is_weaker_at_enumeration_scale() {
    let cfg = ExperimentConfig::new(family(FamilyKind::DegreeSequence, 0.5), vec![4, 5, 6], 10, 0);
    let deg = transfer_check(&cfg, TransferEvent::RatioDeviation { gamma: 0.5, log_power: 0.0 }).unwrap();
    let cfg = ExperimentConfig::new(family(FamilyKind::EdgeCount, 0.5), vec![4, 5, 6], 10, 0);
    let edge = transfer_check(&cfg, TransferEvent::Everything).unwrap();
    for (d, e) in deg.rows.iter().zip(&edge.rows) {
        assert!(d.exact);
        assert!(d.s_n > e.s_n);
        assert!((d.gamma_identity - 1.0).abs() < 1e-10);
    }
}
