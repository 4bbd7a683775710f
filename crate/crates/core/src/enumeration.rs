//! Exhaustive sweeps over all `2^(n(n-1)/2)` labeled graphs on `n <= 8`
//! vertices.
//!
//! Graph `mask` has pair `k` (in [`pair_index`](crate::graph::pair_index)
//! order) present iff bit `k` is set. Sweeps are split into fixed-size
//! chunks; chunk results are folded in mask order, so every number is the
//! same whatever the thread count.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ensembles::{calibrate, CanonicalModel, PairProbabilities};
use crate::error::{Error, Result};
use crate::graph::{pair_count, pairs, ConstraintKind, ConstraintSpec, Graph};
use crate::report::{self, sig17};
use crate::spectral::{self, DEFAULT_TOL};
use crate::stats::CompensatedSum;

/// Hard limit: 2^28 graphs at `n = 8`.
pub const ENUMERATION_CAP: usize = 8;
/// Largest `n` swept by default.
pub const DEFAULT_BUDGET: usize = 6;

const CHUNK: u64 = 1 << 12;

fn check_cap(n: usize, cap: usize) -> Result<()> {
    let cap = cap.min(ENUMERATION_CAP);
    if n > cap {
        return Err(Error::EnumerationCap { n, cap });
    }
    Ok(())
}

/// Folds `f` over every mask in `0..2^(n(n-1)/2)`; chunk partials are
/// combined left to right with `merge`.
pub fn fold_masks<T, F, M>(n: usize, init: impl Fn() -> T + Sync, f: F, merge: M) -> T
where
    T: Send,
    F: Fn(&mut T, u64) + Sync,
    M: Fn(T, T) -> T,
{
    let total = 1u64 << pair_count(n);
    let chunks = total.div_ceil(CHUNK);
    let partials: Vec<T> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = init();
            for mask in c * CHUNK..((c + 1) * CHUNK).min(total) {
                f(&mut acc, mask);
            }
            acc
        })
        .collect();
    partials.into_iter().fold(init(), merge)
}

/// Degrees of graph `mask` without materializing the graph.
fn mask_degrees(pair_list: &[(usize, usize)], mask: u64, out: &mut [u8; ENUMERATION_CAP]) {
    *out = [0; ENUMERATION_CAP];
    let mut m = mask;
    while m != 0 {
        let k = m.trailing_zeros() as usize;
        let (i, j) = pair_list[k];
        out[i] += 1;
        out[j] += 1;
        m &= m - 1;
    }
}

/// Exact membership test on masks.
struct MaskFilter {
    n: usize,
    pair_list: Vec<(usize, usize)>,
    kind: ConstraintKind,
}

impl MaskFilter {
    fn new(spec: &ConstraintSpec) -> Self {
        MaskFilter {
            n: spec.n,
            pair_list: pairs(spec.n),
            kind: spec.kind.clone(),
        }
    }

    fn contains(&self, mask: u64) -> bool {
        match &self.kind {
            ConstraintKind::EdgeCount(l) => mask.count_ones() as usize == *l,
            ConstraintKind::DegreeSequence(d) => {
                let total: usize = d.iter().sum();
                if mask.count_ones() as usize * 2 != total {
                    return false;
                }
                let mut deg = [0u8; ENUMERATION_CAP];
                mask_degrees(&self.pair_list, mask, &mut deg);
                d.iter().zip(&deg[..self.n]).all(|(&a, &b)| a == b as usize)
            }
        }
    }
}

/// Canonical probability of each mask.
struct MaskProbability {
    homogeneous: Option<Vec<f64>>,
    per_pair: Vec<f64>,
}

impl MaskProbability {
    fn new(model: &CanonicalModel) -> Self {
        let m = pair_count(model.n);
        match &model.pair_prob {
            PairProbabilities::Homogeneous(p) => {
                let table = (0..=m).map(|k| p.powi(k as i32) * (1.0 - p).powi((m - k) as i32)).collect();
                MaskProbability {
                    homogeneous: Some(table),
                    per_pair: Vec::new(),
                }
            }
            PairProbabilities::PerPair(v) => MaskProbability {
                homogeneous: None,
                per_pair: v.clone(),
            },
        }
    }

    fn prob(&self, mask: u64) -> f64 {
        if let Some(t) = &self.homogeneous {
            return t[mask.count_ones() as usize];
        }
        self.per_pair
            .iter()
            .enumerate()
            .map(|(k, &p)| if mask >> k & 1 == 1 { p } else { 1.0 - p })
            .product()
    }
}

/// `|Gamma|` by exhaustive iteration.
pub fn exact_gamma_size(spec: &ConstraintSpec) -> Result<u64> {
    exact_gamma_size_capped(spec, ENUMERATION_CAP)
}

pub fn exact_gamma_size_capped(spec: &ConstraintSpec, cap: usize) -> Result<u64> {
    spec.validate()?;
    check_cap(spec.n, cap)?;
    let filter = MaskFilter::new(spec);
    Ok(fold_masks(
        spec.n,
        || 0u64,
        |acc, mask| {
            if filter.contains(mask) {
                *acc += 1;
            }
        },
        |a, b| a + b,
    ))
}

/// Every graph in `Gamma`, in mask order.
pub fn gamma_members(spec: &ConstraintSpec, cap: usize) -> Result<Vec<u64>> {
    spec.validate()?;
    check_cap(spec.n, cap)?;
    let filter = MaskFilter::new(spec);
    Ok(fold_masks(
        spec.n,
        Vec::new,
        |acc, mask| {
            if filter.contains(mask) {
                acc.push(mask);
            }
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    ))
}

/// A real-valued graph statistic.
pub trait GraphFunctional: Sync {
    fn name(&self) -> String;
    fn eval(&self, g: &Graph) -> Result<f64>;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    Lambda1,
    Lambda2,
    /// `sum K^2 / sum K`, taken as 0 on the edgeless graph.
    DegreeRatio,
    EdgeCount,
}

impl Functional {
    pub const ALL: [Functional; 4] = [
        Functional::Lambda1,
        Functional::Lambda2,
        Functional::DegreeRatio,
        Functional::EdgeCount,
    ];
}

impl GraphFunctional for Functional {
    fn name(&self) -> String {
        match self {
            Functional::Lambda1 => "lambda1",
            Functional::Lambda2 => "lambda2",
            Functional::DegreeRatio => "degree_ratio",
            Functional::EdgeCount => "edge_count",
        }
        .into()
    }

    fn eval(&self, g: &Graph) -> Result<f64> {
        match self {
            Functional::Lambda1 => spectral::lambda1(g, DEFAULT_TOL),
            Functional::Lambda2 => spectral::lambda2(g, DEFAULT_TOL),
            Functional::DegreeRatio => match spectral::degree_ratio(g) {
                Err(Error::EmptyGraph) => Ok(0.0),
                r => r,
            },
            Functional::EdgeCount => Ok(g.edge_count() as f64),
        }
    }
}

/// A named closure as a functional.
pub struct Custom<F> {
    pub name: String,
    pub f: F,
}

impl<F: Fn(&Graph) -> f64 + Sync> GraphFunctional for Custom<F> {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn eval(&self, g: &Graph) -> Result<f64> {
        Ok((self.f)(g))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalValue {
    pub name: String,
    pub mic: f64,
    pub can: f64,
}

/// Exact laws of both ensembles for one constraint.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct EnsembleTable {
    pub n: usize,
    pub spec: ConstraintSpec,
    pub gamma_size: u64,
    pub p_can_gamma: f64,
    /// Canonical mass of the whole graph space; 1 up to rounding.
    pub total_probability: f64,
    pub values: Vec<FunctionalValue>,
}

impl EnsembleTable {
    pub fn value(&self, name: &str) -> Option<&FunctionalValue> {
        self.values.iter().find(|v| v.name == name)
    }
}

struct TableAcc {
    gamma: u64,
    p_gamma: CompensatedSum,
    total: CompensatedSum,
    mic: Vec<CompensatedSum>,
    can: Vec<CompensatedSum>,
    err: Option<Error>,
}

/// Exact canonical and microcanonical expectations of every functional.
pub fn ensemble_table(spec: &ConstraintSpec, functionals: &[&dyn GraphFunctional], cap: usize) -> Result<EnsembleTable> {
    check_cap(spec.n, cap)?;
    let model = calibrate(spec)?;
    let n = spec.n;
    let filter = MaskFilter::new(spec);
    let probs = MaskProbability::new(&model);
    let k = functionals.len();
    let acc = fold_masks(
        n,
        || TableAcc {
            gamma: 0,
            p_gamma: CompensatedSum::new(),
            total: CompensatedSum::new(),
            mic: vec![CompensatedSum::new(); k],
            can: vec![CompensatedSum::new(); k],
            err: None,
        },
        |acc, mask| {
            if acc.err.is_some() {
                return;
            }
            let g = Graph::from_pair_mask(n, mask);
            let p = probs.prob(mask);
            let member = filter.contains(mask);
            acc.total.add(p);
            if member {
                acc.gamma += 1;
                acc.p_gamma.add(p);
            }
            for (f, (mic, can)) in functionals.iter().zip(acc.mic.iter_mut().zip(acc.can.iter_mut())) {
                match f.eval(&g) {
                    Ok(v) => {
                        can.add(p * v);
                        if member {
                            mic.add(v);
                        }
                    }
                    Err(e) => {
                        acc.err = Some(e);
                        return;
                    }
                }
            }
        },
        |mut a, b| {
            a.err = a.err.or(b.err);
            a.gamma += b.gamma;
            a.p_gamma.add(b.p_gamma.value());
            a.total.add(b.total.value());
            for (x, y) in a.mic.iter_mut().zip(&b.mic) {
                x.add(y.value());
            }
            for (x, y) in a.can.iter_mut().zip(&b.can) {
                x.add(y.value());
            }
            a
        },
    );
    if let Some(e) = acc.err {
        return Err(e);
    }
    let values = functionals
        .iter()
        .zip(acc.mic.iter().zip(&acc.can))
        .map(|(f, (mic, can))| FunctionalValue {
            name: f.name(),
            mic: if acc.gamma > 0 { mic.value() / acc.gamma as f64 } else { f64::NAN },
            can: can.value(),
        })
        .collect();
    Ok(EnsembleTable {
        n,
        spec: spec.clone(),
        gamma_size: acc.gamma,
        p_can_gamma: acc.p_gamma.value(),
        total_probability: acc.total.value(),
        values,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactExpectation {
    pub mic: f64,
    pub can: f64,
    pub gamma_size: u64,
}

pub fn exact_expectation(spec: &ConstraintSpec, functional: &dyn GraphFunctional) -> Result<ExactExpectation> {
    let t = ensemble_table(spec, &[functional], ENUMERATION_CAP)?;
    Ok(ExactExpectation {
        mic: t.values[0].mic,
        can: t.values[0].can,
        gamma_size: t.gamma_size,
    })
}

/// Exact `P_can(Gamma)`.
pub fn exact_p_can_gamma(spec: &ConstraintSpec, cap: usize) -> Result<(u64, f64)> {
    check_cap(spec.n, cap)?;
    let model = calibrate(spec)?;
    let filter = MaskFilter::new(spec);
    let probs = MaskProbability::new(&model);
    let (count, mass) = fold_masks(
        spec.n,
        || (0u64, CompensatedSum::new()),
        |acc, mask| {
            if filter.contains(mask) {
                acc.0 += 1;
                acc.1.add(probs.prob(mask));
            }
        },
        |mut a, b| {
            a.0 += b.0;
            a.1.add(b.1.value());
            a
        },
    );
    Ok((count, mass.value()))
}

/// Exact canonical probability of an arbitrary event over the whole graph space.
pub fn exact_p_can<F>(spec: &ConstraintSpec, cap: usize, event: F) -> Result<f64>
where
    F: Fn(&Graph) -> bool + Sync,
{
    check_cap(spec.n, cap)?;
    let model = calibrate(spec)?;
    let probs = MaskProbability::new(&model);
    let n = spec.n;
    let mass = fold_masks(
        n,
        CompensatedSum::new,
        |acc, mask| {
            if event(&Graph::from_pair_mask(n, mask)) {
                acc.add(probs.prob(mask));
            }
        },
        |mut a, b| {
            a.add(b.value());
            a
        },
    );
    Ok(mass.value())
}

/// Events `B` inside `Gamma` used to exercise the conditional-law identity.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Event {
    Everything,
    Nothing,
    EdgePresent(usize, usize),
    DegreeAtLeast { vertex: usize, threshold: usize },
    Lambda1AtLeast(f64),
}

impl Event {
    fn needs_lambda1(&self) -> bool {
        matches!(self, Event::Lambda1AtLeast(_))
    }

    fn holds(&self, g: &Graph, lambda1: f64) -> bool {
        match *self {
            Event::Everything => true,
            Event::Nothing => false,
            Event::EdgePresent(i, j) => g.has_edge(i, j),
            Event::DegreeAtLeast { vertex, threshold } => g.degree(vertex) >= threshold,
            Event::Lambda1AtLeast(t) => lambda1 >= t,
        }
    }
}

/// Single-edge presence for every pair, degree thresholds for every vertex,
/// and a grid of `lambda1` thresholds.
pub fn event_family(n: usize) -> Vec<Event> {
    let mut out = vec![Event::Everything, Event::Nothing];
    out.extend(pairs(n).into_iter().map(|(i, j)| Event::EdgePresent(i, j)));
    for vertex in 0..n {
        for threshold in 1..n {
            out.push(Event::DegreeAtLeast { vertex, threshold });
        }
    }
    for k in 1..(2 * n - 2) {
        out.push(Event::Lambda1AtLeast(0.5 * k as f64));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferCheck {
    pub event: Event,
    /// `|B| / |Gamma|`
    pub p_mic: f64,
    /// `P_can(B) / P_can(Gamma)`
    pub conditional: f64,
    pub abs_error: f64,
}

/// Both sides of `P_mic(B) = P_can(B) / P_can(Gamma)` for `B = {g in Gamma : event(g)}`.
pub fn transfer_identity_check(spec: &ConstraintSpec, events: &[Event], cap: usize) -> Result<Vec<TransferCheck>> {
    let members = gamma_members(spec, cap)?;
    if members.is_empty() {
        return Err(Error::NotGraphical);
    }
    let model = calibrate(spec)?;
    let probs = MaskProbability::new(&model);
    let need_l1 = events.iter().any(Event::needs_lambda1);
    let n = spec.n;

    let mut p_gamma = CompensatedSum::new();
    let mut hits = vec![0u64; events.len()];
    let mut mass = vec![CompensatedSum::new(); events.len()];
    for &mask in &members {
        let g = Graph::from_pair_mask(n, mask);
        let p = probs.prob(mask);
        p_gamma.add(p);
        let l1 = if need_l1 { spectral::lambda1(&g, DEFAULT_TOL)? } else { f64::NAN };
        for (e, event) in events.iter().enumerate() {
            if event.holds(&g, l1) {
                hits[e] += 1;
                mass[e].add(p);
            }
        }
    }
    let p_gamma = p_gamma.value();
    let size = members.len() as f64;
    Ok(events
        .iter()
        .zip(hits.iter().zip(&mass))
        .map(|(event, (&h, m))| {
            let p_mic = h as f64 / size;
            let conditional = m.value() / p_gamma;
            TransferCheck {
                event: event.clone(),
                p_mic,
                conditional,
                abs_error: (p_mic - conditional).abs(),
            }
        })
        .collect())
}

/// Every distinct degree sequence realized on `n` vertices, sorted.
pub fn realizable_degree_sequences(n: usize, cap: usize) -> Result<Vec<Vec<usize>>> {
    check_cap(n, cap)?;
    let pair_list = pairs(n);
    let mut seqs = fold_masks(
        n,
        std::collections::BTreeSet::new,
        |acc, mask| {
            let mut deg = [0u8; ENUMERATION_CAP];
            mask_degrees(&pair_list, mask, &mut deg);
            acc.insert(deg[..n].iter().map(|&d| d as usize).collect::<Vec<_>>());
        },
        |mut a, mut b| {
            a.append(&mut b);
            a
        },
    );
    Ok(std::mem::take(&mut seqs).into_iter().collect())
}

/// One row of the committed golden file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenRow {
    pub spec_hash: String,
    pub functional: String,
    #[serde(serialize_with = "sig17")]
    pub mic_value: f64,
    #[serde(serialize_with = "sig17")]
    pub can_value: f64,
    pub gamma_size: u64,
}

/// Constraints whose exact expectations are pinned in the golden file.
pub fn golden_specs() -> Vec<ConstraintSpec> {
    vec![
        ConstraintSpec::constant_degree(4, 2),
        ConstraintSpec::edge_count(4, 3),
        ConstraintSpec::edge_count(5, 5),
        ConstraintSpec::constant_degree(5, 2),
        ConstraintSpec::degree_sequence(vec![2, 2, 1, 1]),
        ConstraintSpec::degree_sequence(vec![3, 2, 2, 2, 1]),
        ConstraintSpec::constant_degree(6, 3),
        ConstraintSpec::edge_count(6, 7),
    ]
}

pub fn golden_rows() -> Result<Vec<GoldenRow>> {
    let fs: Vec<&dyn GraphFunctional> = Functional::ALL.iter().map(|f| f as &dyn GraphFunctional).collect();
    let mut rows = Vec::new();
    for spec in golden_specs() {
        let table = ensemble_table(&spec, &fs, ENUMERATION_CAP)?;
        let hash = report::spec_hash(&spec);
        rows.extend(table.values.into_iter().map(|v| GoldenRow {
            spec_hash: hash.clone(),
            functional: v.name,
            mic_value: v.mic,
            can_value: v.can,
            gamma_size: table.gamma_size,
        }));
    }
    Ok(rows)
}

pub fn write_golden(path: &Path) -> Result<Vec<GoldenRow>> {
    let rows = golden_rows()?;
    report::write_csv(path, &rows)?;
    Ok(rows)
}
