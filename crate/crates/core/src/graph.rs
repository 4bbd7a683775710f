//! Labeled simple undirected graphs, degree sequences and constraints.
//!
//! Adjacency is stored as one bit row per vertex (64-bit words), so row
//! scans and degree counts are popcounts. Both halves of the symmetric
//! matrix are kept; the diagonal is always clear.

use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of unordered vertex pairs, `n(n-1)/2`.
#[inline]
pub const fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Lexicographic index of the pair `{i, j}` among all unordered pairs.
#[inline]
pub fn pair_index(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i < j { (i, j) } else { (j, i) };
    debug_assert!(j < n && i != j);
    i * n - i * (i + 1) / 2 + (j - i - 1)
}

/// All pairs `(i, j)` with `i < j`, ordered by [`pair_index`].
pub fn pairs(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(pair_count(n));
    for i in 0..n {
        for j in (i + 1)..n {
            out.push((i, j));
        }
    }
    out
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    words: usize,
    bits: Vec<u64>,
    edge_count: usize,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        Graph {
            n,
            words,
            bits: vec![0; n * words],
            edge_count: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Graph::empty(n);
        for i in 0..n {
            let row = &mut g.bits[i * g.words..(i + 1) * g.words];
            for (w, word) in row.iter_mut().enumerate() {
                let lo = w * 64;
                let hi = (lo + 64).min(n);
                if hi > lo {
                    *word = if hi - lo == 64 { u64::MAX } else { (1u64 << (hi - lo)) - 1 };
                }
            }
            row[i / 64] &= !(1u64 << (i % 64));
        }
        g.edge_count = pair_count(n);
        g
    }

    /// Builds a graph from an edge list, rejecting loops, duplicates and
    /// out-of-range vertex ids.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Graph::empty(n);
        for (i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidConstraint(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            if i == j {
                return Err(Error::InvalidConstraint(format!("self-loop at vertex {i}")));
            }
            if g.has_edge(i, j) {
                return Err(Error::InvalidConstraint(format!("duplicate edge ({i}, {j})")));
            }
            g.insert_edge(i, j);
        }
        Ok(g)
    }

    /// Graph whose edge set is the set bits of `mask` under [`pair_index`].
    pub fn from_pair_mask(n: usize, mask: u64) -> Self {
        assert!(pair_count(n) <= 64, "pair mask holds at most 64 pairs");
        let mut g = Graph::empty(n);
        let mut k = 0;
        for i in 0..n {
            for j in (i + 1)..n {
                if mask >> k & 1 == 1 {
                    g.insert_edge(i, j);
                }
                k += 1;
            }
        }
        g
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Bit row of vertex `i`.
    #[inline]
    pub fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words + j / 64] >> (j % 64) & 1 == 1
    }

    #[inline]
    pub fn degree(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.row(i).iter().enumerate().flat_map(|(w, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + tz)
            })
        })
    }

    /// Edges `(i, j)` with `i < j`, in row order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |i| self.neighbors(i).filter(move |&j| j > i).map(move |j| (i, j)))
    }

    pub fn degrees(&self) -> DegreeSequence {
        DegreeSequence((0..self.n).map(|i| self.degree(i)).collect())
    }

    /// Edges become non-edges and vice versa; the diagonal stays clear.
    pub fn complement(&self) -> Graph {
        let full = Graph::complete(self.n);
        let bits = self.bits.iter().zip(&full.bits).map(|(a, f)| !a & f).collect();
        Graph {
            n: self.n,
            words: self.words,
            bits,
            edge_count: pair_count(self.n) - self.edge_count,
        }
    }

    /// Caller guarantees `i != j` and that the edge is absent.
    #[inline]
    pub(crate) fn insert_edge(&mut self, i: usize, j: usize) {
        debug_assert!(i != j && !self.has_edge(i, j));
        self.bits[i * self.words + j / 64] |= 1 << (j % 64);
        self.bits[j * self.words + i / 64] |= 1 << (i % 64);
        self.edge_count += 1;
    }

    /// Caller guarantees the edge is present.
    #[inline]
    pub(crate) fn remove_edge(&mut self, i: usize, j: usize) {
        debug_assert!(self.has_edge(i, j));
        self.bits[i * self.words + j / 64] &= !(1 << (j % 64));
        self.bits[j * self.words + i / 64] &= !(1 << (i % 64));
        self.edge_count -= 1;
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// Vertex degrees `K_i`, indexed by vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DegreeSequence(pub Vec<usize>);

impl DegreeSequence {
    pub fn constant(n: usize, d: usize) -> Self {
        DegreeSequence(vec![d; n])
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.0.iter().map(|&k| (k * k) as f64).sum()
    }

    /// Common value if every entry is equal.
    pub fn constant_value(&self) -> Option<usize> {
        let first = *self.0.first()?;
        self.0.iter().all(|&k| k == first).then_some(first)
    }
}

impl Deref for DegreeSequence {
    type Target = [usize];
    fn deref(&self) -> &[usize] {
        &self.0
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum ConstraintKind {
    DegreeSequence(DegreeSequence),
    EdgeCount(usize),
}

/// A hard constraint `C(g) = C*` on graphs with `n` vertices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawConstraint", into = "RawConstraint")]
pub struct ConstraintSpec {
    pub n: usize,
    pub kind: ConstraintKind,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
enum RawKind {
    DegreeSequence,
    EdgeCount,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawTarget {
    Degrees(Vec<usize>),
    Edges(usize),
}

#[derive(Serialize, Deserialize)]
struct RawConstraint {
    n: usize,
    kind: RawKind,
    target: RawTarget,
}

impl TryFrom<RawConstraint> for ConstraintSpec {
    type Error = String;

    fn try_from(raw: RawConstraint) -> std::result::Result<Self, String> {
        match (raw.kind, raw.target) {
            (RawKind::DegreeSequence, RawTarget::Degrees(d)) => {
                if d.len() != raw.n {
                    return Err(format!("degree target has length {} but n = {}", d.len(), raw.n));
                }
                Ok(ConstraintSpec::degree_sequence(d))
            }
            (RawKind::EdgeCount, RawTarget::Edges(l)) => Ok(ConstraintSpec::edge_count(raw.n, l)),
            (RawKind::DegreeSequence, _) => Err("degree_sequence target must be an array".into()),
            (RawKind::EdgeCount, _) => Err("edge_count target must be an integer".into()),
        }
    }
}

impl From<ConstraintSpec> for RawConstraint {
    fn from(spec: ConstraintSpec) -> Self {
        let (kind, target) = match spec.kind {
            ConstraintKind::DegreeSequence(d) => (RawKind::DegreeSequence, RawTarget::Degrees(d.0)),
            ConstraintKind::EdgeCount(l) => (RawKind::EdgeCount, RawTarget::Edges(l)),
        };
        RawConstraint {
            n: spec.n,
            kind,
            target,
        }
    }
}

impl ConstraintSpec {
    pub fn edge_count(n: usize, edges: usize) -> Self {
        ConstraintSpec {
            n,
            kind: ConstraintKind::EdgeCount(edges),
        }
    }

    pub fn degree_sequence(degrees: Vec<usize>) -> Self {
        ConstraintSpec {
            n: degrees.len(),
            kind: ConstraintKind::DegreeSequence(DegreeSequence(degrees)),
        }
    }

    pub fn constant_degree(n: usize, d: usize) -> Self {
        ConstraintSpec::degree_sequence(vec![d; n])
    }

    /// Checks the range invariants (not graphicality).
    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            ConstraintKind::EdgeCount(l) => {
                if *l > pair_count(self.n) {
                    return Err(Error::InvalidConstraint(format!(
                        "edge count {l} exceeds n(n-1)/2 = {}",
                        pair_count(self.n)
                    )));
                }
            }
            ConstraintKind::DegreeSequence(d) => {
                if d.len() != self.n {
                    return Err(Error::DimensionMismatch {
                        expected: self.n,
                        got: d.len(),
                    });
                }
                if let Some(&k) = d.iter().find(|&&k| k + 1 > self.n) {
                    return Err(Error::InvalidConstraint(format!(
                        "degree {k} outside [0, {}]",
                        self.n.saturating_sub(1)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Number of edges every member of the constraint set has, when fixed.
    pub fn edge_total(&self) -> Option<usize> {
        match &self.kind {
            ConstraintKind::EdgeCount(l) => Some(*l),
            ConstraintKind::DegreeSequence(d) => {
                let s = d.total();
                (s % 2 == 0).then_some(s / 2)
            }
        }
    }

    pub fn is_degree(&self) -> bool {
        matches!(self.kind, ConstraintKind::DegreeSequence(_))
    }
}

/// Value of the constraint function on a graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstraintValue {
    Degrees(DegreeSequence),
    EdgeCount(usize),
}

pub fn constraint_value(g: &Graph, spec: &ConstraintSpec) -> Result<ConstraintValue> {
    if g.n() != spec.n {
        return Err(Error::DimensionMismatch {
            expected: spec.n,
            got: g.n(),
        });
    }
    Ok(match spec.kind {
        ConstraintKind::DegreeSequence(_) => ConstraintValue::Degrees(g.degrees()),
        ConstraintKind::EdgeCount(_) => ConstraintValue::EdgeCount(g.edge_count()),
    })
}

/// Whether at least one simple graph satisfies the constraint.
///
/// Degree sequences use the Erdős–Gallai inequalities together with the
/// even-sum condition.
pub fn is_graphical(spec: &ConstraintSpec) -> bool {
    if spec.validate().is_err() {
        return false;
    }
    match &spec.kind {
        ConstraintKind::EdgeCount(_) => true,
        ConstraintKind::DegreeSequence(d) => erdos_gallai(d),
    }
}

fn erdos_gallai(degrees: &[usize]) -> bool {
    if degrees.iter().sum::<usize>() % 2 == 1 {
        return false;
    }
    let mut d = degrees.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    let n = d.len();
    let mut lhs = 0usize;
    for k in 1..=n {
        lhs += d[k - 1];
        let rhs = k * (k - 1) + d[k..].iter().map(|&x| x.min(k)).sum::<usize>();
        if lhs > rhs {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle4() -> Graph {
        Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (0, 3)]).unwrap()
    }

    #[test]
    fn degree_examples() {
        assert_eq!(Graph::empty(3).degrees().0, vec![0, 0, 0]);
        assert_eq!(Graph::complete(4).degrees().0, vec![3, 3, 3, 3]);
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.degrees().0, vec![1, 2, 1]);
    }

    #[test]
    fn constraint_value_examples() {
        let k4 = Graph::complete(4);
        assert_eq!(
            constraint_value(&k4, &ConstraintSpec::edge_count(4, 6)).unwrap(),
            ConstraintValue::EdgeCount(6)
        );
        assert_eq!(
            constraint_value(&cycle4(), &ConstraintSpec::constant_degree(4, 2)).unwrap(),
            ConstraintValue::Degrees(DegreeSequence(vec![2, 2, 2, 2]))
        );
        assert_eq!(
            constraint_value(&Graph::empty(4), &ConstraintSpec::edge_count(4, 0)).unwrap(),
            ConstraintValue::EdgeCount(0)
        );
        assert!(matches!(
            constraint_value(&k4, &ConstraintSpec::edge_count(5, 6)),
            Err(Error::DimensionMismatch { expected: 5, got: 4 })
        ));
    }

    #[test]
    fn graphicality_examples() {
        assert!(!is_graphical(&ConstraintSpec::constant_degree(3, 1)));
        assert!(is_graphical(&ConstraintSpec::degree_sequence(vec![3, 3, 3, 3])));
        assert!(!is_graphical(&ConstraintSpec::degree_sequence(vec![3, 3, 1, 1])));
        assert!(!is_graphical(&ConstraintSpec::degree_sequence(vec![4, 1, 1, 0])));
        assert!(!is_graphical(&ConstraintSpec::edge_count(4, 7)));
        assert!(is_graphical(&ConstraintSpec::edge_count(4, 6)));
    }

    #[test]
    fn complement_examples() {
        assert_eq!(Graph::complete(4).complement(), Graph::empty(4));
        assert_eq!(Graph::empty(5).complement(), Graph::complete(5));
        let two_edges = Graph::from_edges(4, [(0, 2), (1, 3)]).unwrap();
        assert_eq!(cycle4().complement(), two_edges);
    }

    #[test]
    fn complement_is_an_involution_exhaustively() {
        for n in 1..=5 {
            for mask in 0..(1u64 << pair_count(n)) {
                let g = Graph::from_pair_mask(n, mask);
                let c = g.complement();
                assert_eq!(c.edge_count(), pair_count(n) - g.edge_count());
                assert!((0..n).all(|i| !c.has_edge(i, i)));
                assert_eq!(c.complement(), g);
            }
        }
    }

    #[test]
    fn wide_graphs_use_several_words() {
        let n = 130;
        let k = Graph::complete(n);
        assert_eq!(k.edge_count(), pair_count(n));
        assert!(k.degrees().iter().all(|&d| d == n - 1));
        assert_eq!(k.complement(), Graph::empty(n));
        let g = Graph::from_edges(n, [(0, 129), (64, 65), (63, 64)]).unwrap();
        assert_eq!(g.neighbors(64).collect::<Vec<_>>(), vec![63, 65]);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 129), (63, 64), (64, 65)]);
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn pair_index_is_lexicographic() {
        for n in 1..9 {
            for (k, &(i, j)) in pairs(n).iter().enumerate() {
                assert_eq!(pair_index(n, i, j), k);
                assert_eq!(pair_index(n, j, i), k);
            }
        }
    }

    #[test]
    fn constraint_json_format() {
        let spec: ConstraintSpec =
            serde_json::from_str(r#"{"n": 4, "kind": "degree_sequence", "target": [2, 2, 1, 1]}"#).unwrap();
        assert_eq!(spec, ConstraintSpec::degree_sequence(vec![2, 2, 1, 1]));
        let spec: ConstraintSpec = serde_json::from_str(r#"{"n": 4, "kind": "edge_count", "target": 3}"#).unwrap();
        assert_eq!(spec, ConstraintSpec::edge_count(4, 3));
        let back: ConstraintSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
        assert_eq!(back, spec);
        assert!(serde_json::from_str::<ConstraintSpec>(r#"{"n": 3, "kind": "degree_sequence", "target": [1, 1]}"#).is_err());
        assert!(serde_json::from_str::<ConstraintSpec>(r#"{"n": 3, "kind": "edge_count", "target": [1]}"#).is_err());
    }
}
