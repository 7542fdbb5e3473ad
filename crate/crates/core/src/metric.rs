//! Finite metric spaces, partial maps into a target space, and Lipschitz
//! constants.
//!
//! A [`FiniteMetricSpace`] is a validated distance matrix. Every subset of a
//! finite space is closed, so any index set can serve as the domain of a
//! [`PartialMap`].

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Additive tolerance used for metric axioms and every bound certification.
pub const TOL: f64 = 1e-9;

/// A single broken metric axiom.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    NonFinite {
        i: usize,
        j: usize,
    },
    NegativeEntry {
        i: usize,
        j: usize,
    },
    NonzeroDiagonal {
        i: usize,
    },
    AsymmetricEntry {
        i: usize,
        j: usize,
    },
    ZeroOffDiagonal {
        i: usize,
        j: usize,
    },
    /// `d(i, j) > d(i, via) + d(via, j)` by `slack`.
    TriangleViolation {
        i: usize,
        j: usize,
        via: usize,
        slack: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { i, j } => write!(f, "NonFinite({i},{j})"),
            Violation::NegativeEntry { i, j } => write!(f, "NegativeEntry({i},{j})"),
            Violation::NonzeroDiagonal { i } => write!(f, "NonzeroDiagonal({i})"),
            Violation::AsymmetricEntry { i, j } => write!(f, "AsymmetricEntry({i},{j})"),
            Violation::ZeroOffDiagonal { i, j } => write!(f, "ZeroOffDiagonal({i},{j})"),
            Violation::TriangleViolation { i, j, via, slack } => {
                write!(f, "TriangleViolation({i},{j},{via}, slack={slack})")
            }
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("distance matrix is empty")]
    Empty,
    #[error("distance matrix is not square (row {row} has {len} entries, expected {expected})")]
    NonSquare { row: usize, len: usize, expected: usize },
    #[error("invalid metric: {}", fmt_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("labels length {labels} does not match space size {size}")]
    LabelCount { labels: usize, size: usize },
    #[error("point {i} has dimension {found}, expected {expected}")]
    DimensionMismatch { i: usize, found: usize, expected: usize },
    #[error("points {i} and {j} coincide")]
    DuplicatePoint { i: usize, j: usize },
    #[error("bad exponent p = {0}; need p >= 1 or infinity")]
    BadExponent(f64),
    #[error("graph is disconnected: vertex {unreachable} unreachable from 0")]
    Disconnected { unreachable: usize },
    #[error("edge {edge} has nonpositive weight {weight}")]
    NonpositiveWeight { edge: usize, weight: f64 },
    #[error("edge {edge} references vertex {vertex} outside 0..{n}")]
    EdgeOutOfRange { edge: usize, vertex: usize, n: usize },
    #[error("edge {edge} is a self-loop at {vertex}")]
    SelfLoop { edge: usize, vertex: usize },
    #[error("subset is empty")]
    EmptySubset,
    #[error("point {0} lies in the subset")]
    PointInSubset(usize),
    #[error("index {index} out of range for space of size {size}")]
    IndexOutOfRange { index: usize, size: usize },
    #[error("domain is not strictly increasing at position {0}")]
    UnsortedDomain(usize),
    #[error("map has {values} values for {domain} domain points")]
    ValueCount { domain: usize, values: usize },
    #[error("value {position} does not fit target {target}")]
    BadValue { position: usize, target: String },
}

fn fmt_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Distance matrix satisfying the metric axioms (not a pseudometric).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    size: usize,
    dist: Vec<f64>,
    labels: Option<Vec<String>>,
}

impl FiniteMetricSpace {
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.size + j]
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, MetricError> {
        if labels.len() != self.size {
            return Err(MetricError::LabelCount {
                labels: labels.len(),
                size: self.size,
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.dist.chunks(self.size).map(<[f64]>::to_vec).collect()
    }

    /// Largest pairwise distance.
    pub fn diameter(&self) -> f64 {
        self.dist.iter().copied().fold(0.0, f64::max)
    }

    /// `size × size` matrix of the metric restricted to `indices`, in order.
    pub fn restrict(&self, indices: &[usize]) -> Result<FiniteMetricSpace, MetricError> {
        for &i in indices {
            self.check_index(i)?;
        }
        let k = indices.len();
        let mut dist = Vec::with_capacity(k * k);
        for &a in indices {
            for &b in indices {
                dist.push(self.d(a, b));
            }
        }
        let labels = self
            .labels
            .as_ref()
            .map(|l| indices.iter().map(|&i| l[i].clone()).collect());
        validate_flat(k, dist).map(|s| FiniteMetricSpace { labels, ..s })
    }

    pub(crate) fn check_index(&self, i: usize) -> Result<(), MetricError> {
        if i >= self.size {
            Err(MetricError::IndexOutOfRange {
                index: i,
                size: self.size,
            })
        } else {
            Ok(())
        }
    }
}

/// Validates a square matrix against the metric axioms, collecting every
/// violation rather than stopping at the first.
pub fn validate_metric(matrix: &[Vec<f64>]) -> Result<FiniteMetricSpace, MetricError> {
    let n = matrix.len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            return Err(MetricError::NonSquare {
                row,
                len: r.len(),
                expected: n,
            });
        }
    }
    validate_flat(n, matrix.iter().flatten().copied().collect())
}

fn validate_flat(n: usize, dist: Vec<f64>) -> Result<FiniteMetricSpace, MetricError> {
    if n == 0 {
        return Err(MetricError::Empty);
    }
    let d = |i: usize, j: usize| dist[i * n + j];
    let mut violations = Vec::new();
    let mut entries_ok = true;
    for i in 0..n {
        for j in 0..n {
            let v = d(i, j);
            if !v.is_finite() {
                violations.push(Violation::NonFinite { i, j });
                entries_ok = false;
            } else if v < 0.0 {
                violations.push(Violation::NegativeEntry { i, j });
                entries_ok = false;
            }
        }
    }
    if !entries_ok {
        return Err(MetricError::Invalid(violations));
    }
    for i in 0..n {
        if d(i, i) != 0.0 {
            violations.push(Violation::NonzeroDiagonal { i });
        }
        for j in i + 1..n {
            if d(i, j) != d(j, i) {
                violations.push(Violation::AsymmetricEntry { i, j });
            }
            if d(i, j) == 0.0 || d(j, i) == 0.0 {
                violations.push(Violation::ZeroOffDiagonal { i, j });
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for via in 0..n {
                if via == i || via == j {
                    continue;
                }
                let slack = d(i, j) - (d(i, via) + d(via, j));
                if slack > TOL {
                    violations.push(Violation::TriangleViolation { i, j, via, slack });
                }
            }
        }
    }
    if violations.is_empty() {
        Ok(FiniteMetricSpace {
            size: n,
            dist,
            labels: None,
        })
    } else {
        Err(MetricError::Invalid(violations))
    }
}

/// The codomain `(N, d_N)` of a map.
#[derive(Debug, Clone, PartialEq)]
pub enum TargetSpace {
    Euclidean {
        dim: usize,
    },
    /// Euclidean of dimension one; the only target McShane extension accepts.
    RealLine,
    Finite(Arc<FiniteMetricSpace>),
}

/// A point of a [`TargetSpace`].
#[derive(Debug, Clone, PartialEq)]
pub enum TargetPoint {
    Coords(Vec<f64>),
    Index(usize),
}

impl TargetPoint {
    pub fn coords(&self) -> Option<&[f64]> {
        match self {
            TargetPoint::Coords(c) => Some(c),
            TargetPoint::Index(_) => None,
        }
    }

    pub fn index(&self) -> Option<usize> {
        match self {
            TargetPoint::Index(i) => Some(*i),
            TargetPoint::Coords(_) => None,
        }
    }
}

impl TargetSpace {
    /// Two points at distance `d`.
    pub fn two_point(d: f64) -> Result<Self, MetricError> {
        Self::equilateral(2, d)
    }

    /// `k` points at mutual distance `d`.
    pub fn equilateral(k: usize, d: f64) -> Result<Self, MetricError> {
        let rows = (0..k)
            .map(|i| (0..k).map(|j| if i == j { 0.0 } else { d }).collect())
            .collect::<Vec<Vec<f64>>>();
        Ok(TargetSpace::Finite(Arc::new(validate_metric(&rows)?)))
    }

    /// Coordinate dimension for vector targets.
    pub fn dim(&self) -> Option<usize> {
        match self {
            TargetSpace::Euclidean { dim } => Some(*dim),
            TargetSpace::RealLine => Some(1),
            TargetSpace::Finite(_) => None,
        }
    }

    pub fn finite(&self) -> Option<&FiniteMetricSpace> {
        match self {
            TargetSpace::Finite(s) => Some(s),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            TargetSpace::Euclidean { dim } => format!("euclidean:{dim}"),
            TargetSpace::RealLine => "real-line".to_owned(),
            TargetSpace::Finite(s) => format!("finite:{}", s.size()),
        }
    }

    pub fn accepts(&self, p: &TargetPoint) -> bool {
        match (self, p) {
            (TargetSpace::Finite(s), TargetPoint::Index(i)) => *i < s.size(),
            (TargetSpace::Euclidean { .. } | TargetSpace::RealLine, TargetPoint::Coords(c)) => {
                Some(c.len()) == self.dim() && c.iter().all(|x| x.is_finite())
            }
            _ => false,
        }
    }

    /// Distance between two points already accepted by this target.
    pub fn distance(&self, a: &TargetPoint, b: &TargetPoint) -> f64 {
        match (a, b) {
            (TargetPoint::Index(i), TargetPoint::Index(j)) => {
                self.finite().expect("index points need a finite target").d(*i, *j)
            }
            (TargetPoint::Coords(x), TargetPoint::Coords(y)) => euclidean(x, y),
            _ => panic!("mixed target point kinds"),
        }
    }
}

pub(crate) fn euclidean(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt()
}

/// A map `φ: S → N` defined on a subset `S` of a finite source space.
#[derive(Debug, Clone, PartialEq)]
pub struct PartialMap {
    source: Arc<FiniteMetricSpace>,
    domain: Vec<usize>,
    values: Vec<TargetPoint>,
    target: TargetSpace,
}

impl PartialMap {
    pub fn new(
        source: Arc<FiniteMetricSpace>,
        domain: Vec<usize>,
        values: Vec<TargetPoint>,
        target: TargetSpace,
    ) -> Result<Self, MetricError> {
        for (pos, &i) in domain.iter().enumerate() {
            source.check_index(i)?;
            if pos > 0 && domain[pos - 1] >= i {
                return Err(MetricError::UnsortedDomain(pos));
            }
        }
        if values.len() != domain.len() {
            return Err(MetricError::ValueCount {
                domain: domain.len(),
                values: values.len(),
            });
        }
        if let Some(position) = values.iter().position(|v| !target.accepts(v)) {
            return Err(MetricError::BadValue {
                position,
                target: target.name(),
            });
        }
        Ok(PartialMap {
            source,
            domain,
            values,
            target,
        })
    }

    /// Real-valued map; the target is [`TargetSpace::RealLine`].
    pub fn real(source: Arc<FiniteMetricSpace>, domain: Vec<usize>, values: &[f64]) -> Result<Self, MetricError> {
        let values = values.iter().map(|&v| TargetPoint::Coords(vec![v])).collect();
        Self::new(source, domain, values, TargetSpace::RealLine)
    }

    /// Map into a finite target given by point indices.
    pub fn indexed(
        source: Arc<FiniteMetricSpace>,
        domain: Vec<usize>,
        values: &[usize],
        target: TargetSpace,
    ) -> Result<Self, MetricError> {
        let values = values.iter().map(|&v| TargetPoint::Index(v)).collect();
        Self::new(source, domain, values, target)
    }

    pub fn source(&self) -> &Arc<FiniteMetricSpace> {
        &self.source
    }

    pub fn domain(&self) -> &[usize] {
        &self.domain
    }

    pub fn values(&self) -> &[TargetPoint] {
        &self.values
    }

    pub fn target(&self) -> &TargetSpace {
        &self.target
    }

    pub fn len(&self) -> usize {
        self.domain.len()
    }

    pub fn is_empty(&self) -> bool {
        self.domain.is_empty()
    }

    pub fn value_at(&self, point: usize) -> Option<&TargetPoint> {
        self.domain.binary_search(&point).ok().map(|k| &self.values[k])
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &TargetPoint)> {
        self.domain.iter().copied().zip(&self.values)
    }

    /// Restriction to the points of `subset` that lie in the domain.
    pub fn restrict(&self, subset: &[usize]) -> PartialMap {
        let (domain, values) = self
            .iter()
            .filter(|(i, _)| subset.contains(i))
            .map(|(i, v)| (i, v.clone()))
            .unzip();
        PartialMap {
            source: self.source.clone(),
            domain,
            values,
            target: self.target.clone(),
        }
    }

    /// Real values of a map into the real line (first coordinate otherwise).
    pub fn real_values(&self) -> Option<Vec<f64>> {
        self.values
            .iter()
            .map(|v| v.coords().and_then(|c| c.first().copied()))
            .collect()
    }

    pub fn index_values(&self) -> Option<Vec<usize>> {
        self.values.iter().map(TargetPoint::index).collect()
    }

    pub fn is_constant(&self) -> bool {
        self.values.windows(2).all(|w| w[0] == w[1])
    }
}

/// `‖φ‖_Lip` together with the pair that attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LipschitzReport {
    pub constant: f64,
    /// Source indices `(i, j)`, `i < j`; absent for domains of fewer than two points.
    pub witness_pair: Option<(usize, usize)>,
}

/// Exact Lipschitz constant of a map on a finite domain: the largest
/// distance ratio over unordered pairs. The witness is the lexicographically
/// smallest attaining pair.
pub fn lipschitz_constant(map: &PartialMap) -> LipschitzReport {
    let mut constant = 0.0;
    let mut witness_pair = None;
    for (a, (i, vi)) in map.iter().enumerate() {
        for (j, vj) in map.iter().skip(a + 1) {
            let ratio = map.target.distance(vi, vj) / map.source.d(i, j);
            if witness_pair.is_none() || ratio > constant {
                constant = ratio;
                witness_pair = Some((i, j));
            }
        }
    }
    LipschitzReport { constant, witness_pair }
}

/// `d(x, S)` and the smallest-index point of `S` attaining it.
pub fn distance_to_subset(space: &FiniteMetricSpace, subset: &[usize], x: usize) -> Result<(f64, usize), MetricError> {
    space.check_index(x)?;
    if subset.is_empty() {
        return Err(MetricError::EmptySubset);
    }
    if subset.contains(&x) {
        return Err(MetricError::PointInSubset(x));
    }
    let mut best: Option<(f64, usize)> = None;
    for &s in subset {
        space.check_index(s)?;
        let d = space.d(x, s);
        best = match best {
            Some((bd, bs)) if bd < d || (bd == d && bs < s) => Some((bd, bs)),
            _ => Some((d, s)),
        };
    }
    Ok(best.expect("nonempty subset"))
}

/// Exponent of an `ℓ_p` norm, `p ∈ [1, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self, MetricError> {
        if p.is_nan() || p < 1.0 {
            Err(MetricError::BadExponent(p))
        } else {
            Ok(Exponent(p))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn norm(self, diff: impl Iterator<Item = f64>) -> f64 {
        let p = self.0;
        if p.is_infinite() {
            diff.map(f64::abs).fold(0.0, f64::max)
        } else if p == 1.0 {
            diff.map(f64::abs).sum()
        } else if p == 2.0 {
            diff.map(|x| x * x).sum::<f64>().sqrt()
        } else {
            diff.map(|x| x.abs().powf(p)).sum::<f64>().powf(1.0 / p)
        }
    }
}

/// Pairwise `ℓ_p` distances of a point cloud.
pub fn points_to_metric(points: &[Vec<f64>], p: Exponent) -> Result<FiniteMetricSpace, MetricError> {
    let n = points.len();
    if n == 0 {
        return Err(MetricError::Empty);
    }
    let dim = points[0].len();
    for (i, pt) in points.iter().enumerate() {
        if pt.len() != dim {
            return Err(MetricError::DimensionMismatch {
                i,
                found: pt.len(),
                expected: dim,
            });
        }
    }
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = p.norm(points[i].iter().zip(&points[j]).map(|(a, b)| a - b));
            if d == 0.0 {
                return Err(MetricError::DuplicatePoint { i, j });
            }
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    validate_flat(n, dist)
}

/// A weighted undirected edge `(u, v, w)`.
pub type Edge = (usize, usize, f64);

/// Shortest-path metric of a connected weighted graph on `n` vertices.
pub fn graph_metric(edges: &[Edge], n: usize) -> Result<FiniteMetricSpace, MetricError> {
    if n == 0 {
        return Err(MetricError::Empty);
    }
    let mut dist = vec![f64::INFINITY; n * n];
    for i in 0..n {
        dist[i * n + i] = 0.0;
    }
    for (edge, &(u, v, w)) in edges.iter().enumerate() {
        for vertex in [u, v] {
            if vertex >= n {
                return Err(MetricError::EdgeOutOfRange { edge, vertex, n });
            }
        }
        if u == v {
            return Err(MetricError::SelfLoop { edge, vertex: u });
        }
        if w.is_nan() || w <= 0.0 {
            return Err(MetricError::NonpositiveWeight { edge, weight: w });
        }
        if w < dist[u * n + v] {
            dist[u * n + v] = w;
            dist[v * n + u] = w;
        }
    }
    // Floyd–Warshall
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if dik.is_infinite() {
                continue;
            }
            for j in 0..n {
                let through = dik + dist[k * n + j];
                if through < dist[i * n + j] {
                    dist[i * n + j] = through;
                }
            }
        }
    }
    if let Some(unreachable) = (0..n).find(|&j| dist[j].is_infinite()) {
        return Err(MetricError::Disconnected { unreachable });
    }
    validate_flat(n, dist)
}

/// Unit-weight path `0–1–…–m` on `m + 1` points.
pub fn unit_path(m: usize) -> FiniteMetricSpace {
    let edges: Vec<Edge> = (0..m).map(|i| (i, i + 1, 1.0)).collect();
    graph_metric(&edges, m + 1).expect("paths are connected")
}

/// Unit-weight cycle on `m >= 3` points.
pub fn unit_cycle(m: usize) -> FiniteMetricSpace {
    let edges: Vec<Edge> = (0..m).map(|i| (i, (i + 1) % m, 1.0)).collect();
    graph_metric(&edges, m).expect("cycles are connected")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn space(rows: &[&[f64]]) -> Result<FiniteMetricSpace, MetricError> {
        validate_metric(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn smallest_metric_space() {
        let s = space(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap();
        assert_eq!(s.size(), 2);
        assert_eq!(s.d(0, 1), 1.0);
    }

    #[test]
    fn asymmetric_entry_reported() {
        let err = space(&[&[0.0, 3.0], &[1.0, 0.0]]).unwrap_err();
        assert_eq!(
            err,
            MetricError::Invalid(vec![Violation::AsymmetricEntry { i: 0, j: 1 }])
        );
    }

    #[test]
    fn triangle_violation_with_slack() {
        let err = space(&[&[0.0, 1.0, 3.0], &[1.0, 0.0, 1.0], &[3.0, 1.0, 0.0]]).unwrap_err();
        assert_eq!(
            err,
            MetricError::Invalid(vec![Violation::TriangleViolation {
                i: 0,
                j: 2,
                via: 1,
                slack: 1.0
            }])
        );
    }

    #[test]
    fn all_violations_collected() {
        let err = space(&[&[0.0, 0.0, 5.0], &[0.0, 0.0, 1.0], &[4.0, 1.0, 0.0]]).unwrap_err();
        let MetricError::Invalid(v) = err else {
            panic!("expected violations")
        };
        assert!(v.contains(&Violation::ZeroOffDiagonal { i: 0, j: 1 }));
        assert!(v.contains(&Violation::AsymmetricEntry { i: 0, j: 2 }));
        assert!(v
            .iter()
            .any(|x| matches!(x, Violation::TriangleViolation { i: 0, j: 2, via: 1, .. })));
    }

    #[test]
    fn negative_and_nonsquare() {
        assert!(matches!(
            space(&[&[0.0, -1.0], &[-1.0, 0.0]]),
            Err(MetricError::Invalid(v)) if v[0] == Violation::NegativeEntry { i: 0, j: 1 }
        ));
        assert_eq!(
            space(&[&[0.0, 1.0], &[1.0]]),
            Err(MetricError::NonSquare {
                row: 1,
                len: 1,
                expected: 2
            })
        );
        assert_eq!(validate_metric(&[]), Err(MetricError::Empty));
    }

    #[test]
    fn triangle_within_tolerance_accepted() {
        assert!(space(&[&[0.0, 1.0, 2.0 + 5e-10], &[1.0, 0.0, 1.0], &[2.0 + 5e-10, 1.0, 0.0]]).is_ok());
    }

    #[test]
    fn lipschitz_single_pair() {
        let s = Arc::new(space(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap());
        let phi = PartialMap::real(s, vec![0, 1], &[0.0, 3.0]).unwrap();
        let r = lipschitz_constant(&phi);
        assert_eq!(r.constant, 3.0);
        assert_eq!(r.witness_pair, Some((0, 1)));
    }

    #[test]
    fn lipschitz_on_path() {
        let s = Arc::new(unit_path(2));
        let phi = PartialMap::real(s.clone(), vec![0, 1, 2], &[0.0, 1.0, 3.0]).unwrap();
        let r = lipschitz_constant(&phi);
        assert_eq!(r.constant, 2.0);
        assert_eq!(r.witness_pair, Some((1, 2)));

        let c = PartialMap::real(s.clone(), vec![0, 1, 2], &[4.0; 3]).unwrap();
        assert_eq!(lipschitz_constant(&c).constant, 0.0);

        let single = PartialMap::real(s, vec![1], &[4.0]).unwrap();
        assert_eq!(
            lipschitz_constant(&single),
            LipschitzReport {
                constant: 0.0,
                witness_pair: None
            }
        );
    }

    #[test]
    fn distance_to_subset_ties_and_errors() {
        let p = unit_path(2);
        assert_eq!(distance_to_subset(&p, &[0, 2], 1), Ok((1.0, 0)));
        assert_eq!(distance_to_subset(&p, &[0], 2), Ok((2.0, 0)));
        assert_eq!(distance_to_subset(&p, &[], 2), Err(MetricError::EmptySubset));
        assert_eq!(distance_to_subset(&p, &[0, 2], 2), Err(MetricError::PointInSubset(2)));
    }

    #[test]
    fn point_clouds() {
        let line = points_to_metric(&[vec![0.0], vec![1.0], vec![3.0]], Exponent::new(2.0).unwrap()).unwrap();
        assert_eq!(line.d(0, 2), 3.0);
        let manhattan = points_to_metric(
            &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            Exponent::new(1.0).unwrap(),
        )
        .unwrap();
        assert_eq!(manhattan.d(1, 2), 2.0);
        let pyth = points_to_metric(&[vec![0.0, 0.0], vec![3.0, 4.0]], Exponent::new(2.0).unwrap()).unwrap();
        assert_eq!(pyth.d(0, 1), 5.0);
        let cheb = points_to_metric(&[vec![0.0, 0.0], vec![3.0, 4.0]], Exponent::INFINITY).unwrap();
        assert_eq!(cheb.d(0, 1), 4.0);
    }

    #[test]
    fn point_cloud_errors() {
        let two = Exponent::new(2.0).unwrap();
        assert_eq!(
            points_to_metric(&[vec![0.0], vec![1.0, 2.0]], two),
            Err(MetricError::DimensionMismatch {
                i: 1,
                found: 2,
                expected: 1
            })
        );
        assert_eq!(
            points_to_metric(&[vec![1.0], vec![0.0], vec![1.0]], two),
            Err(MetricError::DuplicatePoint { i: 0, j: 2 })
        );
        assert_eq!(Exponent::new(0.5), Err(MetricError::BadExponent(0.5)));
    }

    #[test]
    fn graph_metrics() {
        assert_eq!(unit_path(2).d(0, 2), 2.0);
        let tri = graph_metric(&[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 3.0)], 3).unwrap();
        assert_eq!(tri.d(0, 2), 2.0);
        let c4 = unit_cycle(4);
        assert_eq!(c4.d(0, 2), 2.0);
        assert_eq!(c4.d(1, 3), 2.0);
        assert_eq!(c4.d(0, 3), 1.0);
    }

    #[test]
    fn graph_errors() {
        assert_eq!(
            graph_metric(&[(0, 1, 1.0)], 3),
            Err(MetricError::Disconnected { unreachable: 2 })
        );
        assert_eq!(
            graph_metric(&[(0, 1, 0.0)], 2),
            Err(MetricError::NonpositiveWeight { edge: 0, weight: 0.0 })
        );
        assert!(matches!(
            graph_metric(&[(0, 5, 1.0)], 2),
            Err(MetricError::EdgeOutOfRange { .. })
        ));
    }

    #[test]
    fn partial_map_validation() {
        let s = Arc::new(unit_path(3));
        assert_eq!(
            PartialMap::real(s.clone(), vec![2, 1], &[0.0, 1.0]).unwrap_err(),
            MetricError::UnsortedDomain(1)
        );
        assert_eq!(
            PartialMap::real(s.clone(), vec![1, 7], &[0.0, 1.0]).unwrap_err(),
            MetricError::IndexOutOfRange { index: 7, size: 4 }
        );
        let two = TargetSpace::two_point(1.0).unwrap();
        assert!(matches!(
            PartialMap::indexed(s.clone(), vec![0, 1], &[0, 2], two),
            Err(MetricError::BadValue { position: 1, .. })
        ));
        let bad_dim = PartialMap::new(
            s,
            vec![0],
            vec![TargetPoint::Coords(vec![0.0, 1.0])],
            TargetSpace::Euclidean { dim: 3 },
        );
        assert!(matches!(bad_dim, Err(MetricError::BadValue { position: 0, .. })));
    }

    #[test]
    fn restriction_keeps_labels() {
        let s = unit_path(3)
            .with_labels(vec!["a".into(), "b".into(), "c".into(), "d".into()])
            .unwrap();
        let r = s.restrict(&[3, 1]).unwrap();
        assert_eq!(r.d(0, 1), 2.0);
        assert_eq!(r.labels().unwrap(), ["d", "b"]);
    }
}
