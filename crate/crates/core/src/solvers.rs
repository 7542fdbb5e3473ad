//! Extension oracles: given `φ` on `S` and a superset `T ⊇ S`, produce a map
//! on `T` that agrees with `φ` on `S` and has small Lipschitz constant.
//!
//! * [`mcshane_extend`]: exact for real-valued maps.
//! * [`euclidean_extend`]: minimax subgradient descent followed by a
//!   projection polish; reports an upper bound.
//! * [`brute_force_extend`]: exhaustive search over a finite target; exact.

use serde::Serialize;
use thiserror::Error;

use crate::metric::{lipschitz_constant, FiniteMetricSpace, MetricError, PartialMap, TargetPoint, TargetSpace};

/// Default cap on the number of assignments [`brute_force_extend`] may enumerate.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("solver needs a {expected} target, got {found}")]
    WrongTarget { expected: &'static str, found: String },
    #[error("iteration budget must be at least 1")]
    BudgetTooSmall,
    #[error("enumeration of {count} assignments exceeds the cap of {cap}")]
    EnumerationCapExceeded { count: u128, cap: u64 },
    #[error("domain point {0} is missing from the extension set")]
    NotSuperset(usize),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Optimality {
    Exact,
    UpperBound { gap: f64 },
    Heuristic,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtensionResult {
    /// Extension defined on the whole requested superset.
    pub map: PartialMap,
    /// `‖map‖_Lip`.
    pub constant: f64,
    pub optimality: Optimality,
    pub iterations: u64,
    /// Best objective after each solver step; only the Euclidean solver fills this.
    pub trace: Vec<f64>,
}

/// Parameters of [`euclidean_extend`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EuclideanConfig {
    /// Cap on subgradient iterations.
    pub budget: u64,
    /// Relative tolerance on the objective.
    pub tol: f64,
    /// Length of the plateau window that stops the subgradient phase.
    pub window: u64,
    /// Level attempts in the polish phase.
    pub polish_rounds: u32,
    /// Projection sweeps per level attempt.
    pub polish_sweeps: u32,
}

impl Default for EuclideanConfig {
    fn default() -> Self {
        EuclideanConfig {
            budget: 20_000,
            tol: 1e-4,
            window: 200,
            polish_rounds: 60,
            polish_sweeps: 400,
        }
    }
}

/// Choice of extension oracle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Oracle {
    McShane,
    Euclidean(EuclideanConfig),
    BruteForce { cap: u64 },
}

impl Oracle {
    pub fn name(&self) -> &'static str {
        match self {
            Oracle::McShane => "mcshane",
            Oracle::Euclidean(_) => "euclidean",
            Oracle::BruteForce { .. } => "brute",
        }
    }

    pub fn extend(&self, map: &PartialMap, to: &[usize]) -> Result<ExtensionResult, SolverError> {
        match self {
            Oracle::McShane => mcshane_extend(map, to),
            Oracle::Euclidean(cfg) => euclidean_extend(map, to, cfg),
            Oracle::BruteForce { cap } => brute_force_extend(map, to, *cap),
        }
    }
}

impl std::str::FromStr for Oracle {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mcshane" => Ok(Oracle::McShane),
            "euclidean" => Ok(Oracle::Euclidean(EuclideanConfig::default())),
            "brute" => Ok(Oracle::BruteForce {
                cap: DEFAULT_ENUMERATION_CAP,
            }),
            other => Err(format!(
                "unknown oracle {other:?} (expected mcshane, euclidean or brute)"
            )),
        }
    }
}

/// Sorted, deduplicated extension set containing the map's domain.
fn extension_set(map: &PartialMap, to: &[usize]) -> Result<Vec<usize>, SolverError> {
    let mut to = to.to_vec();
    to.sort_unstable();
    to.dedup();
    let size = map.source().size();
    if let Some(&index) = to.iter().find(|&&i| i >= size) {
        return Err(MetricError::IndexOutOfRange { index, size }.into());
    }
    if let Some(&missing) = map.domain().iter().find(|i| to.binary_search(i).is_err()) {
        return Err(SolverError::NotSuperset(missing));
    }
    Ok(to)
}

fn finish(
    map: &PartialMap,
    to: Vec<usize>,
    values: Vec<TargetPoint>,
    optimality: Optimality,
    iterations: u64,
    trace: Vec<f64>,
) -> Result<ExtensionResult, SolverError> {
    let ext = PartialMap::new(map.source().clone(), to, values, map.target().clone())?;
    let constant = lipschitz_constant(&ext).constant;
    Ok(ExtensionResult {
        map: ext,
        constant,
        optimality,
        iterations,
        trace,
    })
}

/// McShane extension `Φ(x) = min_s φ(s) + L·d(x, s)` of a real-valued map.
pub fn mcshane_extend(map: &PartialMap, to: &[usize]) -> Result<ExtensionResult, SolverError> {
    if *map.target() != TargetSpace::RealLine {
        return Err(SolverError::WrongTarget {
            expected: "real-line",
            found: map.target().name(),
        });
    }
    let to = extension_set(map, to)?;
    let lip = lipschitz_constant(map).constant;
    let phi = map.real_values().expect("real-line values");
    let space = map.source();
    let values = to
        .iter()
        .map(|&x| match map.value_at(x) {
            Some(v) => v.clone(),
            None => {
                let v = map
                    .domain()
                    .iter()
                    .zip(&phi)
                    .map(|(&s, &fs)| fs + lip * space.d(x, s))
                    .fold(f64::INFINITY, f64::min);
                TargetPoint::Coords(vec![if v.is_finite() { v } else { 0.0 }])
            }
        })
        .collect();
    finish(map, to, values, Optimality::Exact, 1, Vec::new())
}

/// Minimizes `F(Φ) = max_{u,v} ‖Φ(u) − Φ(v)‖ / d(u, v)` over extensions `Φ`.
///
/// Free points start at the inverse-distance-weighted mean of the images of
/// `S`. The subgradient phase steps along the active pair with step length
/// `c/√t`, `c` being the initial objective scaled by the active pair's
/// source distance, and stops once the best value has not improved by more
/// than `tol` over `window` iterations. A polish phase then targets a level
/// `t` below the best value, runs cyclic projections onto the pair
/// constraints `‖Φ(u) − Φ(v)‖ ≤ t·d(u, v)` from the best iterate, keeps
/// strict improvements and halves the decrement otherwise. The reported gap
/// is the last decrement that could not be realized (0 once `F = L`).
pub fn euclidean_extend(map: &PartialMap, to: &[usize], cfg: &EuclideanConfig) -> Result<ExtensionResult, SolverError> {
    let dim = match map.target() {
        TargetSpace::Euclidean { dim } => *dim,
        TargetSpace::RealLine => 1,
        other => {
            return Err(SolverError::WrongTarget {
                expected: "euclidean",
                found: other.name(),
            })
        }
    };
    if cfg.budget == 0 {
        return Err(SolverError::BudgetTooSmall);
    }
    let to = extension_set(map, to)?;
    let lip = lipschitz_constant(map).constant;
    let mut problem = MinimaxProblem::new(map.source(), map, &to, dim);

    if !problem.free.contains(&true) || lip == 0.0 {
        let values = to
            .iter()
            .map(|&x| match map.value_at(x) {
                Some(v) => v.clone(),
                None => TargetPoint::Coords(
                    map.values()
                        .first()
                        .and_then(TargetPoint::coords)
                        .map_or_else(|| vec![0.0; dim], <[f64]>::to_vec),
                ),
            })
            .collect();
        return finish(map, to, values, Optimality::Exact, 0, vec![lip]);
    }

    problem.initialize();
    let (f0, _) = problem.objective();
    let f0 = f0.max(lip);
    let mut best = problem.pos.clone();
    let mut best_f = f0;
    let mut trace = vec![f0];
    let mut iterations = 0u64;

    for t in 1..=cfg.budget {
        iterations = t;
        let (f, active) = problem.objective();
        let f = f.max(lip);
        if f < best_f {
            best_f = f;
            best.clone_from(&problem.pos);
        }
        trace.push(best_f);
        if best_f <= lip + crate::metric::TOL {
            break;
        }
        if t >= cfg.window {
            let old = trace[trace.len() - 1 - cfg.window as usize];
            if old - best_f <= cfg.tol * best_f {
                break;
            }
        }
        let Some((a, b)) = active else { break };
        let step = 0.5 * f0 * problem.pair_dist(a, b) / (t as f64).sqrt();
        problem.step_pair(a, b, step);
    }

    // Polish: aim below the best level, project, keep strict improvements,
    // halve the decrement on failure.
    let mut step = 0.5 * (best_f - lip);
    let mut rounds = 0;
    while rounds < cfg.polish_rounds && best_f > lip + crate::metric::TOL && step > 1e-12 * best_f {
        rounds += 1;
        let level = (best_f - step).max(lip);
        problem.pos.clone_from(&best);
        iterations += u64::from(problem.project(level, cfg.polish_sweeps));
        let (f, _) = problem.objective();
        let f = f.max(lip);
        if f < best_f {
            best_f = f;
            best.clone_from(&problem.pos);
            step = step.min(0.5 * (best_f - lip));
        } else {
            step *= 0.5;
        }
        trace.push(best_f);
    }
    let gap = if best_f > lip + crate::metric::TOL { step } else { 0.0 };

    problem.pos = best;
    let values = to
        .iter()
        .enumerate()
        .map(|(k, &x)| match map.value_at(x) {
            Some(v) => v.clone(),
            None => TargetPoint::Coords(problem.point(k).to_vec()),
        })
        .collect();
    finish(map, to, values, Optimality::UpperBound { gap }, iterations, trace)
}

/// Positions of all points of the extension set, flattened.
struct MinimaxProblem {
    dim: usize,
    n: usize,
    pos: Vec<f64>,
    free: Vec<bool>,
    dist: Vec<f64>,
    /// Pairs `(a, b)`, `a < b`, with at least one free endpoint.
    pairs: Vec<(usize, usize)>,
    anchors: Vec<usize>,
}

impl MinimaxProblem {
    fn new(space: &FiniteMetricSpace, map: &PartialMap, to: &[usize], dim: usize) -> Self {
        let n = to.len();
        let mut pos = vec![0.0; n * dim];
        let mut free = vec![true; n];
        let mut anchors = Vec::new();
        for (k, &x) in to.iter().enumerate() {
            if let Some(v) = map.value_at(x) {
                pos[k * dim..(k + 1) * dim].copy_from_slice(v.coords().expect("coordinate values"));
                free[k] = false;
                anchors.push(k);
            }
        }
        let mut dist = vec![0.0; n * n];
        for (a, &x) in to.iter().enumerate() {
            for (b, &y) in to.iter().enumerate() {
                dist[a * n + b] = space.d(x, y);
            }
        }
        let pairs = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|&(a, b)| free[a] || free[b])
            .collect();
        MinimaxProblem {
            dim,
            n,
            pos,
            free,
            dist,
            pairs,
            anchors,
        }
    }

    fn point(&self, k: usize) -> &[f64] {
        &self.pos[k * self.dim..(k + 1) * self.dim]
    }

    fn pair_dist(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.n + b]
    }

    fn gap(&self, a: usize, b: usize) -> f64 {
        crate::metric::euclidean(self.point(a), self.point(b))
    }

    fn initialize(&mut self) {
        for k in 0..self.n {
            if !self.free[k] {
                continue;
            }
            let mut acc = vec![0.0; self.dim];
            let mut total = 0.0;
            for &s in &self.anchors {
                let w = 1.0 / self.pair_dist(k, s);
                total += w;
                for (a, p) in acc.iter_mut().zip(self.point(s)) {
                    *a += w * p;
                }
            }
            if total > 0.0 {
                for (slot, a) in self.pos[k * self.dim..(k + 1) * self.dim].iter_mut().zip(acc) {
                    *slot = a / total;
                }
            }
        }
    }

    /// Largest ratio over pairs with a free endpoint and the first pair attaining it.
    fn objective(&self) -> (f64, Option<(usize, usize)>) {
        let mut best = 0.0;
        let mut arg = None;
        for &(a, b) in &self.pairs {
            let r = self.gap(a, b) / self.pair_dist(a, b);
            if arg.is_none() || r > best {
                best = r;
                arg = Some((a, b));
            }
        }
        (best, arg)
    }

    /// Pulls the active pair together by `step` in total.
    fn step_pair(&mut self, a: usize, b: usize, step: f64) {
        let len = self.gap(a, b);
        if len == 0.0 {
            return;
        }
        let dir: Vec<f64> = (0..self.dim)
            .map(|c| (self.pos[a * self.dim + c] - self.pos[b * self.dim + c]) / len)
            .collect();
        let (sa, sb) = match (self.free[a], self.free[b]) {
            (true, true) => (0.5 * step, 0.5 * step),
            (true, false) => (step, 0.0),
            (false, true) => (0.0, step),
            (false, false) => return,
        };
        for (c, d) in dir.iter().enumerate() {
            self.pos[a * self.dim + c] -= sa * d;
            self.pos[b * self.dim + c] += sb * d;
        }
    }

    /// Cyclic projections onto `‖Φ(a) − Φ(b)‖ ≤ level·d(a, b)`; returns sweeps used.
    fn project(&mut self, level: f64, sweeps: u32) -> u32 {
        for sweep in 1..=sweeps {
            let mut violated = false;
            for idx in 0..self.pairs.len() {
                let (a, b) = self.pairs[idx];
                let cap = level * self.pair_dist(a, b);
                let len = self.gap(a, b);
                if len > cap {
                    violated = true;
                    self.step_pair(a, b, len - cap);
                }
            }
            if !violated {
                return sweep;
            }
        }
        sweeps
    }
}

/// Exhaustive search for a best extension into a finite target.
///
/// Assignments of the new points are visited in lexicographic order (new
/// points ascending, most significant first) with branch-and-bound pruning;
/// the first minimizer found is the lexicographically smallest one.
pub fn brute_force_extend(map: &PartialMap, to: &[usize], cap: u64) -> Result<ExtensionResult, SolverError> {
    let Some(target) = map.target().finite() else {
        return Err(SolverError::WrongTarget {
            expected: "finite",
            found: map.target().name(),
        });
    };
    let to = extension_set(map, to)?;
    let new_points: Vec<usize> = to.iter().copied().filter(|x| map.value_at(*x).is_none()).collect();
    let count = enumeration_count(target.size(), new_points.len());
    if count > u128::from(cap) {
        return Err(SolverError::EnumerationCapExceeded { count, cap });
    }
    let fixed: Vec<(usize, usize)> = map
        .iter()
        .map(|(s, v)| (s, v.index().expect("finite values")))
        .collect();
    let base = lipschitz_constant(map).constant;
    let best = best_assignment(map.source(), target, &fixed, &new_points, base);
    let values = to
        .iter()
        .map(|&x| match map.value_at(x) {
            Some(v) => v.clone(),
            None => TargetPoint::Index(best.assignment[new_points.binary_search(&x).expect("new point")]),
        })
        .collect();
    finish(map, to, values, Optimality::Exact, best.nodes, Vec::new())
}

/// `k^m` saturating at `u128::MAX`.
pub fn enumeration_count(k: usize, m: usize) -> u128 {
    u32::try_from(m)
        .ok()
        .and_then(|m| (k as u128).checked_pow(m))
        .unwrap_or(u128::MAX)
}

#[derive(Debug, Clone)]
pub(crate) struct Assignment {
    pub assignment: Vec<usize>,
    pub constant: f64,
    pub nodes: u64,
}

/// Branch-and-bound core shared with the moduli scans. `fixed` holds
/// `(source point, target index)` pairs with Lipschitz constant `base`.
pub(crate) fn best_assignment(
    source: &FiniteMetricSpace,
    target: &FiniteMetricSpace,
    fixed: &[(usize, usize)],
    free: &[usize],
    base: f64,
) -> Assignment {
    struct Search<'a> {
        source: &'a FiniteMetricSpace,
        target: &'a FiniteMetricSpace,
        fixed: &'a [(usize, usize)],
        free: &'a [usize],
        current: Vec<usize>,
        best: Option<(f64, Vec<usize>)>,
        nodes: u64,
    }

    impl Search<'_> {
        fn descend(&mut self, depth: usize, partial: f64) {
            self.nodes += 1;
            if depth == self.free.len() {
                if self.best.as_ref().is_none_or(|(b, _)| partial < *b) {
                    self.best = Some((partial, self.current.clone()));
                }
                return;
            }
            let x = self.free[depth];
            for v in 0..self.target.size() {
                let mut worst = partial;
                for &(s, fs) in self.fixed {
                    worst = worst.max(self.target.d(v, fs) / self.source.d(x, s));
                }
                for (q, &y) in self.free[..depth].iter().enumerate() {
                    worst = worst.max(self.target.d(v, self.current[q]) / self.source.d(x, y));
                }
                if self.best.as_ref().is_some_and(|(b, _)| worst >= *b) {
                    continue;
                }
                self.current.push(v);
                self.descend(depth + 1, worst);
                self.current.pop();
            }
        }
    }

    let mut search = Search {
        source,
        target,
        fixed,
        free,
        current: Vec::with_capacity(free.len()),
        best: None,
        nodes: 0,
    };
    search.descend(0, base);
    let (constant, assignment) = search.best.expect("finite targets are nonempty");
    Assignment {
        assignment,
        constant,
        nodes: search.nodes,
    }
}
