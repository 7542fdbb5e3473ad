//! The gluing construction: extend `φ: S → N` to `S ∪ {x_1, …, x_n}` by
//! extending `φ` from near-nearest proxies `y_j ∈ S` onto the new points and
//! gluing the result to `φ`.
//!
//! Every run is audited. Pairs fall into three classes: inside `S` (bounded
//! by `L`), inside `{y} ∪ {x}` with at least one new point (bounded by
//! `C_Ψ`), and between `S \ {y}` and the new points (bounded by
//! `(2+δ)L + (1+δ)C_Ψ`). For the last class the full inequality chain is
//! replayed and each step checked.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::metric::{distance_to_subset, lipschitz_constant, FiniteMetricSpace, MetricError, PartialMap, TOL};
use crate::solvers::{ExtensionResult, Oracle, SolverError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GluingError {
    #[error("subset is empty")]
    EmptySubset,
    #[error("new point x_{position} = {point} lies in the subset")]
    XInS { position: usize, point: usize },
    #[error("delta must be a finite nonnegative number, got {0}")]
    BadDelta(f64),
    #[error("extension disagrees with the map at point {point} by {discrepancy}")]
    AgreementViolation { point: usize, discrepancy: f64 },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("certification failed on pair {pair:?}: ratio {achieved_ratio} exceeds {certified_ratio}")]
    CertificationFailure {
        pair: (usize, usize),
        achieved_ratio: f64,
        certified_ratio: f64,
    },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

/// Picks `y_j ∈ S` with `d(y_j, x_j) ≤ (1+δ)·d(x_j, S)`.
///
/// Without `perturb` (or with `δ = 0`) this is the exact nearest point,
/// smallest index on ties. With `perturb` and `δ > 0` it is the largest-index
/// point still inside the slack, so the chain is exercised at positive slack.
pub fn select_near_nearest(
    space: &FiniteMetricSpace,
    subset: &[usize],
    xs: &[usize],
    delta: f64,
    perturb: bool,
) -> Result<Vec<usize>, GluingError> {
    if !(delta.is_finite() && delta >= 0.0) {
        return Err(GluingError::BadDelta(delta));
    }
    if subset.is_empty() {
        return Err(GluingError::EmptySubset);
    }
    xs.iter()
        .enumerate()
        .map(|(position, &x)| {
            let (dist, nearest) = distance_to_subset(space, subset, x).map_err(|e| match e {
                MetricError::PointInSubset(point) => GluingError::XInS { position, point },
                other => other.into(),
            })?;
            if !perturb || delta == 0.0 {
                return Ok(nearest);
            }
            let reach = (1.0 + delta) * dist;
            Ok(subset
                .iter()
                .copied()
                .filter(|&s| space.d(x, s) <= reach)
                .max()
                .unwrap_or(nearest))
        })
        .collect()
}

/// `Φ = φ` on `S` and `Φ = Ψ` on the points of `Ψ`'s domain outside `S`.
pub fn glue(phi: &PartialMap, psi: &ExtensionResult) -> Result<PartialMap, GluingError> {
    let psi_map = &psi.map;
    if phi.source() != psi_map.source() {
        return Err(GluingError::DomainMismatch(
            "maps live on different source spaces".into(),
        ));
    }
    if phi.target() != psi_map.target() {
        return Err(GluingError::DomainMismatch("maps have different targets".into()));
    }
    let mut merged = Vec::with_capacity(phi.len() + psi_map.len());
    for (point, value) in psi_map.iter() {
        match phi.value_at(point) {
            Some(expected) if expected != value => {
                return Err(GluingError::AgreementViolation {
                    point,
                    discrepancy: phi.target().distance(expected, value),
                });
            }
            Some(_) => {}
            None => merged.push((point, value.clone())),
        }
    }
    merged.extend(phi.iter().map(|(i, v)| (i, v.clone())));
    merged.sort_by_key(|(i, _)| *i);
    let (domain, values) = merged.into_iter().unzip();
    Ok(PartialMap::new(
        phi.source().clone(),
        domain,
        values,
        phi.target().clone(),
    )?)
}

/// Sharpened gluing bound `(2+δ)·L + (1+δ)·C_Ψ`.
pub fn claim1_bound(lipschitz: f64, c_psi: f64, delta: f64) -> f64 {
    (2.0 + delta) * lipschitz + (1.0 + delta) * c_psi
}

/// Worst-case form `(2+δ+(1+δ)²K)·L`, reached from [`claim1_bound`] at `C_Ψ = (1+δ)KL`.
pub fn worst_case_bound(lipschitz: f64, k: f64, delta: f64) -> f64 {
    (2.0 + delta + (1.0 + delta) * (1.0 + delta) * k) * lipschitz
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PairClass {
    WithinSubset,
    WithinExtension,
    Cross,
}

/// Worst pair of one class against its bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassAudit {
    pub class: PairClass,
    pub pairs: usize,
    pub worst_ratio: f64,
    pub worst_pair: Option<(usize, usize)>,
    pub bound: f64,
    pub slack: f64,
}

/// Replay of the chain for one pair `(z, x_j)`, `z ∈ S \ {y}`. Each entry is
/// an upper bound for the previous one; the last equals
/// `((2+δ)L + (1+δ)C_Ψ)·d(z, x_j)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InequalityChain {
    pub z: usize,
    pub j: usize,
    pub x: usize,
    pub y: usize,
    /// `d_N(Φ(z), Φ(x_j))`
    pub lhs: f64,
    /// triangle through `Φ(y_j)`
    pub via_proxy: f64,
    /// `L·d(z,y_j) + C_Ψ·d(x_j,y_j)`
    pub lipschitz_bounds: f64,
    /// `L·(d(z,x_j) + d(x_j,y_j)) + (1+δ)C_Ψ·d(x_j,S)`
    pub near_nearest: f64,
    /// `L·(d(z,x_j) + (1+δ)d(x_j,S)) + (1+δ)C_Ψ·d(x_j,z)`
    pub near_nearest_again: f64,
    pub closed_form: f64,
}

impl InequalityChain {
    pub fn steps(&self) -> [f64; 6] {
        [
            self.lhs,
            self.via_proxy,
            self.lipschitz_bounds,
            self.near_nearest,
            self.near_nearest_again,
            self.closed_form,
        ]
    }

    /// Smallest `next − previous` over the chain; negative beyond `-TOL` means a broken step.
    pub fn min_step_slack(&self) -> f64 {
        self.steps()
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WorstCaseCheck {
    pub k: f64,
    pub bound: f64,
    /// Whether `C_Ψ ≤ (1+δ)·K·L`, the premise under which `bound` must dominate.
    pub psi_within_k: bool,
}

/// Options for [`run_claim1`].
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct GluingOptions {
    pub delta: f64,
    pub perturb: bool,
    /// Optional worst-case modulus to compare against the worst-case bound.
    pub k: Option<f64>,
}

/// Full record of one gluing run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GluingTrace {
    pub delta: f64,
    pub perturb: bool,
    pub oracle: &'static str,
    pub subset: Vec<usize>,
    pub xs: Vec<usize>,
    pub ys: Vec<usize>,
    /// `d(x_j, S)` for each `j`.
    pub x_distances: Vec<f64>,
    pub lipschitz: f64,
    pub psi: ExtensionResult,
    pub c_psi: f64,
    pub phi_glued: PartialMap,
    pub achieved: f64,
    pub achieved_pair: Option<(usize, usize)>,
    pub certified_bound: f64,
    pub worst_case: Option<WorstCaseCheck>,
    pub audits: Vec<ClassAudit>,
    pub chains: Vec<InequalityChain>,
}

impl GluingTrace {
    pub fn slack(&self) -> f64 {
        self.certified_bound - self.achieved
    }
}

/// Runs the construction for `phi` (defined on `S`) and new points `xs`,
/// checking every invariant of the trace before returning it.
pub fn run_claim1(
    phi: &PartialMap,
    xs: &[usize],
    oracle: &Oracle,
    opts: &GluingOptions,
) -> Result<GluingTrace, GluingError> {
    let space = phi.source().clone();
    let subset = phi.domain().to_vec();
    let delta = opts.delta;
    let ys = select_near_nearest(&space, &subset, xs, delta, opts.perturb)?;
    let x_distances: Vec<f64> = xs
        .iter()
        .map(|&x| distance_to_subset(&space, &subset, x).map(|(d, _)| d))
        .collect::<Result<_, _>>()?;
    for (j, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
        let reach = (1.0 + delta) * x_distances[j] + TOL;
        if space.d(x, y) > reach {
            return Err(GluingError::CertificationFailure {
                pair: (y, x),
                achieved_ratio: space.d(x, y) / x_distances[j],
                certified_ratio: 1.0 + delta,
            });
        }
    }

    let lipschitz = lipschitz_constant(phi).constant;
    let proxies: BTreeSet<usize> = ys.iter().copied().collect();
    let new_points: BTreeSet<usize> = xs.iter().copied().collect();
    let proxies: Vec<usize> = proxies.into_iter().collect();
    let psi_domain: Vec<usize> = proxies
        .iter()
        .chain(&new_points)
        .copied()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let psi = oracle.extend(&phi.restrict(&proxies), &psi_domain)?;
    let c_psi = lipschitz_constant(&psi.map).constant;
    let phi_glued = glue(phi, &psi)?;
    let report = lipschitz_constant(&phi_glued);
    let certified_bound = claim1_bound(lipschitz, c_psi, delta);

    let target = phi.target();
    let mut audits = [
        ClassAudit::new(PairClass::WithinSubset, lipschitz),
        ClassAudit::new(PairClass::WithinExtension, c_psi),
        ClassAudit::new(PairClass::Cross, certified_bound),
    ];
    let glued: Vec<(usize, &_)> = phi_glued.iter().collect();
    for (a, &(u, fu)) in glued.iter().enumerate() {
        for &(v, fv) in &glued[a + 1..] {
            let ratio = target.distance(fu, fv) / space.d(u, v);
            let (in_u, in_v) = (phi.value_at(u).is_some(), phi.value_at(v).is_some());
            let class = if in_u && in_v {
                PairClass::WithinSubset
            } else if psi.map.value_at(u).is_some() && psi.map.value_at(v).is_some() {
                PairClass::WithinExtension
            } else {
                PairClass::Cross
            };
            let audit = &mut audits[class as usize];
            audit.record(ratio, (u, v));
            if ratio > audit.bound + TOL {
                return Err(GluingError::CertificationFailure {
                    pair: (u, v),
                    achieved_ratio: ratio,
                    certified_ratio: audit.bound,
                });
            }
        }
    }

    let mut chains = Vec::new();
    for (j, (&x, &y)) in xs.iter().zip(&ys).enumerate() {
        let fx = phi_glued.value_at(x).expect("new point glued");
        let fy = phi_glued.value_at(y).expect("proxy in subset");
        let dist_x_s = x_distances[j];
        for (z, fz) in phi.iter() {
            if proxies.binary_search(&z).is_ok() {
                continue;
            }
            let (dzx, dxy, dzy) = (space.d(z, x), space.d(x, y), space.d(z, y));
            let chain = InequalityChain {
                z,
                j,
                x,
                y,
                lhs: target.distance(fz, fx),
                via_proxy: target.distance(fz, fy) + target.distance(fy, fx),
                lipschitz_bounds: lipschitz * dzy + c_psi * dxy,
                near_nearest: lipschitz * (dzx + dxy) + (1.0 + delta) * c_psi * dist_x_s,
                near_nearest_again: lipschitz * (dzx + (1.0 + delta) * dist_x_s) + (1.0 + delta) * c_psi * dzx,
                closed_form: certified_bound * dzx,
            };
            if chain.min_step_slack() < -TOL {
                return Err(GluingError::CertificationFailure {
                    pair: (z, x),
                    achieved_ratio: chain.lhs / dzx,
                    certified_ratio: certified_bound,
                });
            }
            chains.push(chain);
        }
    }

    if report.constant > certified_bound + TOL {
        return Err(GluingError::CertificationFailure {
            pair: report.witness_pair.unwrap_or_default(),
            achieved_ratio: report.constant,
            certified_ratio: certified_bound,
        });
    }

    let worst_case = opts.k.map(|k| {
        let bound = worst_case_bound(lipschitz, k, delta);
        WorstCaseCheck {
            k,
            bound,
            psi_within_k: c_psi <= (1.0 + delta) * k * lipschitz + TOL,
        }
    });
    if let Some(check) = worst_case {
        if check.psi_within_k && certified_bound > check.bound + TOL {
            return Err(GluingError::CertificationFailure {
                pair: report.witness_pair.unwrap_or_default(),
                achieved_ratio: certified_bound,
                certified_ratio: check.bound,
            });
        }
    }

    Ok(GluingTrace {
        delta,
        perturb: opts.perturb,
        oracle: oracle.name(),
        subset,
        xs: xs.to_vec(),
        ys,
        x_distances,
        lipschitz,
        psi,
        c_psi,
        phi_glued,
        achieved: report.constant,
        achieved_pair: report.witness_pair,
        certified_bound,
        worst_case,
        audits: audits.to_vec(),
        chains,
    })
}

impl ClassAudit {
    fn new(class: PairClass, bound: f64) -> Self {
        ClassAudit {
            class,
            pairs: 0,
            worst_ratio: 0.0,
            worst_pair: None,
            bound,
            slack: bound,
        }
    }

    fn record(&mut self, ratio: f64, pair: (usize, usize)) {
        self.pairs += 1;
        if self.worst_pair.is_none() || ratio > self.worst_ratio {
            self.worst_ratio = ratio;
            self.worst_pair = Some(pair);
            self.slack = self.bound - ratio;
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::metric::{unit_cycle, unit_path, TargetPoint, TargetSpace};
    use crate::solvers::{mcshane_extend, Optimality};

    #[test]
    fn nearest_on_path() {
        let p = unit_path(3);
        assert_eq!(select_near_nearest(&p, &[0, 3], &[1], 0.0, false), Ok(vec![0]));
        assert_eq!(select_near_nearest(&p, &[0, 3], &[2], 0.7, true), Ok(vec![3]));
        // slack large enough to admit the far endpoint
        assert_eq!(select_near_nearest(&p, &[0, 3], &[1], 1.0, true), Ok(vec![3]));
        assert_eq!(select_near_nearest(&p, &[0, 3], &[1], 0.5, true), Ok(vec![0]));
    }

    #[test]
    fn nearest_tie_on_cycle() {
        let c4 = unit_cycle(4);
        assert_eq!(select_near_nearest(&c4, &[0, 2], &[1], 0.0, false), Ok(vec![0]));
        assert_eq!(select_near_nearest(&c4, &[0, 2], &[1, 3], 0.0, false), Ok(vec![0, 0]));
    }

    #[test]
    fn nearest_errors() {
        let p = unit_path(3);
        assert_eq!(
            select_near_nearest(&p, &[], &[1], 0.0, false),
            Err(GluingError::EmptySubset)
        );
        assert_eq!(
            select_near_nearest(&p, &[0, 3], &[1, 3], 0.0, false),
            Err(GluingError::XInS { position: 1, point: 3 })
        );
        assert_eq!(
            select_near_nearest(&p, &[0], &[1], -0.1, false),
            Err(GluingError::BadDelta(-0.1))
        );
    }

    #[test]
    fn bound_values() {
        assert_eq!(claim1_bound(1.0, 1.0, 0.0), 3.0);
        assert_eq!(claim1_bound(0.0, 0.0, 0.3), 0.0);
        let (delta, k) = (0.5, 2.0);
        assert_eq!(claim1_bound(1.0, (1.0 + delta) * k, delta), 7.0);
        assert_eq!(worst_case_bound(1.0, k, delta), 7.0);
    }

    fn extension_of(map: PartialMap) -> ExtensionResult {
        let constant = lipschitz_constant(&map).constant;
        ExtensionResult {
            map,
            constant,
            optimality: Optimality::Heuristic,
            iterations: 0,
            trace: vec![],
        }
    }

    #[test]
    fn glue_nothing_new() {
        let s = Arc::new(unit_path(2));
        let phi = PartialMap::real(s.clone(), vec![0, 2], &[0.0, 2.0]).unwrap();
        let psi = extension_of(PartialMap::real(s, vec![0], &[0.0]).unwrap());
        assert_eq!(glue(&phi, &psi).unwrap(), phi);
    }

    #[test]
    fn glue_piecewise() {
        let s = Arc::new(unit_path(2));
        let phi = PartialMap::real(s.clone(), vec![0, 2], &[0.0, 2.0]).unwrap();
        let psi = extension_of(PartialMap::real(s, vec![0, 1], &[0.0, 0.0]).unwrap());
        let glued = glue(&phi, &psi).unwrap();
        assert_eq!(glued.domain(), [0, 1, 2]);
        assert_eq!(glued.real_values().unwrap(), vec![0.0, 0.0, 2.0]);
        assert_eq!(lipschitz_constant(&glued).constant, 2.0);
    }

    #[test]
    fn glue_detects_disagreement() {
        let s = Arc::new(unit_path(3));
        let phi = PartialMap::real(s.clone(), vec![1, 3], &[1.0, 2.0]).unwrap();
        let psi = extension_of(PartialMap::real(s.clone(), vec![0, 1], &[0.0, 1.5]).unwrap());
        assert_eq!(
            glue(&phi, &psi),
            Err(GluingError::AgreementViolation {
                point: 1,
                discrepancy: 0.5
            })
        );
        let other = Arc::new(unit_path(3));
        let elsewhere = PartialMap::new(
            other,
            vec![0],
            vec![TargetPoint::Coords(vec![0.0, 0.0])],
            TargetSpace::Euclidean { dim: 2 },
        )
        .unwrap();
        assert!(matches!(
            glue(&phi, &extension_of(elsewhere)),
            Err(GluingError::DomainMismatch(_))
        ));
    }

    #[test]
    fn run_without_new_points() {
        let s = Arc::new(unit_path(3));
        let phi = PartialMap::real(s, vec![0, 1, 3], &[0.0, 1.0, 0.0]).unwrap();
        let trace = run_claim1(&phi, &[], &Oracle::McShane, &GluingOptions::default()).unwrap();
        assert_eq!(trace.achieved, trace.lipschitz);
        assert!(trace.certified_bound >= trace.lipschitz);
        assert_eq!(trace.phi_glued, phi);
    }

    #[test]
    fn run_on_path_with_mcshane() {
        let s = Arc::new(unit_path(4));
        let phi = PartialMap::real(s, vec![0, 4], &[0.0, 4.0]).unwrap();
        let trace = run_claim1(&phi, &[2], &Oracle::McShane, &GluingOptions::default()).unwrap();
        assert_eq!(trace.ys, vec![0]);
        assert_eq!(trace.lipschitz, 1.0);
        // Ψ extends φ|{0} (constant) to {0, 2}: McShane gives Φ(2) = 0.
        assert_eq!(trace.phi_glued.real_values().unwrap(), vec![0.0, 0.0, 4.0]);
        assert_eq!(trace.c_psi, 0.0);
        assert_eq!(trace.achieved, 2.0);
        assert_eq!(trace.certified_bound, 2.0);
        assert!(trace.chains.iter().all(|c| c.min_step_slack() >= -TOL));
    }

    #[test]
    fn worst_case_dominates_when_psi_within_k() {
        let s = Arc::new(unit_path(5));
        let phi = PartialMap::real(s, vec![0, 3, 5], &[0.0, 3.0, 1.0]).unwrap();
        let opts = GluingOptions {
            delta: 0.5,
            perturb: true,
            k: Some(1.0),
        };
        let trace = run_claim1(&phi, &[1, 4], &Oracle::McShane, &opts).unwrap();
        let check = trace.worst_case.unwrap();
        assert!(check.psi_within_k);
        assert!(trace.certified_bound <= check.bound + TOL);
        assert!(trace.achieved <= trace.certified_bound + TOL);
        // McShane never loses constant on Ψ
        let psi_direct = mcshane_extend(&phi.restrict(&trace.ys), trace.psi.map.domain()).unwrap();
        assert_eq!(psi_direct.map, trace.psi.map);
    }
}
