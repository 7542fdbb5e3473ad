//! Extension moduli of finite metric spaces.
//!
//! * `e(M, S; N)`: worst ratio, over nonconstant `φ: S → N`, of the best
//!   extension constant on `M` to `‖φ‖_Lip`.
//! * `e_n(M; N)`: worst `e(M, S; N)` over subsets with `|S| ≤ n`.
//! * `e^n(M; N)`: worst `e(S ∪ X, S; N)` over subsets `S` and at most `n`
//!   new points `X ⊆ M \ S`.
//!
//! For finite targets all three are computed exactly by enumeration. Maps
//! with `‖φ‖_Lip = 0` extend by a constant and count as ratio 1.
//!
//! Subsets are scanned in colexicographic order (increasing bitmask), maps in
//! lexicographic order, and the first witness reaching the maximum is kept.
//! Scans over subsets run on the current rayon pool; the merge is ordered, so
//! results do not depend on the thread count.

use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::metric::{lipschitz_constant, FiniteMetricSpace, MetricError, PartialMap, TargetPoint, TargetSpace, TOL};
use crate::solvers::{
    best_assignment, brute_force_extend, enumeration_count, euclidean_extend, EuclideanConfig, Optimality, SolverError,
};

/// Largest source space the subset scans accept (subsets are bitmasks).
pub const MAX_SCAN_POINTS: usize = 24;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModulusError {
    #[error("enumeration of {count} maps exceeds the cap of {cap}")]
    EnumerationCapExceeded { count: u128, cap: u64 },
    #[error("exact moduli need a finite target, got {0}")]
    TargetNotFinite(String),
    #[error("space of {0} points is too large to scan subsets")]
    SpaceTooLarge(usize),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("claim violated: e^n = {e_up_n} > e_n + 2 = {}", e_n + 2.0)]
    Claim1Violated { e_up_n: f64, e_n: f64, slack: f64 },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Solver(#[from] SolverError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ModulusKind {
    /// `e(M, S; N)`
    Subset,
    /// `e(M, S; ℝ^d)` lower-bound estimate
    SubsetEuclidean,
    /// `e_n(M; N)`
    Lower(usize),
    /// `e^n(M; N)`
    Upper(usize),
}

impl ModulusKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModulusKind::Subset => "e",
            ModulusKind::SubsetEuclidean => "e_euclidean",
            ModulusKind::Lower(_) => "e_n",
            ModulusKind::Upper(_) => "e_up_n",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ScanCounts {
    pub subsets: u64,
    pub maps: u64,
    pub search_nodes: u64,
}

impl std::ops::AddAssign for ScanCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.subsets += rhs.subsets;
        self.maps += rhs.maps;
        self.search_nodes += rhs.search_nodes;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModulusResult {
    pub kind: ModulusKind,
    pub value: f64,
    pub exact: bool,
    /// `S` of the witness.
    pub witness_subset: Vec<usize>,
    /// New points of the witness for `e^n`; `M \ S` otherwise.
    pub witness_points: Vec<usize>,
    pub witness_phi: Option<PartialMap>,
    /// Best extension of `witness_phi` found by the inner search.
    pub witness_extension: Option<PartialMap>,
    pub counts: ScanCounts,
}

impl ModulusResult {
    /// Extension set of the witness: `S ∪ X`.
    pub fn extension_set(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self
            .witness_subset
            .iter()
            .chain(&self.witness_points)
            .copied()
            .collect();
        all.sort_unstable();
        all
    }
}

/// Recomputes the ratio attained by a finite-target witness with an
/// independent call to the brute-force extender.
pub fn witness_ratio(result: &ModulusResult, cap: u64) -> Result<f64, ModulusError> {
    let Some(phi) = &result.witness_phi else { return Ok(1.0) };
    let lip = lipschitz_constant(phi).constant;
    if lip == 0.0 {
        return Ok(1.0);
    }
    let ext = brute_force_extend(phi, &result.extension_set(), cap)?;
    Ok(ext.constant / lip)
}

fn finite_target(target: &TargetSpace) -> Result<&FiniteMetricSpace, ModulusError> {
    target
        .finite()
        .ok_or_else(|| ModulusError::TargetNotFinite(target.name()))
}

fn check_cap(k: usize, m: usize, cap: u64) -> Result<(), ModulusError> {
    let count = enumeration_count(k, m);
    if count > u128::from(cap) {
        Err(ModulusError::EnumerationCapExceeded { count, cap })
    } else {
        Ok(())
    }
}

/// Outcome of one inner double enumeration.
#[derive(Debug, Clone)]
struct SubsetScan {
    value: f64,
    phi: Vec<usize>,
    extension: Vec<usize>,
    counts: ScanCounts,
}

/// `e(S ∪ free, S; N)` by enumerating every `φ: S → N` and, for each, the
/// best assignment of `free`.
fn scan_subset(source: &FiniteMetricSpace, target: &FiniteMetricSpace, subset: &[usize], free: &[usize]) -> SubsetScan {
    let k = target.size();
    let mut phi = vec![0usize; subset.len()];
    let mut best = SubsetScan {
        value: 1.0,
        phi: phi.clone(),
        extension: vec![0; free.len()],
        counts: ScanCounts {
            subsets: 1,
            ..Default::default()
        },
    };
    let mut fixed: Vec<(usize, usize)> = subset.iter().map(|&s| (s, 0)).collect();
    loop {
        best.counts.maps += 1;
        let constant_map = phi.windows(2).all(|w| w[0] == w[1]);
        if !constant_map {
            let mut lip = 0.0f64;
            for a in 0..subset.len() {
                for b in a + 1..subset.len() {
                    lip = lip.max(target.d(phi[a], phi[b]) / source.d(subset[a], subset[b]));
                }
            }
            for (slot, &v) in fixed.iter_mut().zip(&phi) {
                slot.1 = v;
            }
            let ext = best_assignment(source, target, &fixed, free, lip);
            best.counts.search_nodes += ext.nodes;
            let ratio = ext.constant / lip;
            if ratio > best.value {
                best.value = ratio;
                best.phi.clone_from(&phi);
                best.extension = ext.assignment;
            }
        }
        // odometer, last position least significant
        let mut pos = subset.len();
        loop {
            if pos == 0 {
                return best;
            }
            pos -= 1;
            phi[pos] += 1;
            if phi[pos] < k {
                break;
            }
            phi[pos] = 0;
        }
    }
}

fn indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

fn build_result(
    kind: ModulusKind,
    source: &Arc<FiniteMetricSpace>,
    target: &TargetSpace,
    subset: Vec<usize>,
    free: Vec<usize>,
    scan: SubsetScan,
    counts: ScanCounts,
) -> Result<ModulusResult, ModulusError> {
    let (witness_phi, witness_extension) = if subset.is_empty() {
        (None, None)
    } else {
        let phi = PartialMap::indexed(source.clone(), subset.clone(), &scan.phi, target.clone())?;
        let mut all: Vec<(usize, usize)> = subset.iter().copied().zip(scan.phi.iter().copied()).collect();
        all.extend(free.iter().copied().zip(scan.extension.iter().copied()));
        all.sort_unstable();
        let (domain, values): (Vec<usize>, Vec<usize>) = all.into_iter().unzip();
        let ext = PartialMap::indexed(source.clone(), domain, &values, target.clone())?;
        (Some(phi), Some(ext))
    };
    Ok(ModulusResult {
        kind,
        value: scan.value,
        exact: true,
        witness_subset: subset,
        witness_points: free,
        witness_phi,
        witness_extension,
        counts,
    })
}

fn normalized_subset(space: &FiniteMetricSpace, subset: &[usize]) -> Result<Vec<usize>, ModulusError> {
    let mut s = subset.to_vec();
    s.sort_unstable();
    s.dedup();
    for &i in &s {
        space.check_index(i)?;
    }
    Ok(s)
}

/// Exact `e(M, S; N)` for a finite target.
pub fn modulus_for_subset(
    space: &Arc<FiniteMetricSpace>,
    subset: &[usize],
    target: &TargetSpace,
    cap: u64,
) -> Result<ModulusResult, ModulusError> {
    let tgt = finite_target(target)?;
    let subset = normalized_subset(space, subset)?;
    let free: Vec<usize> = (0..space.size()).filter(|i| subset.binary_search(i).is_err()).collect();
    check_cap(tgt.size(), subset.len(), cap)?;
    check_cap(tgt.size(), free.len(), cap)?;
    let scan = scan_subset(space, tgt, &subset, &free);
    let counts = scan.counts;
    build_result(ModulusKind::Subset, space, target, subset, free, scan, counts)
}

/// Exact `e_n(M; N)`: the worst `e(M, S; N)` over nonempty `S` with `|S| ≤ n`.
pub fn e_n(
    space: &Arc<FiniteMetricSpace>,
    n: usize,
    target: &TargetSpace,
    cap: u64,
) -> Result<ModulusResult, ModulusError> {
    let tgt = finite_target(target)?;
    let size = space.size();
    if size > MAX_SCAN_POINTS {
        return Err(ModulusError::SpaceTooLarge(size));
    }
    let max_s = n.min(size);
    check_cap(tgt.size(), max_s, cap)?;
    check_cap(tgt.size(), size - max_s.min(1), cap)?;
    let masks: Vec<u32> = (1u32..(1 << size)).filter(|m| (m.count_ones() as usize) <= n).collect();
    let scans: Vec<(u32, SubsetScan)> = masks
        .par_iter()
        .map(|&mask| {
            let subset = indices(mask);
            let free: Vec<usize> = (0..size).filter(|i| mask & (1 << i) == 0).collect();
            (mask, scan_subset(space, tgt, &subset, &free))
        })
        .collect();
    reduce(
        ModulusKind::Lower(n),
        space,
        target,
        scans.into_iter().map(|(m, s)| (m, full_complement(m, size), s)),
    )
}

fn full_complement(mask: u32, size: usize) -> u32 {
    !mask & ((1u32 << size) - 1)
}

/// Exact `e^n(M; N)`: the worst `e(S ∪ X, S; N)` over nonempty `S` and
/// `X ⊆ M \ S` with `1 ≤ |X| ≤ n`.
pub fn e_up_n(
    space: &Arc<FiniteMetricSpace>,
    n: usize,
    target: &TargetSpace,
    cap: u64,
) -> Result<ModulusResult, ModulusError> {
    let tgt = finite_target(target)?;
    let size = space.size();
    if size > MAX_SCAN_POINTS {
        return Err(ModulusError::SpaceTooLarge(size));
    }
    check_cap(tgt.size(), size.saturating_sub(1), cap)?;
    check_cap(tgt.size(), n.min(size.saturating_sub(1)), cap)?;
    let all = (1u32 << size) - 1;
    let subset_masks: Vec<u32> = (1u32..all).collect();
    let per_subset: Vec<Vec<(u32, u32, SubsetScan)>> = subset_masks
        .par_iter()
        .map(|&s_mask| {
            let subset = indices(s_mask);
            let rest = all & !s_mask;
            // subsets of `rest`, increasing
            let mut out = Vec::new();
            let mut x_mask = rest & rest.wrapping_neg();
            while x_mask != 0 {
                if (x_mask.count_ones() as usize) <= n {
                    let free = indices(x_mask);
                    out.push((s_mask, x_mask, scan_subset(space, tgt, &subset, &free)));
                }
                x_mask = (x_mask.wrapping_sub(rest)) & rest;
            }
            out
        })
        .collect();
    reduce(ModulusKind::Upper(n), space, target, per_subset.into_iter().flatten())
}

fn reduce(
    kind: ModulusKind,
    space: &Arc<FiniteMetricSpace>,
    target: &TargetSpace,
    scans: impl Iterator<Item = (u32, u32, SubsetScan)>,
) -> Result<ModulusResult, ModulusError> {
    let mut counts = ScanCounts::default();
    let mut best: Option<(u32, u32, SubsetScan)> = None;
    for (s_mask, x_mask, scan) in scans {
        counts += scan.counts;
        if best.as_ref().is_none_or(|(_, _, b)| scan.value > b.value) {
            best = Some((s_mask, x_mask, scan));
        }
    }
    match best {
        Some((s_mask, x_mask, scan)) => {
            build_result(kind, space, target, indices(s_mask), indices(x_mask), scan, counts)
        }
        None => Ok(ModulusResult {
            kind,
            value: 1.0,
            exact: true,
            witness_subset: Vec::new(),
            witness_points: Vec::new(),
            witness_phi: None,
            witness_extension: None,
            counts,
        }),
    }
}

/// `e^n`, `e_n` and the slack `e_n + 2 − e^n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Claim1Check {
    pub n: usize,
    pub e_up_n: ModulusResult,
    pub e_n: ModulusResult,
    pub slack: f64,
}

/// Computes both moduli exactly and fails with [`ModulusError::Claim1Violated`]
/// if `e^n > e_n + 2` beyond tolerance.
pub fn check_claim1(
    space: &Arc<FiniteMetricSpace>,
    n: usize,
    target: &TargetSpace,
    cap: u64,
) -> Result<Claim1Check, ModulusError> {
    let upper = e_up_n(space, n, target, cap)?;
    let lower = e_n(space, n, target, cap)?;
    let slack = lower.value + 2.0 - upper.value;
    if slack < -TOL {
        return Err(ModulusError::Claim1Violated {
            e_up_n: upper.value,
            e_n: lower.value,
            slack,
        });
    }
    Ok(Claim1Check {
        n,
        e_up_n: upper,
        e_n: lower,
        slack,
    })
}

/// Sampling plan for [`modulus_for_subset_euclidean`].
#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanProbe {
    pub dim: usize,
    pub trials: usize,
    pub solver: EuclideanConfig,
    pub seed: u64,
    /// Source coordinates, if the space came from a point cloud; restricted
    /// to `S` they give the first trial. Without them the first trial uses
    /// distance-to-anchor coordinates `s ↦ (d(s, a_1), …, d(s, a_dim))`.
    pub coords: Option<Vec<Vec<f64>>>,
}

impl EuclideanProbe {
    pub fn new(dim: usize, trials: usize, seed: u64) -> Self {
        EuclideanProbe {
            dim,
            trials,
            solver: EuclideanConfig::default(),
            seed,
            coords: None,
        }
    }
}

/// Lower-bound estimate of `e(M, S; ℝ^dim)`.
///
/// Each trial draws `φ: S → ℝ^dim` (coordinate restriction first, then
/// standard Gaussian images), extends it with [`euclidean_extend`] and scores
/// `(constant − gap) / ‖φ‖_Lip`. The result is never marked exact.
pub fn modulus_for_subset_euclidean(
    space: &Arc<FiniteMetricSpace>,
    subset: &[usize],
    probe: &EuclideanProbe,
) -> Result<ModulusResult, ModulusError> {
    if probe.trials == 0 {
        return Err(ModulusError::NoTrials);
    }
    let subset = normalized_subset(space, subset)?;
    let all: Vec<usize> = (0..space.size()).collect();
    let free: Vec<usize> = all
        .iter()
        .copied()
        .filter(|i| subset.binary_search(i).is_err())
        .collect();
    let target = TargetSpace::Euclidean { dim: probe.dim };
    let mut rng = ChaCha8Rng::seed_from_u64(probe.seed);
    let mut value = 1.0;
    let mut witness: Option<(PartialMap, PartialMap)> = None;
    let mut counts = ScanCounts {
        subsets: 1,
        ..Default::default()
    };

    for trial in 0..probe.trials {
        let values: Vec<TargetPoint> = subset
            .iter()
            .map(|&s| {
                let coords = if trial == 0 {
                    match &probe.coords {
                        Some(c) => (0..probe.dim).map(|k| c[s].get(k).copied().unwrap_or(0.0)).collect(),
                        None => (0..probe.dim).map(|k| space.d(s, subset[k % subset.len()])).collect(),
                    }
                } else {
                    (0..probe.dim).map(|_| StandardNormal.sample(&mut rng)).collect()
                };
                TargetPoint::Coords(coords)
            })
            .collect();
        let phi = PartialMap::new(space.clone(), subset.clone(), values, target.clone())?;
        counts.maps += 1;
        let lip = lipschitz_constant(&phi).constant;
        if lip == 0.0 {
            continue;
        }
        let ext = euclidean_extend(&phi, &all, &probe.solver)?;
        counts.search_nodes += ext.iterations;
        let gap = match ext.optimality {
            Optimality::UpperBound { gap } => gap,
            _ => 0.0,
        };
        let ratio = ((ext.constant - gap) / lip).max(1.0);
        if witness.is_none() || ratio > value {
            value = value.max(ratio);
            witness = Some((phi, ext.map));
        }
    }

    let (witness_phi, witness_extension) = witness.map_or((None, None), |(p, e)| (Some(p), Some(e)));
    Ok(ModulusResult {
        kind: ModulusKind::SubsetEuclidean,
        value,
        exact: false,
        witness_subset: subset,
        witness_points: free,
        witness_phi,
        witness_extension,
        counts,
    })
}
