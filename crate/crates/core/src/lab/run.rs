use std::io::Write;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{generate, ExperimentSpec, Instance, LabError, ModulusChoice, Quantity, TargetSpec};
use crate::gluing::{run_claim1, GluingError, GluingOptions};
use crate::metric::{PartialMap, TargetPoint, TargetSpace, TOL};
use crate::moduli::{
    check_claim1, e_n, e_up_n, modulus_for_subset, modulus_for_subset_euclidean, witness_ratio, EuclideanProbe,
    ModulusError, ModulusResult,
};
use crate::solvers::Optimality;

/// Environment variable capping the runner's worker count.
pub const THREADS_ENV: &str = "LIPEXT_THREADS";

/// One output record. Column order is the CSV header order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub instance_id: String,
    pub quantity: String,
    pub target: String,
    /// Number of points of the instance.
    pub points: usize,
    /// Generator size parameter (`m` for paths and cycles).
    pub param: usize,
    pub n: usize,
    pub delta: f64,
    pub lipschitz: Option<f64>,
    pub c_psi: Option<f64>,
    pub achieved: Option<f64>,
    pub certified_bound: Option<f64>,
    pub modulus: Option<f64>,
    pub e_n: Option<f64>,
    pub e_up_n: Option<f64>,
    pub slack: Option<f64>,
    pub exact: bool,
    pub witness_digest: String,
    pub wall_ms: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    /// A checked mathematical bound did not hold.
    Certification,
    /// The instance could not be evaluated (caps, bad input).
    Error,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub instance_id: String,
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct RunReport {
    pub rows: Vec<ResultRow>,
    pub failures: Vec<FailureRecord>,
    /// Instances not started because the wall-clock budget ran out.
    pub skipped: Vec<String>,
}

impl RunReport {
    /// 0 when clean, 2 on any certification failure, 1 on other errors.
    pub fn exit_code(&self) -> i32 {
        if self.failures.iter().any(|f| f.kind == FailureKind::Certification) {
            2
        } else if self.failures.is_empty() {
            0
        } else {
            1
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunOptions {
    pub threads: Option<usize>,
    pub budget: Option<Duration>,
    /// Record `wall_ms`; off by default so result files are byte-stable.
    pub timing: bool,
}

impl RunOptions {
    /// Reads the worker cap from `LIPEXT_THREADS`.
    pub fn from_env() -> Self {
        let threads = std::env::var(THREADS_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|&t: &usize| t > 0);
        RunOptions {
            threads,
            ..Default::default()
        }
    }
}

/// A unit of work: one instance of one spec.
#[derive(Debug, Clone)]
pub struct Job<'a> {
    pub spec: &'a ExperimentSpec,
    pub instance: Instance,
    pub instance_id: String,
}

/// Expands specs into jobs in spec, generator, repetition order.
pub fn expand<'a>(specs: &'a [ExperimentSpec]) -> Result<Vec<Job<'a>>, LabError> {
    let mut jobs = Vec::new();
    for spec in specs {
        spec.validate()?;
        for generator in &spec.generators {
            for rep in 0..spec.repetitions {
                let seed = spec.seed.wrapping_add(rep as u64);
                let instance = generate(generator, seed)?;
                let instance_id = format!("{}/{}#{}", spec.id, generator, seed);
                jobs.push(Job {
                    spec,
                    instance,
                    instance_id,
                });
            }
        }
    }
    Ok(jobs)
}

enum Outcome {
    Row(Box<ResultRow>),
    Failed(FailureRecord),
    Skipped(String),
}

/// Runs every job of every spec. Output order follows [`expand`] regardless
/// of the worker count.
pub fn run(specs: &[ExperimentSpec], opts: &RunOptions) -> Result<RunReport, LabError> {
    let jobs = expand(specs)?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = opts.threads {
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| LabError::BadSpec(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let outcomes: Vec<Outcome> = pool.install(|| {
        jobs.par_iter()
            .map(|job| {
                if opts.budget.is_some_and(|b| start.elapsed() > b) {
                    return Outcome::Skipped(job.instance_id.clone());
                }
                let t0 = Instant::now();
                match evaluate(job) {
                    Ok((mut row, _)) => {
                        if opts.timing {
                            row.wall_ms = Some(t0.elapsed().as_millis() as u64);
                        }
                        Outcome::Row(Box::new(row))
                    }
                    Err(f) => Outcome::Failed(f),
                }
            })
            .collect()
    });
    let mut report = RunReport::default();
    for o in outcomes {
        match o {
            Outcome::Row(r) => report.rows.push(*r),
            Outcome::Failed(f) => report.failures.push(f),
            Outcome::Skipped(id) => report.skipped.push(id),
        }
    }
    Ok(report)
}

fn digest(value: &impl Serialize) -> String {
    let bytes = serde_json::to_vec(value).expect("witness serializes");
    hex::encode(&Sha256::digest(&bytes)[..8])
}

fn base_row(job: &Job<'_>) -> ResultRow {
    let spec = job.spec;
    ResultRow {
        instance_id: job.instance_id.clone(),
        quantity: spec.quantity.name().to_owned(),
        target: spec.target.to_string(),
        points: job.instance.space.size(),
        param: job.instance.generator.param(),
        n: spec.n,
        delta: spec.delta,
        lipschitz: None,
        c_psi: None,
        achieved: None,
        certified_bound: None,
        modulus: None,
        e_n: None,
        e_up_n: None,
        slack: None,
        exact: true,
        witness_digest: String::new(),
        wall_ms: None,
    }
}

/// Evaluates one job, returning its row and a JSON detail record (the
/// gluing trace or moduli results).
pub fn evaluate(job: &Job<'_>) -> Result<(ResultRow, serde_json::Value), FailureRecord> {
    let fail = |kind: FailureKind, message: String| FailureRecord {
        instance_id: job.instance_id.clone(),
        kind,
        message,
    };
    let error = |e: &dyn std::fmt::Display| fail(FailureKind::Error, e.to_string());
    let spec = job.spec;
    let space = &job.instance.space;
    let target = spec.target.build();
    let mut row = base_row(job);

    match &spec.quantity {
        Quantity::GlueTrace => {
            let mut rng = ChaCha8Rng::seed_from_u64(job.instance.seed ^ 0x9e37_79b9_7f4a_7c15);
            let (phi, xs) = random_gluing_input(&job.instance, spec, &target, &mut rng).map_err(|e| error(&e))?;
            let opts = GluingOptions {
                delta: spec.delta,
                perturb: spec.perturb,
                k: None,
            };
            let trace = run_claim1(&phi, &xs, &spec.oracle(), &opts).map_err(|e| match e {
                GluingError::CertificationFailure { .. } => fail(FailureKind::Certification, e.to_string()),
                other => error(&other),
            })?;
            row.lipschitz = Some(trace.lipschitz);
            row.c_psi = Some(trace.c_psi);
            row.achieved = Some(trace.achieved);
            row.certified_bound = Some(trace.certified_bound);
            row.slack = Some(trace.slack());
            row.exact = trace.psi.optimality == Optimality::Exact;
            row.witness_digest = digest(&trace.phi_glued);
            Ok((row, serde_json::to_value(&trace).expect("trace serializes")))
        }
        Quantity::Modulus { which, subset } => {
            let result = match (which, &target) {
                (ModulusChoice::Subset, TargetSpace::Euclidean { .. } | TargetSpace::RealLine) => {
                    let mut probe =
                        EuclideanProbe::new(target.dim().expect("vector target"), spec.trials, job.instance.seed);
                    probe.coords = job.instance.coords().map(<[Vec<f64>]>::to_vec);
                    modulus_for_subset_euclidean(space, &subset.resolve(space.size()), &probe)
                }
                (ModulusChoice::Subset, _) => {
                    modulus_for_subset(space, &subset.resolve(space.size()), &target, spec.cap)
                }
                (ModulusChoice::Lower, _) => e_n(space, spec.n, &target, spec.cap),
                (ModulusChoice::Upper, _) => e_up_n(space, spec.n, &target, spec.cap),
            }
            .map_err(|e| error(&e))?;
            certify_modulus(&result, spec).map_err(|m| fail(FailureKind::Certification, m))?;
            row.modulus = Some(result.value);
            match which {
                ModulusChoice::Lower => row.e_n = Some(result.value),
                ModulusChoice::Upper => row.e_up_n = Some(result.value),
                ModulusChoice::Subset => {}
            }
            row.exact = result.exact;
            row.witness_digest = digest(&witness_view(&result));
            Ok((row, serde_json::to_value(&result).expect("result serializes")))
        }
        Quantity::Claim1Scan => {
            let check = check_claim1(space, spec.n, &target, spec.cap).map_err(|e| match e {
                ModulusError::Claim1Violated { .. } => fail(FailureKind::Certification, e.to_string()),
                other => error(&other),
            })?;
            certify_modulus(&check.e_up_n, spec).map_err(|m| fail(FailureKind::Certification, m))?;
            certify_modulus(&check.e_n, spec).map_err(|m| fail(FailureKind::Certification, m))?;
            row.e_n = Some(check.e_n.value);
            row.e_up_n = Some(check.e_up_n.value);
            row.slack = Some(check.slack);
            row.witness_digest = digest(&(witness_view(&check.e_up_n), witness_view(&check.e_n)));
            Ok((row, serde_json::to_value(&check).expect("check serializes")))
        }
    }
}

fn witness_view(r: &ModulusResult) -> impl Serialize + '_ {
    (r.value, &r.witness_subset, &r.witness_points, &r.witness_phi)
}

/// Re-verifies exact witnesses and the `e^n ≤ n + 1` bound.
fn certify_modulus(result: &ModulusResult, spec: &ExperimentSpec) -> Result<(), String> {
    if result.value < 1.0 - TOL {
        return Err(format!("{} = {} below 1", result.kind.name(), result.value));
    }
    if result.exact {
        let recomputed = witness_ratio(result, spec.cap).map_err(|e| e.to_string())?;
        if (recomputed - result.value).abs() > TOL {
            return Err(format!(
                "{} witness reproduces {recomputed}, claimed {}",
                result.kind.name(),
                result.value
            ));
        }
    }
    if let crate::moduli::ModulusKind::Upper(n) = result.kind {
        if result.value > n as f64 + 1.0 + TOL {
            return Err(format!("e^{n} = {} exceeds n + 1", result.value));
        }
    }
    Ok(())
}

/// Random `(φ, X)` for a gluing run: `n` new points, `S` a random nonempty
/// part of the rest, `φ` uniform (finite) or Gaussian (vector targets).
pub fn random_gluing_input(
    instance: &Instance,
    spec: &ExperimentSpec,
    target: &TargetSpace,
    rng: &mut ChaCha8Rng,
) -> Result<(PartialMap, Vec<usize>), LabError> {
    let size = instance.space.size();
    if spec.n >= size {
        return Err(LabError::BadSpec(format!(
            "{}: n = {} needs at least {} points, instance has {size}",
            spec.id,
            spec.n,
            spec.n + 1
        )));
    }
    let mut order: Vec<usize> = (0..size).collect();
    order.shuffle(rng);
    let mut xs = order[..spec.n].to_vec();
    xs.sort_unstable();
    let mut rest = order[spec.n..].to_vec();
    rest.sort_unstable();
    let mut subset: Vec<usize> = rest.iter().copied().filter(|_| rng.random_bool(0.7)).collect();
    if subset.is_empty() {
        subset.push(rest[rng.random_range(0..rest.len())]);
    }
    let values = subset
        .iter()
        .map(|_| match (target, spec.target) {
            (TargetSpace::Finite(t), _) => TargetPoint::Index(rng.random_range(0..t.size())),
            (_, TargetSpec::RealLine) => {
                TargetPoint::Coords(vec![2.0 * Distribution::<f64>::sample(&StandardNormal, &mut *rng)])
            }
            _ => TargetPoint::Coords(
                (0..target.dim().unwrap_or(1))
                    .map(|_| StandardNormal.sample(&mut *rng))
                    .collect(),
            ),
        })
        .collect();
    let phi = PartialMap::new(instance.space.clone(), subset, values, target.clone())?;
    Ok((phi, xs))
}

pub fn write_csv<W: Write>(rows: &[ResultRow], out: W) -> Result<(), LabError> {
    let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(out);
    if rows.is_empty() {
        w.write_record(CSV_HEADER)?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(LabError::Io)?;
    Ok(())
}

/// Frozen column order of [`ResultRow`].
pub const CSV_HEADER: [&str; 18] = [
    "instance_id",
    "quantity",
    "target",
    "points",
    "param",
    "n",
    "delta",
    "lipschitz",
    "c_psi",
    "achieved",
    "certified_bound",
    "modulus",
    "e_n",
    "e_up_n",
    "slack",
    "exact",
    "witness_digest",
    "wall_ms",
];

pub fn write_json<W: Write>(rows: &[ResultRow], mut out: W) -> Result<(), LabError> {
    out.write_all(crate::io::to_json(rows).as_bytes()).map_err(LabError::Io)
}

/// Reads rows written by [`write_csv`] or [`write_json`].
pub fn read_rows(text: &str) -> Result<Vec<ResultRow>, LabError> {
    if text.trim_start().starts_with('[') {
        return serde_json::from_str(text).map_err(|e| LabError::Parse(e.to_string()));
    }
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize()
        .collect::<Result<_, _>>()
        .map_err(|e| LabError::Parse(e.to_string()))
}
