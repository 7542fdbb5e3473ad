use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Generator, LabError};
use crate::metric::TargetSpace;
use crate::solvers::{EuclideanConfig, Oracle, DEFAULT_ENUMERATION_CAP};

/// Target by name: `two-point`, `equilateral:K`, `real-line`, `euclidean:D`.
/// Finite targets have unit distances.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TargetSpec {
    TwoPoint,
    Equilateral(usize),
    RealLine,
    Euclidean(usize),
}

impl TargetSpec {
    pub fn build(&self) -> TargetSpace {
        match *self {
            TargetSpec::TwoPoint => TargetSpace::two_point(1.0).expect("valid"),
            TargetSpec::Equilateral(k) => TargetSpace::equilateral(k, 1.0).expect("k >= 1"),
            TargetSpec::RealLine => TargetSpace::RealLine,
            TargetSpec::Euclidean(dim) => TargetSpace::Euclidean { dim },
        }
    }

    /// Oracle used when a spec does not name one.
    pub fn default_oracle(&self) -> OracleChoice {
        match self {
            TargetSpec::TwoPoint | TargetSpec::Equilateral(_) => OracleChoice::Brute,
            TargetSpec::RealLine => OracleChoice::Mcshane,
            TargetSpec::Euclidean(_) => OracleChoice::Euclidean,
        }
    }
}

impl fmt::Display for TargetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetSpec::TwoPoint => write!(f, "two-point"),
            TargetSpec::Equilateral(k) => write!(f, "equilateral:{k}"),
            TargetSpec::RealLine => write!(f, "real-line"),
            TargetSpec::Euclidean(d) => write!(f, "euclidean:{d}"),
        }
    }
}

impl FromStr for TargetSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || LabError::BadSpec(format!("unknown target {s:?}"));
        let count = |v: &str| v.parse::<usize>().ok().filter(|&k| k >= 1).ok_or_else(bad);
        match s.split_once(':') {
            None if s == "two-point" => Ok(TargetSpec::TwoPoint),
            None if s == "real-line" => Ok(TargetSpec::RealLine),
            Some(("equilateral", k)) => count(k).map(TargetSpec::Equilateral),
            Some(("euclidean", d)) => count(d).map(TargetSpec::Euclidean),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for TargetSpec {
    type Error = LabError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<TargetSpec> for String {
    fn from(t: TargetSpec) -> Self {
        t.to_string()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OracleChoice {
    Mcshane,
    Euclidean,
    Brute,
}

impl OracleChoice {
    pub fn oracle(&self, cap: u64) -> Oracle {
        match self {
            OracleChoice::Mcshane => Oracle::McShane,
            OracleChoice::Euclidean => Oracle::Euclidean(EuclideanConfig::default()),
            OracleChoice::Brute => Oracle::BruteForce { cap },
        }
    }
}

impl FromStr for OracleChoice {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        serde_json::from_value(serde_json::Value::String(s.to_owned()))
            .map_err(|_| LabError::BadSpec(format!("unknown oracle {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ModulusChoice {
    #[default]
    #[serde(rename = "e")]
    Subset,
    #[serde(rename = "e_n")]
    Lower,
    #[serde(rename = "e_up_n")]
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedSubset {
    /// First and last point.
    #[default]
    Endpoints,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SubsetChoice {
    Named(NamedSubset),
    Explicit(Vec<usize>),
}

impl Default for SubsetChoice {
    fn default() -> Self {
        SubsetChoice::Named(NamedSubset::Endpoints)
    }
}

impl SubsetChoice {
    pub fn resolve(&self, size: usize) -> Vec<usize> {
        match self {
            SubsetChoice::Named(NamedSubset::Endpoints) if size > 1 => vec![0, size - 1],
            SubsetChoice::Named(NamedSubset::Endpoints) => vec![0],
            SubsetChoice::Explicit(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Quantity {
    /// One gluing run on a random `(S, X, φ)` per instance.
    GlueTrace,
    Modulus {
        #[serde(default)]
        which: ModulusChoice,
        #[serde(default)]
        subset: SubsetChoice,
    },
    /// `e^n` against `e_n + 2`.
    Claim1Scan,
}

impl Quantity {
    pub fn name(&self) -> &'static str {
        match self {
            Quantity::GlueTrace => "glue_trace",
            Quantity::Modulus { .. } => "modulus",
            Quantity::Claim1Scan => "claim1_scan",
        }
    }
}

fn one() -> usize {
    1
}

fn default_cap() -> u64 {
    DEFAULT_ENUMERATION_CAP
}

fn default_trials() -> usize {
    8
}

/// One experiment: every generator is instantiated `repetitions` times with
/// seeds `seed, seed + 1, …`, and the quantity is evaluated on each.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub id: String,
    pub generators: Vec<Generator>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "one")]
    pub repetitions: usize,
    pub target: TargetSpec,
    pub quantity: Quantity,
    #[serde(default = "one")]
    pub n: usize,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub perturb: bool,
    #[serde(default)]
    pub oracle: Option<OracleChoice>,
    #[serde(default = "default_cap")]
    pub cap: u64,
    /// Sampled maps for Euclidean-target moduli.
    #[serde(default = "default_trials")]
    pub trials: usize,
}

impl ExperimentSpec {
    pub fn new(id: impl Into<String>, target: TargetSpec, quantity: Quantity) -> Self {
        ExperimentSpec {
            id: id.into(),
            generators: Vec::new(),
            seed: 0,
            repetitions: 1,
            target,
            quantity,
            n: 1,
            delta: 0.0,
            perturb: false,
            oracle: None,
            cap: DEFAULT_ENUMERATION_CAP,
            trials: default_trials(),
        }
    }

    pub fn oracle(&self) -> Oracle {
        self.oracle
            .unwrap_or_else(|| self.target.default_oracle())
            .oracle(self.cap)
    }

    pub fn validate(&self) -> Result<(), LabError> {
        let bad = |why: &str| Err(LabError::BadSpec(format!("{}: {why}", self.id)));
        if !(self.delta.is_finite() && self.delta >= 0.0) {
            return bad("delta must be finite and nonnegative");
        }
        if self.n == 0 {
            return bad("n must be at least 1");
        }
        if self.trials == 0 {
            return bad("trials must be at least 1");
        }
        Ok(())
    }
}

/// Parses a JSON array of specs (a single object is accepted too).
pub fn parse_specs(text: &str) -> Result<Vec<ExperimentSpec>, LabError> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum OneOrMany {
        Many(Vec<ExperimentSpec>),
        One(Box<ExperimentSpec>),
    }
    let specs = match serde_json::from_str(text).map_err(|e| LabError::BadSpec(e.to_string()))? {
        OneOrMany::Many(v) => v,
        OneOrMany::One(s) => vec![*s],
    };
    for s in &specs {
        s.validate()?;
    }
    Ok(specs)
}
