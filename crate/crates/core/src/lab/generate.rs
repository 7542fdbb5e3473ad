use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::LabError;
use crate::io::{ExponentValue, GraphFile, InstanceFile};
use crate::metric::{Exponent, FiniteMetricSpace, MetricError};

/// Attempts before a random graph generator gives up on connectivity.
pub const MAX_GRAPH_ATTEMPTS: u32 = 1000;

/// Instance family. String form: `path:M`, `cycle:M`,
/// `random-graph:N:PROB:WMIN:WMAX`, `lp-cloud:N:DIM:P`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Generator {
    /// Unit path on `m + 1` points.
    Path { m: usize },
    /// Unit cycle on `m` points.
    Cycle { m: usize },
    /// Each edge present with probability `edge_prob`, weights uniform in
    /// `[weight_min, weight_max]`; resampled until connected.
    RandomGraph {
        n: usize,
        edge_prob: f64,
        weight_min: f64,
        weight_max: f64,
    },
    /// `n` points uniform in `[0, 1)^dim` under the `ℓ_p` distance.
    LpCloud { n: usize, dim: usize, p: f64 },
}

impl Generator {
    /// The size parameter reported in result rows.
    pub fn param(&self) -> usize {
        match *self {
            Generator::Path { m } | Generator::Cycle { m } => m,
            Generator::RandomGraph { n, .. } | Generator::LpCloud { n, .. } => n,
        }
    }

    pub fn is_seeded(&self) -> bool {
        matches!(self, Generator::RandomGraph { .. } | Generator::LpCloud { .. })
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Path { m } => write!(f, "path:{m}"),
            Generator::Cycle { m } => write!(f, "cycle:{m}"),
            Generator::RandomGraph {
                n,
                edge_prob,
                weight_min,
                weight_max,
            } => {
                write!(f, "random-graph:{n}:{edge_prob}:{weight_min}:{weight_max}")
            }
            Generator::LpCloud { n, dim, p } if p.is_infinite() => write!(f, "lp-cloud:{n}:{dim}:inf"),
            Generator::LpCloud { n, dim, p } => write!(f, "lp-cloud:{n}:{dim}:{p}"),
        }
    }
}

impl FromStr for Generator {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| LabError::BadSpec(format!("generator {s:?}: {why}"));
        let parts: Vec<&str> = s.split(':').collect();
        let int = |i: usize| -> Result<usize, LabError> {
            parts
                .get(i)
                .and_then(|p| p.parse().ok())
                .ok_or_else(|| bad("expected an integer"))
        };
        let real = |i: usize| -> Result<f64, LabError> {
            match parts.get(i) {
                Some(&"inf") => Ok(f64::INFINITY),
                Some(p) => p.parse().map_err(|_| bad("expected a number")),
                None => Err(bad("missing field")),
            }
        };
        let g = match (parts[0], parts.len()) {
            ("path", 2) => Generator::Path { m: int(1)? },
            ("cycle", 2) => Generator::Cycle { m: int(1)? },
            ("random-graph", 5) => Generator::RandomGraph {
                n: int(1)?,
                edge_prob: real(2)?,
                weight_min: real(3)?,
                weight_max: real(4)?,
            },
            ("lp-cloud", 4) => Generator::LpCloud {
                n: int(1)?,
                dim: int(2)?,
                p: real(3)?,
            },
            _ => return Err(bad("unknown family or wrong field count")),
        };
        match g {
            Generator::Path { m: 0 } => Err(bad("path needs m >= 1")),
            Generator::Cycle { m } if m < 3 => Err(bad("cycle needs m >= 3")),
            Generator::RandomGraph {
                n,
                edge_prob,
                weight_min,
                weight_max,
            } if n == 0
                || !(0.0..=1.0).contains(&edge_prob)
                || !(weight_min > 0.0 && weight_min <= weight_max && weight_max.is_finite()) =>
            {
                Err(bad("need n >= 1, probability in [0, 1] and 0 < wmin <= wmax"))
            }
            Generator::LpCloud { n, dim, p } if n == 0 || dim == 0 || p.is_nan() || p < 1.0 => {
                Err(bad("need n, dim >= 1 and p >= 1"))
            }
            g => Ok(g),
        }
    }
}

impl TryFrom<String> for Generator {
    type Error = LabError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<Generator> for String {
    fn from(g: Generator) -> Self {
        g.to_string()
    }
}

/// A generated metric space with the file it serializes to.
#[derive(Debug, Clone)]
pub struct Instance {
    pub id: String,
    pub generator: Generator,
    pub seed: u64,
    pub file: InstanceFile,
    pub space: Arc<FiniteMetricSpace>,
    /// Draws needed before the random graph came out connected.
    pub attempts: u32,
}

impl Instance {
    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        self.file.coords()
    }
}

/// Builds one instance; identical `(generator, seed)` give identical output.
pub fn generate(generator: &Generator, seed: u64) -> Result<Instance, LabError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (file, attempts) = match *generator {
        Generator::Path { m } => (graph_file(m + 1, (0..m).map(|i| (i, i + 1, 1.0)).collect()), 1),
        Generator::Cycle { m } => (graph_file(m, (0..m).map(|i| (i, (i + 1) % m, 1.0)).collect()), 1),
        Generator::RandomGraph {
            n,
            edge_prob,
            weight_min,
            weight_max,
        } => {
            let mut attempt = 0;
            loop {
                attempt += 1;
                let mut edges = Vec::new();
                for u in 0..n {
                    for v in u + 1..n {
                        if rng.random_bool(edge_prob) {
                            let w = if weight_min == weight_max {
                                weight_min
                            } else {
                                rng.random_range(weight_min..=weight_max)
                            };
                            edges.push((u, v, w));
                        }
                    }
                }
                let file = graph_file(n, edges);
                match file.build() {
                    Ok(_) => break (file, attempt),
                    Err(crate::io::IoError::Metric(MetricError::Disconnected { .. }))
                        if attempt < MAX_GRAPH_ATTEMPTS => {}
                    Err(crate::io::IoError::Metric(MetricError::Disconnected { .. })) => {
                        return Err(LabError::Disconnected {
                            generator: generator.to_string(),
                            attempts: attempt,
                        });
                    }
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Generator::LpCloud { n, dim, p } => {
            let exponent = if p.is_infinite() {
                Exponent::INFINITY
            } else {
                Exponent::new(p)?
            };
            let mut attempt = 0;
            loop {
                attempt += 1;
                let points: Vec<Vec<f64>> = (0..n)
                    .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
                    .collect();
                let file = InstanceFile::Points {
                    points,
                    p: ExponentValue::from_exponent(exponent),
                };
                match file.build() {
                    Ok(_) => break (file, attempt),
                    Err(crate::io::IoError::Metric(MetricError::DuplicatePoint { .. })) if attempt < 100 => {}
                    Err(e) => return Err(e.into()),
                }
            }
        }
    };
    let space = Arc::new(file.build()?);
    let id = if generator.is_seeded() {
        format!("{generator}#{seed}")
    } else {
        generator.to_string()
    };
    Ok(Instance {
        id,
        generator: *generator,
        seed,
        file,
        space,
        attempts,
    })
}

fn graph_file(n: usize, edges: Vec<(usize, usize, f64)>) -> InstanceFile {
    InstanceFile::Graph {
        graph: GraphFile { n, edges },
    }
}
