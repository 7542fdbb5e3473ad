//! JSON schemas for instances, targets and maps, and serialization of the
//! solver, gluing and moduli records.
//!
//! Instance files take one of three shapes:
//!
//! ```json
//! {"metric": {"dist": [[0, 1], [1, 0]], "labels": ["a", "b"]}}
//! {"points": [[0, 0], [3, 4]], "p": 2}
//! {"graph": {"n": 3, "edges": [[0, 1, 1.0], [1, 2, 2.0]]}}
//! ```
//!
//! Map files carry the domain, one value row per domain point and the target:
//!
//! ```json
//! {"domain": [0, 2], "values": [[0.0], [2.0]], "target": {"kind": "real_line"}}
//! {"domain": [0, 2], "values": [[0], [1]], "target": {"kind": "finite", "metric": {"dist": [[0, 1], [1, 0]]}}}
//! ```

use std::sync::Arc;

use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use serde_json::Number;
use thiserror::Error;

use crate::metric::{
    graph_metric, points_to_metric, validate_metric, Exponent, FiniteMetricSpace, MetricError, PartialMap, TargetPoint,
    TargetSpace,
};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad exponent {0:?}; use a number >= 1 or \"inf\"")]
    Exponent(String),
    #[error("value row {row} is not a valid point of the target")]
    Value { row: usize },
    #[error(transparent)]
    Metric(#[from] MetricError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricFile {
    pub dist: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

impl MetricFile {
    pub fn build(&self) -> Result<FiniteMetricSpace, MetricError> {
        let space = validate_metric(&self.dist)?;
        match &self.labels {
            Some(l) => space.with_labels(l.clone()),
            None => Ok(space),
        }
    }
}

impl From<&FiniteMetricSpace> for MetricFile {
    fn from(space: &FiniteMetricSpace) -> Self {
        MetricFile {
            dist: space.rows(),
            labels: space.labels().map(<[String]>::to_vec),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub n: usize,
    pub edges: Vec<(usize, usize, f64)>,
}

/// `p` of an `ℓ_p` cloud: a number or the string `"inf"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ExponentValue {
    Number(f64),
    Named(String),
}

impl Default for ExponentValue {
    fn default() -> Self {
        ExponentValue::Number(2.0)
    }
}

impl ExponentValue {
    pub fn exponent(&self) -> Result<Exponent, IoError> {
        match self {
            ExponentValue::Number(p) => Exponent::new(*p).map_err(|_| IoError::Exponent(p.to_string())),
            ExponentValue::Named(s) if s == "inf" || s == "infinity" => Ok(Exponent::INFINITY),
            ExponentValue::Named(s) => Err(IoError::Exponent(s.clone())),
        }
    }

    pub fn from_exponent(p: Exponent) -> Self {
        if p.value().is_infinite() {
            ExponentValue::Named("inf".into())
        } else {
            ExponentValue::Number(p.value())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum InstanceFile {
    Metric {
        metric: MetricFile,
    },
    Points {
        points: Vec<Vec<f64>>,
        #[serde(default)]
        p: ExponentValue,
    },
    Graph {
        graph: GraphFile,
    },
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self) -> Result<FiniteMetricSpace, IoError> {
        Ok(match self {
            InstanceFile::Metric { metric } => metric.build()?,
            InstanceFile::Points { points, p } => points_to_metric(points, p.exponent()?)?,
            InstanceFile::Graph { graph } => graph_metric(&graph.edges, graph.n)?,
        })
    }

    /// Coordinates when the instance is a point cloud.
    pub fn coords(&self) -> Option<&[Vec<f64>]> {
        match self {
            InstanceFile::Points { points, .. } => Some(points),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TargetFile {
    Euclidean { dim: usize },
    RealLine,
    Finite { metric: MetricFile },
}

impl TargetFile {
    pub fn build(&self) -> Result<TargetSpace, IoError> {
        Ok(match self {
            TargetFile::Euclidean { dim } => TargetSpace::Euclidean { dim: *dim },
            TargetFile::RealLine => TargetSpace::RealLine,
            TargetFile::Finite { metric } => TargetSpace::Finite(Arc::new(metric.build()?)),
        })
    }
}

impl From<&TargetSpace> for TargetFile {
    fn from(t: &TargetSpace) -> Self {
        match t {
            TargetSpace::Euclidean { dim } => TargetFile::Euclidean { dim: *dim },
            TargetSpace::RealLine => TargetFile::RealLine,
            TargetSpace::Finite(s) => TargetFile::Finite {
                metric: MetricFile::from(s.as_ref()),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapFile {
    pub domain: Vec<usize>,
    pub values: Vec<Vec<Number>>,
    pub target: TargetFile,
}

impl MapFile {
    pub fn parse(text: &str) -> Result<Self, IoError> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn build(&self, source: Arc<FiniteMetricSpace>) -> Result<PartialMap, IoError> {
        let target = self.target.build()?;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(row, v)| {
                let point = match &target {
                    TargetSpace::Finite(_) => match v.as_slice() {
                        [k] => k.as_u64().map(|k| TargetPoint::Index(k as usize)),
                        _ => None,
                    },
                    _ => v
                        .iter()
                        .map(Number::as_f64)
                        .collect::<Option<Vec<_>>>()
                        .map(TargetPoint::Coords),
                };
                point.ok_or(IoError::Value { row })
            })
            .collect::<Result<_, _>>()?;
        Ok(PartialMap::new(source, self.domain.clone(), values, target)?)
    }
}

impl From<&PartialMap> for MapFile {
    fn from(map: &PartialMap) -> Self {
        let values = map
            .values()
            .iter()
            .map(|v| match v {
                TargetPoint::Index(k) => vec![Number::from(*k as u64)],
                TargetPoint::Coords(c) => c
                    .iter()
                    .map(|&x| Number::from_f64(x).unwrap_or_else(|| Number::from(0)))
                    .collect(),
            })
            .collect();
        MapFile {
            domain: map.domain().to_vec(),
            values,
            target: TargetFile::from(map.target()),
        }
    }
}

impl Serialize for PartialMap {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MapFile::from(self).serialize(serializer)
    }
}

impl Serialize for TargetSpace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        TargetFile::from(self).serialize(serializer)
    }
}

impl Serialize for FiniteMetricSpace {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        MetricFile::from(self).serialize(serializer)
    }
}

impl Serialize for crate::metric::LipschitzReport {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut st = serializer.serialize_struct("LipschitzReport", 2)?;
        st.serialize_field("constant", &self.constant)?;
        st.serialize_field("witness_pair", &self.witness_pair)?;
        st.end()
    }
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("records serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::lipschitz_constant;

    #[test]
    fn instance_shapes() {
        let metric = InstanceFile::parse(r#"{"metric": {"dist": [[0, 1], [1, 0]], "labels": ["a", "b"]}}"#).unwrap();
        assert_eq!(metric.build().unwrap().labels().unwrap(), ["a", "b"]);

        let points = InstanceFile::parse(r#"{"points": [[0, 0], [3, 4]], "p": 2}"#).unwrap();
        assert_eq!(points.build().unwrap().d(0, 1), 5.0);
        let cheb = InstanceFile::parse(r#"{"points": [[0, 0], [3, 4]], "p": "inf"}"#).unwrap();
        assert_eq!(cheb.build().unwrap().d(0, 1), 4.0);
        let default_p = InstanceFile::parse(r#"{"points": [[0, 0], [3, 4]]}"#).unwrap();
        assert_eq!(default_p.build().unwrap().d(0, 1), 5.0);

        let graph = InstanceFile::parse(r#"{"graph": {"n": 3, "edges": [[0, 1, 1], [1, 2, 2.5]]}}"#).unwrap();
        assert_eq!(graph.build().unwrap().d(0, 2), 3.5);

        assert!(InstanceFile::parse(r#"{"points": [[0], [1]], "p": "two"}"#)
            .unwrap()
            .build()
            .is_err());
        assert!(InstanceFile::parse(r#"{"cloud": []}"#).is_err());
    }

    #[test]
    fn invalid_metric_file_reports_violations() {
        let f = InstanceFile::parse(r#"{"metric": {"dist": [[0, 3], [1, 0]]}}"#).unwrap();
        let err = f.build().unwrap_err();
        assert!(err.to_string().contains("AsymmetricEntry(0,1)"), "{err}");
    }

    #[test]
    fn maps_round_trip() {
        let space = Arc::new(
            InstanceFile::parse(r#"{"graph": {"n": 3, "edges": [[0, 1, 1], [1, 2, 1]]}}"#)
                .unwrap()
                .build()
                .unwrap(),
        );
        let real = MapFile::parse(r#"{"domain": [0, 2], "values": [[0.0], [2.0]], "target": {"kind": "real_line"}}"#)
            .unwrap()
            .build(space.clone())
            .unwrap();
        assert_eq!(lipschitz_constant(&real).constant, 1.0);
        let text = serde_json::to_string(&real).unwrap();
        assert_eq!(MapFile::parse(&text).unwrap().build(space.clone()).unwrap(), real);

        let finite = MapFile::parse(
            r#"{"domain": [0, 2], "values": [[0], [1]], "target": {"kind": "finite", "metric": {"dist": [[0, 1], [1, 0]]}}}"#,
        )
        .unwrap()
        .build(space.clone())
        .unwrap();
        assert_eq!(finite.index_values().unwrap(), vec![0, 1]);
        let text = serde_json::to_string(&finite).unwrap();
        assert!(text.contains("[[0],[1]]"), "{text}");

        let euclid =
            MapFile::parse(r#"{"domain": [1], "values": [[0.5, 1.5]], "target": {"kind": "euclidean", "dim": 2}}"#)
                .unwrap()
                .build(space.clone())
                .unwrap();
        assert_eq!(euclid.value_at(1).unwrap().coords().unwrap(), [0.5, 1.5]);

        let bad = MapFile::parse(
            r#"{"domain": [0], "values": [[0.5]], "target": {"kind": "finite", "metric": {"dist": [[0]]}}}"#,
        )
        .unwrap()
        .build(space);
        assert!(matches!(bad, Err(IoError::Value { row: 0 })));
    }
}
