//! Batch experiments: instance generators, experiment specs, a parallel
//! runner with deterministic output, and plot data.

use thiserror::Error;

pub mod generate;
pub mod plot;
pub mod run;
pub mod spec;

pub use generate::{generate, Generator, Instance};
pub use plot::{plot_data, write_plot_files, PlotData};
pub use run::{read_rows, run, write_csv, write_json, FailureKind, FailureRecord, ResultRow, RunOptions, RunReport};
pub use spec::{parse_specs, ExperimentSpec, ModulusChoice, OracleChoice, Quantity, SubsetChoice, TargetSpec};

#[derive(Debug, Error)]
pub enum LabError {
    #[error("bad spec: {0}")]
    BadSpec(String),
    #[error("{generator}: no connected graph after {attempts} attempts")]
    Disconnected { generator: String, attempts: u32 },
    #[error("cannot parse results: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Schema(#[from] crate::io::IoError),
    #[error(transparent)]
    Metric(#[from] crate::metric::MetricError),
    #[error(transparent)]
    Gluing(#[from] crate::gluing::GluingError),
    #[error(transparent)]
    Modulus(#[from] crate::moduli::ModulusError),
    #[error(transparent)]
    Solver(#[from] crate::solvers::SolverError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
