use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use lipext::gluing::{run_claim1, GluingError, GluingOptions};
use lipext::io::{to_json, InstanceFile, MapFile};
use lipext::lab::{self, FailureKind, Generator, OracleChoice, RunOptions, TargetSpec};
use lipext::metric::FiniteMetricSpace;
use lipext::moduli::{self, ModulusError, ModulusResult};
use lipext::solvers::DEFAULT_ENUMERATION_CAP;

#[derive(Parser)]
#[command(
    name = "lipext",
    version,
    about = "Lipschitz extension experiments on finite metric spaces"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Which {
    E,
    #[value(name = "e_n")]
    ELower,
    #[value(name = "e_up_n")]
    EUpper,
    Claim1,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file and report every metric axiom violation.
    Validate { instance: PathBuf },
    /// Print a generated instance as JSON.
    Gen {
        /// `path:M`, `cycle:M`, `random-graph:N:P:WMIN:WMAX` or `lp-cloud:N:DIM:P`.
        generator: Generator,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Extend a partial map to the whole space.
    Extend {
        instance: PathBuf,
        map: PathBuf,
        #[arg(long, value_parser = parse_oracle)]
        oracle: Option<OracleChoice>,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Run the gluing construction and print its certified trace.
    Glue {
        instance: PathBuf,
        /// The map `φ` on `S`.
        map: PathBuf,
        /// New points; without this, `--n` points outside `S` are drawn with `--seed`.
        #[arg(long, value_delimiter = ',')]
        xs: Vec<usize>,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 0.0)]
        delta: f64,
        /// Pick the farthest admissible proxy instead of the nearest.
        #[arg(long)]
        perturb: bool,
        #[arg(long, value_parser = parse_oracle)]
        oracle: Option<OracleChoice>,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
    },
    /// Compute `e(M, S; N)`, `e_n`, `e^n`, or check `e^n <= e_n + 2`.
    Modulus {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "e")]
        which: Which,
        #[arg(long, default_value = "two-point")]
        target: TargetSpec,
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Subset for `e`; defaults to the first and last point.
        #[arg(long, value_delimiter = ',')]
        subset: Vec<usize>,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap: u64,
        /// Seed and trial count for Euclidean targets.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 8)]
        trials: usize,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
    },
    /// Run a JSON list of experiment specs.
    Run {
        specs: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        out: Format,
        /// Write results here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Stop starting new instances after this many milliseconds.
        #[arg(long)]
        budget_ms: Option<u64>,
        /// Record per-instance wall time (output is then not byte-stable).
        #[arg(long)]
        timing: bool,
        /// Override the seed of every spec.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Turn a results file into `.dat` series and SVG scatters.
    Plot {
        results: PathBuf,
        #[arg(long, default_value = "plots")]
        dir: PathBuf,
    },
}

fn parse_oracle(s: &str) -> Result<OracleChoice, String> {
    s.parse().map_err(|e: lab::LabError| e.to_string())
}

type Failure = (u8, String);

fn fail(e: impl std::fmt::Display) -> Failure {
    (1, e.to_string())
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn load_space(path: &Path) -> Result<Arc<FiniteMetricSpace>, Failure> {
    let file = InstanceFile::parse(&read(path)?).map_err(fail)?;
    Ok(Arc::new(file.build().map_err(fail)?))
}

fn print_json<T: Serialize + ?Sized>(value: &T) {
    print!("{}", to_json(value));
}

fn main() -> ExitCode {
    match dispatch(Cli::parse().command) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Validate { instance } => {
            let space = load_space(&instance)?;
            println!("ok: {} points, diameter {}", space.size(), space.diameter());
        }
        Command::Gen { generator, seed } => {
            let inst = lab::generate(&generator, seed).map_err(fail)?;
            print_json(&inst.file);
        }
        Command::Extend {
            instance,
            map,
            oracle,
            cap,
        } => {
            let space = load_space(&instance)?;
            let phi = MapFile::parse(&read(&map)?)
                .map_err(fail)?
                .build(space.clone())
                .map_err(fail)?;
            let choice = oracle.unwrap_or_else(|| default_oracle(&phi));
            let all: Vec<usize> = (0..space.size()).collect();
            let result = choice.oracle(cap).extend(&phi, &all).map_err(fail)?;
            print_json(&result);
        }
        Command::Glue {
            instance,
            map,
            xs,
            n,
            seed,
            delta,
            perturb,
            oracle,
            cap,
        } => {
            let space = load_space(&instance)?;
            let phi = MapFile::parse(&read(&map)?)
                .map_err(fail)?
                .build(space.clone())
                .map_err(fail)?;
            let xs = if xs.is_empty() {
                let mut outside: Vec<usize> = (0..space.size()).filter(|i| phi.value_at(*i).is_none()).collect();
                outside.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
                let mut chosen: Vec<usize> = outside.into_iter().take(n).collect();
                chosen.sort_unstable();
                chosen
            } else {
                xs
            };
            let choice = oracle.unwrap_or_else(|| default_oracle(&phi));
            let opts = GluingOptions {
                delta,
                perturb,
                k: None,
            };
            match run_claim1(&phi, &xs, &choice.oracle(cap), &opts) {
                Ok(trace) => print_json(&trace),
                Err(e @ GluingError::CertificationFailure { .. }) => return Err((2, e.to_string())),
                Err(e) => return Err(fail(e)),
            }
        }
        Command::Modulus {
            instance,
            which,
            target,
            n,
            subset,
            cap,
            seed,
            trials,
            out,
        } => {
            let space = load_space(&instance)?;
            let target_space = target.build();
            let subset = if subset.is_empty() {
                lab::SubsetChoice::default().resolve(space.size())
            } else {
                subset
            };
            let results: Vec<ModulusResult> = match which {
                Which::E if target_space.finite().is_some() => {
                    vec![moduli::modulus_for_subset(&space, &subset, &target_space, cap).map_err(fail)?]
                }
                Which::E => {
                    let probe = moduli::EuclideanProbe::new(target_space.dim().unwrap_or(1), trials, seed);
                    vec![moduli::modulus_for_subset_euclidean(&space, &subset, &probe).map_err(fail)?]
                }
                Which::ELower => vec![moduli::e_n(&space, n, &target_space, cap).map_err(fail)?],
                Which::EUpper => vec![moduli::e_up_n(&space, n, &target_space, cap).map_err(fail)?],
                Which::Claim1 => match moduli::check_claim1(&space, n, &target_space, cap) {
                    Ok(check) => {
                        if out == Format::Json {
                            print_json(&check);
                            return Ok(());
                        }
                        vec![check.e_up_n, check.e_n]
                    }
                    Err(e @ ModulusError::Claim1Violated { .. }) => return Err((2, e.to_string())),
                    Err(e) => return Err(fail(e)),
                },
            };
            match out {
                Format::Json if results.len() == 1 => print_json(&results[0]),
                Format::Json => print_json(&results),
                Format::Csv => write_modulus_csv(&results).map_err(fail)?,
            }
        }
        Command::Run {
            specs,
            out,
            output,
            budget_ms,
            timing,
            seed,
        } => {
            let mut specs = lab::parse_specs(&read(&specs)?).map_err(fail)?;
            if let Some(seed) = seed {
                specs.iter_mut().for_each(|s| s.seed = seed);
            }
            let opts = RunOptions {
                budget: budget_ms.map(Duration::from_millis),
                timing,
                ..RunOptions::from_env()
            };
            let report = lab::run(&specs, &opts).map_err(fail)?;
            let mut buf = Vec::new();
            match out {
                Format::Json => lab::write_json(&report.rows, &mut buf),
                Format::Csv => lab::write_csv(&report.rows, &mut buf),
            }
            .map_err(fail)?;
            match output {
                Some(path) => std::fs::write(&path, &buf).map_err(fail)?,
                None => print!("{}", String::from_utf8_lossy(&buf)),
            }
            for f in &report.failures {
                eprintln!("{}", serde_json::to_string(f).expect("record serializes"));
            }
            for id in &report.skipped {
                eprintln!("skipped (budget): {id}");
            }
            eprintln!(
                "{} rows, {} failures, {} skipped",
                report.rows.len(),
                report.failures.len(),
                report.skipped.len()
            );
            let code = report.exit_code();
            if code != 0 {
                let kind = if code == 2 {
                    FailureKind::Certification
                } else {
                    FailureKind::Error
                };
                return Err((code as u8, format!("run finished with {kind:?} failures")));
            }
        }
        Command::Plot { results, dir } => {
            let rows = lab::read_rows(&read(&results)?).map_err(fail)?;
            for path in lab::write_plot_files(&rows, &dir).map_err(fail)? {
                println!("{}", path.display());
            }
        }
    }
    Ok(())
}

fn default_oracle(phi: &lipext::metric::PartialMap) -> OracleChoice {
    use lipext::metric::TargetSpace;
    match phi.target() {
        TargetSpace::Finite(_) => OracleChoice::Brute,
        TargetSpace::RealLine => OracleChoice::Mcshane,
        TargetSpace::Euclidean { .. } => OracleChoice::Euclidean,
    }
}

fn write_modulus_csv(results: &[ModulusResult]) -> Result<(), csv::Error> {
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record([
        "kind",
        "value",
        "exact",
        "witness_subset",
        "witness_points",
        "subsets",
        "maps",
        "search_nodes",
    ])?;
    let join = |v: &[usize]| v.iter().map(usize::to_string).collect::<Vec<_>>().join(" ");
    for r in results {
        w.write_record([
            r.kind.name().to_owned(),
            r.value.to_string(),
            r.exact.to_string(),
            join(&r.witness_subset),
            join(&r.witness_points),
            r.counts.subsets.to_string(),
            r.counts.maps.to_string(),
            r.counts.search_nodes.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
