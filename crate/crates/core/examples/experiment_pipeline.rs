//! Spec file to result rows to plot series, all in memory.

use lipext::lab::{parse_specs, plot_data, run, write_csv, RunOptions};

const SPECS: &str = r#"[
  {"id": "blowup", "generators": ["path:2", "path:3", "path:4", "path:5", "path:6"],
   "target": "two-point", "quantity": {"kind": "modulus"}},
  {"id": "glue", "generators": ["random-graph:6:0.5:1:3"], "repetitions": 5, "seed": 1,
   "target": "real-line", "quantity": {"kind": "glue_trace"}, "n": 2, "delta": 0.1}
]"#;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let specs = parse_specs(SPECS)?;
    let report = run(&specs, &RunOptions::from_env())?;
    write_csv(&report.rows, std::io::stdout())?;
    let data = plot_data(&report.rows);
    println!("modulus vs m: {:?}", data.modulus_vs_param);
    println!("achieved vs certified: {:?}", data.achieved_vs_certified);
    println!("exit code would be {}", report.exit_code());
    Ok(())
}
