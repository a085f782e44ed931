//! Runs the standard condition and the three experiments on the nominal
//! scenario and prints the comparison table.
//!
//! Usage: `cargo run --release --example study -- [scenario.toml] [runs] [seed]`

use idvd_dock::harness::{compare_to_standard, run_study, Execution, Experiment};
use idvd_dock::model::load_scenario;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let path = args
        .first()
        .cloned()
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/nominal.toml").into());
    let runs: usize = args.get(1).map(|s| s.parse()).transpose()?.unwrap_or(20);
    let seed: u64 = args.get(2).map(|s| s.parse()).transpose()?.unwrap_or(1);
    let nominal = load_scenario(&path)?;

    let mut summaries = Vec::new();
    for exp in Experiment::ALL {
        let n = if exp == Experiment::Standard { 1 } else { runs };
        let started = std::time::Instant::now();
        let study = run_study(&nominal, &exp.spec(), n, seed, exp.label(), Execution::Parallel)?;
        let s = &study.summary;
        println!(
            "{:<13} runs {:>4}  failed {:>3}  t_f {:8.3} ± {:7.3}  L {:8.3}  v {:6.3}  viol {:5.1}%  rmsd {:.2e}  ({:.1} s)",
            s.label,
            s.runs,
            s.failed_runs,
            s.flight_time.mean,
            s.flight_time.stddev,
            s.path_length.mean,
            s.average_speed.mean,
            s.violation_percentage,
            s.rmsd_final_position,
            started.elapsed().as_secs_f64()
        );
        summaries.push(study.summary);
    }
    let cmp = compare_to_standard(&summaries[0], &summaries[1..])?;
    for row in &cmp.rows {
        println!("{:<22} {:?}", row.metric, row.relative);
    }
    Ok(())
}
