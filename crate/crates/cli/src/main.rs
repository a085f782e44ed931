//! `idvd-dock`: plan a docking trajectory, run the Monte Carlo study, or
//! check the boundary matrices.
//!
//! Exit status: 0 on success (for `plan`, a feasible trajectory), 2 when
//! `plan` finishes with an infeasible trajectory, 1 on any error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use idvd_dock::export::{self, AngleUnit, PlanSummary};
use idvd_dock::harness::{compare_to_standard, run_study, Execution, Experiment, StudySummary};
use idvd_dock::model::{load_scenario, Scenario};
use idvd_dock::planner::optimize;
use idvd_dock::refcurve::{matrix_sanity, SPATIAL_MATRIX, YAW_MATRIX};

#[derive(Parser)]
#[command(name = "idvd-dock", version, about = "Docking trajectory planner for underwater vehicles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one trajectory and write trajectory.csv, violations.csv and summary.toml.
    Plan(PlanArgs),
    /// Run the robustness study and write per-run CSVs, summary.toml and comparison.csv.
    Montecarlo(MonteCarloArgs),
    /// Print the boundary matrices with their determinants and condition numbers.
    EmitMatrixCheck,
}

#[derive(Args)]
struct Common {
    /// Scenario file (TOML).
    #[arg(long)]
    scenario: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Override the node count.
    #[arg(long)]
    nodes: Option<usize>,
    /// Override the evaluation budget per penalty round.
    #[arg(long = "max-evals")]
    max_evals: Option<usize>,
}

impl Common {
    fn load(&self) -> idvd_dock::Result<Scenario> {
        let mut s = load_scenario(&self.scenario)?;
        if let Some(n) = self.nodes {
            s.nodes = n;
        }
        if let Some(n) = self.max_evals {
            s.solver.max_evaluations = n;
        }
        s.validate()?;
        Ok(s)
    }

    fn out_dir(&self) -> idvd_dock::Result<&Path> {
        fs::create_dir_all(&self.out)?;
        Ok(&self.out)
    }
}

#[derive(Args)]
struct PlanArgs {
    #[command(flatten)]
    common: Common,
    /// Write angles in degrees instead of radians.
    #[arg(long)]
    degrees: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentArg {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    Standard,
    All,
}

impl ExperimentArg {
    fn experiments(self) -> Vec<Experiment> {
        match self {
            ExperimentArg::One => vec![Experiment::One],
            ExperimentArg::Two => vec![Experiment::Two],
            ExperimentArg::Three => vec![Experiment::Three],
            ExperimentArg::Standard => vec![],
            ExperimentArg::All => vec![Experiment::One, Experiment::Two, Experiment::Three],
        }
    }
}

#[derive(Args)]
struct MonteCarloArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, value_enum, default_value = "all")]
    experiment: ExperimentArg,
    /// Runs per experiment.
    #[arg(long, default_value_t = 100)]
    runs: usize,
    /// Run k uses seed + k.
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Run one plan at a time instead of using every core.
    #[arg(long)]
    sequential: bool,
}

fn main() -> ExitCode {
    // clap exits with 2 on usage errors, which would read as "infeasible".
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Plan(args) => cmd_plan(&args),
        Command::Montecarlo(args) => cmd_montecarlo(&args),
        Command::EmitMatrixCheck => cmd_emit_matrix_check(),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn cmd_plan(args: &PlanArgs) -> idvd_dock::Result<ExitCode> {
    let scenario = args.common.load()?;
    let out = args.common.out_dir()?;
    let plan = optimize(&scenario)?;
    let unit = if args.degrees { AngleUnit::Degrees } else { AngleUnit::Radians };

    export::to_file(out.join("trajectory.csv"), |w| {
        export::write_trajectory_csv(w, &plan.trajectory, unit)
    })?;
    export::to_file(out.join("violations.csv"), |w| {
        export::write_violations_csv(w, &plan.report, &scenario.weights)
    })?;
    let summary = PlanSummary::from_plan(&plan);
    fs::write(out.join("summary.toml"), summary.to_toml_string()?)?;

    println!(
        "cost {:.6} t_f {:.6} s, {} evaluations in {} round(s), {:.3} s",
        summary.cost, summary.t_f, summary.evaluations, summary.penalty_rounds, summary.wall_time
    );
    if summary.feasible {
        println!("feasible");
        Ok(ExitCode::SUCCESS)
    } else {
        println!("infeasible: {}", summary.violated.join(", "));
        Ok(ExitCode::from(2))
    }
}

fn cmd_montecarlo(args: &MonteCarloArgs) -> idvd_dock::Result<ExitCode> {
    let nominal = args.common.load()?;
    let out = args.common.out_dir()?;
    let execution = if args.sequential { Execution::Sequential } else { Execution::Parallel };

    // Unperturbed runs are identical, so the standard condition is planned once.
    let mut summaries: Vec<StudySummary> = Vec::new();
    for exp in std::iter::once(Experiment::Standard).chain(args.experiment.experiments()) {
        let n = if exp == Experiment::Standard { 1 } else { args.runs };
        let study = run_study(&nominal, &exp.spec(), n, args.seed, exp.label(), execution)?;
        export::to_file(out.join(format!("runs-{}.csv", exp.label())), |w| {
            export::write_runs_csv(w, &study.runs)
        })?;
        let s = &study.summary;
        println!(
            "{}: {} runs, mean t_f {:.3} s, mean path {:.3} m, mean speed {:.3} m/s, {:.1}% infeasible, rmsd {:.3e} m",
            s.label,
            s.runs,
            s.flight_time.mean,
            s.path_length.mean,
            s.average_speed.mean,
            s.violation_percentage,
            s.rmsd_final_position
        );
        summaries.push(study.summary);
    }
    fs::write(out.join("summary.toml"), export::summaries_to_toml(&summaries)?)?;
    if summaries.len() > 1 {
        match compare_to_standard(&summaries[0], &summaries[1..]) {
            Ok(cmp) => export::to_file(out.join("comparison.csv"), |w| {
                export::write_comparison_csv(w, &cmp)
            })?,
            Err(e) => eprintln!("warning: no comparison written: {e}"),
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_matrix<const C: usize>(name: &str, rows: &[[f64; C]]) {
    println!("{name}:");
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:>22}")).collect();
        println!("  {}", cells.join(""));
    }
}

fn cmd_emit_matrix_check() -> idvd_dock::Result<ExitCode> {
    print_matrix("spatial boundary matrix", &SPATIAL_MATRIX);
    print_matrix("yaw boundary matrix", &YAW_MATRIX);
    match matrix_sanity() {
        Ok(c) => {
            println!("spatial determinant {} condition {}", c.spatial_determinant, c.spatial_condition);
            println!("yaw determinant {} condition {}", c.yaw_determinant, c.yaw_condition);
            println!("nonsingular");
            Ok(ExitCode::SUCCESS)
        }
        Err(e) => {
            println!("singular: {e}");
            Ok(ExitCode::from(1))
        }
    }
}
