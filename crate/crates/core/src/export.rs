//! File formats for plans and studies, with matching readers.
//!
//! Floats are written in shortest round-trip form, so every reader returns
//! exactly the values that were written. Angles are radians unless a writer
//! is asked for degrees.

use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::harness::{Comparison, RunMetrics, StudySummary};
use crate::invdyn::SampledTrajectory;
use crate::model::PenaltyWeights;
use crate::penalty::{Channel, ChannelViolation, ViolationReport};
use crate::planner::PlanResult;

/// Unit of the angle columns.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AngleUnit {
    #[default]
    Radians,
    Degrees,
}

impl AngleUnit {
    fn convert(self, v: f64) -> f64 {
        match self {
            AngleUnit::Radians => v,
            AngleUnit::Degrees => v.to_degrees(),
        }
    }
}

/// One node of an exported trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub psi: f64,
    pub theta: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub psi_dot: f64,
    pub theta_dot: f64,
    pub chi: f64,
    pub speed: f64,
}

pub fn trajectory_rows(traj: &SampledTrajectory, unit: AngleUnit) -> Vec<TrajectoryRow> {
    traj.nodes
        .iter()
        .map(|n| TrajectoryRow {
            t: n.t,
            x: n.position.north,
            y: n.position.east,
            z: n.position.down,
            psi: unit.convert(n.yaw),
            theta: unit.convert(n.pitch),
            u: n.body.surge,
            v: n.body.sway,
            w: n.body.heave,
            psi_dot: unit.convert(n.yaw_rate),
            theta_dot: unit.convert(n.pitch_rate),
            chi: unit.convert(n.course),
            speed: n.speed,
        })
        .collect()
}

pub fn write_trajectory_csv<W: Write>(
    out: W,
    traj: &SampledTrajectory,
    unit: AngleUnit,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in trajectory_rows(traj, unit) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<Vec<TrajectoryRow>> {
    csv::Reader::from_reader(input)
        .deserialize()
        .map(|r| r.map_err(Error::from))
        .collect()
}

pub fn write_violations_csv<W: Write>(
    out: W,
    report: &ViolationReport,
    weights: &PenaltyWeights,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["channel", "weight", "max_excess", "peak", "mean"])?;
    let weights = weights.to_array();
    for c in Channel::ALL {
        let v = report.channel(c);
        w.write_record([
            c.name().to_string(),
            format_f64(weights[c.index()]),
            format_f64(v.max_excess),
            format_f64(v.peak),
            format_f64(v.mean),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a violations CSV back into per-channel aggregates and weights.
pub fn read_violations_csv<R: Read>(
    input: R,
) -> Result<([ChannelViolation; 8], PenaltyWeights)> {
    let mut channels = [ChannelViolation::default(); 8];
    let mut weights = [0.0; 8];
    let mut seen = [false; 8];
    for record in csv::Reader::from_reader(input).into_records() {
        let record = record?;
        let field = |i: usize| record.get(i).unwrap_or_default();
        let channel = Channel::from_name(field(0))
            .ok_or_else(|| Error::validation(format!("unknown channel {:?}", field(0))))?;
        let i = channel.index();
        weights[i] = parse_f64(field(1))?;
        channels[i] = ChannelViolation {
            max_excess: parse_f64(field(2))?,
            peak: parse_f64(field(3))?,
            mean: parse_f64(field(4))?,
        };
        seen[i] = true;
    }
    if let Some(c) = Channel::ALL.iter().find(|c| !seen[c.index()]) {
        return Err(Error::validation(format!("violations file lacks channel {c}")));
    }
    Ok((channels, PenaltyWeights::from_array(weights)))
}

/// Shortest round-trip text for `v`, switching to exponent notation for
/// very small or very large magnitudes.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || !a.is_finite() || (1e-5..1e16).contains(&a) {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::validation(format!("not a number: {s:?}")))
}

/// Headline numbers of a plan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanSummary {
    pub feasible: bool,
    pub cost: f64,
    pub t_f: f64,
    pub path_length: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub penalty_rounds: usize,
    pub converged: bool,
    pub wall_time: f64,
    pub violated: Vec<String>,
    pub decision: DecisionSummary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecisionSummary {
    pub tau_f: f64,
    pub jerk0: [f64; 3],
    pub jerkf: [f64; 3],
    pub lambda_m: f64,
}

impl PlanSummary {
    pub fn from_plan(plan: &PlanResult) -> Self {
        let d = &plan.decision;
        Self {
            feasible: plan.is_feasible(),
            cost: plan.report.total_cost,
            t_f: plan.report.flight_time,
            path_length: plan.trajectory.path_length(),
            iterations: plan.iterations,
            evaluations: plan.evaluations,
            penalty_rounds: plan.rounds,
            converged: plan.converged,
            wall_time: plan.wall_time,
            violated: plan.report.violated().iter().map(|c| c.name().to_string()).collect(),
            decision: DecisionSummary {
                tau_f: d.tau_f,
                jerk0: d.jerk0.to_array(),
                jerkf: d.jerkf.to_array(),
                lambda_m: d.lambda_m,
            },
        }
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        Ok(toml::from_str(s)?)
    }
}

const RUN_COLUMNS: [&str; 11] = [
    "index",
    "seed",
    "flight_time",
    "path_length",
    "average_speed",
    "feasible",
    "final_position_error",
    "final_heading_error",
    "straight_line_distance",
    "wall_time",
    "failed",
];

const AGGREGATES: [&str; 3] = ["max_excess", "peak", "mean"];

/// Header of the per-run CSV: run metrics, then `<channel>_<aggregate>` for
/// every channel.
pub fn run_header() -> Vec<String> {
    let mut h: Vec<String> = RUN_COLUMNS.iter().map(|s| s.to_string()).collect();
    for c in Channel::ALL {
        h.extend(AGGREGATES.iter().map(|a| format!("{}_{a}", c.name())));
    }
    h
}

pub fn write_runs_csv<W: Write>(out: W, runs: &[RunMetrics]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(run_header())?;
    for r in runs {
        let mut rec = vec![
            r.index.to_string(),
            r.seed.to_string(),
            format_f64(r.flight_time),
            format_f64(r.path_length),
            format_f64(r.average_speed),
            r.feasible.to_string(),
            format_f64(r.final_position_error),
            format_f64(r.final_heading_error),
            format_f64(r.straight_line_distance),
            format_f64(r.wall_time),
            r.failed().to_string(),
        ];
        for c in &r.channels {
            rec.extend([format_f64(c.max_excess), format_f64(c.peak), format_f64(c.mean)]);
        }
        w.write_record(rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_runs_csv<R: Read>(input: R) -> Result<Vec<RunMetrics>> {
    let mut reader = csv::Reader::from_reader(input);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    if header != run_header() {
        return Err(Error::validation("per-run CSV header does not match"));
    }
    let mut runs = Vec::new();
    for record in reader.into_records() {
        let rec = record?;
        let f = |i: usize| parse_f64(&rec[i]);
        let parse_bool = |i: usize| {
            rec[i]
                .parse::<bool>()
                .map_err(|_| Error::validation(format!("not a boolean: {:?}", &rec[i])))
        };
        let parse_int = |i: usize| {
            rec[i].parse::<u64>().map_err(|_| Error::validation(format!("not an integer: {:?}", &rec[i])))
        };
        let mut channels = [ChannelViolation::default(); 8];
        for (k, ch) in channels.iter_mut().enumerate() {
            let base = RUN_COLUMNS.len() + 3 * k;
            *ch = ChannelViolation { max_excess: f(base)?, peak: f(base + 1)?, mean: f(base + 2)? };
        }
        runs.push(RunMetrics {
            index: parse_int(0)? as usize,
            seed: parse_int(1)?,
            flight_time: f(2)?,
            path_length: f(3)?,
            average_speed: f(4)?,
            feasible: parse_bool(5)?,
            final_position_error: f(6)?,
            final_heading_error: f(7)?,
            straight_line_distance: f(8)?,
            wall_time: f(9)?,
            channels,
        });
    }
    Ok(runs)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct StudyFile {
    experiments: Vec<StudySummary>,
}

pub fn summaries_to_toml(summaries: &[StudySummary]) -> Result<String> {
    Ok(toml::to_string(&StudyFile { experiments: summaries.to_vec() })?)
}

pub fn summaries_from_toml(s: &str) -> Result<Vec<StudySummary>> {
    Ok(toml::from_str::<StudyFile>(s)?.experiments)
}

/// `metric, <label>…, <label>_rel…`, one row per metric.
pub fn write_comparison_csv<W: Write>(out: W, cmp: &Comparison) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["metric".to_string()];
    header.extend(cmp.labels.iter().cloned());
    header.extend(cmp.labels.iter().map(|l| format!("{l}_rel")));
    w.write_record(&header)?;
    for row in &cmp.rows {
        let mut rec = vec![row.metric.to_string()];
        rec.extend(row.values.iter().map(|&v| format_f64(v)));
        rec.extend(row.relative.iter().map(|&v| format_f64(v)));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Creates `path` and hands a buffered writer to `write`.
pub fn to_file<F>(path: impl AsRef<Path>, write: F) -> Result<()>
where
    F: FnOnce(&mut std::io::BufWriter<File>) -> Result<()>,
{
    let mut out = std::io::BufWriter::new(File::create(path)?);
    write(&mut out)?;
    out.flush()?;
    Ok(())
}
