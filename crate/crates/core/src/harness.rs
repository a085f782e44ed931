//! Monte Carlo robustness study.
//!
//! A study perturbs a nominal scenario `n_runs` times, plans each perturbed
//! scenario independently and summarizes flight time, path length, average
//! speed, violation percentage and RMSD of the final position.
//!
//! Interpretation notes:
//!
//! * Gaussian draws are zero-mean offsets *added* to the nominal value; uniform
//!   draws *replace* it.
//! * A run counts as a violation when its planned trajectory is not feasible
//!   (see [`crate::penalty::FEASIBILITY_THRESHOLD`]).
//! * RMSD is taken over the final-position error of every run, measured
//!   against that run's own (perturbed) dock position.
//! * Run `k` is seeded with `base_seed + k`, so its result does not depend on
//!   `n_runs` or on execution order.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{wrap_angle, Scenario};
use crate::penalty::ChannelViolation;
use crate::planner::optimize;

const MAX_REDRAWS: usize = 10;

/// How one scenario parameter is randomized.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Draw {
    Fixed,
    /// Adds `N(0, σ²)` to the nominal value.
    Gaussian { sigma: f64 },
    /// Replaces the nominal value with `U(lo, hi)`.
    Uniform { lo: f64, hi: f64 },
}

impl Draw {
    fn apply<R: Rng>(&self, nominal: f64, rng: &mut R) -> Result<f64> {
        match *self {
            Draw::Fixed => Ok(nominal),
            Draw::Gaussian { sigma } => {
                let normal = Normal::new(0.0, sigma)
                    .map_err(|e| Error::validation(format!("bad gaussian sigma {sigma}: {e}")))?;
                Ok(nominal + normal.sample(rng))
            }
            Draw::Uniform { lo, hi } => Ok(rng.random_range(lo..hi)),
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        match *self {
            Draw::Fixed => Ok(()),
            Draw::Gaussian { sigma } if sigma >= 0.0 && sigma.is_finite() => Ok(()),
            Draw::Uniform { lo, hi } if lo < hi && lo.is_finite() && hi.is_finite() => Ok(()),
            _ => Err(Error::validation(format!("invalid distribution for {name}: {self:?}"))),
        }
    }
}

/// Distributions of every randomized parameter. Angles are radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerturbationSpec {
    pub start_north: Draw,
    pub start_east: Draw,
    pub start_depth: Draw,
    pub start_yaw: Draw,
    pub dock_north: Draw,
    pub dock_east: Draw,
    pub dock_depth: Draw,
    pub dock_yaw: Draw,
    pub current_speed: Draw,
    pub current_direction: Draw,
}

impl Default for PerturbationSpec {
    fn default() -> Self {
        Self {
            start_north: Draw::Fixed,
            start_east: Draw::Fixed,
            start_depth: Draw::Fixed,
            start_yaw: Draw::Fixed,
            dock_north: Draw::Fixed,
            dock_east: Draw::Fixed,
            dock_depth: Draw::Fixed,
            dock_yaw: Draw::Fixed,
            current_speed: Draw::Fixed,
            current_direction: Draw::Fixed,
        }
    }
}

impl PerturbationSpec {
    /// Positions σ = 10 m (north, east) and 2 m (depth), headings σ = 45°.
    pub fn experiment_one() -> Self {
        let horizontal = Draw::Gaussian { sigma: 10.0 };
        let depth = Draw::Gaussian { sigma: 2.0 };
        let heading = Draw::Gaussian { sigma: 45f64.to_radians() };
        Self {
            start_north: horizontal,
            start_east: horizontal,
            start_depth: depth,
            start_yaw: heading,
            dock_north: horizontal,
            dock_east: horizontal,
            dock_depth: depth,
            dock_yaw: heading,
            ..Self::default()
        }
    }

    /// Experiment one plus current speed σ = 0.3 m/s and direction σ = 90°.
    pub fn experiment_two() -> Self {
        Self {
            current_speed: Draw::Gaussian { sigma: 0.3 },
            current_direction: Draw::Gaussian { sigma: 90f64.to_radians() },
            ..Self::experiment_one()
        }
    }

    /// Experiment two with the start, dock and current headings drawn
    /// uniformly over the full circle.
    pub fn experiment_three() -> Self {
        let circle = Draw::Uniform { lo: 0.0, hi: 2.0 * std::f64::consts::PI };
        Self {
            start_yaw: circle,
            dock_yaw: circle,
            current_direction: circle,
            ..Self::experiment_two()
        }
    }

    fn entries(&self) -> [(&'static str, Draw); 10] {
        [
            ("start_north", self.start_north),
            ("start_east", self.start_east),
            ("start_depth", self.start_depth),
            ("start_yaw", self.start_yaw),
            ("dock_north", self.dock_north),
            ("dock_east", self.dock_east),
            ("dock_depth", self.dock_depth),
            ("dock_yaw", self.dock_yaw),
            ("current_speed", self.current_speed),
            ("current_direction", self.current_direction),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        self.entries().iter().try_for_each(|(name, d)| d.validate(name))
    }
}

/// The four study conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Experiment {
    Standard,
    One,
    Two,
    Three,
}

impl Experiment {
    pub const ALL: [Experiment; 4] =
        [Experiment::Standard, Experiment::One, Experiment::Two, Experiment::Three];

    pub fn spec(self) -> PerturbationSpec {
        match self {
            Experiment::Standard => PerturbationSpec::default(),
            Experiment::One => PerturbationSpec::experiment_one(),
            Experiment::Two => PerturbationSpec::experiment_two(),
            Experiment::Three => PerturbationSpec::experiment_three(),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Experiment::Standard => "standard",
            Experiment::One => "experiment-1",
            Experiment::Two => "experiment-2",
            Experiment::Three => "experiment-3",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Experiment {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(Experiment::Standard),
            "1" | "experiment-1" => Ok(Experiment::One),
            "2" | "experiment-2" => Ok(Experiment::Two),
            "3" | "experiment-3" => Ok(Experiment::Three),
            other => Err(Error::validation(format!(
                "unknown experiment {other:?}; expected 1, 2, 3 or standard"
            ))),
        }
    }
}

/// Draws one perturbed scenario. Deterministic in `seed`.
///
/// Current speed draws below zero are clamped to zero. A draw that fails
/// scenario validation is discarded and redrawn from the same stream, at
/// most ten times.
pub fn perturb(nominal: &Scenario, spec: &PerturbationSpec, seed: u64) -> Result<Scenario> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_err = None;
    for _ in 0..MAX_REDRAWS {
        let mut s = nominal.clone();
        s.start.position.north = spec.start_north.apply(s.start.position.north, &mut rng)?;
        s.start.position.east = spec.start_east.apply(s.start.position.east, &mut rng)?;
        s.start.position.down = spec.start_depth.apply(s.start.position.down, &mut rng)?;
        s.start.yaw = spec.start_yaw.apply(s.start.yaw, &mut rng)?;
        s.dock.position.north = spec.dock_north.apply(s.dock.position.north, &mut rng)?;
        s.dock.position.east = spec.dock_east.apply(s.dock.position.east, &mut rng)?;
        s.dock.position.down = spec.dock_depth.apply(s.dock.position.down, &mut rng)?;
        s.dock.yaw = spec.dock_yaw.apply(s.dock.yaw, &mut rng)?;
        s.current.magnitude = spec.current_speed.apply(s.current.magnitude, &mut rng)?.max(0.0);
        s.current.direction = spec.current_direction.apply(s.current.direction, &mut rng)?;
        if spec.start_yaw != Draw::Fixed {
            s.start.yaw = wrap_angle(s.start.yaw);
        }
        if spec.dock_yaw != Draw::Fixed {
            s.dock.yaw = wrap_angle(s.dock.yaw);
        }
        if spec.current_direction != Draw::Fixed {
            s.current.direction = wrap_angle(s.current.direction);
        }
        let degenerate = s.start.position.distance(&s.dock.position) == 0.0;
        match s.validate() {
            Ok(()) if !degenerate => return Ok(s),
            Ok(()) => last_err = Some(Error::validation("perturbed start coincides with the dock")),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one draw was made"))
}

/// Outcome of a single Monte Carlo run. Failed runs carry NaN metrics and
/// `feasible = false`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    pub index: usize,
    pub seed: u64,
    pub flight_time: f64,
    pub path_length: f64,
    pub average_speed: f64,
    pub feasible: bool,
    pub final_position_error: f64,
    pub final_heading_error: f64,
    /// Start-to-dock distance of the perturbed scenario, m.
    pub straight_line_distance: f64,
    pub wall_time: f64,
    pub channels: [ChannelViolation; 8],
}

impl RunMetrics {
    pub fn failed(&self) -> bool {
        self.flight_time.is_nan()
    }

    /// Equality ignoring `wall_time`.
    pub fn same_outcome(&self, other: &RunMetrics) -> bool {
        let mut a = self.clone();
        a.wall_time = other.wall_time;
        // NaN != NaN, so compare bit patterns.
        format!("{a:?}") == format!("{other:?}")
    }
}

/// Plans one perturbed scenario. Errors become a failed (infeasible) run.
pub fn run_once(nominal: &Scenario, spec: &PerturbationSpec, index: usize, seed: u64) -> RunMetrics {
    let failed = |wall_time: f64| RunMetrics {
        index,
        seed,
        flight_time: f64::NAN,
        path_length: f64::NAN,
        average_speed: f64::NAN,
        feasible: false,
        final_position_error: f64::NAN,
        final_heading_error: f64::NAN,
        straight_line_distance: f64::NAN,
        wall_time,
        channels: [ChannelViolation::default(); 8],
    };
    let started = std::time::Instant::now();
    let Ok(scenario) = perturb(nominal, spec, seed) else {
        return failed(started.elapsed().as_secs_f64());
    };
    let Ok(plan) = optimize(&scenario) else {
        return failed(started.elapsed().as_secs_f64());
    };
    let last = plan.trajectory.last();
    let path_length = plan.trajectory.path_length();
    let flight_time = plan.report.flight_time;
    RunMetrics {
        index,
        seed,
        flight_time,
        path_length,
        average_speed: path_length / flight_time,
        feasible: plan.is_feasible(),
        final_position_error: last.position.distance(&scenario.dock.position),
        final_heading_error: wrap_angle(last.yaw - scenario.dock.yaw).abs(),
        straight_line_distance: scenario.start.position.distance(&scenario.dock.position),
        wall_time: plan.wall_time,
        channels: plan.report.channels,
    }
}

/// Mean, sample standard deviation, min and max.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub stddev: f64,
    pub min: f64,
    pub max: f64,
}

impl Stats {
    /// Two-pass statistics over the finite values; NaN fields if none.
    pub fn from_values(values: impl IntoIterator<Item = f64>) -> Self {
        let v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        if v.is_empty() {
            return Stats { mean: f64::NAN, stddev: f64::NAN, min: f64::NAN, max: f64::NAN };
        }
        let n = v.len() as f64;
        let mean = v.iter().sum::<f64>() / n;
        let ss: f64 = v.iter().map(|x| (x - mean) * (x - mean)).sum();
        let stddev = if v.len() > 1 { (ss / (n - 1.0)).sqrt() } else { 0.0 };
        Stats {
            mean,
            stddev,
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub label: String,
    pub runs: usize,
    pub failed_runs: usize,
    pub flight_time: Stats,
    pub path_length: Stats,
    pub average_speed: Stats,
    /// Percentage of runs whose plan is infeasible.
    pub violation_percentage: f64,
    /// Root-mean-square final-position error, m.
    pub rmsd_final_position: f64,
    /// Root-mean-square final-heading error, rad.
    pub rmsd_final_heading: f64,
}

fn rms(values: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = values.filter(|x| x.is_finite()).collect();
    if v.is_empty() {
        return f64::NAN;
    }
    (v.iter().map(|x| x * x).sum::<f64>() / v.len() as f64).sqrt()
}

impl StudySummary {
    pub fn from_runs(label: impl Into<String>, runs: &[RunMetrics]) -> Self {
        let infeasible = runs.iter().filter(|r| !r.feasible).count();
        Self {
            label: label.into(),
            runs: runs.len(),
            failed_runs: runs.iter().filter(|r| r.failed()).count(),
            flight_time: Stats::from_values(runs.iter().map(|r| r.flight_time)),
            path_length: Stats::from_values(runs.iter().map(|r| r.path_length)),
            average_speed: Stats::from_values(runs.iter().map(|r| r.average_speed)),
            violation_percentage: if runs.is_empty() {
                0.0
            } else {
                100.0 * infeasible as f64 / runs.len() as f64
            },
            rmsd_final_position: rms(runs.iter().map(|r| r.final_position_error)),
            rmsd_final_heading: rms(runs.iter().map(|r| r.final_heading_error)),
        }
    }
}

/// Whether runs are spread over the rayon pool or executed in order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    #[default]
    Parallel,
    Sequential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Study {
    pub runs: Vec<RunMetrics>,
    pub summary: StudySummary,
}

/// Runs `n_runs` perturbed plans. Rows come back ordered by run index.
pub fn run_study(
    nominal: &Scenario,
    spec: &PerturbationSpec,
    n_runs: usize,
    base_seed: u64,
    label: &str,
    execution: Execution,
) -> Result<Study> {
    if n_runs == 0 {
        return Err(Error::validation("a study needs at least one run"));
    }
    nominal.validate()?;
    spec.validate()?;
    let one = |k: usize| run_once(nominal, spec, k, base_seed.wrapping_add(k as u64));
    let runs: Vec<RunMetrics> = match execution {
        Execution::Parallel => (0..n_runs).into_par_iter().map(one).collect(),
        Execution::Sequential => (0..n_runs).map(one).collect(),
    };
    let summary = StudySummary::from_runs(label, &runs);
    Ok(Study { runs, summary })
}

/// One metric across the standard condition and every experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonRow {
    pub metric: &'static str,
    pub values: Vec<f64>,
    /// `(value − standard) / |standard|`; the first entry is always 0.
    pub relative: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    /// Column labels, standard first.
    pub labels: Vec<String>,
    pub rows: Vec<ComparisonRow>,
}

/// Metrics covered by [`similar_within`](Comparison::similar_within).
pub const SIMILARITY_METRICS: [&str; 3] =
    ["flight_time_mean", "path_length_mean", "average_speed_mean"];

impl Comparison {
    pub fn row(&self, metric: &str) -> Option<&ComparisonRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }

    /// True when mean flight time, path length and average speed of every
    /// experiment are within `threshold` (relative) of the standard.
    pub fn similar_within(&self, threshold: f64) -> bool {
        SIMILARITY_METRICS.iter().all(|m| {
            self.row(m)
                .map(|r| r.relative.iter().all(|d| d.abs() <= threshold))
                .unwrap_or(false)
        })
    }
}

fn metric_values(s: &StudySummary) -> [(&'static str, f64); 5] {
    [
        ("flight_time_mean", s.flight_time.mean),
        ("path_length_mean", s.path_length.mean),
        ("average_speed_mean", s.average_speed.mean),
        ("violation_percentage", s.violation_percentage),
        ("rmsd_final_position", s.rmsd_final_position),
    ]
}

fn relative(value: f64, reference: f64) -> f64 {
    if value == reference {
        0.0
    } else {
        (value - reference) / reference.abs()
    }
}

/// Relative differences of each experiment against the standard condition.
/// Fails if any summary lacks a metric (no successful run).
pub fn compare_to_standard(
    standard: &StudySummary,
    experiments: &[StudySummary],
) -> Result<Comparison> {
    let all: Vec<&StudySummary> = std::iter::once(standard).chain(experiments).collect();
    for s in &all {
        if s.flight_time.mean.is_nan() {
            return Err(Error::validation(format!(
                "summary {:?} has no successful runs to compare",
                s.label
            )));
        }
    }
    let reference = metric_values(standard);
    let rows = reference
        .iter()
        .enumerate()
        .map(|(i, &(metric, base))| {
            let values: Vec<f64> = all.iter().map(|s| metric_values(s)[i].1).collect();
            let relative = values.iter().map(|&v| relative(v, base)).collect();
            ComparisonRow { metric, values, relative }
        })
        .collect();
    Ok(Comparison { labels: all.iter().map(|s| s.label.clone()).collect(), rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experiment_parsing() {
        assert_eq!("standard".parse::<Experiment>().unwrap(), Experiment::Standard);
        assert_eq!("3".parse::<Experiment>().unwrap(), Experiment::Three);
        assert!("4".parse::<Experiment>().is_err());
    }

    #[test]
    fn experiment_three_uses_full_circle() {
        let spec = PerturbationSpec::experiment_three();
        let circle = Draw::Uniform { lo: 0.0, hi: 2.0 * std::f64::consts::PI };
        assert_eq!(spec.start_yaw, circle);
        assert_eq!(spec.dock_yaw, circle);
        assert_eq!(spec.current_direction, circle);
        // Everything else is inherited from experiment two.
        assert_eq!(spec.current_speed, Draw::Gaussian { sigma: 0.3 });
        assert_eq!(spec.dock_depth, Draw::Gaussian { sigma: 2.0 });
    }

    #[test]
    fn stats_two_pass() {
        let s = Stats::from_values([1.0, 2.0, 3.0, 4.0, f64::NAN]);
        assert_eq!(s.mean, 2.5);
        assert!((s.stddev - (5.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!((s.min, s.max), (1.0, 4.0));
        assert_eq!(Stats::from_values([7.0]).stddev, 0.0);
        assert!(Stats::from_values([]).mean.is_nan());
    }

    #[test]
    fn invalid_spec_is_rejected() {
        let spec = PerturbationSpec { dock_depth: Draw::Gaussian { sigma: -1.0 }, ..Default::default() };
        assert!(spec.validate().is_err());
        let spec = PerturbationSpec { dock_yaw: Draw::Uniform { lo: 1.0, hi: 1.0 }, ..Default::default() };
        assert!(spec.validate().is_err());
    }

    fn summary(label: &str, t: f64) -> StudySummary {
        let st = Stats { mean: t, stddev: 0.0, min: t, max: t };
        StudySummary {
            label: label.into(),
            runs: 1,
            failed_runs: 0,
            flight_time: st,
            path_length: st,
            average_speed: st,
            violation_percentage: 0.0,
            rmsd_final_position: 0.0,
            rmsd_final_heading: 0.0,
        }
    }

    #[test]
    fn comparison_against_itself_is_zero() {
        let s = summary("standard", 40.0);
        let c = compare_to_standard(&s, &[s.clone(), s.clone(), s.clone()]).unwrap();
        assert_eq!(c.labels.len(), 4);
        for row in &c.rows {
            assert!(row.relative.iter().all(|&d| d == 0.0), "{row:?}");
        }
        assert!(c.similar_within(0.0));
    }

    #[test]
    fn comparison_relative_difference() {
        let c = compare_to_standard(&summary("standard", 40.0), &[summary("x", 50.0)]).unwrap();
        let row = c.row("flight_time_mean").unwrap();
        assert_eq!(row.relative, vec![0.0, 0.25]);
        assert!(c.similar_within(0.25));
        assert!(!c.similar_within(0.2));
    }

    #[test]
    fn comparison_needs_metrics() {
        let mut empty = summary("x", 1.0);
        empty.flight_time.mean = f64::NAN;
        assert!(compare_to_standard(&summary("standard", 1.0), &[empty]).is_err());
    }
}
