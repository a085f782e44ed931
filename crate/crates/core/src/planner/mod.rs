//! The optimization step: pack the free variables into a decision vector,
//! assemble curve → timing → inverse dynamics → cost, and search with the
//! downhill simplex.
//!
//! The cost is a penalty function, so an unconstrained minimum may sit just
//! outside the admissible set. When that happens the weights are multiplied
//! by [`SolverOptions::penalty_growth`] and the search is restarted from the
//! best point, up to [`SolverOptions::penalty_rounds`] rounds. The reported
//! cost always uses the scenario's own weights. If no round reaches
//! feasibility, the round with the lowest cost under those weights is
//! returned.

use std::time::Instant;

use crate::error::{Error, Result};
use crate::invdyn::{sample_trajectory, SampledTrajectory, SpeedFactorProfile};
use crate::model::{NedVector, PenaltyWeights, Scenario, SolverOptions};
use crate::penalty::{evaluate_cost, evaluate_cost_weighted, ViolationReport};
use crate::refcurve::ReferenceCurve;

pub mod simplex;

use simplex::{coordinate_simplex, NelderMead};

/// Cost assigned to decision vectors whose assembly fails.
pub const SENTINEL_COST: f64 = 1e12;

/// The eight free variables of the search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionVector {
    /// Virtual horizon, s.
    pub tau_f: f64,
    /// Initial jerk, m/s³.
    pub jerk0: NedVector,
    /// Final jerk, m/s³.
    pub jerkf: NedVector,
    /// Speed-factor shape.
    pub lambda_m: f64,
}

impl DecisionVector {
    pub fn to_array(&self) -> [f64; 8] {
        let (a, b) = (self.jerk0, self.jerkf);
        [self.tau_f, a.north, a.east, a.down, b.north, b.east, b.down, self.lambda_m]
    }

    pub fn from_slice(x: &[f64]) -> Self {
        assert_eq!(x.len(), 8, "decision vector has 8 entries");
        Self {
            tau_f: x[0],
            jerk0: NedVector::new(x[1], x[2], x[3]),
            jerkf: NedVector::new(x[4], x[5], x[6]),
            lambda_m: x[7],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau_f > 0.0 && self.tau_f.is_finite()) {
            return Err(Error::domain(format!("tau_f must be > 0, got {}", self.tau_f)));
        }
        if !(self.lambda_m > -1.0 && self.lambda_m.is_finite()) {
            return Err(Error::domain(format!("lambda_m must be > -1, got {}", self.lambda_m)));
        }
        if !(self.jerk0.is_finite() && self.jerkf.is_finite()) {
            return Err(Error::domain("boundary jerks must be finite"));
        }
        Ok(())
    }

    /// Mirrors out-of-domain entries back across their bounds
    /// (`tau_f > 0`, `lambda_m > −1`).
    pub fn reflected(mut self) -> Self {
        if self.tau_f < 0.0 {
            self.tau_f = -self.tau_f;
        }
        if self.lambda_m < -1.0 {
            self.lambda_m = -2.0 - self.lambda_m;
        }
        self
    }
}

/// Trajectory plus its cost breakdown for one decision vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    pub trajectory: SampledTrajectory,
    pub report: ViolationReport,
}

/// Runs the full pipeline for `d`. Pure: identical inputs give identical
/// outputs.
pub fn assemble(d: &DecisionVector, scenario: &Scenario) -> Result<Assembly> {
    let trajectory = build_trajectory(d, scenario)?;
    let report = evaluate_cost(&trajectory, scenario);
    Ok(Assembly { trajectory, report })
}

fn build_trajectory(d: &DecisionVector, scenario: &Scenario) -> Result<SampledTrajectory> {
    d.validate()?;
    let curve = ReferenceCurve::solve(&scenario.boundary(), d.jerk0, d.jerkf, d.tau_f)?;
    let profile = SpeedFactorProfile::new(d.lambda_m)?;
    sample_trajectory(&curve, &profile, scenario, scenario.nodes)
}

/// Objective seen by the simplex for a given weight set.
fn objective(x: &[f64], scenario: &Scenario, weights: &PenaltyWeights) -> f64 {
    let d = DecisionVector::from_slice(x).reflected();
    match build_trajectory(&d, scenario) {
        Ok(traj) => evaluate_cost_weighted(&traj, scenario, weights).total_cost,
        Err(_) => SENTINEL_COST + d.tau_f.abs(),
    }
}

/// Straight-line time at cruise speed, zero jerks, flat speed factor.
///
/// Cruise speed is the midpoint of the surge limits. If that is not positive
/// (a scenario that forbids forward motion), the mean of the boundary speeds
/// is used instead.
pub fn initial_guess(scenario: &Scenario) -> Result<DecisionVector> {
    let distance = scenario.start.position.distance(&scenario.dock.position);
    if !(distance > 0.0) {
        return Err(Error::validation("start position coincides with the dock"));
    }
    let surge = scenario.limits.surge;
    let mut cruise = 0.5 * (surge.min + surge.max);
    if !(cruise > 0.0) {
        cruise = 0.5 * (scenario.start.speed.abs() + scenario.arrival.speed.abs());
    }
    if !(cruise > 0.0) {
        return Err(Error::validation("no positive cruise speed to seed tau_f"));
    }
    Ok(DecisionVector {
        tau_f: distance / cruise,
        jerk0: NedVector::ZERO,
        jerkf: NedVector::ZERO,
        lambda_m: 0.0,
    })
}

/// Starting simplex around `x`: `tau_f` scaled by `1 + tau_f_step`, each
/// jerk offset by `jerk_step`, the shape by `lambda_step`.
pub fn initial_simplex(x: &DecisionVector, opts: &SolverOptions) -> Vec<Vec<f64>> {
    let j = opts.jerk_step;
    let steps = [opts.tau_f_step * x.tau_f.abs().max(1.0), j, j, j, j, j, j, opts.lambda_step];
    coordinate_simplex(&x.to_array(), &steps)
}

/// Best cost after each simplex iteration, tagged with its penalty round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TracePoint {
    pub round: usize,
    pub best_cost: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlanResult {
    pub decision: DecisionVector,
    pub trajectory: SampledTrajectory,
    /// Evaluated with the scenario's weights.
    pub report: ViolationReport,
    pub iterations: usize,
    pub evaluations: usize,
    pub rounds: usize,
    /// Seconds.
    pub wall_time: f64,
    /// The final simplex met its spread tolerance.
    pub converged: bool,
    pub trace: Vec<TracePoint>,
}

impl PlanResult {
    pub fn is_feasible(&self) -> bool {
        self.report.is_feasible()
    }
}

/// Plans a docking trajectory for `scenario` with its own solver options.
pub fn optimize(scenario: &Scenario) -> Result<PlanResult> {
    let started = Instant::now();
    scenario.validate()?;
    let opts = scenario.solver;
    let mut x = initial_guess(scenario)?;

    let mut iterations = 0;
    let mut evaluations = 0;
    let mut trace = Vec::new();
    let mut converged = false;
    let mut rounds = 0;
    let mut best = None;

    for round in 0..opts.penalty_rounds {
        rounds = round + 1;
        let weights = scenario.weights.scaled(opts.penalty_growth.powi(round as i32));
        let nm = NelderMead {
            tolerance: opts.tolerance,
            max_evaluations: opts.max_evaluations,
            ..NelderMead::default()
        };
        let outcome = nm.minimize(|v| objective(v, scenario, &weights), initial_simplex(&x, &opts));
        iterations += outcome.iterations;
        evaluations += outcome.evaluations;
        converged = outcome.converged;
        trace.extend(outcome.trace.iter().map(|&best_cost| TracePoint { round, best_cost }));

        if outcome.f >= SENTINEL_COST {
            break;
        }
        x = DecisionVector::from_slice(&outcome.x).reflected();
        let assembly = assemble(&x, scenario)?;
        let feasible = assembly.report.is_feasible();
        let improves = best
            .as_ref()
            .is_none_or(|(_, b): &(DecisionVector, Assembly)| {
                assembly.report.total_cost < b.report.total_cost
            });
        if feasible || improves {
            best = Some((x, assembly));
        }
        if feasible {
            break;
        }
    }

    let (decision, Assembly { trajectory, report }) = best.ok_or_else(|| {
        Error::domain("optimizer found no decision vector with a finite penalized cost")
    })?;
    Ok(PlanResult {
        decision,
        trajectory,
        report,
        iterations,
        evaluations,
        rounds,
        wall_time: started.elapsed().as_secs_f64(),
        converged,
        trace,
    })
}
