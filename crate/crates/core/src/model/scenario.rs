//! Scenario configuration and its TOML file format.
//!
//! Lengths are metres, speeds m/s. Every angle key carries its unit as a
//! suffix: `yaw_deg` or `yaw_rad`, `yaw_rate_deg_s` or `yaw_rate_rad_s`, and
//! so on. Exactly one of the two spellings may appear. [`save_scenario`]
//! always writes the radian spelling so that a save/load cycle is lossless.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{
    BoundaryConditions, CurrentField, DockSpec, EndState, Interval, NedVector, NoFlyZone,
    VehicleLimits,
};
use crate::error::{Error, Result};

/// Default half-width of the terminal phase around the dock, m.
pub const DEFAULT_TERMINAL_WINDOW: f64 = 20.0;
/// Default number of trajectory nodes.
pub const DEFAULT_NODES: usize = 201;
/// Default weight applied to every violation channel.
pub const DEFAULT_WEIGHT: f64 = 100.0;
pub const MIN_NODES: usize = 10;

/// Where and how the vehicle starts. The initial ground velocity is the
/// through-water `speed` along the pose plus the current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StartPose {
    pub position: NedVector,
    pub yaw: f64,
    pub pitch: f64,
    pub speed: f64,
    pub acceleration: NedVector,
    pub yaw_rate: f64,
    pub yaw_acceleration: f64,
}

/// Motion state on arrival. Position and attitude come from the dock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrivalState {
    pub speed: f64,
    pub acceleration: NedVector,
    pub yaw_rate: f64,
    pub yaw_acceleration: f64,
}

/// Weights `w_i` of the eight violation channels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PenaltyWeights {
    pub depth: f64,
    pub surge: f64,
    pub sway: f64,
    pub pitch_rate: f64,
    pub yaw_rate: f64,
    pub approach_horizontal: f64,
    pub approach_vertical: f64,
    pub no_fly: f64,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        Self::uniform(DEFAULT_WEIGHT)
    }
}

impl PenaltyWeights {
    pub fn uniform(w: f64) -> Self {
        Self {
            depth: w,
            surge: w,
            sway: w,
            pitch_rate: w,
            yaw_rate: w,
            approach_horizontal: w,
            approach_vertical: w,
            no_fly: w,
        }
    }

    /// Weights in channel order (depth, surge, sway, pitch rate, yaw rate,
    /// horizontal approach, vertical approach, no-fly).
    pub fn to_array(&self) -> [f64; 8] {
        [
            self.depth,
            self.surge,
            self.sway,
            self.pitch_rate,
            self.yaw_rate,
            self.approach_horizontal,
            self.approach_vertical,
            self.no_fly,
        ]
    }

    pub fn from_array(w: [f64; 8]) -> Self {
        Self {
            depth: w[0],
            surge: w[1],
            sway: w[2],
            pitch_rate: w[3],
            yaw_rate: w[4],
            approach_horizontal: w[5],
            approach_vertical: w[6],
            no_fly: w[7],
        }
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::from_array(self.to_array().map(|w| w * k))
    }
}

/// Settings of the simplex search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Total objective evaluations allowed across all penalty rounds.
    pub max_evaluations: usize,
    /// Relative cost-spread tolerance of the simplex.
    pub tolerance: f64,
    /// Initial simplex step for `tau_f`, as a fraction of the guess.
    pub tau_f_step: f64,
    /// Initial simplex step for each jerk component, m/s³.
    pub jerk_step: f64,
    /// Initial simplex step for the speed-factor shape.
    pub lambda_step: f64,
    /// Maximum number of penalty rounds; 1 disables continuation.
    pub penalty_rounds: usize,
    /// Factor applied to every weight between rounds.
    pub penalty_growth: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            max_evaluations: 5000,
            tolerance: 1e-6,
            tau_f_step: 0.1,
            jerk_step: 0.05,
            lambda_step: 0.2,
            penalty_rounds: 8,
            penalty_growth: 10.0,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_evaluations == 0 {
            return Err(Error::validation("solver max_evaluations must be >= 1"));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(Error::validation("solver tolerance must be > 0"));
        }
        for (name, v) in [
            ("tau_f_step", self.tau_f_step),
            ("jerk_step", self.jerk_step),
            ("lambda_step", self.lambda_step),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::validation(format!("solver {name} must be > 0")));
            }
        }
        if self.penalty_rounds == 0 {
            return Err(Error::validation("solver penalty_rounds must be >= 1"));
        }
        if !(self.penalty_growth >= 1.0 && self.penalty_growth.is_finite()) {
            return Err(Error::validation("solver penalty_growth must be >= 1"));
        }
        Ok(())
    }
}

/// A complete docking problem.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub start: StartPose,
    pub arrival: ArrivalState,
    pub dock: DockSpec,
    pub current: CurrentField,
    pub zones: Vec<NoFlyZone>,
    pub limits: VehicleLimits,
    pub weights: PenaltyWeights,
    /// Trajectory discretization.
    pub nodes: usize,
    /// Distance from the dock inside which approach-angle penalties apply, m.
    pub terminal_window: f64,
    pub solver: SolverOptions,
}

impl Scenario {
    /// Checks every invariant; the error names the first one violated.
    pub fn validate(&self) -> Result<()> {
        let s = &self.start;
        if !(s.position.is_finite() && s.acceleration.is_finite()) {
            return Err(Error::validation("start position/acceleration must be finite"));
        }
        super::Attitude::new(s.yaw, s.pitch)
            .map_err(|_| Error::validation("start pitch must lie strictly inside (-90, 90) degrees"))?;
        if !(s.speed.is_finite() && s.yaw_rate.is_finite() && s.yaw_acceleration.is_finite()) {
            return Err(Error::validation("start speed and yaw rates must be finite"));
        }
        let a = &self.arrival;
        if !(a.speed.is_finite()
            && a.acceleration.is_finite()
            && a.yaw_rate.is_finite()
            && a.yaw_acceleration.is_finite())
        {
            return Err(Error::validation("arrival state must be finite"));
        }
        self.dock.validate()?;
        CurrentField::new(self.current.magnitude, self.current.direction)?;
        for zone in &self.zones {
            zone.validate()?;
        }
        self.limits.validate()?;
        for w in self.weights.to_array() {
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::validation(format!("penalty weights must be >= 0, got {w}")));
            }
        }
        if self.nodes < MIN_NODES {
            return Err(Error::validation(format!(
                "node count must be >= {MIN_NODES}, got {}",
                self.nodes
            )));
        }
        if !(self.terminal_window > 0.0 && self.terminal_window.is_finite()) {
            return Err(Error::validation("terminal_window must be > 0"));
        }
        self.solver.validate()
    }

    /// Boundary conditions implied by the start pose, the arrival state and
    /// the dock. The terminal yaw is unwrapped relative to the initial yaw so
    /// the heading reference turns the short way round.
    pub fn boundary(&self) -> BoundaryConditions {
        let current = self.current.velocity();
        let s = &self.start;
        let initial = EndState {
            position: s.position,
            velocity: NedVector::from_heading(s.yaw, s.pitch) * s.speed + current,
            acceleration: s.acceleration,
            yaw: s.yaw,
            yaw_rate: s.yaw_rate,
            yaw_acceleration: s.yaw_acceleration,
        };
        let a = &self.arrival;
        let terminal = EndState {
            position: self.dock.position,
            velocity: NedVector::from_heading(self.dock.yaw, self.dock.pitch) * a.speed + current,
            acceleration: a.acceleration,
            yaw: s.yaw + super::wrap_angle(self.dock.yaw - s.yaw),
            yaw_rate: a.yaw_rate,
            yaw_acceleration: a.yaw_acceleration,
        };
        BoundaryConditions { initial, terminal }
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text)?;
        let scenario = file.into_scenario()?;
        scenario.validate()?;
        Ok(scenario)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        Ok(toml::to_string(&ScenarioFile::from_scenario(self))?)
    }
}

/// Reads and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    Scenario::from_toml_str(&text)
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, scenario.to_toml_string()?)?;
    Ok(())
}

// On-disk layout. Kept private; the public surface is `Scenario`.

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    boundary: BoundaryFile,
    dock: DockFile,
    #[serde(default)]
    current: CurrentFile,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    zones: Vec<NoFlyZone>,
    #[serde(default)]
    limits: LimitsFile,
    #[serde(default)]
    weights: WeightsFile,
    #[serde(default)]
    solver: SolverFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BoundaryFile {
    initial: InitialFile,
    #[serde(rename = "final")]
    arrival: ArrivalFile,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InitialFile {
    position: NedVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pitch_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pitch_rad: Option<f64>,
    speed: f64,
    #[serde(default)]
    acceleration: NedVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_rate_deg_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_rate_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_accel_deg_s2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_accel_rad_s2: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArrivalFile {
    speed: f64,
    #[serde(default)]
    acceleration: NedVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_rate_deg_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_rate_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_accel_deg_s2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_accel_rad_s2: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DockFile {
    position: NedVector,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pitch_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pitch_rad: Option<f64>,
    cone_length: f64,
    outer_radius: f64,
    inner_radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entry_cone_angle_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    entry_cone_angle_rad: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    terminal_window: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CurrentFile {
    #[serde(default)]
    speed: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    direction_deg: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    direction_rad: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LimitsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    depth: Option<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    surge: Option<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sway: Option<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pitch_rate_rad_s: Option<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pitch_rate_deg_s: Option<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_rate_rad_s: Option<Interval>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_rate_deg_s: Option<Interval>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WeightsFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    depth: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    surge: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    sway: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pitch_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    yaw_rate: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    approach_horizontal: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    approach_vertical: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    no_fly: Option<f64>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SolverFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    nodes: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_evaluations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tau_f_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    jerk_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    lambda_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    penalty_rounds: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    penalty_growth: Option<f64>,
}

/// Resolves an angle given under either its `_deg` or `_rad` key.
fn angle(name: &str, deg: Option<f64>, rad: Option<f64>, default: Option<f64>) -> Result<f64> {
    match (deg, rad) {
        (Some(_), Some(_)) => Err(Error::validation(format!(
            "{name} is given in both degrees and radians"
        ))),
        (Some(d), None) => Ok(d.to_radians()),
        (None, Some(r)) => Ok(r),
        (None, None) => default
            .ok_or_else(|| Error::validation(format!("missing {name} (in degrees or radians)"))),
    }
}

fn limit_pair(
    name: &str,
    rad: Option<Interval>,
    deg: Option<Interval>,
    default: Interval,
) -> Result<Interval> {
    match (rad, deg) {
        (Some(_), Some(_)) => Err(Error::validation(format!(
            "limit {name} is given in both degrees and radians"
        ))),
        (Some(r), None) => Ok(r),
        (None, Some(d)) => Ok(Interval::new(d.min.to_radians(), d.max.to_radians())),
        (None, None) => Ok(default),
    }
}

impl ScenarioFile {
    fn into_scenario(self) -> Result<Scenario> {
        let i = &self.boundary.initial;
        let start = StartPose {
            position: i.position,
            yaw: angle("initial yaw", i.yaw_deg, i.yaw_rad, None)?,
            pitch: angle("initial pitch", i.pitch_deg, i.pitch_rad, Some(0.0))?,
            speed: i.speed,
            acceleration: i.acceleration,
            yaw_rate: angle("initial yaw_rate", i.yaw_rate_deg_s, i.yaw_rate_rad_s, Some(0.0))?,
            yaw_acceleration: angle(
                "initial yaw_accel",
                i.yaw_accel_deg_s2,
                i.yaw_accel_rad_s2,
                Some(0.0),
            )?,
        };
        let f = &self.boundary.arrival;
        let arrival = ArrivalState {
            speed: f.speed,
            acceleration: f.acceleration,
            yaw_rate: angle("final yaw_rate", f.yaw_rate_deg_s, f.yaw_rate_rad_s, Some(0.0))?,
            yaw_acceleration: angle(
                "final yaw_accel",
                f.yaw_accel_deg_s2,
                f.yaw_accel_rad_s2,
                Some(0.0),
            )?,
        };
        let d = &self.dock;
        let geometric =
            DockSpec::geometric_cone_angle(d.cone_length, d.outer_radius, d.inner_radius);
        let dock = DockSpec {
            position: d.position,
            yaw: angle("dock yaw", d.yaw_deg, d.yaw_rad, None)?,
            pitch: angle("dock pitch", d.pitch_deg, d.pitch_rad, Some(0.0))?,
            cone_length: d.cone_length,
            outer_radius: d.outer_radius,
            inner_radius: d.inner_radius,
            entry_cone_angle: angle(
                "dock entry_cone_angle",
                d.entry_cone_angle_deg,
                d.entry_cone_angle_rad,
                Some(geometric),
            )?,
        };
        let c = &self.current;
        let current = CurrentField {
            magnitude: c.speed,
            direction: angle("current direction", c.direction_deg, c.direction_rad, Some(0.0))?,
        };
        let l = &self.limits;
        let dl = VehicleLimits::default();
        let limits = VehicleLimits {
            depth: l.depth.unwrap_or(dl.depth),
            surge: l.surge.unwrap_or(dl.surge),
            sway: l.sway.unwrap_or(dl.sway),
            pitch_rate: limit_pair(
                "pitch_rate",
                l.pitch_rate_rad_s,
                l.pitch_rate_deg_s,
                dl.pitch_rate,
            )?,
            yaw_rate: limit_pair("yaw_rate", l.yaw_rate_rad_s, l.yaw_rate_deg_s, dl.yaw_rate)?,
        };
        let w = &self.weights;
        let weights = PenaltyWeights {
            depth: w.depth.unwrap_or(DEFAULT_WEIGHT),
            surge: w.surge.unwrap_or(DEFAULT_WEIGHT),
            sway: w.sway.unwrap_or(DEFAULT_WEIGHT),
            pitch_rate: w.pitch_rate.unwrap_or(DEFAULT_WEIGHT),
            yaw_rate: w.yaw_rate.unwrap_or(DEFAULT_WEIGHT),
            approach_horizontal: w.approach_horizontal.unwrap_or(DEFAULT_WEIGHT),
            approach_vertical: w.approach_vertical.unwrap_or(DEFAULT_WEIGHT),
            no_fly: w.no_fly.unwrap_or(DEFAULT_WEIGHT),
        };
        let s = &self.solver;
        let ds = SolverOptions::default();
        let solver = SolverOptions {
            max_evaluations: s.max_evaluations.unwrap_or(ds.max_evaluations),
            tolerance: s.tolerance.unwrap_or(ds.tolerance),
            tau_f_step: s.tau_f_step.unwrap_or(ds.tau_f_step),
            jerk_step: s.jerk_step.unwrap_or(ds.jerk_step),
            lambda_step: s.lambda_step.unwrap_or(ds.lambda_step),
            penalty_rounds: s.penalty_rounds.unwrap_or(ds.penalty_rounds),
            penalty_growth: s.penalty_growth.unwrap_or(ds.penalty_growth),
        };
        Ok(Scenario {
            start,
            arrival,
            dock,
            current,
            zones: self.zones,
            limits,
            weights,
            nodes: s.nodes.unwrap_or(DEFAULT_NODES),
            terminal_window: d.terminal_window.unwrap_or(DEFAULT_TERMINAL_WINDOW),
            solver,
        })
    }

    fn from_scenario(sc: &Scenario) -> Self {
        let s = &sc.start;
        let a = &sc.arrival;
        let d = &sc.dock;
        let w = &sc.weights;
        let o = &sc.solver;
        ScenarioFile {
            boundary: BoundaryFile {
                initial: InitialFile {
                    position: s.position,
                    yaw_deg: None,
                    yaw_rad: Some(s.yaw),
                    pitch_deg: None,
                    pitch_rad: Some(s.pitch),
                    speed: s.speed,
                    acceleration: s.acceleration,
                    yaw_rate_deg_s: None,
                    yaw_rate_rad_s: Some(s.yaw_rate),
                    yaw_accel_deg_s2: None,
                    yaw_accel_rad_s2: Some(s.yaw_acceleration),
                },
                arrival: ArrivalFile {
                    speed: a.speed,
                    acceleration: a.acceleration,
                    yaw_rate_deg_s: None,
                    yaw_rate_rad_s: Some(a.yaw_rate),
                    yaw_accel_deg_s2: None,
                    yaw_accel_rad_s2: Some(a.yaw_acceleration),
                },
            },
            dock: DockFile {
                position: d.position,
                yaw_deg: None,
                yaw_rad: Some(d.yaw),
                pitch_deg: None,
                pitch_rad: Some(d.pitch),
                cone_length: d.cone_length,
                outer_radius: d.outer_radius,
                inner_radius: d.inner_radius,
                entry_cone_angle_deg: None,
                entry_cone_angle_rad: Some(d.entry_cone_angle),
                terminal_window: Some(sc.terminal_window),
            },
            current: CurrentFile {
                speed: sc.current.magnitude,
                direction_deg: None,
                direction_rad: Some(sc.current.direction),
            },
            zones: sc.zones.clone(),
            limits: LimitsFile {
                depth: Some(sc.limits.depth),
                surge: Some(sc.limits.surge),
                sway: Some(sc.limits.sway),
                pitch_rate_rad_s: Some(sc.limits.pitch_rate),
                pitch_rate_deg_s: None,
                yaw_rate_rad_s: Some(sc.limits.yaw_rate),
                yaw_rate_deg_s: None,
            },
            weights: WeightsFile {
                depth: Some(w.depth),
                surge: Some(w.surge),
                sway: Some(w.sway),
                pitch_rate: Some(w.pitch_rate),
                yaw_rate: Some(w.yaw_rate),
                approach_horizontal: Some(w.approach_horizontal),
                approach_vertical: Some(w.approach_vertical),
                no_fly: Some(w.no_fly),
            },
            solver: SolverFile {
                nodes: Some(sc.nodes),
                max_evaluations: Some(o.max_evaluations),
                tolerance: Some(o.tolerance),
                tau_f_step: Some(o.tau_f_step),
                jerk_step: Some(o.jerk_step),
                lambda_step: Some(o.lambda_step),
                penalty_rounds: Some(o.penalty_rounds),
                penalty_growth: Some(o.penalty_growth),
            },
        }
    }
}
