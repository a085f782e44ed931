//! Domain types shared by every stage of the planner, plus the body/NED frame
//! conversions of the vehicle kinematics.
//!
//! Everything here is an immutable value once validated. Angles are radians
//! internally; the scenario file accepts degrees as well (see [`scenario`]).

use std::f64::consts::{FRAC_PI_2, PI};
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub mod scenario;

pub use scenario::{
    load_scenario, save_scenario, ArrivalState, PenaltyWeights, Scenario, SolverOptions,
    StartPose,
};

/// A vector in the North-East-Down frame. Used for positions (m), velocities
/// (m/s) and higher derivatives alike.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(from = "[f64; 3]", into = "[f64; 3]")]
pub struct NedVector {
    pub north: f64,
    pub east: f64,
    pub down: f64,
}

impl NedVector {
    pub const ZERO: NedVector = NedVector::new(0.0, 0.0, 0.0);

    pub const fn new(north: f64, east: f64, down: f64) -> Self {
        Self { north, east, down }
    }

    pub fn norm(&self) -> f64 {
        (self.north * self.north + self.east * self.east + self.down * self.down).sqrt()
    }

    pub fn horizontal_norm(&self) -> f64 {
        self.north.hypot(self.east)
    }

    pub fn dot(&self, other: &NedVector) -> f64 {
        self.north * other.north + self.east * other.east + self.down * other.down
    }

    pub fn distance(&self, other: &NedVector) -> f64 {
        (*self - *other).norm()
    }

    pub fn is_finite(&self) -> bool {
        self.north.is_finite() && self.east.is_finite() && self.down.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.north, self.east, self.down]
    }

    /// Unit vector pointing along `yaw`, `pitch` (positive pitch is nose up,
    /// so the down component is `-sin(pitch)`).
    pub fn from_heading(yaw: f64, pitch: f64) -> Self {
        Self::new(pitch.cos() * yaw.cos(), pitch.cos() * yaw.sin(), -pitch.sin())
    }
}

impl From<[f64; 3]> for NedVector {
    fn from(v: [f64; 3]) -> Self {
        Self::new(v[0], v[1], v[2])
    }
}

impl From<NedVector> for [f64; 3] {
    fn from(v: NedVector) -> Self {
        v.to_array()
    }
}

impl From<Vector3<f64>> for NedVector {
    fn from(v: Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }
}

impl From<NedVector> for Vector3<f64> {
    fn from(v: NedVector) -> Self {
        Vector3::new(v.north, v.east, v.down)
    }
}

impl Add for NedVector {
    type Output = NedVector;
    fn add(self, rhs: NedVector) -> NedVector {
        NedVector::new(self.north + rhs.north, self.east + rhs.east, self.down + rhs.down)
    }
}

impl Sub for NedVector {
    type Output = NedVector;
    fn sub(self, rhs: NedVector) -> NedVector {
        NedVector::new(self.north - rhs.north, self.east - rhs.east, self.down - rhs.down)
    }
}

impl Mul<f64> for NedVector {
    type Output = NedVector;
    fn mul(self, k: f64) -> NedVector {
        NedVector::new(self.north * k, self.east * k, self.down * k)
    }
}

impl Neg for NedVector {
    type Output = NedVector;
    fn neg(self) -> NedVector {
        NedVector::new(-self.north, -self.east, -self.down)
    }
}

/// Wrap an angle (or angle difference) into `(-π, π]`.
pub fn wrap_angle(angle: f64) -> f64 {
    let mut a = angle.rem_euclid(2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    }
    a
}

/// Roll-free vehicle attitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Attitude {
    pub yaw: f64,
    pub pitch: f64,
}

impl Attitude {
    /// Builds an attitude with yaw wrapped into `(-π, π]`. Pitch must lie
    /// strictly inside `(-π/2, π/2)`.
    pub fn new(yaw: f64, pitch: f64) -> Result<Self> {
        check_pitch(pitch)?;
        if !yaw.is_finite() {
            return Err(Error::domain(format!("yaw {yaw} is not finite")));
        }
        Ok(Self { yaw: wrap_angle(yaw), pitch })
    }
}

fn check_pitch(pitch: f64) -> Result<()> {
    if !(pitch.is_finite() && pitch.abs() < FRAC_PI_2) {
        return Err(Error::domain(format!(
            "pitch {pitch} rad is outside the open interval (-pi/2, pi/2)"
        )));
    }
    Ok(())
}

/// Translational velocity through the water, body frame.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BodyVelocity {
    pub surge: f64,
    pub sway: f64,
    pub heave: f64,
}

impl BodyVelocity {
    pub fn new(surge: f64, sway: f64, heave: f64) -> Self {
        Self { surge, sway, heave }
    }

    pub fn norm(&self) -> f64 {
        (self.surge * self.surge + self.sway * self.sway + self.heave * self.heave).sqrt()
    }
}

/// Uniform horizontal ocean current.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CurrentField {
    /// m/s, nonnegative.
    pub magnitude: f64,
    /// Direction the current flows towards, radians from north.
    pub direction: f64,
}

impl CurrentField {
    pub fn new(magnitude: f64, direction: f64) -> Result<Self> {
        if !(magnitude.is_finite() && magnitude >= 0.0) {
            return Err(Error::validation(format!(
                "current magnitude must be finite and >= 0, got {magnitude}"
            )));
        }
        if !direction.is_finite() {
            return Err(Error::validation("current direction is not finite"));
        }
        Ok(Self { magnitude, direction: wrap_angle(direction) })
    }

    /// `(u_c, v_c, 0)`; the vertical component is always zero.
    pub fn velocity(&self) -> NedVector {
        NedVector::new(
            self.magnitude * self.direction.cos(),
            self.magnitude * self.direction.sin(),
            0.0,
        )
    }
}

/// Funnel-shaped docking station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DockSpec {
    pub position: NedVector,
    pub yaw: f64,
    pub pitch: f64,
    /// Cone length `h`, m.
    pub cone_length: f64,
    /// Outer (mouth) radius `R`, m.
    pub outer_radius: f64,
    /// Inner (throat) radius `r`, m.
    pub inner_radius: f64,
    /// Full entry cone angle `η_dock`, rad.
    pub entry_cone_angle: f64,
}

/// Tolerance when a configured entry angle is checked against the cone geometry.
pub const CONE_ANGLE_TOLERANCE: f64 = 1e-6;

impl DockSpec {
    /// Full cone angle implied by the funnel dimensions: `2·atan((R − r)/h)`.
    pub fn geometric_cone_angle(cone_length: f64, outer_radius: f64, inner_radius: f64) -> f64 {
        2.0 * ((outer_radius - inner_radius) / cone_length).atan()
    }

    pub fn half_angle(&self) -> f64 {
        0.5 * self.entry_cone_angle
    }

    pub fn attitude(&self) -> Result<Attitude> {
        Attitude::new(self.yaw, self.pitch)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.position.is_finite() || !self.yaw.is_finite() {
            return Err(Error::validation("dock position and yaw must be finite"));
        }
        check_pitch(self.pitch)
            .map_err(|_| Error::validation("dock pitch must lie strictly inside (-90, 90) degrees"))?;
        if !(self.cone_length > 0.0 && self.cone_length.is_finite()) {
            return Err(Error::validation("dock cone_length must be > 0"));
        }
        if !(self.inner_radius > 0.0) {
            return Err(Error::validation("dock inner_radius must be > 0"));
        }
        if !(self.outer_radius > self.inner_radius && self.outer_radius.is_finite()) {
            return Err(Error::validation(
                "dock outer_radius must be greater than inner_radius (R > r)",
            ));
        }
        if !(self.entry_cone_angle > 0.0 && self.entry_cone_angle < PI) {
            return Err(Error::validation("dock entry cone angle must lie in (0, 180) degrees"));
        }
        let geometric =
            Self::geometric_cone_angle(self.cone_length, self.outer_radius, self.inner_radius);
        if (geometric - self.entry_cone_angle).abs() > CONE_ANGLE_TOLERANCE {
            return Err(Error::validation(format!(
                "dock entry cone angle {} rad disagrees with the funnel geometry 2*atan((R-r)/h) = {} rad",
                self.entry_cone_angle, geometric
            )));
        }
        Ok(())
    }
}

/// Spherical keep-out volume.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoFlyZone {
    pub center: NedVector,
    pub radius: f64,
}

impl NoFlyZone {
    /// Signed distance from `point` to the sphere surface; negative inside.
    pub fn clearance(&self, point: &NedVector) -> f64 {
        point.distance(&self.center) - self.radius
    }

    pub fn validate(&self) -> Result<()> {
        if !self.center.is_finite() {
            return Err(Error::validation("no-fly zone center must be finite"));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::validation(format!(
                "no-fly zone radius must be > 0, got {}",
                self.radius
            )));
        }
        Ok(())
    }
}

/// Closed interval `[min, max]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    pub min: f64,
    pub max: f64,
}

impl Interval {
    pub const fn new(min: f64, max: f64) -> Self {
        Self { min, max }
    }

    pub fn contains(&self, value: f64) -> bool {
        value >= self.min && value <= self.max
    }

    fn validate(&self, name: &str) -> Result<()> {
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(Error::validation(format!("limit {name} must be finite")));
        }
        if !(self.min <= self.max) {
            return Err(Error::validation(format!(
                "limit {name} requires min <= max, got [{}, {}]",
                self.min, self.max
            )));
        }
        Ok(())
    }
}

impl From<[f64; 2]> for Interval {
    fn from(v: [f64; 2]) -> Self {
        Self::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(v: Interval) -> Self {
        [v.min, v.max]
    }
}

/// State and rate limits of the vehicle.
///
/// The defaults are REMUS-class placeholders, not measured values; override
/// them in the scenario file for a real vehicle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VehicleLimits {
    /// Depth `z`, m.
    pub depth: Interval,
    /// Surge `u`, m/s.
    pub surge: Interval,
    /// Sway `v`, m/s.
    pub sway: Interval,
    /// Pitch rate, rad/s.
    pub pitch_rate: Interval,
    /// Yaw rate, rad/s.
    pub yaw_rate: Interval,
}

impl Default for VehicleLimits {
    fn default() -> Self {
        Self {
            depth: Interval::new(0.0, 100.0),
            surge: Interval::new(0.0, 2.5),
            sway: Interval::new(-0.5, 0.5),
            pitch_rate: Interval::new(-0.2, 0.2),
            yaw_rate: Interval::new(-0.3, 0.3),
        }
    }
}

impl VehicleLimits {
    pub fn validate(&self) -> Result<()> {
        self.depth.validate("depth")?;
        self.surge.validate("surge")?;
        self.sway.validate("sway")?;
        self.pitch_rate.validate("pitch_rate")?;
        self.yaw_rate.validate("yaw_rate")
    }
}

/// Boundary data at one end of the trajectory, all in the time domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EndState {
    pub position: NedVector,
    /// Ground velocity, m/s.
    pub velocity: NedVector,
    /// m/s².
    pub acceleration: NedVector,
    pub yaw: f64,
    pub yaw_rate: f64,
    pub yaw_acceleration: f64,
}

impl EndState {
    fn is_finite(&self) -> bool {
        self.position.is_finite()
            && self.velocity.is_finite()
            && self.acceleration.is_finite()
            && self.yaw.is_finite()
            && self.yaw_rate.is_finite()
            && self.yaw_acceleration.is_finite()
    }
}

/// Initial and final conditions of the docking manoeuvre. Boundary jerks are
/// decision variables and live in the planner's decision vector instead.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConditions {
    pub initial: EndState,
    pub terminal: EndState,
}

impl BoundaryConditions {
    pub fn validate(&self) -> Result<()> {
        if !(self.initial.is_finite() && self.terminal.is_finite()) {
            return Err(Error::validation("boundary conditions must be finite"));
        }
        Ok(())
    }
}

/// Body-to-NED rotation for a roll-free attitude.
///
/// ```text
/// | cψ cθ   -sψ   cψ sθ |
/// | sψ cθ    cψ   sψ sθ |
/// | -sθ      0    cθ    |
/// ```
pub fn rotation_body_to_ned(att: &Attitude) -> Result<Matrix3<f64>> {
    check_pitch(att.pitch)?;
    let (sp, cp) = att.yaw.sin_cos();
    let (st, ct) = att.pitch.sin_cos();
    #[rustfmt::skip]
    let r = Matrix3::new(
        cp * ct, -sp, cp * st,
        sp * ct,  cp, sp * st,
        -st,     0.0, ct,
    );
    Ok(r)
}

/// Vehicle kinematics: NED rate of the position given body velocity,
/// attitude and current.
pub fn ground_velocity(
    body: &BodyVelocity,
    att: &Attitude,
    current: &CurrentField,
) -> Result<NedVector> {
    let r = rotation_body_to_ned(att)?;
    let through_water = r * Vector3::new(body.surge, body.sway, body.heave);
    Ok(NedVector::from(through_water) + current.velocity())
}
