//! Virtual-to-time mapping and inverse dynamics.
//!
//! The speed factor `λ = dτ/dt` turns the virtual curve into a timed
//! trajectory. With the normalized argument this reads `dτ̄/dt = λ̄(τ̄)/τ_f`,
//! so a ground velocity is `x′(τ̄)·λ̄/τ_f` and elapsed time is
//! `t(τ̄) = τ_f ∫₀^τ̄ dξ/λ̄(ξ)`. Every other state (pitch, body velocities,
//! rates, course) is then recovered algebraically from the curve.

use crate::error::{Error, Result};
use crate::model::{
    self, rotation_body_to_ned, wrap_angle, Attitude, BodyVelocity, CurrentField, NedVector,
    Scenario,
};
use crate::refcurve::ReferenceCurve;

/// Quadratic speed-factor bump `λ̄(τ̄) = 1 + 4·λ_m·τ̄(1 − τ̄)`.
///
/// `λ̄` equals one at both ends, so the boundary derivatives keep the scaling
/// used when the curves were solved; `λ_m > −1` keeps it positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpeedFactorProfile {
    pub shape: f64,
}

impl SpeedFactorProfile {
    pub fn new(shape: f64) -> Result<Self> {
        if !(shape > -1.0 && shape.is_finite()) {
            return Err(Error::domain(format!("speed-factor shape must be > -1, got {shape}")));
        }
        Ok(Self { shape })
    }

    pub fn value(&self, tau_bar: f64) -> f64 {
        1.0 + 4.0 * self.shape * tau_bar * (1.0 - tau_bar)
    }

    pub fn derivative(&self, tau_bar: f64) -> f64 {
        4.0 * self.shape * (1.0 - 2.0 * tau_bar)
    }
}

/// Uniform τ̄ grid with the matching times.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeGrid {
    pub tau_bar: Vec<f64>,
    pub t: Vec<f64>,
}

impl TimeGrid {
    pub fn pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.tau_bar.iter().copied().zip(self.t.iter().copied())
    }

    pub fn final_time(&self) -> f64 {
        *self.t.last().expect("grid is never empty")
    }
}

/// Maps a uniform τ̄ grid of `node_count` nodes to time.
///
/// The integral is split as `τ̄ + ∫(1/λ̄ − 1)` so that `λ_m = 0` yields
/// `t = τ_f·τ̄` exactly. The remainder uses the composite trapezoidal rule
/// with the endpoint-derivative correction, which is fourth order.
pub fn time_map(profile: &SpeedFactorProfile, tau_f: f64, node_count: usize) -> Result<TimeGrid> {
    if !(tau_f > 0.0 && tau_f.is_finite()) {
        return Err(Error::domain(format!("tau_f must be finite and > 0, got {tau_f}")));
    }
    if node_count < model::scenario::MIN_NODES {
        return Err(Error::domain(format!(
            "node count must be >= {}, got {node_count}",
            model::scenario::MIN_NODES
        )));
    }
    let last = (node_count - 1) as f64;
    let tau_bar: Vec<f64> = (0..node_count).map(|i| i as f64 / last).collect();
    let h = 1.0 / last;

    let mut excess = Vec::with_capacity(node_count);
    let mut slope = Vec::with_capacity(node_count);
    for (i, &s) in tau_bar.iter().enumerate() {
        let lambda = profile.value(s);
        if !(lambda > 0.0) {
            return Err(Error::domain(format!(
                "speed factor {lambda} is not positive at node {i}"
            )));
        }
        excess.push(1.0 / lambda - 1.0);
        slope.push(-profile.derivative(s) / (lambda * lambda));
    }

    let mut t = Vec::with_capacity(node_count);
    let mut acc = 0.0;
    t.push(0.0);
    for i in 1..node_count {
        acc += 0.5 * h * (excess[i - 1] + excess[i]) - h * h / 12.0 * (slope[i] - slope[i - 1]);
        t.push(tau_f * (tau_bar[i] + acc));
    }
    if t.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::domain("time map is not strictly increasing; refine the grid"));
    }
    Ok(TimeGrid { tau_bar, t })
}

/// Pitch (equal to the flight-path angle) from the curve slope.
pub fn pitch_from_slope(dx: f64, dy: f64, dz: f64) -> Result<f64> {
    let horizontal = dx.hypot(dy);
    if horizontal == 0.0 {
        return Err(Error::domain("vertical tangent: pitch is undefined when dx = dy = 0"));
    }
    Ok((-dz).atan2(horizontal))
}

/// Body velocity through the water that produces `ground` under `current`.
pub fn body_velocity_from_ground(
    ground: &NedVector,
    att: &Attitude,
    current: &CurrentField,
) -> Result<BodyVelocity> {
    let r = rotation_body_to_ned(att)?;
    let rel = nalgebra::Vector3::from(*ground - current.velocity());
    let b = r.transpose() * rel;
    Ok(BodyVelocity::new(b.x, b.y, b.z))
}

/// Course angle from the resultant ground speed of a vehicle moving at
/// `speed_water` along `att` through the current.
pub fn course_angle(speed_water: f64, att: &Attitude, current: &CurrentField) -> Result<f64> {
    let (sp, cp) = att.yaw.sin_cos();
    let ct = att.pitch.cos();
    let c = current.velocity();
    let north = speed_water * ct * cp + c.north;
    let east = speed_water * ct * sp + c.east;
    if north == 0.0 && east == 0.0 {
        return Err(Error::domain("zero horizontal ground speed: course is undefined"));
    }
    Ok(east.atan2(north))
}

/// Full vehicle state at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryNode {
    pub t: f64,
    pub tau_bar: f64,
    pub position: NedVector,
    pub yaw: f64,
    pub pitch: f64,
    pub ground_velocity: NedVector,
    pub body: BodyVelocity,
    pub yaw_rate: f64,
    pub pitch_rate: f64,
    pub course: f64,
    pub flight_path_angle: f64,
    pub speed: f64,
}

impl TrajectoryNode {
    pub fn attitude(&self) -> Attitude {
        Attitude { yaw: self.yaw, pitch: self.pitch }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledTrajectory {
    pub nodes: Vec<TrajectoryNode>,
    pub t_f: f64,
}

impl SampledTrajectory {
    /// Sum of straight segments between consecutive nodes.
    pub fn path_length(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[0].position.distance(&w[1].position)).sum()
    }

    pub fn first(&self) -> &TrajectoryNode {
        &self.nodes[0]
    }

    pub fn last(&self) -> &TrajectoryNode {
        self.nodes.last().expect("trajectory has nodes")
    }
}

/// Samples the reference curve on `node_count` nodes and recovers every
/// state by inverse dynamics. Errors carry the index of the offending node.
pub fn sample_trajectory(
    curve: &ReferenceCurve,
    profile: &SpeedFactorProfile,
    scenario: &Scenario,
    node_count: usize,
) -> Result<SampledTrajectory> {
    let grid = time_map(profile, curve.tau_f, node_count)?;
    let current = &scenario.current;
    let drift = current.velocity();
    let mut nodes = Vec::with_capacity(node_count);

    for (i, (tau_bar, t)) in grid.pairs().enumerate() {
        let node = (|| -> Result<TrajectoryNode> {
            let position = curve.eval(tau_bar, 0)?;
            let slope = curve.eval(tau_bar, 1)?;
            let rate = profile.value(tau_bar) / curve.tau_f;
            let ground = slope * rate;
            let pitch = pitch_from_slope(slope.north, slope.east, slope.down)?;
            let yaw = wrap_angle(curve.eval_yaw(tau_bar, 0)?);
            let att = Attitude { yaw, pitch };
            let body = body_velocity_from_ground(&ground, &att, current)?;

            // The course formula assumes motion through the water along the
            // attitude it is given, so feed it the track of the water-relative
            // velocity; the result is then the course of `ground` itself.
            let water = ground - drift;
            let water_track = Attitude {
                yaw: water.east.atan2(water.north),
                pitch: (-water.down).atan2(water.horizontal_norm()),
            };
            let course = course_angle(water.norm(), &water_track, current)?;

            Ok(TrajectoryNode {
                t,
                tau_bar,
                position,
                yaw,
                pitch,
                ground_velocity: ground,
                body,
                yaw_rate: curve.eval_yaw(tau_bar, 1)? * rate,
                pitch_rate: 0.0,
                course,
                flight_path_angle: pitch,
                speed: profile.value(tau_bar) * (slope.norm() / curve.tau_f),
            })
        })()
        .map_err(|e| e.at_node(i))?;
        nodes.push(node);
    }

    let n = nodes.len();
    for i in 0..n {
        let (a, b) = match i {
            0 => (0, 1),
            i if i == n - 1 => (n - 2, n - 1),
            i => (i - 1, i + 1),
        };
        nodes[i].pitch_rate = (nodes[b].pitch - nodes[a].pitch) / (nodes[b].t - nodes[a].t);
    }

    Ok(SampledTrajectory { nodes, t_f: grid.final_time() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ground_velocity;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn identity_speed_factor_is_exact() {
        let grid = time_map(&SpeedFactorProfile::new(0.0).unwrap(), 123.25, 57).unwrap();
        assert_eq!(grid.final_time(), 123.25);
        for (s, t) in grid.pairs() {
            assert_eq!(t, 123.25 * s);
        }
    }

    #[test]
    fn times_are_monotone() {
        for shape in [-0.9, -0.3, 0.5, 3.0, 20.0] {
            let grid = time_map(&SpeedFactorProfile::new(shape).unwrap(), 10.0, 40).unwrap();
            assert_eq!(grid.t[0], 0.0);
            assert!(grid.t.windows(2).all(|w| w[1] > w[0]));
            assert!(grid.final_time() > 0.0);
        }
    }

    #[test]
    fn invalid_profiles_are_rejected() {
        assert!(SpeedFactorProfile::new(-1.0).is_err());
        assert!(SpeedFactorProfile::new(f64::NAN).is_err());
        // Bypass the constructor to reach the grid check.
        let bad = SpeedFactorProfile { shape: -2.0 };
        assert!(time_map(&bad, 10.0, 11).is_err());
        assert!(time_map(&SpeedFactorProfile::new(0.0).unwrap(), 0.0, 11).is_err());
        assert!(time_map(&SpeedFactorProfile::new(0.0).unwrap(), 1.0, 9).is_err());
    }

    #[test]
    fn pitch_examples() {
        assert_eq!(pitch_from_slope(1.0, 0.0, 0.0).unwrap(), 0.0);
        assert!((pitch_from_slope(3.0, 4.0, -5.0).unwrap() - FRAC_PI_4).abs() < 1e-15);
        let a = pitch_from_slope(0.3, -1.2, 0.7).unwrap();
        let b = pitch_from_slope(0.6, -2.4, 1.4).unwrap();
        assert_eq!(a, b);
        assert!(pitch_from_slope(0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn body_velocity_examples() {
        let current = CurrentField::new(0.35, 0.8).unwrap();
        let att = Attitude { yaw: 2.0, pitch: -0.3 };
        let b = body_velocity_from_ground(&current.velocity(), &att, &current).unwrap();
        assert!(b.norm() < 1e-16);

        let b = body_velocity_from_ground(
            &NedVector::new(1.0, 0.0, 0.0),
            &Attitude { yaw: 0.0, pitch: 0.0 },
            &CurrentField::default(),
        )
        .unwrap();
        assert_eq!(b, BodyVelocity::new(1.0, 0.0, 0.0));
    }

    #[test]
    fn course_examples() {
        let still = CurrentField::default();
        let level = Attitude { yaw: 0.0, pitch: 0.0 };
        assert_eq!(course_angle(1.0, &level, &still).unwrap(), 0.0);

        let east = CurrentField::new(0.5, FRAC_PI_2).unwrap();
        assert!((course_angle(0.0, &level, &east).unwrap() - FRAC_PI_2).abs() < 1e-15);

        let c = CurrentField::new(0.35, FRAC_PI_4).unwrap();
        let att = Attitude { yaw: FRAC_PI_4, pitch: 0.0 };
        // Both components equal 1.35·cos 45° ≈ 0.95459.
        assert!((course_angle(1.0, &att, &c).unwrap() - FRAC_PI_4).abs() < 1e-15);
        assert!((1.35 * FRAC_PI_4.cos() - 0.95459).abs() < 1e-5);

        assert!(course_angle(0.0, &level, &still).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn body_round_trip(
                n in -3.0f64..3.0, e in -3.0f64..3.0, d in -3.0f64..3.0,
                yaw in -3.1f64..3.1, pitch in -1.5f64..1.5,
                mag in 0.0f64..1.5, dir in -3.1f64..3.1,
            ) {
                let ground = NedVector::new(n, e, d);
                let att = Attitude { yaw, pitch };
                let current = CurrentField::new(mag, dir).unwrap();
                let body = body_velocity_from_ground(&ground, &att, &current).unwrap();
                let back = ground_velocity(&body, &att, &current).unwrap();
                prop_assert!((back - ground).norm() < 1e-12);
            }

            #[test]
            fn pitch_is_scale_invariant(
                dx in -5.0f64..5.0, dy in 0.1f64..5.0, dz in -5.0f64..5.0, k in 1e-3f64..1e3,
            ) {
                let a = pitch_from_slope(dx, dy, dz).unwrap();
                let b = pitch_from_slope(k * dx, k * dy, k * dz).unwrap();
                prop_assert!((a - b).abs() < 1e-14);
            }
        }
    }
}
