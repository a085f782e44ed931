//! Helpers shared by integration tests: toy trajectories and an
//! independent reimplementation of the planning cost.

#![allow(dead_code)]

use idvd_dock::invdyn::{SampledTrajectory, TrajectoryNode};
use idvd_dock::model::{BodyVelocity, NedVector, Scenario};

pub fn node(t: f64, position: NedVector) -> TrajectoryNode {
    TrajectoryNode {
        t,
        tau_bar: 0.0,
        position,
        yaw: 0.0,
        pitch: 0.0,
        ground_velocity: NedVector::ZERO,
        body: BodyVelocity::new(1.0, 0.0, 0.0),
        yaw_rate: 0.0,
        pitch_rate: 0.0,
        course: 0.0,
        flight_path_angle: 0.0,
        speed: 1.0,
    }
}

/// 20 nodes on an uneven time grid that cross every limit somewhere.
pub fn toy() -> SampledTrajectory {
    let n = 20;
    let mut t = 0.0;
    let mut nodes = Vec::new();
    for i in 0..n {
        let k = i as f64;
        let mut nd = node(t, NedVector::new(140.0 + 0.5 * k, 75.0 - 0.3 * k, -1.0 + 0.8 * k));
        nd.body = BodyVelocity::new(2.0 + 0.1 * k, 0.7 * (k * 0.9).sin(), 0.0);
        nd.pitch_rate = 0.3 * (k * 0.4).cos();
        nd.yaw_rate = -0.05 * k;
        nd.course = 0.3 + 0.07 * k;
        nd.flight_path_angle = -0.4 + 0.05 * k;
        nodes.push(nd);
        t += 0.5 + 0.1 * (k * 1.3).sin().abs();
    }
    let t_f = nodes.last().unwrap().t;
    SampledTrajectory { nodes, t_f }
}

fn sq_hinge(v: f64, lo: f64, hi: f64) -> f64 {
    let e = if v > hi { v - hi } else if v < lo { lo - v } else { 0.0 };
    e * e
}

fn wrap(a: f64) -> f64 {
    let mut a = a % std::f64::consts::TAU;
    if a > std::f64::consts::PI {
        a -= std::f64::consts::TAU;
    } else if a <= -std::f64::consts::PI {
        a += std::f64::consts::TAU;
    }
    a
}

/// Independent summation: each channel integrated on its own with the
/// trapezoid rule over segments.
pub fn oracle_cost(traj: &SampledTrajectory, s: &Scenario) -> f64 {
    let l = &s.limits;
    let half = s.dock.entry_cone_angle / 2.0;
    let channel = |f: &dyn Fn(&TrajectoryNode) -> f64| -> f64 {
        let mut sum = 0.0;
        for w in traj.nodes.windows(2) {
            sum += 0.5 * (f(&w[0]) + f(&w[1])) * (w[1].t - w[0].t);
        }
        sum / traj.t_f
    };
    let near = |n: &TrajectoryNode| n.position.distance(&s.dock.position) <= s.terminal_window;
    let approach = |a: f64| (a.abs() - half).max(0.0).powi(2);
    let w = &s.weights;
    traj.t_f
        + w.depth * channel(&|n| sq_hinge(n.position.down, l.depth.min, l.depth.max))
        + w.surge * channel(&|n| sq_hinge(n.body.surge, l.surge.min, l.surge.max))
        + w.sway * channel(&|n| sq_hinge(n.body.sway, l.sway.min, l.sway.max))
        + w.pitch_rate * channel(&|n| sq_hinge(n.pitch_rate, l.pitch_rate.min, l.pitch_rate.max))
        + w.yaw_rate * channel(&|n| sq_hinge(n.yaw_rate, l.yaw_rate.min, l.yaw_rate.max))
        + w.approach_horizontal
            * channel(&|n| if near(n) { approach(wrap(n.course - s.dock.yaw)) } else { 0.0 })
        + w.approach_vertical
            * channel(&|n| if near(n) { approach(wrap(n.flight_path_angle - s.dock.pitch)) } else { 0.0 })
        + w.no_fly
            * channel(&|n| {
                s.zones
                    .iter()
                    .map(|z| (z.radius - n.position.distance(&z.center)).max(0.0).powi(2))
                    .sum()
            })
}


/// A 20-node trajectory with random states around the nominal dock, on a
/// random increasing time grid.
pub fn random_toy<R: rand::Rng>(rng: &mut R) -> SampledTrajectory {
    let mut t = 0.0;
    let mut nodes = Vec::new();
    for _ in 0..20 {
        let mut nd = node(
            t,
            NedVector::new(
                rng.random_range(60.0..160.0),
                rng.random_range(40.0..90.0),
                rng.random_range(-3.0..15.0),
            ),
        );
        nd.body = BodyVelocity::new(
            rng.random_range(-1.0..3.5),
            rng.random_range(-1.0..1.0),
            rng.random_range(-0.5..0.5),
        );
        nd.pitch_rate = rng.random_range(-0.5..0.5);
        nd.yaw_rate = rng.random_range(-0.6..0.6);
        nd.course = rng.random_range(-4.0..4.0);
        nd.flight_path_angle = rng.random_range(-1.0..1.0);
        nodes.push(nd);
        t += rng.random_range(0.05..3.0);
    }
    let t_f = nodes.last().unwrap().t;
    SampledTrajectory { nodes, t_f }
}
