//! Constraint violations and the scalar planning cost
//! `flight time + Σ w_i f(V_i)`.
//!
//! `f` is the squared hinge: zero inside the admissible set, the squared
//! excess outside it. Per-node values are averaged over the trajectory with
//! trapezoidal weights in time, so the cost does not grow with node count.

use std::fmt;

use crate::invdyn::{SampledTrajectory, TrajectoryNode};
use crate::model::{wrap_angle, DockSpec, NedVector, NoFlyZone, PenaltyWeights, Scenario};

/// Pointwise violation at or above this value marks a trajectory infeasible.
pub const FEASIBILITY_THRESHOLD: f64 = 1e-9;

/// The eight violation channels, in weight order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    Depth,
    Surge,
    Sway,
    PitchRate,
    YawRate,
    ApproachHorizontal,
    ApproachVertical,
    NoFly,
}

impl Channel {
    pub const ALL: [Channel; 8] = [
        Channel::Depth,
        Channel::Surge,
        Channel::Sway,
        Channel::PitchRate,
        Channel::YawRate,
        Channel::ApproachHorizontal,
        Channel::ApproachVertical,
        Channel::NoFly,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::Depth => "depth",
            Channel::Surge => "surge",
            Channel::Sway => "sway",
            Channel::PitchRate => "pitch_rate",
            Channel::YawRate => "yaw_rate",
            Channel::ApproachHorizontal => "approach_horizontal",
            Channel::ApproachVertical => "approach_vertical",
            Channel::NoFly => "no_fly",
        }
    }

    pub fn from_name(name: &str) -> Option<Channel> {
        Channel::ALL.into_iter().find(|c| c.name() == name)
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Aggregates of one channel over a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ChannelViolation {
    /// Largest excess beyond the bound, in the channel's natural unit
    /// (m, m/s, rad/s or rad).
    pub max_excess: f64,
    /// Largest pointwise value of `f` (squared excess).
    pub peak: f64,
    /// Time average of `f` over the trajectory; this is what gets weighted.
    pub mean: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViolationReport {
    pub channels: [ChannelViolation; 8],
    pub flight_time: f64,
    pub total_cost: f64,
}

impl ViolationReport {
    pub fn channel(&self, c: Channel) -> &ChannelViolation {
        &self.channels[c.index()]
    }

    /// True when every channel's peak pointwise violation is below
    /// [`FEASIBILITY_THRESHOLD`].
    pub fn is_feasible(&self) -> bool {
        self.channels.iter().all(|c| c.peak < FEASIBILITY_THRESHOLD)
    }

    /// Channels whose peak violation reaches the feasibility threshold.
    pub fn violated(&self) -> Vec<Channel> {
        Channel::ALL
            .into_iter()
            .filter(|c| self.channel(*c).peak >= FEASIBILITY_THRESHOLD)
            .collect()
    }

    pub fn worst_excess(&self) -> f64 {
        self.channels.iter().map(|c| c.max_excess).fold(0.0, f64::max)
    }
}

fn hinge(value: f64, lo: f64, hi: f64) -> f64 {
    (value - hi).max(0.0) + (lo - value).max(0.0)
}

/// `max(0, value − hi)² + max(0, lo − value)²`.
pub fn interval_violation(value: f64, lo: f64, hi: f64) -> f64 {
    let above = (value - hi).max(0.0);
    let below = (lo - value).max(0.0);
    above * above + below * below
}

/// Sum over zones of the squared penetration depth.
pub fn nofly_violation(position: &NedVector, zones: &[NoFlyZone]) -> f64 {
    zones
        .iter()
        .map(|z| {
            let p = (-z.clearance(position)).max(0.0);
            p * p
        })
        .sum()
}

fn nofly_penetration(position: &NedVector, zones: &[NoFlyZone]) -> f64 {
    zones.iter().map(|z| (-z.clearance(position)).max(0.0)).fold(0.0, f64::max)
}

fn approach_excess(node: &TrajectoryNode, dock: &DockSpec, terminal_window: f64) -> (f64, f64) {
    if node.position.distance(&dock.position) > terminal_window {
        return (0.0, 0.0);
    }
    let half = dock.half_angle();
    let horizontal = (wrap_angle(node.course - dock.yaw).abs() - half).max(0.0);
    let vertical = (wrap_angle(node.flight_path_angle - dock.pitch).abs() - half).max(0.0);
    (horizontal, vertical)
}

/// Squared excess of the course and flight-path angles beyond the funnel
/// half-angle, counted only within `terminal_window` of the dock.
pub fn approach_violation(
    node: &TrajectoryNode,
    dock: &DockSpec,
    terminal_window: f64,
) -> (f64, f64) {
    let (h, v) = approach_excess(node, dock, terminal_window);
    (h * h, v * v)
}

/// Natural-unit excess of every channel at one node.
fn node_excess(node: &TrajectoryNode, scenario: &Scenario) -> [f64; 8] {
    let l = &scenario.limits;
    let (h, v) = approach_excess(node, &scenario.dock, scenario.terminal_window);
    [
        hinge(node.position.down, l.depth.min, l.depth.max),
        hinge(node.body.surge, l.surge.min, l.surge.max),
        hinge(node.body.sway, l.sway.min, l.sway.max),
        hinge(node.pitch_rate, l.pitch_rate.min, l.pitch_rate.max),
        hinge(node.yaw_rate, l.yaw_rate.min, l.yaw_rate.max),
        h,
        v,
        nofly_penetration(&node.position, &scenario.zones),
    ]
}

/// Pointwise `f` of every channel at one node.
fn node_violation(node: &TrajectoryNode, scenario: &Scenario) -> [f64; 8] {
    let l = &scenario.limits;
    let (h, v) = approach_violation(node, &scenario.dock, scenario.terminal_window);
    [
        interval_violation(node.position.down, l.depth.min, l.depth.max),
        interval_violation(node.body.surge, l.surge.min, l.surge.max),
        interval_violation(node.body.sway, l.sway.min, l.sway.max),
        interval_violation(node.pitch_rate, l.pitch_rate.min, l.pitch_rate.max),
        interval_violation(node.yaw_rate, l.yaw_rate.min, l.yaw_rate.max),
        h,
        v,
        nofly_violation(&node.position, &scenario.zones),
    ]
}

/// Cost and violation report with the scenario's own weights.
pub fn evaluate_cost(traj: &SampledTrajectory, scenario: &Scenario) -> ViolationReport {
    evaluate_cost_weighted(traj, scenario, &scenario.weights)
}

/// Same as [`evaluate_cost`] with explicit weights.
pub fn evaluate_cost_weighted(
    traj: &SampledTrajectory,
    scenario: &Scenario,
    weights: &PenaltyWeights,
) -> ViolationReport {
    let nodes = &traj.nodes;
    let n = nodes.len();
    let mut channels = [ChannelViolation::default(); 8];
    let mut integral = [0.0; 8];

    for (i, node) in nodes.iter().enumerate() {
        let dt = match i {
            _ if n == 1 => 0.0,
            0 => nodes[1].t - nodes[0].t,
            i if i == n - 1 => nodes[i].t - nodes[i - 1].t,
            i => nodes[i + 1].t - nodes[i - 1].t,
        };
        let weight = 0.5 * dt;
        let excess = node_excess(node, scenario);
        let f = node_violation(node, scenario);
        for c in 0..8 {
            let ch = &mut channels[c];
            ch.max_excess = ch.max_excess.max(excess[c]);
            ch.peak = ch.peak.max(f[c]);
            integral[c] += weight * f[c];
        }
    }

    let flight_time = traj.t_f;
    let w = weights.to_array();
    let mut total_cost = flight_time;
    for c in 0..8 {
        channels[c].mean = if flight_time > 0.0 { integral[c] / flight_time } else { 0.0 };
        if w[c] != 0.0 {
            total_cost += w[c] * channels[c].mean;
        }
    }
    ViolationReport { channels, flight_time, total_cost }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::BodyVelocity;

    #[test]
    fn interval_examples() {
        assert_eq!(interval_violation(0.3, 0.0, 1.0), 0.0);
        assert_eq!(interval_violation(3.0, 0.0, 1.0), 4.0);
        assert_eq!(interval_violation(-2.0, 0.0, 1.0), 4.0);
        assert!(interval_violation(1.0 - 1e-9, 0.0, 1.0) == 0.0);
        assert!(interval_violation(1.0 + 1e-6, 0.0, 1.0) < 1e-11);
    }

    #[test]
    fn nofly_examples() {
        let zone = NoFlyZone { center: NedVector::new(10.0, 0.0, 0.0), radius: 5.0 };
        assert_eq!(nofly_violation(&NedVector::ZERO, &[zone]), 0.0);
        assert_eq!(nofly_violation(&NedVector::new(7.0, 0.0, 0.0), &[zone]), 4.0);
        assert_eq!(nofly_violation(&zone.center, &[zone]), 25.0);
        assert_eq!(nofly_violation(&zone.center, &[]), 0.0);
    }

    fn node_at(position: NedVector, course: f64, gamma: f64) -> TrajectoryNode {
        TrajectoryNode {
            t: 0.0,
            tau_bar: 0.0,
            position,
            yaw: course,
            pitch: gamma,
            ground_velocity: NedVector::ZERO,
            body: BodyVelocity::default(),
            yaw_rate: 0.0,
            pitch_rate: 0.0,
            course,
            flight_path_angle: gamma,
            speed: 0.0,
        }
    }

    fn dock() -> DockSpec {
        DockSpec {
            position: NedVector::new(150.0, 75.0, 10.0),
            yaw: 0.3,
            pitch: 0.0,
            cone_length: 1.2,
            outer_radius: 0.6,
            inner_radius: 0.2,
            entry_cone_angle: DockSpec::geometric_cone_angle(1.2, 0.6, 0.2),
        }
    }

    #[test]
    fn approach_examples() {
        let d = dock();
        let far = node_at(NedVector::new(100.0, 75.0, 10.0), 2.0, 1.0);
        assert_eq!(approach_violation(&far, &d, 20.0), (0.0, 0.0));

        let aligned = node_at(NedVector::new(145.0, 75.0, 10.0), d.yaw, d.pitch);
        assert_eq!(approach_violation(&aligned, &d, 20.0), (0.0, 0.0));

        let off = node_at(NedVector::new(145.0, 75.0, 10.0), d.yaw + d.half_angle() + 0.1, 0.0);
        let (h, v) = approach_violation(&off, &d, 20.0);
        assert!((h - 0.01).abs() < 1e-12, "{h}");
        assert_eq!(v, 0.0);

        // Differences wrap, so a course just across ±π from the dock counts as close.
        let mut wrapped = dock();
        wrapped.yaw = std::f64::consts::PI - 0.01;
        let across = node_at(wrapped.position, -std::f64::consts::PI + 0.01, 0.0);
        assert_eq!(approach_violation(&across, &wrapped, 20.0), (0.0, 0.0));
    }

    #[test]
    fn channel_names_round_trip() {
        for c in Channel::ALL {
            assert_eq!(Channel::from_name(c.name()), Some(c));
        }
        assert_eq!(Channel::NoFly.index(), 7);
    }
}
