//! Plans the shipped nominal scenario and prints a short report.
//!
//! ```text
//! cargo run --release -p idvd-dock --example plan_nominal [scenario.toml]
//! ```

use idvd_dock::model::load_scenario;
use idvd_dock::penalty::Channel;
use idvd_dock::planner::optimize;

fn main() -> idvd_dock::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios/nominal.toml").into());
    let scenario = load_scenario(&path)?;
    let plan = optimize(&scenario)?;
    println!(
        "cost {:.4}  t_f {:.3} s  path {:.3} m  feasible {}  rounds {}  evals {}  {:.3} s",
        plan.report.total_cost,
        plan.report.flight_time,
        plan.trajectory.path_length(),
        plan.is_feasible(),
        plan.rounds,
        plan.evaluations,
        plan.wall_time
    );
    println!("decision {:?}", plan.decision);
    for c in Channel::ALL {
        let v = plan.report.channel(c);
        println!("  {:<20} max_excess {:.3e}  peak {:.3e}  mean {:.3e}", c.name(), v.max_excess, v.peak, v.mean);
    }
    for (i, zone) in scenario.zones.iter().enumerate() {
        let clearance = plan
            .trajectory
            .nodes
            .iter()
            .map(|n| zone.clearance(&n.position))
            .fold(f64::INFINITY, f64::min);
        println!("  zone {i} min clearance {clearance:.6e} m");
    }
    Ok(())
}
