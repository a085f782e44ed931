use idvd_dock::model::{
    load_scenario, save_scenario, PenaltyWeights, Scenario, SolverOptions, VehicleLimits,
};
use idvd_dock::Error;
use proptest::prelude::*;

const NOMINAL: &str = include_str!("../../../scenarios/nominal.toml");

fn nominal() -> Scenario {
    Scenario::from_toml_str(NOMINAL).unwrap()
}

#[test]
fn nominal_file_values() {
    let s = nominal();
    assert_eq!(s.start.position.to_array(), [50.0, 50.0, 5.0]);
    assert_eq!(s.dock.position.to_array(), [150.0, 75.0, 10.0]);
    assert!((s.start.yaw - 10f64.to_radians()).abs() < 1e-15);
    assert!((s.start.pitch - 0.5f64.to_radians()).abs() < 1e-15);
    assert_eq!(s.current.magnitude, 0.35);
    assert!((s.current.direction - 45f64.to_radians()).abs() < 1e-15);
    assert_eq!(s.zones.len(), 3);
}

#[test]
fn defaults_fill_omitted_sections() {
    let s = nominal();
    assert_eq!(s.limits, VehicleLimits::default());
    assert_eq!(s.weights, PenaltyWeights::uniform(100.0));
    assert_eq!(s.solver, SolverOptions::default());
    assert_eq!(s.nodes, 201);
    assert_eq!(s.start.yaw_rate, 0.0);
    assert_eq!(s.arrival.yaw_acceleration, 0.0);
}

#[test]
fn dock_cone_angle_defaults_to_geometry() {
    let s = nominal();
    // 2·atan(0.4 / 1.2)
    let eta = 2.0 * (1.0f64 / 3.0).atan();
    assert!((s.dock.entry_cone_angle - eta).abs() < 1e-15);
    assert!((s.dock.entry_cone_angle.to_degrees() - 36.869_897_645_844_02).abs() < 1e-9);
}

#[test]
fn inverted_dock_radii_are_rejected() {
    let text = NOMINAL.replace("outer_radius = 0.6", "outer_radius = 0.1");
    let err = Scenario::from_toml_str(&text).unwrap_err();
    assert!(matches!(err, Error::Validation(_)), "{err:?}");
    assert!(err.to_string().contains("R > r"), "{err}");
}

#[test]
fn inconsistent_cone_angle_is_rejected() {
    let text = NOMINAL.replace("terminal_window = 20.0", "terminal_window = 20.0\nentry_cone_angle_deg = 50.0");
    assert!(Scenario::from_toml_str(&text).is_err());
}

#[test]
fn unknown_keys_and_double_units_are_rejected() {
    let typo = NOMINAL.replace("speed = 0.35", "sped = 0.35");
    assert!(matches!(Scenario::from_toml_str(&typo), Err(Error::Parse(_))));
    let both = NOMINAL.replace("yaw_deg = 10.0", "yaw_deg = 10.0\nyaw_rad = 0.2");
    assert!(Scenario::from_toml_str(&both).is_err());
}

#[test]
fn gimbal_pitch_is_rejected() {
    let text = NOMINAL.replace("pitch_deg = 0.5", "pitch_deg = 90.0");
    assert!(Scenario::from_toml_str(&text).is_err());
}

#[test]
fn empty_limit_interval_is_rejected() {
    let text = format!("{NOMINAL}\n[limits]\nsurge = [1.0, 0.5]\n");
    assert!(Scenario::from_toml_str(&text).is_err());
}

#[test]
fn file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.toml");
    let s = nominal();
    save_scenario(&s, &path).unwrap();
    assert_eq!(load_scenario(&path).unwrap(), s);
}

#[test]
fn missing_file_is_io_error() {
    assert!(matches!(load_scenario("/nonexistent/scenario.toml"), Err(Error::Io(_))));
}

#[test]
fn boundary_conditions_follow_start_and_dock() {
    let s = nominal();
    let bc = s.boundary();
    assert_eq!(bc.initial.position, s.start.position);
    assert_eq!(bc.terminal.position, s.dock.position);
    let drift = s.current.velocity();
    // Through-water speed 1 along the dock axis, plus the current.
    let water = bc.terminal.velocity - drift;
    assert!((water.norm() - 1.0).abs() < 1e-15);
    assert!((water.east.atan2(water.north) - s.dock.yaw).abs() < 1e-15);
    assert!((bc.terminal.yaw - s.dock.yaw).abs() < 1e-15);
}

#[test]
fn terminal_yaw_turns_the_short_way() {
    let mut s = nominal();
    s.start.yaw = 170f64.to_radians();
    s.dock.yaw = -170f64.to_radians();
    let bc = s.boundary();
    assert!((bc.terminal.yaw - bc.initial.yaw - 20f64.to_radians()).abs() < 1e-12);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_load_is_lossless(
        n in -1e3f64..1e3, e in -1e3f64..1e3, d in 0.0f64..100.0,
        yaw in -3.14f64..3.14, pitch in -1.5f64..1.5,
        speed in 0.0f64..3.0, cur in 0.0f64..1.0, dir in -3.14f64..3.14,
        w in 0.0f64..1e4, nodes in 10usize..1000,
    ) {
        let mut s = nominal();
        s.start.position = [n, e, d].into();
        s.start.yaw = yaw;
        s.start.pitch = pitch;
        s.start.speed = speed;
        s.current.magnitude = cur;
        s.current.direction = dir;
        s.weights.sway = w;
        s.nodes = nodes;
        let back = Scenario::from_toml_str(&s.to_toml_string().unwrap()).unwrap();
        prop_assert_eq!(back, s);
    }
}
