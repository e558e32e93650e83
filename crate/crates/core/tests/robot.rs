mod common;

use burrowsim::dataio::MarkerTrack;
use burrowsim::granular::{Handedness, RotationState};
use burrowsim::robot::{
    component_drag, equilibrium_speed, marker_track_to_motion, net_axial_force, self_burrowing_predicate,
    simulate_trajectory, total_thrust, CurvePair, RobotKinematics, SolverOptions, ThrustBasis, UpliftModel,
};
use common::{fixed_robot, rel};
use proptest::prelude::*;

#[test]
fn equilibrium_matches_a_grid_scan() {
    let robot = fixed_robot();
    let opts = SolverOptions::default();
    for rpm in [105.0, 160.0, 210.0] {
        let v_star = equilibrium_speed(&robot, rpm, &opts).unwrap();
        // 10^4 log-spaced speeds over the solver bracket
        let n = 10_000;
        let (lo, hi) = opts.bracket_mm_s;
        let grid: Vec<f64> = (0..n).map(|i| lo * (hi / lo).powf(i as f64 / (n - 1) as f64)).collect();
        let force = |v: f64| net_axial_force(&robot, &robot.burrowing_kinematics(rpm, v).unwrap(), 0.1).unwrap();
        let i = grid.windows(2).position(|w| force(w[0]) >= 0.0 && force(w[1]) < 0.0).expect("sign change");
        assert!(v_star >= grid[i] && v_star <= grid[i + 1], "{rpm}: {v_star} not in [{}, {}]", grid[i], grid[i + 1]);
    }
}

#[test]
fn stopped_robot_does_not_move() {
    let robot = fixed_robot();
    assert_eq!(equilibrium_speed(&robot, 0.0, &SolverOptions::default()).unwrap(), 0.0);
    let run = simulate_trajectory(
        &robot,
        0.0,
        &UpliftModel { kappa: 0.3, onset_time_s: 0.0 },
        10.0,
        1.0,
        &SolverOptions::default(),
    )
    .unwrap();
    assert!(run.points.iter().all(|p| p.x_m == 0.0 && p.z_m == 0.1 && p.theta_deg == 90.0));
}

#[test]
fn per_auger_basis_doubles_thrust() {
    let mut robot = fixed_robot();
    let whole = total_thrust(&robot, 160.0).unwrap();
    robot.thrust_basis = ThrustBasis::PerAuger;
    assert_eq!(total_thrust(&robot, 160.0).unwrap(), 2.0 * whole);
}

#[test]
fn left_handed_augers_mirror_right_handed_ones() {
    let right = fixed_robot();
    let mut left = fixed_robot();
    left.front.handedness = Handedness::Left;
    left.back.handedness = Handedness::Left;
    for v in [0.5, 2.0, 10.0] {
        let kr = right.burrowing_kinematics(210.0, v).unwrap();
        let kl = left.burrowing_kinematics(210.0, v).unwrap();
        assert_eq!(component_drag(&right, &kr, 0.1).unwrap(), component_drag(&left, &kl, 0.1).unwrap());
        assert_eq!(net_axial_force(&right, &kr, 0.1).unwrap(), net_axial_force(&left, &kl, 0.1).unwrap());
    }
}

#[test]
fn retracting_back_auger_differs_by_its_share() {
    let robot = fixed_robot();
    let v = 5.0;
    let lambda = burrowsim::granular::slip_velocity(24.0, 210.0, v).unwrap();
    let with = |back| RobotKinematics { v_mm_s: v, front: RotationState::cw(210.0).unwrap(), back };
    let ccw = component_drag(&robot, &with(RotationState::ccw(210.0).unwrap()), 0.1).unwrap();
    let stopped = component_drag(&robot, &with(RotationState::STOPPED), 0.1).unwrap();
    let expected = robot.shares.back * (robot.curves.ccw.eval(lambda).unwrap() - 1.0);
    assert!((ccw - stopped - expected).abs() < 1e-12);
}

#[test]
fn kappa_zero_conserves_depth() {
    let robot = fixed_robot();
    let run = simulate_trajectory(&robot, 210.0, &UpliftModel::NONE, 300.0, 1.0, &SolverOptions::default()).unwrap();
    assert!(run.points.iter().all(|p| p.z_m == robot.burial_depth_m && p.theta_deg == 90.0));
    assert!(!run.surfaced);
}

#[test]
fn trajectory_argument_errors() {
    let robot = fixed_robot();
    let o = SolverOptions::default();
    let u = UpliftModel::NONE;
    assert!(simulate_trajectory(&robot, 210.0, &u, 10.0, 0.0, &o).is_err());
    assert!(simulate_trajectory(&robot, 210.0, &u, 10.0, 10.0, &o).is_err());
    assert!(simulate_trajectory(&robot, 210.0, &UpliftModel { kappa: -1.0, onset_time_s: 0.0 }, 10.0, 1.0, &o).is_err());
}

#[test]
fn markers_recover_a_known_pose() {
    let robot = fixed_robot();
    let t: Vec<f64> = (0..20).map(|i| i as f64).collect();
    let theta: Vec<f64> = t.iter().map(|&s| (90.0 - s).to_radians()).collect();
    let body: Vec<(f64, f64)> = t.iter().map(|&s| (0.01 * s, -0.1 + 0.002 * s)).collect();
    let at = |h: f64| -> (Vec<f64>, Vec<f64>) {
        body.iter().zip(&theta).map(|(b, th)| (b.0 + h * th.cos(), b.1 + h * th.sin())).unzip()
    };
    let (ua, va) = at(robot.marker_a_height_m);
    let (ub, vb) = at(robot.marker_b_height_m);
    let a = MarkerTrack::new(t.clone(), ua, va).unwrap();
    let b = MarkerTrack::new(t.clone(), ub, vb).unwrap();
    let m = marker_track_to_motion(&a, &b, &robot).unwrap();
    for i in 0..t.len() {
        assert!((m.theta_deg[i] - theta[i].to_degrees()).abs() < 1e-9);
        assert!((m.body_x_m[i] - body[i].0).abs() < 1e-12);
        assert!((m.body_y_m[i] - body[i].1).abs() < 1e-12);
    }
    assert_eq!(m.dx_m[0], 0.0);

    let shifted = MarkerTrack::new(t.iter().map(|s| s + 0.5).collect(), b.u.clone(), b.v.clone()).unwrap();
    assert!(matches!(marker_track_to_motion(&a, &shifted, &robot), Err(burrowsim::Error::Alignment(_))));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn drag_depends_on_kinematics_only_through_lambda(rpm in 1.0..400.0f64, v in 0.01..50.0f64, k in 0.1..10.0f64) {
        let robot = fixed_robot();
        let a = component_drag(&robot, &robot.burrowing_kinematics(rpm, v).unwrap(), 0.1).unwrap();
        let b = component_drag(&robot, &robot.burrowing_kinematics(rpm * k, v * k).unwrap(), 0.1).unwrap();
        prop_assert!(rel(a, b) < 1e-12);
    }

    #[test]
    fn drag_falls_as_speed_falls(rpm in 1.0..400.0f64, v1 in 0.001..50.0f64, v2 in 0.001..50.0f64) {
        let robot = fixed_robot();
        let d = |v| component_drag(&robot, &robot.burrowing_kinematics(rpm, v).unwrap(), 0.1).unwrap();
        let (lo, hi) = if v1 <= v2 { (v1, v2) } else { (v2, v1) };
        prop_assert!(d(lo) <= d(hi));
    }

    #[test]
    fn predicate_monotone_in_rpm(a in 0.0..400.0f64, b in 0.0..400.0f64) {
        let robot = fixed_robot();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(!self_burrowing_predicate(&robot, lo) || self_burrowing_predicate(&robot, hi));
    }

    #[test]
    fn equilibrium_balances_thrust(rpm in 60.0..400.0f64) {
        let robot = fixed_robot();
        prop_assume!(self_burrowing_predicate(&robot, rpm));
        let opts = SolverOptions::default();
        let v = equilibrium_speed(&robot, rpm, &opts).unwrap();
        prop_assert!(v > 0.0);
        let f = net_axial_force(&robot, &robot.burrowing_kinematics(rpm, v).unwrap(), 0.1).unwrap();
        prop_assert!(f.abs() <= 1e-8 * total_thrust(&robot, rpm).unwrap());
    }

    #[test]
    fn rise_over_run_is_kappa_after_onset(kappa in 0.01..1.0f64, onset in 0.0..20.0f64) {
        let robot = fixed_robot();
        let u = UpliftModel { kappa, onset_time_s: onset.floor() };
        let run = simulate_trajectory(&robot, 210.0, &u, 60.0, 1.0, &SolverOptions::default()).unwrap();
        let start = run.points.iter().position(|p| p.t_s >= u.onset_time_s).unwrap();
        for w in run.points[start..].windows(2) {
            let (dx, dz) = (w[1].x_m - w[0].x_m, w[0].z_m - w[1].z_m);
            prop_assert!((dz - kappa * dx).abs() <= 1e-15 + 1e-12 * dz.abs());
        }
        prop_assert!(run.points[..=start].iter().all(|p| p.z_m == robot.burial_depth_m));
    }

    #[test]
    fn curve_pair_mirror(l in 0.0..1e3f64) {
        let robot = fixed_robot();
        let c: CurvePair = robot.curves;
        let mut left = robot.front;
        left.handedness = Handedness::Left;
        use burrowsim::granular::Rotation::*;
        prop_assert_eq!(c.eta(&robot.front, Cw, l).unwrap(), c.eta(&left, Ccw, l).unwrap());
        prop_assert_eq!(c.eta(&robot.front, Ccw, l).unwrap(), c.eta(&left, Cw, l).unwrap());
        prop_assert_eq!(c.eta(&left, Stopped, l).unwrap(), 1.0);
    }
}
