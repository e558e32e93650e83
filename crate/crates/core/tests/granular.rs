use burrowsim::granular::{
    axial_advance_sign, reduction_factor, rotational_resistance, slip_velocity, static_resistance, AxialAdvance,
    Handedness, ReductionCurve, Rotation, StaticDragModel, ThrustCurve,
};
use burrowsim::Error;
use proptest::prelude::*;

fn curve() -> impl Strategy<Value = ReductionCurve> {
    (0.0..0.95f64, 0.5..500.0f64, 0.1..4.0f64).prop_map(|(e, l, p)| ReductionCurve::new(e, l, p).unwrap())
}

proptest! {
    #[test]
    fn slip_depends_only_on_rpm_speed_ratio(d in 1.0..200.0f64, rpm in 0.0..600.0f64, v in 0.01..100.0f64, k in 0.01..100.0f64) {
        let a = slip_velocity(d, rpm, v).unwrap();
        let b = slip_velocity(d, rpm * k, v * k).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.max(1.0));
        prop_assert!(a >= 0.0);
    }

    #[test]
    fn slip_rejects_nonpositive_speed(d in 1.0..200.0f64, rpm in 0.0..600.0f64, v in -10.0..=0.0f64) {
        prop_assert!(matches!(slip_velocity(d, rpm, v), Err(Error::Domain(_))));
    }

    #[test]
    fn reduction_is_bounded_and_decreasing(c in curve(), l1 in 0.0..1e4f64, l2 in 0.0..1e4f64) {
        let (lo, hi) = if l1 <= l2 { (l1, l2) } else { (l2, l1) };
        let (e_lo, e_hi) = (c.eval(lo).unwrap(), c.eval(hi).unwrap());
        prop_assert!(e_hi <= e_lo);
        prop_assert!(e_hi >= c.eta_inf && e_lo <= 1.0);
        if hi > lo * (1.0 + 1e-9) && hi > 0.0 && e_lo > c.eta_inf + 1e-12 {
            prop_assert!(e_hi < e_lo || (e_lo - c.eta_inf) < 1e-12);
        }
    }

    #[test]
    fn rotational_resistance_scales_static(c in curve(), q in 0.0..100.0f64, l in 0.0..1e3f64) {
        let r = rotational_resistance(q, &c, l).unwrap();
        prop_assert!((r - q * reduction_factor(&c, l).unwrap()).abs() <= 1e-12 * q.max(1.0));
        prop_assert!(r <= q + 1e-12);
    }

    #[test]
    fn static_drag_ignores_nothing_but_depth(k in 0.0..100.0f64, alpha in 0.0..3.0f64, z in 0.0..1.0f64) {
        let m = StaticDragModel::new(k, alpha, 0.1).unwrap();
        let q = static_resistance(&m, z).unwrap();
        prop_assert!(q >= 0.0);
        prop_assert!((static_resistance(&m, 0.1).unwrap() - k).abs() <= 1e-12 * k.max(1.0));
    }

    #[test]
    fn thrust_curve_is_monotone(a in 0.0..400.0f64, b in 0.0..400.0f64) {
        let t = ThrustCurve::measured();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(t.eval(lo).unwrap() <= t.eval(hi).unwrap());
    }
}

#[test]
fn sign_rule_mirror_symmetry() {
    for h in [Handedness::Right, Handedness::Left] {
        for d in [Rotation::Cw, Rotation::Ccw, Rotation::Stopped] {
            let s = axial_advance_sign(h, d);
            assert_eq!(axial_advance_sign(h.mirrored(), d.mirrored()), s);
            if d != Rotation::Stopped {
                assert_eq!(axial_advance_sign(h.mirrored(), d).sign(), -s.sign());
                assert_eq!(axial_advance_sign(h, d.mirrored()).sign(), -s.sign());
            } else {
                assert_eq!(s, AxialAdvance::Neutral);
            }
        }
    }
}

#[test]
fn thrust_curve_rejects_bad_knots() {
    assert!(ThrustCurve::new(vec![]).is_err());
    assert!(ThrustCurve::new(vec![(100.0, 2.0), (90.0, 3.0)]).is_err());
    assert!(ThrustCurve::new(vec![(100.0, 2.0), (120.0, 1.0)]).is_err());
}

#[test]
fn reduction_curve_rejects_bad_parameters() {
    assert!(ReductionCurve::new(1.0, 10.0, 1.0).is_err());
    assert!(ReductionCurve::new(-0.1, 10.0, 1.0).is_err());
    assert!(ReductionCurve::new(0.1, 0.0, 1.0).is_err());
    assert!(ReductionCurve::new(0.1, 10.0, 0.0).is_err());
    let c = ReductionCurve::new(0.1, 10.0, 1.0).unwrap();
    assert!(c.eval(-1.0).is_err());
}
