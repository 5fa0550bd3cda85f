use std::f64::consts::TAU;

use num_complex::Complex64;
use pathsim_core::hidden::{available_remote_phases, PhaseSlot};
use pathsim_core::optics::{beam_splitter_matrix, restore_matrix};
use pathsim_core::relativity::{
    boost, find_frames, interval_class, ordering, ApparatusGeometry, BoostFrame, IntervalKind, SpacetimeEvent,
    TimeOrder, L_AT_BS1, R_AT_BS1, R_AT_BS3,
};
use pathsim_core::scenario::run_scenario;
use pathsim_core::state::Layer;
use pathsim_core::state::{make_entangled_source, unitarity_deviation, ModeMatrix};
use pathsim_core::{Angle, JointState, Mode, Scenario, Side, Stage};
use proptest::prelude::*;

fn stage() -> impl Strategy<Value = Stage> {
    prop_oneof![Just(Stage::One), Just(Stage::Three)]
}

fn angle() -> impl Strategy<Value = Angle> {
    prop_oneof![
        (-40i64..40, 1i64..13).prop_map(|(n, d)| Angle::pi_fraction(n, d)),
        (-20.0f64..20.0).prop_map(Angle::radians),
    ]
}

fn event(label: &'static str) -> impl Strategy<Value = SpacetimeEvent> {
    (-50.0f64..50.0, -50.0f64..50.0).prop_map(move |(t, x)| SpacetimeEvent::new(label, t, x).unwrap())
}

fn scenario() -> impl Strategy<Value = Scenario> {
    (angle(), angle(), stage(), stage()).prop_map(|(a, b, l, r)| Scenario::new(a, b, l, r))
}

/// Random unitary `e^{iα}[[cos θ e^{iβ}, −sin θ e^{−iγ}], [sin θ e^{iγ}, cos θ e^{−iβ}]]`.
fn random_unitary(alpha: f64, theta: f64, beta: f64, gamma: f64) -> [[Complex64; 2]; 2] {
    let e = |x: f64| Complex64::from_polar(1.0, x);
    let (s, c) = theta.sin_cos();
    [
        [e(alpha + beta) * c, -e(alpha - gamma) * s],
        [e(alpha + gamma) * s, e(alpha - beta) * c],
    ]
}

fn random_state() -> impl Strategy<Value = JointState> {
    prop::array::uniform8(-1.0f64..1.0).prop_filter_map("non-zero", |v| {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm < 1e-3 {
            return None;
        }
        let modes = |s: &str| -> Mode { s.parse().unwrap() };
        let keys = [("a", "a'"), ("a", "b'"), ("b", "a'"), ("b", "b'")];
        Some(
            JointState::new(
                keys.iter()
                    .enumerate()
                    .map(|(k, (l, r))| ((modes(l), modes(r)), Complex64::new(v[2 * k], v[2 * k + 1]) / norm)),
            )
            .unwrap(),
        )
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pipelines_preserve_norm(s in scenario()) {
        let st = run_scenario(&s);
        prop_assert!((st.norm_sqr() - 1.0).abs() < 1e-12);
        prop_assert!((st.joint_probabilities().total() - 1.0).abs() < 1e-12);
        prop_assert!(st.joint_probabilities().iter().all(|(_, p)| (0.0..=1.0 + 1e-12).contains(&p)));
    }

    #[test]
    fn random_unitaries_preserve_norm(
        st in random_state(),
        params in prop::array::uniform4(0.0f64..TAU),
        side in prop_oneof![Just(Side::L), Just(Side::R)],
    ) {
        let u = random_unitary(params[0], params[1], params[2], params[3]);
        prop_assert!(unitarity_deviation(&u) < 1e-12);
        let mm = ModeMatrix::new(Layer::Source, Layer::Stage1, u);
        let out = st.apply_single_side_unitary(side, &mm).unwrap();
        prop_assert!((out.norm_sqr() - 1.0).abs() < 1e-12);
        let back = out.apply_single_side_unitary(side, &mm.adjoint()).unwrap();
        prop_assert!((back.overlap(&st).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn phases_add(st in random_state(), a in angle(), b in angle()) {
        let target: Mode = "b'".parse().unwrap();
        let twice = st.apply_phase(target, a).unwrap().apply_phase(target, b).unwrap();
        let once = st.apply_phase(target, a + b).unwrap();
        for ((l, r), x) in twice.amplitudes() {
            prop_assert!((x - once.amplitude(l, r)).norm() < 1e-12);
        }
    }

    #[test]
    fn overlap_is_conjugate_symmetric(x in random_state(), y in random_state()) {
        let xy = x.overlap(&y).unwrap();
        let yx = y.overlap(&x).unwrap();
        prop_assert!((xy - yx.conj()).norm() < 1e-14);
        prop_assert!(xy.norm() <= 1.0 + 1e-12);
        prop_assert!((x.overlap(&x).unwrap() - 1.0).norm() < 1e-12);
    }

    #[test]
    fn global_phase_equivalence(st in random_state(), theta in 0.0f64..TAU) {
        let rotated = st.scaled(Complex64::from_polar(1.0, theta));
        prop_assert!(st.equal_up_to_global_phase(&rotated, 1e-12));
        let (a, b) = (st.canonical(), rotated.canonical());
        for ((l, r), x) in a.amplitudes() {
            prop_assert!((x - b.amplitude(l, r)).norm() < 1e-12);
        }
    }

    #[test]
    fn interval_is_boost_invariant(a in event("a"), b in event("b"), v in -0.99f64..0.99) {
        let f = BoostFrame::new(v).unwrap();
        let before = interval_class(&a, &b);
        let after = interval_class(&boost(&a, f), &boost(&b, f));
        let scale = 1.0 + before.value.abs();
        prop_assert!((before.value - after.value).abs() <= 1e-12 * scale * f.gamma().powi(2));
    }

    #[test]
    fn boosts_compose_by_velocity_addition(e in event("e"), u in -0.9f64..0.9, v in -0.9f64..0.9) {
        let two = boost(&boost(&e, BoostFrame::new(u).unwrap()), BoostFrame::new(v).unwrap());
        let one = boost(&e, BoostFrame::new((u + v) / (1.0 + u * v)).unwrap());
        let scale = 1.0 + e.t.abs() + e.x.abs();
        prop_assert!((two.t - one.t).abs() < 1e-11 * scale);
        prop_assert!((two.x - one.x).abs() < 1e-11 * scale);
    }

    #[test]
    fn spacelike_pairs_admit_every_order(dx in 1.0f64..50.0, ratio in -0.95f64..0.95) {
        let a = SpacetimeEvent::new("a", 0.0, 0.0).unwrap();
        let b = SpacetimeEvent::new("b", ratio * dx, dx).unwrap();
        prop_assert_eq!(interval_class(&a, &b).kind, IntervalKind::Spacelike);
        let vs = ratio;
        prop_assert_eq!(ordering(&b, &a, BoostFrame::new(vs).unwrap()), TimeOrder::Simultaneous);
        prop_assert_eq!(ordering(&b, &a, BoostFrame::new((vs + 1.0) / 2.0).unwrap()), TimeOrder::Before);
        prop_assert_eq!(ordering(&b, &a, BoostFrame::new((vs - 1.0) / 2.0).unwrap()), TimeOrder::After);
    }

    #[test]
    fn timelike_order_is_invariant(dt in 1.0f64..50.0, ratio in -0.95f64..0.95, v in -0.99f64..0.99) {
        let a = SpacetimeEvent::new("a", 0.0, 0.0).unwrap();
        let b = SpacetimeEvent::new("b", dt, ratio * dt).unwrap();
        prop_assert_eq!(interval_class(&a, &b).kind, IntervalKind::Timelike);
        prop_assert_eq!(ordering(&b, &a, BoostFrame::new(v).unwrap()), TimeOrder::After);
    }

    #[test]
    fn frames_expose_expected_phases(
        x in 1.0f64..100.0,
        t1 in -0.9f64..0.9,
        t3 in 0.0f64..0.9,
        sign in prop_oneof![Just(1.0), Just(-1.0)],
        phi1 in angle(),
        phi3 in angle(),
    ) {
        // R@BS3' later than R@BS1' but still spacelike to L@BS1
        let x = sign * x;
        let t1 = t1 * x.abs();
        let t3 = t1.max(0.0) + t3 * (x.abs() - t1.max(0.0));
        prop_assume!(t3 > t1 + 1e-6 && x.abs() - t3.abs() > 1e-6);
        let g = ApparatusGeometry::new([
            SpacetimeEvent::new(L_AT_BS1, 0.0, 0.0).unwrap(),
            SpacetimeEvent::new(R_AT_BS1, t1, x).unwrap(),
            SpacetimeEvent::new(R_AT_BS3, t3, x).unwrap(),
        ]).unwrap();
        let frames = find_frames(&g).unwrap();
        let s = Scenario::new(phi1, phi3, Stage::One, Stage::Three);
        let slots = |f| available_remote_phases(&s, f, &g).unwrap().iter().map(|p| p.slot).collect::<Vec<_>>();
        prop_assert_eq!(slots(frames.i1), vec![PhaseSlot::Phi1]);
        prop_assert_eq!(slots(frames.i2), vec![PhaseSlot::Phi1, PhaseSlot::Phi3]);
    }
}

#[test]
fn splitter_matrices_are_unitary() {
    assert!(unitarity_deviation(&beam_splitter_matrix()) < 1e-15);
    assert!(unitarity_deviation(&restore_matrix()) < 1e-15);
    assert!((make_entangled_source().norm_sqr() - 1.0).abs() < 1e-15);
}
