mod common;

use std::f64::consts::{PI, SQRT_2, TAU};

use num_complex::Complex64;
use pathsim_core::optics::{beam_splitter_matrix, restore_matrix, restore_pipeline, stage1_pipeline};
use pathsim_core::scenario::{chsh, correlation, run_scenario, stage_folded_probabilities};
use pathsim_core::state::{make_entangled_source, mat_mul};
use pathsim_core::{Angle, JointState, Scenario, Side, Stage};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn run(phi1: f64, phi3: f64, l: Stage, r: Stage) -> JointState {
    run_scenario(&Scenario::new(Angle::radians(phi1), Angle::radians(phi3), l, r))
}

#[test]
fn stage1_matches_closed_form() {
    let mut g = rng(1);
    for _ in 0..100 {
        let phi = g.random_range(0.0..TAU);
        let got = run(phi, 0.0, Stage::One, Stage::One);
        assert_eq!(got.len(), 4);
        assert!(max_diff(&got, &stage1_output(phi)) < 1e-12, "phi = {phi}");
    }
}

#[test]
fn stage1_exact_points() {
    // φ = 0: only the cross terms survive, each with amplitude i/√2
    let s = run_scenario(&Scenario::default());
    let h = 0.5f64.sqrt();
    assert!((s.amplitude(m("d"), m("c'")) - c(0.0, h)).norm() < 1e-15);
    assert_eq!(s.amplitude(m("c"), m("c'")), c(0.0, 0.0));
    // φ = π: only the direct terms survive
    let s = run_scenario(&Scenario::new(Angle::PI, Angle::ZERO, Stage::One, Stage::One));
    assert_eq!(s.amplitude(m("d"), m("c'")).norm(), 0.0);
    assert!((s.amplitude(m("c"), m("c'")) - c(h, 0.0)).norm() < 1e-15);
    assert!((s.amplitude(m("d"), m("d'")) - c(-h, 0.0)).norm() < 1e-15);
}

#[test]
fn restore_undoes_splitter() {
    let prod = mat_mul(&restore_matrix(), &beam_splitter_matrix());
    for (i, row) in prod.iter().enumerate() {
        for (j, x) in row.iter().enumerate() {
            let want = if i == j { c(0.0, 1.0) } else { c(0.0, 0.0) };
            assert!((x - want).norm() <= 1e-15, "entry ({i},{j}) = {x}");
        }
    }
}

#[test]
fn restore_inverts_random_vectors() {
    let mut g = rng(2);
    let (u, r) = (beam_splitter_matrix(), restore_matrix());
    for _ in 0..100 {
        let v: [Complex64; 2] = std::array::from_fn(|_| c(g.random_range(-1.0..1.0), g.random_range(-1.0..1.0)));
        let uv: [Complex64; 2] = std::array::from_fn(|o| u[o][0] * v[0] + u[o][1] * v[1]);
        let ruv: [Complex64; 2] = std::array::from_fn(|o| r[o][0] * uv[0] + r[o][1] * uv[1]);
        for k in 0..2 {
            assert!((ruv[k] - c(0.0, 1.0) * v[k]).norm() < 1e-14);
        }
    }
}

#[test]
fn restore_returns_phase_shifted_source() {
    let mut g = rng(3);
    for _ in 0..100 {
        let phi = g.random_range(0.0..TAU);
        let (l1, r1) = stage1_pipeline(Angle::radians(phi));
        let l = l1.then(&restore_pipeline(Side::L)).unwrap();
        let r = r1.then(&restore_pipeline(Side::R)).unwrap();
        let out = r.apply(&l.apply(&make_entangled_source()).unwrap()).unwrap();
        let want = make_entangled_source()
            .apply_phase(m("b'"), Angle::radians(phi))
            .unwrap();
        assert!(out.overlap(&want).unwrap().norm() >= 1.0 - 1e-12);
        // the global phase is -1 exactly (two factors of i)
        assert!(max_diff(&out, &want.scaled(c(-1.0, 0.0))) < 1e-12);
        if phi.cos() < 0.99 {
            // without φ the state is the unshifted source, which differs
            assert!(out.overlap(&make_entangled_source()).unwrap().norm() < 1.0 - 1e-6);
        }
    }
}

#[test]
fn stage3_matches_closed_form_up_to_global_phase() {
    let mut g = rng(4);
    for _ in 0..100 {
        let (phi, phi3) = (g.random_range(0.0..TAU), g.random_range(0.0..TAU));
        let got = run(phi, phi3, Stage::Three, Stage::Three);
        let want = stage3_output(phi, phi3);
        assert!(diff_up_to_global_phase(&want, &got) < 1e-12);
        // the global phase is -1
        assert!(max_diff(&got, &want.scaled(c(-1.0, 0.0))) < 1e-12);
    }
}

#[test]
fn mixed_detection_matches_closed_form_exactly() {
    let mut g = rng(5);
    for _ in 0..100 {
        let (phi, phi3) = (g.random_range(0.0..TAU), g.random_range(0.0..TAU));
        let got = run(phi, phi3, Stage::One, Stage::Three);
        assert!(max_diff(&got, &mixed_output(phi, phi3)) < 1e-12, "({phi}, {phi3})");
    }
}

#[test]
fn swapped_mixed_detection_depends_on_phi1_only() {
    let mut g = rng(6);
    for _ in 0..50 {
        let (phi, phi3a, phi3b) = (
            g.random_range(0.0..TAU),
            g.random_range(0.0..TAU),
            g.random_range(0.0..TAU),
        );
        let a = run(phi, phi3a, Stage::Three, Stage::One);
        let b = run(phi, phi3b, Stage::Three, Stage::One);
        assert!(max_diff(&a, &b) < 1e-12);
        // i times the first-stage form with L letters e, f
        let want = interference_state(phi, ["e", "f"], ["c'", "d'"], c(0.0, 1.0));
        assert!(max_diff(&a, &want) < 1e-12);
    }
}

#[test]
fn swapped_mixed_detection_mirrors_when_phi3_vanishes() {
    let mut g = rng(7);
    for _ in 0..50 {
        let phi = g.random_range(0.0..TAU);
        let a = stage_folded_probabilities(&run(phi, 0.0, Stage::One, Stage::Three));
        let b = stage_folded_probabilities(&run(phi, 0.0, Stage::Three, Stage::One));
        assert_eq!(a.len(), b.len());
        for (k, p) in &a {
            assert!((p - b[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn probabilities_depend_on_phase_sum() {
    let mut g = rng(8);
    for _ in 0..50 {
        let (phi, phi3, delta) = (
            g.random_range(0.0..TAU),
            g.random_range(0.0..TAU),
            g.random_range(-PI..PI),
        );
        for (l, r) in [(Stage::One, Stage::Three), (Stage::Three, Stage::Three)] {
            let a = run(phi, phi3, l, r).joint_probabilities();
            let b = run(phi + delta, phi3 - delta, l, r).joint_probabilities();
            let wrapped = run(phi + TAU, phi3, l, r).joint_probabilities();
            for (k, p) in a.iter() {
                assert!((p - b.get(k)).abs() < 1e-9);
                assert!((p - wrapped.get(k)).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn direct_and_full_detection_relabel() {
    let mut g = rng(9);
    for _ in 0..50 {
        let phi = g.random_range(0.0..TAU);
        let a = stage_folded_probabilities(&run(phi, 0.0, Stage::One, Stage::One));
        let b = stage_folded_probabilities(&run(phi, 0.0, Stage::Three, Stage::Three));
        for (k, p) in &a {
            assert!((p - b[k]).abs() < 1e-12);
        }
    }
}

#[test]
fn correlation_follows_cosine_of_sum() {
    for k in 0..360 {
        let phi = Angle::pi_fraction(2 * k, 360);
        for phi3 in [Angle::ZERO, Angle::pi_fraction(1, 3), Angle::radians(-1.1)] {
            let e = correlation(&Scenario::new(phi, phi3, Stage::One, Stage::Three));
            let want = -(phi.to_radians() + phi3.to_radians()).cos();
            assert!((e - want).abs() < 1e-12);
        }
    }
}

#[test]
fn chsh_reaches_tsirelson_bound() {
    let s = chsh(
        Angle::ZERO,
        Angle::pi_fraction(1, 2),
        Angle::pi_fraction(-1, 4),
        Angle::pi_fraction(1, 4),
    );
    assert!((s + 2.0 * SQRT_2).abs() < 1e-9, "S = {s}");
}
