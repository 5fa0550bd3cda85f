//! Closed-form output states, written out term by term, used as oracles
//! against the pipeline composition.
#![allow(dead_code)]

use num_complex::Complex64;
use pathsim_core::{JointState, Mode};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn m(s: &str) -> Mode {
    s.parse().unwrap()
}

pub fn cis(x: f64) -> Complex64 {
    c(x.cos(), x.sin())
}

/// `8^{-1/2}{(1 − e^{iθ})(|p⟩|p′⟩ − |q⟩|q′⟩) + i(1 + e^{iθ})(|q⟩|p′⟩ + |p⟩|q′⟩)}`
/// with L letters (p, q) and R letters (p′, q′), times `prefactor`.
pub fn interference_state(theta: f64, l: [&str; 2], r: [&str; 2], prefactor: Complex64) -> JointState {
    let e = cis(theta);
    let one = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    let k = prefactor / 8f64.sqrt();
    let (p, q) = (m(l[0]), m(l[1]));
    let (pp, qq) = (m(r[0]), m(r[1]));
    JointState::new([
        ((p, pp), k * (one - e)),
        ((q, qq), -k * (one - e)),
        ((q, pp), k * i * (one + e)),
        ((p, qq), k * i * (one + e)),
    ])
    .unwrap()
}

/// Both photons detected after stage 1.
pub fn stage1_output(phi: f64) -> JointState {
    interference_state(phi, ["c", "d"], ["c'", "d'"], c(1.0, 0.0))
}

/// Both photons detected after stage 3, exactly as typeset (no global factor).
pub fn stage3_output(phi: f64, phi3: f64) -> JointState {
    interference_state(phi + phi3, ["e", "f"], ["e'", "f'"], c(1.0, 0.0))
}

/// L detected after stage 1, R after stage 3, with the printed global factor i.
pub fn mixed_output(phi: f64, phi3: f64) -> JointState {
    interference_state(phi + phi3, ["c", "d"], ["e'", "f'"], c(0.0, 1.0))
}

/// Max componentwise |a − b| over the union of both supports.
pub fn max_diff(a: &JointState, b: &JointState) -> f64 {
    let mut worst: f64 = 0.0;
    for ((l, r), x) in a.amplitudes() {
        worst = worst.max((x - b.amplitude(l, r)).norm());
    }
    for ((l, r), y) in b.amplitudes() {
        worst = worst.max((a.amplitude(l, r) - y).norm());
    }
    worst
}

/// Componentwise distance after removing the single global phase that best aligns `b` to `a`.
pub fn diff_up_to_global_phase(a: &JointState, b: &JointState) -> f64 {
    let o = b.overlap(a).unwrap();
    let phase = o / o.norm();
    max_diff(a, &b.scaled(phase))
}
