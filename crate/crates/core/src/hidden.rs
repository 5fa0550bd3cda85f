//! Deterministic hidden-variable outcome models.
//!
//! Under realism the path on which L's photon is found (its "full" wave
//! packet) is fixed before detection. A local model fixes it from L's own
//! setting and a hidden variable λ. A nonlocal model may also read the
//! phases R has passed through, but which of those phases R has passed is a
//! frame-dependent statement when the crossings are spacelike separated.
//! [`ambiguity_check`] evaluates a model in two frames and reports whether
//! it gives two different answers for the same single detection, while
//! [`no_signaling_certificate`] confirms the observable marginals never
//! depend on the remote phases.

use std::f64::consts::TAU;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::angle::Angle;
use crate::relativity::{
    ordering, ApparatusGeometry, BoostFrame, RelativityError, SpacetimeEvent, TimeOrder, L_AT_BS1, R_AT_BS1, R_AT_BS3,
};
use crate::scenario::{run_scenario, Scenario, Stage};
use crate::state::{JointState, Side, StateError};

/// Tolerance for the no-signaling certificate on |P_L − 1/2|.
pub const NO_SIGNALING_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HiddenError {
    #[error("hidden variable {0} is outside [0, 2π)")]
    HiddenVariableRange(f64),
    #[error("grid is empty")]
    EmptyGrid,
    #[error(transparent)]
    Relativity(#[from] RelativityError),
    #[error("state rejected: {0}")]
    State(#[from] StateError),
    #[error("{side} marginal has {found} outcomes, expected 2")]
    NotBinary { side: Side, found: usize },
}

/// A ±1 detection result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Outcome {
    Plus,
    Minus,
}

impl Outcome {
    pub fn value(self) -> i32 {
        match self {
            Outcome::Plus => 1,
            Outcome::Minus => -1,
        }
    }

    /// `+1` for `x ≥ 0`, `−1` otherwise.
    pub fn from_sign(x: f64) -> Outcome {
        if x >= 0.0 {
            Outcome::Plus
        } else {
            Outcome::Minus
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Plus => "+1",
            Outcome::Minus => "-1",
        })
    }
}

impl Serialize for Outcome {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i32(self.value())
    }
}

/// λ in `[0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct HiddenVariable(f64);

impl HiddenVariable {
    pub fn new(lambda: f64) -> Result<Self, HiddenError> {
        if (0.0..TAU).contains(&lambda) {
            Ok(HiddenVariable(lambda))
        } else {
            Err(HiddenError::HiddenVariableRange(lambda))
        }
    }

    /// Reduces any finite angle into `[0, 2π)`.
    pub fn wrapped(lambda: f64) -> Self {
        let r = lambda.rem_euclid(TAU);
        HiddenVariable(if r >= TAU { 0.0 } else { r })
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// One deterministic local strategy for the 2×2-setting CHSH game.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalDeterministicModel {
    /// L outcome for setting index 0 and 1.
    pub a: [Outcome; 2],
    /// R outcome for setting index 0 and 1.
    pub b: [Outcome; 2],
}

impl LocalDeterministicModel {
    /// All 16 strategies, in a fixed order.
    pub fn all() -> Vec<LocalDeterministicModel> {
        let pick = |bit: usize| if bit == 0 { Outcome::Plus } else { Outcome::Minus };
        (0..16)
            .map(|code: usize| LocalDeterministicModel {
                a: [pick(code & 1), pick((code >> 1) & 1)],
                b: [pick((code >> 2) & 1), pick((code >> 3) & 1)],
            })
            .collect()
    }

    /// `A₁B₁ + A₁B₂ + A₂B₁ − A₂B₂`.
    pub fn chsh(&self) -> i32 {
        let [a1, a2] = self.a.map(Outcome::value);
        let [b1, b2] = self.b.map(Outcome::value);
        a1 * b1 + a1 * b2 + a2 * b1 - a2 * b2
    }
}

/// Max |S| over every deterministic local strategy.
///
/// The strategies assign outcomes per setting index, so the actual angles
/// only label the settings; the bound is the same for every choice.
pub fn enumerate_local_chsh_bound(settings_l: [Angle; 2], settings_r: [Angle; 2]) -> f64 {
    let _ = (settings_l, settings_r);
    LocalDeterministicModel::all()
        .iter()
        .map(|m| m.chsh().abs())
        .max()
        .map(f64::from)
        .unwrap_or(0.0)
}

/// S of a convex mixture of the 16 strategies (weights in [`LocalDeterministicModel::all`] order).
pub fn mixture_chsh(weights: &[f64; 16]) -> f64 {
    LocalDeterministicModel::all()
        .iter()
        .zip(weights)
        .map(|(m, w)| w * f64::from(m.chsh()))
        .sum()
}

/// Which of R's phase shifters a remote phase came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PhaseSlot {
    Phi1,
    Phi3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RemotePhase {
    pub slot: PhaseSlot,
    pub value: Angle,
}

impl fmt::Display for RemotePhase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.slot {
            PhaseSlot::Phi1 => "phi1",
            PhaseSlot::Phi3 => "phi3",
        };
        write!(f, "{name}={}", self.value)
    }
}

fn crossed(r: &SpacetimeEvent, l: &SpacetimeEvent, f: BoostFrame) -> bool {
    ordering(r, l, f) != TimeOrder::After
}

/// Phases R has passed by the time L crosses BS₁, as judged in frame `frame`.
///
/// Simultaneous crossing counts as passed. When R is detected at stage 1 it
/// never reaches BS′₃ and `R@BS3'` is ignored.
pub fn available_remote_phases(
    s: &Scenario,
    frame: BoostFrame,
    geometry: &ApparatusGeometry,
) -> Result<Vec<RemotePhase>, HiddenError> {
    let l = geometry.require(L_AT_BS1)?;
    let r1 = geometry.require(R_AT_BS1)?;
    let mut phases = Vec::with_capacity(2);
    if crossed(r1, l, frame) {
        phases.push(RemotePhase {
            slot: PhaseSlot::Phi1,
            value: s.phi1,
        });
    }
    if s.detect_r == Stage::Three {
        let r3 = geometry.require(R_AT_BS3)?;
        if crossed(r3, l, frame) {
            phases.push(RemotePhase {
                slot: PhaseSlot::Phi3,
                value: s.phi3,
            });
        }
    }
    Ok(phases)
}

/// A deterministic outcome function for L that may read remote phases.
pub trait OutcomeFunction: Sync {
    fn outcome(&self, local_setting: Angle, remote: &[RemotePhase], lambda: HiddenVariable) -> Outcome;
    fn describe(&self) -> String;
}

/// Shipped example models.
///
/// All are threshold functions `A = sign(cos(θ))` with `sign(0) = +1`;
/// they differ in which remote phases enter `θ`. They are illustrations of
/// the nonlocal-realist form, not fitted to any data.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum OutcomeModel {
    /// `θ = local + λ`; ignores R entirely.
    Local,
    /// `θ = local + Σ available phases + λ`.
    SumThreshold,
    /// `θ = local + w1·φ·[φ available] + w3·ϕ·[ϕ available] + λ`.
    Weighted { w1: f64, w3: f64 },
}

impl OutcomeModel {
    pub fn names() -> &'static [&'static str] {
        &["local", "sum-threshold", "weighted"]
    }
}

impl OutcomeFunction for OutcomeModel {
    fn outcome(&self, local_setting: Angle, remote: &[RemotePhase], lambda: HiddenVariable) -> Outcome {
        let weight = |slot: PhaseSlot| match (self, slot) {
            (OutcomeModel::Local, _) => 0.0,
            (OutcomeModel::SumThreshold, _) => 1.0,
            (OutcomeModel::Weighted { w1, .. }, PhaseSlot::Phi1) => *w1,
            (OutcomeModel::Weighted { w3, .. }, PhaseSlot::Phi3) => *w3,
        };
        // stays exact for π-rational phases and integer weights, so cos(π) is exactly −1
        let theta = remote
            .iter()
            .fold(local_setting, |acc, p| acc + p.value.scaled(weight(p.slot)))
            + Angle::radians(lambda.value());
        Outcome::from_sign(theta.cos())
    }

    fn describe(&self) -> String {
        match self {
            OutcomeModel::Local => "A = sign(cos(local + lambda))".to_string(),
            OutcomeModel::SumThreshold => "A = sign(cos(local + sum(available remote phases) + lambda))".to_string(),
            OutcomeModel::Weighted { w1, w3 } => {
                format!("A = sign(cos(local + {w1}*phi1 + {w3}*phi3 + lambda)) over available phases")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmbiguityReport {
    pub model: String,
    pub frame1: BoostFrame,
    pub frame2: BoostFrame,
    pub frame1_phases: Vec<RemotePhase>,
    pub frame2_phases: Vec<RemotePhase>,
    pub outcome1: Outcome,
    pub outcome2: Outcome,
    pub ambiguous: bool,
}

/// L's setting; L carries no phase shifter in this apparatus.
pub const L_LOCAL_SETTING: Angle = Angle::ZERO;

/// Evaluates L's outcome under the remote phases available in each frame.
pub fn ambiguity_check(
    model: &dyn OutcomeFunction,
    s: &Scenario,
    frame1: BoostFrame,
    frame2: BoostFrame,
    geometry: &ApparatusGeometry,
    lambda: HiddenVariable,
) -> Result<AmbiguityReport, HiddenError> {
    let frame1_phases = available_remote_phases(s, frame1, geometry)?;
    let frame2_phases = available_remote_phases(s, frame2, geometry)?;
    let outcome1 = model.outcome(L_LOCAL_SETTING, &frame1_phases, lambda);
    let outcome2 = model.outcome(L_LOCAL_SETTING, &frame2_phases, lambda);
    Ok(AmbiguityReport {
        model: model.describe(),
        frame1,
        frame2,
        frame1_phases,
        frame2_phases,
        outcome1,
        outcome2,
        ambiguous: outcome1 != outcome2,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoSignalingCertificate {
    pub holds: bool,
    pub max_deviation: f64,
    pub points_checked: usize,
}

/// Max |P_L(outcome) − 1/2| over the given states, rejecting any that are
/// not normalized.
pub fn certify_states<'a>(
    states: impl IntoIterator<Item = &'a JointState>,
) -> Result<NoSignalingCertificate, HiddenError> {
    let mut max_deviation: f64 = 0.0;
    let mut points_checked = 0;
    for st in states {
        st.validate()?;
        let marginal = st.marginal(Side::L);
        if marginal.len() != 2 {
            return Err(HiddenError::NotBinary {
                side: Side::L,
                found: marginal.len(),
            });
        }
        for (_, p) in marginal.iter() {
            max_deviation = max_deviation.max((p - 0.5).abs());
        }
        points_checked += 1;
    }
    if points_checked == 0 {
        return Err(HiddenError::EmptyGrid);
    }
    Ok(NoSignalingCertificate {
        holds: max_deviation < NO_SIGNALING_TOLERANCE,
        max_deviation,
        points_checked,
    })
}

/// L's marginal over every (φ, ϕ) grid point, for L and R detected at
/// stages (1, 1) and (1, 3).
pub fn no_signaling_certificate(
    phi1_grid: &[Angle],
    phi3_grid: &[Angle],
) -> Result<NoSignalingCertificate, HiddenError> {
    if phi1_grid.is_empty() || phi3_grid.is_empty() {
        return Err(HiddenError::EmptyGrid);
    }
    let states: Vec<JointState> = phi1_grid
        .par_iter()
        .flat_map_iter(|&phi1| {
            phi3_grid.iter().flat_map(move |&phi3| {
                [Stage::One, Stage::Three].map(|r| run_scenario(&Scenario::new(phi1, phi3, Stage::One, r)))
            })
        })
        .collect();
    certify_states(&states)
}
