//! Beam splitters, restore beam splitters, phase shifters and per-photon
//! stage pipelines built from them.
//!
//! # Beam-splitter convention
//!
//! Every 50/50 splitter maps its two inputs as
//!
//! ```text
//! |in₁⟩ → 2^{-1/2}(|out₁⟩ + i|out₂⟩)
//! |in₂⟩ → 2^{-1/2}(i|out₁⟩ + |out₂⟩)
//! ```
//!
//! This is the symmetric convention under which the first-stage output is
//! `8^{-1/2}{(1 − e^{iφ})(|c⟩|c′⟩ − |d⟩|d′⟩) + i(1 + e^{iφ})(|d⟩|c′⟩ + |c⟩|d′⟩)}`.
//! The variant with `|a⟩ → 2^{-1/2}(|c⟩ + |d⟩)` is not unitary and is not
//! offered. The restore splitter maps `|c⟩ → 2^{-1/2}(|b⟩ + i|a⟩)`,
//! `|d⟩ → 2^{-1/2}(i|b⟩ + |a⟩)` and undoes the first-stage splitter up to a
//! global factor `i`.
//!
//! Mirrors only relabel paths and carry no phase, so they do not appear here.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;

use crate::angle::Angle;
use crate::state::{JointState, Layer, Letter, Matrix2, Mode, ModeMatrix, Side, StateError};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OpticsError {
    #[error("element {index} expects layer {expected} but receives {found}")]
    IncompatibleLayers {
        index: usize,
        expected: Layer,
        found: Layer,
    },
    #[error("element {index} acts on side {found}, pipeline is for side {expected}")]
    SideMismatch { index: usize, expected: Side, found: Side },
    #[error("beam splitter input and output layer are both {0}")]
    DegenerateSplitter(Layer),
    #[error("pipeline is empty")]
    EmptyPipeline,
    #[error(transparent)]
    State(#[from] StateError),
}

/// `[[1, i], [i, 1]] / √2` with columns indexed by input, rows by output.
pub fn beam_splitter_matrix() -> Matrix2 {
    let h = FRAC_1_SQRT_2;
    [
        [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
        [Complex64::new(0.0, h), Complex64::new(h, 0.0)],
    ]
}

/// `[[i, 1], [1, i]] / √2`, inputs (c, d), outputs (a, b).
pub fn restore_matrix() -> Matrix2 {
    let h = FRAC_1_SQRT_2;
    [
        [Complex64::new(0.0, h), Complex64::new(h, 0.0)],
        [Complex64::new(h, 0.0), Complex64::new(0.0, h)],
    ]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OpticalElement {
    PhaseShift {
        mode: Mode,
        angle: Angle,
    },
    BeamSplitter {
        side: Side,
        input: Layer,
        output: Layer,
    },
    /// Inverse splitter of the restore stage, `{c,d} → {a,b}`.
    Restore {
        side: Side,
    },
}

impl OpticalElement {
    pub fn beam_splitter(side: Side, input: Layer, output: Layer) -> Result<Self, OpticsError> {
        if input == output {
            return Err(OpticsError::DegenerateSplitter(input));
        }
        Ok(OpticalElement::BeamSplitter { side, input, output })
    }

    pub fn side(&self) -> Side {
        match *self {
            OpticalElement::PhaseShift { mode, .. } => mode.side,
            OpticalElement::BeamSplitter { side, .. } | OpticalElement::Restore { side } => side,
        }
    }

    pub fn input_layer(&self) -> Layer {
        match *self {
            OpticalElement::PhaseShift { mode, .. } => mode.layer(),
            OpticalElement::BeamSplitter { input, .. } => input,
            OpticalElement::Restore { .. } => Layer::Stage1,
        }
    }

    pub fn output_layer(&self) -> Layer {
        match *self {
            OpticalElement::PhaseShift { mode, .. } => mode.layer(),
            OpticalElement::BeamSplitter { output, .. } => output,
            OpticalElement::Restore { .. } => Layer::Source,
        }
    }

    pub fn apply(&self, state: &JointState) -> Result<JointState, StateError> {
        match *self {
            OpticalElement::PhaseShift { mode, angle } => state.apply_phase(mode, angle),
            OpticalElement::BeamSplitter { side, input, output } => {
                state.apply_single_side_unitary(side, &ModeMatrix::new(input, output, beam_splitter_matrix()))
            }
            OpticalElement::Restore { side } => {
                state.apply_single_side_unitary(side, &ModeMatrix::new(Layer::Stage1, Layer::Source, restore_matrix()))
            }
        }
    }
}

impl fmt::Display for OpticalElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpticalElement::PhaseShift { mode, angle } => write!(f, "phase({mode}, {angle})"),
            OpticalElement::BeamSplitter { side, input, output } => write!(f, "bs[{side}]({input}→{output})"),
            OpticalElement::Restore { side } => write!(f, "restore[{side}]"),
        }
    }
}

/// Ordered elements acting on one photon; layer-compatible by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct StagePipeline {
    side: Side,
    elements: Vec<OpticalElement>,
}

impl StagePipeline {
    pub fn new(side: Side, elements: Vec<OpticalElement>) -> Result<Self, OpticsError> {
        let first = elements.first().ok_or(OpticsError::EmptyPipeline)?;
        let mut layer = first.input_layer();
        for (index, el) in elements.iter().enumerate() {
            if el.side() != side {
                return Err(OpticsError::SideMismatch {
                    index,
                    expected: side,
                    found: el.side(),
                });
            }
            if el.input_layer() != layer {
                return Err(OpticsError::IncompatibleLayers {
                    index,
                    expected: el.input_layer(),
                    found: layer,
                });
            }
            layer = el.output_layer();
        }
        Ok(StagePipeline { side, elements })
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn elements(&self) -> &[OpticalElement] {
        &self.elements
    }

    pub fn input_layer(&self) -> Layer {
        self.elements[0].input_layer()
    }

    pub fn output_layer(&self) -> Layer {
        self.elements[self.elements.len() - 1].output_layer()
    }

    /// Appends `next`, which must start where `self` ends.
    pub fn then(&self, next: &StagePipeline) -> Result<StagePipeline, OpticsError> {
        let mut elements = self.elements.clone();
        elements.extend_from_slice(&next.elements);
        StagePipeline::new(self.side, elements)
    }

    pub fn apply(&self, state: &JointState) -> Result<JointState, OpticsError> {
        let mut current = state.clone();
        for el in &self.elements {
            current = el.apply(&current)?;
        }
        Ok(current)
    }
}

fn splitter_pair(phase: Angle, output: Layer) -> (StagePipeline, StagePipeline) {
    let bs = |side| OpticalElement::BeamSplitter {
        side,
        input: Layer::Source,
        output,
    };
    let left = StagePipeline::new(Side::L, vec![bs(Side::L)]).expect("valid stage");
    let right = StagePipeline::new(
        Side::R,
        vec![
            OpticalElement::PhaseShift {
                mode: Mode::r(Letter::B),
                angle: phase,
            },
            bs(Side::R),
        ],
    )
    .expect("valid stage");
    (left, right)
}

/// First stage: L `[BS(a,b→c,d)]`, R `[phase(b′, φ), BS(a′,b′→c′,d′)]`.
pub fn stage1_pipeline(phi: Angle) -> (StagePipeline, StagePipeline) {
    splitter_pair(phi, Layer::Stage1)
}

/// Restore stage for one photon, `{c,d} → {a,b}`.
pub fn restore_pipeline(side: Side) -> StagePipeline {
    StagePipeline::new(side, vec![OpticalElement::Restore { side }]).expect("valid stage")
}

/// Third stage: L `[BS(a,b→e,f)]`, R `[phase(b′, ϕ), BS(a′,b′→e′,f′)]`.
pub fn stage3_pipeline(phi3: Angle) -> (StagePipeline, StagePipeline) {
    splitter_pair(phi3, Layer::Stage3)
}
