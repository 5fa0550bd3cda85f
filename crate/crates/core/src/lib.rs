//! Simulation of a three-stage path-entangled two-photon interferometer.
//!
//! A source emits `2^{-1/2}(|a⟩|a′⟩ + |b⟩|b′⟩)`. Each photon passes a
//! beam splitter (stage 1), a restore splitter undoing it (stage 2) and a
//! second beam splitter (stage 3); R's `b′` arm carries a phase φ before
//! stage 1 and ϕ before stage 3. Either photon can be detected after stage
//! 1 or stage 3.
//!
//! - [`state`]: two-photon amplitude tables, Born-rule probabilities.
//! - [`optics`]: splitters, phase shifters, per-photon stage pipelines.
//! - [`scenario`]: whole experiments, correlations, CHSH, seeded sampling.
//! - [`relativity`]: 1+1D boosts and the frames ordering the crossings.
//! - [`hidden`]: deterministic outcome models, local CHSH bound, the
//!   frame-ambiguity check and the no-signaling certificate.
//! - [`dsl`]: the `.exp` experiment description language.

pub mod angle;
pub mod dsl;
pub mod hidden;
pub mod optics;
pub mod relativity;
pub mod scenario;
pub mod state;

pub use angle::Angle;
pub use scenario::{Scenario, Stage};
pub use state::{JointState, Letter, Mode, Side};
