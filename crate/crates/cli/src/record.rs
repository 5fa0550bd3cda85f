//! Output records. Every JSON line is one [`OutputRecord`]; CSV output
//! flattens the same data into one row type per result kind.

use pathsim_core::hidden::{AmbiguityReport, NoSignalingCertificate, RemotePhase};
use pathsim_core::relativity::{IntervalKind, TimeOrder};
use pathsim_core::{Angle, Mode, Scenario};
use serde::Serialize;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Serialize)]
pub struct OutputRecord {
    /// Input file as given on the command line, if any.
    pub input: Option<String>,
    pub seed: u64,
    pub version: &'static str,
    #[serde(flatten)]
    pub result: Payload,
}

#[derive(Debug, Clone, Serialize)]
#[serde(tag = "kind", content = "result", rename_all = "snake_case")]
pub enum Payload {
    Probabilities(ProbabilityTable),
    Correlations(CorrelationTable),
    Detection(DetectionRow),
    Chsh(ChshResult),
    Frames(FrameReport),
    Ambiguity(AmbiguityResult),
}

/// Raw amplitudes follow the pipeline's own global phase; the canonical
/// ones are rotated so the first non-zero amplitude is real and positive.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbabilityRow {
    pub l: Mode,
    pub r: Mode,
    pub probability: f64,
    pub re: f64,
    pub im: f64,
    pub canonical_re: f64,
    pub canonical_im: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProbabilityTable {
    pub scenario: Scenario,
    pub rows: Vec<ProbabilityRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub phi1: f64,
    pub phi3: f64,
    #[serde(rename = "E")]
    pub e: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationTable {
    pub axis: &'static str,
    pub rows: Vec<CorrelationRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DetectionRow {
    pub outcome_l: Mode,
    pub outcome_r: Mode,
    pub count: u64,
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChshResult {
    pub a: Angle,
    pub a2: Angle,
    pub b: Angle,
    pub b2: Angle,
    #[serde(rename = "S")]
    pub s: f64,
    pub local_bound: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct EventRow {
    pub label: String,
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct IntervalRow {
    pub from: String,
    pub to: String,
    pub kind: IntervalKind,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameInfo {
    pub name: &'static str,
    pub velocity: f64,
    pub gamma: f64,
    pub available_phases: Vec<RemotePhase>,
}

/// When `event` happens relative to `L@BS1` in a frame.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingRow {
    pub frame: &'static str,
    pub velocity: f64,
    pub event: String,
    pub t: f64,
    pub x: f64,
    pub order: TimeOrder,
}

#[derive(Debug, Clone, Serialize)]
pub struct FrameReport {
    pub events: Vec<EventRow>,
    pub intervals: Vec<IntervalRow>,
    pub frames: Vec<FrameInfo>,
    pub ordering: Vec<OrderingRow>,
}

#[derive(Debug, Clone, Serialize)]
pub struct AmbiguityResult {
    pub scenario: Scenario,
    pub lambda: f64,
    pub report: AmbiguityReport,
    pub no_signaling: NoSignalingCertificate,
}

/// Replaces `-0.0` so CSV and JSON never print a signed zero.
pub fn unsigned_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}
