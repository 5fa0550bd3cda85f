use crate::angle::Angle;
use crate::hidden::{HiddenVariable, OutcomeModel};
use crate::relativity::{ApparatusGeometry, RelativityError, SpacetimeEvent, R_AT_BS3};
use crate::scenario::{Scenario, Stage, SweepAxis};

use super::ast::ExperimentAst;

pub const DEFAULT_GEOMETRY: &str = "paper-default";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CompileError {
    #[error("R is detected at stage 3 but the geometry has no `{R_AT_BS3}` event")]
    MissingStage3Event,
    #[error("invalid geometry: {0}")]
    Geometry(#[from] RelativityError),
    #[error("unknown geometry preset `{0}`")]
    UnknownPreset(String),
    #[error("unknown model `{0}`")]
    UnknownModel(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    pub grid: Vec<Angle>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunParameters {
    pub sweep: Option<SweepSpec>,
    /// 0 means analytic only.
    pub samples: u64,
    pub seed: u64,
}

/// Engine inputs produced from an [`ExperimentAst`].
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledExperiment {
    pub scenario: Scenario,
    pub geometry: ApparatusGeometry,
    pub model: OutcomeModel,
    pub lambda: HiddenVariable,
    pub run: RunParameters,
}

/// Applies defaults (φ = ϕ = 0, both photons at stage 1, `paper-default`
/// geometry, `sum-threshold` model with λ = 0, no samples, seed 0).
///
/// Geometry: with no geometry statements the default preset is used. A
/// `geometry preset` line starts from that preset; explicit events are
/// added on top, replacing same-labelled preset events. Explicit events
/// without a preset form the whole geometry. λ is reduced into [0, 2π).
pub fn compile(ast: &ExperimentAst) -> Result<CompiledExperiment, CompileError> {
    let scenario = Scenario::new(
        ast.phi1.unwrap_or(Angle::ZERO),
        ast.phi3.unwrap_or(Angle::ZERO),
        ast.detect_l.unwrap_or(Stage::One),
        ast.detect_r.unwrap_or(Stage::One),
    );

    let mut events: Vec<SpacetimeEvent> = match (&ast.geometry_preset, ast.geometry.is_empty()) {
        (Some(name), _) => preset_events(name)?,
        (None, true) => preset_events(DEFAULT_GEOMETRY)?,
        (None, false) => Vec::new(),
    };
    for g in &ast.geometry {
        events.retain(|e| e.label != g.label);
        events.push(SpacetimeEvent::new(g.label.clone(), g.t, g.x)?);
    }
    let geometry = ApparatusGeometry::new(events)?;
    if scenario.detect_r == Stage::Three && geometry.event(R_AT_BS3).is_none() {
        return Err(CompileError::MissingStage3Event);
    }

    let (model, lambda) = match &ast.model {
        None => (OutcomeModel::SumThreshold, Angle::ZERO),
        Some(m) => {
            let param = |key: &str, default: Angle| {
                m.params
                    .iter()
                    .find(|(k, _)| k == key)
                    .map(|&(_, v)| v)
                    .unwrap_or(default)
            };
            let model = match m.name.as_str() {
                "local" => OutcomeModel::Local,
                "sum-threshold" => OutcomeModel::SumThreshold,
                "weighted" => OutcomeModel::Weighted {
                    w1: param("w1", Angle::radians(1.0)).to_radians(),
                    w3: param("w3", Angle::radians(1.0)).to_radians(),
                },
                other => return Err(CompileError::UnknownModel(other.to_string())),
            };
            (model, param("lambda", Angle::ZERO))
        }
    };

    let sweep = ast.sweep.map(|s| SweepSpec {
        axis: s.axis,
        grid: Angle::grid(s.from, s.to, s.steps as usize),
    });

    Ok(CompiledExperiment {
        scenario,
        geometry,
        model,
        lambda: HiddenVariable::wrapped(lambda.to_radians()),
        run: RunParameters {
            sweep,
            samples: ast.samples.unwrap_or(0),
            seed: ast.seed.unwrap_or(0),
        },
    })
}

fn preset_events(name: &str) -> Result<Vec<SpacetimeEvent>, CompileError> {
    ApparatusGeometry::preset(name)
        .map(|g| g.events().cloned().collect())
        .ok_or_else(|| CompileError::UnknownPreset(name.to_string()))
}
