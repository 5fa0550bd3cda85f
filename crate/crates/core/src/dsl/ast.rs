use std::fmt::Write as _;

use crate::angle::Angle;
use crate::scenario::{Stage, SweepAxis};
use crate::state::Side;

/// Raw `.exp` text plus a name used in error messages.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceText {
    pub origin: String,
    pub text: String,
}

impl SourceText {
    pub fn new(origin: impl Into<String>, text: impl Into<String>) -> Self {
        SourceText {
            origin: origin.into(),
            text: text.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeometryEvent {
    pub label: String,
    pub t: f64,
    pub x: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModelStmt {
    pub name: String,
    /// `key=value` pairs in source order.
    pub params: Vec<(String, Angle)>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepStmt {
    pub axis: SweepAxis,
    pub from: Angle,
    pub to: Angle,
    pub steps: u32,
}

/// One `.exp` statement.
#[derive(Debug, Clone, PartialEq)]
pub enum Statement {
    SetPhase(SweepAxis, Angle),
    Detect(Side, Stage),
    GeometryPreset(String),
    Geometry(GeometryEvent),
    Model(ModelStmt),
    Sweep(SweepStmt),
    Seed(u64),
    Samples(u64),
}

/// A validated experiment description.
///
/// Each setting appears at most once, so the AST is a record of optional
/// fields rather than a statement list; [`ExperimentAst::statements`] gives
/// the canonical statement order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentAst {
    pub phi1: Option<Angle>,
    pub phi3: Option<Angle>,
    pub detect_l: Option<Stage>,
    pub detect_r: Option<Stage>,
    pub geometry_preset: Option<String>,
    pub geometry: Vec<GeometryEvent>,
    pub model: Option<ModelStmt>,
    pub sweep: Option<SweepStmt>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
}

impl ExperimentAst {
    pub fn statements(&self) -> Vec<Statement> {
        let mut out = Vec::new();
        if let Some(a) = self.phi1 {
            out.push(Statement::SetPhase(SweepAxis::Phi1, a));
        }
        if let Some(a) = self.phi3 {
            out.push(Statement::SetPhase(SweepAxis::Phi3, a));
        }
        if let Some(s) = self.detect_l {
            out.push(Statement::Detect(Side::L, s));
        }
        if let Some(s) = self.detect_r {
            out.push(Statement::Detect(Side::R, s));
        }
        if let Some(p) = &self.geometry_preset {
            out.push(Statement::GeometryPreset(p.clone()));
        }
        out.extend(self.geometry.iter().cloned().map(Statement::Geometry));
        if let Some(m) = &self.model {
            out.push(Statement::Model(m.clone()));
        }
        if let Some(s) = self.sweep {
            out.push(Statement::Sweep(s));
        }
        if let Some(s) = self.seed {
            out.push(Statement::Seed(s));
        }
        if let Some(n) = self.samples {
            out.push(Statement::Samples(n));
        }
        out
    }
}

/// Canonical `.exp` text: one statement per line in [`ExperimentAst::statements`]
/// order, single spaces, π-rationals symbolic, LF line endings.
pub fn print_canonical(ast: &ExperimentAst) -> String {
    let mut out = String::new();
    for stmt in ast.statements() {
        match stmt {
            Statement::SetPhase(axis, a) => writeln!(out, "phase {} = {a}", axis.name()),
            Statement::Detect(side, stage) => writeln!(out, "detect {side} {stage}"),
            Statement::GeometryPreset(p) => writeln!(out, "geometry preset {p}"),
            Statement::Geometry(g) => writeln!(out, "geometry {} {} {}", g.label, g.t, g.x),
            Statement::Model(m) => {
                let mut line = format!("model {}", m.name);
                for (k, v) in &m.params {
                    let _ = write!(line, " {k}={v}");
                }
                writeln!(out, "{line}")
            }
            Statement::Sweep(s) => writeln!(out, "sweep {} {} {} {}", s.axis.name(), s.from, s.to, s.steps),
            Statement::Seed(s) => writeln!(out, "seed {s}"),
            Statement::Samples(n) => writeln!(out, "samples {n}"),
        }
        .expect("writing to a String cannot fail");
    }
    out
}
