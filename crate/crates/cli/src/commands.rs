use std::fs;
use std::io;
use std::path::Path;

use pathsim_core::dsl::{compile, parse, CompiledExperiment, ExperimentAst, SourceText};
use pathsim_core::hidden::{ambiguity_check, available_remote_phases, no_signaling_certificate};
use pathsim_core::relativity::{find_frames, interval_class, ordering, ApparatusGeometry, BoostFrame, L_AT_BS1};
use pathsim_core::scenario::{chsh, run_scenario, sample_events, sweep};
use pathsim_core::{Angle, Scenario};

use crate::record::*;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad input file contents or flags. Exit code 2.
    #[error("{0}")]
    Input(String),
    /// File system trouble. Exit code 3.
    #[error("{0}")]
    Environment(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Environment(_) => 3,
        }
    }
}

/// A parsed and compiled `.exp` file.
pub struct Experiment {
    pub path: String,
    pub ast: ExperimentAst,
    pub compiled: CompiledExperiment,
}

pub fn load(path: &Path) -> Result<Experiment, CliError> {
    let display = path.display().to_string();
    let bytes = fs::read(path).map_err(|e| CliError::Environment(format!("cannot read {display}: {e}")))?;
    let text = String::from_utf8(bytes).map_err(|_| CliError::Input(format!("{display}: not valid UTF-8")))?;
    let ast = parse(&SourceText::new(display.clone(), text))
        .map_err(|errors| CliError::Input(errors.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("\n")))?;
    let compiled = compile(&ast).map_err(|e| CliError::Input(format!("{display}: {e}")))?;
    Ok(Experiment {
        path: display,
        ast,
        compiled,
    })
}

pub fn probability_table(s: &Scenario) -> ProbabilityTable {
    let state = run_scenario(s);
    let canonical = state.canonical();
    let probabilities = state.joint_probabilities();
    let rows = state
        .amplitudes()
        .map(|((l, r), a)| {
            let c = canonical.amplitude(l, r);
            ProbabilityRow {
                l,
                r,
                probability: unsigned_zero(probabilities.get(&(l, r))),
                re: unsigned_zero(a.re),
                im: unsigned_zero(a.im),
                canonical_re: unsigned_zero(c.re),
                canonical_im: unsigned_zero(c.im),
            }
        })
        .collect();
    ProbabilityTable { scenario: *s, rows }
}

pub fn correlation_table(exp: &Experiment) -> Result<CorrelationTable, CliError> {
    let spec = exp
        .compiled
        .run
        .sweep
        .as_ref()
        .ok_or_else(|| CliError::Input(format!("{}: no `sweep` statement", exp.path)))?;
    let table = sweep(spec.axis, &spec.grid, &exp.compiled.scenario).map_err(|e| CliError::Input(e.to_string()))?;
    Ok(CorrelationTable {
        axis: spec.axis.name(),
        rows: table
            .rows
            .iter()
            .map(|r| CorrelationRow {
                phi1: unsigned_zero(r.phi1.to_radians()),
                phi3: unsigned_zero(r.phi3.to_radians()),
                e: unsigned_zero(r.e),
            })
            .collect(),
    })
}

/// Seed and sample count come from the flags if given, else from the file;
/// both must be present somewhere.
pub fn detection_rows(
    exp: &Experiment,
    seed: Option<u64>,
    samples: Option<u64>,
) -> Result<(u64, Vec<DetectionRow>), CliError> {
    let seed = seed.or(exp.ast.seed).ok_or_else(|| {
        CliError::Input(format!(
            "{}: sampling needs a seed (`seed` statement or --seed)",
            exp.path
        ))
    })?;
    let n = samples.or(exp.ast.samples).ok_or_else(|| {
        CliError::Input(format!(
            "{}: sampling needs a count (`samples` statement or --samples)",
            exp.path
        ))
    })?;
    let n = usize::try_from(n).map_err(|_| CliError::Input(format!("sample count {n} is too large")))?;
    let s = &exp.compiled.scenario;
    let probabilities = run_scenario(s).joint_probabilities();
    let records = sample_events(s, n, seed).map_err(|e| CliError::Input(e.to_string()))?;
    Ok((
        seed,
        records
            .into_iter()
            .map(|r| DetectionRow {
                outcome_l: r.outcome_l,
                outcome_r: r.outcome_r,
                count: r.count,
                probability: unsigned_zero(probabilities.get(&(r.outcome_l, r.outcome_r))),
            })
            .collect(),
    ))
}

pub fn chsh_result(a: Angle, a2: Angle, b: Angle, b2: Angle) -> ChshResult {
    ChshResult {
        a,
        a2,
        b,
        b2,
        s: unsigned_zero(chsh(a, a2, b, b2)),
        local_bound: 2.0,
    }
}

pub fn frame_report(scenario: &Scenario, g: &ApparatusGeometry) -> Result<FrameReport, CliError> {
    let input = |e: &dyn std::fmt::Display| CliError::Input(e.to_string());
    let pair = find_frames(g).map_err(|e| input(&e))?;
    let l = g.require(L_AT_BS1).map_err(|e| input(&e))?;

    let events: Vec<EventRow> = g
        .events()
        .map(|e| EventRow {
            label: e.label.clone(),
            t: e.t,
            x: e.x,
        })
        .collect();
    let intervals = g
        .events()
        .filter(|e| e.label != L_AT_BS1)
        .map(|e| {
            let c = interval_class(l, e);
            IntervalRow {
                from: l.label.clone(),
                to: e.label.clone(),
                kind: c.kind,
                value: unsigned_zero(c.value),
            }
        })
        .collect();

    let named: [(&'static str, BoostFrame); 3] = [("lab", BoostFrame::LAB), ("I1", pair.i1), ("I2", pair.i2)];
    let mut frames = Vec::new();
    let mut rows = Vec::new();
    for (name, f) in named {
        frames.push(FrameInfo {
            name,
            velocity: unsigned_zero(f.velocity()),
            gamma: f.gamma(),
            available_phases: available_remote_phases(scenario, f, g).map_err(|e| input(&e))?,
        });
        for e in g.events() {
            let b = pathsim_core::relativity::boost(e, f);
            rows.push(OrderingRow {
                frame: name,
                velocity: unsigned_zero(f.velocity()),
                event: e.label.clone(),
                t: unsigned_zero(b.t),
                x: unsigned_zero(b.x),
                order: ordering(e, l, f),
            });
        }
    }
    Ok(FrameReport {
        events,
        intervals,
        frames,
        ordering: rows,
    })
}

pub fn ambiguity_result(exp: &Experiment, grid_points: usize) -> Result<AmbiguityResult, CliError> {
    let c = &exp.compiled;
    let input = |e: &dyn std::fmt::Display| CliError::Input(format!("{}: {e}", exp.path));
    let pair = find_frames(&c.geometry).map_err(|e| input(&e))?;
    let report =
        ambiguity_check(&c.model, &c.scenario, pair.i1, pair.i2, &c.geometry, c.lambda).map_err(|e| input(&e))?;
    let grid = Angle::grid(Angle::ZERO, Angle::pi_fraction(2, 1), grid_points);
    let no_signaling = no_signaling_certificate(&grid, &grid).map_err(|e| input(&e))?;
    Ok(AmbiguityResult {
        scenario: c.scenario,
        lambda: c.lambda.value(),
        report,
        no_signaling,
    })
}

pub fn write_output(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    use io::Write;
    match out {
        Some(path) => {
            fs::write(path, bytes).map_err(|e| CliError::Environment(format!("cannot write {}: {e}", path.display())))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout
                .write_all(bytes)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Environment(format!("cannot write to stdout: {e}")))
        }
    }
}
