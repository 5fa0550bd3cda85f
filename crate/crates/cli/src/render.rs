use std::fmt::Write as _;

use clap::ValueEnum;
use serde::Serialize;

use crate::commands::CliError;
use crate::record::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Csv,
    Json,
}

/// Renders records in `format`. Several records only arise from sampling,
/// where JSON gives one line per record.
pub fn render(records: &[OutputRecord], format: Format, color: bool) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => {
            let mut out = Vec::new();
            for r in records {
                serde_json::to_writer(&mut out, r).map_err(|e| CliError::Environment(e.to_string()))?;
                out.push(b'\n');
            }
            Ok(out)
        }
        Format::Csv => render_csv(records),
        Format::Table => Ok(render_table(records, color).into_bytes()),
    }
}

#[derive(Serialize)]
struct AmbiguityCsvRow<'a> {
    model: &'a str,
    lambda: f64,
    frame1_velocity: f64,
    frame2_velocity: f64,
    frame1_phases: String,
    frame2_phases: String,
    outcome1: i32,
    outcome2: i32,
    ambiguous: bool,
    no_signaling_holds: bool,
    max_marginal_deviation: f64,
    points_checked: usize,
}

fn phase_list(phases: &[pathsim_core::hidden::RemotePhase]) -> String {
    phases.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
}

fn render_csv(records: &[OutputRecord]) -> Result<Vec<u8>, CliError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let err = |e: csv::Error| CliError::Environment(e.to_string());
    for r in records {
        match &r.result {
            Payload::Probabilities(t) => t.rows.iter().try_for_each(|row| w.serialize(row)).map_err(err)?,
            Payload::Correlations(t) => t.rows.iter().try_for_each(|row| w.serialize(row)).map_err(err)?,
            Payload::Detection(row) => w.serialize(row).map_err(err)?,
            Payload::Chsh(c) => w.serialize(c).map_err(err)?,
            Payload::Frames(f) => f.ordering.iter().try_for_each(|row| w.serialize(row)).map_err(err)?,
            Payload::Ambiguity(a) => w
                .serialize(AmbiguityCsvRow {
                    model: &a.report.model,
                    lambda: a.lambda,
                    frame1_velocity: unsigned_zero(a.report.frame1.velocity()),
                    frame2_velocity: unsigned_zero(a.report.frame2.velocity()),
                    frame1_phases: phase_list(&a.report.frame1_phases),
                    frame2_phases: phase_list(&a.report.frame2_phases),
                    outcome1: a.report.outcome1.value(),
                    outcome2: a.report.outcome2.value(),
                    ambiguous: a.report.ambiguous,
                    no_signaling_holds: a.no_signaling.holds,
                    max_marginal_deviation: a.no_signaling.max_deviation,
                    points_checked: a.no_signaling.points_checked,
                })
                .map_err(err)?,
        }
    }
    w.into_inner().map_err(|e| CliError::Environment(e.to_string()))
}

struct Table {
    header: Vec<String>,
    rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    fn write(&self, out: &mut String, color: bool) {
        let widths: Vec<usize> = (0..self.header.len())
            .map(|i| {
                self.rows
                    .iter()
                    .map(|r| r[i].chars().count())
                    .chain([self.header[i].chars().count()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |cells: &[String]| {
            cells
                .iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:<w$}"))
                .collect::<Vec<_>>()
                .join("  ")
                .trim_end()
                .to_string()
        };
        let head = line(&self.header);
        if color {
            let _ = writeln!(out, "\x1b[1m{head}\x1b[0m");
        } else {
            let _ = writeln!(out, "{head}");
        }
        for r in &self.rows {
            let _ = writeln!(out, "{}", line(r));
        }
    }
}

fn amp(re: f64, im: f64) -> String {
    format!("{re:+.6}{im:+.6}i")
}

fn render_table(records: &[OutputRecord], color: bool) -> String {
    let mut out = String::new();
    let mut detections = Table::new(&["L", "R", "count", "frequency", "probability"]);
    let total: u64 = records
        .iter()
        .filter_map(|r| match &r.result {
            Payload::Detection(d) => Some(d.count),
            _ => None,
        })
        .sum();
    for r in records {
        match &r.result {
            Payload::Probabilities(t) => {
                let s = &t.scenario;
                let _ = writeln!(
                    out,
                    "phi1 = {}, phi3 = {}, L detected at stage {}, R at stage {}",
                    s.phi1, s.phi3, s.detect_l, s.detect_r
                );
                let mut table = Table::new(&["L", "R", "probability", "amplitude"]);
                for row in &t.rows {
                    table.push(vec![
                        row.l.to_string(),
                        row.r.to_string(),
                        format!("{:.6}", row.probability),
                        amp(row.canonical_re, row.canonical_im),
                    ]);
                }
                table.write(&mut out, color);
            }
            Payload::Correlations(t) => {
                let mut table = Table::new(&["phi1", "phi3", "E"]);
                for row in &t.rows {
                    table.push(vec![
                        format!("{:.6}", row.phi1),
                        format!("{:.6}", row.phi3),
                        format!("{:+.6}", row.e),
                    ]);
                }
                table.write(&mut out, color);
            }
            Payload::Detection(d) => detections.push(vec![
                d.outcome_l.to_string(),
                d.outcome_r.to_string(),
                d.count.to_string(),
                format!("{:.6}", d.count as f64 / total.max(1) as f64),
                format!("{:.6}", d.probability),
            ]),
            Payload::Chsh(c) => {
                let _ = writeln!(out, "settings: a = {}, a' = {}, b = {}, b' = {}", c.a, c.a2, c.b, c.b2);
                let _ = writeln!(out, "S           = {:+.12}", c.s);
                let _ = writeln!(out, "local bound = {}", c.local_bound);
                let _ = writeln!(out, "|S| - 2     = {:+.12}", c.s.abs() - c.local_bound);
            }
            Payload::Frames(f) => {
                let mut ev = Table::new(&["event", "t", "x"]);
                for e in &f.events {
                    ev.push(vec![e.label.clone(), e.t.to_string(), e.x.to_string()]);
                }
                ev.write(&mut out, color);
                out.push('\n');
                let mut iv = Table::new(&["from", "to", "interval", "dt^2 - dx^2"]);
                for i in &f.intervals {
                    iv.push(vec![
                        i.from.clone(),
                        i.to.clone(),
                        i.kind.to_string(),
                        i.value.to_string(),
                    ]);
                }
                iv.write(&mut out, color);
                out.push('\n');
                let mut fr = Table::new(&["frame", "v", "gamma", "phases passed by R"]);
                for info in &f.frames {
                    let phases: Vec<String> = info.available_phases.iter().map(|p| p.to_string()).collect();
                    fr.push(vec![
                        info.name.to_string(),
                        format!("{:.6}", info.velocity),
                        format!("{:.6}", info.gamma),
                        format!("{{{}}}", phases.join(", ")),
                    ]);
                }
                fr.write(&mut out, color);
                out.push('\n');
                let mut ord = Table::new(&["frame", "event", "t'", "x'", "vs L@BS1"]);
                for o in &f.ordering {
                    ord.push(vec![
                        o.frame.to_string(),
                        o.event.clone(),
                        format!("{:.6}", o.t),
                        format!("{:.6}", o.x),
                        o.order.to_string(),
                    ]);
                }
                ord.write(&mut out, color);
            }
            Payload::Ambiguity(a) => {
                let rep = &a.report;
                let s = &a.scenario;
                let _ = writeln!(out, "model: {}", rep.model);
                let _ = writeln!(
                    out,
                    "scenario: phi1 = {}, phi3 = {}, stages ({}, {}), lambda = {}",
                    s.phi1, s.phi3, s.detect_l, s.detect_r, a.lambda
                );
                let mut t = Table::new(&["frame", "v", "phases passed by R", "L outcome"]);
                for (name, f, phases, o) in [
                    ("I1", rep.frame1, &rep.frame1_phases, rep.outcome1),
                    ("I2", rep.frame2, &rep.frame2_phases, rep.outcome2),
                ] {
                    t.push(vec![
                        name.to_string(),
                        format!("{:.6}", f.velocity()),
                        format!("{{{}}}", phase_list(phases).replace(' ', ", ")),
                        format!("{:+}", o.value()),
                    ]);
                }
                t.write(&mut out, color);
                let _ = writeln!(out, "ambiguous: {}", rep.ambiguous);
                let ns = &a.no_signaling;
                let _ = writeln!(
                    out,
                    "no-signaling: {} (max |P_L - 1/2| = {:.3e} over {} states)",
                    if ns.holds { "holds" } else { "VIOLATED" },
                    ns.max_deviation,
                    ns.points_checked
                );
            }
        }
    }
    if !detections.rows.is_empty() {
        let _ = writeln!(out, "{total} samples");
        detections.write(&mut out, color);
    }
    out
}
