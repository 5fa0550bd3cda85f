//! Line-oriented `.exp` parser.
//!
//! ```text
//! # comment
//! phase phi1 = pi/2          # φ, before the stage-1 splitter
//! phase phi3 = -pi/4         # ϕ, before the stage-3 splitter
//! detect L 1                 # stage 1 or 3
//! detect R 3
//! geometry preset paper-default
//! geometry R@BS3' 5 10       # label t x
//! model sum-threshold lambda=0
//! sweep phi1 0 2pi 360       # axis from to steps (upper end excluded)
//! seed 42
//! samples 100000
//! ```
//!
//! Every line is checked; all errors are returned together.

use std::collections::HashSet;
use std::fmt;

use crate::angle::Angle;
use crate::relativity::ApparatusGeometry;
use crate::scenario::{Stage, SweepAxis};
use crate::state::Side;

use super::ast::{ExperimentAst, GeometryEvent, ModelStmt, SourceText, SweepStmt};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub origin: String,
    /// 1-based line.
    pub line: usize,
    /// 1-based column, in characters.
    pub column: usize,
    pub message: String,
    pub token: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}:{}:{}: {} (at `{}`)",
            self.origin, self.line, self.column, self.message, self.token
        )
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, Copy)]
struct Token<'a> {
    column: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in code.char_indices().enumerate() {
        if ch.is_whitespace() {
            if let Some((c, b)) = start.take() {
                tokens.push(Token {
                    column: c + 1,
                    text: &code[b..byte],
                });
            }
        } else if start.is_none() {
            start = Some((col, byte));
        }
    }
    if let Some((c, b)) = start {
        tokens.push(Token {
            column: c + 1,
            text: &code[b..],
        });
    }
    tokens
}

/// Known model names and the parameters each accepts.
pub const MODEL_PARAMS: &[(&str, &[&str])] = &[
    ("local", &["lambda"]),
    ("sum-threshold", &["lambda"]),
    ("weighted", &["w1", "w3", "lambda"]),
];

struct LineParser<'a, 'e> {
    origin: &'a str,
    line: usize,
    tokens: Vec<Token<'a>>,
    errors: &'e mut Vec<ParseError>,
}

impl<'a> LineParser<'a, '_> {
    fn error(&mut self, tok: Token<'_>, message: impl Into<String>) {
        self.errors.push(ParseError {
            origin: self.origin.to_string(),
            line: self.line,
            column: tok.column,
            message: message.into(),
            token: tok.text.to_string(),
        });
    }

    /// Checks the line has at least `count` tokens; otherwise reports the
    /// usage at the last token.
    fn need(&mut self, count: usize, usage: &str) -> bool {
        if self.tokens.len() >= count {
            return true;
        }
        let last = *self.tokens.last().expect("line has a keyword");
        self.error(last, format!("missing arguments, expected `{usage}`"));
        false
    }

    fn expect_end(&mut self, n: usize) -> bool {
        if let Some(&extra) = self.tokens.get(n) {
            self.error(extra, "unexpected token");
            return false;
        }
        true
    }

    fn angle(&mut self, tok: Token<'_>) -> Option<Angle> {
        match tok.text.parse::<Angle>() {
            Ok(a) => Some(a),
            Err(e) => {
                self.error(tok, format!("malformed number: {}", e.reason));
                None
            }
        }
    }

    fn real(&mut self, tok: Token<'_>) -> Option<f64> {
        let ok = tok
            .text
            .chars()
            .all(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
        match tok.text.parse::<f64>() {
            Ok(v) if ok && v.is_finite() => Some(v),
            _ => {
                self.error(tok, "malformed number: expected a finite decimal");
                None
            }
        }
    }

    fn integer(&mut self, tok: Token<'_>) -> Option<u64> {
        match tok.text.parse::<u64>() {
            Ok(v) if tok.text.chars().all(|c| c.is_ascii_digit()) => Some(v),
            _ => {
                self.error(tok, "malformed number: expected a non-negative integer");
                None
            }
        }
    }

    fn axis(&mut self, tok: Token<'_>) -> Option<SweepAxis> {
        match tok.text {
            "phi1" => Some(SweepAxis::Phi1),
            "phi3" => Some(SweepAxis::Phi3),
            _ => {
                self.error(tok, "phase name must be phi1 or phi3");
                None
            }
        }
    }
}

fn duplicate(p: &mut LineParser<'_, '_>, tok: Token<'_>, what: &str) {
    p.error(tok, format!("duplicate {what}"));
}

/// Parses `.exp` source into an AST, or returns every error found.
pub fn parse(src: &SourceText) -> Result<ExperimentAst, Vec<ParseError>> {
    let mut ast = ExperimentAst::default();
    let mut errors = Vec::new();
    let mut labels = HashSet::new();

    for (idx, raw) in src.text.split('\n').enumerate() {
        let tokens = tokenize(raw);
        if tokens.is_empty() {
            continue;
        }
        let mut p = LineParser {
            origin: &src.origin,
            line: idx + 1,
            tokens,
            errors: &mut errors,
        };
        let kw = p.tokens[0];
        match kw.text {
            "phase" => {
                if !p.need(4, "phase <phi1|phi3> = <angle>") {
                    continue;
                }
                let (name, eq, value) = (p.tokens[1], p.tokens[2], p.tokens[3]);
                let axis = p.axis(name);
                if eq.text != "=" {
                    p.error(eq, "expected `=`");
                    continue;
                }
                let angle = p.angle(value);
                if !p.expect_end(4) {
                    continue;
                }
                if let (Some(axis), Some(angle)) = (axis, angle) {
                    let slot = match axis {
                        SweepAxis::Phi1 => &mut ast.phi1,
                        SweepAxis::Phi3 => &mut ast.phi3,
                    };
                    if slot.is_some() {
                        duplicate(&mut p, name, &format!("assignment to {}", axis.name()));
                    } else {
                        *slot = Some(angle);
                    }
                }
            }
            "detect" => {
                if !p.need(3, "detect <L|R> <1|3>") {
                    continue;
                }
                let (side_tok, stage_tok) = (p.tokens[1], p.tokens[2]);
                let side = match side_tok.text {
                    "L" => Some(Side::L),
                    "R" => Some(Side::R),
                    _ => {
                        p.error(side_tok, "side must be L or R");
                        None
                    }
                };
                let stage = match stage_tok.text.parse::<u64>().ok() {
                    Some(n) => match Stage::from_number(n) {
                        Some(s) => Some(s),
                        None => {
                            p.error(stage_tok, "stage must be 1 or 3");
                            None
                        }
                    },
                    None => {
                        p.error(stage_tok, "malformed number: stage must be 1 or 3");
                        None
                    }
                };
                if !p.expect_end(3) {
                    continue;
                }
                if let (Some(side), Some(stage)) = (side, stage) {
                    let slot = match side {
                        Side::L => &mut ast.detect_l,
                        Side::R => &mut ast.detect_r,
                    };
                    if slot.is_some() {
                        duplicate(&mut p, side_tok, &format!("detect for side {side}"));
                    } else {
                        *slot = Some(stage);
                    }
                }
            }
            "geometry" => {
                if !p.need(2, "geometry <label> <t> <x>") {
                    continue;
                }
                let label = p.tokens[1];
                if label.text == "preset" {
                    if !p.need(3, "geometry preset <name>") {
                        continue;
                    }
                    let name = p.tokens[2];
                    if !p.expect_end(3) {
                        continue;
                    }
                    if ApparatusGeometry::preset(name.text).is_none() {
                        p.error(
                            name,
                            format!(
                                "unknown geometry preset (known: {})",
                                ApparatusGeometry::preset_names().join(", ")
                            ),
                        );
                    } else if ast.geometry_preset.is_some() {
                        duplicate(&mut p, label, "geometry preset");
                    } else {
                        ast.geometry_preset = Some(name.text.to_string());
                    }
                    continue;
                }
                if !p.need(4, "geometry <label> <t> <x>") {
                    continue;
                }
                let (t_tok, x_tok) = (p.tokens[2], p.tokens[3]);
                let t = p.real(t_tok);
                let x = p.real(x_tok);
                if !p.expect_end(4) {
                    continue;
                }
                if let (Some(t), Some(x)) = (t, x) {
                    if !labels.insert(label.text.to_string()) {
                        duplicate(&mut p, label, &format!("geometry event `{}`", label.text));
                    } else {
                        ast.geometry.push(GeometryEvent {
                            label: label.text.to_string(),
                            t,
                            x,
                        });
                    }
                }
            }
            "model" => {
                if !p.need(2, "model <name> [key=value ...]") {
                    continue;
                }
                let name = p.tokens[1];
                let allowed = MODEL_PARAMS.iter().find(|(n, _)| *n == name.text).map(|(_, ps)| *ps);
                if allowed.is_none() {
                    let known: Vec<_> = MODEL_PARAMS.iter().map(|(n, _)| *n).collect();
                    p.error(name, format!("unknown model (known: {})", known.join(", ")));
                }
                let mut params: Vec<(String, Angle)> = Vec::new();
                let mut ok = allowed.is_some();
                for i in 2..p.tokens.len() {
                    let tok = p.tokens[i];
                    let Some((key, value)) = tok.text.split_once('=') else {
                        p.error(tok, "expected key=value");
                        ok = false;
                        continue;
                    };
                    if let Some(allowed) = allowed {
                        if !allowed.contains(&key) {
                            p.error(tok, format!("model `{}` has no parameter `{key}`", name.text));
                            ok = false;
                            continue;
                        }
                    }
                    if params.iter().any(|(k, _)| k == key) {
                        duplicate(&mut p, tok, &format!("parameter `{key}`"));
                        ok = false;
                        continue;
                    }
                    match value.parse::<Angle>() {
                        Ok(v) => params.push((key.to_string(), v)),
                        Err(e) => {
                            p.error(tok, format!("malformed number: {}", e.reason));
                            ok = false;
                        }
                    }
                }
                if ok {
                    if ast.model.is_some() {
                        duplicate(&mut p, kw, "model statement");
                    } else {
                        ast.model = Some(ModelStmt {
                            name: name.text.to_string(),
                            params,
                        });
                    }
                }
            }
            "sweep" => {
                if !p.need(5, "sweep <phi1|phi3> <from> <to> <steps>") {
                    continue;
                }
                let (axis_tok, from_tok, to_tok, steps_tok) = (p.tokens[1], p.tokens[2], p.tokens[3], p.tokens[4]);
                let axis = p.axis(axis_tok);
                let from = p.angle(from_tok);
                let to = p.angle(to_tok);
                let steps = p.integer(steps_tok).and_then(|n| match u32::try_from(n) {
                    Ok(n) if n >= 1 => Some(n),
                    _ => {
                        p.error(steps_tok, "step count must be between 1 and 2^32-1");
                        None
                    }
                });
                if !p.expect_end(5) {
                    continue;
                }
                if let (Some(axis), Some(from), Some(to), Some(steps)) = (axis, from, to, steps) {
                    if ast.sweep.is_some() {
                        duplicate(&mut p, kw, "sweep statement");
                    } else {
                        ast.sweep = Some(SweepStmt { axis, from, to, steps });
                    }
                }
            }
            "seed" | "samples" => {
                if !p.need(2, &format!("{} <integer>", kw.text)) {
                    continue;
                }
                let tok = p.tokens[1];
                let value = p.integer(tok);
                if !p.expect_end(2) {
                    continue;
                }
                if let Some(v) = value {
                    let slot = if kw.text == "seed" {
                        &mut ast.seed
                    } else {
                        &mut ast.samples
                    };
                    if slot.is_some() {
                        duplicate(&mut p, kw, &format!("{} statement", kw.text));
                    } else {
                        *slot = Some(v);
                    }
                }
            }
            _ => p.error(
                kw,
                "unknown keyword (expected phase, detect, geometry, model, sweep, seed or samples)",
            ),
        }
    }

    if errors.is_empty() {
        Ok(ast)
    } else {
        Err(errors)
    }
}
