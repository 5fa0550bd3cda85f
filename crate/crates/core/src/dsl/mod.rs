//! The `.exp` experiment description language: parse, print, compile.

mod ast;
mod compile;
mod parser;

pub use ast::{print_canonical, ExperimentAst, GeometryEvent, ModelStmt, SourceText, Statement, SweepStmt};
pub use compile::{compile, CompileError, CompiledExperiment, RunParameters, SweepSpec, DEFAULT_GEOMETRY};
pub use parser::{parse, ParseError, MODEL_PARAMS};
