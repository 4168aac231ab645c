use thiserror::Error;

use crate::expr::{EvalError, ParseError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("invalid input: {0}")]
    Input(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("operation requires the weight B = y, got `{0}`")]
    RequiresTranslatingWeight(String),
    #[error("Riccati solution lost positivity at x = {x} (v = {v})")]
    PositivityLost { x: f64, v: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
