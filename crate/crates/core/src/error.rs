use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("model violates condition {0}")]
    ConditionViolated(&'static str),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid functions live on different grids")]
    GridMismatch,

    #[error("grid function holds an unreachable sentinel at node {node}")]
    SentinelPresent { node: usize },

    #[error("nodal fixed-point iteration did not contract: residual {residual:e} after {iterations} iterations")]
    NonContraction { iterations: usize, residual: f64 },

    #[error("every candidate for node {node} is unreachable")]
    AllUnreachable { node: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("operation requires a {expected} model")]
    SignMismatch { expected: &'static str },

    #[error("no convergence by t = {t}: residual {residual:e}")]
    NoConvergence { t: f64, residual: f64 },

    #[error("mask selects no nodes")]
    EmptyMask,

    #[error("node {node} sits on a kink of the grid function")]
    KinkNode { node: usize },

    #[error("orbit blew up at t = {t}")]
    Blowup { t: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
