//! Multiple-shooting transcription of quadrotor tracking problems and a
//! Gauss-Newton SQP solver with an ℓ1 merit line search.
//!
//! The decision buffer follows [`fixtures::quadrotor`](crate::fixtures::quadrotor).
//! Steps are taken in tangent coordinates: three numbers per orientation,
//! applied as `q ⊗ exp(δθ)`. The first state is pinned to the measured state.

mod io;
mod kkt;
mod ocp;
mod solver;

use thiserror::Error;

pub use io::{instance_from_kv, instance_to_kv, report_to_text};
pub use kkt::{solve_qp, Bound, QpSolution};
pub use ocp::{
    transcribe, BufferFunction, NlpPart, OcpInstance, TangentFunction, Transcription, Weights, INPUTS, STATE_TANGENT,
};
pub use solver::{solve, IterationRecord, SqpOptions, SqpReport, Termination};

#[derive(Debug, Error)]
pub enum SqpError {
    #[error("invalid problem instance: {0}")]
    InvalidInstance(String),
    #[error("initial guess has {found} scalars, expected {expected}")]
    GuessLength { expected: usize, found: usize },
    #[error("invalid initial guess: {0}")]
    InvalidGuess(String),
    #[error("non-finite cost or constraint at the current iterate")]
    NonFinite { iterate: Vec<f64> },
    #[error("KKT matrix is singular under every regularization")]
    SingularKkt,
    #[error("active set did not settle")]
    ActiveSetCycling,
    #[error(transparent)]
    Variable(#[from] crate::variable::VarError),
}
