//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Offspring-law vector failed validation (normalization, range, size).
    #[error("invalid offspring law: {0}")]
    InvalidLaw(String),

    /// Model parameters failed validation (signs, finiteness, variant rules).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// An input lay outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The speed-function radicand went negative; no real wave speed exists
    /// at this decay rate.
    #[error("no real speed at mu = {mu}: radicand {radicand} < 0")]
    NonRealSpeed { mu: f64, radicand: f64 },

    /// The critical-speed minimizer could not certify a minimum. Carries a
    /// summary of the scan so the failure is diagnosable.
    #[error(
        "critical-speed search failed: {message} \
         (scanned {scanned} points on [{lo}, {hi}], {real} with real speeds, \
         best so far mu = {best_mu}, lambda = {best_lambda})"
    )]
    Solver {
        message: String,
        lo: f64,
        hi: f64,
        scanned: usize,
        real: usize,
        best_mu: f64,
        best_lambda: f64,
    },

    /// Requested time step violates the explicit-Euler stability bound.
    #[error("time step {dt} exceeds the stability limit {limit}")]
    CflViolation { dt: f64, limit: f64 },

    /// A field left [0,1] or became non-finite during integration.
    #[error("integration diverged at step {step} (t = {t})")]
    Diverged { step: u64, t: f64 },

    /// A level-set crossing was not found in the field.
    #[error("level {level} is not bracketed by the field values")]
    NotBracketed { level: f64 },

    /// A branching replicate created more particles than the configured cap.
    #[error("population exceeded the cap of {cap} particles at t = {t}")]
    PopulationOverflow { cap: usize, t: f64 },

    /// A statistical fit was asked for with too little data.
    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    /// Configuration (CLI/flag/config-file) problem.
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
