//! Numerical laboratory for travelling waves in the F-KPP equation and its
//! two dormancy variants (seed-bank and spore models).
//!
//! Three inter-validating layers share one parameter type:
//!
//! * [`wavespeed`] — closed-form speed functions `λ±(μ)`, the associated
//!   2×2 eigen problem with its Perron eigenvector, and a minimizer for
//!   the critical wave-speed `(μ*, λ*)`;
//! * [`pde`] — explicit finite-difference integration of the coupled
//!   reaction–diffusion systems with front tracking, plus the drifted
//!   linear system used as a Feynman–Kac cross-check target;
//! * [`particles`] — exact event-driven simulation of on/off branching
//!   Brownian motion (the dual particle systems), extremal statistics,
//!   additive martingales, and a single-path Feynman–Kac estimator.
//!
//! [`harness`] binds the layers into named, byte-reproducible experiments
//! that check each layer against the others and against pinned constants.

pub mod error;
pub mod harness;
pub mod model;
mod par;
pub mod particles;
pub mod pde;
pub mod rng;
pub mod wavespeed;

pub use error::{Error, Result};
pub use model::{ModelParams, OffspringLaw, Variant};
