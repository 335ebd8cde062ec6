//! Model definition: which dormancy mechanism is active, the transfer rates
//! between the active and dormant states, and the branching offspring law.
//!
//! Everything downstream (speed formulas, PDE right-hand sides, particle
//! simulations) pulls its constants from [`ModelParams`], so validation
//! happens once, here.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{Error, Result};

/// Largest number of *extra* offspring a single branch event may produce.
///
/// Keeps the reaction polynomial's degree (and the sampling table) bounded;
/// nothing in the theory needs anywhere near this.
pub const K_MAX: usize = 64;

/// Tolerance for the offspring probabilities summing to one.
const LAW_NORMALIZATION_TOL: f64 = 1e-12;

/// Which equation the laboratory is running.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// No dormancy: the classical equation. Requires `c = c' = 0`.
    Classical,
    /// Dormant individuals are frozen in place; only active ones diffuse.
    SeedBank,
    /// Active individuals sit still; movement happens in the dormant state.
    Spore,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Classical, Variant::SeedBank, Variant::Spore];

    /// Short lowercase name, stable across the CLI and CSV output.
    pub fn name(self) -> &'static str {
        match self {
            Variant::Classical => "classical",
            Variant::SeedBank => "seedbank",
            Variant::Spore => "spore",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "classical" => Ok(Variant::Classical),
            "seedbank" | "seed-bank" | "seed_bank" => Ok(Variant::SeedBank),
            "spore" => Ok(Variant::Spore),
            other => Err(Error::Config(format!(
                "unknown variant {other:?} (expected classical, seedbank or spore)"
            ))),
        }
    }
}

/// Distribution of the number of *extra* offspring at a branch event.
///
/// `probs[i]` is the probability of `i + 1` extra particles, i.e. `i + 2`
/// particles total after the split. Indexing starts at one extra because a
/// "branch" that produces one particle is not a branch.
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringLaw {
    probs: Vec<f64>,
    /// Cumulative sums of `probs`, used as a sampling staircase.
    cumulative: Vec<f64>,
}

impl OffspringLaw {
    /// Validates and wraps a probability vector. `probs[i]` is the weight of
    /// `i + 1` extra offspring.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidLaw("offspring law is empty".into()));
        }
        if probs.len() > K_MAX {
            return Err(Error::InvalidLaw(format!(
                "offspring law has {} entries, maximum is {K_MAX}",
                probs.len()
            )));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidLaw(format!(
                    "p[{}] = {p} is not a probability",
                    i + 1
                )));
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > LAW_NORMALIZATION_TOL {
            return Err(Error::InvalidLaw(format!(
                "probabilities sum to {sum}, not 1"
            )));
        }
        let mut cumulative = Vec::with_capacity(probs.len());
        let mut acc = 0.0;
        for &p in &probs {
            acc += p;
            cumulative.push(acc);
        }
        // Guard the staircase's top step against f64 roundoff.
        if let Some(last) = cumulative.last_mut() {
            *last = 1.0;
        }
        Ok(OffspringLaw { probs, cumulative })
    }

    /// Strictly binary branching: every split makes exactly one extra particle.
    pub fn binary() -> Self {
        OffspringLaw {
            probs: vec![1.0],
            cumulative: vec![1.0],
        }
    }

    /// Parses a comma-separated probability list, e.g. `"0.5,0.5"`.
    pub fn parse_list(s: &str) -> Result<Self> {
        let probs = s
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidLaw(format!("bad probability {tok:?}: {e}")))
            })
            .collect::<Result<Vec<f64>>>()?;
        OffspringLaw::new(probs)
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Expected number of extra offspring per branch event, `sum_k p_k * k`.
    pub fn mean_extra(&self) -> f64 {
        self.probs
            .iter()
            .enumerate()
            .map(|(i, &p)| p * (i + 1) as f64)
            .sum()
    }

    /// Draws the number of extra offspring produced by one branch event.
    pub fn sample_extra<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.gen();
        match self.cumulative.iter().position(|&threshold| u < threshold) {
            Some(i) => i + 1,
            None => self.probs.len(), // u landed exactly on 1.0
        }
    }
}

/// Full parameter set for one model instance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub variant: Variant,
    /// Switching rate active -> dormant.
    pub c: f64,
    /// Switching rate dormant -> active.
    pub c_prime: f64,
    /// Branching rate of active particles.
    pub kappa: f64,
    pub law: OffspringLaw,
}

impl ModelParams {
    pub fn new(
        variant: Variant,
        c: f64,
        c_prime: f64,
        kappa: f64,
        law: OffspringLaw,
    ) -> Result<Self> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidParams(format!("c = {c} must be >= 0")));
        }
        if !c_prime.is_finite() || c_prime < 0.0 {
            return Err(Error::InvalidParams(format!(
                "c_prime = {c_prime} must be >= 0"
            )));
        }
        if !kappa.is_finite() || kappa <= 0.0 {
            return Err(Error::InvalidParams(format!("kappa = {kappa} must be > 0")));
        }
        if variant == Variant::Classical && (c != 0.0 || c_prime != 0.0) {
            return Err(Error::InvalidParams(format!(
                "classical variant requires c = c' = 0, got c = {c}, c' = {c_prime}"
            )));
        }
        Ok(ModelParams {
            variant,
            c,
            c_prime,
            kappa,
            law,
        })
    }

    /// Classical equation with the given branching rate and law.
    pub fn classical(kappa: f64, law: OffspringLaw) -> Result<Self> {
        ModelParams::new(Variant::Classical, 0.0, 0.0, kappa, law)
    }

    /// The everything-is-one benchmark instance of a dormancy variant:
    /// `c = c' = kappa = 1` with binary branching.
    pub fn unit(variant: Variant) -> Self {
        let (c, c_prime) = match variant {
            Variant::Classical => (0.0, 0.0),
            _ => (1.0, 1.0),
        };
        ModelParams {
            variant,
            c,
            c_prime,
            kappa: 1.0,
            law: OffspringLaw::binary(),
        }
    }

    /// Effective selection strength `s = kappa * sum_k p_k * k`: the linear
    /// growth rate seen by the quantity `1 - u` where it is small.
    pub fn effective_selection(&self) -> f64 {
        self.kappa * self.law.mean_extra()
    }

    /// Reaction term `kappa * sum_k p_k (u^(k+1) - u)`, checked to the unit
    /// interval where it is meaningful.
    pub fn selection_term(&self, u: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::Domain(format!(
                "selection term evaluated at u = {u}, outside [0, 1]"
            )));
        }
        Ok(self.selection_unchecked(u))
    }

    /// Same as [`selection_term`](Self::selection_term) without the domain
    /// check, for inner integration loops where `u` is already clamped.
    #[inline]
    pub fn selection_unchecked(&self, u: f64) -> f64 {
        debug_assert!((-1e-12..=1.0 + 1e-12).contains(&u));
        // sum_k p_k u^(k+1) - u, since the p_k sum to one.
        let mut power = u;
        let mut acc = 0.0;
        for &p in &self.law.probs {
            power *= u;
            acc += p * power;
        }
        self.kappa * (acc - u)
    }
}
