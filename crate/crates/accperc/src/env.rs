//! Level-dependent fitness environments for homogeneous trees.
//!
//! In the varying-environment model the fitness of a level-`n` vertex is
//! uniform on `(a_n, 1)` for a strictly increasing schedule of floors
//! `(a_n)`. Raising the floor level by level substitutes for tree growth:
//! percolation on a `d`-ary tree can survive even though the standard model
//! on the same tree dies out. This module defines the schedules, their ratio
//! sequences `(a_{i+1} - a_i) / (1 - a_i)`, the chain-probability product
//! (a lower bound; see [`EnvSchedule::chain_product`]), and the sufficient
//! percolation condition checker [`sufcond_check`].
//!
//! Floors crowd against 1, so downstream arithmetic should prefer the band
//! widths `w_i = 1 - a_i` from [`EnvSchedule::width_at`], which the
//! schedules compute directly: the geometric width `beta^-i` drops below
//! the spacing of f64 values near 1.0 within a few dozen levels, at which
//! point the floor itself rounds to exactly 1.0.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::branching::{tail_window_holds, ConditionReport, LIMINF_MARGIN};
use crate::error::{Error, Result};

/// A schedule of fitness floors, one per level.
///
/// The harmonic schedule's formula `1 - 1/i` is undefined at `i = 0`, so that
/// schedule starts at index 1; [`EnvSchedule::start_index`] reports the first
/// valid index and tree level `n` reads the floor at schedule index
/// `start_index + n`.
///
/// Serializes to and from a tagged JSON object, for example
/// `{"kind":"geometric","beta":3.0}` or `{"kind":"explicit","a":[0,0.5]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawEnv", into = "RawEnv")]
pub enum EnvSchedule {
    /// `a_i = 1 - beta^{-i}` with `beta > 1`; the ratio is constantly
    /// `1 - 1/beta`.
    Geometric { beta: f64 },
    /// `b_i = 1 - 1/i` for `i >= 1`; the ratio at index `i` is `1/(i+1)`.
    Harmonic,
    /// `a_i = 0` for every level: the standard model. The only schedule
    /// exempt from the strictly-increasing requirement.
    Constant0,
    /// Explicit floors, strictly increasing within `[0, 1)`.
    Explicit { a: Vec<f64> },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawEnv {
    Geometric { beta: f64 },
    Harmonic,
    Constant0,
    Explicit { a: Vec<f64> },
}

impl TryFrom<RawEnv> for EnvSchedule {
    type Error = Error;

    fn try_from(raw: RawEnv) -> Result<Self> {
        match raw {
            RawEnv::Geometric { beta } => EnvSchedule::geometric(beta),
            RawEnv::Harmonic => Ok(EnvSchedule::Harmonic),
            RawEnv::Constant0 => Ok(EnvSchedule::Constant0),
            RawEnv::Explicit { a } => EnvSchedule::explicit(a),
        }
    }
}

impl From<EnvSchedule> for RawEnv {
    fn from(env: EnvSchedule) -> Self {
        match env {
            EnvSchedule::Geometric { beta } => RawEnv::Geometric { beta },
            EnvSchedule::Harmonic => RawEnv::Harmonic,
            EnvSchedule::Constant0 => RawEnv::Constant0,
            EnvSchedule::Explicit { a } => RawEnv::Explicit { a },
        }
    }
}

impl EnvSchedule {
    /// Geometric schedule with ratio `1 - 1/beta`; requires `beta > 1`.
    pub fn geometric(beta: f64) -> Result<Self> {
        if !beta.is_finite() || beta <= 1.0 {
            return Err(Error::Config(format!(
                "geometric beta must be finite and > 1, got {beta}"
            )));
        }
        Ok(EnvSchedule::Geometric { beta })
    }

    /// Explicit schedule; floors must lie in `[0, 1)` and increase strictly.
    pub fn explicit(a: Vec<f64>) -> Result<Self> {
        if a.iter().any(|&x| !x.is_finite() || !(0.0..1.0).contains(&x)) {
            return Err(Error::Config(
                "explicit schedule floors must lie in [0, 1)".to_string(),
            ));
        }
        if a.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(
                "explicit schedule floors must be strictly increasing".to_string(),
            ));
        }
        Ok(EnvSchedule::Explicit { a })
    }

    /// First valid schedule index: 1 for the harmonic schedule, 0 otherwise.
    pub fn start_index(&self) -> u64 {
        match self {
            EnvSchedule::Harmonic => 1,
            _ => 0,
        }
    }

    /// Schedule value `a_i`; `i` counts in the schedule's own indexing and
    /// must be at least [`EnvSchedule::start_index`].
    ///
    /// Computed as `1 - width_at(i)`, so it rounds to exactly 1.0 once the
    /// width falls below half an ulp of 1.0; code that goes on to divide by
    /// `1 - a_i` should use [`EnvSchedule::width_at`] instead.
    pub fn floor_at(&self, i: u64) -> Result<f64> {
        match self {
            EnvSchedule::Explicit { a } => {
                self.check_start(i)?;
                a.get(usize::try_from(i).unwrap_or(usize::MAX))
                    .copied()
                    .ok_or_else(|| {
                        Error::Config(format!(
                            "explicit schedule has {} floors, index {i} requested",
                            a.len()
                        ))
                    })
            }
            _ => Ok(1.0 - self.width_at(i)?),
        }
    }

    /// Band width `w_i = 1 - a_i`, computed without subtracting from 1 so it
    /// stays a positive f64 wherever the exponent range allows, long after
    /// [`EnvSchedule::floor_at`] saturates at 1.0.
    pub fn width_at(&self, i: u64) -> Result<f64> {
        self.check_start(i)?;
        match self {
            EnvSchedule::Geometric { beta } => {
                let exp = i32::try_from(i).map_err(|_| {
                    Error::Capacity(format!(
                        "geometric schedule index {i} exceeds the supported exponent range"
                    ))
                })?;
                Ok(beta.powi(-exp))
            }
            EnvSchedule::Harmonic => Ok(1.0 / i as f64),
            EnvSchedule::Constant0 => Ok(1.0),
            EnvSchedule::Explicit { .. } => Ok(1.0 - self.floor_at(i)?),
        }
    }

    fn check_start(&self, i: u64) -> Result<()> {
        if i < self.start_index() {
            return Err(Error::Config(format!(
                "schedule starts at index {}, index {i} requested",
                self.start_index()
            )));
        }
        Ok(())
    }

    /// Fitness floor applied at tree level `n`, i.e. the schedule value at
    /// index `start_index + n`.
    pub fn level_floor(&self, n: u64) -> Result<f64> {
        self.floor_at(self.start_index() + n)
    }

    /// Band width applied at tree level `n`, i.e. `width_at(start_index + n)`.
    pub fn level_width(&self, n: u64) -> Result<f64> {
        self.width_at(self.start_index() + n)
    }

    /// Ratio `(a_{i+1} - a_i) / (1 - a_i)` at schedule index `i`, via the
    /// closed form where one exists.
    pub fn ratio(&self, i: u64) -> Result<f64> {
        if i < self.start_index() {
            return Err(Error::Config(format!(
                "schedule starts at index {}, ratio at {i} requested",
                self.start_index()
            )));
        }
        match self {
            EnvSchedule::Geometric { beta } => Ok(1.0 - 1.0 / beta),
            EnvSchedule::Harmonic => Ok(1.0 / (i + 1) as f64),
            EnvSchedule::Constant0 => Ok(0.0),
            EnvSchedule::Explicit { .. } => {
                let lo = self.floor_at(i)?;
                let hi = self.floor_at(i + 1)?;
                Ok((hi - lo) / (1.0 - lo))
            }
        }
    }

    /// Product of the first `n` ratios starting at the schedule's first
    /// valid index.
    ///
    /// This is a lower bound on the exact probability of an increasing chain
    /// `X_0 < X_1 < ... < X_n` with `X_k` uniform on `(a_k, 1)`, not an
    /// equality: it is the probability of the smaller event in which every
    /// `X_k` additionally stays below the next floor `a_{k+1}`. Compare
    /// [`crate::exact::varyenv_chain_exact`], which computes the chain
    /// probability itself.
    pub fn chain_product(&self, n: u64) -> Result<f64> {
        let start = self.start_index();
        let mut product = 1.0;
        for i in 0..n {
            product *= self.ratio(start + i)?;
        }
        Ok(product)
    }
}

impl fmt::Display for EnvSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnvSchedule::Geometric { beta } => write!(f, "geometric(beta={beta})"),
            EnvSchedule::Harmonic => write!(f, "harmonic"),
            EnvSchedule::Constant0 => write!(f, "constant0"),
            EnvSchedule::Explicit { a } => write!(f, "explicit(a={a:?})"),
        }
    }
}

/// Evaluates the sufficient percolation condition for a `d`-ary tree in the
/// environment `env`: the block values `v_j = d^n * prod r_i` over blocks of
/// `n` consecutive ratios must stay above 1.
///
/// Values are computed in log space (summing `ln(d * r_i)`) so boundary
/// cases like `d = 2`, geometric `beta = 2` come out exactly 1. `holds`
/// follows the same tail-window liminf convention as
/// [`crate::branching::teo1_condition`].
pub fn sufcond_check(d: u64, env: &EnvSchedule, n: u64, horizon_j: u64) -> Result<ConditionReport> {
    if d < 2 {
        return Err(Error::Config(format!("d must be >= 2, got {d}")));
    }
    if n < 1 {
        return Err(Error::Config("block length n must be >= 1".to_string()));
    }
    let start = env.start_index();
    let mut values = Vec::with_capacity(horizon_j as usize + 1);
    for j in 0..=horizon_j {
        let mut ln_v = 0.0;
        for t in 0..n {
            let r = env.ratio(start + j * n + t)?;
            ln_v += (d as f64 * r).ln();
        }
        values.push(ln_v.exp());
    }
    let holds = tail_window_holds(&values, LIMINF_MARGIN);
    Ok(ConditionReport { n, values, holds })
}
