//! Record statistics for a competition whose editions grow: the winner
//! score of edition `n` is the maximum of `alpha(n)` iid uniform scores, so
//! its cdf is `x^alpha(n)`. A perfect record run, a new record at every
//! edition, is the event `X_1 < X_2 < ... < X_N`; with
//! `alpha(n) = ceil((n+1) * alpha)` that event couples into accessibility
//! percolation on the matching tree (an increasing winner sequence maps onto
//! an accessible path), which makes its probability a lower bound for the
//! percolation probability at the aligned depth.

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::growth::ceil_mul;
use crate::rng::{trial_rng, TrialRng};

/// Participant counts per edition.
///
/// Editions are numbered from 1. Counts must be positive integers; the
/// all-ones spec makes every edition a single uniform draw.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum AlphaSpec {
    /// `alpha(n) = 1` for every edition.
    Uniform,
    /// `alpha(n) = ceil((n + 1) * alpha)`, the growth-coupled spec.
    Ceil { alpha: f64 },
    /// Explicit per-edition counts, starting with edition 1.
    Explicit(Vec<u64>),
}

impl AlphaSpec {
    /// Growth-coupled participants; requires a finite positive `alpha`.
    pub fn ceil(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::Config(format!(
                "ceil alpha must be finite and positive, got {alpha}"
            )));
        }
        Ok(AlphaSpec::Ceil { alpha })
    }

    /// Explicit participant counts; all must be positive.
    pub fn explicit(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() || counts.iter().any(|&a| a == 0) {
            return Err(Error::Config(
                "explicit participant counts must be nonempty and positive".to_string(),
            ));
        }
        Ok(AlphaSpec::Explicit(counts))
    }

    /// Participants in edition `n >= 1`.
    pub fn alpha_at(&self, n: u64) -> Result<u64> {
        if n < 1 {
            return Err(Error::Config("editions are numbered from 1".to_string()));
        }
        match self {
            AlphaSpec::Uniform => Ok(1),
            AlphaSpec::Ceil { alpha } => ceil_mul(*alpha, n + 1),
            AlphaSpec::Explicit(counts) => counts
                .get(usize::try_from(n - 1).unwrap_or(usize::MAX))
                .copied()
                .ok_or_else(|| {
                    Error::Config(format!(
                        "explicit spec covers {} editions, edition {n} requested",
                        counts.len()
                    ))
                }),
        }
    }

    /// Participant counts for editions `1..=editions`.
    pub fn alphas(&self, editions: u32) -> Result<Vec<u64>> {
        (1..=u64::from(editions)).map(|n| self.alpha_at(n)).collect()
    }
}

impl fmt::Display for AlphaSpec {
    /// CSV-safe label: `uniform`, `ceil:A`, or `explicit:a;b;c`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AlphaSpec::Uniform => write!(f, "uniform"),
            AlphaSpec::Ceil { alpha } => write!(f, "ceil:{alpha}"),
            AlphaSpec::Explicit(counts) => {
                write!(f, "explicit:")?;
                for (i, a) in counts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{a}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for AlphaSpec {
    type Err = Error;

    /// Accepts `uniform`, `ceil:A`, or a comma- or semicolon-separated list
    /// of counts (optionally prefixed with `explicit:`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("uniform") {
            return Ok(AlphaSpec::Uniform);
        }
        if let Some(rest) = s.strip_prefix("ceil:") {
            let alpha: f64 = rest
                .parse()
                .map_err(|_| Error::Config(format!("invalid ceil alpha: {rest}")))?;
            return AlphaSpec::ceil(alpha);
        }
        let rest = s.strip_prefix("explicit:").unwrap_or(s);
        let counts: Vec<u64> = rest
            .split([',', ';'])
            .map(|tok| {
                tok.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Config(format!("invalid participant count: {tok}")))
            })
            .collect::<Result<_>>()?;
        AlphaSpec::explicit(counts)
    }
}

/// How winner scores are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreSampler {
    /// Literal maximum of `alpha(n)` uniform draws; cost grows with the
    /// participant count.
    MaxOfK,
    /// One draw per edition through the inverse cdf `u^(1/alpha(n))`; the
    /// default for large participant counts.
    InverseCdf,
}

/// Winner scores of editions `1..=editions`.
pub fn simulate_editions(
    alphas: &AlphaSpec,
    editions: u32,
    sampler: ScoreSampler,
    rng: &mut TrialRng,
) -> Result<Vec<f64>> {
    let mut scores = Vec::with_capacity(editions as usize);
    for n in 1..=u64::from(editions) {
        let a = alphas.alpha_at(n)?;
        let x = match sampler {
            ScoreSampler::MaxOfK => {
                let mut best = 0.0f64;
                for _ in 0..a {
                    best = best.max(rng.random::<f64>());
                }
                best
            }
            ScoreSampler::InverseCdf => rng.random::<f64>().powf(1.0 / a as f64),
        };
        scores.push(x);
    }
    Ok(scores)
}

/// Record times of a score sequence: `S_0 = 1`, and each later entry is the
/// first edition whose score beats the previous record. Editions are
/// numbered from 1; an empty input has no records.
pub fn record_time_sequence(scores: &[f64]) -> Result<Vec<u64>> {
    let mut sorted: Vec<f64> = scores.to_vec();
    sorted.sort_by(f64::total_cmp);
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::Input(
            "duplicate scores; ties are a probability-zero event".to_string(),
        ));
    }
    let mut times = Vec::new();
    let mut best = f64::NEG_INFINITY;
    for (idx, &x) in scores.iter().enumerate() {
        if idx == 0 || x > best {
            times.push(idx as u64 + 1);
        }
        best = best.max(x);
    }
    Ok(times)
}

/// Monte Carlo estimate of the perfect-record probability.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RecordEstimate {
    pub editions: u32,
    /// CSV-safe participant spec label.
    pub alpha_spec: String,
    pub trials: u64,
    /// Trials in which every edition set a record.
    pub hits: u64,
    pub p_hat: f64,
    pub stderr: f64,
    /// Exact probability from the rational recursion, when requested.
    pub exact_value: Option<f64>,
}

/// Estimates `P(X_1 < X_2 < ... < X_N)` over `trials` independent trials,
/// optionally attaching the exact value from
/// [`crate::exact::record_chain_prob`].
///
/// Trials reuse the stream keyed by `(seed, trial_index)`, and an edition
/// consumes the same draws regardless of the horizon, so estimates at a
/// larger `editions` value are exactly nonincreasing when run with the same
/// seed.
pub fn perfect_record_prob(
    alphas: &AlphaSpec,
    editions: u32,
    trials: u64,
    seed: u64,
    sampler: ScoreSampler,
    with_exact: bool,
) -> Result<RecordEstimate> {
    if editions < 1 {
        return Err(Error::Config("editions must be >= 1".to_string()));
    }
    if trials < 1 {
        return Err(Error::Config("trials must be >= 1".to_string()));
    }
    let alpha_values = alphas.alphas(editions)?;
    let hits: u64 = (0..trials)
        .into_par_iter()
        .map(|idx| {
            let mut rng = trial_rng(seed, idx);
            let scores = simulate_editions(alphas, editions, sampler, &mut rng)
                .expect("spec validated above");
            u64::from(scores.windows(2).all(|w| w[1] > w[0]))
        })
        .sum();
    let p = hits as f64 / trials as f64;
    let exact_value = if with_exact {
        use num_traits::ToPrimitive;
        let exact = crate::exact::record_chain_prob(&alpha_values, editions as usize)?;
        Some(exact.to_f64().ok_or_else(|| {
            Error::Accuracy("exact record probability does not fit in f64".to_string())
        })?)
    } else {
        None
    };
    Ok(RecordEstimate {
        editions,
        alpha_spec: alphas.to_string(),
        trials,
        hits,
        p_hat: p,
        stderr: (p * (1.0 - p) / trials as f64).sqrt(),
        exact_value,
    })
}
