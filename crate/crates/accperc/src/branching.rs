//! Block embedding of accessibility percolation into a branching process in
//! varying environment, plus the supercriticality condition checkers.
//!
//! Cutting the tree into blocks of `n` consecutive levels turns the set of
//! accessible vertices at successive block boundaries into a generation
//! sequence: the offspring of an individual are the accessible vertices at
//! relative depth `n` below it. The mean offspring of a generation-`j`
//! individual is `prod_{i=jn}^{jn+n-1} children(i) / (n+1)!`, and keeping
//! that mean above 1 for every generation certifies survival of the block
//! process, which in turn implies percolation. Two sampling modes exist
//! because consecutive blocks share the boundary vertex's fitness: the
//! idealized process redraws a uniform root fitness per individual, the
//! literal embedding carries the boundary fitness over.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::One;
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::growth::GrowthFunction;
use crate::rng::{trial_rng, TrialRng};
use crate::sim::advance_frontier_capped;

/// Default margin above 1 that a tail-window infimum must clear before a
/// finite checker reports a liminf condition as holding.
pub const LIMINF_MARGIN: f64 = 1e-6;

/// How individuals of the block process obtain their root fitness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockSampling {
    /// Every individual draws an independent uniform root fitness: the
    /// idealized process with independent generations.
    FreshRoot,
    /// Individuals inherit the fitness of the accessible boundary vertex
    /// they stand on: the literal embedding, identical to viewing the
    /// frontier simulation at block boundaries.
    Embedded,
}

/// A block process: growth function, block length, and sampling mode.
#[derive(Debug, Clone, Serialize)]
pub struct BlockProcess {
    pub growth: GrowthFunction,
    /// Number of tree levels per generation; at least 1.
    pub block_len: u32,
    pub mode: BlockSampling,
}

/// Mean offspring of a generation-`j` individual:
/// `prod_{i=jn}^{jn+n-1} children(i) / (n+1)!`, computed in log space.
pub fn block_mean_offspring(g: &GrowthFunction, j: u64, n: u32) -> Result<f64> {
    if n < 1 {
        return Err(Error::Config("block length must be >= 1".to_string()));
    }
    let n64 = u64::from(n);
    let mut ln = 0.0f64;
    for i in j * n64..(j + 1) * n64 {
        ln += (g.children(i)? as f64).ln();
    }
    for k in 2..=n64 + 1 {
        ln -= (k as f64).ln();
    }
    Ok(ln.exp())
}

/// Exact rational value of [`block_mean_offspring`]; feasible whenever the
/// block's children product fits in memory.
pub fn block_mean_offspring_exact(g: &GrowthFunction, j: u64, n: u32) -> Result<BigRational> {
    if n < 1 {
        return Err(Error::Config("block length must be >= 1".to_string()));
    }
    let n64 = u64::from(n);
    let mut num = BigUint::one();
    for i in j * n64..(j + 1) * n64 {
        num *= g.children(i)?;
    }
    let mut den = BigUint::one();
    for k in 2..=n64 + 1 {
        den *= k;
    }
    Ok(BigRational::new(num.into(), den.into()))
}

/// Counts accessible vertices at relative depth `n` below one block root.
///
/// `root_fitness` is drawn uniform on `(0, 1)` in fresh-root mode and must
/// be supplied in embedded mode. The block's level sizes are bounded by the
/// children product, which must not exceed `size_cap`.
pub fn sample_block_offspring(
    g: &GrowthFunction,
    j: u64,
    n: u32,
    mode: BlockSampling,
    root_fitness: Option<f64>,
    size_cap: usize,
    rng: &mut TrialRng,
) -> Result<u64> {
    let values = sample_block_frontier(g, j, n, mode, root_fitness, size_cap, rng)?;
    Ok(values.len() as u64)
}

/// Like [`sample_block_offspring`] but returns the terminal fitness values,
/// which embedded-mode evolution feeds to the next generation.
fn sample_block_frontier(
    g: &GrowthFunction,
    j: u64,
    n: u32,
    mode: BlockSampling,
    root_fitness: Option<f64>,
    size_cap: usize,
    rng: &mut TrialRng,
) -> Result<Vec<f64>> {
    if n < 1 {
        return Err(Error::Config("block length must be >= 1".to_string()));
    }
    let n64 = u64::from(n);
    let mut product = BigUint::one();
    for i in j * n64..(j + 1) * n64 {
        product *= g.children(i)?;
    }
    if product > BigUint::from(size_cap) {
        return Err(Error::Capacity(format!(
            "block (j={j}, n={n}) can hold up to {product} vertices, cap is {size_cap}"
        )));
    }
    let root = match (mode, root_fitness) {
        (BlockSampling::FreshRoot, None) => rng.random::<f64>(),
        (BlockSampling::Embedded, Some(x)) => x,
        (BlockSampling::FreshRoot, Some(_)) => {
            return Err(Error::Config(
                "fresh-root sampling draws its own root fitness".to_string(),
            ))
        }
        (BlockSampling::Embedded, None) => {
            return Err(Error::Config(
                "embedded sampling needs the boundary fitness".to_string(),
            ))
        }
    };
    let mut values = vec![root];
    for t in 0..n64 {
        let c = g.children(j * n64 + t)?;
        let (next, _) = advance_frontier_capped(&values, c, 0.0, usize::MAX, rng);
        values = next;
        if values.is_empty() {
            break;
        }
    }
    Ok(values)
}

/// One row of a survival curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalRow {
    pub generation: u32,
    /// Trials whose population is nonempty at this generation.
    pub n_alive_trials: u64,
    pub fraction: f64,
}

/// Fraction of alive trials per generation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurvivalCurve {
    pub rows: Vec<SurvivalRow>,
}

/// Estimates the survival probability of the block process over
/// `generations` generations from `trials` independent trials.
///
/// The population is truncated to the `population_cap` individuals of
/// smallest fitness at each generation boundary (any `population_cap`
/// individuals in fresh-root mode, where fitness is redrawn), the same
/// pessimistic truncation the frontier simulation uses.
pub fn bpve_survival_estimate(
    process: &BlockProcess,
    generations: u32,
    trials: u64,
    population_cap: usize,
    size_cap: usize,
    seed: u64,
) -> Result<SurvivalCurve> {
    if trials < 1 {
        return Err(Error::Config("trials must be >= 1".to_string()));
    }
    if population_cap < 1 {
        return Err(Error::Config("population_cap must be >= 1".to_string()));
    }
    // Probe every block so configuration and capacity errors surface before
    // the parallel run; per-generation memory is bounded by population_cap
    // times the block's children product.
    let n64 = u64::from(process.block_len);
    for j in 0..u64::from(generations) {
        block_mean_offspring(&process.growth, j, process.block_len)?;
        let mut product = BigUint::one();
        for i in j * n64..(j + 1) * n64 {
            product *= process.growth.children(i)?;
        }
        if product > BigUint::from(size_cap) {
            return Err(Error::Capacity(format!(
                "block (j={j}, n={}) can hold up to {product} vertices, cap is {size_cap}",
                process.block_len
            )));
        }
    }
    let alive = (0..trials)
        .into_par_iter()
        .fold(
            || vec![0u64; generations as usize + 1],
            |mut alive, idx| {
                let mut rng = trial_rng(seed, idx);
                run_bpve_trial(process, generations, population_cap, size_cap, &mut rng, &mut alive);
                alive
            },
        )
        .reduce(
            || vec![0u64; generations as usize + 1],
            |mut a, b| {
                for (x, y) in a.iter_mut().zip(b) {
                    *x += y;
                }
                a
            },
        );
    let rows = alive
        .iter()
        .enumerate()
        .map(|(gen, &n)| SurvivalRow {
            generation: gen as u32,
            n_alive_trials: n,
            fraction: n as f64 / trials as f64,
        })
        .collect();
    Ok(SurvivalCurve { rows })
}

fn run_bpve_trial(
    process: &BlockProcess,
    generations: u32,
    population_cap: usize,
    size_cap: usize,
    rng: &mut TrialRng,
    alive: &mut [u64],
) {
    alive[0] += 1;
    match process.mode {
        BlockSampling::FreshRoot => {
            let mut population = 1u64;
            for j in 0..u64::from(generations) {
                population = population.min(population_cap as u64);
                let mut next = 0u64;
                for _ in 0..population {
                    next += sample_block_offspring(
                        &process.growth,
                        j,
                        process.block_len,
                        BlockSampling::FreshRoot,
                        None,
                        size_cap,
                        rng,
                    )
                    .expect("configuration probed before the run");
                }
                population = next;
                if population == 0 {
                    return;
                }
                alive[j as usize + 1] += 1;
            }
        }
        BlockSampling::Embedded => {
            // The embedded process is the frontier simulation watched at
            // block boundaries: one level-by-level sweep over the whole
            // population per block, so that with caps disabled the counts
            // (and the random stream) coincide with `sim::run_trial` on the
            // same `(seed, trial_index)`.
            let n = u64::from(process.block_len);
            let mut population = vec![rng.random::<f64>()];
            for j in 0..u64::from(generations) {
                if population.len() > population_cap {
                    population.select_nth_unstable_by(population_cap, f64::total_cmp);
                    population.truncate(population_cap);
                }
                for t in 0..n {
                    let c = process
                        .growth
                        .children(j * n + t)
                        .expect("configuration probed before the run");
                    let (next, _) = advance_frontier_capped(&population, c, 0.0, usize::MAX, rng);
                    population = next;
                    if population.is_empty() {
                        return;
                    }
                }
                alive[j as usize + 1] += 1;
            }
        }
    }
}

/// Report of a finite liminf-style condition check: the sequence of values
/// and whether the condition held.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    /// Block length (or horizon, for checkers without blocks).
    pub n: u64,
    pub values: Vec<f64>,
    pub holds: bool,
}

/// Evaluates the block supercriticality condition: mean offspring
/// `mu_j = prod children / (n+1)!` for every generation `j <= horizon_j`,
/// holding when the minimum exceeds 1.
///
/// For nondecreasing growth functions `mu_j` is nondecreasing in `j`, so
/// the finite minimum certifies the liminf; the full sequence is reported
/// so callers can judge other shapes themselves.
pub fn check_supercritical(g: &GrowthFunction, n: u32, horizon_j: u64) -> Result<ConditionReport> {
    let values: Vec<f64> = (0..=horizon_j)
        .map(|j| block_mean_offspring(g, j, n))
        .collect::<Result<_>>()?;
    let holds = values.iter().all(|&mu| mu > 1.0);
    Ok(ConditionReport {
        n: u64::from(n),
        values,
        holds,
    })
}

/// Scans block lengths `1..=n_max` for the first whose supercriticality
/// check holds over the given generation horizon.
pub fn find_supercritical_block_len(
    g: &GrowthFunction,
    n_max: u32,
    horizon_j: u64,
) -> Result<Option<(u32, ConditionReport)>> {
    for n in 1..=n_max {
        let report = check_supercritical(g, n, horizon_j)?;
        if report.holds {
            return Ok(Some((n, report)));
        }
    }
    Ok(None)
}

/// Evaluates the geometric-mean growth condition for varying linear growth
/// `children(i) = (i+1) * alphas[i]`: reports
/// `g_n = (prod_{i<n} alphas[i])^{1/n}` for `n <= horizon` and holds when
/// the tail-window infimum exceeds `1 + LIMINF_MARGIN`.
pub fn teo1_condition(alphas: &[u64], horizon: u64) -> Result<ConditionReport> {
    if alphas.is_empty() {
        return Err(Error::Config("alphas must be nonempty".to_string()));
    }
    if alphas.iter().any(|&a| a == 0) {
        return Err(Error::Config("alphas must all be positive".to_string()));
    }
    if (alphas.len() as u64) < horizon {
        return Err(Error::Config(format!(
            "horizon {horizon} needs {horizon} alphas, got {}",
            alphas.len()
        )));
    }
    if horizon < 1 {
        return Err(Error::Config("horizon must be >= 1".to_string()));
    }
    let mut ln_sum = 0.0f64;
    let mut values = Vec::with_capacity(horizon as usize);
    for (i, &a) in alphas.iter().take(horizon as usize).enumerate() {
        ln_sum += (a as f64).ln();
        values.push((ln_sum / (i + 1) as f64).exp());
    }
    let holds = tail_window_holds(&values, LIMINF_MARGIN);
    Ok(ConditionReport {
        n: horizon,
        values,
        holds,
    })
}

/// Finite stand-in for a liminf condition: the infimum over the second half
/// of the reported sequence must exceed `1 + margin`. A finite window can
/// never certify asymptotics; callers get the full sequence to judge.
pub fn tail_window_holds(values: &[f64], margin: f64) -> bool {
    if values.is_empty() {
        return false;
    }
    let start = values.len() / 2;
    values[start..].iter().all(|&v| v > 1.0 + margin)
}
