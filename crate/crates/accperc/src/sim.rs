//! Frontier Monte Carlo for accessibility percolation.
//!
//! A trial tracks only the frontier: the multiset of fitness values of
//! accessible vertices at the current level. Each level-`n` value `x`
//! spawns `Binomial(children(n), p)` accessible children with
//! `p = (1 - max(x, a_{n+1})) / (1 - a_{n+1})`, each carrying a fresh
//! uniform fitness above `max(x, a_{n+1})`, where `a_{n+1}` is the next
//! level's fitness floor (zero in the standard model). The frontier is a
//! sufficient statistic, so trials cost memory proportional to the frontier,
//! not to the tree.
//!
//! Internally a value `x` is stored as its gap `g = 1 - x` and each floor
//! as its band width `w = 1 - a`, both obtained without subtracting from 1.
//! In those terms a gap `g` spawns `Binomial(children(n), e / w)` children
//! with `e = min(g, w)`, each with a fresh gap uniform on `(0, e]`. Floors
//! that crowd against 1 (the geometric schedule reaches the last f64 below
//! 1.0 within a few dozen levels) therefore cost no precision: the engine
//! runs until the width itself underflows f64, which
//! [`TrialConfig`] validation rejects up front.
//!
//! Supercritical frontiers grow geometrically, so trials truncate to the
//! `frontier_cap` smallest values when they would exceed the cap. Smaller
//! values have more accessible descendants, which makes truncation
//! pessimistic: it can turn survival into extinction but never the reverse,
//! so survival frequencies under a cap are lower bounds. When the expected
//! offspring count far exceeds the cap, the engine samples only the lowest
//! band of offspring values through a staged threshold scheme whose output
//! law is exactly that of generating every offspring and keeping the cap
//! smallest (see [`advance_frontier_capped`]).

use rand::Rng;
use rand_distr::Distribution;
use rayon::prelude::*;
use serde::Serialize;

use crate::env::EnvSchedule;
use crate::error::{Error, Result};
use crate::growth::GrowthFunction;
use crate::rng::{trial_rng, TrialRng};

/// Fitness law of the root vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RootMode {
    /// Root fitness pinned to the level-0 floor (0 in the standard model),
    /// so every child of the root is accessible. This is the normalization
    /// under which the count martingale has mean one.
    Zero,
    /// Root fitness drawn uniformly above the level-0 floor.
    Random,
}

/// Everything a trial needs besides its index.
#[derive(Debug, Clone, Serialize)]
pub struct TrialConfig {
    pub growth: GrowthFunction,
    pub max_depth: u32,
    pub root_mode: RootMode,
    /// Largest frontier kept exactly; beyond it the smallest values survive.
    pub frontier_cap: usize,
    pub seed: u64,
    /// Fitness floors per level; `Constant0` recovers the standard model.
    pub env: EnvSchedule,
}

impl TrialConfig {
    /// Standard-model configuration with the cap disabled.
    pub fn new(growth: GrowthFunction, max_depth: u32, root_mode: RootMode, seed: u64) -> Self {
        TrialConfig {
            growth,
            max_depth,
            root_mode,
            frontier_cap: usize::MAX,
            seed,
            env: EnvSchedule::Constant0,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.max_depth < 1 {
            return Err(Error::Config("max_depth must be >= 1".to_string()));
        }
        if self.frontier_cap < 1 {
            return Err(Error::Config("frontier_cap must be >= 1".to_string()));
        }
        // Probe the deepest level so finite growths, explicit schedules,
        // and underflowing band widths fail before any trial runs. Widths
        // are nonincreasing in the level, so one probe covers them all.
        self.growth.children(u64::from(self.max_depth) - 1)?;
        let w = self.env.level_width(u64::from(self.max_depth))?;
        if w <= 0.0 {
            return Err(Error::Capacity(format!(
                "band width of {} underflows f64 at level {}; reduce max_depth",
                self.env, self.max_depth
            )));
        }
        Ok(())
    }
}

/// Multiset of accessible fitness values at one level.
#[derive(Debug, Clone, PartialEq)]
pub struct Frontier {
    pub values: Vec<f64>,
    pub level: u32,
}

/// Per-level outcome of a trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelStats {
    pub level: u32,
    /// Accessible vertices at this level; exact until the first capped level,
    /// a lower bound afterwards.
    pub count: u64,
    /// `count` divided by the running product of `children(i)/(i+1)`. Equals
    /// the count martingale for zero-root trials.
    pub martingale: f64,
    /// Whether this level's frontier was truncated to the cap.
    pub capped: bool,
}

/// Full outcome of one trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialResult {
    pub root_mode: RootMode,
    /// Stats for level 0 up to `max_depth`, or up to and including the first
    /// level with count 0.
    pub levels: Vec<LevelStats>,
    pub survived: bool,
    pub extinction_level: Option<u32>,
}

/// Advances a frontier one level: every value spawns its accessible
/// children, each with a fresh fitness above both the parent value and
/// `next_floor`. An empty frontier stays empty.
///
/// This boundary converts between values and the engine's gap
/// representation, so `next_floor` loses resolution as it approaches 1;
/// deep schedules should run through [`run_trial`], which stays in gap
/// space across levels.
pub fn advance_frontier(
    frontier: &Frontier,
    c: u64,
    rng: &mut TrialRng,
    next_floor: f64,
) -> Frontier {
    let gaps: Vec<f64> = frontier.values.iter().map(|&x| 1.0 - x).collect();
    let mut out = Vec::new();
    advance_gaps(&gaps, c, 1.0 - next_floor, rng, &mut out);
    Frontier {
        values: out.iter().map(|&g| 1.0 - g).collect(),
        level: frontier.level + 1,
    }
}

/// Advances a frontier one level, keeping at most `cap` values (the
/// smallest ones). Returns the new values and whether truncation happened.
///
/// The output law is exactly that of [`advance_frontier`] followed by
/// keeping the `cap` smallest values. When the expected offspring count is
/// far above the cap the engine avoids materializing all offspring: it
/// draws, per parent, the binomially distributed number of offspring below a
/// threshold `t` together with their uniform values, which is the exact
/// joint law of the offspring restricted to values below `t`. If at least
/// `cap + 1` values land below `t` they provably contain the `cap` smallest
/// offspring; otherwise the threshold is raised and only the bands between
/// successive thresholds are filled in, each conditioned on the draws so
/// far, until the frontier is resolved (at `t = 1` every offspring has been
/// generated). Threshold placement only affects speed, never the law.
pub fn advance_frontier_capped(
    values: &[f64],
    c: u64,
    next_floor: f64,
    cap: usize,
    rng: &mut TrialRng,
) -> (Vec<f64>, bool) {
    let gaps: Vec<f64> = values.iter().map(|&x| 1.0 - x).collect();
    let mut out = Vec::new();
    let mut scratch = Scratch::default();
    let capped = capped_advance(
        &gaps,
        c,
        1.0 - next_floor,
        cap,
        rng,
        &mut out,
        &mut scratch,
        None,
    );
    (out.iter().map(|&g| 1.0 - g).collect(), capped)
}

/// Exact `Binomial(c, p)` sampler.
///
/// Means up to 10 use CDF inversion seeded by `(1-p)^c`, whose cost is a
/// handful of multiplications plus one step per unit of the sampled value;
/// larger means fall back to the general sampler from `rand_distr`. Success
/// probabilities above one half sample the complement so the inversion
/// start never underflows.
pub(crate) fn sample_binomial(c: u64, p: f64, rng: &mut TrialRng) -> u64 {
    if p <= 0.0 {
        return 0;
    }
    if p >= 1.0 {
        return c;
    }
    if p > 0.5 {
        return c - sample_binomial(c, 1.0 - p, rng);
    }
    let mean = p * c as f64;
    if mean <= 10.0 && c <= i32::MAX as u64 {
        let q = 1.0 - p;
        let ratio = p / q;
        let mut pk = q.powi(c as i32);
        let mut u: f64 = rng.random();
        let mut k = 0u64;
        while u > pk && k < c {
            u -= pk;
            k += 1;
            pk *= ratio * (c - k + 1) as f64 / k as f64;
        }
        k
    } else {
        rand_distr::Binomial::new(c, p)
            .expect("p validated in (0, 0.5]")
            .sample(rng)
    }
}

/// One uncapped level step in gap space: parent gap `g` spawns
/// `Binomial(c, e/w)` children with `e = min(g, w)`, each with gap drawn
/// from `(0, e]`. A width `w <= 0` admits no fitness below 1, so the output
/// stays empty.
fn advance_gaps(gaps: &[f64], c: u64, w: f64, rng: &mut TrialRng, out: &mut Vec<f64>) {
    if w <= 0.0 {
        return;
    }
    for &g in gaps {
        let e = g.min(w);
        let k = sample_binomial(c, e / w, rng);
        for _ in 0..k {
            // 1 - U lies in (0, 1], so a child gap is never exactly zero
            // and a child value never collides with 1.0.
            out.push(e * (1.0 - rng.random::<f64>()));
        }
    }
}

/// Reusable per-trial buffers for the capped advance.
#[derive(Default)]
struct Scratch {
    counts: Vec<u32>,
}

/// Expected-count threshold beyond which the staged scheme replaces
/// generate-everything-then-select.
fn staged_pays_off(expected_total: f64, cap: usize) -> bool {
    expected_total > cap as f64 * 1.25 + 200.0
}

fn capped_advance(
    gaps: &[f64],
    c: u64,
    w: f64,
    cap: usize,
    rng: &mut TrialRng,
    out: &mut Vec<f64>,
    scratch: &mut Scratch,
    forced_target: Option<f64>,
) -> bool {
    out.clear();
    if gaps.is_empty() || w <= 0.0 {
        return false;
    }
    // The cap keeps the `cap` smallest values, i.e. the largest gaps.
    let keep_largest = |a: &f64, b: &f64| f64::total_cmp(b, a);
    let c_f = c as f64;
    let mut mass = 0.0;
    let mut e_max = 0.0f64;
    for &g in gaps {
        let e = g.min(w);
        mass += e / w;
        if e > e_max {
            e_max = e;
        }
    }
    let expected_total = mass * c_f;
    if forced_target.is_none() && !staged_pays_off(expected_total, cap) {
        advance_gaps(gaps, c, w, rng, out);
        if out.len() > cap {
            out.select_nth_unstable_by(cap, keep_largest);
            out.truncate(cap);
            return true;
        }
        return false;
    }

    // Staged path. Offspring gaps of parent i are uniform on (0, e_i); the
    // count above a threshold s is Binomial(c, (e_i - s)/w) and those gaps
    // are uniform on (s, e_i). Later stages draw from the remaining c - n_i
    // children, conditioned on not lying above the previous threshold,
    // which keeps the joint law exact at every stage. Thresholds descend;
    // at s = 0 every offspring has been generated.
    let margin = (cap / 32).max(64) as f64;
    let mut target = forced_target.unwrap_or(cap as f64 + margin);
    let counts = &mut scratch.counts;
    counts.clear();
    let mut s_cur = w;
    let mut total = 0usize;
    let mut first = true;
    loop {
        let s_new = if target >= expected_total {
            0.0
        } else {
            solve_threshold(gaps, w, c_f, target, e_max, s_cur)
        };
        if first {
            for &g in gaps {
                let e = g.min(w);
                let band = (e - s_new).max(0.0);
                let k = if band > 0.0 {
                    sample_binomial(c, (band / w).min(1.0), rng)
                } else {
                    0
                };
                for _ in 0..k {
                    out.push(s_new + band * (1.0 - rng.random::<f64>()));
                }
                counts.push(k as u32);
                total += k as usize;
            }
            first = false;
        } else {
            for (i, &g) in gaps.iter().enumerate() {
                let e = g.min(w);
                let drawn = u64::from(counts[i]);
                if drawn >= c {
                    continue;
                }
                let hi = e.min(s_cur);
                let band = (hi - s_new).max(0.0);
                if band <= 0.0 {
                    continue;
                }
                let consumed = (e - s_cur).max(0.0) / w;
                let p = ((band / w) / (1.0 - consumed)).min(1.0);
                let k = sample_binomial(c - drawn, p, rng);
                for _ in 0..k {
                    out.push(s_new + band * (1.0 - rng.random::<f64>()));
                }
                counts[i] += k as u32;
                total += k as usize;
            }
        }
        s_cur = s_new;
        if total > cap {
            out.select_nth_unstable_by(cap, keep_largest);
            out.truncate(cap);
            return true;
        }
        if s_cur <= 0.0 {
            return false;
        }
        target *= 2.0;
    }
}

/// Picks a gap threshold whose expected above-threshold offspring count is
/// close to `target`. The expected count is piecewise linear and convex in
/// the threshold, so a few Newton steps suffice; accuracy only affects how
/// much gets generated, not the sampled law.
fn solve_threshold(
    gaps: &[f64],
    w: f64,
    c_f: f64,
    target: f64,
    e_max: f64,
    at_most: f64,
) -> f64 {
    let n = gaps.len() as f64;
    let mut s = e_max - target * w / (c_f * n);
    for _ in 0..8 {
        let mut mass = 0.0;
        let mut active = 0.0;
        for &g in gaps {
            let e = g.min(w);
            if e > s {
                mass += (e - s) / w;
                active += 1.0;
            }
        }
        if active == 0.0 {
            s = e_max - target * w / (c_f * n);
            continue;
        }
        let slope = active * c_f / w;
        let step = (mass * c_f - target) / slope;
        s += step;
        if step.abs() < 1e-4 * w {
            break;
        }
    }
    s.clamp(0.0, at_most)
}

/// Runs one trial: advances the frontier `max_depth` times or until
/// extinction, recording per-level counts, normalized counts, and cap flags.
/// Deterministic in `(config, trial_index)`.
pub fn run_trial(config: &TrialConfig, trial_index: u64) -> Result<TrialResult> {
    config.validate()?;
    let mut rng = trial_rng(config.seed, trial_index);
    let w0 = config.env.level_width(0)?;
    // Root gap: the full band width pins the fitness to the floor; the
    // random mode draws the fitness uniformly above it.
    let root_gap = match config.root_mode {
        RootMode::Zero => w0,
        RootMode::Random => w0 * (1.0 - rng.random::<f64>()),
    };
    let mut gaps = vec![root_gap];
    let mut next = Vec::new();
    let mut scratch = Scratch::default();
    let mut levels = vec![LevelStats {
        level: 0,
        count: 1,
        martingale: 1.0,
        capped: false,
    }];
    let mut norm = 1.0f64;
    let mut extinction_level = None;
    for n in 0..u64::from(config.max_depth) {
        let c = config.growth.children(n)?;
        let w = config.env.level_width(n + 1)?;
        let capped = capped_advance(
            &gaps,
            c,
            w,
            config.frontier_cap,
            &mut rng,
            &mut next,
            &mut scratch,
            None,
        );
        std::mem::swap(&mut gaps, &mut next);
        norm *= c as f64 / (n + 1) as f64;
        let count = gaps.len() as u64;
        levels.push(LevelStats {
            level: (n + 1) as u32,
            count,
            martingale: count as f64 / norm,
            capped,
        });
        if count == 0 {
            extinction_level = Some((n + 1) as u32);
            break;
        }
    }
    Ok(TrialResult {
        root_mode: config.root_mode,
        survived: extinction_level.is_none(),
        levels,
        extinction_level,
    })
}

/// Per-level aggregate over many trials.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRow {
    pub level: u32,
    pub n_trials: u64,
    /// Trials still alive at this level.
    pub n_survived: u64,
    pub p_hat: f64,
    /// Wald standard error `sqrt(p(1-p)/trials)`; raw counts are reported so
    /// exact intervals can be computed downstream.
    pub stderr: f64,
    /// Fraction of trials truncated at this level or any earlier one; from
    /// the first capped level onward, `p_hat` is a lower bound.
    pub frac_capped: f64,
}

/// Survival estimates for every level up to the configured depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelEstimates {
    pub rows: Vec<LevelRow>,
}

#[derive(Clone)]
struct Accumulator {
    survived: Vec<u64>,
    capped_from: Vec<u64>,
}

impl Accumulator {
    fn new(depth: usize) -> Self {
        Accumulator {
            survived: vec![0; depth + 1],
            capped_from: vec![0; depth + 1],
        }
    }

    fn add_trial(&mut self, trial: &TrialResult) {
        let mut first_capped = None;
        for stats in &trial.levels {
            if stats.count > 0 {
                self.survived[stats.level as usize] += 1;
            }
            if stats.capped && first_capped.is_none() {
                first_capped = Some(stats.level as usize);
            }
        }
        if let Some(fc) = first_capped {
            for slot in &mut self.capped_from[fc..] {
                *slot += 1;
            }
        }
    }

    fn merge(mut self, other: Accumulator) -> Accumulator {
        for (a, b) in self.survived.iter_mut().zip(other.survived) {
            *a += b;
        }
        for (a, b) in self.capped_from.iter_mut().zip(other.capped_from) {
            *a += b;
        }
        self
    }
}

/// Estimates `P(some level-n vertex is accessible)` for every `n` up to
/// `config.max_depth` from `trials` independent trials.
///
/// Survival-to-`n` is monotone within each trial, so the estimates are
/// nonincreasing in `n` exactly, not just in expectation. Trials run in
/// parallel; every per-trial stream is keyed by `(seed, trial_index)` and
/// the merge is integer addition, so results do not depend on the thread
/// count.
pub fn estimate_lambda_prob(config: &TrialConfig, trials: u64) -> Result<LevelEstimates> {
    if trials < 1 {
        return Err(Error::Config("trials must be >= 1".to_string()));
    }
    config.validate()?;
    let depth = config.max_depth as usize;
    let acc = (0..trials)
        .into_par_iter()
        .fold(
            || Accumulator::new(depth),
            |mut acc, idx| {
                let trial = run_trial(config, idx).expect("config validated above");
                acc.add_trial(&trial);
                acc
            },
        )
        .reduce(|| Accumulator::new(depth), Accumulator::merge);
    let rows = (0..=depth)
        .map(|n| {
            let s = acc.survived[n];
            let p = s as f64 / trials as f64;
            LevelRow {
                level: n as u32,
                n_trials: trials,
                n_survived: s,
                p_hat: p,
                stderr: (p * (1.0 - p) / trials as f64).sqrt(),
                frac_capped: acc.capped_from[n] as f64 / trials as f64,
            }
        })
        .collect();
    Ok(LevelEstimates { rows })
}

/// Extracts the martingale sequence `M_0..M_n` from a zero-root trial.
///
/// `M_n` is the level-`n` count divided by the product of
/// `children(i)/(i+1)` over `i < n`; with zero root fitness its mean is one
/// at every level. Random-root trials are rejected because that
/// normalization does not apply to them.
pub fn martingale_sequence(trial: &TrialResult, _growth: &GrowthFunction) -> Result<Vec<f64>> {
    if trial.root_mode != RootMode::Zero {
        return Err(Error::Config(
            "martingale normalization requires a zero-fitness root".to_string(),
        ));
    }
    Ok(trial.levels.iter().map(|s| s.martingale).collect())
}

/// Mean, standard error, and second moment of `M_n` per level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MartingaleRow {
    pub level: u32,
    pub mean: f64,
    pub stderr: f64,
    pub second_moment: f64,
}

/// Estimates the martingale moments over `trials` zero-root trials.
///
/// Extinct trials contribute zeros beyond their extinction level. The
/// per-trial sequences are reduced in trial order, so the floating-point
/// sums are identical regardless of how many threads ran the trials.
pub fn estimate_martingale(config: &TrialConfig, trials: u64) -> Result<Vec<MartingaleRow>> {
    if config.root_mode != RootMode::Zero {
        return Err(Error::Config(
            "martingale normalization requires a zero-fitness root".to_string(),
        ));
    }
    if trials < 1 {
        return Err(Error::Config("trials must be >= 1".to_string()));
    }
    config.validate()?;
    let depth = config.max_depth as usize;
    let per_trial: Vec<Vec<f64>> = (0..trials)
        .into_par_iter()
        .map(|idx| {
            let trial = run_trial(config, idx).expect("config validated above");
            let mut ms: Vec<f64> = trial.levels.iter().map(|s| s.martingale).collect();
            ms.resize(depth + 1, 0.0);
            ms
        })
        .collect();
    let mut sum = vec![0.0f64; depth + 1];
    let mut sum_sq = vec![0.0f64; depth + 1];
    for ms in &per_trial {
        for (n, &m) in ms.iter().enumerate() {
            sum[n] += m;
            sum_sq[n] += m * m;
        }
    }
    let t = trials as f64;
    Ok((0..=depth)
        .map(|n| {
            let mean = sum[n] / t;
            let second = sum_sq[n] / t;
            let var = (second - mean * mean).max(0.0);
            MartingaleRow {
                level: n as u32,
                mean,
                stderr: (var / t).sqrt(),
                second_moment: second,
            }
        })
        .collect())
}
