//! Exact and high-accuracy solvers for accessibility probabilities.
//!
//! Writing `u_i(x)` for the probability that a level-`i` vertex of fitness
//! `x` starts an accessible path to the bottom, the tree structure gives
//!
//! ```text
//! u_n(x) = 1
//! u_i(x) = 1 - (1 - int_x^1 u_{i+1}(y) dy)^children(i)
//! ```
//!
//! because each child clears the run independently with the integrated
//! probability. The answer is `u_0(0)` for a zero-fitness root and
//! `int_0^1 u_0` for a uniform one. Two backends evaluate the recursion:
//! an exact one over rational polynomials, whose degree grows roughly like
//! the level sizes, and a composite Gauss-Legendre one for trees the
//! polynomial degree cap rules out.
//!
//! The same integral style settles two relatives: the probability that a
//! growing competition sets a record at every edition, and the probability
//! of an increasing chain across levels with rising fitness floors.

pub mod poly;
pub mod quad;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::env::EnvSchedule;
use crate::error::{Error, Result};
use crate::growth::GrowthFunction;
use crate::sim::RootMode;
pub use poly::RatPoly;
pub use quad::QuadResult;

/// Backend for [`lambda_prob_exact`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    /// Exact `BigRational` polynomial recursion.
    Polynomial,
    /// Composite Gauss-Legendre refinement.
    Quadrature,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Polynomial => write!(f, "polynomial"),
            Method::Quadrature => write!(f, "quadrature"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "polynomial" => Ok(Method::Polynomial),
            "quadrature" => Ok(Method::Quadrature),
            other => Err(Error::Config(format!(
                "unknown method {other:?}, expected polynomial or quadrature"
            ))),
        }
    }
}

/// Solver settings; the defaults suit depths where either backend works.
#[derive(Debug, Clone)]
pub struct ExactOptions {
    /// Backend choice; `None` picks the polynomial backend whenever the
    /// predicted degree fits under `degree_cap`.
    pub method: Option<Method>,
    pub degree_cap: usize,
    /// Quadrature stops when two refinements agree this closely.
    pub tol: f64,
    pub order: usize,
    pub max_panels: usize,
}

impl Default for ExactOptions {
    fn default() -> Self {
        ExactOptions {
            method: None,
            degree_cap: 3000,
            tol: 1e-10,
            order: 12,
            max_panels: 4096,
        }
    }
}

/// Solver output. `rational` is populated by the polynomial backend only,
/// and `error_estimate` is 0 when the value is exact.
#[derive(Debug, Clone)]
pub struct ExactValue {
    pub method: Method,
    pub value: f64,
    pub rational: Option<BigRational>,
    pub error_estimate: f64,
}

/// Degree of `u_0` under the recursion `deg_i = children(i) * (deg_{i+1} + 1)`,
/// saturating at `u128::MAX`.
pub fn predicted_degree(growth: &GrowthFunction, depth: u32) -> Result<u128> {
    let mut deg: u128 = 0;
    for i in (0..u64::from(depth)).rev() {
        let c = u128::from(growth.children(i)?);
        deg = c.saturating_mul(deg.saturating_add(1));
    }
    Ok(deg)
}

/// Exact accessibility probability by the rational polynomial recursion.
pub fn lambda_prob_poly(
    growth: &GrowthFunction,
    depth: u32,
    root: RootMode,
    degree_cap: usize,
) -> Result<BigRational> {
    let predicted = predicted_degree(growth, depth)?;
    if predicted > degree_cap as u128 {
        return Err(Error::Capacity(format!(
            "polynomial recursion reaches degree {predicted} at depth {depth}, \
             above the cap {degree_cap}; use the quadrature method"
        )));
    }
    let mut u = RatPoly::one();
    for i in (0..u64::from(depth)).rev() {
        let c = growth.children(i)?;
        let miss = RatPoly::one().sub(&u.integral_x_to_1());
        u = RatPoly::one().sub(&miss.pow(c));
    }
    Ok(match root {
        RootMode::Zero => u.eval(&BigRational::zero()),
        RootMode::Random => u.antiderivative().eval(&BigRational::one()),
    })
}

/// Probability that some depth-`depth` vertex is accessible from the root.
pub fn lambda_prob_exact(
    growth: &GrowthFunction,
    depth: u32,
    root: RootMode,
    opts: &ExactOptions,
) -> Result<ExactValue> {
    let method = match opts.method {
        Some(m) => m,
        None => {
            if predicted_degree(growth, depth)? <= opts.degree_cap as u128 {
                Method::Polynomial
            } else {
                Method::Quadrature
            }
        }
    };
    match method {
        Method::Polynomial => {
            let r = lambda_prob_poly(growth, depth, root, opts.degree_cap)?;
            let value = r.to_f64().ok_or_else(|| {
                Error::Accuracy("exact probability does not fit in f64".to_string())
            })?;
            Ok(ExactValue { method, value, rational: Some(r), error_estimate: 0.0 })
        }
        Method::Quadrature => {
            let q = quad::lambda_prob_quad(
                growth,
                depth,
                root,
                opts.tol,
                opts.order,
                opts.max_panels,
            )?;
            Ok(ExactValue {
                method,
                value: q.value,
                rational: None,
                error_estimate: q.error_estimate,
            })
        }
    }
}

/// Exact probability that a competition sets a record at every one of its
/// first `n` editions, where edition `j` scores the maximum of `alphas[j-1]`
/// iid uniforms. With `q_j(x) = P(perfect run so far, current record < x)`,
///
/// ```text
/// q_1(x) = x^alpha(1)
/// q_j(x) = int_0^x q_{j-1}(y) alpha(j) y^(alpha(j)-1) dy
/// ```
///
/// and the answer is `q_n(1)`.
pub fn record_chain_prob(alphas: &[u64], n: usize) -> Result<BigRational> {
    if n == 0 {
        return Ok(BigRational::one());
    }
    if alphas.len() < n {
        return Err(Error::Config(format!(
            "need {n} participant counts, got {}",
            alphas.len()
        )));
    }
    if alphas[..n].iter().any(|&a| a == 0) {
        return Err(Error::Config(
            "participant counts must be positive".to_string(),
        ));
    }
    let total: u64 = alphas[..n].iter().sum();
    if total > 200_000 {
        return Err(Error::Capacity(format!(
            "record recursion reaches polynomial degree {total}"
        )));
    }
    let mut q = RatPoly::monomial(BigRational::one(), alphas[0] as usize);
    for &a in &alphas[1..n] {
        let density = RatPoly::monomial(
            BigRational::from_integer(BigInt::from(a)),
            (a - 1) as usize,
        );
        q = q.mul(&density).antiderivative();
    }
    Ok(q.eval(&BigRational::one()))
}

/// Continuous piecewise polynomial on [0, 1]: `polys[j]` applies on
/// `[breaks[j], breaks[j + 1]]`.
#[derive(Debug, Clone)]
struct PiecewisePoly {
    breaks: Vec<BigRational>,
    polys: Vec<RatPoly>,
}

impl PiecewisePoly {
    fn eval(&self, x: &BigRational) -> BigRational {
        let mut j = 0;
        while j + 1 < self.polys.len() && self.breaks[j + 1] < *x {
            j += 1;
        }
        self.polys[j].eval(x)
    }

    /// `x` maps to the integral from `x` to 1.
    fn integral_from_x(&self) -> PiecewisePoly {
        let m = self.polys.len();
        let antis: Vec<RatPoly> = self.polys.iter().map(RatPoly::antiderivative).collect();
        let mut polys = vec![RatPoly::zero(); m];
        let mut tail = BigRational::zero();
        for j in (0..m).rev() {
            let at_right = antis[j].eval(&self.breaks[j + 1]);
            polys[j] = RatPoly::constant(&at_right + &tail).sub(&antis[j]);
            tail += at_right - antis[j].eval(&self.breaks[j]);
        }
        PiecewisePoly { breaks: self.breaks.clone(), polys }
    }

    fn scale(&self, c: &BigRational) -> PiecewisePoly {
        PiecewisePoly {
            breaks: self.breaks.clone(),
            polys: self.polys.iter().map(|p| p.scale(c)).collect(),
        }
    }

    /// Freezes the function at its value in `b` for all `x <= b`.
    fn clamp_below(&self, b: &BigRational) -> PiecewisePoly {
        if *b <= self.breaks[0] {
            return self.clone();
        }
        let mut j = 0;
        while self.breaks[j + 1] < *b {
            j += 1;
        }
        let mut breaks = vec![self.breaks[0].clone(), b.clone()];
        let mut polys = vec![RatPoly::constant(self.eval(b))];
        if *b < self.breaks[j + 1] {
            polys.push(self.polys[j].clone());
            breaks.extend(self.breaks[j + 1..].iter().cloned());
        } else {
            breaks.extend(self.breaks[j + 2..].iter().cloned());
        }
        polys.extend(self.polys[j + 1..].iter().cloned());
        PiecewisePoly { breaks, polys }
    }
}

/// Exact probability of an increasing chain `X_0 < X_1 < ... < X_n` where
/// `X_k` is uniform on `(a_k, 1)` and `a_k` is the schedule floor at chain
/// index `k`. Floors are taken at their exact f64 values, so the result
/// matches what the simulation draws against. With
/// `h_k(x) = P(X_k > x and the chain from k on is increasing)`,
///
/// ```text
/// h_n(x) = (1 - max(x, a_n)) / (1 - a_n)
/// h_k(x) = int_{max(x, a_k)}^1 h_{k+1}(y) dy / (1 - a_k)
/// ```
///
/// and the answer is `h_0(0)`. The product of the overlap ratios,
/// [`EnvSchedule::chain_product`], ignores the conditioning on earlier
/// values and is a lower bound for this probability.
pub fn varyenv_chain_exact(env: &EnvSchedule, n: u64) -> Result<BigRational> {
    if n > 4096 {
        return Err(Error::Capacity(format!(
            "chain length {n} is too large for the exact recursion"
        )));
    }
    let steps = n as usize;
    let mut floors = Vec::with_capacity(steps + 1);
    for k in 0..=n {
        let f = env.level_floor(k)?;
        if !(0.0..1.0).contains(&f) {
            return Err(Error::Accuracy(format!(
                "level floor {f} at chain index {k} leaves [0, 1) in f64"
            )));
        }
        floors.push(BigRational::from_float(f).expect("floor is finite"));
    }
    let one = BigRational::one();
    let a_last = floors[steps].clone();
    let inv = (&one - &a_last).recip();
    let lin = RatPoly::from_coeffs(vec![inv.clone(), -inv]);
    let mut h = if a_last.is_zero() {
        PiecewisePoly { breaks: vec![BigRational::zero(), one.clone()], polys: vec![lin] }
    } else {
        PiecewisePoly {
            breaks: vec![BigRational::zero(), a_last, one.clone()],
            polys: vec![RatPoly::one(), lin],
        }
    };
    for k in (0..steps).rev() {
        let inv = (&one - &floors[k]).recip();
        h = h.integral_from_x().scale(&inv).clamp_below(&floors[k]);
    }
    let p = h.eval(&BigRational::zero());
    debug_assert!(!p.is_negative() && p <= one);
    Ok(p)
}
