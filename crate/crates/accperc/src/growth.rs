//! Growth functions for spherically symmetric trees.
//!
//! A growth function assigns to every level `i >= 0` the number of children
//! `children(i)` that each level-`i` vertex has. The tree it describes is
//! infinite and locally finite, so `children(i) >= 1` everywhere a value is
//! defined. Level sizes are the running products of children counts and grow
//! beyond machine integers quickly, so [`GrowthFunction::level_size`] returns
//! a big integer and [`GrowthFunction::level_size_ln`] the natural logarithm.

use num_bigint::BigUint;
use num_traits::One;
use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Level-indexed children counts for a spherically symmetric tree.
///
/// `children(i)` is the successor count of a level-`i` vertex, not its graph
/// degree; every level size and mean-offspring formula in this crate is a
/// product of successor counts.
///
/// Serializes to and from a tagged JSON object, for example
/// `{"kind":"linear_ceil","alpha":1.5}` or `{"kind":"varying","alphas":[2,3]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrowth", into = "RawGrowth")]
pub enum GrowthFunction {
    /// `children(i) = ceil((i + 1) * alpha)` with `alpha > 0`, computed
    /// exactly for the binary value of `alpha` (no floating-point rounding in
    /// the product or the ceiling).
    LinearCeil { alpha: f64 },
    /// `children(i) = (i + 1) * alphas[i]`; defined only for
    /// `i < alphas.len()`.
    VaryingLinear { alphas: Vec<u64> },
    /// `children(i) = i + 1`, the factorial tree.
    Factorial,
    /// `children(i) = d` with `d >= 2`.
    Homogeneous { d: u64 },
    /// `children(i) = children[i]`; defined only for `i < children.len()`.
    Explicit { children: Vec<u64> },
}

/// Serde mirror of [`GrowthFunction`]; deserialization funnels through
/// [`GrowthFunction::try_from`] so invalid parameters are rejected at
/// construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawGrowth {
    LinearCeil { alpha: f64 },
    #[serde(rename = "varying")]
    VaryingLinear { alphas: Vec<u64> },
    Factorial,
    Homogeneous { d: u64 },
    Explicit { children: Vec<u64> },
}

impl TryFrom<RawGrowth> for GrowthFunction {
    type Error = Error;

    fn try_from(raw: RawGrowth) -> Result<Self> {
        match raw {
            RawGrowth::LinearCeil { alpha } => GrowthFunction::linear_ceil(alpha),
            RawGrowth::VaryingLinear { alphas } => GrowthFunction::varying_linear(alphas),
            RawGrowth::Factorial => Ok(GrowthFunction::Factorial),
            RawGrowth::Homogeneous { d } => GrowthFunction::homogeneous(d),
            RawGrowth::Explicit { children } => GrowthFunction::explicit(children),
        }
    }
}

impl From<GrowthFunction> for RawGrowth {
    fn from(g: GrowthFunction) -> Self {
        match g {
            GrowthFunction::LinearCeil { alpha } => RawGrowth::LinearCeil { alpha },
            GrowthFunction::VaryingLinear { alphas } => RawGrowth::VaryingLinear { alphas },
            GrowthFunction::Factorial => RawGrowth::Factorial,
            GrowthFunction::Homogeneous { d } => RawGrowth::Homogeneous { d },
            GrowthFunction::Explicit { children } => RawGrowth::Explicit { children },
        }
    }
}

impl GrowthFunction {
    /// Linear-ceiling growth `children(i) = ceil((i + 1) * alpha)`.
    ///
    /// `alpha` must be finite and strictly positive. The ceiling is taken of
    /// the exact binary value of `alpha`, so non-dyadic decimals behave as
    /// their nearest `f64` (for example `alpha = 1.1` stores a value slightly
    /// above 1.1, and `children(9) = 12` rather than 11).
    pub fn linear_ceil(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::Config(format!(
                "linear_ceil alpha must be finite and positive, got {alpha}"
            )));
        }
        Ok(GrowthFunction::LinearCeil { alpha })
    }

    /// Varying linear growth `children(i) = (i + 1) * alphas[i]`.
    ///
    /// Every multiplier must be a positive integer; levels at or beyond
    /// `alphas.len()` are out of range.
    pub fn varying_linear(alphas: Vec<u64>) -> Result<Self> {
        if alphas.iter().any(|&a| a == 0) {
            return Err(Error::Config(
                "varying alphas must all be positive".to_string(),
            ));
        }
        Ok(GrowthFunction::VaryingLinear { alphas })
    }

    /// Homogeneous growth `children(i) = d` with `d >= 2`.
    pub fn homogeneous(d: u64) -> Result<Self> {
        if d < 2 {
            return Err(Error::Config(format!("homogeneous d must be >= 2, got {d}")));
        }
        Ok(GrowthFunction::Homogeneous { d })
    }

    /// Explicit finite children sequence; levels at or beyond
    /// `children.len()` are out of range.
    pub fn explicit(children: Vec<u64>) -> Result<Self> {
        if children.iter().any(|&c| c == 0) {
            return Err(Error::Config(
                "explicit children counts must all be positive".to_string(),
            ));
        }
        Ok(GrowthFunction::Explicit { children })
    }

    /// Number of children of every vertex at level `level`.
    pub fn children(&self, level: u64) -> Result<u64> {
        match self {
            GrowthFunction::LinearCeil { alpha } => ceil_mul(*alpha, level + 1),
            GrowthFunction::VaryingLinear { alphas } => match alphas.get(usize::try_from(level).unwrap_or(usize::MAX)) {
                Some(&a) => (level + 1).checked_mul(a).ok_or_else(|| {
                    Error::Capacity(format!("children count at level {level} overflows u64"))
                }),
                None => Err(Error::Config(format!(
                    "varying growth defined for {} levels, level {level} requested",
                    alphas.len()
                ))),
            },
            GrowthFunction::Factorial => Ok(level + 1),
            GrowthFunction::Homogeneous { d } => Ok(*d),
            GrowthFunction::Explicit { children } => children
                .get(usize::try_from(level).unwrap_or(usize::MAX))
                .copied()
                .ok_or_else(|| {
                    Error::Config(format!(
                        "explicit growth defined for {} levels, level {level} requested",
                        children.len()
                    ))
                }),
        }
    }

    /// Number of levels for which `children` is defined, or `None` when the
    /// growth function is defined for every level.
    pub fn horizon(&self) -> Option<u64> {
        match self {
            GrowthFunction::VaryingLinear { alphas } => Some(alphas.len() as u64),
            GrowthFunction::Explicit { children } => Some(children.len() as u64),
            _ => None,
        }
    }

    /// Exact number of vertices at level `n`: the product of `children(i)`
    /// for `i < n`. The empty product at `n = 0` is 1 (the root).
    pub fn level_size(&self, n: u64) -> Result<BigUint> {
        let mut size = BigUint::one();
        for i in 0..n {
            size *= self.children(i)?;
        }
        Ok(size)
    }

    /// Natural logarithm of the level-`n` size, for levels whose exact size
    /// is astronomically large.
    pub fn level_size_ln(&self, n: u64) -> Result<f64> {
        let mut ln = 0.0;
        for i in 0..n {
            ln += (self.children(i)? as f64).ln();
        }
        Ok(ln)
    }
}

impl fmt::Display for GrowthFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GrowthFunction::LinearCeil { alpha } => write!(f, "linear_ceil(alpha={alpha})"),
            GrowthFunction::VaryingLinear { alphas } => {
                write!(f, "varying(alphas={alphas:?})")
            }
            GrowthFunction::Factorial => write!(f, "factorial"),
            GrowthFunction::Homogeneous { d } => write!(f, "homogeneous(d={d})"),
            GrowthFunction::Explicit { children } => write!(f, "explicit(children={children:?})"),
        }
    }
}

/// Exact `ceil(k * alpha)` for a positive finite `alpha` and `k >= 1`.
///
/// Decomposes `alpha` into its integer mantissa and binary exponent, forms
/// the product `k * mantissa` in 128-bit arithmetic, and applies the binary
/// shift with an exact ceiling, so the result is the true ceiling of the
/// rational number `k * alpha` with `alpha` read as its exact binary value.
pub fn ceil_mul(alpha: f64, k: u64) -> Result<u64> {
    debug_assert!(alpha.is_finite() && alpha > 0.0);
    let bits = alpha.to_bits();
    let raw_exp = ((bits >> 52) & 0x7ff) as i64;
    let raw_mant = bits & ((1u64 << 52) - 1);
    // Normal numbers carry an implicit leading bit; subnormals do not.
    let (mant, exp) = if raw_exp == 0 {
        (raw_mant, -1074i64)
    } else {
        (raw_mant | (1u64 << 52), raw_exp - 1075)
    };
    let product = u128::from(mant)
        .checked_mul(u128::from(k))
        .ok_or_else(|| Error::Capacity(format!("ceil({k} * {alpha}) overflows")))?;
    let value = if exp >= 0 {
        if exp >= 64 {
            return Err(Error::Capacity(format!("ceil({k} * {alpha}) overflows")));
        }
        product
            .checked_shl(exp as u32)
            .ok_or_else(|| Error::Capacity(format!("ceil({k} * {alpha}) overflows")))?
    } else {
        let shift = (-exp) as u32;
        if shift >= 128 {
            // The product is below 2^128 and the shift clears it entirely;
            // any positive value ceils to 1, and zero stays zero.
            return Ok(u64::from(product != 0));
        }
        let floor = product >> shift;
        let remainder = product & ((1u128 << shift) - 1);
        floor + u128::from(remainder != 0)
    };
    u64::try_from(value)
        .map_err(|_| Error::Capacity(format!("ceil({k} * {alpha}) exceeds u64 range")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::ToPrimitive;

    fn ceil_mul_oracle(alpha: f64, k: u64) -> u64 {
        let exact = BigRational::from_float(alpha).expect("finite alpha")
            * BigRational::from(BigInt::from(k));
        exact.ceil().to_integer().to_u64().expect("fits u64")
    }

    #[test]
    fn children_match_documented_examples() {
        assert_eq!(GrowthFunction::Factorial.children(3).unwrap(), 4);
        let g = GrowthFunction::linear_ceil(1.5).unwrap();
        assert_eq!(g.children(0).unwrap(), 2);
        let g = GrowthFunction::varying_linear(vec![2, 3]).unwrap();
        assert_eq!(g.children(1).unwrap(), 6);
        let g = GrowthFunction::homogeneous(3).unwrap();
        assert_eq!(g.children(17).unwrap(), 3);
        let g = GrowthFunction::explicit(vec![2, 4, 6]).unwrap();
        assert_eq!(g.children(2).unwrap(), 6);
    }

    #[test]
    fn level_size_match_documented_examples() {
        assert_eq!(
            GrowthFunction::Factorial.level_size(4).unwrap(),
            BigUint::from(24u32)
        );
        let g = GrowthFunction::linear_ceil(2.0).unwrap();
        assert_eq!(g.level_size(0).unwrap(), BigUint::one());
        assert_eq!(g.level_size(3).unwrap(), BigUint::from(48u32));
    }

    #[test]
    fn level_size_follows_recurrence() {
        let g = GrowthFunction::linear_ceil(1.5).unwrap();
        for n in 0..12 {
            let expected = g.level_size(n).unwrap() * g.children(n).unwrap();
            assert_eq!(g.level_size(n + 1).unwrap(), expected);
        }
    }

    #[test]
    fn level_size_ln_tracks_exact_size() {
        let g = GrowthFunction::linear_ceil(3.0).unwrap();
        for n in [1u64, 5, 20, 60] {
            let exact = g.level_size(n).unwrap();
            let expected = exact.to_f64().unwrap().ln();
            let got = g.level_size_ln(n).unwrap();
            assert!((got - expected).abs() < 1e-9 * expected.abs().max(1.0));
        }
    }

    #[test]
    fn linear_ceil_with_integer_alpha_matches_varying() {
        let a = GrowthFunction::linear_ceil(2.0).unwrap();
        let b = GrowthFunction::varying_linear(vec![2; 40]).unwrap();
        for i in 0..40 {
            assert_eq!(a.children(i).unwrap(), b.children(i).unwrap());
        }
    }

    #[test]
    fn linear_ceil_with_alpha_one_matches_factorial() {
        let a = GrowthFunction::linear_ceil(1.0).unwrap();
        for i in 0..200 {
            assert_eq!(a.children(i).unwrap(), i + 1);
        }
    }

    #[test]
    fn ceil_mul_agrees_with_rational_oracle() {
        let alphas = [
            0.5, 1.0, 1.1, 1.5, 2.0, 2.5, 3.0, 0.1, 7.25, 1e-3, 123.456, 0.3333333333333333,
        ];
        for &alpha in &alphas {
            for k in 1..=400u64 {
                assert_eq!(
                    ceil_mul(alpha, k).unwrap(),
                    ceil_mul_oracle(alpha, k),
                    "alpha={alpha} k={k}"
                );
            }
        }
    }

    #[test]
    fn ceil_mul_handles_extreme_magnitudes() {
        assert_eq!(ceil_mul(f64::MIN_POSITIVE, 3).unwrap(), 1);
        assert_eq!(ceil_mul(5e-324, 1).unwrap(), 1);
        assert_eq!(ceil_mul(1.0, u64::MAX / 2).unwrap(), u64::MAX / 2);
        assert!(ceil_mul(1e300, 2).is_err());
    }

    #[test]
    fn invalid_parameters_are_rejected_at_construction() {
        assert!(GrowthFunction::linear_ceil(0.0).is_err());
        assert!(GrowthFunction::linear_ceil(-1.5).is_err());
        assert!(GrowthFunction::linear_ceil(f64::NAN).is_err());
        assert!(GrowthFunction::homogeneous(1).is_err());
        assert!(GrowthFunction::varying_linear(vec![2, 0]).is_err());
        assert!(GrowthFunction::explicit(vec![0]).is_err());
    }

    #[test]
    fn finite_growths_error_beyond_their_horizon() {
        let g = GrowthFunction::explicit(vec![2, 4, 6]).unwrap();
        assert_eq!(g.horizon(), Some(3));
        assert!(g.children(3).is_err());
        let g = GrowthFunction::varying_linear(vec![2, 3]).unwrap();
        assert_eq!(g.horizon(), Some(2));
        assert!(g.children(2).is_err());
        assert!(GrowthFunction::Factorial.horizon().is_none());
    }

    #[test]
    fn json_round_trip_preserves_every_variant() {
        let variants = vec![
            GrowthFunction::linear_ceil(1.5).unwrap(),
            GrowthFunction::varying_linear(vec![2, 3, 2]).unwrap(),
            GrowthFunction::Factorial,
            GrowthFunction::homogeneous(3).unwrap(),
            GrowthFunction::explicit(vec![2, 4, 6]).unwrap(),
        ];
        for g in variants {
            let json = serde_json::to_string(&g).unwrap();
            let back: GrowthFunction = serde_json::from_str(&json).unwrap();
            assert_eq!(g, back, "{json}");
        }
    }

    #[test]
    fn json_schema_matches_documented_form() {
        let g: GrowthFunction = serde_json::from_str(r#"{"kind":"linear_ceil","alpha":1.5}"#).unwrap();
        assert_eq!(g, GrowthFunction::LinearCeil { alpha: 1.5 });
        let g: GrowthFunction = serde_json::from_str(r#"{"kind":"varying","alphas":[2,3,2]}"#).unwrap();
        assert_eq!(g.children(2).unwrap(), 6);
        let g: GrowthFunction = serde_json::from_str(r#"{"kind":"factorial"}"#).unwrap();
        assert_eq!(g, GrowthFunction::Factorial);
        let g: GrowthFunction = serde_json::from_str(r#"{"kind":"homogeneous","d":3}"#).unwrap();
        assert_eq!(g.children(0).unwrap(), 3);
        let g: GrowthFunction = serde_json::from_str(r#"{"kind":"explicit","children":[2,4,6]}"#).unwrap();
        assert_eq!(g.children(1).unwrap(), 4);
        assert!(serde_json::from_str::<GrowthFunction>(r#"{"kind":"homogeneous","d":1}"#).is_err());
    }
}
