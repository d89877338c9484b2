//! Dense univariate polynomials with `BigRational` coefficients. The exact
//! solvers only need evaluation, ring operations, and antiderivatives, so
//! the representation stays a plain coefficient vector.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Polynomial `coeffs[0] + coeffs[1] x + ... + coeffs[d] x^d` with exact
/// rational coefficients. Trailing zero coefficients are trimmed, and the
/// zero polynomial is the empty vector.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatPoly {
    coeffs: Vec<BigRational>,
}

impl RatPoly {
    pub fn zero() -> Self {
        RatPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        RatPoly::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        RatPoly::from_coeffs(vec![c])
    }

    /// `c * x^k`.
    pub fn monomial(c: BigRational, k: usize) -> Self {
        let mut coeffs = vec![BigRational::zero(); k + 1];
        coeffs[k] = c;
        RatPoly::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        RatPoly { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree of the zero polynomial is reported as 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigRational {
        self.coeffs.get(k).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        let mut acc = BigRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn add(&self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect();
        RatPoly::from_coeffs(coeffs)
    }

    pub fn sub(&self, rhs: &RatPoly) -> RatPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let coeffs = (0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect();
        RatPoly::from_coeffs(coeffs)
    }

    pub fn scale(&self, c: &BigRational) -> RatPoly {
        RatPoly::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn mul(&self, rhs: &RatPoly) -> RatPoly {
        if self.is_zero() || rhs.is_zero() {
            return RatPoly::zero();
        }
        let mut coeffs =
            vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                coeffs[i + j] += a * b;
            }
        }
        RatPoly::from_coeffs(coeffs)
    }

    pub fn pow(&self, mut e: u64) -> RatPoly {
        let mut base = self.clone();
        let mut acc = RatPoly::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Antiderivative with zero constant term, so `F(x)` equals the integral
    /// from 0 to `x`.
    pub fn antiderivative(&self) -> RatPoly {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(BigRational::zero());
        for (k, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / BigRational::from_integer(BigInt::from(k + 1)));
        }
        RatPoly::from_coeffs(coeffs)
    }

    /// The integral from `x` to 1, as a polynomial in `x`.
    pub fn integral_x_to_1(&self) -> RatPoly {
        let f = self.antiderivative();
        RatPoly::constant(f.eval(&BigRational::one())).sub(&f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    fn poly(cs: &[(i64, i64)]) -> RatPoly {
        RatPoly::from_coeffs(cs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    #[test]
    fn arithmetic_matches_hand_expansion() {
        // (1 + x)(1 - x) = 1 - x^2.
        let p = poly(&[(1, 1), (1, 1)]);
        let q = poly(&[(1, 1), (-1, 1)]);
        assert_eq!(p.mul(&q), poly(&[(1, 1), (0, 1), (-1, 1)]));
        // (1 + x)^3 = 1 + 3x + 3x^2 + x^3.
        assert_eq!(p.pow(3), poly(&[(1, 1), (3, 1), (3, 1), (1, 1)]));
        assert_eq!(p.sub(&p), RatPoly::zero());
        assert_eq!(p.add(&q), poly(&[(2, 1)]));
        assert_eq!(p.add(&q).degree(), 0);
    }

    #[test]
    fn evaluation_uses_exact_rationals() {
        // p(x) = 1/3 + x^2 at x = 1/2 is 7/12.
        let p = poly(&[(1, 3), (0, 1), (1, 1)]);
        assert_eq!(p.eval(&rat(1, 2)), rat(7, 12));
        assert_eq!(RatPoly::zero().eval(&rat(5, 7)), rat(0, 1));
    }

    #[test]
    fn antiderivative_and_tail_integral_agree() {
        // d/dx [x^2/2 + x^3] = x + 3x^2.
        let p = poly(&[(0, 1), (1, 1), (3, 1)]);
        let f = p.antiderivative();
        assert_eq!(f, poly(&[(0, 1), (0, 1), (1, 2), (1, 1)]));
        // Integral of x + 3x^2 from 1/2 to 1 is 3/2 - 1/8 - 1/8 = 10/8.
        let tail = p.integral_x_to_1();
        assert_eq!(tail.eval(&rat(1, 2)), rat(10, 8));
        assert_eq!(tail.eval(&rat(1, 1)), rat(0, 1));
    }

    #[test]
    fn monomial_and_pow_edge_cases() {
        assert_eq!(RatPoly::monomial(rat(2, 1), 3).degree(), 3);
        assert_eq!(RatPoly::monomial(rat(0, 1), 3), RatPoly::zero());
        assert_eq!(poly(&[(5, 1)]).pow(0), RatPoly::one());
        assert_eq!(RatPoly::zero().pow(4), RatPoly::zero());
        assert!(RatPoly::zero().mul(&RatPoly::one()).is_zero());
    }
}
