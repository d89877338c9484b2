//! Composite Gauss-Legendre solver for the accessibility recursion. The
//! level functions are smooth on [0, 1], so each sweep projects the current
//! level onto a per-panel Legendre basis; partial integrals of that basis
//! give the tail integral at every node without any global resampling. The
//! panel count doubles until two successive results agree to the requested
//! tolerance, so the tolerance controls the reported accuracy while the
//! basis order only affects how fast panels converge.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::growth::GrowthFunction;
use crate::sim::RootMode;

/// Converged quadrature output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Difference between the last two panel refinements.
    pub error_estimate: f64,
    /// Panel count of the accepted refinement.
    pub panels: usize,
}

/// Legendre polynomial values `P_0..=P_lmax` at `x`.
fn legendre_upto(lmax: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(lmax + 1);
    p.push(1.0);
    if lmax == 0 {
        return p;
    }
    p.push(x);
    for l in 1..lmax {
        let next = ((2 * l + 1) as f64 * x * p[l] - l as f64 * p[l - 1]) / (l + 1) as f64;
        p.push(next);
    }
    p
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let p = legendre_upto(n, x);
    let dp = n as f64 * (x * p[n] - p[n - 1]) / (x * x - 1.0);
    (p[n], dp)
}

/// Gauss-Legendre nodes (ascending) and weights on [-1, 1], computed by
/// Newton iteration from the Chebyshev-angle initial guesses.
pub(crate) fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 2, "quadrature order must be at least 2");
    let mut pairs = Vec::with_capacity(order);
    for i in 0..order {
        let mut x = (PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        for _ in 0..50 {
            let (p, dp) = legendre_with_derivative(order, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(order, x);
        pairs.push((x, 2.0 / ((1.0 - x * x) * dp * dp)));
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// `b^c` for a base in [0, 1] and an arbitrary unsigned exponent.
fn pow_u64(b: f64, c: u64) -> f64 {
    if let Ok(e) = i32::try_from(c) {
        b.powi(e)
    } else {
        b.powf(c as f64)
    }
}

/// Per-panel Legendre tables shared by every level sweep: the projection
/// matrix `proj[l][m]` sending node values to the coefficient of `P_l`, and
/// the partial integrals `tail[l][m]` of `P_l` from node `m` to the right
/// panel edge.
struct Basis {
    order: usize,
    proj: Vec<f64>,
    tail: Vec<f64>,
}

impl Basis {
    fn new(order: usize) -> Basis {
        let (nodes, weights) = gauss_legendre(order);
        let mut proj = vec![0.0; order * order];
        let mut tail = vec![0.0; order * order];
        for (m, (&xi, &w)) in nodes.iter().zip(&weights).enumerate() {
            let p = legendre_upto(order, xi);
            for l in 0..order {
                proj[l * order + m] = (2 * l + 1) as f64 / 2.0 * w * p[l];
                // int_xi^1 P_l = (P_{l-1}(xi) - P_{l+1}(xi)) / (2l + 1),
                // and 1 - xi for l = 0.
                tail[l * order + m] = if l == 0 {
                    1.0 - xi
                } else {
                    (p[l - 1] - p[l + 1]) / (2 * l + 1) as f64
                };
            }
        }
        Basis { order, proj, tail }
    }
}

/// One full recursion pass at a fixed panel count. `levels` holds the child
/// counts from the root down; the sweep starts from the constant 1 at the
/// deepest level and returns the level-0 values at the grid nodes together
/// with the panel width.
fn sweep(levels: &[u64], panels: usize, basis: &Basis) -> (Vec<f64>, f64) {
    let order = basis.order;
    let h = 1.0 / panels as f64;
    let mut u = vec![1.0; panels * order];
    let mut coeffs = vec![0.0; panels * order];
    for &c in levels.iter().rev() {
        for j in 0..panels {
            let vals = &u[j * order..(j + 1) * order];
            for l in 0..order {
                let row = &basis.proj[l * order..(l + 1) * order];
                coeffs[j * order + l] = row.iter().zip(vals).map(|(a, b)| a * b).sum();
            }
        }
        // Suffix sums of the full panel integrals h * c_0.
        let mut tail_right = 0.0;
        let mut tails = vec![0.0; panels];
        for j in (0..panels).rev() {
            tails[j] = tail_right;
            tail_right += h * coeffs[j * order];
        }
        for j in 0..panels {
            let cf = &coeffs[j * order..(j + 1) * order];
            for m in 0..order {
                let mut inner = 0.0;
                for l in 0..order {
                    inner += cf[l] * basis.tail[l * order + m];
                }
                let v = 0.5 * h * inner + tails[j];
                let miss = (1.0 - v).clamp(0.0, 1.0);
                u[j * order + m] = 1.0 - pow_u64(miss, c);
            }
        }
    }
    (u, h)
}

/// Integral of the grid function over [0, 1].
fn total_integral(u: &[f64], h: f64, basis: &Basis) -> f64 {
    let order = basis.order;
    let panels = u.len() / order;
    let mut total = 0.0;
    for j in 0..panels {
        let vals = &u[j * order..(j + 1) * order];
        let row = &basis.proj[..order];
        let c0: f64 = row.iter().zip(vals).map(|(a, b)| a * b).sum();
        total += h * c0;
    }
    total
}

/// Probability that some depth-`depth` vertex is accessible, by composite
/// Gauss-Legendre refinement of the level recursion.
pub fn lambda_prob_quad(
    growth: &GrowthFunction,
    depth: u32,
    root: RootMode,
    tol: f64,
    order: usize,
    max_panels: usize,
) -> Result<QuadResult> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(Error::Config(format!(
            "quadrature tolerance must be finite and positive, got {tol}"
        )));
    }
    if order < 2 || order > 64 {
        return Err(Error::Config(format!(
            "quadrature order must be in 2..=64, got {order}"
        )));
    }
    if depth == 0 {
        // The root alone is an accessible path.
        return Ok(QuadResult { value: 1.0, error_estimate: 0.0, panels: 0 });
    }
    let levels: Vec<u64> =
        (0..u64::from(depth)).map(|i| growth.children(i)).collect::<Result<_>>()?;
    let basis = Basis::new(order);
    let mut prev: Option<f64> = None;
    let mut panels = 8;
    while panels <= max_panels.max(8) {
        let value = match root {
            RootMode::Random => {
                let (u0, h) = sweep(&levels, panels, &basis);
                total_integral(&u0, h, &basis)
            }
            RootMode::Zero => {
                // With a zero-fitness root, the answer is
                // 1 - (1 - int_0^1 u_1)^children(0).
                let (u1, h) = sweep(&levels[1..], panels, &basis);
                let miss = (1.0 - total_integral(&u1, h, &basis)).clamp(0.0, 1.0);
                1.0 - pow_u64(miss, levels[0])
            }
        };
        if let Some(p) = prev {
            let diff = (value - p).abs();
            if diff < tol {
                return Ok(QuadResult { value, error_estimate: diff, panels });
            }
        }
        prev = Some(value);
        panels *= 2;
    }
    Err(Error::Accuracy(format!(
        "quadrature did not reach tolerance {tol:e} within {max_panels} panels"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::growth::GrowthFunction;

    #[test]
    fn nodes_and_weights_satisfy_known_identities() {
        for order in [2, 5, 12, 20] {
            let (nodes, weights) = gauss_legendre(order);
            assert_eq!(nodes.len(), order);
            assert!(nodes.windows(2).all(|w| w[0] < w[1]));
            let wsum: f64 = weights.iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "order {order}: {wsum}");
            // Symmetry of the rule around 0.
            for m in 0..order {
                assert!((nodes[m] + nodes[order - 1 - m]).abs() < 1e-13);
                assert!((weights[m] - weights[order - 1 - m]).abs() < 1e-13);
            }
            // Exact for x^2 on [-1, 1].
            let q: f64 = nodes.iter().zip(&weights).map(|(x, w)| w * x * x).sum();
            assert!((q - 2.0 / 3.0).abs() < 1e-13);
        }
    }

    #[test]
    fn order_twelve_integrates_high_degree_monomials() {
        // A 12-point rule is exact through degree 23.
        let (nodes, weights) = gauss_legendre(12);
        let q: f64 = nodes.iter().zip(&weights).map(|(x, w)| w * x.powi(22)).sum();
        assert!((q - 2.0 / 23.0).abs() < 1e-13, "{q}");
    }

    #[test]
    fn path_tree_matches_factorial_probabilities() {
        let g = GrowthFunction::explicit(vec![1; 6]).unwrap();
        let r = lambda_prob_quad(&g, 5, RootMode::Zero, 1e-10, 12, 4096).unwrap();
        assert!((r.value - 1.0 / 120.0).abs() < 1e-10, "{}", r.value);
        let r = lambda_prob_quad(&g, 5, RootMode::Random, 1e-10, 12, 4096).unwrap();
        assert!((r.value - 1.0 / 720.0).abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn depth_zero_and_one_are_exact() {
        let g = GrowthFunction::homogeneous(3).unwrap();
        let r = lambda_prob_quad(&g, 0, RootMode::Random, 1e-10, 12, 64).unwrap();
        assert_eq!(r.value, 1.0);
        // Zero root always reaches depth 1.
        let r = lambda_prob_quad(&g, 1, RootMode::Zero, 1e-10, 12, 4096).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        // Random root reaches depth 1 unless all children fall below it.
        let r = lambda_prob_quad(&g, 1, RootMode::Random, 1e-10, 12, 4096).unwrap();
        assert!((r.value - 0.75).abs() < 1e-10);
    }

    #[test]
    fn unreachable_tolerance_reports_an_accuracy_error() {
        let g = GrowthFunction::linear_ceil(2.0).unwrap();
        let err = lambda_prob_quad(&g, 4, RootMode::Random, 1e-16, 4, 16).unwrap_err();
        assert!(matches!(err, Error::Accuracy(_)), "{err}");
    }

    #[test]
    fn invalid_settings_are_rejected() {
        let g = GrowthFunction::homogeneous(2).unwrap();
        assert!(lambda_prob_quad(&g, 2, RootMode::Zero, 0.0, 12, 64).is_err());
        assert!(lambda_prob_quad(&g, 2, RootMode::Zero, 1e-10, 1, 64).is_err());
    }
}
