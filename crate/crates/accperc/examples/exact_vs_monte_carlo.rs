//! Computes one accessibility probability three independent ways: the exact
//! rational polynomial recursion, adaptive Gauss-Legendre quadrature, and
//! plain Monte Carlo, then shows how closely they agree.

use accperc::exact::{lambda_prob_poly, quad::lambda_prob_quad};
use accperc::growth::GrowthFunction;
use accperc::sim::{estimate_lambda_prob, RootMode, TrialConfig};
use num_traits::ToPrimitive;

fn main() -> accperc::Result<()> {
    let g = GrowthFunction::linear_ceil(2.0)?;
    let depth = 4;
    println!("P(some level-{depth} vertex is accessible), children(i) = 2(i+1), random root");
    println!();

    let rational = lambda_prob_poly(&g, depth, RootMode::Random, 3000)?;
    let exact = rational.to_f64().unwrap();
    println!("polynomial recursion  {exact:.15}");
    println!("                      = {rational}");

    let quad = lambda_prob_quad(&g, depth, RootMode::Random, 1e-12, 12, 4096)?;
    println!(
        "quadrature            {:.15}   (error estimate {:.1e}, {} panels)",
        quad.value, quad.error_estimate, quad.panels
    );

    let trials = 200_000;
    let config = TrialConfig::new(g, depth, RootMode::Random, 42);
    let est = estimate_lambda_prob(&config, trials)?;
    let row = est.rows.last().unwrap();
    println!(
        "monte carlo           {:.6} +- {:.6}   ({trials} trials)",
        row.p_hat, row.stderr
    );

    println!();
    println!("quadrature deviation   {:.3e}", (quad.value - exact).abs());
    println!(
        "monte carlo deviation  {:.3e}  ({:.2} standard errors)",
        (row.p_hat - exact).abs(),
        (row.p_hat - exact).abs() / row.stderr
    );
    Ok(())
}
