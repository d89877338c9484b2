//! A competition holds yearly editions with a growing participant pool, and
//! every edition's winner score is the maximum of that pool's uniforms. The
//! chance that every edition breaks the record has the closed form
//! `prod_j alpha_j / (alpha_1 + ... + alpha_j)`, and with pools matching a
//! tree's children counts it lower-bounds the tree's accessibility
//! probability: record breaking must thread one fixed path, accessibility
//! may use any.

use accperc::exact::{quad::lambda_prob_quad, record_chain_prob};
use accperc::growth::GrowthFunction;
use accperc::records::{perfect_record_prob, AlphaSpec, ScoreSampler};
use accperc::sim::RootMode;
use num_traits::ToPrimitive;

fn main() -> accperc::Result<()> {
    let trials = 100_000;
    println!("constant pools (one entrant per edition): perfect-record chance is 1/N!");
    println!("{:>2}  {:>10}  {:>10}  {:>12}", "N", "p_hat", "stderr", "exact");
    for editions in 1..=8u32 {
        let est = perfect_record_prob(
            &AlphaSpec::Uniform,
            editions,
            trials,
            500 + u64::from(editions),
            ScoreSampler::InverseCdf,
            true,
        )?;
        println!(
            "{editions:>2}  {:>10.6}  {:>10.6}  {:>12.8}",
            est.p_hat,
            est.stderr,
            est.exact_value.unwrap()
        );
    }

    println!();
    println!("pools doubling the edition number, 4 editions:");
    let spec = AlphaSpec::ceil(2.0)?;
    let est = perfect_record_prob(&spec, 4, trials, 99, ScoreSampler::MaxOfK, true)?;
    println!(
        "  p_hat {:.6} +- {:.6}, exact {:.10} (= 2/21)",
        est.p_hat,
        est.stderr,
        est.exact_value.unwrap()
    );

    println!();
    println!("perfect records lower-bound accessibility on the matching tree:");
    println!("{:>2}  {:>14}  {:>20}", "N", "record chance", "accessibility(N-1)");
    let g = GrowthFunction::linear_ceil(2.0)?;
    for editions in 2..=5u32 {
        let alphas = spec.alphas(editions)?;
        let q = record_chain_prob(&alphas, editions as usize)?.to_f64().unwrap();
        let lambda = lambda_prob_quad(&g, editions - 1, RootMode::Random, 1e-12, 12, 4096)?.value;
        assert!(q <= lambda + 1e-9, "the record chain bound must hold");
        println!("{editions:>2}  {q:>14.8}  {lambda:>20.8}");
    }
    Ok(())
}
