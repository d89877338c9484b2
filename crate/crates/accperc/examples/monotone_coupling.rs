//! Couples two trees level by level: the slow tree embeds into the fast one
//! (child r maps to child r), and every embedded vertex reuses the fitness
//! of its image. Under this coupling any accessible path of the slow tree
//! is an accessible path of the fast tree verbatim, so accessibility is
//! monotone in the growth function draw by draw, not just on average.

use accperc::growth::GrowthFunction;
use accperc::rng::trial_rng;
use accperc::tree::{accessible_counts, embed_indices, enumerate_accessible, materialize};
use rand::Rng;

fn main() -> accperc::Result<()> {
    let depth = 4;
    let slow = materialize(&GrowthFunction::linear_ceil(1.5)?, depth, 100_000)?;
    let fast = materialize(&GrowthFunction::linear_ceil(2.5)?, depth, 100_000)?;
    let map = embed_indices(&slow, &fast)?;
    println!(
        "slow tree (alpha = 1.5) embeds into fast tree (alpha = 2.5): {} of {} vertices used",
        slow.vertex_count(),
        fast.vertex_count()
    );

    let trials = 20_000u64;
    let mut slow_hits = 0u64;
    let mut fast_hits = 0u64;
    for t in 0..trials {
        let mut rng = trial_rng(77, t);
        let fast_fitness: Vec<Vec<f64>> = (0..=depth)
            .map(|n| (0..fast.level_size(n)).map(|_| rng.random::<f64>()).collect())
            .collect();
        let slow_fitness: Vec<Vec<f64>> = map
            .iter()
            .enumerate()
            .map(|(n, level)| level.iter().map(|&v| fast_fitness[n][v as usize]).collect())
            .collect();
        let fast_acc = enumerate_accessible(&fast, &fast_fitness)?;
        let slow_acc = enumerate_accessible(&slow, &slow_fitness)?;
        for n in 0..=depth {
            for (v, &acc) in slow_acc[n].iter().enumerate() {
                assert!(
                    !acc || fast_acc[n][map[n][v] as usize],
                    "an accessible slow vertex must stay accessible in the fast tree"
                );
            }
        }
        slow_hits += u64::from(accessible_counts(&slow_acc)[depth] > 0);
        fast_hits += u64::from(accessible_counts(&fast_acc)[depth] > 0);
    }

    let t = trials as f64;
    println!("accessibility inclusion held in every one of {trials} coupled trials");
    println!(
        "depth-{depth} survival: slow {:.4}, fast {:.4} (shared noise, so the gap is pure growth)",
        slow_hits as f64 / t,
        fast_hits as f64 / t
    );
    Ok(())
}
