//! Multi-start search as an independent check on the eigenvector
//! construction.

use std::time::Instant;

use bellsep::states::{rng_for, sample_state, SampleKind};
use bellsep::{maximize_violation, optimal_setting, ppt_lambda_min, OptConfig};

fn main() -> bellsep::Result<()> {
    let mut rng = rng_for(5, 0);
    println!(
        "{:>4} {:>12} {:>14} {:>14} {:>10} {:>9}",
        "#", "lambda_min", "constructive", "optimizer", "gap", "conv"
    );
    for i in 0..10u64 {
        let rank = 1 + (i as usize % 3);
        let rho = sample_state(SampleKind::Mixed { rank }, &mut rng)?.density();
        let t = Instant::now();
        let opt = maximize_violation(&rho, &OptConfig::with_seed(i))?;
        let c = optimal_setting(&rho)?;
        let lm = ppt_lambda_min(&rho);
        let gap = if lm < 0.0 {
            opt.best_value - (1.0 - 4.0 * lm)
        } else {
            f64::NAN
        };
        println!(
            "{i:>4} {lm:>12.6} {:>14.9} {:>14.9} {gap:>10.1e} {:>5}/64  {:.1} ms",
            c.s_value,
            opt.best_value,
            opt.restarts_converged,
            t.elapsed().as_secs_f64() * 1e3
        );
    }

    // More restarts never hurt.
    let rho = sample_state(SampleKind::Mixed { rank: 3 }, &mut rng)?.density();
    for restarts in [1, 4, 16, 64] {
        let cfg = OptConfig {
            restarts,
            seed: 9,
            ..OptConfig::default()
        };
        println!(
            "restarts {restarts:>3}: {:.12}",
            maximize_violation(&rho, &cfg)?.best_value
        );
    }
    Ok(())
}
