//! Finite-shot estimates of S and how their error bars shrink.

use bellsep::shots::{simulate_test, ShotPlan};
use bellsep::states::{singlet, werner};
use bellsep::TestSetting;

fn main() -> bellsep::Result<()> {
    let aligned = TestSetting::aligned();

    let est = simulate_test(&singlet().density(), &aligned, &ShotPlan::new(100_000, 7))?;
    // Every outcome is deterministic here, hence the zero error bar.
    println!("singlet    s_hat {:.6} se {:.2e}", est.s_hat, est.s_se);

    let rho = werner(0.5)?;
    for n in [1_000u64, 10_000, 100_000, 1_000_000] {
        let est = simulate_test(&rho, &aligned, &ShotPlan::new(n, 7))?;
        println!(
            "werner 0.5 n {n:>8}  s_hat {:.5} ± {:.5}  z {:>7.2}  simple {:.5} ± {:.5}",
            est.s_hat,
            est.s_se,
            est.z_score(),
            est.simple_hat,
            est.simple_se
        );
    }

    let est = simulate_test(&rho, &aligned, &ShotPlan::new(10_000, 3))?;
    for (i, c) in est.counts.iter().enumerate() {
        let k = c.counts;
        println!(
            "setting {}: ++ {} +- {} -+ {} -- {}",
            i + 1,
            k.pp,
            k.pm,
            k.mp,
            k.mm
        );
    }
    Ok(())
}
