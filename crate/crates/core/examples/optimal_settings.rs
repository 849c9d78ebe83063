//! Builds the maximally violating frames for a random entangled state and
//! checks them against the pure-state expansion identity.

use bellsep::rotation::Quaternion;
use bellsep::states::{random_pure, rng_for, sample_state, SampleKind};
use bellsep::witness::{lemma_residual, optimal_setting};
use bellsep::{bell_value, TestSetting, Triad};

fn main() -> bellsep::Result<()> {
    let mut rng = rng_for(17, 0);
    let rho = loop {
        let rho = sample_state(SampleKind::Mixed { rank: 2 }, &mut rng)?.density();
        if bellsep::ppt_lambda_min(&rho) < -0.05 {
            break rho;
        }
    };

    let report = optimal_setting(&rho)?;
    println!("lambda_min      {:.12}", report.lambda_min);
    println!("1 - 4 lambda    {:.12}", report.predicted_max);
    println!("S at frames     {:.12}", report.s_value);
    for (name, t) in [("A", &report.setting_used.a), ("B", &report.setting_used.b)] {
        for (i, axis) in t.axes().iter().enumerate() {
            println!(
                "  {name}{} = [{:+.6}, {:+.6}, {:+.6}]",
                i + 1,
                axis[0],
                axis[1],
                axis[2]
            );
        }
    }

    // Random frames of the same orientation do worse.
    let mut best_random = f64::NEG_INFINITY;
    for _ in 0..1000 {
        let s = TestSetting::new(
            Triad::from_rotation(&Quaternion::random(&mut rng))?,
            Triad::from_rotation(&Quaternion::random(&mut rng))?,
        );
        best_random = best_random.max(bell_value(&rho, &s)?);
    }
    println!("best of 1000 random frames {best_random:.6}");

    let worst = (0..200)
        .map(|_| lemma_residual(&random_pure(&mut rng)))
        .collect::<bellsep::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    println!("expansion residual over 200 pure states {worst:.2e}");
    Ok(())
}
