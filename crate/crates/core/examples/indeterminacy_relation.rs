//! Opposite-orientation frames: the covariance and commutator determinants
//! and the resulting bound on the test operators.

use bellsep::rotation::Quaternion;
use bellsep::states::{rng_for, sample_state, singlet, SampleKind};
use bellsep::witness::{bell_value_with, robertson_check, OrientationPolicy};
use bellsep::{TestSetting, Triad};

fn main() -> bellsep::Result<()> {
    let flipped = TestSetting::flipped_b3();
    let r = robertson_check(&singlet().density(), &flipped)?;
    println!("singlet, b3 flipped: {r:?}");

    let mut rng = rng_for(11, 0);
    let (mut slack_det, mut slack_rel, mut max_s) =
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..5000 {
        let rho = sample_state(SampleKind::Mixed { rank: 2 }, &mut rng)?.density();
        let a = Triad::from_rotation(&Quaternion::random(&mut rng))?;
        let b = Triad::from_rotation(&Quaternion::random(&mut rng))?;
        let s = TestSetting::new(a, b.negated());
        let r = robertson_check(&rho, &s)?;
        slack_det = slack_det.min(r.det_sigma - r.det_gamma);
        slack_rel = slack_rel.min(r.eq3_rhs - r.eq3_lhs);
        max_s = max_s.max(bell_value_with(&rho, &s, OrientationPolicy::Permissive)?);
    }
    println!("min det(Sigma) - det(Gamma)   {slack_det:.3e}");
    println!("min <X3>^2 - <X1>^2 - <X2>^2  {slack_rel:.3e}");
    println!("max S with opposite frames    {max_s:.9}");
    Ok(())
}
