//! Finite-statistics version of the three-setting test.
//!
//! Each of the pairs (a₁,b₁), (a₂,b₂), (a₃,b₃) is measured jointly for a
//! fixed number of shots. Setting 3 also supplies ⟨A₃⟩ and ⟨B₃⟩ as the
//! marginals of the same ±1 outcomes.

use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{kron, pauli, pauli_dot, CMat};
use crate::observables::{TestSetting, TestStatistics};
use crate::rotation::norm3;
use crate::states::{rng_for, DensityMatrix};

/// Round-off allowed on individual outcome probabilities before clamping.
const PROB_ROUNDOFF: f64 = 1e-12;
/// Allowed deviation of the total probability from 1.
const PROB_MASS_TOL: f64 = 1e-9;
/// One-sigma quantiles of the standard normal.
const Q_LO: f64 = 0.158_655_253_931_457_05;
const Q_HI: f64 = 0.841_344_746_068_542_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotPlan {
    pub shots_per_setting: u64,
    pub seed: u64,
    /// Zero selects the delta-method error bars instead.
    pub bootstrap_resamples: usize,
}

impl ShotPlan {
    pub fn new(shots_per_setting: u64, seed: u64) -> Self {
        ShotPlan {
            shots_per_setting,
            seed,
            bootstrap_resamples: 1000,
        }
    }
}

/// Outcome tallies of one joint measurement, keyed by the signs (s, t).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct JointCounts {
    pub pp: u64,
    pub pm: u64,
    pub mp: u64,
    pub mm: u64,
}

impl JointCounts {
    pub fn total(&self) -> u64 {
        self.pp + self.pm + self.mp + self.mm
    }

    fn frac(&self, x: i64) -> f64 {
        x as f64 / self.total() as f64
    }

    /// Sample mean of s·t.
    pub fn correlation(&self) -> f64 {
        self.frac(self.pp as i64 - self.pm as i64 - self.mp as i64 + self.mm as i64)
    }

    /// Sample mean of s.
    pub fn mean_a(&self) -> f64 {
        self.frac(self.pp as i64 + self.pm as i64 - self.mp as i64 - self.mm as i64)
    }

    /// Sample mean of t.
    pub fn mean_b(&self) -> f64 {
        self.frac(self.pp as i64 - self.pm as i64 + self.mp as i64 - self.mm as i64)
    }

    fn probabilities(&self) -> [f64; 4] {
        let n = self.total() as f64;
        [self.pp, self.pm, self.mp, self.mm].map(|c| c as f64 / n)
    }
}

/// Counts for one numbered setting (1, 2 or 3).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SettingCounts {
    pub setting: u8,
    pub counts: JointCounts,
}

fn projector(axis: &[f64; 3], sign: f64) -> CMat {
    (&pauli(0) + &pauli_dot(axis).scale_re(sign)).scale_re(0.5)
}

/// p(s,t) = Tr(ρ·Π_s^a ⊗ Π_t^b) in the order (+,+), (+,−), (−,+), (−,−).
pub fn joint_probabilities(rho: &DensityMatrix, a: &[f64; 3], b: &[f64; 3]) -> Result<[f64; 4]> {
    for v in [a, b] {
        let norm = norm3(v);
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "measurement axis must be a unit vector, norm is {norm}"
            )));
        }
    }
    let mut p = [0.0; 4];
    for (k, (sa, sb)) in [(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)]
        .into_iter()
        .enumerate()
    {
        let op = kron(&projector(a, sa), &projector(b, sb))?;
        p[k] = rho.expectation(&op).re;
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > PROB_MASS_TOL {
        return Err(Error::ProbabilityMass { total });
    }
    for x in p.iter_mut() {
        if *x < 0.0 && *x > -PROB_ROUNDOFF {
            *x = 0.0;
        }
        *x = x.clamp(0.0, 1.0);
    }
    let total: f64 = p.iter().sum();
    Ok(p.map(|x| x / total))
}

/// Multinomial draw of `n` outcomes via sequential conditional binomials.
fn draw_counts<R: Rng + ?Sized>(p: &[f64; 4], n: u64, rng: &mut R) -> JointCounts {
    let mut out = [0u64; 4];
    let mut remaining = n;
    let mut mass = 1.0;
    for k in 0..3 {
        if remaining == 0 {
            break;
        }
        let q = if mass > 0.0 {
            (p[k] / mass).clamp(0.0, 1.0)
        } else {
            0.0
        };
        let c = Binomial::new(remaining, q)
            .expect("valid binomial")
            .sample(rng);
        out[k] = c;
        remaining -= c;
        mass -= p[k];
    }
    out[3] = remaining;
    JointCounts {
        pp: out[0],
        pm: out[1],
        mp: out[2],
        mm: out[3],
    }
}

/// Simulates `n` joint measurements of (a·σ, b·τ).
pub fn sample_joint<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    a: &[f64; 3],
    b: &[f64; 3],
    n: u64,
    rng: &mut R,
) -> Result<JointCounts> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one shot".into()));
    }
    let p = joint_probabilities(rho, a, b)?;
    Ok(draw_counts(&p, n, rng))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotEstimate {
    pub stats: TestStatistics,
    pub s_hat: f64,
    pub s_se: f64,
    pub simple_hat: f64,
    pub simple_se: f64,
    pub shots_used: u64,
    pub counts: Vec<SettingCounts>,
}

impl ShotEstimate {
    /// (ŝ − 1)/se; infinite when the error bar is zero and ŝ ≠ 1.
    pub fn z_score(&self) -> f64 {
        let excess = self.s_hat - 1.0;
        if self.s_se > 0.0 {
            excess / self.s_se
        } else if excess == 0.0 {
            0.0
        } else {
            excess.signum() * f64::INFINITY
        }
    }
}

fn point_estimate(c: &[JointCounts; 3]) -> TestStatistics {
    TestStatistics::exact(
        c[0].correlation() + c[1].correlation(),
        c[2].mean_a() + c[2].mean_b(),
        c[2].correlation(),
    )
}

fn percentile_se(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (xs.len() - 1) as f64;
        let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
        xs[lo] + (xs[hi] - xs[lo]) * (pos - lo as f64)
    };
    ((q(Q_HI) - q(Q_LO)) / 2.0).max(0.0)
}

struct ErrorBars {
    x1: f64,
    x2: f64,
    x3: f64,
    s: f64,
    simple: f64,
}

fn bootstrap(counts: &[JointCounts; 3], n: u64, resamples: usize, seed: u64) -> ErrorBars {
    // Streams 1..=3 drive the measurements themselves.
    let mut rng = rng_for(seed, 4);
    let probs = counts.map(|c| c.probabilities());
    let mut cols: [Vec<f64>; 5] = Default::default();
    for _ in 0..resamples {
        let re = probs.map(|p| draw_counts(&p, n, &mut rng));
        let st = point_estimate(&re);
        cols[0].push(st.x1);
        cols[1].push(st.x2);
        cols[2].push(st.x3corr);
        cols[3].push(st.bell_value());
        cols[4].push(st.simple_value());
    }
    let [x1, x2, x3, s, simple] = cols.map(percentile_se);
    ErrorBars {
        x1,
        x2,
        x3,
        s,
        simple,
    }
}

fn delta_method(counts: &[JointCounts; 3], st: &TestStatistics, n: u64) -> ErrorBars {
    let n = n as f64;
    let (e1, e2) = (counts[0].correlation(), counts[1].correlation());
    let var_x1 = ((1.0 - e1 * e1) / n + (1.0 - e2 * e2) / n).max(0.0);
    // Setting 3 jointly yields u = s + t and v = s·t.
    let e3 = st.x3corr;
    let var_u = ((2.0 + 2.0 * e3 - st.x2 * st.x2) / n).max(0.0);
    let var_v = ((1.0 - e3 * e3) / n).max(0.0);
    let cov_uv = (st.x2 - st.x2 * e3) / n;
    let r = st.x1.hypot(st.x2);
    let (g1, g2) = if r > 0.0 {
        (st.x1 / r, st.x2 / r)
    } else {
        (0.0, 0.0)
    };
    let g3 = -1.0;
    let var_s = g1 * g1 * var_x1 + g2 * g2 * var_u + g3 * g3 * var_v + 2.0 * g2 * g3 * cov_uv;
    ErrorBars {
        x1: var_x1.sqrt(),
        x2: var_u.sqrt(),
        x3: var_v.sqrt(),
        s: var_s.max(0.0).sqrt(),
        simple: (var_x1 + var_v).sqrt(),
    }
}

/// Runs the three joint measurements and estimates S and the simple
/// statistic with standard errors.
pub fn simulate_test(
    rho: &DensityMatrix,
    s: &TestSetting,
    plan: &ShotPlan,
) -> Result<ShotEstimate> {
    s.require_same()?;
    let n = plan.shots_per_setting;
    if n == 0 {
        return Err(Error::InvalidParameter(
            "shots_per_setting must be positive".into(),
        ));
    }
    let mut counts = [JointCounts::default(); 3];
    for (k, c) in counts.iter_mut().enumerate() {
        let mut rng = rng_for(plan.seed, k as u64 + 1);
        *c = sample_joint(rho, s.a.axis(k), s.b.axis(k), n, &mut rng)?;
    }
    let mut stats = point_estimate(&counts);
    let bars = if plan.bootstrap_resamples > 0 {
        bootstrap(&counts, n, plan.bootstrap_resamples, plan.seed)
    } else {
        delta_method(&counts, &stats, n)
    };
    stats.x1_se = Some(bars.x1);
    stats.x2_se = Some(bars.x2);
    stats.x3corr_se = Some(bars.x3);
    Ok(ShotEstimate {
        s_hat: stats.bell_value(),
        s_se: bars.s,
        simple_hat: stats.simple_value(),
        simple_se: bars.simple,
        shots_used: n,
        stats,
        counts: counts
            .iter()
            .enumerate()
            .map(|(k, c)| SettingCounts {
                setting: k as u8 + 1,
                counts: *c,
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{ground, singlet, werner};

    const Z: [f64; 3] = [0.0, 0.0, 1.0];

    #[test]
    fn singlet_z_probabilities() {
        let p = joint_probabilities(&singlet().density(), &Z, &Z).unwrap();
        assert!(p[0].abs() < 1e-15 && p[3].abs() < 1e-15);
        assert!((p[1] - 0.5).abs() < 1e-15 && (p[2] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ground_state_is_deterministic() {
        let c = sample_joint(&ground().density(), &Z, &Z, 1000, &mut rng_for(0, 0)).unwrap();
        assert_eq!(
            c,
            JointCounts {
                pp: 1000,
                pm: 0,
                mp: 0,
                mm: 0
            }
        );
    }

    #[test]
    fn maximally_mixed_is_uniform() {
        let x = [0.6, 0.0, 0.8];
        let p = joint_probabilities(&DensityMatrix::maximally_mixed(), &x, &Z).unwrap();
        assert!(p.iter().all(|q| (q - 0.25).abs() < 1e-15));
    }

    #[test]
    fn counts_sum_and_validation() {
        let mut rng = rng_for(1, 0);
        let c = sample_joint(&werner(0.3).unwrap(), &Z, &[1.0, 0.0, 0.0], 12345, &mut rng).unwrap();
        assert_eq!(c.total(), 12345);
        assert!(sample_joint(&ground().density(), &Z, &Z, 0, &mut rng).is_err());
        assert!(sample_joint(&ground().density(), &[0.5, 0.0, 0.0], &Z, 1, &mut rng).is_err());
    }

    #[test]
    fn simulate_rejects_opposite_orientation() {
        let plan = ShotPlan::new(100, 1);
        assert!(matches!(
            simulate_test(&singlet().density(), &TestSetting::flipped_b3(), &plan),
            Err(Error::OrientationMismatch { .. })
        ));
    }

    #[test]
    fn simulate_is_deterministic() {
        let plan = ShotPlan::new(10_000, 9);
        let rho = werner(0.6).unwrap();
        let a = simulate_test(&rho, &TestSetting::aligned(), &plan).unwrap();
        let b = simulate_test(&rho, &TestSetting::aligned(), &plan).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.shots_used, 10_000);
        assert!(a.counts.iter().all(|c| c.counts.total() == 10_000));
    }

    #[test]
    fn werner_simple_statistic() {
        let plan = ShotPlan::new(1_000_000, 3);
        let e = simulate_test(&werner(0.8).unwrap(), &TestSetting::aligned(), &plan).unwrap();
        assert!((e.simple_hat - 2.4).abs() <= 5.0 * e.simple_se, "{e:?}");
        assert!(e.simple_se > 0.0);
    }

    #[test]
    fn maximally_mixed_estimate_near_zero() {
        let plan = ShotPlan::new(100_000, 4);
        let e = simulate_test(
            &DensityMatrix::maximally_mixed(),
            &TestSetting::aligned(),
            &plan,
        )
        .unwrap();
        assert!(e.s_hat.abs() < 5.0 * e.s_se, "{e:?}");
    }

    #[test]
    fn delta_method_agrees_with_bootstrap() {
        let rho = werner(0.7).unwrap();
        let boot =
            simulate_test(&rho, &TestSetting::aligned(), &ShotPlan::new(200_000, 5)).unwrap();
        let delta = simulate_test(
            &rho,
            &TestSetting::aligned(),
            &ShotPlan {
                bootstrap_resamples: 0,
                ..ShotPlan::new(200_000, 5)
            },
        )
        .unwrap();
        assert_eq!(boot.s_hat, delta.s_hat);
        let ratio = boot.s_se / delta.s_se;
        assert!((0.8..1.25).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn counts_json_shape() {
        let c = SettingCounts {
            setting: 2,
            counts: JointCounts {
                pp: 1,
                pm: 2,
                mp: 3,
                mm: 4,
            },
        };
        assert_eq!(
            serde_json::to_string(&c).unwrap(),
            r#"{"setting":2,"counts":{"pp":1,"pm":2,"mp":3,"mm":4}}"#
        );
    }
}
