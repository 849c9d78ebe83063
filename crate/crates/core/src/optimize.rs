//! Multi-start derivative-free search for the largest S over all pairs of
//! right-handed frames. Independent of the eigenvector construction in
//! [`crate::witness::optimal_setting`], so the two can cross-check each other.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::observables::{CorrelationTensor, TestSetting, Triad};
use crate::rotation::Quaternion;
use crate::states::{rng_for, DensityMatrix};
use crate::witness::bell_value;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Initial rotation increment in radians.
    pub step_init: f64,
    pub tol: f64,
    pub seed: u64,
}

impl Default for OptConfig {
    fn default() -> Self {
        OptConfig {
            restarts: 64,
            max_iters: 500,
            step_init: 0.3,
            tol: 1e-10,
            seed: 0,
        }
    }
}

impl OptConfig {
    pub fn with_seed(seed: u64) -> Self {
        OptConfig {
            seed,
            ..OptConfig::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 || self.max_iters == 0 {
            return Err(Error::InvalidParameter(
                "restarts and max_iters must be positive".into(),
            ));
        }
        if !(self.step_init > 0.0 && self.tol > 0.0 && self.tol < self.step_init) {
            return Err(Error::InvalidParameter(format!(
                "need 0 < tol < step_init, got tol = {}, step_init = {}",
                self.tol, self.step_init
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_setting: TestSetting,
    pub best_value: f64,
    /// Total polls over all restarts.
    pub iterations_used: usize,
    pub restarts_converged: usize,
}

#[derive(Debug, Clone, Copy)]
struct RestartOutcome {
    value: f64,
    qa: Quaternion,
    qb: Quaternion,
    iterations: usize,
    converged: bool,
}

fn objective(tensor: &CorrelationTensor, qa: &Quaternion, qb: &Quaternion) -> f64 {
    tensor
        .stats_from_columns(&qa.rotation_unchecked(), &qb.rotation_unchecked())
        .bell_value()
}

/// `q` followed by a body rotation with rotation vector `v`.
fn retract(q: &Quaternion, v: &[f64]) -> Quaternion {
    let angle = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    if angle == 0.0 {
        return *q;
    }
    (*q * Quaternion::from_axis_angle([v[0] / angle, v[1] / angle, v[2] / angle], angle))
        .normalized()
}

/// Compass search on the 6-dim tangent chart: each poll tries ±step about
/// the three body axes of either frame, moves to the best improving trial,
/// and halves the step when nothing improves. After a successful poll a
/// pattern move along the accumulated displacement is tried as well.
fn compass_search(tensor: &CorrelationTensor, cfg: &OptConfig, restart: u64) -> RestartOutcome {
    let mut rng = rng_for(cfg.seed, restart);
    let mut qa = Quaternion::random(&mut rng);
    let mut qb = Quaternion::random(&mut rng);
    let mut value = objective(tensor, &qa, &qb);
    let mut step = cfg.step_init;
    let mut pattern = [0.0; 6];
    let mut iterations = 0;

    while iterations < cfg.max_iters && step >= cfg.tol {
        iterations += 1;
        let mut best: Option<(f64, [f64; 6])> = None;
        for k in 0..6 {
            for sign in [1.0, -1.0] {
                let mut e = [0.0; 6];
                e[k] = sign * step;
                let v = objective(tensor, &retract(&qa, &e[..3]), &retract(&qb, &e[3..]));
                if v > best.map_or(value, |b| b.0) {
                    best = Some((v, e));
                }
            }
        }
        let Some((v, e)) = best else {
            step *= 0.5;
            pattern = [0.0; 6];
            continue;
        };
        qa = retract(&qa, &e[..3]);
        qb = retract(&qb, &e[3..]);
        value = v;
        for k in 0..6 {
            pattern[k] += e[k];
        }
        let (pa, pb) = (retract(&qa, &pattern[..3]), retract(&qb, &pattern[3..]));
        let pv = objective(tensor, &pa, &pb);
        if pv > value {
            qa = pa;
            qb = pb;
            value = pv;
        } else {
            pattern = e;
        }
    }
    RestartOutcome {
        value,
        qa,
        qb,
        iterations,
        converged: step < cfg.tol,
    }
}

/// Best S found over `cfg.restarts` independent starts. Restart `k` always
/// uses stream `k` of `cfg.seed`, so adding restarts never lowers the result.
pub fn maximize_violation(rho: &DensityMatrix, cfg: &OptConfig) -> Result<OptResult> {
    cfg.validate()?;
    let tensor = CorrelationTensor::of(rho);
    let outcomes: Vec<RestartOutcome> = (0..cfg.restarts as u64)
        .into_par_iter()
        .map(|k| compass_search(&tensor, cfg, k))
        .collect();

    // Lowest index wins ties.
    let best = outcomes
        .iter()
        .fold(None::<&RestartOutcome>, |acc, o| match acc {
            Some(b) if b.value >= o.value => Some(b),
            _ => Some(o),
        })
        .expect("at least one restart");

    let best_setting = TestSetting::new(
        Triad::from_rotation(&best.qa)?,
        Triad::from_rotation(&best.qb)?,
    );
    Ok(OptResult {
        best_value: bell_value(rho, &best_setting)?,
        best_setting,
        iterations_used: outcomes.iter().map(|o| o.iterations).sum(),
        restarts_converged: outcomes.iter().filter(|o| o.converged).count(),
    })
}
