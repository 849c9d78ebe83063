//! Inequality evaluators and the partial-transpose machinery behind them.
//!
//! The central statistic is
//!
//! ```text
//! S = √(⟨A₁B₁ + A₂B₂⟩² + ⟨A₃ + B₃⟩²) − ⟨A₃B₃⟩
//! ```
//!
//! over two complementary triads of the same orientation. Every separable
//! state has S ≤ 1 for every such setting, every entangled state exceeds 1
//! for some setting, and the best achievable value is 1 − 4·λ_min where
//! λ_min is the smallest eigenvalue of the partial transpose.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{det3, hermitian_eig, kron, partial_transpose_b, pauli, CMat};
use crate::observables::{correlators, TestSetting, TestStatistics, Triad};
use crate::rotation::{norm3, rotation_of_unitary};
use crate::states::{schmidt_decompose, DensityMatrix, PureState, SchmidtForm};

/// S above 1 + this counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-9;

/// Whether evaluators accept settings whose triads have opposite orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OrientationPolicy {
    #[default]
    Strict,
    /// Opposite orientations are evaluated too; such settings never violate.
    Permissive,
}

impl OrientationPolicy {
    fn check(self, s: &TestSetting) -> Result<()> {
        match self {
            OrientationPolicy::Strict => s.require_same(),
            OrientationPolicy::Permissive => Ok(()),
        }
    }
}

pub fn bell_value(rho: &DensityMatrix, s: &TestSetting) -> Result<f64> {
    bell_value_with(rho, s, OrientationPolicy::Strict)
}

pub fn bell_value_with(
    rho: &DensityMatrix,
    s: &TestSetting,
    policy: OrientationPolicy,
) -> Result<f64> {
    policy.check(s)?;
    Ok(correlators(rho, s).bell_value())
}

/// |⟨A₁B₁ + A₂B₂ + A₃B₃⟩|; separable states stay at or below 1.
pub fn simple_value(rho: &DensityMatrix, s: &TestSetting) -> Result<f64> {
    simple_value_with(rho, s, OrientationPolicy::Strict)
}

pub fn simple_value_with(
    rho: &DensityMatrix,
    s: &TestSetting,
    policy: OrientationPolicy,
) -> Result<f64> {
    policy.check(s)?;
    Ok(correlators(rho, s).simple_value())
}

/// ⟨A₁B₁ + A₁B₂ + A₂B₁ − A₂B₂⟩ with Aᵢ = aᵢ·σ, Bᵢ = bᵢ·τ and |aᵢ|, |bᵢ| ≤ 1.
pub fn chsh_value(
    rho: &DensityMatrix,
    a1: &[f64; 3],
    a2: &[f64; 3],
    b1: &[f64; 3],
    b2: &[f64; 3],
) -> Result<f64> {
    for v in [a1, a2, b1, b2] {
        let norm = norm3(v);
        if !norm.is_finite() || norm > 1.0 + 1e-9 {
            return Err(Error::VectorTooLong { norm });
        }
    }
    use crate::linalg::pauli_dot;
    let corr = |a: &[f64; 3], b: &[f64; 3]| {
        rho.expectation(&kron(&pauli_dot(a), &pauli_dot(b)).expect("2x2"))
            .re
    };
    Ok(corr(a1, b1) + corr(a1, b2) + corr(a2, b1) - corr(a2, b2))
}

/// Smallest eigenvalue of ρ^{T_B}.
pub fn ppt_lambda_min(rho: &DensityMatrix) -> f64 {
    let pt = partial_transpose_b(rho.mat()).expect("4x4 state");
    hermitian_eig(&pt)
        .expect("partial transpose is Hermitian")
        .min()
}

/// (1⊗τ₂)·ρ^{T_B}·(1⊗τ₂), unitarily equivalent to ρ^{T_B}.
pub fn local_time_reversal(rho: &DensityMatrix) -> CMat {
    let pt = partial_transpose_b(rho.mat()).expect("4x4 state");
    let flip = kron(&pauli(0), &pauli(2)).expect("2x2");
    &(&flip * &pt) * &flip
}

/// Triads Aᵢ = U σᵢ U†, Bᵢ = V τᵢ V† induced by the local unitaries of a
/// Schmidt form. Both are right-handed.
pub fn schmidt_frames(form: &SchmidtForm) -> TestSetting {
    TestSetting::new(
        Triad::from_rotation_matrix(&rotation_of_unitary(&form.u)),
        Triad::from_rotation_matrix(&rotation_of_unitary(&form.v)),
    )
}

/// Max-norm residual of the Pauli expansion of a pure-state projector in its
/// own Schmidt frames:
///
/// ```text
/// 4|φ⟩⟨φ| − 1 = √(1−C²)(A₃⊗1 − 1⊗B₃) − C(A₁⊗B₁ + A₂⊗B₂) − A₃⊗B₃
/// ```
pub fn lemma_residual(phi: &PureState) -> Result<f64> {
    let form = schmidt_decompose(phi)?;
    let frames = schmidt_frames(&form);
    let c = form.concurrence;
    let a = frames.a.operators();
    let b = frames.b.operators();
    let id = pauli(0);
    let k = |x: &CMat, y: &CMat| kron(x, y).expect("2x2");

    let lhs = &phi.density().mat().scale_re(4.0) - &CMat::identity(4);
    let local = &k(&a[2], &id) - &k(&id, &b[2]);
    let transverse = &k(&a[0], &b[0]) + &k(&a[1], &b[1]);
    let rhs = &(&local.scale_re((1.0 - c * c).max(0.0).sqrt()) - &transverse.scale_re(c))
        - &k(&a[2], &b[2]);
    Ok(lhs.max_diff(&rhs))
}

/// Outcome of the constructive optimal-setting procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub s_value: f64,
    pub violated: bool,
    pub lambda_min: f64,
    /// 1 − 4·λ_min.
    pub predicted_max: f64,
    pub setting_used: TestSetting,
}

/// Builds the maximally violating setting from the eigenvector of the
/// time-reversed state with the smallest eigenvalue, and evaluates S there.
///
/// For entangled states S equals 1 − 4·λ_min. When the smallest eigenvalue
/// is degenerate the first returned eigenvector is used; any minimizer gives
/// the same value.
pub fn optimal_setting(rho: &DensityMatrix) -> Result<WitnessReport> {
    let reversed = local_time_reversal(rho);
    let eig = hermitian_eig(&reversed)?;
    let lambda_min = eig.min();
    let phi = PureState::normalized(
        eig.vector(0)
            .try_into()
            .map_err(|_| Error::InvalidParameter("eigenvector length".into()))?,
    )?;
    let setting = schmidt_frames(&schmidt_decompose(&phi)?);
    let s_value = bell_value(rho, &setting)?;
    Ok(WitnessReport {
        s_value,
        violated: s_value > 1.0 + VIOLATION_TOL,
        lambda_min,
        predicted_max: 1.0 - 4.0 * lambda_min,
        setting_used: setting,
    })
}

/// Report for a caller-chosen setting (no optimization).
pub fn report_for_setting(rho: &DensityMatrix, s: &TestSetting) -> Result<WitnessReport> {
    let s_value = bell_value(rho, s)?;
    let lambda_min = ppt_lambda_min(rho);
    Ok(WitnessReport {
        s_value,
        violated: s_value > 1.0 + VIOLATION_TOL,
        lambda_min,
        predicted_max: 1.0 - 4.0 * lambda_min,
        setting_used: *s,
    })
}

/// Robertson-type determinants and both sides of the indeterminacy relation
/// ⟨X₁⟩² + ⟨X₂⟩² ≤ ⟨X₃⟩² for opposite-orientation settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobertsonRecord {
    pub det_sigma: f64,
    pub det_gamma: f64,
    pub eq3_lhs: f64,
    pub eq3_rhs: f64,
}

impl RobertsonRecord {
    pub fn determinants_hold(&self, tol: f64) -> bool {
        self.det_sigma >= self.det_gamma - tol
    }

    pub fn relation_holds(&self, tol: f64) -> bool {
        self.eq3_lhs <= self.eq3_rhs + tol
    }
}

/// Symmetrized covariance Σᵢⱼ = ½⟨XᵢXⱼ + XⱼXᵢ⟩ − ⟨Xᵢ⟩⟨Xⱼ⟩ and commutator
/// matrix Γᵢⱼ = (i/2)⟨[Xᵢ, Xⱼ]⟩ of the three test operators.
pub fn robertson_check(rho: &DensityMatrix, s: &TestSetting) -> Result<RobertsonRecord> {
    s.require_opposite()?;
    let x = s.x_operators();
    let mean: Vec<f64> = x.iter().map(|m| rho.expectation(m).re).collect();
    let mut sigma = [[0.0; 3]; 3];
    let mut gamma = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            sigma[i][j] = 0.5 * rho.expectation(&x[i].anticommutator(&x[j])).re - mean[i] * mean[j];
            // (i/2)·⟨[X,Y]⟩ is real because the commutator is anti-Hermitian.
            gamma[i][j] = -0.5 * rho.expectation(&x[i].commutator(&x[j])).im;
        }
    }
    Ok(RobertsonRecord {
        det_sigma: det3(&sigma),
        det_gamma: det3(&gamma),
        eq3_lhs: mean[0] * mean[0] + mean[1] * mean[1],
        eq3_rhs: mean[2] * mean[2],
    })
}

/// Statistics plus both inequality values for a setting, used by reports.
pub fn evaluate(rho: &DensityMatrix, s: &TestSetting) -> Result<(TestStatistics, f64, f64)> {
    s.require_same()?;
    let stats = correlators(rho, s);
    Ok((stats, stats.bell_value(), stats.simple_value()))
}
