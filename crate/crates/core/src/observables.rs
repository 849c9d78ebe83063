//! Complementary-observable triads, their orientation, and the exact
//! correlators a three-setting test needs.
//!
//! A triad {a₁, a₂, a₃} is an orthonormal frame in R³; the observables are
//! Aᵢ = aᵢ·σ. Its orientation μ = det[a₁ a₂ a₃] coincides with the scalar
//! −i·A₁A₂A₃.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{det3, kron, pauli, pauli_dot, CMat, C64};
use crate::rotation::{cross, dot, mat3_vec, norm3, Mat3, Quaternion};
use crate::states::DensityMatrix;

/// Orthonormality tolerance for triads.
pub const TRIAD_TOL: f64 = 1e-9;
/// Largest drift that lenient construction repairs instead of rejecting.
pub const TRIAD_REPAIR_TOL: f64 = 1e-6;
/// Imaginary parts of expectation values above this indicate a bug.
const IMAG_TOL: f64 = 1e-9;

/// Three orthonormal axes, stored as rows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[[f64; 3]; 3]", into = "[[f64; 3]; 3]")]
pub struct Triad {
    axes: Mat3,
}

impl TryFrom<[[f64; 3]; 3]> for Triad {
    type Error = Error;
    fn try_from(axes: Mat3) -> Result<Self> {
        Triad::new(axes)
    }
}

impl From<Triad> for [[f64; 3]; 3] {
    fn from(t: Triad) -> Self {
        t.axes
    }
}

fn orthonormality_deviation(axes: &Mat3) -> f64 {
    let mut dev = 0.0_f64;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((dot(&axes[i], &axes[j]) - target).abs());
        }
    }
    dev
}

impl Triad {
    /// Strict constructor: axes must be orthonormal within [`TRIAD_TOL`].
    pub fn new(axes: Mat3) -> Result<Self> {
        if axes.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let deviation = orthonormality_deviation(&axes);
        if deviation > TRIAD_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        let t = Triad { axes };
        t.orientation()?;
        Ok(t)
    }

    /// Accepts hand-written frames: drift up to [`TRIAD_REPAIR_TOL`] is
    /// removed by modified Gram-Schmidt, anything larger is rejected.
    pub fn new_lenient(axes: Mat3) -> Result<Self> {
        if axes.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let deviation = orthonormality_deviation(&axes);
        if deviation <= TRIAD_TOL {
            return Triad::new(axes);
        }
        if deviation > TRIAD_REPAIR_TOL {
            return Err(Error::NotOrthonormal { deviation });
        }
        let mut q = axes;
        for i in 0..3 {
            for j in 0..i {
                let proj = dot(&q[i], &q[j]);
                for k in 0..3 {
                    q[i][k] -= proj * q[j][k];
                }
            }
            let n = norm3(&q[i]);
            for k in 0..3 {
                q[i][k] /= n;
            }
        }
        Triad::new(q)
    }

    /// (e₁, e₂, e₃).
    pub fn standard() -> Self {
        Triad {
            axes: [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
        }
    }

    /// Columns of the rotation matrix of `q`; always right-handed.
    pub fn from_rotation(q: &Quaternion) -> Result<Self> {
        Ok(Triad::from_rotation_matrix(&q.rotation()?))
    }

    /// Columns of a rotation matrix as axes.
    pub(crate) fn from_rotation_matrix(r: &Mat3) -> Self {
        let mut axes = [[0.0; 3]; 3];
        for (i, axis) in axes.iter_mut().enumerate() {
            *axis = [r[0][i], r[1][i], r[2][i]];
        }
        Triad { axes }
    }

    pub fn axes(&self) -> &Mat3 {
        &self.axes
    }

    pub fn axis(&self, i: usize) -> &[f64; 3] {
        &self.axes[i]
    }

    /// μ = sign det[a₁ a₂ a₃]; the determinant must be within 1e-6 of ±1.
    pub fn orientation(&self) -> Result<i8> {
        let det = det3(&self.axes);
        if (det - 1.0).abs() <= 1e-6 {
            Ok(1)
        } else if (det + 1.0).abs() <= 1e-6 {
            Ok(-1)
        } else {
            Err(Error::BadOrientation { det })
        }
    }

    pub(crate) fn mu(&self) -> i8 {
        self.orientation().expect("validated triad")
    }

    /// The 2×2 observables aᵢ·σ.
    pub fn operators(&self) -> [CMat; 3] {
        [
            pauli_dot(&self.axes[0]),
            pauli_dot(&self.axes[1]),
            pauli_dot(&self.axes[2]),
        ]
    }

    /// All three axes flipped: Aᵢ → −Aᵢ, which reverses the orientation.
    pub fn negated(&self) -> Self {
        Triad {
            axes: self.axes.map(|a| a.map(|x| -x)),
        }
    }

    /// Axis `i` flipped, reversing the orientation.
    pub fn with_axis_negated(&self, i: usize) -> Self {
        let mut axes = self.axes;
        axes[i] = axes[i].map(|x| -x);
        Triad { axes }
    }

    /// Every axis mapped through the rotation `r`.
    pub fn rotated(&self, r: &Mat3) -> Self {
        Triad {
            axes: self.axes.map(|a| mat3_vec(r, &a)),
        }
    }

    /// Right-handed triad whose third axis is `a3` (unit), first axis chosen
    /// as any perpendicular direction.
    pub fn completing(a3: [f64; 3]) -> Result<Self> {
        let helper = if a3[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let mut a1 = cross(&helper, &a3);
        let n = norm3(&a1);
        a1 = a1.map(|x| x / n);
        let a2 = cross(&a3, &a1);
        Triad::new([a1, a2, a3])
    }
}

/// Two local triads, Alice's {Aᵢ} and Bob's {Bᵢ}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SettingRepr", into = "SettingRepr")]
pub struct TestSetting {
    pub a: Triad,
    pub b: Triad,
    same_orientation: bool,
}

#[derive(Serialize, Deserialize)]
struct SettingRepr {
    #[serde(rename = "A")]
    a: [[f64; 3]; 3],
    #[serde(rename = "B")]
    b: [[f64; 3]; 3],
}

impl TryFrom<SettingRepr> for TestSetting {
    type Error = Error;
    fn try_from(r: SettingRepr) -> Result<Self> {
        Ok(TestSetting::new(
            Triad::new_lenient(r.a)?,
            Triad::new_lenient(r.b)?,
        ))
    }
}

impl From<TestSetting> for SettingRepr {
    fn from(s: TestSetting) -> Self {
        SettingRepr {
            a: s.a.axes,
            b: s.b.axes,
        }
    }
}

impl TestSetting {
    pub fn new(a: Triad, b: Triad) -> Self {
        TestSetting {
            a,
            b,
            same_orientation: a.mu() == b.mu(),
        }
    }

    /// aᵢ = bᵢ = eᵢ.
    pub fn aligned() -> Self {
        TestSetting::new(Triad::standard(), Triad::standard())
    }

    /// Aligned with b₃ → −b₃.
    pub fn flipped_b3() -> Self {
        TestSetting::new(Triad::standard(), Triad::standard().with_axis_negated(2))
    }

    pub fn same_orientation(&self) -> bool {
        self.same_orientation
    }

    pub fn orientations(&self) -> (i8, i8) {
        (self.a.mu(), self.b.mu())
    }

    /// Errors unless μ_A = μ_B.
    pub fn require_same(&self) -> Result<()> {
        let (mu_a, mu_b) = self.orientations();
        if mu_a != mu_b {
            return Err(Error::OrientationMismatch { mu_a, mu_b });
        }
        Ok(())
    }

    /// Errors unless μ_A = −μ_B.
    pub fn require_opposite(&self) -> Result<()> {
        let (mu_a, mu_b) = self.orientations();
        if mu_a == mu_b {
            return Err(Error::OrientationAgree { mu: mu_a });
        }
        Ok(())
    }

    /// Bob's third axis flipped; toggles the relative orientation.
    pub fn with_b3_flipped(&self) -> Self {
        TestSetting::new(self.a, self.b.with_axis_negated(2))
    }

    /// The three test operators X₁ = A₁B₁ + A₂B₂, X₂ = A₃ + B₃, X₃ = 1 + A₃B₃.
    pub fn x_operators(&self) -> [CMat; 3] {
        let a = self.a.operators();
        let b = self.b.operators();
        let id = pauli(0);
        let k = |x: &CMat, y: &CMat| kron(x, y).expect("2x2 factors");
        let x1 = &k(&a[0], &b[0]) + &k(&a[1], &b[1]);
        let x2 = &k(&a[2], &id) + &k(&id, &b[2]);
        let x3 = &CMat::identity(4) + &k(&a[2], &b[2]);
        [x1, x2, x3]
    }
}

/// The averages entering the inequality, optionally with standard errors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestStatistics {
    /// ⟨A₁B₁ + A₂B₂⟩
    pub x1: f64,
    /// ⟨A₃ + B₃⟩
    pub x2: f64,
    /// ⟨A₃B₃⟩
    pub x3corr: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x1_se: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x2_se: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x3corr_se: Option<f64>,
}

impl TestStatistics {
    pub fn exact(x1: f64, x2: f64, x3corr: f64) -> Self {
        TestStatistics {
            x1,
            x2,
            x3corr,
            x1_se: None,
            x2_se: None,
            x3corr_se: None,
        }
    }

    /// √(x₁² + x₂²) − ⟨A₃B₃⟩.
    pub fn bell_value(&self) -> f64 {
        self.x1.hypot(self.x2) - self.x3corr
    }

    /// |⟨A₁B₁ + A₂B₂ + A₃B₃⟩|.
    pub fn simple_value(&self) -> f64 {
        (self.x1 + self.x3corr).abs()
    }
}

fn real_expectation(rho: &DensityMatrix, op: &CMat) -> f64 {
    let z: C64 = rho.expectation(op);
    debug_assert!(z.im.abs() < IMAG_TOL, "imaginary expectation {}", z.im);
    z.re
}

/// Exact correlators Tr(ρ·X) for a setting, evaluated as matrix traces.
pub fn correlators(rho: &DensityMatrix, s: &TestSetting) -> TestStatistics {
    let a = s.a.operators();
    let b = s.b.operators();
    let id = pauli(0);
    let k = |x: &CMat, y: &CMat| kron(x, y).expect("2x2 factors");
    let x1 = real_expectation(rho, &k(&a[0], &b[0])) + real_expectation(rho, &k(&a[1], &b[1]));
    let x2 = real_expectation(rho, &k(&a[2], &id)) + real_expectation(rho, &k(&id, &b[2]));
    let x3corr = real_expectation(rho, &k(&a[2], &b[2]));
    TestStatistics::exact(x1, x2, x3corr)
}

/// Pauli-basis coordinates of a state: rᵢ = ⟨σᵢ⊗1⟩, sⱼ = ⟨1⊗σⱼ⟩,
/// tᵢⱼ = ⟨σᵢ⊗σⱼ⟩. Any correlator of local spin observables is bilinear in
/// the measurement directions over these numbers, which makes repeated
/// evaluation cheap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTensor {
    pub r: [f64; 3],
    pub s: [f64; 3],
    pub t: Mat3,
}

impl CorrelationTensor {
    pub fn of(rho: &DensityMatrix) -> Self {
        let sig = [pauli(1), pauli(2), pauli(3)];
        let id = pauli(0);
        let mut out = CorrelationTensor {
            r: [0.0; 3],
            s: [0.0; 3],
            t: [[0.0; 3]; 3],
        };
        for i in 0..3 {
            out.r[i] = rho.expectation(&kron(&sig[i], &id).expect("2x2")).re;
            out.s[i] = rho.expectation(&kron(&id, &sig[i]).expect("2x2")).re;
            for j in 0..3 {
                out.t[i][j] = rho.expectation(&kron(&sig[i], &sig[j]).expect("2x2")).re;
            }
        }
        out
    }

    /// ⟨(a·σ)⊗(b·σ)⟩.
    pub fn correlation(&self, a: &[f64; 3], b: &[f64; 3]) -> f64 {
        dot(a, &mat3_vec(&self.t, b))
    }

    /// Statistics for axes given as matrix columns (rotation-matrix layout).
    pub(crate) fn stats_from_columns(&self, ra: &Mat3, rb: &Mat3) -> TestStatistics {
        let col = |m: &Mat3, i: usize| [m[0][i], m[1][i], m[2][i]];
        let (a1, a2, a3) = (col(ra, 0), col(ra, 1), col(ra, 2));
        let (b1, b2, b3) = (col(rb, 0), col(rb, 1), col(rb, 2));
        TestStatistics::exact(
            self.correlation(&a1, &b1) + self.correlation(&a2, &b2),
            dot(&self.r, &a3) + dot(&self.s, &b3),
            self.correlation(&a3, &b3),
        )
    }

    pub fn stats(&self, s: &TestSetting) -> TestStatistics {
        let (a, b) = (s.a.axes(), s.b.axes());
        TestStatistics::exact(
            self.correlation(&a[0], &b[0]) + self.correlation(&a[1], &b[1]),
            dot(&self.r, &a[2]) + dot(&self.s, &b[2]),
            self.correlation(&a[2], &b[2]),
        )
    }
}
