//! Two-qubit states: validated density matrices, pure states, Bell and
//! Werner constructors, seeded random ensembles and the Schmidt form.
//!
//! Basis ordering is |00⟩, |01⟩, |10⟩, |11⟩ with |0⟩ = |+⟩ the +1 eigenstate
//! of σ₃.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, kron, CMat, C64, ONE, ZERO};

/// Tolerance on Hermiticity, unit trace and negative eigenvalues.
pub const STATE_TOL: f64 = 1e-9;

/// The seedable generator used for every random ensemble in the crate.
pub type StateRng = ChaCha8Rng;

/// Generator for `(seed, stream)`; distinct streams are independent.
pub fn rng_for(seed: u64, stream: u64) -> StateRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// A validated two-qubit density matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: CMat,
}

impl DensityMatrix {
    /// Validates a 4×4 matrix as a state. Round-off up to [`STATE_TOL`] is
    /// repaired by symmetrizing and renormalizing the trace.
    pub fn validate(m: &CMat) -> Result<Self> {
        if m.rows() != 4 || m.cols() != 4 {
            return Err(Error::Dimension {
                expected: "4x4".into(),
                got: format!("{}x{}", m.rows(), m.cols()),
            });
        }
        let deviation = m.hermitian_deviation();
        if deviation > STATE_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        let herm = m.hermitian_part();
        let trace = herm.trace().re;
        if (trace - 1.0).abs() > STATE_TOL {
            return Err(Error::TraceNotOne { trace });
        }
        let mat = herm.scale_re(1.0 / trace);
        let min_eigenvalue = hermitian_eig(&mat)?.min();
        if min_eigenvalue < -STATE_TOL {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(DensityMatrix { mat })
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix {
            mat: CMat::identity(4).scale_re(0.25),
        }
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    /// Tr(ρ·O).
    pub fn expectation(&self, op: &CMat) -> C64 {
        self.mat.trace_product(op)
    }

    /// (U⊗V)ρ(U⊗V)†.
    pub fn local_unitary(&self, u: &CMat, v: &CMat) -> Result<Self> {
        let w = kron(u, v)?;
        DensityMatrix::validate(&self.mat.conjugate_by(&w))
    }
}

impl From<&PureState> for DensityMatrix {
    fn from(p: &PureState) -> Self {
        DensityMatrix {
            mat: CMat::outer(&p.vec, &p.vec),
        }
    }
}

/// A normalized two-qubit state vector.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    vec: [C64; 4],
}

impl PureState {
    pub fn new(vec: [C64; 4]) -> Result<Self> {
        if vec.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let norm = norm(&vec);
        if (norm - 1.0).abs() > STATE_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(PureState {
            vec: vec.map(|z| z / norm),
        })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(vec: [C64; 4]) -> Result<Self> {
        let n = norm(&vec);
        if n == 0.0 || !n.is_finite() {
            return Err(Error::NotNormalized { norm: n });
        }
        PureState::new(vec.map(|z| z / n))
    }

    pub fn from_slice(v: &[C64]) -> Result<Self> {
        let arr: [C64; 4] = v.try_into().map_err(|_| Error::Dimension {
            expected: "4-vector".into(),
            got: format!("{}-vector", v.len()),
        })?;
        PureState::new(arr)
    }

    pub fn vec(&self) -> &[C64; 4] {
        &self.vec
    }

    pub fn density(&self) -> DensityMatrix {
        DensityMatrix::from(self)
    }

    /// (U⊗V)|φ⟩.
    pub fn local_unitary(&self, u: &CMat, v: &CMat) -> Result<Self> {
        let w = kron(u, v)?;
        PureState::from_slice(&w.apply(&self.vec))
    }

    /// |⟨self|other⟩|, the overlap modulo global phase.
    pub fn overlap(&self, other: &PureState) -> f64 {
        self.vec
            .iter()
            .zip(&other.vec)
            .map(|(a, b)| a.conj() * b)
            .sum::<C64>()
            .norm()
    }
}

fn norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];
}

impl FromStr for BellKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "phi+" => Ok(BellKind::PhiPlus),
            "phi-" => Ok(BellKind::PhiMinus),
            "psi+" => Ok(BellKind::PsiPlus),
            "psi-" | "singlet" => Ok(BellKind::PsiMinus),
            other => Err(Error::InvalidParameter(format!(
                "unknown Bell state `{other}`"
            ))),
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BellKind::PhiPlus => "phi+",
            BellKind::PhiMinus => "phi-",
            BellKind::PsiPlus => "psi+",
            BellKind::PsiMinus => "psi-",
        })
    }
}

pub fn bell_state(kind: BellKind) -> PureState {
    let h = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let vec = match kind {
        BellKind::PhiPlus => [h, ZERO, ZERO, h],
        BellKind::PhiMinus => [h, ZERO, ZERO, -h],
        BellKind::PsiPlus => [ZERO, h, h, ZERO],
        BellKind::PsiMinus => [ZERO, h, -h, ZERO],
    };
    PureState { vec }
}

/// The singlet |ψ−⟩ = (|01⟩ − |10⟩)/√2.
pub fn singlet() -> PureState {
    bell_state(BellKind::PsiMinus)
}

/// Werner state ((1−β)/4)·1 + β·|ψ−⟩⟨ψ−|.
pub fn werner(beta: f64) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&beta) {
        return Err(Error::InvalidParameter(format!(
            "Werner weight {beta} outside [0, 1]"
        )));
    }
    let noise = CMat::identity(4).scale_re((1.0 - beta) / 4.0);
    let singlet = singlet().density().mat.scale_re(beta);
    DensityMatrix::validate(&(&noise + &singlet))
}

/// Random ensemble selector for [`sample_state`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SampleKind {
    /// Normalized standard complex Gaussian 4-vector.
    PureHaar,
    /// GG†/Tr(GG†) with G a 4×rank complex Gaussian matrix.
    Mixed { rank: usize },
    /// Uniform-simplex mixture of `terms` random product pure projectors.
    Separable { terms: usize },
    /// Tensor product of two normalized Gaussian 2-vectors.
    ProductPure,
}

/// Output of [`sample_state`].
#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl Sample {
    pub fn density(&self) -> DensityMatrix {
        match self {
            Sample::Pure(p) => p.density(),
            Sample::Mixed(d) => d.clone(),
        }
    }
}

fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im)
}

fn gaussian_qubit<R: Rng + ?Sized>(rng: &mut R) -> [C64; 2] {
    loop {
        let v = [gaussian_c64(rng), gaussian_c64(rng)];
        let n = norm(&v);
        if n > 1e-12 {
            return v.map(|z| z / n);
        }
    }
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    loop {
        let v = [
            gaussian_c64(rng),
            gaussian_c64(rng),
            gaussian_c64(rng),
            gaussian_c64(rng),
        ];
        if norm(&v) > 1e-12 {
            return PureState::normalized(v).expect("nonzero vector");
        }
    }
}

fn random_product_pure<R: Rng + ?Sized>(rng: &mut R) -> PureState {
    let a = gaussian_qubit(rng);
    let b = gaussian_qubit(rng);
    let vec = [a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1]];
    PureState::normalized(vec).expect("product of unit vectors")
}

/// Haar-random 2×2 unitary (QR of a Ginibre matrix, phases fixed).
pub fn random_unitary2<R: Rng + ?Sized>(rng: &mut R) -> CMat {
    let c0 = gaussian_qubit(rng);
    // Second column: orthogonal complement of the first with a random phase.
    let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    let c1 = [-c0[1].conj() * phase, c0[0].conj() * phase];
    CMat::from_rows(&[[c0[0], c1[0]], [c0[1], c1[1]]]).expect("2x2")
}

/// Draws one member of the requested ensemble. Deterministic given the
/// generator state.
pub fn sample_state<R: Rng + ?Sized>(kind: SampleKind, rng: &mut R) -> Result<Sample> {
    match kind {
        SampleKind::PureHaar => Ok(Sample::Pure(random_pure(rng))),
        SampleKind::ProductPure => Ok(Sample::Pure(random_product_pure(rng))),
        SampleKind::Mixed { rank } => {
            if !(1..=4).contains(&rank) {
                return Err(Error::InvalidParameter(format!(
                    "rank {rank} outside 1..=4"
                )));
            }
            let mut g = CMat::zeros(4, rank);
            for i in 0..4 {
                for j in 0..rank {
                    g[(i, j)] = gaussian_c64(rng);
                }
            }
            let ggh = &g * &g.adjoint();
            let tr = ggh.trace().re;
            Ok(Sample::Mixed(DensityMatrix::validate(
                &ggh.hermitian_part().scale_re(1.0 / tr),
            )?))
        }
        SampleKind::Separable { terms } => {
            if terms == 0 {
                return Err(Error::InvalidParameter(
                    "separable mixture needs terms >= 1".into(),
                ));
            }
            // Uniform simplex weights from normalized exponentials.
            let raw: Vec<f64> = (0..terms).map(|_| Exp1.sample(rng)).collect();
            let total: f64 = raw.iter().sum();
            let mut acc = CMat::zeros(4, 4);
            for w in raw {
                let p = random_product_pure(rng);
                acc = &acc + &p.density().mat.scale_re(w / total);
            }
            Ok(Sample::Mixed(DensityMatrix::validate(
                &acc.hermitian_part(),
            )?))
        }
    }
}

/// Canonical Schmidt form |φ⟩ = (U⊗V)(s₁|+−⟩ − s₂|−+⟩).
#[derive(Debug, Clone)]
pub struct SchmidtForm {
    pub u: CMat,
    pub v: CMat,
    pub s1: f64,
    pub s2: f64,
    pub concurrence: f64,
}

impl SchmidtForm {
    /// (U⊗V)(s₁|01⟩ − s₂|10⟩) as a raw vector.
    pub fn reconstruct(&self) -> [C64; 4] {
        let canonical = [ZERO, C64::new(self.s1, 0.0), C64::new(-self.s2, 0.0), ZERO];
        let w = kron(&self.u, &self.v).expect("2x2 factors");
        let out = w.apply(&canonical);
        [out[0], out[1], out[2], out[3]]
    }
}

/// Singular value decomposition of the 2×2 coefficient matrix of |φ⟩,
/// rearranged into the canonical form above. The reconstruction is exact
/// (no leftover global phase).
pub fn schmidt_decompose(phi: &PureState) -> Result<SchmidtForm> {
    let p = phi.vec;
    let coeff = CMat::from_rows(&[[p[0], p[1]], [p[2], p[3]]])?;
    let gram = &coeff.adjoint() * &coeff;
    let eig = hermitian_eig(&gram)?;
    // Right singular vectors, largest singular value first.
    let x1 = eig.vector(1);
    let mut x2 = eig.vector(0);

    let mx1 = coeff.apply(&x1);
    let s1 = norm(&mx1);
    let w1 = [mx1[0] / s1, mx1[1] / s1];
    let w2 = [-w1[1].conj(), w1[0].conj()];
    let mx2 = coeff.apply(&x2);
    let c = w2[0].conj() * mx2[0] + w2[1].conj() * mx2[1];
    let s2 = c.norm();
    if s2 > 0.0 {
        let fix = c.conj() / s2;
        x2 = x2.iter().map(|z| z * fix).collect();
    }

    let u = CMat::from_rows(&[[w1[0], w2[0]], [w1[1], w2[1]]])?;
    // V = conj(X)·[[0,1],[-1,0]] = [−conj(x₂), conj(x₁)]
    let v = CMat::from_rows(&[[-x2[0].conj(), x1[0].conj()], [-x2[1].conj(), x1[1].conj()]])?;
    let concurrence = (2.0 * s1 * s2).clamp(0.0, 1.0);
    Ok(SchmidtForm {
        u,
        v,
        s1,
        s2,
        concurrence,
    })
}

/// Concurrence 2·s₁·s₂ of a pure state.
pub fn concurrence_pure(phi: &PureState) -> Result<f64> {
    Ok(schmidt_decompose(phi)?.concurrence)
}

/// |00⟩.
pub fn ground() -> PureState {
    PureState {
        vec: [ONE, ZERO, ZERO, ZERO],
    }
}
