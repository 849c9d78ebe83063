//! Unit quaternions and the rotations they induce on R³, plus the
//! SU(2) → SO(3) map used to turn local unitaries into measurement frames.

use std::ops::Mul;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{pauli, CMat};

pub type Mat3 = [[f64; 3]; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion {
    pub w: f64,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Quaternion {
    pub const IDENTITY: Quaternion = Quaternion {
        w: 1.0,
        x: 0.0,
        y: 0.0,
        z: 0.0,
    };

    pub fn new(w: f64, x: f64, y: f64, z: f64) -> Self {
        Quaternion { w, x, y, z }
    }

    /// Rotation by `angle` radians about `axis` (normalized internally).
    pub fn from_axis_angle(axis: [f64; 3], angle: f64) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        let (s, c) = (angle / 2.0).sin_cos();
        Quaternion::new(c, s * axis[0] / n, s * axis[1] / n, s * axis[2] / n)
    }

    /// Uniform on the 3-sphere via a normalized 4-dim Gaussian.
    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let q = Quaternion::new(
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
                StandardNormal.sample(rng),
            );
            if q.norm() > 1e-9 {
                return q.normalized();
            }
        }
    }

    pub fn norm(&self) -> f64 {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm();
        Quaternion::new(self.w / n, self.x / n, self.y / n, self.z / n)
    }

    /// Rotation matrix of a unit quaternion; errors if ‖q‖ is off by more than 1e-9.
    pub fn rotation(&self) -> Result<Mat3> {
        let norm = self.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::NonUnitQuaternion { norm });
        }
        Ok(self.rotation_unchecked())
    }

    pub(crate) fn rotation_unchecked(&self) -> Mat3 {
        let Quaternion { w, x, y, z } = *self;
        [
            [
                1.0 - 2.0 * (y * y + z * z),
                2.0 * (x * y - w * z),
                2.0 * (x * z + w * y),
            ],
            [
                2.0 * (x * y + w * z),
                1.0 - 2.0 * (x * x + z * z),
                2.0 * (y * z - w * x),
            ],
            [
                2.0 * (x * z - w * y),
                2.0 * (y * z + w * x),
                1.0 - 2.0 * (x * x + y * y),
            ],
        ]
    }
}

impl Mul for Quaternion {
    type Output = Quaternion;
    fn mul(self, r: Quaternion) -> Quaternion {
        Quaternion::new(
            self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        )
    }
}

/// R with U(v·σ)U† = (R·v)·σ, i.e. R[i][j] = ½·Tr(σᵢ U σⱼ U†).
/// Always a proper rotation for unitary U.
pub fn rotation_of_unitary(u: &CMat) -> Mat3 {
    let sig = [pauli(1), pauli(2), pauli(3)];
    let moved: Vec<CMat> = sig.iter().map(|s| s.conjugate_by(u)).collect();
    let mut r = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            r[i][j] = 0.5 * sig[i].trace_product(&moved[j]).re;
        }
    }
    r
}

pub fn mat3_vec(m: &Mat3, v: &[f64; 3]) -> [f64; 3] {
    [
        m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
        m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
        m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
    ]
}

pub fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm3(a: &[f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{det3, pauli_dot};
    use crate::states::{random_unitary2, rng_for};

    #[test]
    fn identity_quaternion_is_identity() {
        let r = Quaternion::IDENTITY.rotation().unwrap();
        assert_eq!(r, [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
    }

    #[test]
    fn composition_matches_matrix_product() {
        let mut rng = rng_for(1, 0);
        for _ in 0..100 {
            let (p, q) = (Quaternion::random(&mut rng), Quaternion::random(&mut rng));
            let rp = p.rotation().unwrap();
            let rq = q.rotation().unwrap();
            let rpq = (p * q).normalized().rotation().unwrap();
            for i in 0..3 {
                for j in 0..3 {
                    let prod: f64 = (0..3).map(|k| rp[i][k] * rq[k][j]).sum();
                    assert!((prod - rpq[i][j]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn non_unit_rejected() {
        assert!(matches!(
            Quaternion::new(1.0, 1.0, 0.0, 0.0).rotation(),
            Err(Error::NonUnitQuaternion { .. })
        ));
    }

    #[test]
    fn unitary_rotation_is_proper_and_covariant() {
        let mut rng = rng_for(2, 0);
        for _ in 0..100 {
            let u = random_unitary2(&mut rng);
            let r = rotation_of_unitary(&u);
            assert!((det3(&r) - 1.0).abs() < 1e-12);
            let v = [0.2, -0.7, 0.4];
            let lhs = pauli_dot(&v).conjugate_by(&u);
            let rhs = pauli_dot(&mat3_vec(&r, &v));
            assert!(lhs.max_diff(&rhs) < 1e-12);
        }
    }
}
