//! Dense complex matrices for the 2×2 and 4×4 operators of a qubit pair.
//!
//! Everything here is small enough that clarity wins over blocking or SIMD:
//! products are triple loops and the eigensolver is cyclic Jacobi.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Inputs whose Hermitian part differs from them by more than this are rejected.
pub const HERMITIAN_TOL: f64 = 1e-9;

/// Jacobi stops once the off-diagonal Frobenius norm falls below this
/// fraction of the full Frobenius norm.
pub const JACOBI_OFF_TOL: f64 = 1e-14;
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    /// Builds a matrix from row-major entries, checking shape and finiteness.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if data.len() != rows * cols || rows == 0 || cols == 0 {
            return Err(Error::Dimension {
                expected: format!("{rows}x{cols} ({} entries)", rows * cols),
                got: format!("{} entries", data.len()),
            });
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMat { rows, cols, data })
    }

    /// Builds a matrix from nested rows.
    pub fn from_rows<R: AsRef<[C64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        if rows.iter().any(|r| r.as_ref().len() != n_cols) {
            return Err(Error::Dimension {
                expected: format!("{n_rows} rows of {n_cols}"),
                got: "ragged rows".into(),
            });
        }
        let data = rows
            .iter()
            .flat_map(|r| r.as_ref().iter().copied())
            .collect();
        CMat::from_vec(n_rows, n_cols, data)
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let mut m = CMat::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Outer product |u⟩⟨v|.
    pub fn outer(u: &[C64], v: &[C64]) -> Self {
        let mut m = CMat::zeros(u.len(), v.len());
        for (i, ui) in u.iter().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                m[(i, j)] = ui * vj.conj();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> CMat {
        let mut out = CMat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn scale(&self, k: C64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * k).collect(),
        }
    }

    pub fn scale_re(&self, k: f64) -> CMat {
        self.scale(C64::new(k, 0.0))
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Tr(self · other) without forming the product.
    pub fn trace_product(&self, other: &CMat) -> C64 {
        let mut acc = ZERO;
        for i in 0..self.rows {
            for k in 0..self.cols {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Max-norm distance to another matrix of the same shape.
    pub fn max_diff(&self, other: &CMat) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Max-norm of M − M†.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.rows;
        let mut dev = 0.0_f64;
        for i in 0..n {
            for j in i..n {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    /// (M + M†)/2.
    pub fn hermitian_part(&self) -> CMat {
        (self + &self.adjoint()).scale_re(0.5)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols);
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// ⟨u|M|v⟩.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        let mv = self.apply(v);
        u.iter().zip(&mv).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Commutator [self, other].
    pub fn commutator(&self, other: &CMat) -> CMat {
        &(self * other) - &(other * self)
    }

    /// Anticommutator {self, other}.
    pub fn anticommutator(&self, other: &CMat) -> CMat {
        &(self * other) + &(other * self)
    }

    /// U · self · U†.
    pub fn conjugate_by(&self, u: &CMat) -> CMat {
        &(u * self) * &u.adjoint()
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &CMat {
    type Output = CMat;
    fn mul(self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "inner dimensions differ");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl Add for &CMat {
    type Output = CMat;
    fn add(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }
}

impl Sub for &CMat {
    type Output = CMat;
    fn sub(self, rhs: &CMat) -> CMat {
        assert_eq!((self.rows, self.cols), (rhs.rows, rhs.cols));
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }
}

fn require_shape(m: &CMat, rows: usize, cols: usize) -> Result<()> {
    if m.rows != rows || m.cols != cols {
        return Err(Error::Dimension {
            expected: format!("{rows}x{cols}"),
            got: format!("{}x{}", m.rows, m.cols),
        });
    }
    Ok(())
}

/// Pauli matrix σ_k for k ∈ {1, 2, 3}; σ_0 is the identity.
pub fn pauli(k: usize) -> CMat {
    let rows: [[C64; 2]; 2] = match k {
        0 => [[ONE, ZERO], [ZERO, ONE]],
        1 => [[ZERO, ONE], [ONE, ZERO]],
        2 => [[ZERO, -I], [I, ZERO]],
        3 => [[ONE, ZERO], [ZERO, -ONE]],
        _ => panic!("pauli index {k} out of range"),
    };
    CMat::from_rows(&rows).expect("static shape")
}

/// v · σ for a real 3-vector.
pub fn pauli_dot(v: &[f64; 3]) -> CMat {
    let mut m = CMat::zeros(2, 2);
    m[(0, 0)] = C64::new(v[2], 0.0);
    m[(1, 1)] = C64::new(-v[2], 0.0);
    m[(0, 1)] = C64::new(v[0], -v[1]);
    m[(1, 0)] = C64::new(v[0], v[1]);
    m
}

/// Kronecker product of two 2×2 matrices: out[2i+k][2j+l] = a[i][j]·b[k][l].
pub fn kron(a: &CMat, b: &CMat) -> Result<CMat> {
    require_shape(a, 2, 2)?;
    require_shape(b, 2, 2)?;
    let mut out = CMat::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = a[(i, j)] * b[(k, l)];
                }
            }
        }
    }
    Ok(out)
}

/// Transpose on the second tensor factor: each 2×2 block is transposed in place.
pub fn partial_transpose_b(m: &CMat) -> Result<CMat> {
    require_shape(m, 4, 4)?;
    let mut out = CMat::zeros(4, 4);
    for i in 0..2 {
        for j in 0..2 {
            for k in 0..2 {
                for l in 0..2 {
                    out[(2 * i + k, 2 * j + l)] = m[(2 * i + l, 2 * j + k)];
                }
            }
        }
    }
    Ok(out)
}

/// Spectral decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct EigResult {
    /// Ascending.
    pub values: Vec<f64>,
    /// Column `i` is the unit eigenvector for `values[i]`.
    pub vectors: CMat,
}

impl EigResult {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.vectors.column(i)
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }

    /// V · diag(λ) · V†.
    pub fn reconstruct(&self) -> CMat {
        let d = CMat::from_real_diag(&self.values);
        &(&self.vectors * &d) * &self.vectors.adjoint()
    }
}

fn off_diagonal_norm(a: &CMat) -> f64 {
    let n = a.rows;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Eigendecomposition of a 2×2 or 4×4 Hermitian matrix by cyclic Jacobi
/// rotations. The input is symmetrized before iterating.
pub fn hermitian_eig(m: &CMat) -> Result<EigResult> {
    if !m.is_square() || !(m.rows == 2 || m.rows == 4) {
        return Err(Error::Dimension {
            expected: "2x2 or 4x4".into(),
            got: format!("{}x{}", m.rows, m.cols),
        });
    }
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_TOL {
        return Err(Error::NotHermitian { deviation });
    }
    let n = m.rows;
    let mut a = m.hermitian_part();
    let mut v = CMat::identity(n);
    let scale = a.frobenius();

    for _sweep in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a) <= JACOBI_OFF_TOL * scale {
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[(p, q)];
                let r = apq.norm();
                if r == 0.0 {
                    continue;
                }
                // Phase e^{-iφ} on column q makes the pivot real, then a real
                // rotation annihilates it.
                let phase = (apq / r).conj();
                let tau = (a[(q, q)].re - a[(p, p)].re) / (2.0 * r);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                rotate(&mut a, &mut v, p, q, c, s, phase);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let values = order.iter().map(|&i| a[(i, i)].re).collect();
    let mut vectors = CMat::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let norm = (0..n).map(|r| v[(r, src)].norm_sqr()).sum::<f64>().sqrt();
        for r in 0..n {
            vectors[(r, col)] = v[(r, src)] / norm;
        }
    }
    Ok(EigResult { values, vectors })
}

/// A ← G†AG and V ← VG for the plane rotation G acting on indices p, q:
/// G_pp = c, G_pq = s, G_qp = −s·phase, G_qq = c·phase.
fn rotate(a: &mut CMat, v: &mut CMat, p: usize, q: usize, c: f64, s: f64, phase: C64) {
    let n = a.rows;
    let g_pp = C64::new(c, 0.0);
    let g_pq = C64::new(s, 0.0);
    let g_qp = -phase * s;
    let g_qq = phase * c;
    // A ← A·G (columns p, q)
    for r in 0..n {
        let ap = a[(r, p)];
        let aq = a[(r, q)];
        a[(r, p)] = ap * g_pp + aq * g_qp;
        a[(r, q)] = ap * g_pq + aq * g_qq;
        let vp = v[(r, p)];
        let vq = v[(r, q)];
        v[(r, p)] = vp * g_pp + vq * g_qp;
        v[(r, q)] = vp * g_pq + vq * g_qq;
    }
    // A ← G†·A (rows p, q)
    for col in 0..n {
        let ap = a[(p, col)];
        let aq = a[(q, col)];
        a[(p, col)] = g_pp.conj() * ap + g_qp.conj() * aq;
        a[(q, col)] = g_pq.conj() * ap + g_qq.conj() * aq;
    }
    a[(p, q)] = ZERO;
    a[(q, p)] = ZERO;
}

/// Determinant of a real 3×3 matrix.
pub fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn random_hermitian(rng: &mut ChaCha8Rng, n: usize) -> CMat {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = c(rng.random_range(-1.0..1.0), 0.0);
            for j in i + 1..n {
                let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    fn random_2x2(rng: &mut ChaCha8Rng) -> CMat {
        let data = (0..4)
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        CMat::from_vec(2, 2, data).unwrap()
    }

    fn singlet_projector() -> CMat {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let psi = [ZERO, c(h, 0.0), c(-h, 0.0), ZERO];
        CMat::outer(&psi, &psi)
    }

    #[test]
    fn kron_identity_and_diagonal() {
        assert_eq!(kron(&pauli(0), &pauli(0)).unwrap(), CMat::identity(4));
        let zz = kron(&pauli(3), &pauli(3)).unwrap();
        assert_eq!(zz, CMat::from_real_diag(&[1.0, -1.0, -1.0, 1.0]));
    }

    #[test]
    fn kron_matches_entrywise_definition() {
        let (a, b) = (pauli(1), pauli(2));
        let k = kron(&a, &b).unwrap();
        for row in 0..4 {
            for col in 0..4 {
                let expect = a[(row / 2, col / 2)] * b[(row % 2, col % 2)];
                assert_eq!(k[(row, col)], expect);
            }
        }
        // σ1⊗σ2 only lives on the anti-diagonal with ±i entries.
        assert_eq!(k[(0, 3)], -I);
        assert_eq!(k[(1, 2)], I);
        assert_eq!(k[(2, 1)], -I);
        assert_eq!(k[(3, 0)], I);
    }

    #[test]
    fn kron_rejects_bad_shape() {
        assert!(matches!(
            kron(&CMat::identity(4), &pauli(1)),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn kron_mixed_product_and_bilinearity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let (a, b, cc, d) = (
                random_2x2(&mut rng),
                random_2x2(&mut rng),
                random_2x2(&mut rng),
                random_2x2(&mut rng),
            );
            let lhs = &kron(&a, &b).unwrap() * &kron(&cc, &d).unwrap();
            let rhs = kron(&(&a * &cc), &(&b * &d)).unwrap();
            assert!(lhs.max_diff(&rhs) < 1e-12);

            let k = c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0));
            let lin = kron(&(&a.scale(k) + &cc), &b).unwrap();
            let split = &kron(&a, &b).unwrap().scale(k) + &kron(&cc, &b).unwrap();
            assert!(lin.max_diff(&split) < 1e-12);
        }
    }

    #[test]
    fn eig_diagonal_sorted() {
        let e = hermitian_eig(&CMat::from_real_diag(&[3.0, 1.0, 2.0, 0.0])).unwrap();
        assert_eq!(e.values, vec![0.0, 1.0, 2.0, 3.0]);
    }

    #[test]
    fn eig_identity() {
        let e = hermitian_eig(&CMat::identity(4)).unwrap();
        assert!(e.values.iter().all(|&l| (l - 1.0).abs() < 1e-15));
        let gram = &e.vectors.adjoint() * &e.vectors;
        assert!(gram.max_diff(&CMat::identity(4)) < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let mut m = CMat::identity(4);
        m[(0, 1)] = c(1e-6, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn partial_transpose_singlet_spectrum() {
        // Oracle: the singlet projector's partial transpose is
        // (1/2)·[[0,0,0,-1],[0,1,0,0],[0,0,1,0],[-1,0,0,0]]. Its characteristic
        // polynomial factors as (x - 1/2)^2 (x^2 - 1/4), so the spectrum is
        // {-1/2, 1/2, 1/2, 1/2}.
        let pt = partial_transpose_b(&singlet_projector()).unwrap();
        let expect = CMat::from_rows(&[
            [ZERO, ZERO, ZERO, c(-0.5, 0.0)],
            [ZERO, c(0.5, 0.0), ZERO, ZERO],
            [ZERO, ZERO, c(0.5, 0.0), ZERO],
            [c(-0.5, 0.0), ZERO, ZERO, ZERO],
        ])
        .unwrap();
        assert!(pt.max_diff(&expect) < 1e-15);
        let e = hermitian_eig(&pt).unwrap();
        let want = [-0.5, 0.5, 0.5, 0.5];
        for (got, w) in e.values.iter().zip(want) {
            assert!((got - w).abs() < 1e-12, "{:?}", e.values);
        }
    }

    #[test]
    fn partial_transpose_product_and_involution() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let a = random_2x2(&mut rng);
            let b = random_2x2(&mut rng);
            let prod = kron(&a, &b).unwrap();
            let pt = partial_transpose_b(&prod).unwrap();
            assert!(pt.max_diff(&kron(&a, &b.transpose()).unwrap()) < 1e-15);
            let twice = partial_transpose_b(&pt).unwrap();
            assert_eq!(twice, prod);
            assert!((pt.trace() - prod.trace()).norm() < 1e-15);
        }
    }

    #[test]
    fn eig_random_residual_and_orthonormality() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let m = random_hermitian(&mut rng, 4);
            let e = hermitian_eig(&m).unwrap();
            assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
            for i in 0..4 {
                let v = e.vector(i);
                let mv = m.apply(&v);
                let res = mv
                    .iter()
                    .zip(&v)
                    .map(|(a, b)| (a - b * e.values[i]).norm())
                    .fold(0.0, f64::max);
                assert!(res < 1e-10, "residual {res}");
            }
            let gram = &e.vectors.adjoint() * &e.vectors;
            assert!(gram.max_diff(&CMat::identity(4)) < 1e-10);
            assert!(e.reconstruct().max_diff(&m) < 1e-10);
        }
    }

    #[test]
    fn eig_two_by_two() {
        let e = hermitian_eig(&pauli(2)).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-14 && (e.values[1] - 1.0).abs() < 1e-14);
        assert!(e.reconstruct().max_diff(&pauli(2)) < 1e-14);
    }

    #[test]
    fn pauli_dot_matches_sum() {
        let v = [0.3, -0.4, 0.5];
        let sum = &(&pauli(1).scale_re(v[0]) + &pauli(2).scale_re(v[1])) + &pauli(3).scale_re(v[2]);
        assert!(pauli_dot(&v).max_diff(&sum) < 1e-16);
    }

    #[test]
    fn det3_of_rotation() {
        let m = [[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]];
        assert_eq!(det3(&m), 1.0);
    }
}
