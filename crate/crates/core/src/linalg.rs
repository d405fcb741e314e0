//! Dense complex linear algebra.
//!
//! [`ComplexMatrix`] stores entries row-major. Heavy kernels (products,
//! Hermitian eigendecomposition, LU solves) are delegated to `faer` through
//! zero-copy views.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use faer::{MatRef, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Default upper bound on the number of spin-1/2 sites for `2^K` operators.
pub const DEFAULT_SITE_CAP: usize = 14;

/// Environment variable overriding [`DEFAULT_SITE_CAP`].
pub const SITE_CAP_ENV: &str = "CPB_MAX_SITES";

/// Relative tolerance used when a matrix is required to be Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Site cap in force: `CPB_MAX_SITES` if set to a positive integer, else 14.
pub fn site_cap() -> usize {
    std::env::var(SITE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&v| v > 0)
        .unwrap_or(DEFAULT_SITE_CAP)
}

pub(crate) fn check_site_cap(k: usize) -> Result<()> {
    let cap = site_cap();
    // 2^K must also fit an index comfortably.
    if k > cap || k >= usize::BITS as usize / 2 {
        return Err(Error::Resource { requested: k, cap });
    }
    Ok(())
}

#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows.min(8) {
            write!(f, "  ")?;
            for j in 0..self.cols.min(8) {
                let z = self[(i, j)];
                write!(f, "{:+.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl ComplexMatrix {
    /// Zero matrix.
    ///
    /// # Panics
    ///
    /// Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        Self {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::validation("matrix dimensions must be positive"));
        }
        if data.len() != rows * cols {
            return Err(Error::validation(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        Ok(Self { rows, cols, data })
    }

    /// Square matrix from nested rows of real numbers.
    pub fn from_real_rows(rows: &[&[f64]]) -> Result<Self> {
        let n = rows.len();
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::validation("ragged rows"));
        }
        let data = rows
            .iter()
            .flat_map(|r| r.iter().map(|&x| C64::new(x, 0.0)))
            .collect();
        Self::from_row_major(n, cols, data)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
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

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn as_faer(&self) -> MatRef<'_, C64> {
        MatRef::from_row_major_slice(&self.data, self.rows, self.cols)
    }

    pub fn from_faer(m: MatRef<'_, C64>) -> Self {
        Self::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    pub fn trace(&self) -> C64 {
        self.diagonal().into_iter().sum()
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// `self += c * other`, shapes must agree.
    pub fn add_scaled(&mut self, c: C64, other: &ComplexMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch");
        for (a, &b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Maximum absolute column sum.
    pub fn one_norm(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn matmul(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        if self.cols != other.rows {
            return Err(Error::validation(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let prod = self.as_faer() * other.as_faer();
        Ok(Self::from_faer(prod.as_ref()))
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(v.len(), self.cols, "vector length mismatch");
        self.data
            .chunks_exact(self.cols)
            .map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `⟨u|M|v⟩`.
    pub fn sandwich(&self, u: &[C64], v: &[C64]) -> C64 {
        inner(u, &self.apply(v))
    }

    pub fn kron(&self, other: &ComplexMatrix) -> ComplexMatrix {
        let (r2, c2) = (other.rows, other.cols);
        Self::from_fn(self.rows * r2, self.cols * c2, |i, j| {
            self[(i / r2, j / c2)] * other[(i % r2, j % c2)]
        })
    }

    /// Sub-block picking the given rows and columns.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> ComplexMatrix {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])])
    }

    /// Largest `|M[i][j] - conj(M[j][i])|` together with its location.
    pub fn hermiticity_defect(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.rows {
            for j in i..self.cols {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm();
                if d > worst.0 {
                    worst = (d, i, j);
                }
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.is_square() && self.hermiticity_defect().0 <= HERMITIAN_TOL * self.max_abs().max(f64::MIN_POSITIVE)
    }

    /// `(M + M†) / 2`.
    pub fn hermitian_part(&self) -> ComplexMatrix {
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Whether every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self[(i, j)] == C64::new(0.0, 0.0)))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(C64::new(1.0, 0.0), rhs);
        out
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let mut out = self.clone();
        out.add_scaled(C64::new(-1.0, 0.0), rhs);
        out
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    /// # Panics
    ///
    /// Panics on incompatible shapes; use [`ComplexMatrix::matmul`] for a
    /// fallible product.
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.matmul(rhs).expect("incompatible matrix shapes")
    }
}

/// `⟨u|v⟩`, conjugating the left argument.
pub fn inner(u: &[C64], v: &[C64]) -> C64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

pub fn vector_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `|u⟩⟨v|`.
pub fn outer(u: &[C64], v: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_fn(u.len(), v.len(), |i, j| u[i] * v[j].conj())
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `i` is the eigenvector of `eigenvalues[i]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn vector(&self, i: usize) -> Vec<C64> {
        self.eigenvectors.column(i)
    }

    /// `V diag(λ) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let scaled = ComplexMatrix::from_fn(v.rows(), v.cols(), |i, j| v[(i, j)] * self.eigenvalues[j]);
        &scaled * &v.adjoint()
    }
}

fn require_hermitian(m: &ComplexMatrix) -> Result<()> {
    if !m.is_square() {
        return Err(Error::validation(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let (defect, i, j) = m.hermiticity_defect();
    let scale = m.max_abs();
    if defect > HERMITIAN_TOL * scale {
        return Err(Error::validation(format!(
            "matrix is not Hermitian: |M[{i}][{j}] - conj(M[{j}][{i}])| = {defect:.3e} exceeds {:.3e}",
            HERMITIAN_TOL * scale
        )));
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix. The input is symmetrised
/// before solving; eigenvalues come back ascending.
pub fn hermitian_eigendecomposition(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    require_hermitian(m)?;
    let sym = m.hermitian_part();
    let evd = sym
        .as_faer()
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))?;
    let s = evd.S();
    let eigenvalues = (0..sym.rows()).map(|i| s[i].re).collect();
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: ComplexMatrix::from_faer(evd.U()),
    })
}

/// Ascending eigenvalues only; cheaper than the full decomposition.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    require_hermitian(m)?;
    let sym = m.hermitian_part();
    sym.as_faer()
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver(format!("{e:?}")))
}

/// `AB - BA`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() || !b.is_square() || a.rows() != b.rows() {
        return Err(Error::validation(format!(
            "commutator needs square matrices of equal size, got {}x{} and {}x{}",
            a.rows(),
            a.cols(),
            b.rows(),
            b.cols()
        )));
    }
    Ok(&(a * b) - &(b * a))
}

/// Embeds a single-site operator into the `2^K` register.
///
/// Site `k` (1-based) occupies bit `K - k` of the basis index, so site 1 is
/// the most significant bit. Bit value 0 is the first basis vector of
/// `local` (spin up for the spin-1/2 convention used throughout).
pub fn tensor_embed(k_sites: usize, site: usize, local: &ComplexMatrix) -> Result<ComplexMatrix> {
    if local.rows() != 2 || local.cols() != 2 {
        return Err(Error::validation("local operator must be 2x2"));
    }
    if site < 1 || site > k_sites {
        return Err(Error::validation(format!("site {site} outside 1..={k_sites}")));
    }
    check_site_cap(k_sites)?;
    let dim = 1usize << k_sites;
    let shift = k_sites - site;
    let mask = 1usize << shift;
    let mut out = ComplexMatrix::zeros(dim, dim);
    for col in 0..dim {
        let bc = (col >> shift) & 1;
        for br in 0..2 {
            let v = local[(br, bc)];
            if v != C64::new(0.0, 0.0) {
                let row = (col & !mask) | (br << shift);
                out[(row, col)] = v;
            }
        }
    }
    Ok(out)
}

// [13/13] Padé coefficients for exp.
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];
const THETA13: f64 = 5.371920351148152;

/// Matrix exponential by scaling and squaring with a [13/13] Padé
/// approximant.
pub fn matrix_exponential(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !m.is_square() {
        return Err(Error::validation(format!(
            "matrix exponential needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if let Some(d) = diagonal_exponential(m) {
        return Ok(d);
    }
    let n = m.rows();
    let norm = m.one_norm();
    let squarings = if norm > THETA13 {
        (norm / THETA13).log2().ceil().max(0.0) as i32
    } else {
        0
    };
    let a = m.scale_real(0.5f64.powi(squarings));
    let id = ComplexMatrix::identity(n);
    let a2 = &a * &a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = |k: usize| C64::new(PADE13[k], 0.0);

    let mut u_inner = a6.scale(b(13));
    u_inner.add_scaled(b(11), &a4);
    u_inner.add_scaled(b(9), &a2);
    let mut u_poly = &a6 * &u_inner;
    u_poly.add_scaled(b(7), &a6);
    u_poly.add_scaled(b(5), &a4);
    u_poly.add_scaled(b(3), &a2);
    u_poly.add_scaled(b(1), &id);
    let u = &a * &u_poly;

    let mut v_inner = a6.scale(b(12));
    v_inner.add_scaled(b(10), &a4);
    v_inner.add_scaled(b(8), &a2);
    let mut v = &a6 * &v_inner;
    v.add_scaled(b(6), &a6);
    v.add_scaled(b(4), &a4);
    v.add_scaled(b(2), &a2);
    v.add_scaled(b(0), &id);

    // (V - U) R = V + U
    let p = &v + &u;
    let q = &v - &u;
    let lu = q.as_faer().partial_piv_lu();
    let sol = faer::linalg::solvers::Solve::solve(&lu, p.as_faer());
    let mut r = ComplexMatrix::from_faer(sol.as_ref());
    for _ in 0..squarings {
        r = &r * &r;
    }
    Ok(r)
}

fn diagonal_exponential(m: &ComplexMatrix) -> Option<ComplexMatrix> {
    if !m.is_diagonal() {
        return None;
    }
    let mut out = ComplexMatrix::zeros(m.rows(), m.cols());
    for i in 0..m.rows() {
        out[(i, i)] = m[(i, i)].exp();
    }
    Some(out)
}

/// Real-valued convenience wrapper around [`matrix_exponential`].
pub fn matrix_exponential_real<const N: usize>(m: [[f64; N]; N]) -> [[f64; N]; N] {
    let cm = ComplexMatrix::from_fn(N, N, |i, j| C64::new(m[i][j], 0.0));
    let e = matrix_exponential(&cm).expect("square by construction");
    let mut out = [[0.0; N]; N];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, x) in row.iter_mut().enumerate() {
            *x = e[(i, j)].re;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]).unwrap()
    }

    fn pauli_y() -> ComplexMatrix {
        ComplexMatrix::from_row_major(2, 2, vec![c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)]).unwrap()
    }

    fn pauli_z() -> ComplexMatrix {
        ComplexMatrix::from_real_diagonal(&[1.0, -1.0])
    }

    #[test]
    fn identity_and_pauli_spectra() {
        let e = hermitian_eigendecomposition(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(e.eigenvalues.len(), 2);
        for l in e.eigenvalues {
            assert!((l - 1.0).abs() < 1e-14);
        }
        let e = hermitian_eigendecomposition(&pauli_x()).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn arrowhead_matches_cubic_roots() {
        // diag(-1, 1, 1), coupling 0.5 between entries 1 and 2.
        let m = ComplexMatrix::from_real_rows(&[&[-1.0, 0.5, 0.0], &[0.5, 1.0, 0.0], &[0.0, 0.0, 1.0]]).unwrap();
        // det(M - x) = (1 - x)[(-1 - x)(1 - x) - 1/4] = (1 - x)(x^2 - 5/4).
        let mut expected = [-(1.25f64).sqrt(), 1.0, (1.25f64).sqrt()];
        expected.sort_by(f64::total_cmp);
        let e = hermitian_eigendecomposition(&m).unwrap();
        for (got, want) in e.eigenvalues.iter().zip(expected) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
        // Roots of the cubic via bisection on the characteristic polynomial.
        let charpoly = |x: f64| (1.0 - x) * ((-1.0 - x) * (1.0 - x) - 0.25);
        let root = |mut lo: f64, mut hi: f64| {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if charpoly(lo).signum() == charpoly(mid).signum() {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            0.5 * (lo + hi)
        };
        assert!((root(-2.0, 0.0) - e.eigenvalues[0]).abs() < 1e-12);
        assert!((root(1.05, 2.0) - e.eigenvalues[2]).abs() < 1e-12);
    }

    #[test]
    fn non_square_and_non_hermitian_rejected() {
        let rect = ComplexMatrix::zeros(2, 3);
        assert!(matches!(hermitian_eigendecomposition(&rect), Err(Error::Validation(_))));
        let mut m = ComplexMatrix::identity(3);
        m[(0, 2)] = c(0.3, 0.0);
        let err = hermitian_eigendecomposition(&m).unwrap_err();
        assert!(err.to_string().contains("M[0][2]"), "{err}");
    }

    #[test]
    fn pauli_commutators() {
        let zx = commutator(&pauli_z(), &pauli_x()).unwrap();
        let expected = pauli_y().scale(c(0.0, 2.0));
        assert!((&zx - &expected).max_abs() < 1e-15);
        let a = pauli_y();
        assert_eq!(commutator(&a, &a).unwrap().max_abs(), 0.0);
        assert!(commutator(&a, &ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn embed_single_site_is_identity_map() {
        let sz = pauli_z().scale_real(0.5);
        assert_eq!(tensor_embed(1, 1, &sz).unwrap(), sz);
    }

    #[test]
    fn embed_most_significant_bit_ordering() {
        // Basis 00, 01, 10, 11: site 1 is the leading bit, bit 0 = up.
        let sz = pauli_z().scale_real(0.5);
        let m = tensor_embed(2, 1, &sz).unwrap();
        let d: Vec<f64> = m.diagonal().iter().map(|z| z.re).collect();
        assert_eq!(d, vec![0.5, 0.5, -0.5, -0.5]);
        let m2 = tensor_embed(2, 2, &sz).unwrap();
        let d2: Vec<f64> = m2.diagonal().iter().map(|z| z.re).collect();
        assert_eq!(d2, vec![0.5, -0.5, 0.5, -0.5]);
    }

    #[test]
    fn embed_matches_kron() {
        let a = pauli_y();
        let id2 = ComplexMatrix::identity(2);
        let expect = id2.kron(&a).kron(&id2);
        assert_eq!(tensor_embed(3, 2, &a).unwrap(), expect);
    }

    #[test]
    fn embed_rejects_bad_sites_and_cap() {
        let a = pauli_x();
        assert!(matches!(tensor_embed(3, 0, &a), Err(Error::Validation(_))));
        assert!(matches!(tensor_embed(3, 4, &a), Err(Error::Validation(_))));
        assert!(matches!(
            tensor_embed(DEFAULT_SITE_CAP + 1, 1, &a),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn expm_simple_cases() {
        let z = matrix_exponential(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(z, ComplexMatrix::identity(3));
        let d = matrix_exponential(&ComplexMatrix::from_real_diagonal(&[0.3, -2.0])).unwrap();
        assert!((d[(0, 0)].re - 0.3f64.exp()).abs() < 1e-15);
        assert!((d[(1, 1)].re - (-2.0f64).exp()).abs() < 1e-15);
        let nil = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap();
        let e = matrix_exponential(&nil).unwrap();
        let want = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]).unwrap();
        assert!((&e - &want).max_abs() < 1e-15);
        assert!(matrix_exponential(&ComplexMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn expm_rotation_generator() {
        // exp(-i t σx) = cos t - i sin t σx
        let t = 7.3;
        let e = matrix_exponential(&pauli_x().scale(c(0.0, -t))).unwrap();
        assert!((e[(0, 0)] - c(t.cos(), 0.0)).norm() < 1e-13);
        assert!((e[(0, 1)] - c(0.0, -t.sin())).norm() < 1e-13);
    }

    #[test]
    fn expm_real_wrapper_triangular() {
        let e = matrix_exponential_real([[-1.0, 0.0], [1.0, -1.0]]);
        let t = (-1.0f64).exp();
        assert!((e[0][0] - t).abs() < 1e-15);
        assert!((e[1][0] - t).abs() < 1e-15);
        assert!(e[0][1].abs() < 1e-15);
    }

    #[test]
    fn reconstruction_of_small_hermitian() {
        let m = ComplexMatrix::from_row_major(
            3,
            3,
            vec![c(2.0, 0.0), c(0.5, 1.0), c(0.0, -0.3), c(0.5, -1.0), c(-1.0, 0.0), c(0.2, 0.0), c(0.0, 0.3), c(0.2, 0.0), c(0.7, 0.0)],
        )
        .unwrap();
        let e = hermitian_eigendecomposition(&m).unwrap();
        assert!((&e.reconstruct() - &m).frobenius_norm() < 1e-13);
        assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    }
}
