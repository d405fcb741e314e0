//! Spin-j matrices, site and collective spin operators on the `K`-spin
//! register, and SU(2) bookkeeping (multiplicities, `(j, m)` labels).

use std::fmt;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{self, commutator, hermitian_eigendecomposition, ComplexMatrix};

/// Half-integer stored as its double, so lattice arithmetic stays exact.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt(i64);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);

    pub const fn from_doubled(twice: i64) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: i64) -> Self {
        HalfInt(2 * n)
    }

    /// Accepts only exact multiples of 1/2.
    pub fn try_from_f64(x: f64) -> Result<Self> {
        let twice = 2.0 * x;
        if !twice.is_finite() || twice.fract() != 0.0 || twice.abs() > 1e15 {
            return Err(Error::validation(format!("{x} is not a half-integer")));
        }
        Ok(HalfInt(twice as i64))
    }

    pub const fn doubled(self) -> i64 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// `j(j + 1)`.
    pub fn casimir(self) -> f64 {
        (self.0 * (self.0 + 2)) as f64 / 4.0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// Spin-j matrices in the basis `m = j, j-1, ..., -j`.
#[derive(Clone, Debug)]
pub struct SpinJOperators {
    pub j: HalfInt,
    pub jx: ComplexMatrix,
    pub jy: ComplexMatrix,
    pub jz: ComplexMatrix,
    pub jplus: ComplexMatrix,
    pub jminus: ComplexMatrix,
    pub jsquared: ComplexMatrix,
}

impl SpinJOperators {
    pub fn dimension(&self) -> usize {
        self.jz.rows()
    }

    /// `m` value of basis index `i`.
    pub fn m_of(&self, i: usize) -> HalfInt {
        HalfInt(self.j.0 - 2 * i as i64)
    }
}

/// `⟨j, m+1|J+|j, m⟩ = sqrt(j(j+1) - m(m+1))`.
pub fn raising_element(j: HalfInt, m: HalfInt) -> f64 {
    let (jv, mv) = (j.value(), m.value());
    (jv * (jv + 1.0) - mv * (mv + 1.0)).max(0.0).sqrt()
}

pub fn build_spin_j(j: HalfInt) -> Result<SpinJOperators> {
    if j.0 < 0 {
        return Err(Error::validation(format!("spin j = {j} must be non-negative")));
    }
    let dim = (j.0 + 1) as usize;
    let m_of = |i: usize| j.value() - i as f64;
    let jz = ComplexMatrix::from_real_diagonal(&(0..dim).map(m_of).collect::<Vec<_>>());
    // index i-1 carries m+1
    let jplus = ComplexMatrix::from_fn(dim, dim, |r, c| {
        if c == r + 1 {
            C64::new(raising_element(j, HalfInt(j.0 - 2 * c as i64)), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    let jminus = jplus.adjoint();
    let jx = (&jplus + &jminus).scale_real(0.5);
    let jy = (&jplus - &jminus).scale(C64::new(0.0, -0.5));
    let jsquared = ComplexMatrix::identity(dim).scale_real(j.casimir());
    Ok(SpinJOperators {
        j,
        jx,
        jy,
        jz,
        jplus,
        jminus,
        jsquared,
    })
}

fn pauli_half() -> [ComplexMatrix; 3] {
    let z = C64::new(0.0, 0.0);
    let h = 0.5;
    [
        ComplexMatrix::from_row_major(2, 2, vec![z, C64::new(h, 0.), C64::new(h, 0.), z]).unwrap(),
        ComplexMatrix::from_row_major(2, 2, vec![z, C64::new(0., -h), C64::new(0., h), z]).unwrap(),
        ComplexMatrix::from_real_diagonal(&[h, -h]),
    ]
}

/// Spin-1/2 raising operator in the `(up, down)` basis.
pub fn local_raising() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]).unwrap()
}

pub fn local_lowering() -> ComplexMatrix {
    local_raising().adjoint()
}

fn require_even(k_sites: usize) -> Result<()> {
    if k_sites == 0 || !k_sites.is_multiple_of(2) {
        return Err(Error::validation(format!("K = {k_sites} must be a positive even number")));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SiteSpin {
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
}

impl SiteSpin {
    pub fn raising(&self) -> ComplexMatrix {
        let mut out = self.sx.clone();
        out.add_scaled(C64::new(0.0, 1.0), &self.sy);
        out
    }

    pub fn lowering(&self) -> ComplexMatrix {
        let mut out = self.sx.clone();
        out.add_scaled(C64::new(0.0, -1.0), &self.sy);
        out
    }
}

/// `s^x_k, s^y_k, s^z_k` on the `2^K` register.
pub fn site_spin_operators(k_sites: usize, site: usize) -> Result<SiteSpin> {
    require_even(k_sites)?;
    let [x, y, z] = pauli_half();
    Ok(SiteSpin {
        sx: linalg::tensor_embed(k_sites, site, &x)?,
        sy: linalg::tensor_embed(k_sites, site, &y)?,
        sz: linalg::tensor_embed(k_sites, site, &z)?,
    })
}

#[derive(Clone, Debug)]
pub struct CollectiveOperators {
    pub jx: ComplexMatrix,
    pub jy: ComplexMatrix,
    pub jz: ComplexMatrix,
    pub jsquared: ComplexMatrix,
}

/// `J_α = Σ_k s^α_k` and `J² = J_x² + J_y² + J_z²`, all dense `2^K` matrices.
pub fn collective_operators(k_sites: usize) -> Result<CollectiveOperators> {
    require_even(k_sites)?;
    linalg::check_site_cap(k_sites)?;
    let dim = 1usize << k_sites;
    let one = C64::new(1.0, 0.0);
    let mut jx = ComplexMatrix::zeros(dim, dim);
    let mut jy = ComplexMatrix::zeros(dim, dim);
    let mut jz = ComplexMatrix::zeros(dim, dim);
    for site in 1..=k_sites {
        let s = site_spin_operators(k_sites, site)?;
        jx.add_scaled(one, &s.sx);
        jy.add_scaled(one, &s.sy);
        jz.add_scaled(one, &s.sz);
    }
    let mut jsquared = &jx * &jx;
    jsquared.add_scaled(one, &(&jy * &jy));
    jsquared.add_scaled(one, &(&jz * &jz));
    Ok(CollectiveOperators { jx, jy, jz, jsquared })
}

fn binomial(n: u64, k: i64) -> Result<u128> {
    if k < 0 || k as u64 > n {
        return Ok(0);
    }
    let k = (k as u64).min(n - k as u64);
    let mut acc: u128 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = acc
            .checked_mul((n - i) as u128)
            .ok_or_else(|| Error::Numerical(format!("binomial C({n}, {k}) overflows")))?
            / (i + 1) as u128;
    }
    Ok(acc)
}

/// Number of copies `r_j` of the spin-j irrep inside `K` spins-1/2:
/// `C(K, K/2 - j) - C(K, K/2 - j - 1)`.
pub fn multiplicity(k_sites: usize, j: HalfInt) -> Result<u128> {
    require_even(k_sites)?;
    let k2 = k_sites as i64;
    if j.0 < 0 || j.0 > k2 || (k2 - j.0) % 2 != 0 {
        return Err(Error::validation(format!(
            "j = {j} is not an admissible total spin for K = {k_sites}"
        )));
    }
    let p = (k2 - j.0) / 2;
    Ok(binomial(k_sites as u64, p)? - binomial(k_sites as u64, p - 1)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct IrrepTable {
    pub k_sites: usize,
    /// `(j, r_j)` from `j = K/2` down.
    pub rows: Vec<(HalfInt, u128)>,
}

impl IrrepTable {
    pub fn total_dimension(&self) -> u128 {
        self.rows.iter().map(|&(j, r)| (j.0 as u128 + 1) * r).sum()
    }
}

pub fn irrep_table(k_sites: usize) -> Result<IrrepTable> {
    require_even(k_sites)?;
    let rows = (0..=k_sites as i64 / 2)
        .rev()
        .map(|j| {
            let j = HalfInt::from_int(j);
            multiplicity(k_sites, j).map(|r| (j, r))
        })
        .collect::<Result<_>>()?;
    Ok(IrrepTable { k_sites, rows })
}

/// One eigenvector of `H` with its recovered quantum numbers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JmLabel {
    pub energy: f64,
    pub j: HalfInt,
    pub m: HalfInt,
    pub j2_expectation: f64,
    pub jz_expectation: f64,
}

/// Eigenbasis of `H` rotated so that each column is also a `J²`, `J_z`
/// eigenvector.
#[derive(Clone, Debug)]
pub struct LabeledEigenbasis {
    pub vectors: ComplexMatrix,
    pub labels: Vec<JmLabel>,
}

/// Rounding tolerance for `⟨J²⟩` and `⟨J_z⟩` onto the lattice.
pub const LABEL_TOL: f64 = 1e-6;

/// Commutator bound `‖[H, X]‖ ≤ 1e-8 ‖H‖` required before labelling.
pub const COMMUTATION_TOL: f64 = 1e-8;

fn group_ranges(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || values[i] - values[i - 1] > tol {
            out.push(start..i);
            start = i;
        }
    }
    out
}

fn columns(m: &ComplexMatrix, range: std::ops::Range<usize>) -> ComplexMatrix {
    let rows: Vec<usize> = (0..m.rows()).collect();
    let cols: Vec<usize> = range.collect();
    m.select(&rows, &cols)
}

/// Rediagonalises `op` inside the span of `basis` columns; returns the rotated
/// basis and the ascending eigenvalues of the projected operator.
fn rediagonalise(basis: &ComplexMatrix, op: &ComplexMatrix) -> Result<(ComplexMatrix, Vec<f64>)> {
    let projected = &(&basis.adjoint() * op) * basis;
    let e = hermitian_eigendecomposition(&projected.hermitian_part())?;
    Ok((basis * &e.eigenvectors, e.eigenvalues))
}

/// Labels the eigenvectors of `h` with `(j, m)` using `j2 = J²` and `jz = J_z`
/// given on the same basis. `twice_j_max` bounds the admissible lattice
/// (`2j ≤ twice_j_max`, `2j ≡ twice_j_max mod 2`).
pub fn label_eigenbasis(
    h: &ComplexMatrix,
    j2: &ComplexMatrix,
    jz: &ComplexMatrix,
    twice_j_max: i64,
) -> Result<LabeledEigenbasis> {
    let h_norm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    for (name, op) in [("J²", j2), ("J_z", jz)] {
        let c = commutator(h, op)?.frobenius_norm();
        if c > COMMUTATION_TOL * h_norm {
            return Err(Error::validation(format!(
                "H does not commute with {name}: ‖[H, {name}]‖ = {c:.3e} > {:.3e}",
                COMMUTATION_TOL * h_norm
            )));
        }
    }
    let eig = hermitian_eigendecomposition(h)?;
    let scale = eig.eigenvalues.iter().fold(1.0f64, |a, &b| a.max(b.abs()));
    let n = h.rows();
    let mut vectors = ComplexMatrix::zeros(n, n);
    let mut labels = Vec::with_capacity(n);
    for group in group_ranges(&eig.eigenvalues, 1e-9 * scale) {
        let base = columns(&eig.eigenvectors, group.clone());
        let (by_j, j_vals) = rediagonalise(&base, j2)?;
        let mut col = group.start;
        for sub in group_ranges(&j_vals, LABEL_TOL) {
            let (by_m, _) = rediagonalise(&columns(&by_j, sub), jz)?;
            for c in 0..by_m.cols() {
                let v = by_m.column(c);
                let energy = h.sandwich(&v, &v).re;
                let x = j2.sandwich(&v, &v).re;
                let z = jz.sandwich(&v, &v).re;
                let (j, m) = round_to_lattice(x, z, twice_j_max)?;
                for (r, &val) in v.iter().enumerate() {
                    vectors[(r, col)] = val;
                }
                labels.push(JmLabel {
                    energy,
                    j,
                    m,
                    j2_expectation: x,
                    jz_expectation: z,
                });
                col += 1;
            }
        }
    }
    Ok(LabeledEigenbasis { vectors, labels })
}

fn round_to_lattice(j2: f64, jz: f64, twice_j_max: i64) -> Result<(HalfInt, HalfInt)> {
    let jv = ((1.0 + 4.0 * j2.max(0.0)).sqrt() - 1.0) / 2.0;
    let j = HalfInt((2.0 * jv).round() as i64);
    let m = HalfInt((2.0 * jz).round() as i64);
    let ok = (j.casimir() - j2).abs() <= LABEL_TOL
        && (m.value() - jz).abs() <= LABEL_TOL
        && j.0 <= twice_j_max
        && (twice_j_max - j.0) % 2 == 0
        && m.0.abs() <= j.0
        && (j.0 - m.0) % 2 == 0;
    if !ok {
        return Err(Error::Numerical(format!(
            "expectations ⟨J²⟩ = {j2:.9}, ⟨J_z⟩ = {jz:.9} do not round to an admissible (j, m)"
        )));
    }
    Ok((j, m))
}

/// Assigns `(j, m)` to every eigenvector of a `2^K` operator `h` commuting
/// with `J²` and `J_z`.
pub fn simultaneous_jm_labels(k_sites: usize, h: &ComplexMatrix) -> Result<Vec<JmLabel>> {
    let ops = collective_operators(k_sites)?;
    if h.rows() != ops.jz.rows() || !h.is_square() {
        return Err(Error::validation(format!(
            "H must be {0}x{0} for K = {k_sites}",
            ops.jz.rows()
        )));
    }
    Ok(label_eigenbasis(h, &ops.jsquared, &ops.jz, k_sites as i64)?.labels)
}
