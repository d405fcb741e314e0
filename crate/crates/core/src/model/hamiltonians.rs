//! Hamiltonians of the island on the `2^K` register (or on fixed-`J_z`
//! sectors of it) and the collective Hamiltonian on the `j = K/2` irrep.
//!
//! Basis convention: index bit `K - k` holds site `k`, bit value 0 is spin
//! up. A basis state with `d` set bits has `J_z = K/2 - d`.

use num_complex::Complex64 as C64;

use super::amplitudes::TunnelingAmplitudes;
use super::params::ModelParams;
use crate::error::{Error, Result};
use crate::linalg::{check_site_cap, ComplexMatrix};
use crate::spin::{raising_element, HalfInt};

/// Ordered subset of computational basis states with a reverse lookup.
#[derive(Clone, Debug)]
pub struct RegisterBasis {
    k_sites: usize,
    states: Vec<usize>,
    lookup: Vec<u32>,
}

const ABSENT: u32 = u32::MAX;

impl RegisterBasis {
    pub fn full(k_sites: usize) -> Result<Self> {
        check_site_cap(k_sites)?;
        Ok(Self::from_states(k_sites, (0..1usize << k_sites).collect()))
    }

    /// All states with `J_z = m`, in increasing index order.
    pub fn sector(k_sites: usize, m: HalfInt) -> Result<Self> {
        check_site_cap(k_sites)?;
        let twice_down = k_sites as i64 - m.doubled();
        if twice_down < 0 || twice_down > 2 * k_sites as i64 || twice_down % 2 != 0 {
            return Err(Error::validation(format!("m = {m} is not a J_z value for K = {k_sites}")));
        }
        let down = (twice_down / 2) as u32;
        let states = (0..1usize << k_sites).filter(|n| n.count_ones() == down).collect();
        Ok(Self::from_states(k_sites, states))
    }

    fn from_states(k_sites: usize, states: Vec<usize>) -> Self {
        let mut lookup = vec![ABSENT; 1usize << k_sites];
        for (i, &s) in states.iter().enumerate() {
            lookup[s] = i as u32;
        }
        Self { k_sites, states, lookup }
    }

    pub fn k_sites(&self) -> usize {
        self.k_sites
    }

    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    pub fn position(&self, state: usize) -> Option<usize> {
        match self.lookup.get(state) {
            Some(&i) if i != ABSENT => Some(i as usize),
            _ => None,
        }
    }

    /// `J_z` eigenvalue of a computational state.
    pub fn m_of_state(&self, state: usize) -> HalfInt {
        HalfInt::from_doubled(self.k_sites as i64 - 2 * state.count_ones() as i64)
    }

    fn site_mask(&self, site: usize) -> usize {
        1usize << (self.k_sites - site)
    }
}

/// Applies `op` column by column: `op(state)` yields `(target_state, amplitude)`.
fn assemble(
    rows: &RegisterBasis,
    cols: &RegisterBasis,
    mut op: impl FnMut(usize, &mut dyn FnMut(usize, C64)),
) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows.dim(), cols.dim());
    for (c, &state) in cols.states.iter().enumerate() {
        op(state, &mut |target, amp| {
            if let Some(r) = rows.position(target) {
                m[(r, c)] += amp;
            }
        });
    }
    m
}

/// `Σ_{k,l} s^+_k s^-_l` (equivalently `J_+ J_-`) on a basis closed under it.
fn pair_hopping(basis: &RegisterBasis, coeff: f64) -> ComplexMatrix {
    let k = basis.k_sites;
    assemble(basis, basis, |n, emit| {
        for l in 1..=k {
            let ml = basis.site_mask(l);
            if n & ml != 0 {
                continue; // s^-_l needs site l up
            }
            let lowered = n | ml;
            for site in 1..=k {
                let mk = basis.site_mask(site);
                if lowered & mk != 0 {
                    emit(lowered & !mk, C64::new(coeff, 0.0));
                }
            }
        }
    })
}

/// Reduced BCS Hamiltonian `-(g/K) Σ_{k,l} s^+_k s^-_l` restricted to `basis`.
pub fn h_red_on(basis: &RegisterBasis, g: f64) -> ComplexMatrix {
    pair_hopping(basis, -g / basis.k_sites as f64)
}

/// `J²` on `basis`, assembled as `Σ_{k,l} s_k · s_l`.
pub fn j_squared_on(basis: &RegisterBasis) -> ComplexMatrix {
    let k = basis.k_sites;
    assemble(basis, basis, |n, emit| {
        let z = |site: usize| if n & basis.site_mask(site) == 0 { 0.5 } else { -0.5 };
        let mut diag = 0.0;
        for a in 1..=k {
            for b in 1..=k {
                if a == b {
                    diag += 0.75;
                } else {
                    diag += z(a) * z(b);
                    // (s^+_a s^-_b + s^-_a s^+_b)/2 swaps opposite spins
                    if z(a) != z(b) {
                        emit(n ^ basis.site_mask(a) ^ basis.site_mask(b), C64::new(0.5, 0.0));
                    }
                }
            }
        }
        emit(n, C64::new(diag, 0.0));
    })
}

pub fn jz_on(basis: &RegisterBasis) -> ComplexMatrix {
    let diag: Vec<f64> = basis.states.iter().map(|&n| basis.m_of_state(n).value()).collect();
    ComplexMatrix::from_real_diagonal(&diag)
}

/// Island Hamiltonian `H_red + 4E_C (J_z - m̄)²` restricted to `basis`.
pub fn h_island_on(basis: &RegisterBasis, params: &ModelParams) -> ComplexMatrix {
    let mut h = h_red_on(basis, params.g());
    for (i, &n) in basis.states.iter().enumerate() {
        let m = basis.m_of_state(n).value();
        h[(i, i)] += C64::new(4.0 * params.e_c() * (m - params.m_bar()).powi(2), 0.0);
    }
    h
}

/// `(1/2) Σ_k (β_k s^+_k + conj(β_k) s^-_k)` from `cols` into `rows`.
pub fn t_red_between(rows: &RegisterBasis, cols: &RegisterBasis, amps: &TunnelingAmplitudes) -> ComplexMatrix {
    let beta = amps.as_slice();
    assemble(rows, cols, |n, emit| {
        for (idx, &b) in beta.iter().enumerate() {
            let mask = cols.site_mask(idx + 1);
            if n & mask != 0 {
                emit(n & !mask, b * 0.5);
            } else {
                emit(n | mask, b.conj() * 0.5);
            }
        }
    })
}

/// `-(g/K)(j(j+1) - m² + m)`: eigenvalue of the reduced BCS Hamiltonian on
/// `|j, m; r⟩`.
pub fn bcs_eigenvalue(j: HalfInt, m: HalfInt, g: f64, k_sites: usize) -> Result<f64> {
    if m.doubled().abs() > j.doubled() || (j.doubled() - m.doubled()) % 2 != 0 {
        return Err(Error::validation(format!("|m| = |{m}| must not exceed j = {j}")));
    }
    if j.doubled() > k_sites as i64 {
        return Err(Error::validation(format!("j = {j} exceeds K/2 for K = {k_sites}")));
    }
    let mv = m.value();
    Ok(-(g / k_sites as f64) * (j.casimir() - mv * mv + mv))
}

/// Closed-form island eigenvalue `bcs_eigenvalue(j, m) + 4E_C (m - m̄)²`.
pub fn island_eigenvalue(j: HalfInt, m: HalfInt, params: &ModelParams) -> Result<f64> {
    let base = bcs_eigenvalue(j, m, params.g(), params.k_sites())?;
    Ok(base + 4.0 * params.e_c() * (m.value() - params.m_bar()).powi(2))
}

pub fn build_h_red(k_sites: usize, g: f64) -> Result<ComplexMatrix> {
    Ok(h_red_on(&RegisterBasis::full(k_sites)?, g))
}

pub fn build_h_island(params: &ModelParams) -> Result<ComplexMatrix> {
    Ok(h_island_on(&RegisterBasis::full(params.k_sites())?, params))
}

pub fn build_t_red(k_sites: usize, amps: &TunnelingAmplitudes) -> Result<ComplexMatrix> {
    if amps.len() != k_sites {
        return Err(Error::validation(format!(
            "{} amplitudes supplied for K = {k_sites}",
            amps.len()
        )));
    }
    let basis = RegisterBasis::full(k_sites)?;
    Ok(t_red_between(&basis, &basis, amps))
}

/// Collective Hamiltonian on the `j = K/2` irrep, basis `m = K/2, ..., -K/2`:
///
/// `-(g/K)(J² - J_z² + J_z) + 4E_C (J_z - m̄)² + (β J_+ + conj(β) J_-) / 2K`.
///
/// The tunneling term is the collective part of the reduced tunneling
/// operator; in Cartesian form it is `(Re β J_x - Im β J_y) / K`.
pub fn build_h_collective(k_sites: usize, g: f64, e_c: f64, m_bar: f64, beta: C64) -> Result<ComplexMatrix> {
    if k_sites < 2 || !k_sites.is_multiple_of(2) {
        return Err(Error::validation(format!("K must be even and at least 2, got {k_sites}")));
    }
    let j = HalfInt::from_int(k_sites as i64 / 2);
    let dim = k_sites + 1;
    let kf = k_sites as f64;
    let m_at = |i: usize| HalfInt::from_doubled(j.doubled() - 2 * i as i64);
    let mut h = ComplexMatrix::zeros(dim, dim);
    for i in 0..dim {
        let m = m_at(i).value();
        let diag = -(g / kf) * (j.casimir() - m * m + m) + 4.0 * e_c * (m - m_bar).powi(2);
        h[(i, i)] = C64::new(diag, 0.0);
        if i + 1 < dim {
            // <m+1| J+ |m> sits at (i, i+1)
            let up = raising_element(j, m_at(i + 1));
            let amp = beta * (up / (2.0 * kf));
            h[(i, i + 1)] = amp;
            h[(i + 1, i)] = amp.conj();
        }
    }
    Ok(h)
}
