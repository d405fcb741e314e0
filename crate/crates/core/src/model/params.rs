use crate::error::{Error, Result};

/// Physical parameters of the island.
///
/// Only the primary quantities are stored; `g̃ = g / 8E_C` and
/// `n_g = m̄ - m0 - g̃` are recomputed on every access.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelParams {
    k_sites: usize,
    g: f64,
    e_c: f64,
    m_bar: f64,
    m0: i64,
}

impl ModelParams {
    /// `E_C = 0` is accepted so the pure pairing limit can be studied, but
    /// then `g̃` and `n_g` are infinite.
    pub fn new(k_sites: usize, g: f64, e_c: f64, m_bar: f64, m0: i64) -> Result<Self> {
        if k_sites < 2 || !k_sites.is_multiple_of(2) {
            return Err(Error::validation(format!("K must be even and at least 2, got {k_sites}")));
        }
        if !(g.is_finite() && g > 0.0) {
            return Err(Error::validation(format!("pairing energy g must be positive, got {g}")));
        }
        if !(e_c.is_finite() && e_c >= 0.0) {
            return Err(Error::validation(format!("charging energy E_C must be non-negative, got {e_c}")));
        }
        if !m_bar.is_finite() || m_bar < m0 as f64 || m_bar > m0 as f64 + 1.0 {
            return Err(Error::validation(format!(
                "m̄ = {m_bar} must lie in [m0, m0 + 1] = [{m0}, {}]",
                m0 + 1
            )));
        }
        Ok(Self {
            k_sites,
            g,
            e_c,
            m_bar,
            m0,
        })
    }

    /// Builds the parameter set whose gate charge is `n_g`, i.e.
    /// `m̄ = n_g + m0 + g / 8E_C`.
    pub fn from_gate_charge(k_sites: usize, g: f64, e_c: f64, n_g: f64, m0: i64) -> Result<Self> {
        if e_c.is_nan() || e_c <= 0.0 {
            return Err(Error::validation("a gate charge needs E_C > 0"));
        }
        Self::new(k_sites, g, e_c, n_g + m0 as f64 + g / (8.0 * e_c), m0)
    }

    pub fn k_sites(&self) -> usize {
        self.k_sites
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn e_c(&self) -> f64 {
        self.e_c
    }

    pub fn m_bar(&self) -> f64 {
        self.m_bar
    }

    pub fn m0(&self) -> i64 {
        self.m0
    }

    /// `g̃ = g / (8 E_C)`.
    pub fn reduced_pairing(&self) -> f64 {
        self.g / (8.0 * self.e_c)
    }

    /// `n_g = m̄ - m0 - g̃`.
    pub fn gate_charge(&self) -> f64 {
        self.m_bar - self.m0 as f64 - self.reduced_pairing()
    }

    /// `E(n_g) = 4 E_C (1 - 2 n_g)`, written without dividing by `E_C`.
    pub fn gate_energy(&self) -> f64 {
        4.0 * self.e_c - 8.0 * self.e_c * (self.m_bar - self.m0 as f64) + self.g
    }

    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.k_sites, g, self.e_c, self.m_bar, self.m0)
    }

    pub fn with_k_sites(&self, k_sites: usize) -> Result<Self> {
        Self::new(k_sites, self.g, self.e_c, self.m_bar, self.m0)
    }
}
