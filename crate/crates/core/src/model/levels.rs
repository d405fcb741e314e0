use super::params::ModelParams;

/// Energies of the four Coulomb-blockade states after removing the common
/// constant `2E_C + 4E_C[(m0 - m̄)² + (m0 - m̄)] - gK/4`.
///
/// | state | quantum numbers | energy |
/// |---|---|---|
/// | `|0⟩` | `(K/2, m0)` | `E0 = -2E_C (1 - 2n_g)` |
/// | `|1⟩` | `(K/2, m0+1)` | `E1 = 2E_C (1 - 2n_g - 4g̃)` |
/// | `|s;0⟩` | `(K/2-1, m0)` | `W0 = -E1` |
/// | `|r;1⟩` | `(K/2-1, m0+1)` | `W1 = -E0` |
///
/// The `(g/K)(m² - m)` pieces of the exact spectrum are dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveLevels {
    pub e0: f64,
    pub e1: f64,
    pub w0: f64,
    pub w1: f64,
    pub extracted_constant: f64,
    /// Set when `|m0| > K/10`, outside the regime where the dropped terms are small.
    pub warning: Option<String>,
}

pub fn effective_levels(params: &ModelParams) -> EffectiveLevels {
    let e_c = params.e_c();
    let g = params.g();
    let m0 = params.m0();
    let k = params.k_sites() as f64;
    // d = m̄ - m0 = n_g + g̃; expanded so that E_C = 0 stays finite.
    let d = params.m_bar() - m0 as f64;
    let e0 = -2.0 * e_c + 4.0 * e_c * d - g / 2.0;
    let e1 = 2.0 * e_c - 4.0 * e_c * d - g / 2.0;
    let extracted_constant = 2.0 * e_c + 4.0 * e_c * (d * d - d) - g * k / 4.0;
    let warning = ((m0.unsigned_abs() as f64) > k / 10.0).then(|| {
        format!("|m0| = {} exceeds K/10 = {}; dropped (g/K)(m² - m) terms are not small", m0.abs(), k / 10.0)
    });
    EffectiveLevels {
        e0,
        e1,
        w0: -e1,
        w1: -e0,
        extracted_constant,
        warning,
    }
}
