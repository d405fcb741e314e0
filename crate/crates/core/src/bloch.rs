//! Phenomenological Bloch equations for the qubit levels `|±⟩` and the
//! degenerate level, with escape rates that drain probability out of the
//! three-level subspace.
//!
//! ```text
//! dp₊/dt = -(Γ + Γ_W⁺ + Γ_E⁺) p₊
//! dp₀/dt =  Γ_W⁺ p₊ - Γ_W⁻ p₀
//! dp₋/dt =  Γ p₊ + Γ_W⁻ p₀ - Γ_E⁻ p₋
//! dα/dt  =  (iω - b/2) α,      b = Γ + Γ_W⁺ + Γ_E⁺ + Γ_E⁻
//! ```
//!
//! There is no separate dephasing rate: coherence decays only through the
//! population losses of `|+⟩` and `|-⟩`.

use std::io::{self, Write};

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::matrix_exponential_real;

const PROBABILITY_TOL: f64 = 1e-12;
const SUM_TOL: f64 = 1e-9;
/// Above this value of `dt · max rate`, [`evolve`] attaches a warning.
pub const STEP_WARNING_THRESHOLD: f64 = 0.1;
/// `dt · max rate` used by [`recommended_step`].
pub const DEFAULT_STEP_FRACTION: f64 = 0.005;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rates {
    gamma: f64,
    gamma_w_plus: f64,
    gamma_w_minus: f64,
    gamma_e_plus: f64,
    gamma_e_minus: f64,
}

impl Rates {
    pub fn new(gamma: f64, gamma_w_plus: f64, gamma_w_minus: f64, gamma_e_plus: f64, gamma_e_minus: f64) -> Result<Self> {
        let all = [
            ("Γ", gamma),
            ("Γ_W⁺", gamma_w_plus),
            ("Γ_W⁻", gamma_w_minus),
            ("Γ_E⁺", gamma_e_plus),
            ("Γ_E⁻", gamma_e_minus),
        ];
        for (name, r) in all {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::validation(format!("rate {name} must be finite and non-negative, got {r}")));
            }
        }
        Ok(Self {
            gamma,
            gamma_w_plus,
            gamma_w_minus,
            gamma_e_plus,
            gamma_e_minus,
        })
    }

    pub fn zero() -> Self {
        Self::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap()
    }

    /// Demonstration values in units of Γ. They are not derived from any
    /// microscopic model.
    pub fn illustrative() -> Self {
        Self::new(1.0, 0.5, 0.2, 0.05, 0.05).unwrap()
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn gamma_w_plus(&self) -> f64 {
        self.gamma_w_plus
    }

    pub fn gamma_w_minus(&self) -> f64 {
        self.gamma_w_minus
    }

    pub fn gamma_e_plus(&self) -> f64 {
        self.gamma_e_plus
    }

    pub fn gamma_e_minus(&self) -> f64 {
        self.gamma_e_minus
    }

    /// Total loss rate out of `|+⟩`.
    pub fn plus_loss(&self) -> f64 {
        self.gamma + self.gamma_w_plus + self.gamma_e_plus
    }

    /// `b = Γ + Γ_W⁺ + Γ_E⁺ + Γ_E⁻`; the coherence decays as `e^{-bt/2}`.
    pub fn coherence_decay(&self) -> f64 {
        self.plus_loss() + self.gamma_e_minus
    }

    /// Lower-triangular generator acting on `(p₊, p₀, p₋)`.
    pub fn population_generator(&self) -> [[f64; 3]; 3] {
        [
            [-self.plus_loss(), 0.0, 0.0],
            [self.gamma_w_plus, -self.gamma_w_minus, 0.0],
            [self.gamma, self.gamma_w_minus, -self.gamma_e_minus],
        ]
    }

    /// Largest rate governing the step size: every diagonal loss rate and
    /// the modulus of the coherence eigenvalue `iω - b/2`.
    pub fn max_rate(&self, omega: f64) -> f64 {
        let coherence = C64::new(-self.coherence_decay() / 2.0, omega).norm();
        [self.plus_loss(), self.gamma_w_minus, self.gamma_e_minus, coherence]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochState {
    pub t: f64,
    pub p_plus: f64,
    pub p_zero: f64,
    pub p_minus: f64,
    pub alpha: C64,
}

impl BlochState {
    pub fn new(t: f64, p_plus: f64, p_zero: f64, p_minus: f64, alpha: C64) -> Result<Self> {
        let s = Self {
            t,
            p_plus,
            p_zero,
            p_minus,
            alpha,
        };
        s.validate()?;
        Ok(s)
    }

    /// All probability in `|+⟩`, no coherence.
    pub fn excited() -> Self {
        Self {
            t: 0.0,
            p_plus: 1.0,
            p_zero: 0.0,
            p_minus: 0.0,
            alpha: C64::new(0.0, 0.0),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let vals = [self.t, self.p_plus, self.p_zero, self.p_minus, self.alpha.re, self.alpha.im];
        if vals.iter().any(|x| !x.is_finite()) {
            return Err(Error::validation("Bloch state has non-finite entries"));
        }
        for (name, p) in [("p₊", self.p_plus), ("p₀", self.p_zero), ("p₋", self.p_minus)] {
            if p < -PROBABILITY_TOL {
                return Err(Error::validation(format!("{name} = {p} is negative")));
            }
        }
        if self.population() > 1.0 + SUM_TOL {
            return Err(Error::validation(format!("populations sum to {} > 1", self.population())));
        }
        Ok(())
    }

    pub fn population(&self) -> f64 {
        self.p_plus + self.p_zero + self.p_minus
    }

    /// `|α|² ≤ p₊ p₋`, the positivity condition of the qubit density matrix.
    pub fn is_physical(&self) -> bool {
        self.alpha.norm_sqr() <= self.p_plus * self.p_minus + 1e-12
    }

    fn as_array(&self) -> [f64; 5] {
        [self.p_plus, self.p_zero, self.p_minus, self.alpha.re, self.alpha.im]
    }

    fn from_array(t: f64, y: [f64; 5]) -> Self {
        Self {
            t,
            p_plus: y[0],
            p_zero: y[1],
            p_minus: y[2],
            alpha: C64::new(y[3], y[4]),
        }
    }

    /// Largest absolute componentwise difference (time excluded).
    pub fn max_difference(&self, other: &BlochState) -> f64 {
        self.as_array()
            .iter()
            .zip(other.as_array())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Time derivative; the `t` field of the result is 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochDerivative {
    pub p_plus: f64,
    pub p_zero: f64,
    pub p_minus: f64,
    pub alpha: C64,
}

pub fn bloch_rhs(state: &BlochState, rates: &Rates, omega: f64) -> BlochDerivative {
    let d = rhs(&state.as_array(), rates, omega);
    BlochDerivative {
        p_plus: d[0],
        p_zero: d[1],
        p_minus: d[2],
        alpha: C64::new(d[3], d[4]),
    }
}

fn rhs(y: &[f64; 5], r: &Rates, omega: f64) -> [f64; 5] {
    let half_b = r.coherence_decay() / 2.0;
    [
        -r.plus_loss() * y[0],
        r.gamma_w_plus * y[0] - r.gamma_w_minus * y[1],
        r.gamma * y[0] + r.gamma_w_minus * y[1] - r.gamma_e_minus * y[2],
        -half_b * y[3] - omega * y[4],
        omega * y[3] - half_b * y[4],
    ]
}

/// Step with `dt · max_rate = DEFAULT_STEP_FRACTION`, capped at `t_final`.
pub fn recommended_step(rates: &Rates, omega: f64, t_final: f64) -> f64 {
    let m = rates.max_rate(omega);
    if m > 0.0 {
        (DEFAULT_STEP_FRACTION / m).min(t_final.max(f64::MIN_POSITIVE))
    } else {
        t_final.max(f64::MIN_POSITIVE)
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub samples: Vec<BlochState>,
    /// Step actually used: `t_final / ceil(t_final / dt)`.
    pub step: f64,
    pub warnings: Vec<String>,
}

impl Trajectory {
    pub fn last(&self) -> &BlochState {
        self.samples.last().expect("trajectory always holds the initial state")
    }
}

/// Fixed-step classical RK4 from `state0.t` to `state0.t + t_final`.
///
/// Every `record_every`-th step is stored (plus the first and last state).
pub fn evolve(state0: &BlochState, rates: &Rates, omega: f64, t_final: f64, dt: f64) -> Result<Trajectory> {
    evolve_sampled(state0, rates, omega, t_final, dt, 1)
}

pub fn evolve_sampled(
    state0: &BlochState,
    rates: &Rates,
    omega: f64,
    t_final: f64,
    dt: f64,
    record_every: usize,
) -> Result<Trajectory> {
    state0.validate()?;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::validation(format!("time step must be positive, got {dt}")));
    }
    if !(t_final.is_finite() && t_final >= 0.0) {
        return Err(Error::validation(format!("duration must be finite and non-negative, got {t_final}")));
    }
    if !omega.is_finite() {
        return Err(Error::validation("ω must be finite"));
    }
    let steps = (t_final / dt).ceil() as usize;
    let h = if steps == 0 { 0.0 } else { t_final / steps as f64 };
    let mut warnings = Vec::new();
    let stiffness = h * rates.max_rate(omega);
    if stiffness > STEP_WARNING_THRESHOLD {
        warnings.push(format!(
            "dt · max rate = {stiffness:.3} exceeds {STEP_WARNING_THRESHOLD}; accuracy is not guaranteed"
        ));
    }
    let every = record_every.max(1);
    let mut samples = vec![*state0];
    let mut y = state0.as_array();
    let f = |y: &[f64; 5]| rhs(y, rates, omega);
    for n in 1..=steps {
        let k1 = f(&y);
        let k2 = f(&axpy(&y, h / 2.0, &k1));
        let k3 = f(&axpy(&y, h / 2.0, &k2));
        let k4 = f(&axpy(&y, h, &k3));
        for i in 0..5 {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        if y.iter().any(|x| !x.is_finite()) {
            return Err(Error::Integration {
                step: n,
                reason: "non-finite state".into(),
            });
        }
        if n % every == 0 || n == steps {
            samples.push(BlochState::from_array(state0.t + n as f64 * h, y));
        }
    }
    Ok(Trajectory {
        samples,
        step: h,
        warnings,
    })
}

fn axpy(y: &[f64; 5], a: f64, k: &[f64; 5]) -> [f64; 5] {
    std::array::from_fn(|i| y[i] + a * k[i])
}

/// Exact solution at `state0.t + t`.
pub fn closed_form(state0: &BlochState, rates: &Rates, omega: f64, t: f64) -> BlochState {
    let g = rates.population_generator();
    let gt: [[f64; 3]; 3] = std::array::from_fn(|i| std::array::from_fn(|j| g[i][j] * t));
    let e = matrix_exponential_real(gt);
    let p0 = [state0.p_plus, state0.p_zero, state0.p_minus];
    let p: [f64; 3] = std::array::from_fn(|i| (0..3).map(|j| e[i][j] * p0[j]).sum());
    let alpha = state0.alpha * (C64::new(-rates.coherence_decay() / 2.0, omega) * t).exp();
    BlochState {
        t: state0.t + t,
        p_plus: p[0],
        p_zero: p[1],
        p_minus: p[2],
        alpha,
    }
}

/// Probability lost from the three levels, `1 - (p₊ + p₀ + p₋)` clamped to `[0, 1]`.
pub fn leakage_total(state: &BlochState) -> f64 {
    (1.0 - state.population()).clamp(0.0, 1.0)
}

/// Least-squares slope of `-ln|α|` against `t`. Samples with `α = 0` are
/// skipped; returns `None` with fewer than two usable samples.
pub fn fit_coherence_decay(samples: &[BlochState]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = samples
        .iter()
        .filter(|s| s.alpha.norm() > 0.0)
        .map(|s| (s.t, s.alpha.norm().ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mt = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
    (sxx > 0.0).then(|| -sxy / sxx)
}

pub const TRAJECTORY_HEADER: &str = "t,p_plus,p_zero,p_minus,re_alpha,im_alpha,leakage";

pub fn write_trajectory_csv<W: Write>(mut out: W, samples: &[BlochState]) -> io::Result<()> {
    writeln!(out, "{TRAJECTORY_HEADER}")?;
    for s in samples {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            s.t,
            s.p_plus,
            s.p_zero,
            s.p_minus,
            s.alpha.re,
            s.alpha.im,
            leakage_total(s)
        )?;
    }
    Ok(())
}
