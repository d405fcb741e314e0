//! Tunneling amplitudes `β_k`, their collective/individual split and the
//! Josephson energy magnitudes.

use std::fmt::Write as _;

use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct TunnelingAmplitudes {
    beta: Vec<C64>,
}

impl TunnelingAmplitudes {
    pub fn new(beta: Vec<C64>) -> Result<Self> {
        if beta.is_empty() {
            return Err(Error::validation("at least one tunneling amplitude is required"));
        }
        if let Some(k) = beta.iter().position(|b| !(b.re.is_finite() && b.im.is_finite())) {
            return Err(Error::validation(format!("amplitude {k} is not finite")));
        }
        Ok(Self { beta })
    }

    pub fn constant(a: C64, k_sites: usize) -> Result<Self> {
        Self::new(vec![a; k_sites])
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.beta
    }

    /// `β = Σ_k β_k`.
    pub fn total(&self) -> C64 {
        self.beta.iter().sum()
    }

    pub fn sum_of_squares(&self) -> f64 {
        self.beta.iter().map(|b| b.norm_sqr()).sum()
    }

    /// Parses one amplitude per line: `re`, `re im` or `re,im`. Blank lines
    /// and lines starting with `#` are skipped.
    pub fn parse_text(text: &str) -> Result<Self> {
        let mut beta = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let parse = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|x| x.is_finite())
                    .ok_or_else(|| Error::Parse {
                        line: idx + 1,
                        reason: format!("`{s}` is not a finite number"),
                    })
            };
            let z = match fields.as_slice() {
                [re] => C64::new(parse(re)?, 0.0),
                [re, im] => C64::new(parse(re)?, parse(im)?),
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        reason: format!("expected 1 or 2 numbers, found {}", fields.len()),
                    })
                }
            };
            beta.push(z);
        }
        if beta.is_empty() {
            return Err(Error::Parse {
                line: 0,
                reason: "no amplitudes found".into(),
            });
        }
        Ok(Self { beta })
    }

    /// Inverse of [`parse_text`](Self::parse_text), `re im` per line.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for b in &self.beta {
            let _ = writeln!(out, "{:e} {:e}", b.re, b.im);
        }
        out
    }
}

/// `β_k = A e^{iλk}` for `k = 0, ..., K-1`.
pub fn toy_amplitudes(a: C64, lambda: f64, k_sites: usize) -> Result<TunnelingAmplitudes> {
    if k_sites == 0 {
        return Err(Error::validation("toy model needs K ≥ 1"));
    }
    TunnelingAmplitudes::new((0..k_sites).map(|k| a * C64::from_polar(1.0, lambda * k as f64)).collect())
}

/// Closed geometric sum `|A| |1 - e^{iλK}| / |1 - e^{iλ}|` for the toy model.
pub fn toy_collective_magnitude(a: C64, lambda: f64, k_sites: usize) -> f64 {
    let one = C64::new(1.0, 0.0);
    let den = (one - C64::from_polar(1.0, lambda)).norm();
    if den == 0.0 {
        return a.norm() * k_sites as f64;
    }
    a.norm() * (one - C64::from_polar(1.0, lambda * k_sites as f64)).norm() / den
}

/// Independent complex Gaussian amplitudes with `E|β_k|² = scale²`,
/// deterministic in `seed`.
pub fn random_amplitudes(seed: u64, k_sites: usize, scale: f64) -> Result<TunnelingAmplitudes> {
    if k_sites == 0 {
        return Err(Error::validation("need at least one amplitude"));
    }
    if !scale.is_finite() {
        return Err(Error::validation("scale must be finite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sigma = scale / std::f64::consts::SQRT_2;
    let beta = (0..k_sites)
        .map(|_| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            C64::new(sigma * re, sigma * im)
        })
        .collect();
    TunnelingAmplitudes::new(beta)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TunnelingSplit {
    /// Total amplitude `β`.
    pub collective: C64,
    /// `δ_k = β_k - β/K`.
    pub residuals: Vec<C64>,
}

impl TunnelingSplit {
    /// The uniform amplitudes `β/K` that carry the collective part.
    pub fn collective_amplitudes(&self) -> TunnelingAmplitudes {
        let k = self.residuals.len();
        TunnelingAmplitudes {
            beta: vec![self.collective / k as f64; k],
        }
    }

    pub fn residual_amplitudes(&self) -> TunnelingAmplitudes {
        TunnelingAmplitudes {
            beta: self.residuals.clone(),
        }
    }
}

pub fn decompose_tunneling(amps: &TunnelingAmplitudes) -> TunnelingSplit {
    let total = amps.total();
    let mean = total / amps.len() as f64;
    TunnelingSplit {
        collective: total,
        residuals: amps.beta.iter().map(|&b| b - mean).collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct JosephsonEnergies {
    /// `E_J^c = |β|`.
    pub collective: f64,
    /// `E_J^i = (Σ|β_k|² - |β|²/K)^{1/2}`.
    pub individual: f64,
}

impl JosephsonEnergies {
    /// `E_J^i / E_J^c`; infinite when the collective part vanishes.
    pub fn ratio(&self) -> f64 {
        self.individual / self.collective
    }
}

pub fn josephson_energies(amps: &TunnelingAmplitudes) -> Result<JosephsonEnergies> {
    let beta = amps.total();
    let sum_sq = amps.sum_of_squares();
    let inner = sum_sq - beta.norm_sqr() / amps.len() as f64;
    if inner < -1e-9 * sum_sq {
        return Err(Error::Numerical(format!(
            "Σ|β_k|² - |β|²/K = {inner:.3e} is negative beyond rounding (Σ|β_k|² = {sum_sq:.3e})"
        )));
    }
    Ok(JosephsonEnergies {
        collective: beta.norm(),
        individual: inner.max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_amplitudes_are_fully_collective() {
        let a = C64::new(0.3, -0.4);
        let amps = TunnelingAmplitudes::constant(a, 10).unwrap();
        let e = josephson_energies(&amps).unwrap();
        assert!((e.collective - 10.0 * 0.5).abs() < 1e-12);
        assert!(e.individual < 1e-7);
        let split = decompose_tunneling(&amps);
        assert!(split.residuals.iter().all(|d| d.norm() < 1e-15));
    }

    #[test]
    fn zero_total_leaves_residuals_untouched() {
        let amps = TunnelingAmplitudes::new(vec![C64::new(1.0, 2.0), C64::new(-1.0, -2.0)]).unwrap();
        let split = decompose_tunneling(&amps);
        assert_eq!(split.collective, C64::new(0.0, 0.0));
        assert_eq!(split.residuals, amps.as_slice());
    }

    #[test]
    fn toy_full_period_is_purely_individual() {
        for k in [4usize, 16, 1000] {
            let a = C64::new(0.7, 0.2);
            let amps = toy_amplitudes(a, 2.0 * PI / k as f64, k).unwrap();
            let e = josephson_energies(&amps).unwrap();
            assert!(e.collective <= 1e-9 * k as f64 * a.norm());
            assert!((e.individual - a.norm() * (k as f64).sqrt()).abs() < 1e-9 * k as f64);
        }
    }

    #[test]
    fn toy_geometric_sum_and_bound() {
        let a = C64::new(1.5, 0.0);
        for (lambda, k) in [(1.0, 1000usize), (0.37, 77), (2.9, 12345)] {
            let amps = toy_amplitudes(a, lambda, k).unwrap();
            let direct = amps.total().norm();
            let closed = toy_collective_magnitude(a, lambda, k);
            assert!((direct - closed).abs() < 1e-9 * k as f64);
            let bound = 2.0 * a.norm() / (C64::new(1.0, 0.0) - C64::from_polar(1.0, lambda)).norm();
            assert!(direct <= bound + 1e-9);
        }
        let flat = toy_amplitudes(a, 0.0, 5).unwrap();
        assert!(flat.as_slice().iter().all(|&b| b == a));
    }

    #[test]
    fn random_amplitudes_are_seeded() {
        let a = random_amplitudes(42, 100, 1.0).unwrap();
        let b = random_amplitudes(42, 100, 1.0).unwrap();
        let c = random_amplitudes(43, 100, 1.0).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn random_second_moment() {
        // Var|β|² = scale⁴ for a complex Gaussian, so the sample mean over
        // 1e5 draws has relative std 1/sqrt(1e5) ≈ 0.3%.
        let scale = 2.0;
        let amps = random_amplitudes(7, 100_000, scale).unwrap();
        let mean = amps.sum_of_squares() / amps.len() as f64;
        assert!((mean / (scale * scale) - 1.0).abs() < 0.05, "{mean}");
    }

    #[test]
    fn text_parsing() {
        let amps = TunnelingAmplitudes::parse_text("# header\n1.0 2.0\n\n-3,0.5\n4\n").unwrap();
        assert_eq!(
            amps.as_slice(),
            &[C64::new(1.0, 2.0), C64::new(-3.0, 0.5), C64::new(4.0, 0.0)]
        );
        assert!(matches!(
            TunnelingAmplitudes::parse_text("1 2 3"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            TunnelingAmplitudes::parse_text("ok\n"),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(TunnelingAmplitudes::parse_text("nan 0").is_err());
        assert!(TunnelingAmplitudes::parse_text("# only comments\n").is_err());
        let again = TunnelingAmplitudes::parse_text(&amps.to_text()).unwrap();
        assert_eq!(again, amps);
    }
}
