//! The effective subspace spanned by `|0⟩` and the `K-1` excited-pair states
//! `|r;1⟩`, its arrowhead Hamiltonian, and the `|±⟩` qubit frame.
//!
//! Vectors live in a `K`-dimensional space: index 0 is `|0⟩`, index `r`
//! (`1 ≤ r ≤ K-1`) is `|r;1⟩`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{commutator, outer, ComplexMatrix};
use crate::model::{effective_levels, EffectiveLevels, ModelParams};

/// How the tunneling matrix elements `ξ_r` enter the arrowhead Hamiltonian.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CouplingConvention {
    /// Off-diagonal `ξ_r / 2`; the spectrum is `±ω/2` with
    /// `ω = sqrt(E² + E_J²)` plus the degenerate level.
    #[default]
    Half,
    /// Off-diagonal `ξ_r`; the qubit splitting becomes `sqrt(E² + 4E_J²)`.
    Full,
}

#[derive(Clone, Debug, PartialEq)]
pub struct EffectiveSubspace {
    xi: Vec<C64>,
    e0: f64,
    w1: f64,
}

impl EffectiveSubspace {
    /// Uses `E0` for `|0⟩` and `W1` for every `|r;1⟩`.
    pub fn new(levels: &EffectiveLevels, xi: Vec<C64>) -> Result<Self> {
        Self::with_energies(levels.e0, levels.w1, xi)
    }

    pub fn from_params(params: &ModelParams, xi: Vec<C64>) -> Result<Self> {
        if xi.len() + 1 != params.k_sites() {
            return Err(Error::validation(format!(
                "{} tunneling elements for K = {}; expected K - 1",
                xi.len(),
                params.k_sites()
            )));
        }
        Self::new(&effective_levels(params), xi)
    }

    /// Subspace with `E0 = -E/2`, `W1 = E/2` for gate energy `E`.
    pub fn from_gate_energy(gate_energy: f64, xi: Vec<C64>) -> Result<Self> {
        Self::with_energies(-gate_energy / 2.0, gate_energy / 2.0, xi)
    }

    fn with_energies(e0: f64, w1: f64, xi: Vec<C64>) -> Result<Self> {
        if xi.is_empty() {
            return Err(Error::validation("at least one tunneling element ξ_r is required"));
        }
        if xi.iter().any(|z| !(z.re.is_finite() && z.im.is_finite())) || !e0.is_finite() || !w1.is_finite() {
            return Err(Error::validation("non-finite effective-subspace input"));
        }
        Ok(Self { xi, e0, w1 })
    }

    /// Dimension `K` of the subspace.
    pub fn dimension(&self) -> usize {
        self.xi.len() + 1
    }

    pub fn xi(&self) -> &[C64] {
        &self.xi
    }

    /// `E(n_g) = W1 - E0`.
    pub fn gate_energy(&self) -> f64 {
        self.w1 - self.e0
    }

    pub fn josephson_energy(&self) -> f64 {
        self.xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Same subspace with every `ξ_r` multiplied by `phase`.
    pub fn rephased(&self, phase: C64) -> Self {
        Self {
            xi: self.xi.iter().map(|&z| z * phase).collect(),
            ..self.clone()
        }
    }
}

/// Gate charge for which the second block (`|1⟩`, `|s;0⟩`) has the same arrowhead
/// form: `n'_g = 1 - n_g - 2g̃`, so that `E1 = -E(n'_g)/2` and `W0 = E(n'_g)/2`.
pub fn complementary_gate_charge(params: &ModelParams) -> f64 {
    1.0 - params.gate_charge() - 2.0 * params.reduced_pairing()
}

/// The `{|1⟩, |s;0⟩}` block expressed as an [`EffectiveSubspace`].
pub fn complementary_subspace(params: &ModelParams, xi: Vec<C64>) -> Result<EffectiveSubspace> {
    let l = effective_levels(params);
    EffectiveSubspace::with_energies(l.e1, l.w0, xi)
}

/// Normalised `|ξ⟩ = E_J⁻¹ Σ ξ_r |r;1⟩` in the `K`-dimensional space, and `E_J`.
pub fn xi_vector(xi: &[C64]) -> Result<(Vec<C64>, f64)> {
    let e_j = xi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if e_j.is_nan() || e_j <= 0.0 {
        return Err(Error::DegenerateFrame("all tunneling elements ξ_r vanish".into()));
    }
    let mut v = Vec::with_capacity(xi.len() + 1);
    v.push(C64::new(0.0, 0.0));
    v.extend(xi.iter().map(|&z| z / e_j));
    Ok((v, e_j))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MixingAngle {
    pub gate_energy: f64,
    pub theta: f64,
    pub omega: f64,
}

/// `ω = sqrt(E² + E_J²)` and `θ = atan2(E_J, E) ∈ [0, π]` for `E = 4E_C(1 - 2n_g)`.
pub fn mixing_angle(e_c: f64, n_g: f64, e_j: f64) -> Result<MixingAngle> {
    mixing_angle_from_gate(4.0 * e_c * (1.0 - 2.0 * n_g), e_j)
}

pub fn mixing_angle_from_gate(gate_energy: f64, e_j: f64) -> Result<MixingAngle> {
    if e_j.is_nan() || e_j < 0.0 || !gate_energy.is_finite() || !e_j.is_finite() {
        return Err(Error::validation(format!("need finite E and E_J ≥ 0, got E = {gate_energy}, E_J = {e_j}")));
    }
    if gate_energy == 0.0 && e_j == 0.0 {
        return Err(Error::DegenerateFrame("E(n_g) = 0 and E_J = 0: θ undefined".into()));
    }
    Ok(MixingAngle {
        gate_energy,
        theta: e_j.atan2(gate_energy),
        omega: gate_energy.hypot(e_j),
    })
}

/// Arrowhead Hamiltonian of the effective subspace: diagonal
/// `(E0, W1, ..., W1)` and first row/column `c·ξ_r` with `c = 1/2` or `1`.
pub fn build_h0_eff(subspace: &EffectiveSubspace, convention: CouplingConvention) -> Result<ComplexMatrix> {
    let k = subspace.dimension();
    if k < 3 {
        return Err(Error::validation(format!(
            "K = {k} leaves no degenerate level; the effective subspace needs K ≥ 3"
        )));
    }
    let c = match convention {
        CouplingConvention::Half => 0.5,
        CouplingConvention::Full => 1.0,
    };
    let mut h = ComplexMatrix::zeros(k, k);
    h[(0, 0)] = C64::new(subspace.e0, 0.0);
    for (r, &x) in subspace.xi.iter().enumerate() {
        let r = r + 1;
        h[(r, r)] = C64::new(subspace.w1, 0.0);
        h[(r, 0)] = x * c;
        h[(0, r)] = (x * c).conj();
    }
    Ok(h)
}

/// `|0⟩`, `|ξ⟩`, `|±⟩` and `P0` for a given effective subspace.
///
/// With `⟨r;1|H|0⟩ ∝ ξ_r` the overlap `⟨ξ|H|0⟩ ∝ E_J` is already real and
/// non-negative, so no extra phase rotation is applied.
#[derive(Clone, Debug)]
pub struct QubitFrame {
    angle: MixingAngle,
    e_j: f64,
    ground: Vec<C64>,
    xi: Vec<C64>,
    plus: Vec<C64>,
    minus: Vec<C64>,
    p0: ComplexMatrix,
}

impl QubitFrame {
    pub fn new(subspace: &EffectiveSubspace) -> Result<Self> {
        let k = subspace.dimension();
        if k < 3 {
            return Err(Error::validation(format!("qubit frame needs K ≥ 3, got {k}")));
        }
        let (xi, e_j) = xi_vector(subspace.xi())?;
        let angle = mixing_angle_from_gate(subspace.gate_energy(), e_j)?;
        let mut ground = vec![C64::new(0.0, 0.0); k];
        ground[0] = C64::new(1.0, 0.0);
        let (s, c) = (angle.theta / 2.0).sin_cos();
        let plus: Vec<C64> = xi.iter().zip(&ground).map(|(x, g)| x * c + g * s).collect();
        let minus: Vec<C64> = ground.iter().zip(&xi).map(|(g, x)| g * c - x * s).collect();
        let mut p0 = ComplexMatrix::identity(k);
        p0.add_scaled(C64::new(-1.0, 0.0), &outer(&ground, &ground));
        p0.add_scaled(C64::new(-1.0, 0.0), &outer(&xi, &xi));
        Ok(Self {
            angle,
            e_j,
            ground,
            xi,
            plus,
            minus,
            p0,
        })
    }

    pub fn dimension(&self) -> usize {
        self.ground.len()
    }

    pub fn gate_energy(&self) -> f64 {
        self.angle.gate_energy
    }

    pub fn josephson_energy(&self) -> f64 {
        self.e_j
    }

    pub fn theta(&self) -> f64 {
        self.angle.theta
    }

    pub fn omega(&self) -> f64 {
        self.angle.omega
    }

    pub fn ground(&self) -> &[C64] {
        &self.ground
    }

    pub fn xi(&self) -> &[C64] {
        &self.xi
    }

    pub fn plus(&self) -> &[C64] {
        &self.plus
    }

    pub fn minus(&self) -> &[C64] {
        &self.minus
    }

    /// Projector onto the `(K-2)`-fold degenerate level.
    pub fn p0(&self) -> &ComplexMatrix {
        &self.p0
    }

    /// `(ω/2) σ^z + (E/2) P0`.
    pub fn hamiltonian(&self) -> ComplexMatrix {
        let obs = qubit_observables(self);
        let mut h = obs.sz.scale_real(self.omega() / 2.0);
        h.add_scaled(C64::new(self.gate_energy() / 2.0, 0.0), &self.p0);
        h
    }

    /// `(-ω/2, E/2, +ω/2)`: lower qubit level, degenerate level, upper qubit level.
    pub fn levels(&self) -> (f64, f64, f64) {
        (-self.omega() / 2.0, self.gate_energy() / 2.0, self.omega() / 2.0)
    }
}

#[derive(Clone, Debug)]
pub struct QubitObservables {
    pub sigma_plus: ComplexMatrix,
    pub sx: ComplexMatrix,
    pub sy: ComplexMatrix,
    pub sz: ComplexMatrix,
    pub s0: ComplexMatrix,
}

/// `σ^+ = |+⟩⟨-|`, `σ^z = |+⟩⟨+| - |-⟩⟨-|`, `σ^0 = |+⟩⟨+| + |-⟩⟨-|`.
pub fn qubit_observables(frame: &QubitFrame) -> QubitObservables {
    let (p, m) = (frame.plus(), frame.minus());
    let sigma_plus = outer(p, m);
    let sigma_minus = sigma_plus.adjoint();
    let pp = outer(p, p);
    let mm = outer(m, m);
    let sx = &sigma_plus + &sigma_minus;
    let sy = (&sigma_plus - &sigma_minus).scale(C64::new(0.0, -1.0));
    QubitObservables {
        sigma_plus,
        sx,
        sy,
        sz: &pp - &mm,
        s0: &pp + &mm,
    }
}

#[derive(Clone, Debug)]
pub struct ChargeCurrent {
    /// `Q⁰ = e[sinθ σ^x - cosθ σ^z - σ^0 - 2P0]`.
    pub charge: ComplexMatrix,
    /// `2eω sinθ σ^y` as written for the current operator.
    pub current_quoted: ComplexMatrix,
    /// `i[H⁰, Q⁰]` evaluated with the frame Hamiltonian, which works out to
    /// `-eω sinθ σ^y`.
    pub current_commutator: ComplexMatrix,
}

pub fn charge_current_operators(frame: &QubitFrame, e: f64) -> Result<ChargeCurrent> {
    let obs = qubit_observables(frame);
    let (s, c) = frame.theta().sin_cos();
    let mut charge = obs.sx.scale_real(s);
    charge.add_scaled(C64::new(-c, 0.0), &obs.sz);
    charge.add_scaled(C64::new(-1.0, 0.0), &obs.s0);
    charge.add_scaled(C64::new(-2.0, 0.0), frame.p0());
    let charge = charge.scale_real(e);
    let current_quoted = obs.sy.scale_real(2.0 * e * frame.omega() * s);
    let current_commutator = commutator(&frame.hamiltonian(), &charge)?.scale(C64::new(0.0, 1.0));
    Ok(ChargeCurrent {
        charge,
        current_quoted,
        current_commutator,
    })
}

/// Coefficients of `M` along `σ^x, σ^y, σ^z, σ^0, P0` (Hilbert–Schmidt
/// projections) and the norm of whatever is left over.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameComponents {
    pub x: C64,
    pub y: C64,
    pub z: C64,
    pub identity: C64,
    pub p0: C64,
    pub remainder: f64,
}

pub fn frame_components(frame: &QubitFrame, m: &ComplexMatrix) -> FrameComponents {
    let obs = qubit_observables(frame);
    let hs = |a: &ComplexMatrix| {
        let num: C64 = a.as_slice().iter().zip(m.as_slice()).map(|(x, y)| x.conj() * y).sum();
        num / a.frobenius_norm().powi(2)
    };
    let x = hs(&obs.sx);
    let y = hs(&obs.sy);
    let z = hs(&obs.sz);
    let identity = hs(&obs.s0);
    let rank = frame.dimension() - 2;
    let p0 = if rank > 0 { hs(frame.p0()) } else { C64::new(0.0, 0.0) };
    let mut rest = m.clone();
    rest.add_scaled(-x, &obs.sx);
    rest.add_scaled(-y, &obs.sy);
    rest.add_scaled(-z, &obs.sz);
    rest.add_scaled(-identity, &obs.s0);
    rest.add_scaled(-p0, frame.p0());
    FrameComponents {
        x,
        y,
        z,
        identity,
        p0,
        remainder: rest.frobenius_norm(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eigendecomposition, hermitian_eigenvalues, inner, vector_norm};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn xi_vector_cases() {
        let (v, e) = xi_vector(&[c(0.0, 2.0)]).unwrap();
        assert_eq!(e, 2.0);
        assert_eq!(v, vec![c(0.0, 0.0), c(0.0, 1.0)]);
        let (_, e) = xi_vector(&[c(3.0, 0.0), c(4.0, 0.0)]).unwrap();
        assert_eq!(e, 5.0);
        assert!(matches!(xi_vector(&[c(0.0, 0.0); 3]), Err(Error::DegenerateFrame(_))));
    }

    #[test]
    fn mixing_angle_cases() {
        let a = mixing_angle(1.0, 0.5, 0.7).unwrap();
        assert_eq!(a.gate_energy, 0.0);
        assert!((a.theta - PI / 2.0).abs() < 1e-15);
        assert_eq!(a.omega, 0.7);
        let b = mixing_angle_from_gate(2.0, 0.0).unwrap();
        assert_eq!((b.theta, b.omega), (0.0, 2.0));
        let n = mixing_angle_from_gate(-2.0, 0.0).unwrap();
        assert!((n.theta - PI).abs() < 1e-15);
        let d = mixing_angle_from_gate(3.0, 4.0).unwrap();
        assert_eq!(d.omega, 5.0);
        assert!((d.theta.cos() - 0.6).abs() < 1e-15);
        // 2x2 cross-check: [[-E/2, E_J/2], [E_J/2, E/2]] has eigenvalues ±ω/2.
        let m = ComplexMatrix::from_real_rows(&[&[-1.5, 2.0], &[2.0, 1.5]]).unwrap();
        let ev = hermitian_eigenvalues(&m).unwrap();
        assert!((ev[1] - d.omega / 2.0).abs() < 1e-14);
        assert!(matches!(mixing_angle_from_gate(0.0, 0.0), Err(Error::DegenerateFrame(_))));
        assert!(mixing_angle_from_gate(1.0, -1.0).is_err());
    }

    #[test]
    fn three_level_arrowhead_at_symmetric_point() {
        let sub = EffectiveSubspace::from_gate_energy(0.0, vec![c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        let ev = hermitian_eigenvalues(&build_h0_eff(&sub, CouplingConvention::Half).unwrap()).unwrap();
        let ej = 2f64.sqrt();
        for (got, want) in ev.iter().zip([-ej / 2.0, 0.0, ej / 2.0]) {
            assert!((got - want).abs() < 1e-14);
        }
        let full = hermitian_eigenvalues(&build_h0_eff(&sub, CouplingConvention::Full).unwrap()).unwrap();
        assert!((full[2] - ej).abs() < 1e-14);
    }

    #[test]
    fn arrowhead_needs_three_states() {
        let sub = EffectiveSubspace::from_gate_energy(1.0, vec![c(1.0, 0.0)]).unwrap();
        assert!(build_h0_eff(&sub, CouplingConvention::Half).is_err());
        assert!(QubitFrame::new(&sub).is_err());
    }

    fn sample_subspace(k: usize, gate: f64) -> EffectiveSubspace {
        let xi = (1..k).map(|r| c((0.3 * r as f64).cos(), 0.2 * (r as f64).sin())).collect();
        EffectiveSubspace::from_gate_energy(gate, xi).unwrap()
    }

    #[test]
    fn plus_state_is_upper_eigenvector() {
        let sub = sample_subspace(7, 1.3);
        let frame = QubitFrame::new(&sub).unwrap();
        let h = build_h0_eff(&sub, CouplingConvention::Half).unwrap();
        let e = hermitian_eigendecomposition(&h).unwrap();
        let top = e.vector(6);
        assert!((inner(&top, frame.plus()).norm() - 1.0).abs() < 1e-12);
        let bottom = e.vector(0);
        assert!((inner(&bottom, frame.minus()).norm() - 1.0).abs() < 1e-12);
        let degenerate = e.eigenvalues.iter().filter(|&&x| (x - 0.65).abs() < 1e-10).count();
        assert_eq!(degenerate, 5);
        assert!((&frame.hamiltonian() - &h).max_abs() < 1e-12);
    }

    #[test]
    fn frame_invariants() {
        let frame = QubitFrame::new(&sample_subspace(6, -0.8)).unwrap();
        assert!((frame.theta().cos() - frame.gate_energy() / frame.omega()).abs() < 1e-12);
        assert!(frame.theta().sin() >= 0.0);
        assert!(inner(frame.plus(), frame.minus()).norm() < 1e-12);
        assert!((vector_norm(frame.plus()) - 1.0).abs() < 1e-12);
        let p0 = frame.p0();
        assert!((&(p0 * p0) - p0).max_abs() < 1e-12);
        assert!(vector_norm(&p0.apply(frame.plus())) < 1e-12);
        assert!((p0.trace().re - 4.0).abs() < 1e-12);
        let (lo, mid, hi) = frame.levels();
        assert!(lo <= mid && mid <= hi);
    }

    #[test]
    fn observables_algebra() {
        let frame = QubitFrame::new(&sample_subspace(5, 0.4)).unwrap();
        let o = qubit_observables(&frame);
        assert!((&(&o.sz * &o.sz) - &o.s0).max_abs() < 1e-12);
        assert!((&(&o.s0 + frame.p0()) - &ComplexMatrix::identity(5)).max_abs() < 1e-12);
        let xy = commutator(&o.sx, &o.sy).unwrap();
        assert!((&xy - &o.sz.scale(c(0.0, 2.0))).max_abs() < 1e-12);
    }

    #[test]
    fn charge_operator_at_symmetric_point() {
        let frame = QubitFrame::new(&sample_subspace(5, 0.0)).unwrap();
        let o = qubit_observables(&frame);
        let q = charge_current_operators(&frame, 1.0).unwrap();
        let mut want = o.sx.clone();
        want.add_scaled(c(-1.0, 0.0), &o.s0);
        want.add_scaled(c(-2.0, 0.0), frame.p0());
        assert!((&q.charge - &want).max_abs() < 1e-12);
        // restricted to span{|+⟩, |-⟩}: e(σ^x - 1) has eigenvalues {0, -2e}
        let basis = [frame.plus().to_vec(), frame.minus().to_vec()];
        let block = ComplexMatrix::from_fn(2, 2, |i, j| q.charge.sandwich(&basis[i], &basis[j]));
        let ev = hermitian_eigenvalues(&block).unwrap();
        assert!((ev[0] + 2.0).abs() < 1e-12 && ev[1].abs() < 1e-12);
    }

    #[test]
    fn charge_is_minus_two_e_on_excited_pairs() {
        let frame = QubitFrame::new(&sample_subspace(6, 0.9)).unwrap();
        let e = 1.7;
        let q = charge_current_operators(&frame, e).unwrap();
        let want = ComplexMatrix::from_fn(6, 6, |i, j| {
            if i == j && i > 0 {
                c(-2.0 * e, 0.0)
            } else {
                c(0.0, 0.0)
            }
        });
        assert!((&q.charge - &want).max_abs() < 1e-12);
    }

    #[test]
    fn current_commutator_is_along_sigma_y() {
        let frame = QubitFrame::new(&sample_subspace(8, 0.6)).unwrap();
        let q = charge_current_operators(&frame, 1.0).unwrap();
        let comp = frame_components(&frame, &q.current_commutator);
        let expected = -frame.omega() * frame.theta().sin();
        assert!((comp.y - c(expected, 0.0)).norm() < 1e-12, "{comp:?}");
        let scale = q.current_commutator.frobenius_norm();
        for other in [comp.x, comp.z, comp.identity, comp.p0] {
            assert!(other.norm() < 1e-10 * scale);
        }
        assert!(comp.remainder < 1e-10 * scale);
        let quoted = frame_components(&frame, &q.current_quoted);
        assert!((quoted.y.re / comp.y.re + 2.0).abs() < 1e-12);
    }

    #[test]
    fn gauge_covariance() {
        let sub = sample_subspace(6, 0.7);
        let rot = sub.rephased(C64::from_polar(1.0, 1.1));
        let a = QubitFrame::new(&sub).unwrap();
        let b = QubitFrame::new(&rot).unwrap();
        assert!((a.omega() - b.omega()).abs() < 1e-12);
        assert!((a.theta() - b.theta()).abs() < 1e-12);
        assert!((a.plus()[0].norm() - b.plus()[0].norm()).abs() < 1e-12);
        let ea = hermitian_eigenvalues(&build_h0_eff(&sub, CouplingConvention::Half).unwrap()).unwrap();
        let eb = hermitian_eigenvalues(&build_h0_eff(&rot, CouplingConvention::Half).unwrap()).unwrap();
        for (x, y) in ea.iter().zip(&eb) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn complementary_block_has_arrowhead_form() {
        let params = ModelParams::from_gate_charge(6, 0.8, 1.0, 0.3, 0).unwrap();
        let xi: Vec<C64> = (1..6).map(|r| c(0.1 * r as f64, 0.0)).collect();
        let sub = complementary_subspace(&params, xi.clone()).unwrap();
        let ng = complementary_gate_charge(&params);
        let expected_gate = 4.0 * params.e_c() * (1.0 - 2.0 * ng);
        assert!((sub.gate_energy() - expected_gate).abs() < 1e-12);
        let mirror = EffectiveSubspace::from_gate_energy(expected_gate, xi).unwrap();
        assert!((&build_h0_eff(&sub, CouplingConvention::Half).unwrap()
            - &build_h0_eff(&mirror, CouplingConvention::Half).unwrap())
            .max_abs()
            < 1e-12);
    }

    #[test]
    fn from_params_checks_length() {
        let params = ModelParams::from_gate_charge(4, 1.0, 1.0, 0.3, 0).unwrap();
        assert!(EffectiveSubspace::from_params(&params, vec![c(1.0, 0.0); 2]).is_err());
        let sub = EffectiveSubspace::from_params(&params, vec![c(1.0, 0.0); 3]).unwrap();
        assert!((sub.gate_energy() - 4.0 * (1.0 - 0.6)).abs() < 1e-12);
    }
}
