//! Brute-force checks of the closed forms by exact diagonalisation.
//!
//! Every check works sector by sector: `J_z` is conserved, so the register
//! splits into `K + 1` blocks of size `C(K, K/2 - m)`, each diagonalised and
//! labelled with `(j, m)` independently. The [`ClosedForms`] predictor can be
//! deliberately corrupted to confirm that the checks detect a wrong formula.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::io::{self, Write};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigenvalues, ComplexMatrix};
use crate::model::{
    bcs_eigenvalue, decompose_tunneling, effective_levels, h_island_on, island_eigenvalue, j_squared_on, jz_on,
    t_red_between, EffectiveLevels, ModelParams, RegisterBasis, TunnelingAmplitudes,
};
use crate::spin::{label_eigenbasis, multiplicity, HalfInt, LabeledEigenbasis};

pub const ORACLE_MAX_SITES: usize = 12;
pub const TUNNELING_MAX_SITES: usize = 10;
/// Relative tolerance (in units of `g`) for level energies.
pub const ENERGY_TOL: f64 = 1e-10;
/// Absolute tolerance for the fixed-`m` gap.
pub const GAP_TOL: f64 = 1e-10;
/// Block norms that must vanish, relative to `max(1, total norm)`.
pub const SELECTION_TOL: f64 = 1e-10;
/// Constant `C` in the effective-level bound `C g max(1, |m0| + 1)² / K`.
pub const LEVEL_BOUND_FACTOR: f64 = 2.0;

/// A single deliberately wrong closed-form constant.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Corruption {
    /// Predicted gap becomes `factor · g`.
    Gap(f64),
    /// Pairing prefactor `g/K` becomes `factor · g/K` in every level formula.
    Pairing(f64),
    /// Charging energy becomes `factor · E_C` in every level formula.
    Charging(f64),
    /// Predicted first-excited degeneracy becomes `K - 1 + offset`.
    Degeneracy(i64),
    /// Predicted SU(2) multiplicities shift by `offset`.
    Multiplicity(i64),
}

impl FromStr for Corruption {
    type Err = Error;

    /// `gap=1.01`, `pairing=0.99`, `charging=1.1`, `degeneracy=1`, `multiplicity=-1`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::validation(format!("corruption `{s}`: {why}"));
        let (key, value) = s.split_once('=').ok_or_else(|| bad("expected key=value"))?;
        let value = value.trim();
        let factor = || {
            value
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| bad("value must be a finite number"))
        };
        let offset = || value.parse::<i64>().map_err(|_| bad("value must be an integer"));
        match key.trim().to_ascii_lowercase().as_str() {
            "gap" => Ok(Self::Gap(factor()?)),
            "pairing" => Ok(Self::Pairing(factor()?)),
            "charging" => Ok(Self::Charging(factor()?)),
            "degeneracy" => Ok(Self::Degeneracy(offset()?)),
            "multiplicity" => Ok(Self::Multiplicity(offset()?)),
            _ => Err(bad("unknown key (gap, pairing, charging, degeneracy, multiplicity)")),
        }
    }
}

impl fmt::Display for Corruption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Gap(x) => write!(f, "gap={x}"),
            Self::Pairing(x) => write!(f, "pairing={x}"),
            Self::Charging(x) => write!(f, "charging={x}"),
            Self::Degeneracy(n) => write!(f, "degeneracy={n}"),
            Self::Multiplicity(n) => write!(f, "multiplicity={n}"),
        }
    }
}

/// The closed-form predictions the oracle compares against.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ClosedForms {
    corruption: Option<Corruption>,
}

impl ClosedForms {
    pub fn exact() -> Self {
        Self::default()
    }

    pub fn corrupted(c: Corruption) -> Self {
        Self { corruption: Some(c) }
    }

    pub fn corruption(&self) -> Option<Corruption> {
        self.corruption
    }

    fn pairing_factor(&self) -> f64 {
        match self.corruption {
            Some(Corruption::Pairing(x)) => x,
            _ => 1.0,
        }
    }

    fn charging_factor(&self) -> f64 {
        match self.corruption {
            Some(Corruption::Charging(x)) => x,
            _ => 1.0,
        }
    }

    pub fn bcs_eigenvalue(&self, j: HalfInt, m: HalfInt, g: f64, k_sites: usize) -> Result<f64> {
        bcs_eigenvalue(j, m, g * self.pairing_factor(), k_sites)
    }

    pub fn island_eigenvalue(&self, j: HalfInt, m: HalfInt, params: &ModelParams) -> Result<f64> {
        island_eigenvalue(j, m, &self.distort(params)?)
    }

    /// Energy between `j = K/2 - 1` and `j = K/2` at fixed `m`.
    pub fn gap(&self, g: f64) -> f64 {
        match self.corruption {
            Some(Corruption::Gap(x)) => x * g,
            _ => g,
        }
    }

    pub fn first_excited_degeneracy(&self, k_sites: usize) -> i64 {
        let base = k_sites as i64 - 1;
        match self.corruption {
            Some(Corruption::Degeneracy(d)) => base + d,
            _ => base,
        }
    }

    pub fn multiplicity(&self, k_sites: usize, j: HalfInt) -> Result<i128> {
        let r = multiplicity(k_sites, j)? as i128;
        Ok(match self.corruption {
            Some(Corruption::Multiplicity(d)) => r + d as i128,
            _ => r,
        })
    }

    pub fn effective_levels(&self, params: &ModelParams) -> Result<EffectiveLevels> {
        Ok(effective_levels(&self.distort(params)?))
    }

    fn distort(&self, p: &ModelParams) -> Result<ModelParams> {
        ModelParams::new(
            p.k_sites(),
            p.g() * self.pairing_factor(),
            p.e_c() * self.charging_factor(),
            p.m_bar(),
            p.m0(),
        )
    }
}

/// One diagonalised `J_z` sector with `(j, m)` labels.
#[derive(Clone, Debug)]
pub struct SectorEigenbasis {
    pub m: HalfInt,
    pub basis: RegisterBasis,
    pub eigen: LabeledEigenbasis,
}

fn all_m(k_sites: usize) -> impl Iterator<Item = HalfInt> {
    let k = k_sites as i64;
    (0..=k).map(move |d| HalfInt::from_doubled(k - 2 * d))
}

pub fn island_sector(params: &ModelParams, m: HalfInt) -> Result<SectorEigenbasis> {
    let k = params.k_sites();
    let basis = RegisterBasis::sector(k, m)?;
    let h = h_island_on(&basis, params);
    let eigen = label_eigenbasis(&h, &j_squared_on(&basis), &jz_on(&basis), k as i64)?;
    Ok(SectorEigenbasis { m, basis, eigen })
}

/// Diagonalises `H_island` in every sector, highest `m` first.
pub fn island_sectors(params: &ModelParams) -> Result<Vec<SectorEigenbasis>> {
    all_m(params.k_sites()).map(|m| island_sector(params, m)).collect()
}

fn check_oracle_size(k_sites: usize, cap: usize) -> Result<()> {
    if k_sites > cap {
        return Err(Error::Resource {
            requested: k_sites,
            cap,
        });
    }
    Ok(())
}

fn energy_scale(sectors: &[SectorEigenbasis]) -> f64 {
    sectors
        .iter()
        .flat_map(|s| s.eigen.labels.iter())
        .fold(1.0f64, |a, l| a.max(l.energy.abs()))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectrumEntry {
    pub energy: f64,
    pub closed_form: f64,
    pub j: HalfInt,
    pub m: HalfInt,
    /// Number of eigenstates sharing this `(j, m)` and energy.
    pub degeneracy: usize,
}

#[derive(Clone, Debug)]
pub struct LabeledSpectrum {
    pub params: ModelParams,
    /// One entry per eigenstate, ascending in energy.
    pub entries: Vec<SpectrumEntry>,
}

pub const SPECTRUM_HEADER: &str = "energy,closed_form,j,m,degeneracy";

impl LabeledSpectrum {
    pub fn k_sites(&self) -> usize {
        self.params.k_sites()
    }

    pub fn write_csv<W: Write>(&self, mut out: W, energy_unit: f64) -> io::Result<()> {
        writeln!(out, "{SPECTRUM_HEADER}")?;
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{}",
                e.energy / energy_unit,
                e.closed_form / energy_unit,
                e.j,
                e.m,
                e.degeneracy
            )?;
        }
        Ok(())
    }

    /// Distinct levels: `(energy, j, m, degeneracy)`, one line each.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let mut s = format!(
            "spectrum K={} g={} Ec={} mbar={} m0={}\n",
            p.k_sites(),
            p.g(),
            p.e_c(),
            p.m_bar(),
            p.m0()
        );
        let mut seen = Vec::new();
        for e in &self.entries {
            let key = (e.j, e.m, e.degeneracy);
            if seen.iter().any(|&(k, en): &(_, f64)| k == key && (en - e.energy).abs() <= 1e-9 * (1.0 + en.abs())) {
                continue;
            }
            seen.push((key, e.energy));
            let _ = writeln!(s, "level energy={:.12} j={} m={} degeneracy={}", e.energy, e.j, e.m, e.degeneracy);
        }
        s
    }
}

fn spectrum_from_sectors(params: &ModelParams, sectors: &[SectorEigenbasis], forms: &ClosedForms) -> Result<LabeledSpectrum> {
    let tol = 1e-9 * energy_scale(sectors);
    let mut entries = Vec::new();
    for s in sectors {
        let labels = &s.eigen.labels;
        for l in labels {
            let degeneracy = labels
                .iter()
                .filter(|o| o.j == l.j && (o.energy - l.energy).abs() <= tol)
                .count();
            entries.push(SpectrumEntry {
                energy: l.energy,
                closed_form: forms.island_eigenvalue(l.j, l.m, params)?,
                j: l.j,
                m: l.m,
                degeneracy,
            });
        }
    }
    entries.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(LabeledSpectrum {
        params: *params,
        entries,
    })
}

pub fn labeled_island_spectrum(params: &ModelParams, forms: &ClosedForms) -> Result<LabeledSpectrum> {
    check_oracle_size(params.k_sites(), ORACLE_MAX_SITES)?;
    spectrum_from_sectors(params, &island_sectors(params)?, forms)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelMismatch {
    pub j: HalfInt,
    pub m: HalfInt,
    pub expected: f64,
    pub got: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapRow {
    pub m: HalfInt,
    pub measured: f64,
    pub expected: f64,
    pub degeneracy: usize,
    pub expected_degeneracy: i64,
}

impl GapRow {
    pub fn passed(&self) -> bool {
        (self.measured - self.expected).abs() <= GAP_TOL && self.degeneracy as i64 == self.expected_degeneracy
    }
}

#[derive(Clone, Debug)]
pub struct BcsReport {
    pub k_sites: usize,
    pub g: f64,
    pub levels: usize,
    pub max_deviation: f64,
    pub mismatches: Vec<LevelMismatch>,
    pub gaps: Vec<GapRow>,
}

impl BcsReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.gaps.iter().all(GapRow::passed)
    }

    pub fn write_text(&self, s: &mut String) {
        let _ = writeln!(s, "[bcs] K={} g={}", self.k_sites, self.g);
        let _ = writeln!(s, "levels={} max_deviation={:.3e}", self.levels, self.max_deviation);
        for m in &self.mismatches {
            let _ = writeln!(s, "mismatch j={} m={} expected={} got={}", m.j, m.m, m.expected, m.got);
        }
        for r in &self.gaps {
            let _ = writeln!(
                s,
                "gap m={} measured={:.12} expected={:.12} degeneracy={} expected_degeneracy={} {}",
                r.m,
                r.measured,
                r.expected,
                r.degeneracy,
                r.expected_degeneracy,
                status(r.passed())
            );
        }
        let _ = writeln!(s, "status={}", status(self.passed()));
    }
}

fn status(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Diagonalises the reduced BCS Hamiltonian and checks every level, the gap
/// and the first-excited degeneracy in each `m` sector.
pub fn verify_bcs_structure(k_sites: usize, g: f64, forms: &ClosedForms) -> Result<BcsReport> {
    check_oracle_size(k_sites, ORACLE_MAX_SITES)?;
    let params = ModelParams::new(k_sites, g, 0.0, 0.0, 0)?;
    let sectors = island_sectors(&params)?;
    let tol = 1e-9 * energy_scale(&sectors);
    let top = HalfInt::from_int(k_sites as i64 / 2);
    let next = HalfInt::from_doubled(top.doubled() - 2);
    let mut mismatches = Vec::new();
    let mut gaps = Vec::new();
    let mut max_deviation = 0.0f64;
    let mut levels = 0;
    for s in &sectors {
        for l in &s.eigen.labels {
            levels += 1;
            let expected = forms.bcs_eigenvalue(l.j, l.m, g, k_sites)?;
            let dev = (expected - l.energy).abs();
            max_deviation = max_deviation.max(dev);
            if dev > ENERGY_TOL * g {
                mismatches.push(LevelMismatch {
                    j: l.j,
                    m: l.m,
                    expected,
                    got: l.energy,
                });
            }
        }
        if s.m.doubled().abs() > next.doubled() {
            continue;
        }
        let level = |j: HalfInt| s.eigen.labels.iter().find(|l| l.j == j).map(|l| l.energy);
        let (Some(ground), Some(excited)) = (level(top), level(next)) else {
            return Err(Error::Numerical(format!("sector m={} lacks j={top} or j={next}", s.m)));
        };
        let degeneracy = s
            .eigen
            .labels
            .iter()
            .filter(|l| (l.energy - excited).abs() <= tol)
            .count();
        gaps.push(GapRow {
            m: s.m,
            measured: excited - ground,
            expected: forms.gap(g),
            degeneracy,
            expected_degeneracy: forms.first_excited_degeneracy(k_sites),
        });
    }
    Ok(BcsReport {
        k_sites,
        g,
        levels,
        max_deviation,
        mismatches,
        gaps,
    })
}

#[derive(Clone, Debug)]
pub struct IslandReport {
    pub spectrum: LabeledSpectrum,
    pub max_deviation: f64,
    pub mismatches: Vec<LevelMismatch>,
    /// Entries whose degeneracy differs from the predicted multiplicity.
    pub degeneracy_failures: Vec<(HalfInt, HalfInt, usize, i128)>,
}

impl IslandReport {
    pub fn passed(&self) -> bool {
        self.mismatches.is_empty() && self.degeneracy_failures.is_empty()
    }

    pub fn write_text(&self, s: &mut String) {
        let p = &self.spectrum.params;
        let _ = writeln!(s, "[island] K={} g={} Ec={} mbar={}", p.k_sites(), p.g(), p.e_c(), p.m_bar());
        let _ = writeln!(s, "levels={} max_deviation={:.3e}", self.spectrum.entries.len(), self.max_deviation);
        for m in &self.mismatches {
            let _ = writeln!(s, "mismatch j={} m={} expected={} got={}", m.j, m.m, m.expected, m.got);
        }
        for (j, m, got, want) in &self.degeneracy_failures {
            let _ = writeln!(s, "degeneracy j={j} m={m} got={got} expected={want}");
        }
        let _ = writeln!(s, "status={}", status(self.passed()));
    }
}

/// Checks every island level against its closed form and each level's
/// degeneracy against the SU(2) multiplicity.
pub fn verify_island_spectrum(params: &ModelParams, forms: &ClosedForms) -> Result<IslandReport> {
    let spectrum = labeled_island_spectrum(params, forms)?;
    let scale = params.g().max(params.e_c());
    let mut mismatches = Vec::new();
    let mut degeneracy_failures = Vec::new();
    let mut max_deviation = 0.0f64;
    for e in &spectrum.entries {
        let dev = (e.energy - e.closed_form).abs();
        max_deviation = max_deviation.max(dev);
        if dev > ENERGY_TOL * scale * (1.0 + e.energy.abs() / scale).max(1.0) {
            mismatches.push(LevelMismatch {
                j: e.j,
                m: e.m,
                expected: e.closed_form,
                got: e.energy,
            });
        }
        let want = forms.multiplicity(params.k_sites(), e.j)?;
        if e.degeneracy as i128 != want && !degeneracy_failures.iter().any(|f: &(HalfInt, HalfInt, usize, i128)| f.0 == e.j && f.1 == e.m) {
            degeneracy_failures.push((e.j, e.m, e.degeneracy, want));
        }
    }
    Ok(IslandReport {
        spectrum,
        max_deviation,
        mismatches,
        degeneracy_failures,
    })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MultiplicityRow {
    pub j: HalfInt,
    /// Number of `J²` eigenvalues equal to `j(j+1)`.
    pub states: usize,
    pub predicted: i128,
}

impl MultiplicityRow {
    pub fn passed(&self) -> bool {
        self.states as i128 == (self.j.doubled() as i128 + 1) * self.predicted
    }
}

#[derive(Clone, Debug)]
pub struct MultiplicityReport {
    pub k_sites: usize,
    pub rows: Vec<MultiplicityRow>,
    /// Eigenvalues that did not round to any `j(j+1)`.
    pub unassigned: usize,
}

impl MultiplicityReport {
    pub fn passed(&self) -> bool {
        self.unassigned == 0 && self.rows.iter().all(MultiplicityRow::passed)
    }

    pub fn write_text(&self, s: &mut String) {
        let _ = writeln!(s, "[multiplicity] K={}", self.k_sites);
        for r in &self.rows {
            let _ = writeln!(
                s,
                "j={} states={} copies_expected={} {}",
                r.j,
                r.states,
                r.predicted,
                status(r.passed())
            );
        }
        let _ = writeln!(s, "unassigned={} status={}", self.unassigned, status(self.passed()));
    }
}

/// Counts the degeneracies of the full `2^K` matrix of `J²`.
pub fn verify_multiplicities(k_sites: usize, forms: &ClosedForms) -> Result<MultiplicityReport> {
    check_oracle_size(k_sites, ORACLE_MAX_SITES)?;
    if k_sites < 2 || !k_sites.is_multiple_of(2) {
        return Err(Error::validation(format!("K must be even and at least 2, got {k_sites}")));
    }
    let ev = hermitian_eigenvalues(&j_squared_on(&RegisterBasis::full(k_sites)?))?;
    let mut rows = Vec::new();
    let mut assigned = 0;
    for twice_j in (0..=k_sites as i64).step_by(2) {
        let j = HalfInt::from_doubled(twice_j);
        let states = ev.iter().filter(|&&x| (x - j.casimir()).abs() < 1e-6).count();
        assigned += states;
        rows.push(MultiplicityRow {
            j,
            states,
            predicted: forms.multiplicity(k_sites, j)?,
        });
    }
    Ok(MultiplicityReport {
        k_sites,
        rows,
        unassigned: ev.len() - assigned,
    })
}

#[derive(Clone, Debug)]
pub struct EffectiveLevelReport {
    pub params: ModelParams,
    /// Exact `(E0, E1, W0, W1)` after subtracting the extracted constant.
    pub exact: [f64; 4],
    pub predicted: [f64; 4],
    pub residuals: [f64; 4],
    pub bound: f64,
    /// Rounding level of the eigensolver for this problem size.
    pub floor: f64,
}

impl EffectiveLevelReport {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, &b| a.max(b))
    }

    pub fn passed(&self) -> bool {
        self.max_residual() <= self.bound
    }

    pub fn write_text(&self, s: &mut String) {
        let p = &self.params;
        let _ = writeln!(
            s,
            "[effective_levels] K={} g={} Ec={} mbar={} m0={}",
            p.k_sites(),
            p.g(),
            p.e_c(),
            p.m_bar(),
            p.m0()
        );
        for (i, name) in ["E0", "E1", "W0", "W1"].iter().enumerate() {
            let _ = writeln!(
                s,
                "{name} exact={:.12} predicted={:.12} residual={:.3e}",
                self.exact[i], self.predicted[i], self.residuals[i]
            );
        }
        let _ = writeln!(s, "bound={:.3e} status={}", self.bound, status(self.passed()));
    }
}

/// Compares the four Coulomb-blockade levels with exact island eigenvalues.
/// Requires `m0 ∈ {-1, 0, 1}`.
pub fn effective_level_check(params: &ModelParams, forms: &ClosedForms) -> Result<EffectiveLevelReport> {
    let k = params.k_sites();
    check_oracle_size(k, ORACLE_MAX_SITES)?;
    let m0 = params.m0();
    if m0.abs() > 1 {
        return Err(Error::validation(format!("effective-level check needs m0 ∈ {{-1, 0, 1}}, got {m0}")));
    }
    let top = HalfInt::from_int(k as i64 / 2);
    let next = HalfInt::from_doubled(top.doubled() - 2);
    if next.doubled() < (2 * (m0 + 1)).abs().max((2 * m0).abs()) {
        return Err(Error::validation(format!("K = {k} too small for m0 = {m0}")));
    }
    let lower = island_sector(params, HalfInt::from_int(m0))?;
    let upper = island_sector(params, HalfInt::from_int(m0 + 1))?;
    let level = |s: &SectorEigenbasis, j: HalfInt| -> Result<f64> {
        s.eigen
            .labels
            .iter()
            .find(|l| l.j == j)
            .map(|l| l.energy)
            .ok_or_else(|| Error::Numerical(format!("no j={j} state in sector m={}", s.m)))
    };
    let predicted_levels = forms.effective_levels(params)?;
    // The constant is a property of the model, not of the formula under test.
    let constant = effective_levels(params).extracted_constant;
    let raw = [
        level(&lower, top)?,
        level(&upper, top)?,
        level(&lower, next)?,
        level(&upper, next)?,
    ];
    let exact = raw.map(|x| x - constant);
    let l = &predicted_levels;
    let predicted = [l.e0, l.e1, l.w0, l.w1];
    let residuals = std::array::from_fn(|i| (exact[i] - predicted[i]).abs());
    let reach = (m0.abs() + 1).max(1) as f64;
    let scale = energy_scale(&[lower, upper]);
    Ok(EffectiveLevelReport {
        params: *params,
        exact,
        predicted,
        residuals,
        bound: LEVEL_BOUND_FACTOR * params.g() * reach * reach / k as f64,
        floor: 1e-12 * scale,
    })
}

#[derive(Clone, Debug)]
pub struct ScalingReport {
    pub reports: Vec<EffectiveLevelReport>,
    /// Log-log slope of the largest residual against `K`; `None` when any
    /// residual sits at the rounding floor and no scaling can be measured.
    pub slope: Option<f64>,
}

/// Runs [`effective_level_check`] for each `K` with the other parameters of
/// `base` fixed and regresses `log max residual` on `log K`.
pub fn effective_level_scaling(base: &ModelParams, ks: &[usize], forms: &ClosedForms) -> Result<ScalingReport> {
    let reports = ks
        .iter()
        .map(|&k| effective_level_check(&base.with_k_sites(k)?, forms))
        .collect::<Result<Vec<_>>>()?;
    let measurable = reports.iter().all(|r| r.max_residual() > r.floor);
    let slope = if measurable && reports.len() >= 2 {
        let pts: Vec<(f64, f64)> = reports
            .iter()
            .map(|r| ((r.params.k_sites() as f64).ln(), r.max_residual().ln()))
            .collect();
        Some(log_log_slope(&pts))
    } else {
        None
    };
    Ok(ScalingReport { reports, slope })
}

/// Least-squares slope through `(x, y)` points.
pub fn log_log_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Frobenius norms of an operator's blocks between eigenstates, keyed by
/// `(2Δj, Δm)` with `Δ = row - column`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BlockNorms {
    squares: BTreeMap<(i64, i64), f64>,
}

impl BlockNorms {
    fn add(&mut self, key: (i64, i64), sq: f64) {
        *self.squares.entry(key).or_insert(0.0) += sq;
    }

    /// `(Δj, Δm, norm)` rows in key order.
    pub fn rows(&self) -> Vec<(HalfInt, i64, f64)> {
        self.squares
            .iter()
            .map(|(&(dj, dm), &sq)| (HalfInt::from_doubled(dj), dm, sq.sqrt()))
            .collect()
    }

    pub fn total(&self) -> f64 {
        self.squares.values().fold(0.0, |a, b| a + b).sqrt()
    }

    pub fn norm_where(&self, mut keep: impl FnMut(HalfInt, i64) -> bool) -> f64 {
        self.squares
            .iter()
            .filter(|(&(dj, dm), _)| keep(HalfInt::from_doubled(dj), dm))
            .fold(0.0, |a, (_, &sq)| a + sq)
            .sqrt()
    }
}

#[derive(Clone, Debug)]
pub struct TunnelingReport {
    pub k_sites: usize,
    pub collective: BlockNorms,
    pub individual: BlockNorms,
    pub full: BlockNorms,
    /// Collective norm outside `Δj = 0`.
    pub collective_off_diagonal: f64,
    /// Norm of the full operator outside `Δm = ±1`.
    pub charge_violation: f64,
    /// Individual part: norm in `Δj = ±1` over norm in `Δj = 0`.
    pub individual_ratio: f64,
    pub tolerance: f64,
}

impl TunnelingReport {
    pub fn passed(&self) -> bool {
        self.collective_off_diagonal <= self.tolerance && self.charge_violation <= self.tolerance
    }

    pub fn write_text(&self, s: &mut String) {
        let _ = writeln!(s, "[tunneling] K={}", self.k_sites);
        let _ = writeln!(s, "part,dj,dm,norm");
        for (name, t) in [("collective", &self.collective), ("individual", &self.individual), ("full", &self.full)] {
            for (dj, dm, n) in t.rows() {
                let _ = writeln!(s, "{name},{dj},{dm},{n:.6e}");
            }
        }
        let _ = writeln!(
            s,
            "collective_off_diagonal={:.3e} charge_violation={:.3e} tolerance={:.3e}",
            self.collective_off_diagonal, self.charge_violation, self.tolerance
        );
        let _ = writeln!(s, "individual_ratio_dj1_over_dj0={:.6}", self.individual_ratio);
        let _ = writeln!(s, "status={}", status(self.passed()));
    }
}

fn block_norms(sectors: &[SectorEigenbasis], amps: &TunnelingAmplitudes) -> BlockNorms {
    let mut out = BlockNorms::default();
    for row in sectors {
        for col in sectors {
            let block = t_red_between(&row.basis, &col.basis, amps);
            if block.max_abs() == 0.0 {
                continue;
            }
            let rotated: ComplexMatrix = &(&row.eigen.vectors.adjoint() * &block) * &col.eigen.vectors;
            for (a, la) in row.eigen.labels.iter().enumerate() {
                for (b, lb) in col.eigen.labels.iter().enumerate() {
                    let dj = la.j.doubled() - lb.j.doubled();
                    let dm = (la.m.doubled() - lb.m.doubled()) / 2;
                    out.add((dj, dm), rotated[(a, b)].norm_sqr());
                }
            }
        }
    }
    out
}

/// Block norms of the tunneling operator and its collective and individual
/// parts in the labelled eigenbasis of `H_island`.
pub fn tunneling_selection_check(params: &ModelParams, amps: &TunnelingAmplitudes) -> Result<TunnelingReport> {
    let k = params.k_sites();
    check_oracle_size(k, TUNNELING_MAX_SITES)?;
    if amps.len() != k {
        return Err(Error::validation(format!("{} amplitudes supplied for K = {k}", amps.len())));
    }
    let sectors = island_sectors(params)?;
    let split = decompose_tunneling(amps);
    let collective = block_norms(&sectors, &split.collective_amplitudes());
    let individual = block_norms(&sectors, &split.residual_amplitudes());
    let full = block_norms(&sectors, amps);
    let zero = HalfInt::ZERO;
    let collective_off_diagonal = collective.norm_where(|dj, _| dj != zero);
    let charge_violation = full.norm_where(|_, dm| dm.abs() != 1);
    let ind_same = individual.norm_where(|dj, _| dj == zero);
    let ind_step = individual.norm_where(|dj, _| dj.doubled().abs() == 2);
    Ok(TunnelingReport {
        k_sites: k,
        tolerance: SELECTION_TOL * full.total().max(1.0),
        collective,
        individual,
        full,
        collective_off_diagonal,
        charge_violation,
        individual_ratio: ind_step / ind_same,
    })
}

/// Full verification run: BCS structure, multiplicities, island spectrum,
/// effective levels and (for `K ≤ 10`) the tunneling selection rules.
#[derive(Clone, Debug)]
pub struct OracleReport {
    pub bcs: BcsReport,
    pub multiplicities: MultiplicityReport,
    pub island: IslandReport,
    pub effective: EffectiveLevelReport,
    pub tunneling: Option<TunnelingReport>,
    pub corruption: Option<Corruption>,
}

/// Process exit code for a scientific-assertion failure.
pub const SCIENTIFIC_FAILURE: i32 = 2;

impl OracleReport {
    pub fn passed(&self) -> bool {
        self.bcs.passed()
            && self.multiplicities.passed()
            && self.island.passed()
            && self.effective.passed()
            && self.tunneling.as_ref().is_none_or(TunnelingReport::passed)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            SCIENTIFIC_FAILURE
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        if let Some(c) = self.corruption {
            let _ = writeln!(s, "corruption={c}");
        }
        self.bcs.write_text(&mut s);
        self.multiplicities.write_text(&mut s);
        self.island.write_text(&mut s);
        self.effective.write_text(&mut s);
        match &self.tunneling {
            Some(t) => t.write_text(&mut s),
            None => {
                let _ = writeln!(s, "[tunneling] skipped: K > {TUNNELING_MAX_SITES}");
            }
        }
        let _ = writeln!(s, "[overall] status={}", status(self.passed()));
        s
    }
}

pub fn run_oracle(params: &ModelParams, amps: &TunnelingAmplitudes, forms: &ClosedForms) -> Result<OracleReport> {
    let k = params.k_sites();
    let tunneling = if k <= TUNNELING_MAX_SITES {
        Some(tunneling_selection_check(params, amps)?)
    } else {
        None
    };
    Ok(OracleReport {
        bcs: verify_bcs_structure(k, params.g(), forms)?,
        multiplicities: verify_multiplicities(k, forms)?,
        island: verify_island_spectrum(params, forms)?,
        effective: effective_level_check(params, forms)?,
        tunneling,
        corruption: forms.corruption(),
    })
}

/// Island spectrum assembled from the closed form with SU(2) multiplicities,
/// ascending.
pub fn closed_form_multiset(params: &ModelParams) -> Result<Vec<f64>> {
    let k = params.k_sites();
    let mut out = Vec::with_capacity(1 << k);
    for twice_j in (0..=k as i64).step_by(2) {
        let j = HalfInt::from_doubled(twice_j);
        let r = multiplicity(k, j)? as usize;
        for twice_m in (-twice_j..=twice_j).step_by(2) {
            let e = island_eigenvalue(j, HalfInt::from_doubled(twice_m), params)?;
            out.extend(std::iter::repeat_n(e, r));
        }
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{toy_amplitudes, TunnelingAmplitudes};
    use crate::C64;

    #[test]
    fn corruption_parsing() {
        assert_eq!("gap=1.01".parse::<Corruption>().unwrap(), Corruption::Gap(1.01));
        assert_eq!(" Degeneracy = 1".parse::<Corruption>().unwrap(), Corruption::Degeneracy(1));
        assert_eq!("multiplicity=-2".parse::<Corruption>().unwrap(), Corruption::Multiplicity(-2));
        for bad in ["gap", "gap=x", "gap=inf", "degeneracy=0.5", "foo=1", ""] {
            assert!(bad.parse::<Corruption>().is_err(), "{bad}");
        }
        let c = Corruption::Charging(0.9);
        assert_eq!(c.to_string().parse::<Corruption>().unwrap(), c);
    }

    #[test]
    fn bcs_small_cases() {
        let r = verify_bcs_structure(4, 1.0, &ClosedForms::exact()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.levels, 16);
        assert_eq!(r.gaps.len(), 3);
        assert!(r.gaps.iter().all(|g| (g.measured - 1.0).abs() < 1e-12 && g.degeneracy == 3));
        let r2 = verify_bcs_structure(2, 1.0, &ClosedForms::exact()).unwrap();
        assert!(r2.passed());
        assert_eq!(r2.gaps.len(), 1);
        assert_eq!(r2.gaps[0].degeneracy, 1);
    }

    #[test]
    fn bcs_detects_corruption() {
        for c in [Corruption::Gap(1.01), Corruption::Pairing(1.01), Corruption::Degeneracy(1)] {
            let r = verify_bcs_structure(4, 1.0, &ClosedForms::corrupted(c)).unwrap();
            assert!(!r.passed(), "{c}");
        }
        let r = verify_bcs_structure(4, 1.0, &ClosedForms::corrupted(Corruption::Pairing(1.01))).unwrap();
        assert!(!r.mismatches.is_empty());
    }

    #[test]
    fn oversized_oracle_is_refused() {
        assert!(matches!(
            verify_bcs_structure(14, 1.0, &ClosedForms::exact()),
            Err(Error::Resource { .. })
        ));
    }

    #[test]
    fn multiplicities_small() {
        for k in [2, 4, 6] {
            let r = verify_multiplicities(k, &ClosedForms::exact()).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        assert!(!verify_multiplicities(4, &ClosedForms::corrupted(Corruption::Multiplicity(1)))
            .unwrap()
            .passed());
    }

    #[test]
    fn island_spectrum_k4() {
        let p = ModelParams::new(4, 1.0, 0.7, 0.3, 0).unwrap();
        let r = verify_island_spectrum(&p, &ClosedForms::exact()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.spectrum.entries.len(), 16);
        let mut buf = Vec::new();
        r.spectrum.write_csv(&mut buf, 1.0).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap().lines().count(), 17);
        assert!(!verify_island_spectrum(&p, &ClosedForms::corrupted(Corruption::Charging(1.1)))
            .unwrap()
            .passed());
    }

    #[test]
    fn effective_levels_k12() {
        let p = ModelParams::from_gate_charge(12, 1.0, 1.0, 0.3, 0).unwrap();
        let r = effective_level_check(&p, &ClosedForms::exact()).unwrap();
        assert!(r.passed(), "{r:?}");
        assert!(r.bound == 2.0 / 12.0);
    }

    #[test]
    fn effective_levels_m0_range() {
        let p = ModelParams::new(8, 1.0, 1.0, 2.5, 2).unwrap();
        assert!(effective_level_check(&p, &ClosedForms::exact()).is_err());
    }

    #[test]
    fn effective_residual_is_g_over_k_off_centre() {
        // At m0 = 1 the dropped (g/K)(m² - m) term is 2g/K for m = 2.
        let p = ModelParams::new(8, 1.0, 1.0, 1.4, 1).unwrap();
        let r = effective_level_check(&p, &ClosedForms::exact()).unwrap();
        assert!(r.passed());
        assert!((r.max_residual() - 2.0 / 8.0).abs() < 1e-9, "{:?}", r.residuals);
    }

    #[test]
    fn tunneling_constant_and_zero_total() {
        let p = ModelParams::new(6, 1.0, 1.0, 0.4, 0).unwrap();
        let flat = TunnelingAmplitudes::constant(C64::new(0.3, 0.1), 6).unwrap();
        let r = tunneling_selection_check(&p, &flat).unwrap();
        assert!(r.passed());
        assert!(r.individual.total() < 1e-12);
        assert!(r.full.norm_where(|dj, _| dj != HalfInt::ZERO) < 1e-10);
        let toy = toy_amplitudes(C64::new(1.0, 0.0), 2.0 * std::f64::consts::PI / 6.0, 6).unwrap();
        let t = tunneling_selection_check(&p, &toy).unwrap();
        assert!(t.passed());
        assert!(t.collective.total() < 1e-10);
        assert!(t.individual.norm_where(|dj, _| dj.doubled().abs() == 2) > 0.1);
    }

    #[test]
    fn closed_form_multiset_matches_sectors() {
        let p = ModelParams::new(6, 1.3, 0.4, 0.7, 0).unwrap();
        let cf = closed_form_multiset(&p).unwrap();
        let spec = labeled_island_spectrum(&p, &ClosedForms::exact()).unwrap();
        assert_eq!(cf.len(), spec.entries.len());
        for (a, b) in cf.iter().zip(&spec.entries) {
            assert!((a - b.energy).abs() < 1e-10);
        }
    }
}
