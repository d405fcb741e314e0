use clap::Args;
use cpb_core::linalg::hermitian_eigenvalues;
use cpb_core::qubit::{build_h0_eff, CouplingConvention, EffectiveSubspace};
use cpb_core::C64;
use rayon::prelude::*;
use serde_json::json;

use super::linspace;
use crate::{CliError, Context};

#[derive(Clone, Debug, Args)]
pub struct BandArgs {
    /// Charging energy E_C.
    #[arg(long = "Ec")]
    pub ec: Option<f64>,
    /// Josephson energy E_J (default E_C / 2).
    #[arg(long = "EJ")]
    pub ej: Option<f64>,
    /// First gate charge of the sweep (default 0).
    #[arg(long = "ng-from")]
    pub ng_from: Option<f64>,
    /// Last gate charge of the sweep (default 1).
    #[arg(long = "ng-to")]
    pub ng_to: Option<f64>,
    /// Number of rows.
    #[arg(long)]
    pub steps: Option<usize>,
    /// Size of the arrowhead matrix diagonalised on every row as a cross-check.
    #[arg(long = "check-K")]
    pub check_k: Option<usize>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BandRow {
    pub ng: f64,
    pub lower: f64,
    pub middle: f64,
    pub upper: f64,
    /// Largest gap between the sorted eigenvalues of the arrowhead matrix
    /// and `{-ω/2, E/2 × (K-2), ω/2}`.
    pub eig_deviation: f64,
}

impl BandRow {
    pub fn sandwiched(&self) -> bool {
        let slack = 1e-12 * (1.0 + self.upper.abs());
        self.lower <= self.middle + slack && self.middle <= self.upper + slack
    }

    pub fn eig_ok(&self) -> bool {
        self.eig_deviation <= 1e-10 * self.upper.abs().max(f64::MIN_POSITIVE) * 2.0
    }
}

/// Levels at one gate charge. `ξ_r` is spread evenly over `check_k - 1`
/// excited states with a varying phase.
pub fn band_row(ng: f64, e_c: f64, e_j: f64, check_k: usize) -> Result<BandRow, CliError> {
    let gate = 4.0 * e_c * (1.0 - 2.0 * ng);
    let omega = gate.hypot(e_j);
    let (lower, middle, upper) = (-omega / 2.0, gate / 2.0, omega / 2.0);
    let n = check_k - 1;
    let xi: Vec<C64> = (1..=n)
        .map(|r| C64::from_polar(e_j / (n as f64).sqrt(), 0.7 * r as f64))
        .collect();
    let h = build_h0_eff(&EffectiveSubspace::from_gate_energy(gate, xi)?, CouplingConvention::Half)?;
    let got = hermitian_eigenvalues(&h)?;
    let mut want = vec![middle; check_k];
    want[0] = lower;
    want[check_k - 1] = upper;
    want.sort_by(f64::total_cmp);
    let eig_deviation = got.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    Ok(BandRow {
        ng,
        lower,
        middle,
        upper,
        eig_deviation,
    })
}

pub fn run(ctx: &mut Context, args: &BandArgs) -> Result<bool, CliError> {
    let f = &ctx.file;
    let e_c = args.ec.or(f.ec).unwrap_or(1.0);
    let e_j = args.ej.or(f.ej).unwrap_or(e_c / 2.0);
    let from = args.ng_from.or(f.ng_from).unwrap_or(0.0);
    let to = args.ng_to.or(f.ng_to).unwrap_or(1.0);
    let steps = args.steps.or(f.steps).unwrap_or(101);
    let check_k = args.check_k.or(f.check_k).unwrap_or(6);
    if !(e_c.is_finite() && e_c >= 0.0 && e_j.is_finite() && e_j >= 0.0) {
        return Err(CliError::Usage("need finite E_C ≥ 0 and E_J ≥ 0".into()));
    }
    if !(from.is_finite() && to.is_finite()) || steps == 0 {
        return Err(CliError::Usage("sweep bounds must be finite and steps ≥ 1".into()));
    }
    if check_k < 3 {
        return Err(CliError::Usage("--check-K must be at least 3".into()));
    }
    let rows = linspace(from, to, steps)
        .into_par_iter()
        .map(|ng| band_row(ng, e_c, e_j, check_k))
        .collect::<Result<Vec<_>, _>>()?;
    let unit = ctx.energy_unit(e_c);
    let echo = json!({
        "command": "band-diagram",
        "Ec": e_c,
        "EJ": e_j,
        "ng-from": from,
        "ng-to": to,
        "steps": steps,
        "check-K": check_k,
        "units": ctx.unit_name(e_c),
    });
    ctx.echo_config(&echo)?;
    writeln!(ctx.out, "ng,minus_half_omega,half_gate_energy,plus_half_omega,eig_deviation")?;
    let mut ok = true;
    for r in &rows {
        writeln!(
            ctx.out,
            "{},{},{},{},{:e}",
            r.ng,
            r.lower / unit,
            r.middle / unit,
            r.upper / unit,
            r.eig_deviation / unit
        )?;
        if !r.sandwiched() || !r.eig_ok() {
            ok = false;
            ctx.warn(&format!("row n_g = {} failed: {r:?}", r.ng));
        }
    }
    Ok(ok)
}
