use clap::Args;
use cpb_core::bloch::{
    closed_form, evolve_sampled, leakage_total, recommended_step, write_trajectory_csv, BlochState, Rates,
};
use cpb_core::C64;
use serde_json::json;

use crate::{CliError, Context};

/// Discrepancy allowed between the integrator and the closed form.
pub const AGREEMENT_TOL: f64 = 1e-8;

#[derive(Clone, Debug, Args)]
pub struct BlochArgs {
    /// Relaxation rate Γ from |+⟩ to |-⟩.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// Transfer rate Γ_W⁺ from |+⟩ into the degenerate level.
    #[arg(long = "gamma-w-plus")]
    pub gamma_w_plus: Option<f64>,
    /// Transfer rate Γ_W⁻ from the degenerate level into |-⟩.
    #[arg(long = "gamma-w-minus")]
    pub gamma_w_minus: Option<f64>,
    /// Escape rate Γ_E⁺ out of |+⟩.
    #[arg(long = "gamma-e-plus")]
    pub gamma_e_plus: Option<f64>,
    /// Escape rate Γ_E⁻ out of |-⟩.
    #[arg(long = "gamma-e-minus")]
    pub gamma_e_minus: Option<f64>,
    /// Qubit splitting ω.
    #[arg(long)]
    pub omega: Option<f64>,
    /// Duration.
    #[arg(long)]
    pub t: Option<f64>,
    /// Time step (default: chosen from the largest rate).
    #[arg(long)]
    pub dt: Option<f64>,
    /// Initial population of |+⟩.
    #[arg(long = "p-plus")]
    pub p_plus: Option<f64>,
    /// Initial population of the degenerate level.
    #[arg(long = "p-zero")]
    pub p_zero: Option<f64>,
    /// Initial population of |-⟩.
    #[arg(long = "p-minus")]
    pub p_minus: Option<f64>,
    /// Real part of the initial coherence α.
    #[arg(long = "alpha-re")]
    pub alpha_re: Option<f64>,
    /// Imaginary part of the initial coherence α.
    #[arg(long = "alpha-im")]
    pub alpha_im: Option<f64>,
    /// Write every n-th step (default: about 1000 rows).
    #[arg(long)]
    pub every: Option<usize>,
}

/// Rows of `cpb bloch` output plus the comparison with the closed form.
pub struct BlochRun {
    pub samples: Vec<BlochState>,
    pub max_discrepancy: f64,
    pub leakage_monotone: bool,
    pub step_fraction: f64,
    pub warnings: Vec<String>,
}

pub fn simulate(rates: &Rates, omega: f64, s0: &BlochState, t: f64, dt: f64, every: usize) -> Result<BlochRun, CliError> {
    let traj = evolve_sampled(s0, rates, omega, t, dt, every)?;
    let max_discrepancy = traj
        .samples
        .iter()
        .map(|s| s.max_difference(&closed_form(s0, rates, omega, s.t - s0.t)))
        .fold(0.0, f64::max);
    let leakage_monotone = traj
        .samples
        .windows(2)
        .all(|w| leakage_total(&w[1]) >= leakage_total(&w[0]) - 1e-12);
    Ok(BlochRun {
        max_discrepancy,
        leakage_monotone,
        step_fraction: traj.step * rates.max_rate(omega),
        warnings: traj.warnings,
        samples: traj.samples,
    })
}

pub fn run(ctx: &mut Context, args: &BlochArgs) -> Result<bool, CliError> {
    let f = ctx.file.clone();
    let d = Rates::illustrative();
    let rates = Rates::new(
        args.gamma.or(f.gamma).unwrap_or(d.gamma()),
        args.gamma_w_plus.or(f.gamma_w_plus).unwrap_or(d.gamma_w_plus()),
        args.gamma_w_minus.or(f.gamma_w_minus).unwrap_or(d.gamma_w_minus()),
        args.gamma_e_plus.or(f.gamma_e_plus).unwrap_or(d.gamma_e_plus()),
        args.gamma_e_minus.or(f.gamma_e_minus).unwrap_or(d.gamma_e_minus()),
    )?;
    let omega = args.omega.or(f.omega).unwrap_or(1.0);
    let t = args.t.or(f.t).unwrap_or(20.0);
    let s0 = BlochState::new(
        0.0,
        args.p_plus.or(f.p_plus).unwrap_or(1.0),
        args.p_zero.or(f.p_zero).unwrap_or(0.0),
        args.p_minus.or(f.p_minus).unwrap_or(0.0),
        C64::new(
            args.alpha_re.or(f.alpha_re).unwrap_or(0.0),
            args.alpha_im.or(f.alpha_im).unwrap_or(0.0),
        ),
    )?;
    if !s0.is_physical() {
        ctx.warn("initial coherence violates |α|² ≤ p₊p₋");
    }
    let dt = args.dt.or(f.dt).unwrap_or_else(|| recommended_step(&rates, omega, t));
    let steps = if dt > 0.0 { (t / dt).ceil() as usize } else { 0 };
    let every = args.every.or(f.every).unwrap_or((steps / 1000).max(1));
    let result = simulate(&rates, omega, &s0, t, dt, every)?;
    for w in &result.warnings {
        ctx.warn(w);
    }
    let echo = json!({
        "command": "bloch",
        "gamma": rates.gamma(), "gamma-w-plus": rates.gamma_w_plus(), "gamma-w-minus": rates.gamma_w_minus(),
        "gamma-e-plus": rates.gamma_e_plus(), "gamma-e-minus": rates.gamma_e_minus(),
        "omega": omega, "t": t, "dt": dt, "every": every,
        "p-plus": s0.p_plus, "p-zero": s0.p_zero, "p-minus": s0.p_minus,
        "alpha-re": s0.alpha.re, "alpha-im": s0.alpha.im,
    });
    ctx.echo_config(&echo)?;
    write_trajectory_csv(&mut *ctx.out, &result.samples)?;
    writeln!(ctx.out, "# max_discrepancy_vs_closed_form={:e}", result.max_discrepancy)?;
    writeln!(ctx.out, "# leakage_monotone={}", result.leakage_monotone)?;
    let accurate = result.step_fraction > 0.01 || result.max_discrepancy <= AGREEMENT_TOL;
    if !accurate {
        ctx.warn(&format!(
            "integrator and closed form differ by {:e} > {AGREEMENT_TOL:e}",
            result.max_discrepancy
        ));
    }
    Ok(accurate && result.leakage_monotone)
}
