use clap::Args;
use cpb_core::oracle::{verify_island_spectrum, ClosedForms};
use serde_json::json;

use crate::{Charge, CliError, Context, ModelArgs, ModelDefaults};

#[derive(Clone, Debug, Args)]
pub struct SpectrumArgs {
    #[command(flatten)]
    pub model: ModelArgs,
}

/// One CSV row per eigenstate of the island Hamiltonian.
pub fn run(ctx: &mut Context, args: &SpectrumArgs) -> Result<bool, CliError> {
    let params = args.model.resolve(
        &ctx.file,
        ModelDefaults {
            k: 8,
            g: 1.0,
            ec: 1.0,
            charge: Charge::Mbar(0.4),
        },
    )?;
    let report = verify_island_spectrum(&params, &ClosedForms::exact())?;
    let unit = ctx.energy_unit(params.e_c());
    let echo = json!({
        "command": "spectrum",
        "K": params.k_sites(),
        "g": params.g(),
        "Ec": params.e_c(),
        "mbar": params.m_bar(),
        "m0": params.m0(),
        "units": ctx.unit_name(params.e_c()),
    });
    ctx.echo_config(&echo)?;
    report.spectrum.write_csv(&mut *ctx.out, unit)?;
    if !report.passed() {
        let mut text = String::new();
        report.write_text(&mut text);
        let _ = write!(ctx.err, "{text}");
    }
    Ok(report.passed())
}
