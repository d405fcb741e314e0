use clap::Args;
use cpb_core::oracle::{run_oracle, ClosedForms, Corruption};
use serde_json::json;

use super::{AmpArgs, AmpSource};
use crate::{Charge, CliError, Context, ModelArgs, ModelDefaults};

#[derive(Clone, Debug, Args)]
pub struct OracleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub amps: AmpArgs,
    /// Replace one closed-form constant, e.g. `gap=1.01` (negative control).
    #[arg(long)]
    pub corrupt: Option<String>,
    /// Emit the labelled spectrum as CSV after the report.
    #[arg(long)]
    pub csv: bool,
}

pub fn run(ctx: &mut Context, args: &OracleArgs) -> Result<bool, CliError> {
    let params = args.model.resolve(
        &ctx.file,
        ModelDefaults {
            k: 8,
            g: 1.0,
            ec: 1.0,
            charge: Charge::Ng(0.3),
        },
    )?;
    let (amps, amp_echo) = args.amps.resolve(&ctx.file, params.k_sites(), AmpSource::Random)?;
    let corrupt = args.corrupt.clone().or(ctx.file.corrupt.clone());
    let forms = match &corrupt {
        Some(spec) => ClosedForms::corrupted(spec.parse::<Corruption>()?),
        None => ClosedForms::exact(),
    };
    let csv = args.csv || ctx.file.csv.unwrap_or(false);
    let report = run_oracle(&params, &amps, &forms)?;
    let echo = json!({
        "command": "oracle",
        "K": params.k_sites(),
        "g": params.g(),
        "Ec": params.e_c(),
        "mbar": params.m_bar(),
        "m0": params.m0(),
        "amplitudes": amp_echo,
        "corrupt": corrupt,
    });
    ctx.echo_config(&echo)?;
    write!(ctx.out, "{}", report.to_text())?;
    if csv {
        let unit = ctx.energy_unit(params.e_c());
        report.island.spectrum.write_csv(&mut *ctx.out, unit)?;
    }
    Ok(report.passed())
}
