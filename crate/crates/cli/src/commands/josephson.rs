use std::f64::consts::PI;

use clap::{Args, ValueEnum};
use cpb_core::model::{josephson_energies, random_amplitudes, toy_amplitudes, JosephsonEnergies};
use cpb_core::oracle::log_log_slope;
use cpb_core::C64;
use rayon::prelude::*;
use serde_json::json;

use crate::{CliError, Context};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScalingSource {
    Toy,
    Random,
}

#[derive(Clone, Debug, Args)]
pub struct JosephsonArgs {
    /// Amplitude source (default toy).
    #[arg(long, value_enum)]
    pub source: Option<ScalingSource>,
    /// Toy phase step λ.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Use λ = 2π/K on every row (toy source).
    #[arg(long = "lambda-per-K")]
    pub lambda_per_k: bool,
    /// Toy amplitude A.
    #[arg(long = "A")]
    pub a: Option<f64>,
    /// Comma-separated list of K values.
    #[arg(long = "K-list", value_delimiter = ',')]
    pub k_list: Option<Vec<usize>>,
    /// Number of random seeds per K.
    #[arg(long)]
    pub seeds: Option<u64>,
    /// First seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Root-mean-square |β_k| of the random source.
    #[arg(long)]
    pub scale: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalingRow {
    pub k: usize,
    pub seed: Option<u64>,
    pub lambda: Option<f64>,
    pub energies: JosephsonEnergies,
}

/// Toy-model rows; `lambda = None` means λ = 2π/K.
pub fn toy_rows(a: f64, lambda: Option<f64>, ks: &[usize]) -> Result<Vec<ScalingRow>, CliError> {
    ks.par_iter()
        .map(|&k| {
            let l = lambda.unwrap_or(2.0 * PI / k as f64);
            let amps = toy_amplitudes(C64::new(a, 0.0), l, k)?;
            Ok(ScalingRow {
                k,
                seed: None,
                lambda: Some(l),
                energies: josephson_energies(&amps)?,
            })
        })
        .collect()
}

pub fn random_rows(first_seed: u64, seeds: u64, scale: f64, ks: &[usize]) -> Result<Vec<ScalingRow>, CliError> {
    let jobs: Vec<(usize, u64)> = ks
        .iter()
        .flat_map(|&k| (0..seeds).map(move |i| (k, first_seed + i)))
        .collect();
    jobs.par_iter()
        .map(|&(k, seed)| {
            let amps = random_amplitudes(seed, k, scale)?;
            Ok(ScalingRow {
                k,
                seed: Some(seed),
                lambda: None,
                energies: josephson_energies(&amps)?,
            })
        })
        .collect()
}

pub fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

/// Slope of `log(E_J^i / E_J^c)` against `log K`.
pub fn ratio_slope(rows: &[ScalingRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| ((r.k as f64).ln(), r.energies.ratio().ln()))
        .collect();
    log_log_slope(&pts)
}

/// Same slope with `E_J^c` replaced by its upper bound `2|A| / |1 - e^{iλ}|`,
/// which removes the `|sin(λK/2)|` oscillation.
pub fn envelope_slope(a: f64, rows: &[ScalingRow]) -> f64 {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .map(|r| {
            let l = r.lambda.unwrap_or(0.0);
            let bound = 2.0 * a.abs() / (C64::new(1.0, 0.0) - C64::from_polar(1.0, l)).norm();
            ((r.k as f64).ln(), (r.energies.individual / bound).ln())
        })
        .collect();
    log_log_slope(&pts)
}

pub fn run(ctx: &mut Context, args: &JosephsonArgs) -> Result<bool, CliError> {
    let f = &ctx.file;
    let source = match (args.source, f.source.as_deref()) {
        (Some(s), _) => s,
        (None, Some(s)) => ScalingSource::from_str(s, true).map_err(|_| CliError::Usage(format!("unknown source `{s}`")))?,
        (None, None) => ScalingSource::Toy,
    };
    let per_k = args.lambda_per_k || f.lambda_per_k.unwrap_or(false);
    let lambda = args.lambda.or(f.lambda).unwrap_or(1.0);
    let a = args.a.or(f.a).unwrap_or(1.0);
    let seeds = args.seeds.or(f.seeds).unwrap_or(100);
    let first_seed = args.seed.or(f.seed).unwrap_or(0);
    let scale = args.scale.or(f.scale).unwrap_or(1.0);
    let ks = args.k_list.clone().or(f.k_list.clone()).unwrap_or_else(|| match source {
        ScalingSource::Toy => vec![1_000, 10_000, 100_000, 1_000_000],
        ScalingSource::Random => vec![10_000],
    });
    if ks.is_empty() || ks.contains(&0) {
        return Err(CliError::Usage("--K-list needs positive entries".into()));
    }
    if source == ScalingSource::Random && seeds == 0 {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let rows = match source {
        ScalingSource::Toy => toy_rows(a, (!per_k).then_some(lambda), &ks)?,
        ScalingSource::Random => random_rows(first_seed, seeds, scale, &ks)?,
    };

    let echo = match source {
        ScalingSource::Toy => json!({
            "command": "josephson-scaling", "source": "toy", "A": a,
            "lambda": if per_k { json!("2pi/K") } else { json!(lambda) }, "K-list": ks,
        }),
        ScalingSource::Random => json!({
            "command": "josephson-scaling", "source": "random", "seed": first_seed,
            "seeds": seeds, "scale": scale, "K-list": ks,
        }),
    };
    ctx.echo_config(&echo)?;
    writeln!(ctx.out, "K,seed,lambda,EJ_collective,EJ_individual,ratio")?;
    for r in &rows {
        writeln!(
            ctx.out,
            "{},{},{},{:e},{:e},{:e}",
            r.k,
            r.seed.map(|s| s.to_string()).unwrap_or_default(),
            r.lambda.map(|l| l.to_string()).unwrap_or_default(),
            r.energies.collective,
            r.energies.individual,
            r.energies.ratio()
        )?;
    }

    let mut ok = true;
    match source {
        ScalingSource::Toy if per_k => {
            for r in &rows {
                if r.energies.collective > 1e-9 * r.k as f64 * a.abs() {
                    ok = false;
                    ctx.warn(&format!("K = {}: E_J^c = {:e} does not vanish", r.k, r.energies.collective));
                }
            }
        }
        ScalingSource::Toy if rows.len() >= 2 => {
            writeln!(ctx.out, "# slope_log_ratio_vs_log_K={:.6}", ratio_slope(&rows))?;
            writeln!(ctx.out, "# envelope_slope_log_ratio_vs_log_K={:.6}", envelope_slope(a, &rows))?;
        }
        ScalingSource::Toy => {}
        ScalingSource::Random => {
            for &k in &ks {
                let mut ratios: Vec<f64> = rows.iter().filter(|r| r.k == k).map(|r| r.energies.ratio()).collect();
                writeln!(ctx.out, "# median_ratio K={k} value={:.6}", median(&mut ratios))?;
            }
        }
    }
    Ok(ok)
}
