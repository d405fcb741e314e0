pub mod band;
pub mod bloch;
pub mod josephson;
pub mod oracle;
pub mod spectrum;

use clap::{Args, ValueEnum};
use cpb_core::model::{random_amplitudes, toy_amplitudes, TunnelingAmplitudes};
use cpb_core::C64;
use serde_json::json;

use crate::config::FileConfig;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AmpSource {
    Constant,
    Toy,
    Random,
    File,
}

/// Where the tunneling amplitudes `β_k` come from. Exactly one source is used.
#[derive(Clone, Debug, Default, Args)]
pub struct AmpArgs {
    /// Tunneling amplitude source.
    #[arg(long, value_enum)]
    pub amps: Option<AmpSource>,
    /// Amplitude A for constant and toy sources.
    #[arg(long = "A")]
    pub a: Option<f64>,
    /// Phase step λ of the toy source.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Seed of the random source.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Root-mean-square |β_k| of the random source.
    #[arg(long)]
    pub scale: Option<f64>,
    /// Text file with one amplitude per line (`re`, `re im` or `re,im`).
    #[arg(long = "amp-file")]
    pub amp_file: Option<String>,
}

impl AmpArgs {
    /// Builds `k_sites` amplitudes and a JSON echo of the resolved source.
    pub fn resolve(
        &self,
        file: &FileConfig,
        k_sites: usize,
        default: AmpSource,
    ) -> Result<(TunnelingAmplitudes, serde_json::Value), CliError> {
        let source = match (self.amps, file.amps.as_deref()) {
            (Some(s), _) => s,
            (None, Some(s)) => AmpSource::from_str(s, true)
                .map_err(|_| CliError::Usage(format!("unknown amplitude source `{s}`")))?,
            (None, None) => default,
        };
        let a = self.a.or(file.a).unwrap_or(1.0);
        let lambda = self.lambda.or(file.lambda).unwrap_or(1.0);
        let seed = self.seed.or(file.seed).unwrap_or(1);
        let scale = self.scale.or(file.scale).unwrap_or(1.0);
        let (amps, echo) = match source {
            AmpSource::Constant => (
                TunnelingAmplitudes::constant(C64::new(a, 0.0), k_sites)?,
                json!({"source": "constant", "A": a}),
            ),
            AmpSource::Toy => (
                toy_amplitudes(C64::new(a, 0.0), lambda, k_sites)?,
                json!({"source": "toy", "A": a, "lambda": lambda}),
            ),
            AmpSource::Random => (
                random_amplitudes(seed, k_sites, scale)?,
                json!({"source": "random", "seed": seed, "scale": scale}),
            ),
            AmpSource::File => {
                let path = self
                    .amp_file
                    .clone()
                    .or(file.amp_file.clone())
                    .ok_or_else(|| CliError::Usage("--amps file needs --amp-file".into()))?;
                let text = std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
                let amps = TunnelingAmplitudes::parse_text(&text).map_err(|e| CliError::Usage(format!("{path}: {e}")))?;
                if amps.len() != k_sites {
                    return Err(CliError::Usage(format!(
                        "{path} holds {} amplitudes, K = {k_sites}",
                        amps.len()
                    )));
                }
                (amps, json!({"source": "file", "amp-file": path}))
            }
        };
        Ok((amps, echo))
    }
}

/// Row-ordered `n` points from `from` to `to`; a single point sits at `from`.
pub fn linspace(from: f64, to: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![from];
    }
    (0..n).map(|i| from + (to - from) * i as f64 / (n - 1) as f64).collect()
}
