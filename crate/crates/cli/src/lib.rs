//! `cpb`: command-line driver producing CSV and text artifacts from the
//! Cooper pair box model.
//!
//! Exit codes: 0 success, 1 usage or validation error, 2 a scientific check
//! failed.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cpb_core::model::ModelParams;

pub mod commands;
pub mod config;

use config::FileConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_SCIENCE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "cpb", version, about = "Cooper pair box as a many-spin BCS system")]
pub struct Cli {
    /// TOML file with flat keys named after the long flags.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Energy unit of the output: multiples of E_C, or raw input units.
    #[arg(long, global = true, value_enum)]
    pub units: Option<Units>,
    /// Write to a file instead of stdout.
    #[arg(long, short, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Exact island spectrum with (j, m) labels and closed-form energies.
    Spectrum(commands::spectrum::SpectrumArgs),
    /// Qubit levels -ω/2, E/2 and +ω/2 over a gate-charge sweep.
    BandDiagram(commands::band::BandArgs),
    /// Collective and individual Josephson energies against K.
    JosephsonScaling(commands::josephson::JosephsonArgs),
    /// Bloch-equation trajectory with leakage.
    Bloch(commands::bloch::BlochArgs),
    /// Full exact-diagonalisation verification report.
    Oracle(commands::oracle::OracleArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Units {
    Ec,
    Raw,
}

/// Island parameters shared by the spectrum and oracle commands.
#[derive(Clone, Debug, Default, Args)]
pub struct ModelArgs {
    /// Number of electron levels (even).
    #[arg(long = "K")]
    pub k: Option<usize>,
    /// Pairing energy g.
    #[arg(long)]
    pub g: Option<f64>,
    /// Charging energy E_C.
    #[arg(long = "Ec")]
    pub ec: Option<f64>,
    /// Mean pair number offset m̄.
    #[arg(long, conflicts_with = "ng")]
    pub mbar: Option<f64>,
    /// Gate charge n_g (alternative to --mbar, needs E_C > 0).
    #[arg(long)]
    pub ng: Option<f64>,
    /// Reference pair number m0.
    #[arg(long)]
    pub m0: Option<i64>,
}

pub struct ModelDefaults {
    pub k: usize,
    pub g: f64,
    pub ec: f64,
    pub charge: Charge,
}

#[derive(Clone, Copy, Debug)]
pub enum Charge {
    Mbar(f64),
    Ng(f64),
}

impl ModelArgs {
    pub fn resolve(&self, file: &FileConfig, d: ModelDefaults) -> Result<ModelParams, CliError> {
        let k = self.k.or(file.k).unwrap_or(d.k);
        let g = self.g.or(file.g).unwrap_or(d.g);
        let ec = self.ec.or(file.ec).unwrap_or(d.ec);
        let m0 = self.m0.or(file.m0).unwrap_or(0);
        let charge = self
            .mbar
            .map(Charge::Mbar)
            .or(self.ng.map(Charge::Ng))
            .or(file.mbar.map(Charge::Mbar))
            .or(file.ng.map(Charge::Ng))
            .unwrap_or(d.charge);
        let p = match charge {
            Charge::Mbar(mbar) => ModelParams::new(k, g, ec, mbar, m0),
            Charge::Ng(ng) => ModelParams::from_gate_charge(k, g, ec, ng, m0),
        };
        Ok(p?)
    }
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Science(String),
}

impl From<cpb_core::Error> for CliError {
    fn from(e: cpb_core::Error) -> Self {
        use cpb_core::Error as E;
        match e {
            E::Validation(_) | E::Resource { .. } | E::Parse { .. } | E::DegenerateFrame(_) => Self::Usage(e.to_string()),
            _ => Self::Science(e.to_string()),
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        Self::Usage(format!("i/o error: {e}"))
    }
}

/// Everything a command needs besides its own arguments.
pub struct Context<'a> {
    pub file: FileConfig,
    pub units: Units,
    pub out: &'a mut dyn Write,
    pub err: &'a mut dyn Write,
}

impl Context<'_> {
    /// Divisor turning raw energies into output units. `ec` units fall back
    /// to raw when `E_C = 0`.
    pub fn energy_unit(&mut self, e_c: f64) -> f64 {
        match self.units {
            Units::Ec if e_c > 0.0 => e_c,
            Units::Ec => {
                let _ = writeln!(self.err, "note: E_C = 0, reporting raw energies");
                1.0
            }
            Units::Raw => 1.0,
        }
    }

    pub fn unit_name(&self, e_c: f64) -> &'static str {
        match self.units {
            Units::Ec if e_c > 0.0 => "Ec",
            _ => "raw",
        }
    }

    /// `# config {...}` line preceding every CSV.
    pub fn echo_config(&mut self, config: &serde_json::Value) -> io::Result<()> {
        writeln!(self.out, "# config {config}")
    }

    pub fn warn(&mut self, msg: &str) {
        let _ = writeln!(self.err, "warning: {msg}");
    }
}

fn resolve_units(cli: Option<Units>, file: &FileConfig) -> Result<Units, CliError> {
    if let Some(u) = cli {
        return Ok(u);
    }
    match file.units.as_deref() {
        None => Ok(Units::Ec),
        Some(s) => Units::from_str(s, true).map_err(|_| CliError::Usage(format!("units must be `ec` or `raw`, got `{s}`"))),
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(stderr, "{text}")
            } else {
                write!(stdout, "{text}")
            };
            return code;
        }
    };
    match execute(cli, stdout, stderr) {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_SCIENCE,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_USAGE
        }
        Err(CliError::Science(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_SCIENCE
        }
    }
}

fn execute(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(path) => FileConfig::load(path).map_err(CliError::Usage)?,
        None => FileConfig::default(),
    };
    let units = resolve_units(cli.units, &file)?;
    let mut sink: Box<dyn Write + '_> = match &cli.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?,
        )),
        None => Box::new(stdout),
    };
    let mut ctx = Context {
        file,
        units,
        out: &mut *sink,
        err: stderr,
    };
    let passed = match &cli.command {
        Command::Spectrum(a) => commands::spectrum::run(&mut ctx, a),
        Command::BandDiagram(a) => commands::band::run(&mut ctx, a),
        Command::JosephsonScaling(a) => commands::josephson::run(&mut ctx, a),
        Command::Bloch(a) => commands::bloch::run(&mut ctx, a),
        Command::Oracle(a) => commands::oracle::run(&mut ctx, a),
    }?;
    ctx.out.flush()?;
    Ok(passed)
}
