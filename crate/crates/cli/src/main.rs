//! Command-line driver: presets, sweeps, file ingestion and CSV tables.

mod commands;
mod config;

use clap::{Args, Parser, Subcommand};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

const CONFIG_ERROR: u8 = 2;
const INPUT_ERROR: u8 = 3;
const GOLDEN_MISMATCH: u8 = 4;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Input(String),
    Golden(usize),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Golden(n) => write!(f, "{n} golden value(s) outside tolerance"),
        }
    }
}

impl From<transduction::Error> for CliError {
    fn from(e: transduction::Error) -> Self {
        use transduction::Error as E;
        match e {
            E::Config(_) | E::Domain(_) => CliError::Config(e.to_string()),
            E::Input(_) | E::Numerical(_) | E::Io(_) | E::Csv(_) => CliError::Input(e.to_string()),
        }
    }
}

impl CliError {
    /// A closed stdout pipe (e.g. `| head`) is not an error.
    fn is_broken_pipe(&self) -> bool {
        matches!(self, CliError::Input(m) if m.contains("Broken pipe"))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => CONFIG_ERROR,
            CliError::Input(_) => INPUT_ERROR,
            CliError::Golden(_) => GOLDEN_MISMATCH,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "transduction", version, about = "Microwave-optical transduction models and reference tables")]
#[command(after_help = "Exit codes: 0 ok, 2 config error, 3 input-data error, 4 golden mismatch.\n\
Presets: built-in catalog plus every *.toml file in $TRANSDUCTION_PRESETS.")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// TOML run configuration.
    #[arg(short, long, global = true)]
    pub config: Option<PathBuf>,
    /// Write CSV here instead of stdout.
    #[arg(short, long, global = true)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Success probability and fidelity of an entangling scheme over a sweep.
    #[command(after_help = "Config keys:\n\
  [scheme]  kind = amplitude|onoff|pushpull, cooperativity, loss_ratio (kappa_i/kappa_c;\n\
            default 1 for amplitude, 0 otherwise), gamma_over_kappa_c (default 1e-3)\n\
  [sweep]   param = cooperativity|loss_ratio, from, to, count (>= 2), spacing = lin|log\n\
Output: param,probability,fidelity,r_on_re,r_on_im,r_off_re,r_off_im,detuning_rad_s,model_extension")]
    Scheme(Common),

    /// Retrieval probability and Bell fidelity versus detection time.
    #[command(after_help = "Config keys:\n\
  [retrieval] g_m_over_2pi_hz, kappa_m_over_2pi_hz (optional; matched rate when absent),\n\
              t1_transmon_s, t2_spin_s, tau_s (when no sweep)\n\
  [sweep]     param = tau_s, from, to, count (>= 2), spacing = lin|log\n\
Output: tau_s,gamma_over_2pi_hz,retrieval_probability,p_a,p_d,fidelity,fidelity_kraus")]
    Retrieval(Common),

    /// Heralding rate: optimal detection time per preset, or fixed-time figures.
    #[command(after_help = "Config keys: inline [[protocol]] and [[center]] tables, same keys as preset files:\n\
  [[protocol]] name, center, c_opt, gamma_over_2pi_hz, t_reset_s, t1_transmon_s, t2_spin_s (optional)\n\
Without --preset the rate rows are used, or the spin-location rows with --tau-fixed.\n\
Output: preset,c_opt,gamma_over_2pi_hz,tau_star_s,rate_star_hz,fidelity_star,probability_star\n\
   or with --tau-fixed: preset,c_opt,gamma_over_2pi_hz,tau_s,probability,fidelity\n\
   or with --sweep: tau_s,rate_hz,fidelity,probability")]
    Rate(RateArgs),

    /// Zero-point current and (L, C) from a frequency response, or kinetic inductance.
    #[command(after_help = "Config keys:\n\
  [circuit]   z0_ohm (default 50), tail_extrapolation (default false)\n\
  [resonator] l_h, c_f, c_k_f, z0_ohm, span_half_widths, count   (for --synth)\n\
Input CSV: freq_hz,i_ratio_re,i_ratio_im,s11_re,s11_im\n\
Output: omega_r_hz,delta_i_na,l_ph,c_pf")]
    Circuit(CircuitArgs),

    /// Λ-system population dynamics.
    #[command(after_help = "Config keys:\n\
  [lambda] g_rad_s, kappa_rad_s, gamma1_rad_s, gamma2_rad_s, t_final_s, sample_every (default 100)\n\
Output: t_s,rho11,rho22,rho33,rho44,re_rho34,im_rho34   or with --steady: p_g1,p_g2")]
    Lambda(LambdaArgs),

    /// Optical and magnetic dipoles of catalog centers.
    #[command(after_help = "Config keys: inline [[center]] tables.\n\
Output: center,optical_dipole_debye,linewidth_over_2pi_hz,magnetic_dipole,magnetic_dipole_numeric,g_m_over_2pi_hz")]
    Dipole(DipoleArgs),

    /// Mode volume, optical coupling and cooperativity from a field grid.
    #[command(after_help = "Config keys:\n\
  [mode] center, emitter_m = [x, y, z], kappa_over_2pi_hz, shape = [nx, ny, nz]\n\
Grid files: binary FGRD layout or CSV x_m,y_m,z_m,eps,e2.\n\
Output: volume_m3,u_emitter,g_over_2pi_hz,cooperativity")]
    Mode(ModeArgs),

    /// Recompute every reference value and report pass/fail.
    #[command(after_help = "Output: provenance,quantity,expected,computed,deviation,tolerance,status\n\
Exits 4 if any value is outside tolerance.")]
    Report(ReportArgs),
}

#[derive(Debug, Args)]
pub struct RateArgs {
    #[command(flatten)]
    pub common: Common,
    /// Preset row name; repeatable.
    #[arg(short, long)]
    pub preset: Vec<String>,
    /// Evaluate at a fixed detection time, e.g. 107us.
    #[arg(long, value_parser = config::parse_duration)]
    pub tau_fixed: Option<f64>,
    /// Emit the coarse τ sweep of a single preset.
    #[arg(long, conflicts_with = "tau_fixed")]
    pub sweep: bool,
}

#[derive(Debug, Args)]
pub struct CircuitArgs {
    #[command(flatten)]
    pub common: Common,
    /// Response CSV to analyse.
    pub input: Option<PathBuf>,
    /// Sheet kinetic inductance instead of a response analysis.
    #[arg(long, conflicts_with_all = ["input", "synth"])]
    pub kinetic: bool,
    /// Normal-state sheet resistance, ohm.
    #[arg(long, requires = "kinetic")]
    pub r_sq: Option<f64>,
    /// Superconducting gap, meV.
    #[arg(long, requires = "kinetic")]
    pub gap_mev: Option<f64>,
    /// Temperature, kelvin.
    #[arg(long, requires = "kinetic", default_value_t = 0.0)]
    pub temperature_k: f64,
    /// Write a synthetic response from [resonator] instead of analysing one.
    #[arg(long, conflicts_with = "input")]
    pub synth: bool,
}

#[derive(Debug, Args)]
pub struct LambdaArgs {
    #[command(flatten)]
    pub common: Common,
    /// Print the analytic final populations only.
    #[arg(long)]
    pub steady: bool,
}

#[derive(Debug, Args)]
pub struct DipoleArgs {
    #[command(flatten)]
    pub common: Common,
    /// Center name; repeatable. Defaults to the whole catalog.
    #[arg(long)]
    pub center: Vec<String>,
    /// Zero-point current in nA, for g_m.
    #[arg(long, requires = "distance_nm")]
    pub delta_i_na: Option<f64>,
    /// Spin-to-wire distance in nm, for g_m.
    #[arg(long, requires = "delta_i_na")]
    pub distance_nm: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ModeArgs {
    #[command(flatten)]
    pub common: Common,
    /// Field grid file.
    #[arg(long)]
    pub field_grid: PathBuf,
    /// Resampling shape nx,ny,nz for irregular CSV point clouds.
    #[arg(long, value_parser = config::parse_triple::<usize>)]
    pub shape: Option<[usize; 3]>,
    /// Emitter position x,y,z in metres (default: field maximum).
    #[arg(long, value_parser = config::parse_triple::<f64>, allow_hyphen_values = true)]
    pub emitter: Option<[f64; 3]>,
    /// Center whose dipole and linewidth are used.
    #[arg(long)]
    pub center: Option<String>,
    /// Total optical loss κ/2π in Hz.
    #[arg(long)]
    pub kappa_over_2pi_hz: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub common: Common,
    /// Halve every tolerance.
    #[arg(long)]
    pub strict: bool,
}

fn open_output(common: &Common) -> Result<Box<dyn Write>, CliError> {
    Ok(match &common.output {
        Some(path) => Box::new(BufWriter::new(
            File::create(path).map_err(|e| CliError::Input(format!("cannot create {}: {e}", path.display())))?,
        )),
        None => Box::new(BufWriter::new(std::io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Scheme(c) => commands::scheme(&c, open_output(&c)?),
        Command::Retrieval(c) => commands::retrieval(&c, open_output(&c)?),
        Command::Rate(a) => commands::rate(&a, open_output(&a.common)?),
        Command::Circuit(a) => commands::circuit(&a, open_output(&a.common)?),
        Command::Lambda(a) => commands::lambda(&a, open_output(&a.common)?),
        Command::Dipole(a) => commands::dipole(&a, open_output(&a.common)?),
        Command::Mode(a) => commands::mode(&a, open_output(&a.common)?),
        Command::Report(a) => commands::report(&a, open_output(&a.common)?),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.is_broken_pipe() => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
