mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use modeweaver::wgmodes::ModeId;

use config::{Format, Grid, RunConfig, DEFAULTS_ENV};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "modeweaver",
    version,
    about = "Transverse-mode two-photon interference simulator"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// JSON config file; flags override its values
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for output files (stdout when absent)
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Seed for Poisson counting noise
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Sample counts from Poisson distributions instead of expected values
    #[arg(long, global = true)]
    poisson: bool,
    /// Output format for stdout or files
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
}

#[derive(Subcommand)]
enum Command {
    /// Effective indices over a width or height sweep
    Dispersion(DispersionArgs),
    /// Grating period and splitting ratio for a mode pair
    DesignGrating(GratingArgs),
    /// Splitting ratio and HOM visibility against number of periods
    Splitting(SplittingArgs),
    /// HOM dip between two bus modes
    HomScan(HomScanArgs),
    /// Coalescence peaks after an off-chip splitter on each output
    HomPeak(HomPeakArgs),
    /// Single-photon and two-photon fringes against heater power
    NoonScan(NoonArgs),
    /// Triangular coupler mesh for a unitary or circuit
    Decompose(DecomposeArgs),
    /// Run every experiment and score it against the device measurements
    ReproducePaper,
}

#[derive(Args)]
struct StackArgs {
    /// Core refractive index
    #[arg(long)]
    n_core: Option<f64>,
    /// Cladding refractive index
    #[arg(long)]
    n_clad: Option<f64>,
    /// nm
    #[arg(long)]
    wavelength: Option<f64>,
}

#[derive(Args)]
struct DispersionArgs {
    /// nm, fixed during a height sweep
    #[arg(long)]
    width: Option<f64>,
    /// nm, fixed during a width sweep
    #[arg(long)]
    height: Option<f64>,
    /// nm, start:stop:step or a comma list
    #[arg(long, allow_hyphen_values = true)]
    widths: Option<Grid>,
    /// nm, start:stop:step or a comma list
    #[arg(long, allow_hyphen_values = true)]
    heights: Option<Grid>,
    /// Modes to solve, e.g. TE0,TE1,TE2
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<ModeId>>,
    #[command(flatten)]
    stack: StackArgs,
}

#[derive(Args)]
struct GratingArgs {
    /// nm
    #[arg(long)]
    width: Option<f64>,
    /// nm
    #[arg(long)]
    height: Option<f64>,
    /// Two modes, e.g. TE0,TE2
    #[arg(long, value_delimiter = ',', num_args = 1)]
    modes: Option<Vec<ModeId>>,
    /// nm
    #[arg(long)]
    depth: Option<f64>,
    /// Number of grating periods
    #[arg(long)]
    periods: Option<u32>,
    /// rad per period
    #[arg(long)]
    kappa: Option<f64>,
    #[command(flatten)]
    stack: StackArgs,
}

#[derive(Args)]
struct SplittingArgs {
    /// rad per period
    #[arg(long)]
    kappa: Option<f64>,
    /// start:stop:step or a comma list
    #[arg(long, allow_hyphen_values = true)]
    periods: Option<Grid>,
    /// Intrinsic two-photon overlap
    #[arg(long)]
    overlap: Option<f64>,
}

#[derive(Args)]
struct HomScanArgs {
    /// Grating splitting ratio
    #[arg(long)]
    eta: Option<f64>,
    /// Two modes, e.g. TE0,TE2
    #[arg(long, value_delimiter = ',')]
    modes: Option<Vec<ModeId>>,
    /// µm, start:stop:step or a comma list
    #[arg(long, allow_hyphen_values = true)]
    delays: Option<Grid>,
    /// Intrinsic two-photon overlap
    #[arg(long)]
    overlap: Option<f64>,
}

#[derive(Args)]
struct HomPeakArgs {
    /// Grating splitting ratio
    #[arg(long)]
    eta: Option<f64>,
    /// µm, start:stop:step or a comma list
    #[arg(long, allow_hyphen_values = true)]
    delays: Option<Grid>,
    /// Intrinsic two-photon overlap
    #[arg(long)]
    overlap: Option<f64>,
}

#[derive(Args)]
struct NoonArgs {
    /// First grating splitting ratio
    #[arg(long)]
    eta1: Option<f64>,
    /// Second grating splitting ratio
    #[arg(long)]
    eta2: Option<f64>,
    /// W, start:stop:step or a comma list
    #[arg(long, allow_hyphen_values = true)]
    powers: Option<Grid>,
    /// W per 2π of heater phase
    #[arg(long)]
    power_per_2pi: Option<f64>,
    /// Intrinsic two-photon overlap
    #[arg(long)]
    overlap: Option<f64>,
}

#[derive(Args)]
struct DecomposeArgs {
    /// JSON file with `re` and `im` row lists
    #[arg(long)]
    unitary: Option<PathBuf>,
}

fn usage_error(subcommand: &str, message: impl Into<String>) -> CliError {
    let mut cmd = Cli::command();
    cmd.build();
    let usage = cmd
        .find_subcommand_mut(subcommand)
        .map(|c| c.render_usage().to_string())
        .unwrap_or_else(|| cmd.render_usage().to_string());
    CliError::Usage {
        message: message.into(),
        usage,
    }
}

fn grid_values(subcommand: &str, grid: &Grid) -> Result<Vec<f64>, CliError> {
    grid.values().map_err(|m| usage_error(subcommand, m))
}

fn pair(subcommand: &str, modes: Vec<ModeId>) -> Result<(ModeId, ModeId), CliError> {
    match modes.as_slice() {
        [a, b] => Ok((*a, *b)),
        _ => Err(usage_error(subcommand, "--modes takes exactly two modes")),
    }
}

fn overlay_stack(cfg: (&mut Option<f64>, &mut Option<f64>, &mut Option<f64>), args: StackArgs) {
    if args.n_core.is_some() {
        *cfg.0 = args.n_core;
    }
    if args.n_clad.is_some() {
        *cfg.1 = args.n_clad;
    }
    if args.wavelength.is_some() {
        *cfg.2 = args.wavelength;
    }
}

fn set<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn run(cli: Cli) -> Result<commands::Outcome, CliError> {
    let defaults = std::env::var_os(DEFAULTS_ENV).map(PathBuf::from);
    let mut cfg: RunConfig = config::load(defaults.as_deref(), cli.global.config.as_deref())?;
    let g = cli.global;
    if g.output.is_some() {
        cfg.output = g.output;
    }
    if g.seed.is_some() {
        cfg.seed = g.seed;
    }
    cfg.poisson |= g.poisson;
    if g.format.is_some() {
        cfg.format = g.format;
    }

    match cli.command {
        Command::Dispersion(a) => {
            let c = &mut cfg.dispersion;
            set(&mut c.width, a.width);
            set(&mut c.height, a.height);
            if a.widths.is_some() {
                c.widths = a.widths;
            }
            if a.heights.is_some() {
                c.heights = a.heights;
            }
            set(&mut c.modes, a.modes);
            overlay_stack((&mut c.n_core, &mut c.n_clad, &mut c.wavelength), a.stack);
            let sweep = match (&c.widths, &c.heights) {
                (Some(w), None) => commands::Sweep::Width(grid_values("dispersion", w)?),
                (None, Some(h)) => commands::Sweep::Height(grid_values("dispersion", h)?),
                (None, None) => {
                    return Err(usage_error("dispersion", "missing --widths or --heights"))
                }
                (Some(_), Some(_)) => {
                    return Err(usage_error(
                        "dispersion",
                        "--widths and --heights are exclusive",
                    ))
                }
            };
            commands::dispersion(&cfg, sweep)
        }
        Command::DesignGrating(a) => {
            let c = &mut cfg.design_grating;
            set(&mut c.width, a.width);
            set(&mut c.height, a.height);
            if let Some(m) = a.modes {
                c.modes = pair("design-grating", m)?;
            }
            set(&mut c.depth, a.depth);
            set(&mut c.periods, a.periods);
            if a.kappa.is_some() {
                c.kappa = a.kappa;
            }
            overlay_stack((&mut c.n_core, &mut c.n_clad, &mut c.wavelength), a.stack);
            commands::design_grating(&cfg)
        }
        Command::Splitting(a) => {
            let c = &mut cfg.splitting;
            set(&mut c.kappa, a.kappa);
            set(&mut c.periods, a.periods);
            set(&mut c.overlap, a.overlap);
            let periods = grid_values("splitting", &c.periods)?;
            if periods
                .iter()
                .any(|p| *p < 0.0 || p.fract() != 0.0 || *p > u32::MAX as f64)
            {
                return Err(usage_error(
                    "splitting",
                    "--periods must be non-negative integers",
                ));
            }
            let periods: Vec<u32> = periods.iter().map(|p| *p as u32).collect();
            commands::splitting(&cfg, &periods)
        }
        Command::HomScan(a) => {
            let c = &mut cfg.hom_scan;
            set(&mut c.eta, a.eta);
            if let Some(m) = a.modes {
                c.mode_pair = pair("hom-scan", m)?;
            }
            if let Some(d) = a.delays {
                c.delays = grid_values("hom-scan", &d)?;
            }
            set(&mut c.source.intrinsic_overlap, a.overlap);
            commands::hom_scan(&cfg)
        }
        Command::HomPeak(a) => {
            let c = &mut cfg.hom_peak;
            set(&mut c.eta, a.eta);
            if let Some(d) = a.delays {
                c.delays = grid_values("hom-peak", &d)?;
            }
            set(&mut c.source.intrinsic_overlap, a.overlap);
            commands::hom_peak(&cfg)
        }
        Command::NoonScan(a) => {
            let c = &mut cfg.noon_scan;
            set(&mut c.eta1, a.eta1);
            set(&mut c.eta2, a.eta2);
            if let Some(p) = a.powers {
                c.powers = grid_values("noon-scan", &p)?;
            }
            set(&mut c.heater.power_per_2pi, a.power_per_2pi);
            set(&mut c.source.intrinsic_overlap, a.overlap);
            commands::noon_scan(&cfg)
        }
        Command::Decompose(a) => {
            if let Some(path) = a.unitary {
                let text = std::fs::read_to_string(&path).map_err(|e| {
                    CliError::Config(format!("cannot read {}: {e}", path.display()))
                })?;
                let spec = serde_json::from_str(&text)
                    .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
                cfg.decompose.unitary = Some(spec);
                cfg.decompose.circuit = None;
            }
            commands::decompose(&cfg)
        }
        Command::ReproducePaper => {
            if cfg.output.is_none() {
                return Err(usage_error("reproduce-paper", "--output <DIR> is required"));
            }
            commands::reproduce_paper(&cfg)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(commands::Outcome::Success) => ExitCode::SUCCESS,
        Ok(commands::Outcome::TargetsFailed(names)) => {
            eprintln!("targets outside tolerance: {}", names.join(", "));
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
