use bell_mdl::correlation::TSIRELSON_ANGLES;
use bell_mdl::report::commands::{self, CommandOutput, Method, Source};
use bell_mdl::report::config::parse_gamma_list;
use bell_mdl::report::{OutputFormat, RunConfig, CONFIG_ENV};
use bell_mdl::{Error, Result};
use clap::{Args, Parser, Subcommand};
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Measurement-dependent hidden-variable models for the singlet state.
#[derive(Debug, Parser)]
#[command(name = "bell-mdl", version)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// Directory for data files and charts
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Output format: csv or json
    #[arg(long, global = true)]
    format: Option<String>,

    /// Config file (key = value lines); defaults to $BELL_MDL_CONFIG
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for Monte Carlo runs
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Relative quadrature tolerance
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve c1, c2 for one setting angle and family member
    Coeffs {
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        gamma: f64,
    },
    /// Coefficient curves over a φ grid, one per γ
    Figure1 {
        /// γ values: a list "a,b,c" or a range "start:stop:step"
        #[arg(long, allow_hyphen_values = true)]
        gammas: Option<String>,
        /// φ = kπ/steps for k = 1 … steps−1
        #[arg(long)]
        phi_steps: Option<usize>,
    },
    /// Correlation E(φ) by quadrature or Monte Carlo
    Correlate {
        #[arg(long, allow_hyphen_values = true, default_value_t = FRAC_PI_4)]
        phi: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value = "quad")]
        method: String,
        /// Accepted Monte Carlo samples
        #[arg(long)]
        n: Option<usize>,
    },
    /// Bell's original inequality |E(xy) − E(xz)| ≤ 1 + E(yz)
    Bell {
        #[arg(long, allow_hyphen_values = true, default_value_t = FRAC_PI_2)]
        phi_xy: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = FRAC_PI_4)]
        phi_xz: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = FRAC_PI_4)]
        phi_yz: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        gamma: f64,
        /// quantum, model or both
        #[arg(long, default_value = "both")]
        source: String,
    },
    /// CHSH combination; defaults to the Tsirelson angles
    Chsh {
        /// Four relative angles ab,ab',a'b,a'b'
        #[arg(long, value_delimiter = ',', num_args = 4, allow_hyphen_values = true)]
        angles: Option<Vec<f64>>,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        gamma: f64,
        #[arg(long, default_value = "both")]
        source: String,
    },
    /// Distance between the densities at two setting angles
    Distance {
        #[arg(long, allow_hyphen_values = true)]
        phi_a: f64,
        #[arg(long, allow_hyphen_values = true)]
        phi_b: f64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 0.0)]
        gamma: f64,
    },
    /// Maximum distance for one γ, or a γ scan written as data + chart
    Dmax {
        #[arg(long, allow_hyphen_values = true, conflicts_with = "scan")]
        gamma: Option<f64>,
        /// "start:stop:step" or "a,b,c"
        #[arg(long, allow_hyphen_values = true)]
        scan: Option<String>,
        #[arg(long)]
        grid_n: Option<usize>,
        #[arg(long)]
        refine_tol: Option<f64>,
    },
    /// Closed-form γ = 0 maximum from the stationarity equation
    #[command(name = "gamma0-analytic")]
    Gamma0Analytic,
}

fn load_config(global: &GlobalArgs) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let path = global
        .config
        .clone()
        .or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
    if let Some(p) = path {
        cfg.apply_file(&p)?;
    }
    if let Some(o) = &global.out {
        cfg.out_dir = o.clone();
    }
    if let Some(f) = &global.format {
        cfg.format = f.parse::<OutputFormat>()?;
    }
    if let Some(s) = global.seed {
        cfg.seed = s;
    }
    if let Some(t) = global.tol {
        cfg.quad.rel_tol = t;
    }
    Ok(cfg)
}

fn run(cli: Cli) -> Result<CommandOutput> {
    let mut cfg = load_config(&cli.global)?;
    let out = match cli.command {
        Command::Coeffs { phi, gamma } => {
            cfg.validate()?;
            commands::coeffs(&cfg, phi, gamma)?.into()
        }
        Command::Figure1 { gammas, phi_steps } => {
            if let Some(g) = gammas {
                cfg.gammas = parse_gamma_list(&g)?;
            }
            if let Some(s) = phi_steps {
                cfg.phi_steps = s;
            }
            cfg.validate()?;
            commands::figure1(&cfg)?
        }
        Command::Correlate { phi, gamma, method, n } => {
            if let Some(n) = n {
                cfg.mc_samples = n;
            }
            cfg.validate()?;
            commands::correlate(&cfg, phi, gamma, method.parse::<Method>()?, cfg.mc_samples)?.into()
        }
        Command::Bell { phi_xy, phi_xz, phi_yz, gamma, source } => {
            cfg.validate()?;
            commands::bell(&cfg, [phi_xy, phi_xz, phi_yz], gamma, source.parse::<Source>()?)?.into()
        }
        Command::Chsh { angles, gamma, source } => {
            cfg.validate()?;
            let angles = match angles {
                Some(v) => <[f64; 4]>::try_from(v).map_err(|_| Error::Domain("--angles takes four values".into()))?,
                None => TSIRELSON_ANGLES,
            };
            commands::chsh(&cfg, angles, gamma, source.parse::<Source>()?)?.into()
        }
        Command::Distance { phi_a, phi_b, gamma } => {
            cfg.validate()?;
            commands::distance(&cfg, phi_a, phi_b, gamma)?.into()
        }
        Command::Dmax { gamma, scan, grid_n, refine_tol } => {
            if let Some(n) = grid_n {
                cfg.grid_n = n;
            }
            if let Some(t) = refine_tol {
                cfg.refine_tol = t;
            }
            cfg.validate()?;
            match scan {
                Some(s) => {
                    let gammas = parse_gamma_list(&s)?;
                    commands::dmax_scan(&cfg, &gammas)?
                }
                None => commands::dmax_single(&cfg, gamma.unwrap_or(0.0))?.into(),
            }
        }
        Command::Gamma0Analytic => commands::gamma0_analytic()?.into(),
    };
    let text = out.table.render(cfg.format)?;
    std::io::stdout().lock().write_all(text.as_bytes())?;
    Ok(out)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
