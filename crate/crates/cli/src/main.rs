//! `weyl-lab` command-line front end.
//!
//! Exit codes: 0 success or PASS, 2 parse or usage error, 3 numeric failure,
//! 10 FAIL, 11 INCONCLUSIVE.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use weyl_lab::fock::QuantMethod;

use config::{Format, RunConfig};

pub const EXIT_USAGE: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;
pub const EXIT_FAIL: u8 = 10;
pub const EXIT_INCONCLUSIVE: u8 = 11;

/// An error carrying its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: String) -> Failure {
        Failure { code: EXIT_USAGE, message }
    }

    pub fn numeric(message: String) -> Failure {
        Failure { code: EXIT_NUMERIC, message }
    }
}

impl From<weyl_lab::Error> for Failure {
    fn from(e: weyl_lab::Error) -> Failure {
        let code =
            if e.is_parse_error() || matches!(e, weyl_lab::Error::InvalidInput(_)) { EXIT_USAGE } else { EXIT_NUMERIC };
        Failure { code, message: e.to_string() }
    }
}

#[derive(Parser)]
#[command(name = "weyl-lab", version, about = "Weyl quantization and self-adjointness diagnostics")]
struct Cli {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (falls back to WEYL_LAB_WORKERS).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct SymbolArgs {
    /// Symbol text, e.g. "x^2 + xi^2" or "[[cos(x), 1], [1, xi^2]]".
    #[arg(long)]
    symbol: String,
    /// Number of modes.
    #[arg(long)]
    d: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Weyl-quantize a symbol on a truncated Fock basis.
    Quantize {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run all self-adjointness diagnostics and write a report.
    Check {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the boundary-condition eigenvalue table, when it ran.
        #[arg(long)]
        bc_csv: Option<PathBuf>,
    },
    /// Eigenvalues of a hermitian quantization as CSV.
    Spectrum {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long, value_enum)]
        method: Option<MethodArg>,
        /// Number of lowest eigenvalues to write.
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Finite-difference spectra of -d^2/dx^2 + V under Dirichlet and Neumann conditions.
    Bc {
        #[arg(long)]
        potential: String,
        #[arg(long = "L", value_delimiter = ',')]
        half_widths: Option<Vec<f64>>,
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long)]
        levels: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Full table with discrepancies and verdict.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Toeplitz quantization, optionally checked against the heat-transformed Weyl quantization.
    Toeplitz {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long = "N")]
        n: Option<usize>,
        #[arg(long = "M")]
        m: Option<usize>,
        #[arg(long)]
        verify_heat: bool,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Windowed Fourier estimate of the M^{inf,1} norm.
    Mnorm {
        #[arg(long, required_unless_present = "sampled", conflicts_with = "sampled")]
        symbol: Option<String>,
        /// Binary sampled symbol; its sidecar is read from `<file>.json`.
        #[arg(long)]
        sampled: Option<PathBuf>,
        #[arg(long)]
        window: Option<f64>,
        #[arg(long)]
        half_width: Option<f64>,
        #[arg(long)]
        points: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a symbol on a regular grid into the binary format plus a JSON sidecar.
    Sample {
        #[command(flatten)]
        sym: SymbolArgs,
        #[arg(long, default_value_t = 8.0)]
        half_width: f64,
        #[arg(long, default_value_t = 64)]
        points: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Brute-force reference values next to the fast-path results.
    Oracle {
        #[command(subcommand)]
        which: OracleCommand,
    },
}

#[derive(Subcommand, Clone)]
pub enum OracleCommand {
    /// Matrix element of Q (or P) between Hermite functions.
    LadderEntry {
        #[arg(long)]
        row: usize,
        #[arg(long)]
        col: usize,
        #[arg(long)]
        momentum: bool,
    },
    /// Matrix element of the kernel quantization.
    KernelElement {
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        row: usize,
        #[arg(long)]
        col: usize,
    },
    /// Matrix element of the Toeplitz quantization.
    ToeplitzEntry {
        #[arg(long)]
        symbol: String,
        #[arg(long)]
        row: usize,
        #[arg(long)]
        col: usize,
    },
    /// Heat transform at the calibrated time at one point.
    HeatValue {
        #[arg(long)]
        symbol: String,
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,
    },
    /// Matrix element of the Weyl operator W_z.
    WeylEntry {
        #[arg(long, allow_hyphen_values = true)]
        x: f64,
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,
        #[arg(long)]
        row: usize,
        #[arg(long)]
        col: usize,
    },
    /// Overlap of two coherent states.
    CoherentOverlap {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        z: Vec<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        w: Vec<f64>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum MethodArg {
    Monomial,
    Kernel,
    Auto,
}

impl From<MethodArg> for QuantMethod {
    fn from(m: MethodArg) -> QuantMethod {
        match m {
            MethodArg::Monomial => QuantMethod::Monomial,
            MethodArg::Kernel => QuantMethod::Kernel,
            MethodArg::Auto => QuantMethod::Auto,
        }
    }
}

fn set<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

fn install_workers(cfg: &RunConfig) -> Result<(), Failure> {
    let from_env = match std::env::var("WEYL_LAB_WORKERS") {
        Ok(v) => Some(
            v.trim()
                .parse::<usize>()
                .ok()
                .filter(|&n| n > 0)
                .ok_or_else(|| Failure::usage(format!("WEYL_LAB_WORKERS must be a positive integer, got `{v}`")))?,
        ),
        Err(_) => None,
    };
    if let Some(n) = cfg.workers.or(from_env) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::numeric(format!("cannot start {n} workers: {e}")))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    set(&mut cfg.workers, cli.workers);
    match &cli.command {
        Command::Quantize { sym, n, method, format, .. } => {
            set(&mut cfg.d, sym.d);
            set(&mut cfg.n, *n);
            set(&mut cfg.method, method.map(Into::into));
            set(&mut cfg.format, *format);
        }
        Command::Check { sym, .. } | Command::Sample { sym, .. } => set(&mut cfg.d, sym.d),
        Command::Spectrum { sym, n, method, levels, .. } => {
            set(&mut cfg.d, sym.d);
            set(&mut cfg.n, *n);
            set(&mut cfg.method, method.map(Into::into));
            set(&mut cfg.levels, *levels);
        }
        Command::Bc { half_widths, grid, levels, .. } => {
            let mut bc = cfg.bc.clone().unwrap_or_default();
            if let Some(l) = half_widths {
                bc.half_widths = l.clone();
            }
            if let Some(g) = grid {
                bc.grid = *g;
            }
            if let Some(l) = levels {
                bc.levels = *l;
            }
            cfg.bc = Some(bc);
        }
        Command::Toeplitz { sym, n, m, tolerance, format, .. } => {
            set(&mut cfg.d, sym.d);
            set(&mut cfg.n, *n);
            set(&mut cfg.m, *m);
            set(&mut cfg.tolerance, *tolerance);
            set(&mut cfg.format, *format);
        }
        Command::Mnorm { window, half_width, points, .. } => {
            let mut mn = cfg.mnorm.unwrap_or_default();
            if let Some(w) = window {
                mn.window_width = *w;
            }
            if let Some(r) = half_width {
                mn.half_width = *r;
            }
            if let Some(p) = points {
                mn.points_per_axis = *p;
            }
            cfg.mnorm = Some(mn);
        }
        Command::Oracle { .. } => {}
    }
    cfg.validate()?;
    install_workers(&cfg)?;

    match cli.command {
        Command::Quantize { sym, out, .. } => commands::quantize_cmd(&cfg, &sym.symbol, out.as_deref()),
        Command::Check { sym, out, bc_csv } => commands::check(&cfg, &sym.symbol, out.as_deref(), bc_csv.as_deref()),
        Command::Spectrum { sym, out, .. } => commands::spectrum(&cfg, &sym.symbol, out.as_deref()),
        Command::Bc { potential, out, json, .. } => commands::bc(&cfg, &potential, out.as_deref(), json.as_deref()),
        Command::Toeplitz { sym, verify_heat, out, .. } => {
            commands::toeplitz(&cfg, &sym.symbol, verify_heat, out.as_deref())
        }
        Command::Mnorm { symbol, sampled, out, .. } => {
            commands::mnorm(&cfg, symbol.as_deref(), sampled.as_deref(), out.as_deref())
        }
        Command::Sample { sym, half_width, points, out } => {
            commands::sample(&cfg, &sym.symbol, half_width, points, &out)
        }
        Command::Oracle { which } => commands::oracle(&which),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
