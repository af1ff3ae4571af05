//! `roughvar`: command-line front end.
//!
//! Results go to standard output in the chosen format; diagnostics and
//! errors go to standard error. On failure the process exits with the
//! numeric error code and prints the symbolic one.

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use roughvar::error::{Error, Result};
use roughvar::main_term::Method;
use roughvar::report::{self, Flags, Format, Table};

/// Environment variable consulted when `--threads` is absent.
const THREADS_ENV: &str = "ROUGHVAR_THREADS";

#[derive(Parser, Debug)]
#[command(name = "roughvar", version, about = "Variance of rough numbers in short intervals")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = OutFormat::Table, global = true)]
    format: OutFormat,
    /// Worker threads (default: ROUGHVAR_THREADS, else all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Exponent slack in y >= (log H)^(1+eps).
    #[arg(long, default_value_t = 0.1, global = true)]
    eps: f64,
    /// Slack in the sieve condition.
    #[arg(long, default_value_t = 0.1, global = true)]
    delta: f64,
    /// Run even when the range check fails.
    #[arg(long, global = true)]
    force: bool,
    /// Append wall-clock time per row (output is then not reproducible).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum OutFormat {
    Csv,
    Json,
    Table,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum MethodArg {
    Direct,
    Correlation,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact variance V(X, H, y) by sliding windows.
    Variance {
        #[arg(long = "X", value_parser = int)]
        x: u64,
        #[arg(long = "H", value_parser = int)]
        h: u64,
        #[arg(long, value_parser = int)]
        y: u64,
    },
    /// Exact main term M(H, y).
    Mainterm {
        #[arg(long = "H", value_parser = int)]
        h: u64,
        #[arg(long, value_parser = int)]
        y: u64,
        #[arg(long, value_enum, default_value_t = MethodArg::Correlation)]
        method: MethodArg,
    },
    /// Closed-form variance of totatives of a squarefree q.
    Vq {
        #[arg(long, value_parser = int)]
        q: u64,
        #[arg(long = "H", value_parser = int)]
        h: u64,
    },
    /// Friable counts with Dickman and saddle-point estimates.
    Friable {
        #[arg(long = "X", value_parser = int)]
        x: u64,
        #[arg(long, value_parser = int)]
        y: u64,
    },
    /// Saddle point alpha(x, y).
    Saddle {
        #[arg(long = "X")]
        x: f64,
        #[arg(long, value_parser = int)]
        y: u64,
    },
    /// The integral on the saddle line against H(alpha) zeta(alpha-1)/(alpha-1) Psi.
    SaddleLine {
        #[arg(long = "X", value_parser = int)]
        x: u64,
        #[arg(long, value_parser = int)]
        y: u64,
    },
    /// Numerical contour integral I_c(x, y) against its exact value.
    Contour {
        #[arg(long = "X")]
        x: f64,
        #[arg(long, value_parser = int)]
        y: u64,
        #[arg(long, default_value_t = 0.75)]
        c: f64,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// V(X, H, y) / M(H, y) along a list of X.
    Converge {
        #[arg(long = "H", value_parser = int)]
        h: u64,
        #[arg(long, value_parser = int)]
        y: u64,
        /// Comma-separated; `1e8` is accepted.
        #[arg(long = "X")]
        x: String,
    },
    /// M(H, y) against the asymptotic of its regime.
    Regimes {
        /// `H:y,H:y,...`; without it the built-in rays are used.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long = "H", value_parser = int, requires = "y")]
        h: Option<u64>,
        #[arg(long, value_parser = int)]
        y: Option<u64>,
    },
}

fn int(s: &str) -> std::result::Result<u64, String> {
    report::parse_int(s).map_err(|e| e.to_string())
}

fn thread_count(flag: Option<usize>) -> Result<usize> {
    if let Some(n) = flag {
        return if n == 0 { Err(Error::InvalidInput("--threads must be at least 1".into())) } else { Ok(n) };
    }
    if let Ok(v) = std::env::var(THREADS_ENV) {
        return match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(Error::InvalidInput(format!("{THREADS_ENV}={v:?} is not a positive integer"))),
        };
    }
    Ok(std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1))
}

fn run(cli: Cli) -> Result<String> {
    let c = &cli.common;
    let flags = Flags { threads: thread_count(c.threads)?, epsilon: c.eps, delta: c.delta, force: c.force, timing: c.timing };
    let format = match c.format {
        OutFormat::Csv => Format::Csv,
        OutFormat::Json => Format::Json,
        OutFormat::Table => Format::Table,
    };
    let one = |name, row| Table::new(name, vec![row]);
    let table = match cli.command {
        Command::Variance { x, h, y } => one("variance", report::cmd_variance(x, h, y, &flags)?),
        Command::Mainterm { h, y, method } => {
            let m = match method {
                MethodArg::Direct => Method::Direct,
                MethodArg::Correlation => Method::Correlation,
            };
            one("mainterm", report::cmd_mainterm(h, y, m, &flags)?)
        }
        Command::Vq { q, h } => one("vq", report::cmd_vq(q, h, &flags)?),
        Command::Friable { x, y } => one("friable", report::cmd_friable(x, y, &flags)?),
        Command::Saddle { x, y } => one("saddle", report::cmd_saddle(x, y, &flags)?),
        Command::SaddleLine { x, y } => one("saddle-line", report::cmd_saddle_line(x, y, &flags)?),
        Command::Contour { x, y, c, tol } => one("contour", report::cmd_contour(x, y, c, tol, &flags)?),
        Command::Converge { h, y, x } => report::cmd_converge(h, y, &report::parse_int_list(&x)?, &flags)?,
        Command::Regimes { grid, h, y } => {
            let points = match (grid, h, y) {
                (Some(g), _, _) => report::parse_grid(&g)?,
                (None, Some(h), Some(y)) => vec![(h, y)],
                _ => report::default_regime_grids().into_iter().flat_map(|(_, g)| g).collect(),
            };
            report::cmd_regimes(&points, &flags)?
        }
    };
    table.render(format)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(1);
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error[{}]: {e}", e.code());
            ExitCode::from(e.numeric_code() as u8)
        }
    }
}
