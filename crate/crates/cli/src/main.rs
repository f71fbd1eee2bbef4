use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use opfield::hilbert_field::PolarGrid;
use opfield::op_field::{extract_fibers, BandedOperator};
use opfield::phase_space::PolySymbol;
use opfield::weyl::{quantize_diffop, quantize_kernel_symbol, DEFAULT_ENTRY_CAP};
use opfield_cli::config::RunConfig;
use opfield_cli::formats::{dense_on_polar, read_operator, write_banded, write_dense, write_field, StoredOperator};
use opfield_cli::report::{emit_report, write_report, Format, Summary};
use opfield_cli::suites::run_suite;

#[derive(Parser)]
#[command(name = "opfield", version, about = "Numerical checks for fields of operators over the spectrum of |q|^2")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Backend {
    Kernel,
    Diffop,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and write a report
    Verify {
        #[arg(long)]
        suite: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
        #[arg(long)]
        seed: Option<u64>,
        /// Overrides such as `S=129,M=32,N=40`
        #[arg(long)]
        grid: Option<String>,
    },
    /// Quantize a polynomial symbol and export the operator
    Quantize {
        #[arg(long)]
        symbol: PathBuf,
        #[arg(long, value_enum)]
        backend: Backend,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        grid: Option<String>,
    },
    /// Extract the fiber matrices of an exported operator
    Fibers {
        #[arg(long)]
        operator: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        grid: Option<String>,
    },
}

fn load_config(path: Option<&PathBuf>, grid: Option<&str>) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(p) = path {
        let text = std::fs::read_to_string(p).with_context(|| format!("cannot read {}", p.display()))?;
        cfg.apply_text(&text).with_context(|| format!("in {}", p.display()))?;
    }
    if let Some(g) = grid {
        cfg.apply_overrides(g).context("in --grid")?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn verify(cfg: &RunConfig) -> Result<Summary> {
    let records = run_suite(&cfg.suite, cfg)?;
    match &cfg.out {
        Some(path) => emit_report(&records, path, cfg.format)?,
        None => write_report(&records, cfg.format, &mut std::io::stdout().lock())?,
    }
    Ok(Summary::of(&records))
}

fn quantize(cfg: &RunConfig, symbol: &Path, backend: Backend, out: &Path) -> Result<()> {
    let text = std::fs::read_to_string(symbol).with_context(|| format!("cannot read {}", symbol.display()))?;
    let u = PolySymbol::from_text(&text)?;
    match backend {
        Backend::Kernel => {
            let grid = opfield::weyl::CartesianGrid::new(u.n(), cfg.cart_points, cfg.cart_half_width)?;
            write_dense(out, &quantize_kernel_symbol(&u, grid, DEFAULT_ENTRY_CAP)?)
        }
        Backend::Diffop => {
            let g = PolarGrid::new(u.n(), cfg.s_count, cfg.m, cfg.s_min, cfg.s_max)?;
            let op = quantize_diffop(&u, &g)?;
            let bandwidth = 8 * op.symbol().order_s() as usize;
            write_banded(out, &BandedOperator::probe(&op, bandwidth, DEFAULT_ENTRY_CAP)?)
        }
    }
}

fn fibers(cfg: &RunConfig, operator: &Path, out: &Path) -> Result<f64> {
    let (field, leakage) = match read_operator(operator)? {
        StoredOperator::Banded(op) => extract_fibers(&op)?,
        StoredOperator::Dense(op) => {
            if op.grid().n() != 2 {
                bail!("dense operators need n = 2 to be seen on the polar grid");
            }
            extract_fibers(&dense_on_polar(&op, &cfg.polar_grid()?))?
        }
    };
    write_field(out, &field, leakage)?;
    Ok(leakage)
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Verify { suite, config, out, format, seed, grid } => {
            let mut cfg = load_config(config.as_ref(), grid.as_deref())?;
            cfg.suite = suite;
            if let Some(o) = out {
                cfg.out = Some(o);
            }
            if let Some(f) = format {
                cfg.format = f;
            }
            if let Some(s) = seed {
                cfg.seed = s;
            }
            let summary = verify(&cfg)?;
            eprintln!("{} passed, {} failed, {} info", summary.pass, summary.fail, summary.info);
            Ok(if summary.fail == 0 { ExitCode::SUCCESS } else { ExitCode::from(1) })
        }
        Command::Quantize { symbol, backend, out, config, grid } => {
            let cfg = load_config(config.as_ref(), grid.as_deref())?;
            quantize(&cfg, &symbol, backend, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Fibers { operator, out, config, grid } => {
            let cfg = load_config(config.as_ref(), grid.as_deref())?;
            let leakage = fibers(&cfg, &operator, &out)?;
            eprintln!("leakage {leakage:.3e}");
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if let Ok(threads) = std::env::var("OPFIELD_THREADS") {
        match threads.parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
            _ => {
                eprintln!("error: OPFIELD_THREADS must be a positive integer, got {threads:?}");
                return ExitCode::from(2);
            }
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
