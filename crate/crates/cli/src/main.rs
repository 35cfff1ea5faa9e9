use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use bilop::experiments::{ExperimentReport, Table};
use bilop::operator::{eval_direct, fit_decay, kernel_from_symbol, KernelBox, Window};
use bilop::signal::io::{read_csv, write_csv};
use bilop::tilemodel::collection_validate;
use bilop::tilemodel::text::read_collection;
use bilop::SampledFunction;
use bilop_cli::config::SymbolSpec;
use bilop_cli::{build_symbol, parse_config_with, run, CliError, SymbolKind};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "bilop", version, about = "Bilinear operator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate T_σ(f, g) for two sampled inputs (CSV `x,re,im`).
    Eval {
        #[arg(long)]
        f: PathBuf,
        #[arg(long)]
        g: PathBuf,
        #[command(flatten)]
        symbol: SymbolArgs,
        /// Output CSV; stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the kernel of a symbol at x = 0 and fit its decay.
    Kernel {
        #[command(flatten)]
        symbol: SymbolArgs,
        #[arg(long, default_value_t = 8.0)]
        offset_max: f64,
        #[arg(long, default_value_t = 33)]
        offsets: usize,
        #[arg(long, default_value_t = 8.0)]
        freq_max: f64,
        #[arg(long, default_value_t = 64)]
        freqs: usize,
        #[arg(long, value_enum, default_value_t = WindowArg::SmoothTaper)]
        window: WindowArg,
        /// CSV of `u, v, re, im`; omitted means only the fit is printed.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check or export a tri-tile collection file.
    Tiles {
        #[command(subcommand)]
        action: TilesAction,
    },
    /// Off-diagonal decay experiment.
    Decay(ExpArgs),
    /// Hölder-triple sweep.
    Sweep(ExpArgs),
    /// Weighted continuity sweep.
    Weighted(ExpArgs),
    /// Restricted-type harness.
    Restricted(ExpArgs),
    /// Limsup bound over an interval-length ladder.
    Limsup(ExpArgs),
    /// Any experiment, with the kind taken from the config.
    Run(ExpArgs),
    /// Print a saved report JSON as PASS/FAIL text.
    Report { file: PathBuf },
}

#[derive(Subcommand)]
enum TilesAction {
    Validate { file: PathBuf },
    /// Write tile rectangles as CSV.
    Render {
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct SymbolArgs {
    #[arg(long, value_enum, default_value_t = SymbolArg::TruncatedBht)]
    symbol: SymbolArg,
    #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
    lambda1: f64,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    lambda2: f64,
    /// Truncation length L.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum SymbolArg {
    Product,
    Bht,
    TruncatedBht,
}

#[derive(Clone, Copy, ValueEnum)]
enum WindowArg {
    Rectangular,
    Hann,
    SmoothTaper,
}

/// Config file plus overrides. Every flag maps to one config key.
#[derive(Args)]
struct ExpArgs {
    config: Option<PathBuf>,
    /// symbol.kind
    #[arg(long)]
    symbol: Option<String>,
    /// grid.n
    #[arg(long)]
    n: Option<String>,
    /// grid.period
    #[arg(long)]
    period: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// output.dir
    #[arg(long)]
    out: Option<String>,
    /// Any other key, as `section.key=value`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn symbol_spec(a: &SymbolArgs) -> SymbolSpec {
    let kind = match a.symbol {
        SymbolArg::Product => SymbolKind::Product,
        SymbolArg::Bht => SymbolKind::Bht,
        SymbolArg::TruncatedBht => SymbolKind::TruncatedBht,
    };
    SymbolSpec { kind, lambda: (a.lambda1, a.lambda2), scale: a.scale }
}

fn read_signal(path: &Path) -> Result<SampledFunction, CliError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    Ok(read_csv(file)?)
}

fn write_or_print(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| io_err(p, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn experiment(kind: Option<&str>, a: &ExpArgs) -> Result<i32, CliError> {
    let text = match &a.config {
        Some(p) => fs::read_to_string(p).map_err(|e| io_err(p, e))?,
        None => String::new(),
    };
    let mut overrides: Vec<(String, String)> = Vec::new();
    if let Some(k) = kind {
        overrides.push(("kind".into(), k.into()));
    }
    for (key, v) in [("symbol.kind", &a.symbol), ("grid.n", &a.n), ("grid.period", &a.period), ("seed", &a.seed), ("output.dir", &a.out)] {
        if let Some(v) = v {
            overrides.push((key.into(), v.clone()));
        }
    }
    for s in &a.set {
        let (k, v) = s.split_once('=').ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got `{s}`")))?;
        overrides.push((k.trim().into(), v.trim().into()));
    }
    let cfg = parse_config_with(&text, &overrides).map_err(CliError::Config)?;
    let outcome = run(&cfg)?;
    print!("{}", outcome.report.render());
    for p in &outcome.artifacts {
        eprintln!("wrote {}", p.display());
    }
    Ok(outcome.exit_code())
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::Eval { f, g, symbol, out } => {
            let sigma = build_symbol(&symbol_spec(&symbol))?;
            let t = eval_direct(&sigma, &read_signal(&f)?, &read_signal(&g)?)?;
            let mut buf = Vec::new();
            write_csv(&t, &mut buf)?;
            write_or_print(out.as_deref(), &String::from_utf8_lossy(&buf))?;
            Ok(0)
        }
        Command::Kernel { symbol, offset_max, offsets, freq_max, freqs, window, out } => {
            let sigma = build_symbol(&symbol_spec(&symbol))?;
            let window = match window {
                WindowArg::Rectangular => Window::Rectangular,
                WindowArg::Hann => Window::Hann,
                WindowArg::SmoothTaper => Window::SmoothTaper,
            };
            let bx = KernelBox { xs: vec![0.0], offset_max, offset_count: offsets, freq_max, freq_count: freqs, window };
            let k = kernel_from_symbol(&sigma, &bx)?;
            let fit = fit_decay(&k, 0, None, 1.0, 1.0 + 2.0 * offset_max, 8)?;
            println!("window {} edge |σ| {:e} decay exponent {:.4}", window.name(), k.edge_symbol_max, fit.exponent);
            if let Some(p) = out {
                let mut t = Table::new("kernel", &["u", "v", "re", "im"]);
                for (iu, &u) in k.offsets.iter().enumerate() {
                    for (iv, &v) in k.offsets.iter().enumerate() {
                        let z = k.at(0, iu, iv);
                        t.push(vec![u, v, z.re, z.im]);
                    }
                }
                write_or_print(Some(&p), &t.to_csv()?)?;
            }
            Ok(0)
        }
        Command::Tiles { action: TilesAction::Validate { file } } => {
            let c = read_collection::<f64>(&file)?;
            let r = collection_validate(&c);
            println!(
                "{} tiles: area {} (max {:.4}), disjoint {}, overlap {} (time {:.3}, freq {:.3}), nesting {}, duplicates {}",
                r.tiles, r.area_ok, r.max_area, r.disjoint_ok, r.overlap_ok, r.time_overlap, r.freq_overlap, r.nesting_ok, r.duplicates
            );
            for w in &r.witnesses {
                println!("  {w}");
            }
            println!("{}", if r.pass { "PASS" } else { "FAIL" });
            Ok(if r.pass { 0 } else { 1 })
        }
        Command::Tiles { action: TilesAction::Render { file, out } } => {
            let c = read_collection::<f64>(&file)?;
            let mut t = Table::new(
                "tiles",
                &["index", "t_lo", "t_hi", "w_lo", "w_hi", "w1_lo", "w1_hi", "w2_lo", "w2_hi", "w3_lo", "w3_hi"],
            );
            for (i, s) in c.tiles.iter().enumerate() {
                let mut row = vec![i as f64, s.time.lo(), s.time.hi(), s.freq.lo(), s.freq.hi()];
                for w in &s.subs {
                    row.extend([w.lo(), w.hi()]);
                }
                t.push(row);
            }
            write_or_print(out.as_deref(), &t.to_csv()?)?;
            Ok(0)
        }
        Command::Decay(a) => experiment(Some("offdiag_decay"), &a),
        Command::Sweep(a) => experiment(Some("holder_sweep"), &a),
        Command::Weighted(a) => experiment(Some("weighted_continuity"), &a),
        Command::Restricted(a) => experiment(Some("restricted_type"), &a),
        Command::Limsup(a) => experiment(Some("limsup_bound"), &a),
        Command::Run(a) => experiment(None, &a),
        Command::Report { file } => {
            let text = fs::read_to_string(&file).map_err(|e| io_err(&file, e))?;
            let rep = ExperimentReport::from_json(&text)?;
            print!("{}", rep.render());
            Ok(if rep.pass() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
