//! Command-line front door: analyze problem files, list symmetries, emit
//! plane-geometry plot data.
//!
//! Exit codes: 0 success (including CR-fail classifications), 2 parse or
//! input errors, 3 undecided-critical results.

use clap::{Args, Parser, Subcommand};
use clode::expr::Q;
use clode::parse::parse_problem;
use clode::parse::parse_rational;
use clode::report::{self, Overrides};
use rayon::prelude::*;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "clode",
    about = "Complex linearization of coupled second-order ODE systems",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline: CR gate, lift, classification, symmetries,
    /// linearization, solutions, verification.
    Analyze(AnalyzeArgs),
    /// Compute the Lie point symmetry algebra only.
    Symmetries(SymmetriesArgs),
    /// Emit the plane pair of the linear image as CSV plot data.
    Geometry(GeometryArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Problem file (plain text, one statement per line).
    file: PathBuf,
    /// Polynomial ansatz degree for the symmetry search.
    #[arg(long)]
    degree: Option<u32>,
    /// Numeric tolerance echoed into reports and zero tests.
    #[arg(long)]
    tol: Option<f64>,
    /// Seed for the randomized zero-test sampling.
    #[arg(long)]
    seed: Option<u64>,
    /// Output format.
    #[arg(long, value_parser = ["json", "text"])]
    format: Option<String>,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Treat FILE as a directory and analyze every .ode file in it
    /// (deterministic order, entries verified concurrently).
    #[arg(long)]
    all: bool,
}

#[derive(Args)]
struct SymmetriesArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
struct GeometryArgs {
    /// Problem file whose linear image has catalog plane data.
    file: PathBuf,
    /// Four real constants a1,a2,b1,b2 (exact rationals accepted).
    #[arg(long, value_delimiter = ',')]
    constants: Vec<String>,
    /// Samples per axis for the plane patches.
    #[arg(long, default_value_t = 16)]
    grid: usize,
    /// Half-width of the sampled chi square.
    #[arg(long, default_value_t = 2.0)]
    extent: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Analyze(args) => {
            if args.all {
                analyze_all(&args.common)
            } else {
                analyze_one(&args.common, false)
            }
        }
        Command::Symmetries(args) => analyze_one(&args.common, true),
        Command::Geometry(args) => geometry(&args),
    }
}

fn read_and_parse(path: &Path) -> Result<clode::parse::ProblemFile, (String, u8)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (format!("{}: {e}", path.display()), 2u8))?;
    parse_problem(&text).map_err(|e| (format!("{}: {e}", path.display()), 2u8))
}

fn overrides(c: &CommonArgs) -> Overrides {
    Overrides {
        degree: c.degree,
        tol: c.tol,
        seed: c.seed,
    }
}

fn analyze_one(c: &CommonArgs, symmetries_only: bool) -> ExitCode {
    let file = match read_and_parse(&c.file) {
        Ok(f) => f,
        Err((msg, code)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(code);
        }
    };
    let report = if symmetries_only {
        report::symmetries_report(&file, &overrides(c))
    } else {
        report::analyze_file(&file, &overrides(c))
    };
    match report {
        Ok(r) => {
            print_report(&r, c, &file);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn print_report(r: &report::Report, c: &CommonArgs, file: &clode::parse::ProblemFile) {
    let fmt = c
        .format
        .clone()
        .or_else(|| file.options.format.clone())
        .unwrap_or_else(|| "json".into());
    if fmt == "text" {
        print!("{}", report::render_text(r));
    } else {
        println!("{}", serde_json::to_string_pretty(r).expect("serializable"));
    }
}

fn analyze_all(c: &CommonArgs) -> ExitCode {
    let mut entries: Vec<PathBuf> = match std::fs::read_dir(&c.file) {
        Ok(rd) => rd
            .filter_map(|e| e.ok().map(|e| e.path()))
            .filter(|p| p.extension().is_some_and(|x| x == "ode"))
            .collect(),
        Err(e) => {
            eprintln!("error: {}: {e}", c.file.display());
            return ExitCode::from(2);
        }
    };
    entries.sort();
    let over = overrides(c);
    let results: Vec<(PathBuf, Result<report::Report, String>)> = entries
        .par_iter()
        .map(|p| {
            let r = read_and_parse(p)
                .map_err(|(m, _)| m)
                .and_then(|f| report::analyze_file(&f, &over).map_err(|e| e.to_string()));
            (p.clone(), r)
        })
        .collect();
    let mut failures = 0;
    println!("[");
    let mut first = true;
    for (path, r) in results {
        match r {
            Ok(rep) => {
                if !first {
                    println!(",");
                }
                first = false;
                let mut v = serde_json::to_value(&rep).expect("serializable");
                if let serde_json::Value::Object(o) = &mut v {
                    let mut with_file = serde_json::Map::new();
                    with_file.insert(
                        "file".into(),
                        serde_json::Value::String(path.display().to_string()),
                    );
                    for (k, val) in o.iter() {
                        with_file.insert(k.clone(), val.clone());
                    }
                    *o = with_file;
                }
                print!("{}", serde_json::to_string_pretty(&v).expect("serializable"));
            }
            Err(e) => {
                eprintln!("error: {}: {e}", path.display());
                failures += 1;
            }
        }
    }
    println!("\n]");
    if failures > 0 {
        ExitCode::from(3)
    } else {
        ExitCode::SUCCESS
    }
}

fn geometry(args: &GeometryArgs) -> ExitCode {
    let file = match read_and_parse(&args.file) {
        Ok(f) => f,
        Err((msg, code)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(code);
        }
    };
    let consts: Result<Vec<Q>, String> = args
        .constants
        .iter()
        .map(|s| parse_rational(s))
        .collect();
    let consts = match consts {
        Ok(v) if v.len() == 4 => v,
        Ok(_) => {
            eprintln!("error: --constants requires exactly four values a1,a2,b1,b2");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    match report::geometry_csv(
        &file,
        [&consts[0], &consts[1], &consts[2], &consts[3]],
        args.grid,
        args.extent,
    ) {
        Ok(csv) => {
            print!("{csv}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
