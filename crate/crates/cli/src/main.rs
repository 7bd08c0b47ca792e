//! `brst`: build the U maps for one algebra and check them.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use brst_core::oracle::IndexModel;
use brst_core::run::{run, RunConfig, Suite};
use brst_core::GradedAlgebra;
use clap::{Parser, ValueEnum};

const LEVEL_CAP: usize = 6;

#[derive(Debug, Parser)]
#[command(name = "brst", version, about = "Exact BRST differential on the bar resolution of a graded algebra")]
struct Args {
    /// Catalog name (unit, dual_numbers, group_Z2, mat2, exterior1) or path to an algebra JSON file.
    #[arg(long)]
    algebra: String,

    /// Truncation level of the ghost and momentum towers
    #[arg(long, default_value_t = 4)]
    level: usize,

    /// Repeat to select several; all suites run when omitted.
    #[arg(long = "suite", value_name = "SUITE")]
    suites: Vec<String>,

    /// Write every U map here, one JSON file per key.
    #[arg(long, value_name = "DIR")]
    dump_u: Option<PathBuf>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, value_name = "FILE")]
    report: Option<PathBuf>,

    /// Worker threads; all cores when omitted
    #[arg(long, value_name = "K")]
    jobs: Option<usize>,

    /// Permit levels above the cap of 6.
    #[arg(long)]
    allow_deep_level: bool,

    #[arg(long, value_enum, default_value_t = ModelArg::Normalized)]
    index_model: ModelArg,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    Normalized,
    Full,
}

fn load_algebra(source: &str) -> Result<GradedAlgebra, String> {
    if GradedAlgebra::catalog().contains(&source) {
        return GradedAlgebra::builtin(source).map_err(|e| e.to_string());
    }
    let path = Path::new(source);
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read algebra '{source}': {e}"))?;
    GradedAlgebra::from_json(&text).map_err(|e| format!("{source}: {e}"))
}

fn config(args: &Args) -> Result<RunConfig, String> {
    if args.level == 0 {
        return Err("level must be at least 1".into());
    }
    if args.level > LEVEL_CAP && !args.allow_deep_level {
        return Err(format!("level {} exceeds the cap of {LEVEL_CAP}; pass --allow-deep-level", args.level));
    }
    if args.jobs == Some(0) {
        return Err("--jobs must be at least 1".into());
    }
    let suites: BTreeSet<Suite> = if args.suites.is_empty() {
        Suite::ALL.into_iter().collect()
    } else {
        args.suites.iter().map(|s| s.parse::<Suite>().map_err(|e| e.to_string())).collect::<Result<_, _>>()?
    };
    let mut cfg = RunConfig::new(load_algebra(&args.algebra)?, args.level);
    cfg.suites = suites;
    cfg.model = match args.index_model {
        ModelArg::Normalized => IndexModel::Normalized,
        ModelArg::Full => IndexModel::Full,
    };
    cfg.dump_dir = args.dump_u.clone();
    cfg.jobs = args.jobs;
    Ok(cfg)
}

fn main() -> ExitCode {
    let args = Args::parse();
    let cfg = match config(&args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let report = match run(&cfg) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let json = report.to_json();
    match &args.report {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &json) {
                eprintln!("error: cannot write report {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{json}"),
    }
    for r in report.failures() {
        eprintln!("FAIL {:?} {:?} {}", r.family, r.indices, r.label.as_deref().unwrap_or(""));
    }
    if report.all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
