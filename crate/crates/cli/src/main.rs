use std::fmt::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use varlie::run::RunOptions;
use varlie::{canon, check_source, scenario};
use varlie_core::algebra::Parity;
use varlie_core::search::formal_cases;
use varlie_core::text::render;

const USAGE_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "varlie", version, about = "Exact symbolic checks on jet spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Emit {
    Text,
    Tree,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task of a scenario file.
    Check {
        file: PathBuf,
        /// Order bound for every task; overrides task clauses and VARLIE_ORDER_BOUND.
        #[arg(long)]
        order_bound: Option<u32>,
        #[arg(long, value_enum, default_value = "text")]
        emit: Emit,
        /// Worker threads.
        #[arg(long)]
        jobs: Option<usize>,
        /// Report wall time per task.
        #[arg(long)]
        timing: bool,
    },
    /// Classify involutive scalar operators by weight.
    Search {
        #[arg(long)]
        max_weight: u32,
        /// Discover families with a formal coefficient f(u) instead of only verifying the known ones.
        #[arg(long)]
        formal_f: bool,
        /// Maximal differential order of the ansatz.
        #[arg(long)]
        order: Option<u32>,
        #[arg(long, value_enum, default_value = "text")]
        emit: Emit,
        #[arg(long)]
        jobs: Option<usize>,
        #[arg(long)]
        timing: bool,
    },
    /// Parse a scenario and print it canonically.
    Parse { file: PathBuf },
}

fn env_bound() -> Result<Option<u32>, String> {
    match std::env::var("VARLIE_ORDER_BOUND") {
        Ok(v) => v.trim().parse().map(Some).map_err(|_| format!("VARLIE_ORDER_BOUND: `{v}` is not a nonnegative integer")),
        Err(_) => Ok(None),
    }
}

fn threads(jobs: Option<usize>) -> Result<(), String> {
    if let Some(k) = jobs {
        if k == 0 {
            return Err("--jobs must be at least 1".into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global().map_err(|e| e.to_string())?;
    }
    Ok(())
}

/// A scenario running the weight search and verifying the formal f(u) families.
fn search_scenario(max_weight: u32, formal: bool, order: Option<u32>) -> String {
    let mut s = String::from("base x;\nfield u even weight 2;\nfunc f;\n");
    for w in 1..=max_weight {
        write!(s, "task weight{w} = search weight {w}").unwrap();
        if formal {
            s.push_str(" formal");
        }
        if let Some(o) = order {
            write!(s, " order {o}").unwrap();
        }
        s.push_str(";\n");
    }
    let (sig, cases) = formal_cases(max_weight);
    let mut ext = sig.clone();
    for n in ["p1", "p2"] {
        ext.add_field(n, 1, Parity::Even, None).expect("fresh section field");
    }
    s.push_str("task formal = search");
    for c in &cases {
        write!(s, " expect {} gamma {}", render::op(&sig, &c.op), render::poly(&ext, &c.gamma)).unwrap();
    }
    s.push_str(";\n");
    s
}

fn emit(report: &varlie::report::Report, how: Emit) -> ExitCode {
    match how {
        Emit::Text => print!("{}", report.text()),
        Emit::Tree => print!("{}", report.tree()),
    }
    ExitCode::from(report.exit_code() as u8)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let fail = |msg: String| {
        eprintln!("error: {msg}");
        ExitCode::from(USAGE_ERROR)
    };
    let default_bound = match env_bound() {
        Ok(b) => b,
        Err(e) => return fail(e),
    };
    match cli.command {
        Command::Check { file, order_bound, emit: how, jobs, timing } => {
            if let Err(e) = threads(jobs) {
                return fail(e);
            }
            let src = match std::fs::read_to_string(&file) {
                Ok(s) => s,
                Err(e) => return fail(format!("{}: {e}", file.display())),
            };
            let name = file.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let opts = RunOptions { order_bound, default_bound, timing };
            match check_source(&name, &src, &opts) {
                Ok(r) => emit(&r, how),
                Err(e) => fail(format!("{}:{e}", file.display())),
            }
        }
        Command::Search { max_weight, formal_f, order, emit: how, jobs, timing } => {
            if let Err(e) = threads(jobs) {
                return fail(e);
            }
            if max_weight == 0 {
                return fail("--max-weight must be at least 1".into());
            }
            let src = search_scenario(max_weight, formal_f, order);
            let opts = RunOptions { order_bound: None, default_bound, timing };
            match check_source("search", &src, &opts) {
                Ok(r) => emit(&r, how),
                Err(e) => fail(e.to_string()),
            }
        }
        Command::Parse { file } => {
            let src = match std::fs::read_to_string(&file) {
                Ok(s) => s,
                Err(e) => return fail(format!("{}: {e}", file.display())),
            };
            match scenario::parse(&src) {
                Ok(s) => {
                    print!("{}", canon::scenario(&s));
                    ExitCode::SUCCESS
                }
                Err(e) => fail(format!("{}:{e}", file.display())),
            }
        }
    }
}
