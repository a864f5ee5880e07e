mod config;
mod scenarios;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use config::Config;
use scenarios::{Cell, RunResult, Status, Table};

/// Runs one rod scenario from a JSON config and writes `trace.csv` and
/// `report.txt` into a fresh output directory.
#[derive(Parser, Debug)]
#[command(name = "evorod", version)]
struct Cli {
    /// Scenario config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; must not exist. Overrides `output.path`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run the invariant checks and write only the report.
    #[arg(long)]
    verify: bool,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

const EXIT_ERROR: u8 = 1;
const EXIT_CHECK_FAILED: u8 = 2;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_CHECK_FAILED),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}

fn execute(cli: &Cli) -> Result<bool, String> {
    let config = Config::load(&cli.config)?;
    let out = cli
        .out
        .clone()
        .or_else(|| config.output().path.clone())
        .ok_or("no output directory: pass --out or set output.path")?;
    let result = scenarios::run(&config).map_err(|e| format!("{} scenario failed: {e}", config.name()))?;

    fs::create_dir(&out).map_err(|e| format!("cannot create output directory {}: {e}", out.display()))?;
    if !cli.verify {
        write(&out.join("trace.csv"), &render_csv(&result.table))?;
    }
    let report = render_report(config.name(), &result);
    write(&out.join("report.txt"), &report)?;

    let passed = result.checks.iter().all(|c| c.status != Status::Fail);
    if !cli.quiet {
        print!("{report}");
        println!("{}", result.summary);
        println!("output written to {}", out.display());
    }
    Ok(passed)
}

fn write(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn render_csv(table: &Table) -> String {
    let mut s = String::with_capacity(64 * (table.rows.len() + 1));
    s.push_str(table.header);
    s.push('\n');
    for row in &table.rows {
        for (j, cell) in row.iter().enumerate() {
            if j > 0 {
                s.push(',');
            }
            match cell {
                Cell::Float(x) => write!(s, "{x:.16e}"),
                Cell::Int(n) => write!(s, "{n}"),
                Cell::Text(t) => write!(s, "{t}"),
            }
            .unwrap();
        }
        s.push('\n');
    }
    s
}

fn render_report(name: &str, result: &RunResult) -> String {
    let passed = result.checks.iter().all(|c| c.status != Status::Fail);
    let mut s = format!("scenario: {name}\nstatus: {}\n", if passed { "PASS" } else { "FAIL" });
    for c in &result.checks {
        let tag = match c.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Info => "INFO",
        };
        writeln!(s, "[{tag}] {}: {}", c.name, c.detail).unwrap();
    }
    s
}
