//! `choral`: check, project, execute, test and measure choreographies.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};

use choral_core::interp::{
    compare, eval_distributed, eval_global, Comparison, ExecutionReport, Manifest, DEFAULT_DEADLINE,
};
use choral_core::metrics::{self, Iterations};
use choral_core::prelude::{load, Frontend};
use choral_core::project::{project_frontend, write_units, PrintOptions};
use choral_core::runtime::Registry;
use choral_core::syntax::{Diagnostic, SourceMap};
use choral_core::testkit::{test_frontend, CaseStatus};

#[derive(Parser)]
#[command(name = "choral", version, about = "Compiler and runtime for choreographies with role-annotated types")]
struct Cli {
    /// Print diagnostics as one JSON object per line.
    #[arg(long, global = true)]
    json_diagnostics: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse and type-check sources.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Project every declaration to one local unit per role.
    Project {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        /// Only write the units of this role.
        #[arg(long)]
        role: Option<String>,
        /// Mark units with the choreography and role they came from.
        #[arg(long)]
        annotate: bool,
        /// Add argument-free wrappers for methods whose parameters are all `Unit`.
        #[arg(long)]
        courtesy: bool,
    },
    /// Run a choreography with the global evaluator.
    Oracle(RunArgs),
    /// Project a choreography and run one worker per role.
    Run {
        #[command(flatten)]
        args: RunArgs,
        /// Also run the global evaluator and report any disagreement.
        #[arg(long)]
        compare: bool,
    },
    /// Discover and run `@Test` methods.
    Test {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_DEADLINE.as_secs_f64())]
        deadline: f64,
        /// Print one JSON record per case instead of the summary.
        #[arg(long)]
        json: bool,
    },
    /// Measure size and compile times; writes a CSV table.
    Bench {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        csv: PathBuf,
        #[arg(long, default_value_t = Iterations::default().warmup)]
        warmup: usize,
        #[arg(long, default_value_t = Iterations::default().measured)]
        iterations: usize,
    },
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    /// Seconds before blocked workers give up.
    #[arg(long, default_value_t = DEFAULT_DEADLINE.as_secs_f64())]
    deadline: f64,
}

/// Failure to even start: unreadable inputs and bad arguments.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

struct Driver {
    json: bool,
}

impl Driver {
    fn report(&self, sources: &SourceMap, diags: &[Diagnostic]) {
        for d in diags {
            if self.json {
                println!("{}", d.to_json(sources));
            } else {
                eprint!("{}", d.render(sources));
            }
        }
    }

    fn read(files: &[PathBuf]) -> Result<Vec<(String, String)>> {
        files
            .iter()
            .map(|p| {
                let text =
                    std::fs::read_to_string(p).map_err(|e| usage(format!("cannot read {}: {e}", p.display())))?;
                Ok((p.display().to_string(), text))
            })
            .collect()
    }

    /// Loads and checks `files`; `None` after reporting errors.
    fn frontend(&self, files: &[PathBuf]) -> Result<Option<Frontend>> {
        let front = load(&Self::read(files)?);
        self.report(&front.sources, &front.diags);
        Ok((!front.has_errors()).then_some(front))
    }

    fn check(&self, files: &[PathBuf]) -> Result<bool> {
        let Some(front) = self.frontend(files)? else { return Ok(false) };
        if !self.json {
            eprintln!("{} file(s) checked, {} warning(s)", files.len(), front.diags.len());
        }
        Ok(true)
    }

    fn project(
        &self,
        files: &[PathBuf],
        out: &Path,
        role: Option<&str>,
        annotate: bool,
        courtesy: bool,
    ) -> Result<bool> {
        let Some(front) = self.frontend(files)? else { return Ok(false) };
        let projection = project_frontend(&front);
        self.report(&front.sources, &projection.diags);
        if projection.has_errors() {
            return Ok(false);
        }
        let units: Vec<_> = projection
            .units
            .into_iter()
            .filter(|u| role.is_none_or(|r| u.meta.as_ref().is_some_and(|m| m.role == r)))
            .collect();
        if let (Some(r), true) = (role, units.is_empty()) {
            return Err(usage(format!("no declaration has a role named '{r}'")));
        }
        let written = write_units(out, &units, annotate, PrintOptions { courtesy })
            .with_context(|| format!("writing units to {}", out.display()))?;
        for m in &written {
            println!("{}", out.join(&m.file).display());
        }
        println!("{}", out.join("manifest.json").display());
        Ok(true)
    }

    fn run(&self, args: &RunArgs, global: bool, distributed: bool) -> Result<bool> {
        let manifest = Manifest::load(&args.manifest).map_err(|e| usage(e.to_string()))?;
        let deadline = seconds(args.deadline)?;
        let Some(front) = self.frontend(std::slice::from_ref(&args.file))? else { return Ok(false) };
        let g = global.then(|| eval_global(&front.program, &front.checked, &manifest, deadline));
        let d = if distributed {
            let projection = project_frontend(&front);
            self.report(&front.sources, &projection.diags);
            if projection.has_errors() {
                return Ok(false);
            }
            Some(eval_distributed(&projection.program(), &manifest, &Registry::new(), deadline))
        } else {
            None
        };
        let (ok, json) = match (g, d) {
            (Some(g), Some(d)) => {
                let diffs = compare(&g, &d, &manifest.roles);
                let c = Comparison { global: g, distributed: d, diffs };
                (c.agrees(), serde_json::to_string_pretty(&c)?)
            }
            (Some(r), None) | (None, Some(r)) => (r.is_ok(), pretty(&r)?),
            (None, None) => unreachable!("at least one evaluator runs"),
        };
        println!("{json}");
        Ok(ok)
    }

    fn test(&self, files: &[PathBuf], deadline: f64, json: bool) -> Result<bool> {
        let deadline = seconds(deadline)?;
        let Some(front) = self.frontend(files)? else { return Ok(false) };
        let report = match test_frontend(&front, deadline) {
            Ok(r) => r,
            Err(diags) => {
                self.report(&front.sources, &diags);
                return Ok(false);
            }
        };
        for c in &report.cases {
            if json {
                println!("{}", serde_json::to_string(c)?);
                continue;
            }
            match (c.status, c.cause()) {
                (CaseStatus::Passed, _) => println!("PASS {} ({:.1} ms, {} workers)", c.name, c.duration_ms, c.workers),
                (CaseStatus::DeadlockTimeout, _) => println!("FAIL {}: deadlock-timeout", c.name),
                (CaseStatus::Failed, Some(f)) => println!("FAIL {}: at {}: {}", c.name, f.role, f.message),
                (CaseStatus::Failed, None) => println!("FAIL {}", c.name),
            }
        }
        if !json {
            println!("{} passed, {} failed", report.passed(), report.cases.len() - report.passed());
        }
        Ok(report.all_passed())
    }

    fn bench(&self, files: &[PathBuf], csv: &Path, it: Iterations) -> Result<bool> {
        let mut rows = Vec::new();
        let mut ok = true;
        for (name, text) in Self::read(files)? {
            match metrics::measure(&name, &text, it) {
                Ok(row) => rows.push(row),
                Err(diags) => {
                    ok = false;
                    eprintln!("{name}: excluded, it does not compile\n{diags}");
                }
            }
        }
        let table = metrics::to_csv(&rows);
        std::fs::write(csv, &table).with_context(|| format!("writing {}", csv.display()))?;
        print!("{table}");
        Ok(ok)
    }
}

fn pretty(r: &ExecutionReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(r)?)
}

fn seconds(s: f64) -> Result<Duration> {
    if !(s.is_finite() && s > 0.0) {
        return Err(usage(format!("deadline must be a positive number of seconds, got {s}")));
    }
    Ok(Duration::from_secs_f64(s))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let d = Driver { json: cli.json_diagnostics };
    let result = match &cli.command {
        Command::Check { files } => d.check(files),
        Command::Project { files, out, role, annotate, courtesy } => {
            d.project(files, out, role.as_deref(), *annotate, *courtesy)
        }
        Command::Oracle(args) => d.run(args, true, false),
        Command::Run { args, compare } => d.run(args, *compare, true),
        Command::Test { files, deadline, json } => d.test(files, *deadline, *json),
        Command::Bench { files, csv, warmup, iterations } => {
            d.bench(files, csv, Iterations { warmup: *warmup, measured: *iterations })
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) if e.is::<Usage>() => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
