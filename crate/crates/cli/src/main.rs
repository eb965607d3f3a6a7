use clap::{Parser, Subcommand, ValueEnum};
use ctxprob::exec::Execution;
use ctxprob::language::parse_proposition;
use ctxprob::lattice::{self, PropertyPreorder};
use ctxprob::measurement::{mean_conditional, mean_conditional_any, MeasurementError};
use ctxprob::modelfile::{self, check_model, LoadedModel};
use ctxprob::quantum::demo_born;
use ctxprob::report::{Check, Report};
use ctxprob::tolerance;
use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ctxprob", version, about = "Check and query contextual probability model files")]
struct Cli {
    /// Run every batch computation on the calling thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every applicable verification suite on a model file.
    Check {
        file: PathBuf,
        /// Formula depth for the procedure-independence check.
        #[arg(long, default_value_t = 2)]
        depth: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Mean conditional probability of A given B.
    Eval {
        file: PathBuf,
        a: String,
        b: String,
        /// Average over this procedure instead of the first one that tests the query.
        #[arg(long)]
        procedure: Option<String>,
    },
    /// Print the property preorder and check any lattice tables.
    Lattice { file: PathBuf },
    /// Compare band-model means with Born values for a list of angles.
    DemoBorn {
        /// Comma-separated angles in radians; `pi` fractions such as `pi/3` are accepted.
        #[arg(long, value_delimiter = ',')]
        theta: Option<Vec<String>>,
        #[arg(long, default_value_t = 10_000)]
        segments: usize,
    },
    /// Same checks as `check`, as a plain-text or JSON report.
    Report {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
}

/// Exit status plus everything that goes to stderr.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }

    fn check(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential { Execution::Sequential } else { Execution::Parallel };
    match run(cli.command, exec) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !f.message.is_empty() {
                eprintln!("error: {}", f.message);
            }
            ExitCode::from(f.code)
        }
    }
}

fn load(path: &Path) -> Result<LoadedModel, Failure> {
    modelfile::load_path(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn run(command: Command, exec: Execution) -> Result<(), Failure> {
    match command {
        Command::Check { file, depth, format } | Command::Report { file, format, depth } => {
            let model = load(&file)?;
            let report = check_model(&model, depth, exec);
            emit(&file, &report, format);
            verdict(&report)
        }
        Command::Eval { file, a, b, procedure } => eval(&load(&file)?, &a, &b, procedure.as_deref()),
        Command::Lattice { file } => lattice_command(&load(&file)?, exec),
        Command::DemoBorn { theta, segments } => {
            let thetas = match theta {
                Some(list) => list.iter().map(|t| parse_angle(t)).collect::<Result<Vec<_>, _>>()?,
                None => (0..=6).map(|k| k as f64 * PI / 6.0).collect(),
            };
            if segments == 0 {
                return Err(Failure::usage("--segments must be at least 1"));
            }
            let table = demo_born(&thetas, segments, exec).map_err(|e| Failure::usage(e.to_string()))?;
            print!("{table}");
            if table.passed() {
                Ok(())
            } else {
                Err(Failure::check(format!("largest gap {:.3e} exceeds 1/n = {:.3e}", table.max_gap(), table.bound())))
            }
        }
    }
}

fn emit(file: &Path, report: &Report, format: Format) {
    match format {
        Format::Text => {
            print!("{report}");
            let failed = report.failures().count();
            println!("{}: {} checks, {failed} failed", file.display(), report.checks.len());
        }
        Format::Json => {
            let doc = serde_json::json!({
                "file": file.display().to_string(),
                "passed": report.passed(),
                "checks": &report.checks,
            });
            println!("{}", serde_json::to_string_pretty(&doc).expect("reports serialize"));
        }
    }
}

fn verdict(report: &Report) -> Result<(), Failure> {
    if report.passed() {
        Ok(())
    } else {
        Err(Failure { code: 1, message: String::new() })
    }
}

/// `1.047`, `pi`, `pi/3`, `2pi/3` or `2*pi/3`.
fn parse_angle(text: &str) -> Result<f64, Failure> {
    let bad = || Failure::usage(format!("cannot read angle `{text}`"));
    let t = text.trim();
    let Some(i) = t.find("pi") else {
        return t.parse().map_err(|_| bad());
    };
    let coefficient = t[..i].trim_end_matches('*').trim();
    let coefficient: f64 = if coefficient.is_empty() { 1.0 } else { coefficient.parse().map_err(|_| bad())? };
    let rest = t[i + 2..].trim();
    let divisor: f64 = match rest.strip_prefix('/') {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None if rest.is_empty() => 1.0,
        None => return Err(bad()),
    };
    Ok(coefficient * PI / divisor)
}

fn eval(loaded: &LoadedModel, a: &str, b: &str, procedure: Option<&str>) -> Result<(), Failure> {
    let model = loaded
        .contextual
        .as_ref()
        .ok_or_else(|| Failure::usage("the file has no universe to evaluate against"))?;
    let entity = model.entity();
    let parse = |text: &str| {
        parse_proposition(text, entity).map_err(|e| Failure::usage(format!("`{text}` {e}")))
    };
    let (pa, pb) = (parse(a)?, parse(b)?);
    let evaluation = |e: MeasurementError| Failure::check(e.to_string());
    let (result, used) = match procedure {
        Some(id) => {
            let m = model
                .catalog()
                .procedure(id)
                .ok_or_else(|| Failure::usage(format!("unknown procedure `{id}`")))?;
            (mean_conditional(model, &pa, &pb, m).map_err(evaluation)?, Some(m))
        }
        None => mean_conditional_any(model, &pa, &pb).map_err(evaluation)?,
    };
    match used {
        Some(m) => println!("{} [{}, procedure {}]", result.value, result.case, m.id()),
        None => println!("{} [{}]", result.value, result.case),
    }
    Ok(())
}

fn lattice_command(loaded: &LoadedModel, exec: Execution) -> Result<(), Failure> {
    let family = loaded.family(exec).map_err(Failure::usage)?;
    let tol = loaded.preorder_tolerance();
    let preorder = PropertyPreorder::from_family(&family, tol);
    println!("property preorder (tolerance {tol:.1e}), classes with the classes above them:");
    print!("{preorder}");
    let mut report = preorder.verify();
    let lattice = match (&loaded.lattice, &loaded.hilbert) {
        (Some(l), _) => Some(l.clone()),
        (None, Some(h)) => h.projector_lattice().ok(),
        (None, None) => None,
    };
    match lattice {
        Some(l) => {
            report.extend(lattice::check_ortholattice(&l));
            match lattice::check_gpm_family(&l, &family, tolerance::CMP, exec) {
                Ok(gpm) => report.push(gpm.to_check()),
                Err(e) => report.push(Check::skipped("lattice.gpm", e.to_string())),
            }
        }
        None => report.push(Check::skipped("lattice.ortholattice", "no lattice tables")),
    }
    print!("{report}");
    verdict(&report)
}
