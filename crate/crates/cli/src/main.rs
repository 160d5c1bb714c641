use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;
use thiserror::Error;

use pencil_forge::catalog::{self, builtin_cases, parse_recursion, verify_case, CaseRecord, VerificationReport};
use pencil_forge::hierarchy::{flow_from_density, magri_step, parse_density, recursion_operator};
use pencil_forge::report::{Check, Status};
use pencil_forge::symcore::probe;
use pencil_forge::Error;

/// Verify Hamiltonian operators of hydrodynamic type and bi-Hamiltonian pairs.
#[derive(Parser)]
#[command(name = "pencil-forge", version, about)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check for a builtin case or a case file.
    Verify {
        /// Builtin case name or path to a JSON case file.
        target: String,
        /// Print wall-clock time (text format only).
        #[arg(long)]
        timings: bool,
        /// Re-check every zero test at random rational points. The number of
        /// points comes from PENCIL_FORGE_PROBES (default 100).
        #[arg(long)]
        cross_check: bool,
    },
    /// Print the recursion operator B∘A⁻¹.
    Recursion {
        /// Builtin case name or path to a JSON case file.
        target: String,
    },
    /// Iterate A grad h_{k+1} = B grad h_k from a starting density.
    Magri {
        /// Builtin case name or path to a JSON case file.
        target: String,
        /// Starting density h_0, a function of the fields and x.
        #[arg(long, allow_hyphen_values = true)]
        density: String,
        /// Number of steps.
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..))]
        steps: u32,
    },
    /// List or export the builtin cases.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Names and descriptions of the builtin cases.
    List,
    /// Write each builtin case to DIR/<name>.json.
    Export { dir: PathBuf },
}

/// Exit status: 0 all checks pass, 1 some check fails, 2 bad input.
#[derive(Debug, Error)]
enum Failure {
    #[error("{0}")]
    Checks(String),
    #[error("{0}")]
    Input(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Checks(_) => 1,
            Failure::Input(_) => 2,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Verify { target, timings, cross_check } => verify(&target, cli.format, timings, cross_check),
        Command::Recursion { target } => recursion(&target, cli.format),
        Command::Magri { target, density, steps } => magri(&target, &density, steps, cli.format),
        Command::Catalog { action: CatalogAction::List } => list(cli.format),
        Command::Catalog { action: CatalogAction::Export { dir } } => export(&dir),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            if !matches!(f, Failure::Checks(ref m) if m.is_empty()) {
                eprintln!("error: {f}");
            }
            ExitCode::from(f.code())
        }
    }
}

fn load(target: &str) -> Result<CaseRecord, Failure> {
    if let Some(record) = catalog::lookup(target) {
        return Ok(record);
    }
    let path = Path::new(target);
    if !path.exists() {
        return Err(Failure::Input(format!("`{target}` is neither a builtin case nor a file")));
    }
    let text = fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {target}: {e}")))?;
    CaseRecord::from_json(&text).map_err(|e| Failure::Input(format!("{target}: {e}")))
}

fn emit(text: &str) -> Outcome {
    let mut out = io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| Failure::Input(format!("cannot write output: {e}")))
}

fn verify(target: &str, format: Format, timings: bool, cross_check: bool) -> Outcome {
    let record = load(target)?;
    let mut report = if cross_check {
        let (mut report, recorded) = probe::recording(|| verify_case(&record));
        report.checks.push(zero_test_oracle(&recorded));
        report.valid = report.checks.iter().all(Check::is_ok);
        report
    } else {
        verify_case(&record)
    };
    if let Some(load) = report.get("load case") {
        let detail = load.detail.clone().unwrap_or_default();
        return Err(Failure::Input(detail));
    }
    match format {
        Format::Json => emit(&(serde_json::to_string_pretty(&report).expect("reports serialize") + "\n"))?,
        Format::Text => emit(&render_report(&report, timings))?,
    }
    report.checks.retain(|c| !c.is_ok());
    if report.checks.is_empty() {
        Ok(())
    } else {
        Err(Failure::Checks(String::new()))
    }
}

fn zero_test_oracle(recorded: &[probe::Recorded]) -> Check {
    let probes = probe::probe_count();
    let mut seen = HashSet::new();
    for (i, r) in recorded.iter().enumerate() {
        let key = match &r.origin {
            Some((op, a, b)) => format!("{op:?}|{a}|{b}"),
            None => r.value.to_string(),
        };
        if !seen.insert(key) {
            continue;
        }
        if let Err(d) = probe::cross_check_recorded(r, probes, i as u64) {
            let at: Vec<String> = d.point.iter().map(|(v, q)| format!("{v} = {q}")).collect();
            let claim = if d.claimed_zero { "zero" } else { "nonzero" };
            return Check::fail(
                "zero-test oracle",
                format!("{} was decided {claim} but disagrees at {}", d.expression, at.join(", ")),
            );
        }
    }
    Check::pass("zero-test oracle")
}

fn render_report(report: &VerificationReport, timings: bool) -> String {
    let verdict = if report.valid { "PASS" } else { "FAIL" };
    let mut out = format!("{}: {verdict}", report.name);
    if timings {
        out.push_str(&format!(" ({:.2}s)", report.elapsed.as_secs_f64()));
    }
    out.push('\n');
    for c in &report.checks {
        let status = match c.status {
            Status::Pass => "pass",
            Status::Fail => "FAIL",
            Status::Error => "ERROR",
            Status::Skipped => "skip",
        };
        match &c.detail {
            Some(d) => out.push_str(&format!("  {status:<5} {}: {d}\n", c.name)),
            None => out.push_str(&format!("  {status:<5} {}\n", c.name)),
        }
    }
    out
}

fn recursion(target: &str, format: Format) -> Outcome {
    let record = load(target)?;
    let case = record.build()?;
    let op = recursion_operator(&case.eta, &case.op)?;
    let (reference, mismatch) = match &record.references.recursion {
        None => ("no printed reference".to_string(), None),
        Some(r) => {
            let special = record.specialize(&r.at)?;
            let at = special.build()?;
            let have = recursion_operator(&at.eta, &at.op)?;
            let want = parse_recursion(&at.ctx, &r.matrix)?;
            let shown: Vec<String> = r.at.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            let label = if shown.is_empty() {
                "matches the printed reference".to_string()
            } else {
                format!("matches the printed reference at {}", shown.join(", "))
            };
            match have.difference_witness(&want, &at.ctx)? {
                None => (label, None),
                Some(w) => ("differs from the printed reference".to_string(), Some(w)),
            }
        }
    };
    match format {
        Format::Text => {
            let mut text = format!("{}: recursion operator ({reference})\n{op}", record.name);
            if let Some(w) = &mismatch {
                text.push_str(&format!("difference: {w}\n"));
            }
            emit(&text)?;
        }
        Format::Json => {
            let n = op.n();
            let matrix: Vec<Vec<serde_json::Value>> = (0..n)
                .map(|i| {
                    (0..n)
                        .map(|k| {
                            let s = op.get(i, k);
                            let tail: Vec<[String; 2]> =
                                s.nonlocal.iter().map(|(a, b)| [a.to_string(), b.to_string()]).collect();
                            json!({"dx": s.dx.to_string(), "mult": s.mult.to_string(), "nonlocal": tail})
                        })
                        .collect()
                })
                .collect();
            let doc = json!({
                "name": record.name,
                "matrix": matrix,
                "reference": reference,
                "difference": mismatch,
            });
            emit(&(serde_json::to_string_pretty(&doc).expect("json") + "\n"))?;
        }
    }
    match mismatch {
        None => Ok(()),
        Some(_) => Err(Failure::Checks(String::new())),
    }
}

fn magri(target: &str, density: &str, steps: u32, format: Format) -> Outcome {
    let record = load(target)?;
    let case = record.build()?;
    let ctx = &case.ctx;
    let h0 = parse_density(ctx, density)?;
    let mut h = h0.clone();
    let mut done = Vec::new();
    let mut stop = None;
    for k in 1..=steps {
        let next = match magri_step(&case.eta, &case.op, &h) {
            Ok(next) => next,
            Err(e @ (Error::NotExact { .. } | Error::NonlocalUnresolved(_))) => {
                stop = Some((k, e.to_string()));
                break;
            }
            Err(e) => return Err(e.into()),
        };
        let flow = flow_from_density(ctx, &case.eta, &next)?;
        done.push((next.clone(), flow));
        h = next;
    }
    match format {
        Format::Text => {
            let mut text = format!("{}: h0 = {h0}\n", record.name);
            for (k, (h, flow)) in done.iter().enumerate() {
                text.push_str(&format!("h{} = {h}\n", k + 1));
                for line in flow.display(ctx).lines() {
                    text.push_str(&format!("  {line}\n"));
                }
            }
            emit(&text)?;
        }
        Format::Json => {
            let steps: Vec<serde_json::Value> = done
                .iter()
                .map(|(h, flow)| {
                    let rhs: Vec<String> = flow.rhs(ctx).iter().map(ToString::to_string).collect();
                    json!({"density": h.to_string(), "flow": rhs})
                })
                .collect();
            let stopped = stop.as_ref().map(|(k, why)| json!({"step": k, "reason": why}));
            let doc = json!({"name": record.name, "density": h0.to_string(), "steps": steps, "stopped": stopped});
            emit(&(serde_json::to_string_pretty(&doc).expect("json") + "\n"))?;
        }
    }
    match stop {
        None => Ok(()),
        Some((k, why)) => Err(Failure::Checks(format!("step {k} leaves the hydrodynamic class: {why}"))),
    }
}

fn list(format: Format) -> Outcome {
    let cases = builtin_cases();
    match format {
        Format::Text => {
            let width = cases.iter().map(|c| c.name.len()).max().unwrap_or(0);
            let text: String = cases
                .iter()
                .map(|c| format!("{:<width$}  n = {}  {}\n", c.name, c.n, c.description))
                .collect();
            emit(&text)
        }
        Format::Json => {
            let doc: Vec<serde_json::Value> = cases
                .iter()
                .map(|c| json!({"name": c.name, "n": c.n, "description": c.description}))
                .collect();
            emit(&(serde_json::to_string_pretty(&doc).expect("json") + "\n"))
        }
    }
}

fn export(dir: &Path) -> Outcome {
    let fail = |e: io::Error| Failure::Input(format!("cannot write to {}: {e}", dir.display()));
    fs::create_dir_all(dir).map_err(fail)?;
    for record in builtin_cases() {
        let path = dir.join(format!("{}.json", record.name));
        fs::write(&path, record.to_json()).map_err(fail)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}
