mod checks;
mod error;
mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use terwilliger_wreath::structure::{self, build_f_family};
use terwilliger_wreath::{make_context, wreath_of_cyclics, CycloNum, Matrix, Moduli, Rational, Scheme};

use crate::error::CliError;
use crate::report::{CheckEntry, Report};

#[derive(Parser, Debug)]
#[command(name = "terwilliger", version, about = "Exact checks on Terwilliger algebras of cyclic wreath products")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the verification suite on C_{p_1} wr ... wr C_{p_d}.
    Verify(VerifyArgs),
    /// Run the generic checks on a scheme read from a table file.
    Oracle(OracleArgs),
    /// Write the class table and optionally the exact matrices.
    Export(ExportArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Args, Debug)]
struct Common {
    /// `all` or a comma-separated list of base points.
    #[arg(long, default_value = "all")]
    base_points: String,
    /// `all` or a comma-separated list of check names.
    #[arg(long, default_value = "all")]
    checks: String,
    /// Write the report here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Refuse schemes with more vertices than this.
    #[arg(long, env = "TERWILLIGER_MAX_ORDER", default_value_t = 64)]
    max_order: usize,
    /// Record wall-clock time per check (makes the report non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Comma-separated moduli, e.g. 2,3.
    #[arg(long, value_delimiter = ',', required = true)]
    moduli: Vec<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Scheme table: `order d` (d non-identity classes) followed by the order² class labels.
    path: PathBuf,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Debug)]
struct ExportArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    moduli: Vec<usize>,
    /// Table destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory for JSON dumps of the adjacency matrices, dual idempotents
    /// and one-dimensional idempotents.
    #[arg(long)]
    matrices: Option<PathBuf>,
    /// Base point for the matrix dumps.
    #[arg(long, default_value_t = 0)]
    base_point: usize,
    #[arg(long, env = "TERWILLIGER_MAX_ORDER", default_value_t = 64)]
    max_order: usize,
}

fn moduli_within(values: &[usize], max_order: usize) -> Result<Moduli, CliError> {
    let m = Moduli::new(values.to_vec()).map_err(|e| CliError::Usage(e.to_string()))?;
    match m.order() {
        Some(n) if n <= max_order => Ok(m),
        Some(n) => Err(CliError::Usage(format!("order {n} exceeds --max-order {max_order}"))),
        None => Err(CliError::Usage("order overflows".into())),
    }
}

fn base_points(list: &str, order: usize) -> Result<Vec<usize>, CliError> {
    if list.trim() == "all" {
        return Ok((0..order).collect());
    }
    let mut points = Vec::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let x: usize = part.parse().map_err(|_| CliError::Usage(format!("bad base point '{part}'")))?;
        if x >= order {
            return Err(CliError::Usage(format!("base point {x} out of range for order {order}")));
        }
        if !points.contains(&x) {
            points.push(x);
        }
    }
    if points.is_empty() {
        return Err(CliError::Usage("no base points selected".into()));
    }
    Ok(points)
}

fn timed(timings: bool, f: impl FnOnce() -> terwilliger_wreath::Result<checks::Outcome>) -> Result<(CheckEntry, checks::Outcome), CliError> {
    let start = Instant::now();
    let outcome = f()?;
    let millis = timings.then(|| start.elapsed().as_millis() as u64);
    Ok((CheckEntry::from_report(&outcome.report, millis), outcome))
}

fn write_output(path: Option<&Path>, text: &str) -> Result<(), CliError> {
    match path {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Write { path: p.to_path_buf(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit(report: &Report, common: &Common) -> Result<ExitCode, CliError> {
    let text = match common.format {
        Format::Json => report.to_json()?,
        Format::Text => report.to_text(),
    };
    write_output(common.out.as_deref(), &text)?;
    Ok(if report.passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn verify(args: &VerifyArgs) -> Result<ExitCode, CliError> {
    let common = &args.common;
    let m = moduli_within(&args.moduli, common.max_order)?;
    let selected = checks::select(&common.checks, &checks::WREATH_CHECKS).map_err(CliError::Usage)?;
    let s = wreath_of_cyclics(&m);
    let points = base_points(&common.base_points, s.order())?;

    let mut entries = Vec::new();
    let (mut dim_t, mut one_dim_count) = (None, None);
    for name in selected {
        let (entry, outcome) = timed(common.timings, || checks::run_wreath(name, &m, &s, &points))?;
        entries.push(entry);
        dim_t = outcome.dim_t.or(dim_t);
        one_dim_count = outcome.one_dim_count.or(one_dim_count);
    }

    let report = Report {
        moduli: Some(m.as_slice().to_vec()),
        order: s.order(),
        num_classes: s.num_classes(),
        base_points: points,
        dim_t,
        dim_formula: Some(structure::dimension_formula(&m)),
        matrix_block: Some(structure::matrix_block(&m)),
        one_dim_count,
        checks: entries,
        version: env!("CARGO_PKG_VERSION"),
    };
    emit(&report, common)
}

fn oracle(args: &OracleArgs) -> Result<ExitCode, CliError> {
    let common = &args.common;
    let text = fs::read_to_string(&args.path).map_err(|source| CliError::Read { path: args.path.clone(), source })?;
    let s = Scheme::parse(&text).map_err(|source| CliError::Ingest { path: args.path.clone(), source })?;
    if s.order() > common.max_order {
        return Err(CliError::Usage(format!("order {} exceeds --max-order {}", s.order(), common.max_order)));
    }
    let selected = checks::select(&common.checks, &checks::GENERIC_CHECKS).map_err(CliError::Usage)?;
    let points = base_points(&common.base_points, s.order())?;
    let is_scheme = s.verify_axioms().all_hold();

    let mut entries = Vec::new();
    let mut dim_t = None;
    for name in selected {
        if name != "axioms" && !is_scheme {
            // the remaining checks presuppose a scheme
            continue;
        }
        let (entry, outcome) = timed(common.timings, || checks::run_generic(name, &s, &points))?;
        entries.push(entry);
        dim_t = outcome.dim_t.or(dim_t);
    }
    if !is_scheme && entries.is_empty() {
        entries.push(CheckEntry::from_report(&checks::axioms(&s), None));
    }
    let report = Report {
        moduli: None,
        order: s.order(),
        num_classes: s.num_classes(),
        base_points: points,
        dim_t,
        dim_formula: None,
        matrix_block: None,
        one_dim_count: None,
        checks: entries,
        version: env!("CARGO_PKG_VERSION"),
    };
    emit(&report, common)
}

#[derive(Serialize)]
struct NamedMatrix<'a, S> {
    name: String,
    matrix: &'a Matrix<S>,
}

fn dump<S: Serialize>(dir: &Path, file: &str, items: &[NamedMatrix<'_, S>]) -> Result<(), CliError> {
    let path = dir.join(file);
    let mut text = serde_json::to_string_pretty(items)?;
    text.push('\n');
    fs::write(&path, text).map_err(|source| CliError::Write { path, source })
}

fn export(args: &ExportArgs) -> Result<ExitCode, CliError> {
    let m = moduli_within(&args.moduli, args.max_order)?;
    let s = wreath_of_cyclics(&m);
    write_output(args.out.as_deref(), &s.to_table_string())?;
    if let Some(dir) = &args.matrices {
        if args.base_point >= s.order() {
            return Err(CliError::Usage(format!("base point {} out of range for order {}", args.base_point, s.order())));
        }
        fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.clone(), source })?;
        let ctx = make_context::<Rational>(&s, args.base_point)?.convert(|q| CycloNum::rational(q.clone()));
        let label = |i: usize| m.index(i).map(|idx| idx.to_string()).unwrap_or_default();
        let adjacency: Vec<_> =
            ctx.adjacencies().iter().enumerate().map(|(i, a)| NamedMatrix { name: format!("A_{}", label(i)), matrix: a }).collect();
        dump(dir, "adjacency.json", &adjacency)?;
        let duals: Vec<_> =
            ctx.duals().iter().enumerate().map(|(i, e)| NamedMatrix { name: format!("E*_{}", label(i)), matrix: e }).collect();
        dump(dir, "dual_idempotents.json", &duals)?;
        let f = build_f_family(&ctx, &m)?;
        let members: Vec<_> = f
            .members()
            .iter()
            .map(|x| NamedMatrix { name: format!("F_{}{}", x.outer, x.inner), matrix: &x.matrix })
            .collect();
        dump(dir, "f_family.json", &members)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let outcome = match &cli.command {
        Command::Verify(a) => verify(a),
        Command::Oracle(a) => oracle(a),
        Command::Export(a) => export(a),
    };
    outcome.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::from(e.exit_code())
    })
}
