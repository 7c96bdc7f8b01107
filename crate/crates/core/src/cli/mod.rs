//! Batch front end: `apcorr <command> --spec field.toml [knobs] --out dir`.
//!
//! Every command validates its knobs before any numerical kernel starts, then
//! writes `<command>.csv` (first line `# provenance: ...`), `<command>.json`
//! and, when the command plots a series, `<command>.svg` into the output directory.
//!
//! Exit codes: 0 success, 2 invalid input, 3 solver non-convergence, 4 a
//! flagged property violation, 64 unknown command, 66 unreadable spec or
//! config, 74 failure to write a report.

mod commands;
mod knobs;
mod plot;
mod report;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use crate::error::Error;
use crate::field::FieldSpec;

pub use commands::LoadedSpec;
pub use knobs::{Knobs, Paths};
pub use plot::{emit_plot, render_plot, PlotKind, Series};
pub use report::{render_csv, write_report, Provenance, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_NONCONVERGENCE: i32 = 3;
pub const EXIT_FLAGGED: i32 = 4;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_NOINPUT: i32 = 66;
const EXIT_IO: i32 = 74;

#[derive(Debug, Parser)]
#[command(name = "apcorr", version, about = "Correctors for almost periodic coefficient fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Args)]
struct Invocation {
    #[command(flatten)]
    paths: Paths,
    #[command(flatten)]
    knobs: Knobs,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Ellipticity, resonance, Diophantine constant and derivative bounds of a field.
    FieldCheck(Invocation),
    /// Discrepancy sigma(M, R) of the winding matrix.
    Sigma(Invocation),
    /// rho_k(a, R).
    Rho(Invocation),
    /// rho_*(a, R).
    RhoStar(Invocation),
    /// omega_k(a, R).
    Omega(Invocation),
    /// Heat-flow ergodic bound with fitted constants.
    Ergodic(Invocation),
    /// Multiscale Poincare right-hand side against the oscillation.
    Poincare(Invocation),
    /// L1 norms of heat kernel derivatives and the fitted constant.
    Hermite(Invocation),
    /// Approximate correctors at the given scales.
    Corrector(Invocation),
    /// Corrector sup over a range of scales with the plateau slope.
    Sweep(Invocation),
    /// Dyadic corrector differences and their decay.
    PsiDecay(Invocation),
    /// Difference-corrector equation against differences of correctors.
    ZetaCheck(Invocation),
    /// Effective coefficient matrix.
    Effective(Invocation),
    /// Dirichlet homogenization error against eps.
    Rate(Invocation),
}

impl Command {
    fn parts(&self) -> (&'static str, &Invocation) {
        match self {
            Command::FieldCheck(i) => ("field-check", i),
            Command::Sigma(i) => ("sigma", i),
            Command::Rho(i) => ("rho", i),
            Command::RhoStar(i) => ("rho-star", i),
            Command::Omega(i) => ("omega", i),
            Command::Ergodic(i) => ("ergodic", i),
            Command::Poincare(i) => ("poincare", i),
            Command::Hermite(i) => ("hermite", i),
            Command::Corrector(i) => ("corrector", i),
            Command::Sweep(i) => ("sweep", i),
            Command::PsiDecay(i) => ("psi-decay", i),
            Command::ZetaCheck(i) => ("zeta-check", i),
            Command::Effective(i) => ("effective", i),
            Command::Rate(i) => ("rate", i),
        }
    }
}

/// Exit code for a library error.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonConvergence { .. } => EXIT_NONCONVERGENCE,
        Error::Read { .. } | Error::Parse(_) => EXIT_NOINPUT,
        Error::Io(_) => EXIT_IO,
        Error::InvalidInput(_)
        | Error::Guard { .. }
        | Error::NotElliptic(_)
        | Error::Resonant { .. }
        | Error::NotDiophantine { .. }
        | Error::EmptyReport => EXIT_INVALID,
    }
}

/// Runs one command and returns its report with the provenance used.
fn execute(name: &str, inv: &Invocation) -> Result<(Report, Provenance), Error> {
    let file = match &inv.paths.config {
        Some(p) => Knobs::load(p)?,
        None => Knobs::default(),
    };
    let knobs = inv.knobs.clone().or(file);
    let spec = match &inv.paths.spec {
        Some(path) => {
            let bytes = std::fs::read(path).map_err(|source| Error::Read {
                path: path.clone(),
                source,
            })?;
            let text = String::from_utf8(bytes.clone()).map_err(|e| Error::Parse(e.to_string()))?;
            let spec = FieldSpec::parse(&text)?;
            let field = spec.build()?;
            Some(LoadedSpec { bytes, spec, field })
        }
        None => None,
    };
    let ctx = commands::Ctx {
        knobs: &knobs,
        spec: spec.as_ref(),
        out: &inv.paths.out,
    };
    let report = match name {
        "field-check" => commands::field_check(&ctx),
        "sigma" => commands::sigma_cmd(&ctx),
        "rho" => commands::rho_cmd(&ctx),
        "rho-star" => commands::rho_star_cmd(&ctx),
        "omega" => commands::omega_cmd(&ctx),
        "ergodic" => commands::ergodic(&ctx),
        "poincare" => commands::poincare(&ctx),
        "hermite" => commands::hermite(&ctx),
        "corrector" => commands::corrector(&ctx),
        "sweep" => commands::sweep(&ctx),
        "psi-decay" => commands::psi_decay(&ctx),
        "zeta-check" => commands::zeta_check(&ctx),
        "effective" => commands::effective(&ctx),
        "rate" => commands::rate(&ctx),
        _ => unreachable!("every subcommand is dispatched"),
    }?;
    let prov = Provenance::new(spec.as_ref().map(|s| s.bytes.as_slice()), &knobs)?;
    Ok((report, prov))
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                ErrorKind::InvalidSubcommand
                | ErrorKind::MissingSubcommand
                | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => EXIT_USAGE,
                _ => EXIT_INVALID,
            };
        }
    };
    let (name, inv) = cli.command.parts();
    let (report, prov) = match execute(name, inv) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("apcorr {name}: {e}");
            return exit_code(&e);
        }
    };
    let written = match write_report(&report, &prov, &inv.paths.out) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("apcorr {name}: {e}");
            return exit_code(&e);
        }
    };
    let mut out = std::io::stdout().lock();
    for p in &written {
        let _ = writeln!(out, "wrote {}", p.display());
    }
    if report.flags.is_empty() {
        EXIT_OK
    } else {
        for f in &report.flags {
            eprintln!("apcorr {name}: flagged: {f}");
        }
        EXIT_FLAGGED
    }
}
