//! Command-line front end.
//!
//! Exit codes: 0 success or certified, 1 refuted, 2 inconclusive, 3 input
//! error. Payloads are deterministic JSON; wall-clock timings go to a
//! `.meta.json` sidecar next to any `--out` file.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::certify::{certify_with, CertifyOptions, CitedFacts, CERTIFIABLE_Q};
use crate::error::{Error, Result};
use crate::hermitian::{enumerate_unital, SUPPORTED_Q};
use crate::meataxe::{is_absolutely_irreducible, is_irreducible, qb_module, st2_module, Verdict};
use crate::perm::{pair_orbit_count, stabilizer_orbit_sizes, UnitalAction};
use crate::traces::traces_report;

pub const EXIT_OK: i32 = 0;
pub const EXIT_REFUTED: i32 = 1;
pub const EXIT_INCONCLUSIVE: i32 = 2;
pub const EXIT_INPUT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "u3cert",
    version,
    about = "Certify very simplicity of the unital module of PSU3(q) over GF(2)"
)]
pub struct RunConfig {
    /// Increase log verbosity (repeatable).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the isotropic points of the Hermitian form.
    Unital {
        #[arg(long)]
        q: u32,
        /// Write the point list here instead of stdout.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Build the permutation group and report its order.
    Group {
        #[arg(long)]
        q: u32,
        #[arg(long = "check-2transitive")]
        check_2transitive: bool,
    },
    /// Irreducibility tests for the zero-sum or adjoint module.
    Meataxe {
        #[arg(long)]
        q: u32,
        #[arg(long, value_enum, default_value_t = ModuleKind::Qb)]
        module: ModuleKind,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Torus trace census and escape witnesses.
    Traces {
        #[arg(long)]
        q: u32,
    },
    /// Run the full pipeline and emit a certificate.
    Certify {
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Cited facts file; defaults to the embedded one.
        #[arg(long)]
        facts: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModuleKind {
    Qb,
    St2,
}

fn require_q(q: u32, allowed: &[u32]) -> Result<()> {
    if allowed.contains(&q) {
        Ok(())
    } else {
        Err(Error::UnsupportedQ(u64::from(q)))
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(OsString::from).unwrap_or_default();
    name.push(".meta.json");
    out.with_file_name(name)
}

/// Writes `payload` to `out` (plus a timing sidecar) or to stdout.
fn emit(
    payload: &str,
    out: Option<&Path>,
    stdout: &mut dyn Write,
    started: Instant,
    command: &str,
) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, payload)?;
            let meta = json!({
                "command": command,
                "output": path.display().to_string(),
                "elapsed_seconds": started.elapsed().as_secs_f64(),
                "version": env!("CARGO_PKG_VERSION"),
            });
            std::fs::write(sidecar_path(path), to_json(&meta)?)?;
        }
        None => stdout.write_all(payload.as_bytes())?,
    }
    Ok(())
}

/// Parses `argv` (including the program name) and runs it, writing to the
/// given streams. Returns the exit code.
pub fn run<I, T>(argv: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                stderr.write_all(text.as_bytes())
            } else {
                stdout.write_all(text.as_bytes())
            };
            return code;
        }
    };
    init_logging(config.verbose);
    match execute(&config, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match e {
                Error::Internal(_) | Error::Construction(_) => EXIT_REFUTED,
                _ => EXIT_INPUT,
            }
        }
    }
}

/// Logs go to stderr; `RUST_LOG` overrides the flag-derived level. Only the
/// first call in a process takes effect.
fn init_logging(verbose: u8) {
    let level = match verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new()
        .filter_level(level)
        .parse_default_env()
        .try_init();
}

/// [`run`] against the process streams.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(argv, &mut stdout.lock(), &mut stderr.lock())
}

fn execute(config: &RunConfig, stdout: &mut dyn Write) -> Result<i32> {
    let started = Instant::now();
    match &config.command {
        Command::Unital { q, emit: path } => {
            require_q(*q, &SUPPORTED_Q)?;
            let unital = enumerate_unital(*q)?;
            emit(
                &to_json(&unital.to_json())?,
                path.as_deref(),
                stdout,
                started,
                "unital",
            )?;
            Ok(EXIT_OK)
        }
        Command::Group {
            q,
            check_2transitive,
        } => {
            require_q(*q, &SUPPORTED_Q)?;
            let action = UnitalAction::build(*q)?;
            let report = action.order_report();
            let matches = report.computed_order == report.expected_psu3_order;
            let mut out = json!({
                "q": q,
                "n": action.unital.n(),
                "order": report,
                "order_matches_formula": matches,
                "essential_generators": action.group.essential_generators(),
            });
            let mut ok = matches;
            if *check_2transitive {
                let sizes = stabilizer_orbit_sizes(&action.group, 0)?;
                let pairs = pair_orbit_count(action.unital.n(), &action.essential_perms());
                let doubly = sizes == [1, action.unital.n() - 1] && pairs == 1;
                ok &= doubly;
                out["double_transitivity"] = json!({
                    "stabilizer_orbit_sizes": sizes,
                    "ordered_pair_orbits": pairs,
                    "holds": doubly,
                });
            }
            stdout.write_all(to_json(&out)?.as_bytes())?;
            Ok(if ok { EXIT_OK } else { EXIT_REFUTED })
        }
        Command::Meataxe { q, module, seed } => {
            require_q(*q, &CERTIFIABLE_Q)?;
            let (value, verdict, absolute) = match module {
                ModuleKind::Qb => {
                    let action = UnitalAction::build(*q)?;
                    let qb = qb_module(&action.essential_perms())?;
                    meataxe_json(&qb.module, *seed, "qb", *q)?
                }
                ModuleKind::St2 => meataxe_json(&st2_module(*q)?, *seed, "st2", *q)?,
            };
            stdout.write_all(to_json(&value)?.as_bytes())?;
            Ok(match (verdict, absolute) {
                (Verdict::Irreducible, Some(true)) => EXIT_OK,
                (Verdict::Reducible, _) | (_, Some(false)) => EXIT_REFUTED,
                _ => EXIT_INCONCLUSIVE,
            })
        }
        Command::Traces { q } => {
            require_q(*q, &SUPPORTED_Q)?;
            stdout.write_all(to_json(&traces_report(*q)?)?.as_bytes())?;
            Ok(EXIT_OK)
        }
        Command::Certify {
            q,
            seed,
            facts,
            out,
        } => {
            require_q(*q, &CERTIFIABLE_Q)?;
            let facts = facts
                .as_deref()
                .map(|p| CitedFacts::load(p, *q))
                .transpose()?;
            let cert = certify_with(
                *q,
                *seed,
                CertifyOptions {
                    facts,
                    generators: None,
                },
            )?;
            emit(&cert.to_json(), out.as_deref(), stdout, started, "certify")?;
            Ok(cert.verdict.exit_code())
        }
    }
}

fn meataxe_json<F: crate::linalg::Field>(
    module: &crate::meataxe::FpModule<F>,
    seed: u64,
    name: &str,
    q: u32,
) -> Result<(serde_json::Value, Verdict, Option<bool>)> {
    let cert = is_irreducible(module, seed);
    let absolute = if cert.verdict == Verdict::Irreducible {
        Some(is_absolutely_irreducible(module, seed)?)
    } else {
        None
    };
    let abs_flag = absolute
        .as_ref()
        .and_then(|a| a.is_absolutely_irreducible());
    let value = json!({
        "q": q,
        "module": name,
        "dimension": module.dim(),
        "field_order": module.field().size(),
        "generators": module.actions().len(),
        "verdict": cert.verdict,
        "seed": seed,
        "attempts": cert.attempts,
        "witness": cert.witness,
        "absolute": absolute,
    });
    Ok((value, cert.verdict, abs_flag))
}
