//! Command-line front end.
//!
//! [`run`] takes the full argument vector and returns the exit status with
//! the captured stdout/stderr, so the binary and the tests share one path.
//!
//! Exit codes: 0 success or PASS, 1 verification FAIL, 2 usage or input
//! error, 3 runtime arithmetic error (overflow, zero divisor).

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::cost::{audit, compare_tables};
use crate::eval::{eval_exact, eval_fixed, sweep, EvalError, FixedPointConfig, WidthReport};
use crate::library::{self, list_builtins};
use crate::numeric::Rational;
use crate::scheme::{export_dot, from_json, to_json, Scheme};
use crate::verify::{verify_exhaustive, verify_symbolic, ReferenceId, ReferenceKind, VerifyError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_RUNTIME: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "cxsq",
    version,
    about = "Build, verify, audit and simulate squarer-based complex arithmetic schemes"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// List built-in schemes.
    List,
    /// Print stages, matrices, labels and erratum note.
    Show { scheme: String },
    /// Evaluate on one input vector.
    Eval {
        scheme: String,
        /// Comma-separated rationals (`p` or `p/q`; decimals only with --fixed).
        #[arg(long, allow_hyphen_values = true)]
        inputs: String,
        /// Fixed-point format `W,f`.
        #[arg(long)]
        fixed: Option<String>,
    },
    /// Check against direct complex arithmetic.
    Verify {
        scheme: String,
        #[arg(long, value_enum)]
        against: Against,
        /// Also compare on the integer grid [-R, R]^n.
        #[arg(long, value_name = "R")]
        exhaustive: Option<u32>,
        /// Scheme input labels feeding the reference arguments in order,
        /// e.g. `a1,b1,a2,b2`.
        #[arg(long)]
        binding: Option<String>,
    },
    /// Count hardware units.
    Audit {
        scheme: String,
        #[arg(long)]
        json: bool,
    },
    /// Compare audits with the published cost tables.
    Tables {
        #[arg(long)]
        json: bool,
    },
    /// Write the scheme as DOT or JSON.
    Export {
        scheme: String,
        #[arg(long, value_enum)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fixed-point simulation over an integer grid.
    Sweep {
        scheme: String,
        #[arg(long)]
        fixed: String,
        #[arg(long, value_name = "R")]
        range: u32,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Against {
    Square,
    Mul,
    Div,
    Product,
}

impl From<Against> for ReferenceKind {
    fn from(a: Against) -> Self {
        match a {
            Against::Square => ReferenceKind::ComplexSquare,
            Against::Mul => ReferenceKind::ComplexMul,
            Against::Div => ReferenceKind::ComplexDiv,
            Against::Product => ReferenceKind::ScalarProduct,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliOutput {
    pub code: u8,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<EvalError> for Failure {
    fn from(e: EvalError) -> Self {
        let code = match e {
            EvalError::DivisionByZero { .. }
            | EvalError::DenominatorIdenticallyZero { .. }
            | EvalError::Overflow { .. } => EXIT_RUNTIME,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<VerifyError> for Failure {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Eval(e) => e.into(),
            other => Failure::usage(other.to_string()),
        }
    }
}

#[derive(Default)]
struct Out {
    code: u8,
    stdout: String,
    stderr: String,
}

pub fn run<I, T>(argv: I) -> CliOutput
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args = match Args::try_parse_from(argv) {
        Ok(a) => a,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                CliOutput {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                CliOutput {
                    code: EXIT_OK,
                    stdout: text,
                    stderr: String::new(),
                }
            };
        }
    };
    let mut out = Out::default();
    if let Err(f) = dispatch(args.command, &mut out) {
        out.code = f.code;
        let _ = writeln!(out.stderr, "error: {}", f.message);
    }
    CliOutput {
        code: out.code,
        stdout: out.stdout,
        stderr: out.stderr,
    }
}

fn dispatch(cmd: Command, out: &mut Out) -> Result<(), Failure> {
    match cmd {
        Command::List => {
            let entries: Vec<_> = list_builtins()
                .into_iter()
                .map(|n| library::builtin(n).expect("listed"))
                .collect();
            let pad = entries.iter().map(|e| e.name.len()).max().unwrap_or(0);
            for e in entries {
                let _ = writeln!(out.stdout, "{:<pad$}  {}", e.name, e.description);
            }
        }
        Command::Show { scheme } => {
            let s = load(&scheme)?;
            out.stdout.push_str(&s.to_string());
        }
        Command::Eval {
            scheme,
            inputs,
            fixed,
        } => {
            let s = load(&scheme)?;
            warn_erratum(&s, out);
            match fixed {
                None => {
                    let x = parse_inputs(&inputs, false)?;
                    let y = eval_exact(&s, &x)?;
                    let _ = writeln!(out.stdout, "{}", join(&y));
                }
                Some(format) => {
                    let cfg = parse_fixed(&format)?;
                    let x = parse_inputs(&inputs, true)?;
                    let (y, widths) = eval_fixed(&s, &cfg, &x)?;
                    let _ = writeln!(out.stdout, "{}", join(&y));
                    write_widths(&widths, out);
                }
            }
        }
        Command::Verify {
            scheme,
            against,
            exhaustive,
            binding,
        } => verify_cmd(&scheme, against.into(), exhaustive, binding.as_deref(), out)?,
        Command::Audit { scheme, json } => {
            let s = load(&scheme)?;
            let cost = audit(&s).map_err(|e| Failure::usage(e.to_string()))?;
            if json {
                let text = serde_json::to_string_pretty(&cost).expect("serializable");
                let _ = writeln!(out.stdout, "{text}");
            } else {
                let _ = writeln!(out.stdout, "{cost}");
                if cost.shifts > 0 {
                    let _ = writeln!(out.stdout, "shifts={} (free)", cost.shifts);
                }
            }
        }
        Command::Tables { json } => {
            let cmp = compare_tables();
            if json {
                let text = serde_json::to_string_pretty(&cmp).expect("serializable");
                let _ = writeln!(out.stdout, "{text}");
            } else {
                out.stdout.push_str(&cmp.to_text());
            }
            if !cmp.all_match() {
                out.code = EXIT_FAIL;
            }
        }
        Command::Export {
            scheme,
            format,
            out: path,
        } => {
            let s = load(&scheme)?;
            let text = match format {
                Format::Dot => export_dot(&s).map_err(|e| Failure::usage(e.to_string()))?,
                Format::Json => {
                    s.ensure_valid()
                        .map_err(|e| Failure::usage(e.to_string()))?;
                    to_json(&s) + "\n"
                }
            };
            match path {
                Some(p) => std::fs::write(&p, text)
                    .map_err(|e| Failure::usage(format!("cannot write {}: {e}", p.display())))?,
                None => out.stdout.push_str(&text),
            }
        }
        Command::Sweep {
            scheme,
            fixed,
            range,
            json,
        } => {
            let s = load(&scheme)?;
            let cfg = parse_fixed(&fixed)?;
            let report = sweep(&s, &cfg, range)?;
            if json {
                let text = serde_json::to_string_pretty(&report).expect("serializable");
                let _ = writeln!(out.stdout, "{text}");
            } else {
                let _ = writeln!(
                    out.stdout,
                    "grid R={}: {} points, {} skipped, {} failed",
                    report.radius,
                    report.points,
                    report.skipped,
                    report.failures.len()
                );
                let errs: Vec<String> = s
                    .output_labels
                    .iter()
                    .zip(&report.max_abs_error)
                    .map(|(l, e)| format!("{l}={e}"))
                    .collect();
                let _ = writeln!(out.stdout, "max |fixed - exact|: {}", errs.join(" "));
                write_widths(&report.widths, out);
                for f in &report.failures {
                    let _ = writeln!(out.stdout, "failed at {:?}: {}", f.point, f.error);
                }
            }
            if !report.failures.is_empty() {
                out.code = EXIT_RUNTIME;
            }
        }
    }
    Ok(())
}

fn verify_cmd(
    name: &str,
    kind: ReferenceKind,
    exhaustive: Option<u32>,
    binding: Option<&str>,
    out: &mut Out,
) -> Result<(), Failure> {
    let (s, default_ref) = match name.strip_prefix('@') {
        Some(_) => (load(name)?, None),
        None => {
            let e = library::builtin(name).map_err(|e| Failure::usage(e.to_string()))?;
            (e.scheme, Some(e.reference))
        }
    };
    let reference = match binding {
        Some(labels) => {
            let order: Vec<&str> = labels.split(',').map(str::trim).collect();
            ReferenceId::from_labels(kind, &s.input_labels, &order)?
        }
        None => match default_ref {
            Some(r) if r.kind() == kind => r,
            Some(r) => ReferenceId::new(kind, r.binding().to_vec())
                .unwrap_or_else(|_| ReferenceId::identity(kind)),
            None => ReferenceId::identity(kind),
        },
    };

    let sym = verify_symbolic(&s, &reference)?;
    let _ = writeln!(out.stdout, "{} (symbolic)", sym.verdict);
    for r in &sym.residuals {
        let _ = writeln!(out.stdout, "residual {}: {}", r.label, r);
    }
    let mut passed = sym.passed();

    if let Some(radius) = exhaustive {
        let ex = verify_exhaustive(&s, &reference, radius)?;
        let g = ex.grid.as_ref().expect("exhaustive mode reports grid");
        let _ = writeln!(
            out.stdout,
            "{} (exhaustive R={}: {} points, {} skipped)",
            ex.verdict, g.radius, g.points_tested, g.points_skipped
        );
        if let Some(c) = &g.counterexample {
            let _ = writeln!(
                out.stdout,
                "counterexample {:?}: scheme [{}], reference [{}]",
                c.point,
                join(&c.scheme),
                join(&c.reference)
            );
        }
        passed &= ex.passed();
    }
    if !passed {
        out.code = EXIT_FAIL;
    }
    Ok(())
}

/// Built-in name or `@path/to/scheme.json`.
fn load(arg: &str) -> Result<Scheme, Failure> {
    match arg.strip_prefix('@') {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::usage(format!("cannot read {path}: {e}")))?;
            let s = from_json(&text).map_err(|e| Failure::usage(format!("{path}: {e}")))?;
            s.ensure_valid()
                .map_err(|e| Failure::usage(e.to_string()))?;
            Ok(s)
        }
        None => library::builtin(arg)
            .map(|e| e.scheme)
            .map_err(|e| Failure::usage(e.to_string())),
    }
}

fn warn_erratum(s: &Scheme, out: &mut Out) {
    if let Some(note) = &s.known_erratum {
        let _ = writeln!(
            out.stderr,
            "warning: {} reproduces a known erratum: {note}",
            s.name
        );
    }
}

fn parse_inputs(text: &str, allow_decimal: bool) -> Result<Vec<Rational>, Failure> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            tok.parse::<Rational>()
                .or_else(|e| {
                    if allow_decimal {
                        Rational::from_decimal_str(tok)
                    } else {
                        Err(e)
                    }
                })
                .map_err(|_| Failure::usage(format!("cannot parse input {tok:?} as a rational")))
        })
        .collect()
}

fn parse_fixed(arg: &str) -> Result<FixedPointConfig, Failure> {
    let bad = || Failure::usage(format!("expected --fixed W,f, got {arg:?}"));
    let (w, f) = arg.split_once(',').ok_or_else(bad)?;
    let w: u32 = w.trim().parse().map_err(|_| bad())?;
    let f: u32 = f.trim().parse().map_err(|_| bad())?;
    Ok(FixedPointConfig::new(w, f)?)
}

fn join(v: &[Rational]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn write_widths(w: &WidthReport, out: &mut Out) {
    let fmt = |v: &[u64]| {
        v.iter()
            .map(ToString::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(out.stdout, "magnitude bits, inputs: {}", fmt(&w.inputs));
    for (i, st) in w.stages.iter().enumerate() {
        let _ = writeln!(out.stdout, "magnitude bits, stage {i}: {}", fmt(st));
    }
    let _ = writeln!(out.stdout, "required word bits: {}", w.required_word_bits());
}
