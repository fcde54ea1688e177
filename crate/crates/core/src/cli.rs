//! The `dcalc` command line.
//!
//! Exit codes: 0 success, 1 diagnostics, 2 evaluation budget exhausted,
//! 3 evaluation stuck, 4 a transformed program failed to typecheck, 64 usage
//! error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::check::{check_program_with, infer_closed, CheckOptions};
use crate::diagnostic::Diagnostic;
use crate::eval::{evaluate, Outcome, DEFAULT_BUDGET};
use crate::manifest::{parse_manifest, run_manifest};
use crate::parser::{parse_expr, parse_with, PreludeMode};
use crate::printer::{print_expr, print_program};
use crate::xfunc::{transpose, XfuncError};
use crate::ast::Program;

pub const EXIT_OK: u8 = 0;
pub const EXIT_DIAGNOSTICS: u8 = 1;
pub const EXIT_BUDGET: u8 = 2;
pub const EXIT_STUCK: u8 = 3;
pub const EXIT_XFUNC: u8 = 4;
pub const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "dcalc", version, about = "Typecheck, run and transform programs with data and codata types")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
pub struct Common {
    /// Do not add the bundled `Fun` and `Π` declarations.
    #[arg(long)]
    pub no_prelude: bool,
    /// Print diagnostics as JSON, one per line.
    #[arg(long)]
    pub json: bool,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Typecheck programs.
    Check {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// β-step budget of each conversion check.
        #[arg(long)]
        fuel: Option<u64>,
        #[command(flatten)]
        common: Common,
    },
    /// Evaluate a closed expression in the scope of a program.
    Run {
        file: PathBuf,
        #[arg(long)]
        expr: String,
        /// Maximum number of evaluation steps.
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        fuel: u64,
        #[command(flatten)]
        common: Common,
    },
    /// Lift local matches and comatches to top-level declarations.
    Lift {
        file: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Defunctionalize a codata type or refunctionalize a data type.
    Xfunc {
        file: PathBuf,
        #[arg(short, long = "type")]
        ty: String,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Pretty-print a program.
    Fmt {
        file: PathBuf,
        #[arg(short, long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Run the expectations of a corpus manifest.
    Corpus {
        manifest: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn diags(&mut self, diags: &[Diagnostic], file: &Path, src: Option<&str>, json: bool) {
        let name = file.display().to_string();
        for d in diags {
            let d = d.clone().in_file(&name);
            if json {
                let _ = writeln!(self.out, "{}", d.to_json());
            } else {
                let _ = writeln!(self.err, "{}", d.render(src));
            }
        }
    }

    fn emit(&mut self, text: &str, to: &Option<PathBuf>) -> u8 {
        match to {
            Some(path) => match std::fs::write(path, text) {
                Ok(()) => EXIT_OK,
                Err(e) => {
                    let _ = writeln!(self.err, "cannot write {}: {e}", path.display());
                    EXIT_USAGE
                }
            },
            None => {
                let _ = self.out.write_all(text.as_bytes());
                EXIT_OK
            }
        }
    }
}

/// Parses arguments and runs the command; returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind::*;
            return if matches!(e.kind(), DisplayHelp | DisplayVersion) {
                let _ = write!(out, "{e}");
                EXIT_OK
            } else {
                let _ = write!(err, "{e}");
                EXIT_USAGE
            };
        }
    };
    let mut io = Io { out, err };
    dispatch(cli.command, &mut io)
}

fn read(path: &Path, io: &mut Io<'_>) -> Result<String, u8> {
    std::fs::read_to_string(path).map_err(|e| {
        let _ = writeln!(io.err, "cannot read {}: {e}", path.display());
        EXIT_USAGE
    })
}

fn load(path: &Path, common: Common, io: &mut Io<'_>) -> Result<(String, Program), u8> {
    let src = read(path, io)?;
    let mode = if common.no_prelude { PreludeMode::Never } else { PreludeMode::Auto };
    match parse_with(&src, mode) {
        Ok(p) => Ok((src, p)),
        Err(d) => {
            io.diags(&d, path, Some(&src), common.json);
            Err(EXIT_DIAGNOSTICS)
        }
    }
}

fn checked(path: &Path, common: Common, opts: CheckOptions, io: &mut Io<'_>) -> Result<(String, crate::check::TypedProgram), u8> {
    let (src, p) = load(path, common, io)?;
    match check_program_with(&p, opts) {
        Ok(tp) => Ok((src, tp)),
        Err(d) => {
            io.diags(&d, path, Some(&src), common.json);
            Err(EXIT_DIAGNOSTICS)
        }
    }
}

fn dispatch(cmd: Command, io: &mut Io<'_>) -> u8 {
    let r = match cmd {
        Command::Check { files, fuel, common } => {
            let mut opts = CheckOptions::default();
            if let Some(f) = fuel {
                opts.fuel = f;
            }
            let mut code = EXIT_OK;
            for f in &files {
                match checked(f, common, opts, io) {
                    Ok(_) => {
                        if !common.json {
                            let _ = writeln!(io.out, "{}: ok", f.display());
                        }
                    }
                    Err(c) => code = code.max(c),
                }
            }
            Ok(code)
        }
        Command::Run { file, expr, fuel, common } => run_cmd(&file, &expr, fuel, common, io),
        Command::Lift { file, out, common } => {
            checked(&file, common, CheckOptions::default(), io).map(|(_, tp)| io.emit(&print_program(&tp.program), &out))
        }
        Command::Xfunc { file, ty, out, common } => xfunc_cmd(&file, &ty, &out, common, io),
        Command::Fmt { file, out, common } => load(&file, common, io).map(|(_, p)| io.emit(&print_program(&p), &out)),
        Command::Corpus { manifest, json } => corpus_cmd(&manifest, json, io),
    };
    r.unwrap_or_else(|c| c)
}

fn run_cmd(file: &Path, expr: &str, fuel: u64, common: Common, io: &mut Io<'_>) -> Result<u8, u8> {
    let (_, tp) = checked(file, common, CheckOptions::default(), io)?;
    let p = &tp.source;
    let e = match parse_expr(expr, p) {
        Ok(e) => e,
        Err(d) => {
            io.diags(&d, Path::new("--expr"), Some(expr), common.json);
            return Err(EXIT_DIAGNOSTICS);
        }
    };
    if let Err(d) = infer_closed(p, &e, CheckOptions::default()) {
        io.diags(&d, Path::new("--expr"), Some(expr), common.json);
        return Err(EXIT_DIAGNOSTICS);
    }
    match evaluate(&e, p, fuel) {
        Outcome::Value { value, .. } => {
            let _ = writeln!(io.out, "{}", print_expr(&value, p));
            Ok(EXIT_OK)
        }
        Outcome::BudgetExhausted { term, steps } => {
            let _ = writeln!(io.err, "no value after {steps} steps; reached {}", print_expr(&term, p));
            Ok(EXIT_BUDGET)
        }
        Outcome::Stuck { at, steps, .. } => {
            let _ = writeln!(io.err, "stuck after {steps} steps at {}", print_expr(&at, p));
            Ok(EXIT_STUCK)
        }
    }
}

fn xfunc_cmd(file: &Path, ty: &str, out: &Option<PathBuf>, common: Common, io: &mut Io<'_>) -> Result<u8, u8> {
    let (_, tp) = checked(file, common, CheckOptions::default(), io)?;
    let (result, report) = match transpose(&tp.program, ty) {
        Ok(r) => r,
        Err(e) => {
            io.diags(&[e.to_diagnostic()], file, None, common.json);
            return Err(EXIT_DIAGNOSTICS);
        }
    };
    if let Err(d) = crate::check::check_program(&result) {
        let e = XfuncError::Recheck(d.clone());
        let _ = writeln!(io.err, "{e}");
        let _ = writeln!(io.err, "{}", serde_json::to_string(&report).expect("report serializes"));
        io.diags(&d, file, None, common.json);
        return Err(EXIT_XFUNC);
    }
    Ok(io.emit(&print_program(&result), out))
}

fn corpus_cmd(manifest: &Path, json: bool, io: &mut Io<'_>) -> Result<u8, u8> {
    let text = read(manifest, io)?;
    let entries = parse_manifest(&text).map_err(|e| {
        let _ = writeln!(io.err, "{}: {e}", manifest.display());
        EXIT_USAGE
    })?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let results = run_manifest(&entries, base).map_err(|missing| {
        let _ = writeln!(io.err, "cannot read {}", missing.display());
        EXIT_USAGE
    })?;
    let failed = results.iter().filter(|r| !r.passed()).count();
    for r in &results {
        if json {
            let v = serde_json::json!({
                "file": r.entry.file,
                "expectation": r.entry.expectation.to_string(),
                "pass": r.passed(),
                "reason": r.outcome.as_ref().err(),
            });
            let _ = writeln!(io.out, "{v}");
        } else {
            let _ = writeln!(io.out, "{}", r.line());
        }
    }
    if !json {
        let _ = writeln!(io.out, "{} passed, {failed} failed", results.len() - failed);
    }
    Ok(if failed == 0 { EXIT_OK } else { EXIT_DIAGNOSTICS })
}
