//! Corpus manifests: one `FILE<TAB>EXPECTATION` per line.
//!
//! Expectations are `accept`, `reject(KIND)`, `roundtrip(T, ...)` or
//! `roundtrip(*)` for every type, and `evaluate(EXPR, VALUE)`. Blank lines
//! and lines starting with `#` are ignored; paths are relative to the
//! manifest.

use std::fmt;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use crate::alpha::{alpha_equal, equivalent_programs};
use crate::check::{check_program, infer_closed, CheckOptions};
use crate::eval::{evaluate, Outcome, DEFAULT_BUDGET};
use crate::parser::{parse, parse_expr};
use crate::printer::print_expr;
use crate::xfunc::{transpose, type_names};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expectation {
    Accept,
    Reject(String),
    /// `None` means every type of the program.
    Roundtrip(Option<Vec<String>>),
    Evaluate { expr: String, value: String },
}

impl fmt::Display for Expectation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expectation::Accept => write!(f, "accept"),
            Expectation::Reject(k) => write!(f, "reject({k})"),
            Expectation::Roundtrip(None) => write!(f, "roundtrip(*)"),
            Expectation::Roundtrip(Some(ts)) => write!(f, "roundtrip({})", ts.join(", ")),
            Expectation::Evaluate { expr, value } => write!(f, "evaluate({expr}, {value})"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Entry {
    pub file: String,
    pub expectation: Expectation,
    pub line: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManifestError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ManifestError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

pub fn parse_manifest(text: &str) -> Result<Vec<Entry>, ManifestError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let t = raw.trim();
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let err = |m: &str| ManifestError { line, message: m.to_string() };
        let (file, exp) = t.split_once('\t').ok_or_else(|| err("expected FILE<TAB>EXPECTATION"))?;
        let expectation = parse_expectation(exp.trim()).ok_or_else(|| err("unknown expectation"))?;
        out.push(Entry { file: file.trim().to_string(), expectation, line });
    }
    Ok(out)
}

fn parse_expectation(s: &str) -> Option<Expectation> {
    if s == "accept" {
        return Some(Expectation::Accept);
    }
    let (head, rest) = s.split_once('(')?;
    let inner = rest.strip_suffix(')')?.trim();
    match head.trim() {
        "reject" if !inner.is_empty() => Some(Expectation::Reject(inner.to_string())),
        "roundtrip" if inner == "*" => Some(Expectation::Roundtrip(None)),
        "roundtrip" => Some(Expectation::Roundtrip(Some(
            inner.split(',').map(|t| t.trim().to_string()).filter(|t| !t.is_empty()).collect(),
        ))),
        "evaluate" => {
            let at = top_level_comma(inner)?;
            Some(Expectation::Evaluate {
                expr: inner[..at].trim().to_string(),
                value: inner[at + 1..].trim().to_string(),
            })
        }
        _ => None,
    }
}

fn top_level_comma(s: &str) -> Option<usize> {
    let mut depth = 0i32;
    for (i, c) in s.char_indices() {
        match c {
            '(' | '{' => depth += 1,
            ')' | '}' => depth -= 1,
            ',' if depth == 0 => return Some(i),
            _ => {}
        }
    }
    None
}

/// Runs one expectation against the source of its file.
pub fn run_expectation(src: &str, e: &Expectation) -> Result<(), String> {
    let first = |d: &[crate::diagnostic::Diagnostic]| {
        d.first().map(|d| format!("{}: {}", d.code, d.message)).unwrap_or_default()
    };
    match e {
        Expectation::Accept => {
            let p = parse(src).map_err(|d| first(&d))?;
            check_program(&p).map(|_| ()).map_err(|d| first(&d))
        }
        Expectation::Reject(kind) => {
            let diags = match parse(src) {
                Err(d) => d,
                Ok(p) => match check_program(&p) {
                    Ok(_) => return Err("accepted".into()),
                    Err(d) => d,
                },
            };
            if diags.iter().any(|d| d.matches(kind)) {
                Ok(())
            } else {
                Err(format!("rejected with {} instead", first(&diags)))
            }
        }
        Expectation::Roundtrip(types) => {
            let p = parse(src).map_err(|d| first(&d))?;
            let lifted = check_program(&p).map_err(|d| first(&d))?.program;
            let types = match types {
                Some(ts) => ts.clone(),
                None => type_names(&lifted).iter().map(|t| t.to_string()).collect(),
            };
            for t in &types {
                let (once, _) = transpose(&lifted, t).map_err(|e| format!("{t}: {e}"))?;
                check_program(&once).map_err(|d| format!("{t}: {}", first(&d)))?;
                let (twice, _) = transpose(&once, t).map_err(|e| format!("{t}: {e}"))?;
                equivalent_programs(&twice, &lifted).map_err(|e| format!("{t}: {e}"))?;
            }
            Ok(())
        }
        Expectation::Evaluate { expr, value } => {
            let p = parse(src).map_err(|d| first(&d))?;
            check_program(&p).map_err(|d| first(&d))?;
            let e = parse_expr(expr, &p).map_err(|d| first(&d))?;
            let v = parse_expr(value, &p).map_err(|d| first(&d))?;
            infer_closed(&p, &e, CheckOptions::default()).map_err(|d| first(&d))?;
            match evaluate(&e, &p, DEFAULT_BUDGET) {
                Outcome::Value { value: got, .. } if alpha_equal(&got, &v) => Ok(()),
                Outcome::Value { value: got, .. } => Err(format!("evaluated to {}", print_expr(&got, &p))),
                Outcome::BudgetExhausted { steps, .. } => Err(format!("no value after {steps} steps")),
                Outcome::Stuck { at, .. } => Err(format!("stuck at {}", print_expr(&at, &p))),
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct EntryResult {
    pub entry: Entry,
    pub outcome: Result<(), String>,
}

impl EntryResult {
    pub fn passed(&self) -> bool {
        self.outcome.is_ok()
    }

    pub fn line(&self) -> String {
        match &self.outcome {
            Ok(()) => format!("PASS  {}  {}", self.entry.file, self.entry.expectation),
            Err(m) => format!("FAIL  {}  {}: {m}", self.entry.file, self.entry.expectation),
        }
    }
}

/// Runs every entry in parallel; results are in manifest order. Fails
/// with the missing path if a file cannot be read.
pub fn run_manifest(entries: &[Entry], base: &Path) -> Result<Vec<EntryResult>, PathBuf> {
    let mut sources = Vec::with_capacity(entries.len());
    for e in entries {
        let path = base.join(&e.file);
        match std::fs::read_to_string(&path) {
            Ok(s) => sources.push(s),
            Err(_) => return Err(path),
        }
    }
    Ok(entries
        .par_iter()
        .zip(sources.par_iter())
        .map(|(e, src)| EntryResult { entry: e.clone(), outcome: run_expectation(src, &e.expectation) })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_expectations() {
        let m = parse_manifest(
            "# comment\n\na.dd\taccept\nb.dd\treject(conversion-failure)\nc.dd\troundtrip(Bool, Nat)\n\
             d.dd\troundtrip(*)\ne.dd\tevaluate(S(Z).plus(S(Z)), S(S(Z)))\n",
        )
        .unwrap();
        let es: Vec<_> = m.iter().map(|e| e.expectation.clone()).collect();
        assert_eq!(
            es,
            vec![
                Expectation::Accept,
                Expectation::Reject("conversion-failure".into()),
                Expectation::Roundtrip(Some(vec!["Bool".into(), "Nat".into()])),
                Expectation::Roundtrip(None),
                Expectation::Evaluate { expr: "S(Z).plus(S(Z))".into(), value: "S(S(Z))".into() },
            ]
        );
        assert_eq!(m[0].line, 3);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert_eq!(parse_manifest("a.dd accept").unwrap_err().line, 1);
        assert!(parse_manifest("a.dd\tmaybe").is_err());
    }

    #[test]
    fn empty_manifest_passes() {
        let r = run_manifest(&parse_manifest("").unwrap(), Path::new(".")).unwrap();
        assert!(r.is_empty());
    }
}
