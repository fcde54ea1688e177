//! Diagnostics shared by every pass, with human and JSON-lines rendering.

use std::fmt;

use serde::Serialize;

use crate::ast::Span;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    /// `RULE/kind` for typing errors, `parse/kind` and so on for the
    /// other passes.
    pub code: String,
    pub severity: Severity,
    pub message: String,
    pub span: Span,
    pub file: Option<String>,
}

#[derive(Serialize)]
struct Json<'a> {
    code: &'a str,
    severity: Severity,
    message: &'a str,
    start: usize,
    end: usize,
    file: Option<&'a str>,
}

impl Diagnostic {
    pub fn error(code: impl Into<String>, message: impl Into<String>, span: Span) -> Diagnostic {
        Diagnostic {
            code: code.into(),
            severity: Severity::Error,
            message: message.into(),
            span,
            file: None,
        }
    }

    pub fn in_file(mut self, file: &str) -> Diagnostic {
        self.file = Some(file.to_string());
        self
    }

    /// The part of the code after the rule, e.g. `conversion-failure`.
    pub fn kind(&self) -> &str {
        self.code.rsplit('/').next().unwrap_or(&self.code)
    }

    /// True if `pattern` is the full code or its kind.
    pub fn matches(&self, pattern: &str) -> bool {
        self.code == pattern || self.kind() == pattern
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&Json {
            code: &self.code,
            severity: self.severity,
            message: &self.message,
            start: self.span.start,
            end: self.span.end,
            file: self.file.as_deref(),
        })
        .expect("diagnostic serializes")
    }

    /// `file:line:col: error[code]: message`, resolving the span against
    /// `source` when given.
    pub fn render(&self, source: Option<&str>) -> String {
        let file = self.file.as_deref().unwrap_or("<input>");
        let pos = match source {
            Some(src) => {
                let (l, c) = line_col(src, self.span.start);
                format!("{file}:{l}:{c}")
            }
            None => format!("{file}:{}", self.span.start),
        };
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        format!("{pos}: {sev}[{}]: {}", self.code, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}", self.code, self.message)
    }
}

/// 1-based line and column of a byte offset.
pub fn line_col(src: &str, offset: usize) -> (usize, usize) {
    let offset = offset.min(src.len());
    let before = &src[..floor_char_boundary(src, offset)];
    let line = before.matches('\n').count() + 1;
    let col = before.rsplit('\n').next().map(|s| s.chars().count()).unwrap_or(0) + 1;
    (line, col)
}

fn floor_char_boundary(s: &str, mut i: usize) -> usize {
    while i > 0 && !s.is_char_boundary(i) {
        i -= 1;
    }
    i
}
