//! Source text to programs: lexing, parsing, resolution and the prelude.

pub mod grammar;
pub mod lexer;
pub mod resolve;

use crate::ast::{Expr, Program};
use crate::diagnostic::Diagnostic;

/// Function types and dependent function types, added to programs that do
/// not declare their own.
pub const PRELUDE: &str = "\
codata Fun(a b: Type) { Fun(a, b).ap(a b: Type, x: a): b }
codata Π(a: Type, p: a -> Type) { Π(a, p).dap(a: Type, p: a -> Type, x: a): p.ap(a, Type, x) }
";

const PRELUDE_NAMES: [&str; 4] = ["Fun", "Π", "ap", "dap"];

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PreludeMode {
    /// Add the prelude unless the file declares one of its names.
    #[default]
    Auto,
    Never,
}

fn raw(src: &str) -> (Vec<grammar::RawDecl>, Vec<Diagnostic>) {
    let (toks, mut diags) = lexer::lex(src);
    let mut p = grammar::Parser::new(&toks);
    let decls = p.program();
    diags.extend(p.diags);
    (decls, diags)
}

/// Parses a program, adding the prelude unless the file declares `Fun`,
/// `Π`, `ap` or `dap` itself.
pub fn parse(src: &str) -> Result<Program, Vec<Diagnostic>> {
    parse_with(src, PreludeMode::Auto)
}

pub fn parse_with(src: &str, mode: PreludeMode) -> Result<Program, Vec<Diagnostic>> {
    let (user, mut diags) = raw(src);
    let wants_prelude = mode == PreludeMode::Auto
        && !user.iter().any(|d| declares_prelude_name(d));
    let prelude = if wants_prelude { raw(PRELUDE).0 } else { Vec::new() };
    let (program, rdiags) = resolve::resolve_program(prelude, user);
    diags.extend(rdiags);
    if diags.is_empty() {
        Ok(program)
    } else {
        Err(diags)
    }
}

fn declares_prelude_name(d: &grammar::RawDecl) -> bool {
    use grammar::RawDecl::*;
    let mut names = vec![d.name().to_string()];
    match d {
        Data { ctors, .. } => names.extend(ctors.iter().map(|c| c.name.clone())),
        Codata { dtors, .. } => names.extend(dtors.iter().map(|c| c.name.clone())),
        _ => {}
    }
    names.iter().any(|n| PRELUDE_NAMES.contains(&n.as_str()))
}

/// Parses an expression in the scope of `program`'s declarations.
pub fn parse_expr(src: &str, program: &Program) -> Result<Expr, Vec<Diagnostic>> {
    let (toks, mut diags) = lexer::lex(src);
    let mut p = grammar::Parser::new(&toks);
    let raw = p.expr();
    let at_end = p.at_eof();
    diags.extend(p.diags);
    let raw = match raw {
        Ok(r) if at_end => r,
        Ok(r) => {
            diags.push(Diagnostic::error(
                "parse/trailing-input",
                "unexpected input after the expression",
                crate::ast::Span::new(r.span().end, src.len()),
            ));
            return Err(diags);
        }
        Err(()) => return Err(diags),
    };
    let (e, rdiags) = resolve::resolve_expr(&raw, program, "expr");
    diags.extend(rdiags);
    if diags.is_empty() {
        Ok(e)
    } else {
        Err(diags)
    }
}
