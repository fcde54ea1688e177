//! A dependently typed language with symmetric data and codata types.
//!
//! Programs are parsed with [`parser::parse`], typechecked with
//! [`check::check_program`], evaluated with [`eval::evaluate`], printed with
//! [`printer::print_program`], and transformed with [`lift::lift_program`]
//! and the [`xfunc`] module, which defunctionalizes codata types and
//! refunctionalizes data types.

pub mod alpha;
pub mod ast;
pub mod diagnostic;
pub mod parser;
pub mod subst;
pub mod printer;
pub mod check;
pub mod lift;
pub mod eval;
pub mod xfunc;
pub mod manifest;
pub mod cli;
