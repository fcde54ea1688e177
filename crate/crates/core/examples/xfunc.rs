//! Defunctionalizes or refunctionalizes one type of a program and prints
//! the result, which is typechecked again before printing.
//!
//! `cargo run --example xfunc -- corpus/church_data.dd Nat`

use std::process::ExitCode;

use dcalc::parser::parse;
use dcalc::printer::print_program;
use dcalc::xfunc::xfunc;

fn main() -> ExitCode {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/bool_data.dd").into());
    let ty = args.next().unwrap_or_else(|| "Bool".into());
    let Ok(src) = std::fs::read_to_string(&path) else {
        eprintln!("cannot read {path}");
        return ExitCode::from(64);
    };
    let program = match parse(&src) {
        Ok(p) => p,
        Err(diags) => {
            for d in diags {
                eprintln!("{}", d.in_file(&path).render(Some(&src)));
            }
            return ExitCode::from(1);
        }
    };
    match xfunc(&program, &ty) {
        Ok((out, report)) => {
            eprintln!(
                "{} {}: {} producers x {} consumers",
                report.direction, report.type_name, report.producers, report.consumers
            );
            print!("{}", print_program(&out));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_diagnostic().in_file(&path).render(None));
            ExitCode::from(1)
        }
    }
}
