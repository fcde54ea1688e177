//! Lifts every local match and comatch of a file to the top level and
//! prints the result.
//!
//! `cargo run --example lift -- corpus/preservation_data.dd`

use std::process::ExitCode;

use dcalc::lift::lift_program;
use dcalc::parser::parse;
use dcalc::printer::print_program;

fn main() -> ExitCode {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/webserver_before.dd").into());
    let Ok(src) = std::fs::read_to_string(&path) else {
        eprintln!("cannot read {path}");
        return ExitCode::from(64);
    };
    match parse(&src).and_then(|p| lift_program(&p)) {
        Ok(lifted) => {
            print!("{}", print_program(&lifted));
            ExitCode::SUCCESS
        }
        Err(diags) => {
            for d in diags {
                eprintln!("{}", d.in_file(&path).render(Some(&src)));
            }
            ExitCode::from(1)
        }
    }
}
