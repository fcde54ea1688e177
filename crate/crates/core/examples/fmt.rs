//! Pretty-prints a program and checks that the output parses back to the
//! same declarations.
//!
//! cargo run --example fmt -- corpus/bool_proof_data.dd

use std::{env, fs, process};

use dcalc::alpha::equivalent_programs;
use dcalc::parser::parse;
use dcalc::printer::print_program;

fn main() {
    let path = env::args().nth(1).unwrap_or_else(|| {
        concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/bool_proof_data.dd").to_string()
    });
    let src = fs::read_to_string(&path).unwrap_or_else(|e| {
        eprintln!("{path}: {e}");
        process::exit(64);
    });
    let program = match parse(&src) {
        Ok(p) => p,
        Err(diags) => {
            for d in diags {
                eprintln!("{}", d.in_file(&path).render(Some(&src)));
            }
            process::exit(1);
        }
    };
    let printed = print_program(&program);
    print!("{printed}");
    let reparsed = parse(&printed).expect("printed source parses");
    if let Err(e) = equivalent_programs(&program, &reparsed) {
        eprintln!("round trip changed the program: {e}");
        process::exit(1);
    }
}
