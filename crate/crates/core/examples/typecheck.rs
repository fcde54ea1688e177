//! Typechecks source files and reports what lifting generated.
//!
//! `cargo run --example typecheck -- corpus/stream.dd corpus/church_codata.dd`

use std::process::ExitCode;

use dcalc::check::check_program;
use dcalc::parser::parse;

fn main() -> ExitCode {
    let mut files: Vec<String> = std::env::args().skip(1).collect();
    if files.is_empty() {
        files.push(concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/bool_proof_data.dd").into());
    }
    let mut failed = false;
    for f in &files {
        let src = match std::fs::read_to_string(f) {
            Ok(s) => s,
            Err(e) => {
                eprintln!("{f}: {e}");
                return ExitCode::from(64);
            }
        };
        let result = parse(&src).map_err(|d| (d, "parse")).and_then(|p| check_program(&p).map_err(|d| (d, "check")));
        match result {
            Ok(tp) => {
                let n = tp.source.user_decls().count();
                println!("{f}: ok ({n} declarations, {} lifted)", tp.records.len());
                for r in &tp.records {
                    let vars: Vec<String> = r.closure.iter().map(|p| p.var.name.to_string()).collect();
                    println!("    {}({})", r.label, vars.join(", "));
                }
            }
            Err((diags, _)) => {
                failed = true;
                for d in diags {
                    eprintln!("{}", d.in_file(f).render(Some(&src)));
                }
            }
        }
    }
    if failed { ExitCode::from(1) } else { ExitCode::SUCCESS }
}
