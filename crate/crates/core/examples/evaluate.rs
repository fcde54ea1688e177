//! Evaluates an expression in the scope of a program, printing each step.
//!
//! `cargo run --example evaluate -- corpus/peano_codata.dd 'S(Z).mul(S(S(Z)))'`

use std::process::ExitCode;

use dcalc::ast::Globals;
use dcalc::check::{check_program, infer_closed, CheckOptions};
use dcalc::eval::{step, Step};
use dcalc::parser::{parse, parse_expr};
use dcalc::printer::print_expr;

const MAX_STEPS: usize = 10_000;

fn main() -> ExitCode {
    let mut args = std::env::args().skip(1);
    let path = args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/peano_data.dd").into());
    let expr = args.next().unwrap_or_else(|| "S(S(Z)).mul(S(S(Z)))".into());
    let Ok(src) = std::fs::read_to_string(&path) else {
        eprintln!("cannot read {path}");
        return ExitCode::from(64);
    };
    let checked = parse(&src).and_then(|p| check_program(&p));
    let tp = match checked {
        Ok(tp) => tp,
        Err(diags) => {
            for d in diags {
                eprintln!("{}", d.in_file(&path).render(Some(&src)));
            }
            return ExitCode::from(1);
        }
    };
    let p = &tp.source;
    let e = match parse_expr(&expr, p) {
        Ok(e) => e,
        Err(diags) => {
            for d in diags {
                eprintln!("{}", d.render(Some(&expr)));
            }
            return ExitCode::from(1);
        }
    };
    match infer_closed(p, &e, CheckOptions::default()) {
        Ok(ty) => println!("{} : {}", print_expr(&e, p), print_expr(&ty, p)),
        Err(diags) => {
            for d in diags {
                eprintln!("{}", d.render(Some(&expr)));
            }
            return ExitCode::from(1);
        }
    }
    let index = p.index();
    let g = Globals::new(p, &index);
    let mut cur = e;
    for n in 1..=MAX_STEPS {
        match step(&cur, g) {
            Step::Next(next) => {
                println!("{n:>4}  {}", print_expr(&next, p));
                cur = next;
            }
            Step::AtValue => return ExitCode::SUCCESS,
            Step::Stuck(at) => {
                eprintln!("stuck at {}", print_expr(&at, p));
                return ExitCode::from(3);
            }
        }
    }
    eprintln!("no value after {MAX_STEPS} steps");
    ExitCode::from(2)
}
