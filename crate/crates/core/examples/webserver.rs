//! Runs the routes of the web server example with a concrete state, before
//! and after lifting its local comatches, and refunctionalizes the routes.
//!
//! `cargo run --example webserver`

use dcalc::alpha::alpha_equal;
use dcalc::check::check_program;
use dcalc::eval::{evaluate, DEFAULT_BUDGET};
use dcalc::lift::{closures, lift_term};
use dcalc::parser::{parse, parse_expr};
use dcalc::printer::{print_decl, print_expr};
use dcalc::xfunc::xfunc;

/// A state implementation, so that the routes can be run.
const STATE: &str = "
codef St(b: Bool, n: Nat): State(b) {
  login(u) => St(u.hasCredentials, n),
  logout => St(False, n),
  increment => St(True, S(n)),
  set(m) => St(True, m),
  set_idempotent(c, m) => Refl(State(True), St(True, m)),
  setResult(c, m) => Refl(Nat, m),
  counter(c) => n }
";

const REQUESTS: [&str; 4] = [
    "Index.get.ap(State(False), Response, St(False, S(S(Z))))",
    "Index.post.ap(State(False), ×_(State(False), Response), St(False, Z)).snd(State(False), Response)",
    "Index.put(S(Z)).ap(State(False), ×_(State(False), Response), St(False, Z)).fst(State(False), Response)",
    "Index.post.ap(State(False), ×_(State(False), Response), St(False, Z))",
];

fn main() {
    let src = include_str!("../corpus/webserver_before.dd").to_string() + STATE;
    let tp = check_program(&parse(&src).expect("parses")).expect("typechecks");
    let cl = closures(&tp.records);
    for r in REQUESTS {
        let before = evaluate(&parse_expr(r, &tp.source).unwrap(), &tp.source, DEFAULT_BUDGET);
        let after = evaluate(&parse_expr(r, &tp.program).unwrap(), &tp.program, DEFAULT_BUDGET);
        let (a, b) = (before.value().unwrap(), after.value().unwrap());
        println!("{r}");
        println!("  native: {}", print_expr(a, &tp.source));
        println!("  lifted: {}", print_expr(b, &tp.program));
        assert!(alpha_equal(&lift_term(a, &cl), b));
    }
    let (routes, report) = xfunc(&tp.program, "Route").expect("transposes");
    println!("\n-- {} {}", report.direction, report.type_name);
    for d in routes.user_decls().filter(|d| matches!(&**d.name(), "Route" | "Index")) {
        println!("{}\n", print_decl(d, &routes));
    }
}
