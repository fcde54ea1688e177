//! Solves index equations the way the checker does for each case, and
//! shows which constructors a match must cover.
//!
//! `cargo run --example unify`

use dcalc::ast::{Expr, Globals, Param, Telescope, Var};
use dcalc::check::unify::{unify, Unification};
use dcalc::parser::parse;

fn nat(n: usize) -> Expr {
    (0..n).fold(Expr::prod("Z", vec![]), |e, _| Expr::prod("S", vec![e]))
}

fn s(e: Expr) -> Expr {
    Expr::prod("S", vec![e])
}

fn main() {
    let p = parse("data Nat { Z, S(n: Nat) }\ndata Bool { True, False }").unwrap();
    let index = p.index();
    let g = Globals::new(&p, &index);
    let (x, y) = (Var::fresh("x"), Var::fresh("y"));
    let tel = Telescope(vec![
        Param { var: x.clone(), ty: Expr::typ("Nat", vec![]) },
        Param { var: y.clone(), ty: Expr::typ("Nat", vec![]) },
    ]);
    let (vx, vy) = (Expr::var(&x), Expr::var(&y));
    let problems = [
        ("x = S(y)", vec![vx.clone()], vec![s(vy.clone())]),
        ("S(S(x)) = S(y)", vec![s(s(vx.clone()))], vec![s(vy.clone())]),
        ("Z = S(x)", vec![nat(0)], vec![s(vx.clone())]),
        ("x = S(x)", vec![vx.clone()], vec![s(vx.clone())]),
        ("x, S(x) = y, S(S(Z))", vec![vx.clone(), s(vx.clone())], vec![vy.clone(), nat(2)]),
        ("x, y = y, True", vec![vx.clone(), vy.clone()], vec![vy, Expr::prod("True", vec![])]),
    ];
    for (name, l, r) in problems {
        match unify(g, &tel, &l, &r, 1_000) {
            Unification::Unifies(theta) => {
                let show = |v: &Var| dcalc::printer::print_expr(&theta.apply(&Expr::var(v)), &p);
                println!("{name:<24} unifies: x := {}, y := {}", show(&x), show(&y));
            }
            Unification::Absurd => println!("{name:<24} absurd"),
            Unification::Undecided(a, b) => println!("{name:<24} undecided on {a:?} = {b:?}"),
        }
    }
}
