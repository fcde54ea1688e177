mod common;

use common::read_corpus;
use dcalc::alpha::{alpha_equal, alpha_equal_decl};
use dcalc::ast::{Body, Decl, Expr, Param, Telescope, Var};
use dcalc::check::check_program;
use dcalc::eval::{evaluate, DEFAULT_BUDGET};
use dcalc::lift::{free_closure, lift_program};
use dcalc::parser::{parse, parse_expr};

#[test]
fn identity_lambda_becomes_a_codefinition() {
    let p = parse("data Nat { Z, S(n: Nat) }\nlet id: Nat -> Nat := \\x. x;").unwrap();
    let tp = check_program(&p).unwrap();
    assert_eq!(tp.records.len(), 1);
    let label = &tp.records[0].label;
    let codef = tp
        .program
        .decls
        .iter()
        .find_map(|d| match d {
            Decl::Codef(c) if &c.name == label => Some(c),
            _ => None,
        })
        .expect("generated codef");
    assert_eq!(codef.cocases.len(), 1);
    let ap = &codef.cocases[0];
    assert_eq!(&*ap.name, "ap");
    assert_eq!(ap.body, Body::Term(Expr::var(&ap.params[2])));
    let body = tp
        .program
        .decls
        .iter()
        .find_map(|d| match d {
            Decl::Let(l) if &*l.name == "id" => Some(&l.body),
            _ => None,
        })
        .unwrap();
    assert_eq!(body, &Expr::prod(label, vec![]));

    check_program(&tp.program).unwrap();
    let e = parse_expr("id.ap(Nat, Nat, Z)", &tp.program).unwrap();
    let v = evaluate(&e, &tp.program, DEFAULT_BUDGET);
    assert_eq!(v.value(), Some(&Expr::prod("Z", vec![])));
}

#[test]
fn nested_lifts_in_post() {
    let p = parse(&read_corpus("webserver_before.dd")).unwrap();
    let owner = p.decls.iter().position(|d| &**d.name() == "post").unwrap();
    let tp = check_program(&p).unwrap();
    let rs: Vec<_> = tp.records.iter().filter(|r| r.owner == owner).collect();
    assert_eq!(rs.len(), 2);
    // Innermost first.
    let names = |t: &Telescope| t.vars().iter().map(|v| v.name.to_string()).collect::<Vec<_>>();
    assert_eq!(names(&rs[0].closure), ["state"]);
    assert!(rs[1].closure.is_empty());
}

#[test]
fn core_programs_are_unchanged() {
    for f in ["bool_data.dd", "peano_codata.dd", "induction_data.dd"] {
        let p = parse(&read_corpus(f)).unwrap();
        let q = lift_program(&p).unwrap();
        assert_eq!(p.decls.len(), q.decls.len(), "{f}");
        assert!(p.decls.iter().zip(&q.decls).all(|(a, b)| alpha_equal_decl(a, b)), "{f}");
    }
}

#[test]
fn lifted_declarations_follow_their_owner() {
    let p = parse(&read_corpus("webserver_before.dd")).unwrap();
    let tp = check_program(&p).unwrap();
    let names: Vec<&str> = tp.program.decls.iter().map(|d| &**d.name()).collect();
    let post = names.iter().position(|n| *n == "post").unwrap();
    for r in tp.records.iter().filter(|r| &**p.decls[r.owner].name() == "post") {
        let at = names.iter().position(|n| **n == *r.label).unwrap();
        assert!(at > post && at <= post + 2, "{} at {at}", r.label);
    }
}

#[test]
fn labels_are_kept_on_named_comatches() {
    let tp = check_program(&parse(&read_corpus("labels.dd")).unwrap()).unwrap();
    assert!(tp.generated().iter().any(|l| &**l == "Id"), "{:?}", tp.generated());
}

#[test]
fn closure_includes_type_dependencies() {
    let (n, v) = (Var::fresh("n"), Var::fresh("v"));
    let ctx = Telescope(vec![
        Param { var: n.clone(), ty: Expr::typ("Nat", vec![]) },
        Param { var: v.clone(), ty: Expr::typ("Vec", vec![Expr::typ("Bool", vec![]), Expr::var(&n)]) },
    ]);
    let cl = free_closure(&Expr::var(&v), &ctx).unwrap();
    assert_eq!(cl.vars(), vec![n, v]);
    assert!(free_closure(&Expr::prod("Z", vec![]), &ctx).unwrap().is_empty());
}

#[test]
fn closure_follows_context_order() {
    let (x, y) = (Var::fresh("x"), Var::fresh("y"));
    let ctx = Telescope(vec![
        Param { var: x.clone(), ty: Expr::typ("Nat", vec![]) },
        Param { var: y.clone(), ty: Expr::typ("Bool", vec![]) },
    ]);
    let e = Expr::prod("P", vec![Expr::var(&y), Expr::var(&x)]);
    let cl = free_closure(&e, &ctx).unwrap();
    assert_eq!(cl.vars(), vec![x.clone(), y]);
    assert!(alpha_equal(&cl.0[0].ty, &Expr::typ("Nat", vec![])));
}
