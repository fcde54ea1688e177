mod common;

use common::read_corpus;
use dcalc::alpha::alpha_equal;
use dcalc::ast::{Expr, Globals, Program};
use dcalc::eval::{decompose, evaluate, step, Decomposition, Frame, Outcome, Redex, Step, DEFAULT_BUDGET};
use dcalc::parser::{parse, parse_expr};

fn load(f: &str) -> Program {
    parse(&read_corpus(f)).unwrap()
}

fn e(p: &Program, s: &str) -> Expr {
    parse_expr(s, p).unwrap()
}

#[test]
fn decompose_examples() {
    let p = load("peano_data.dd");
    let ix = p.index();
    let g = Globals::new(&p, &ix);
    assert!(matches!(decompose(&e(&p, "S(Z)"), g), Decomposition::Value));
    match decompose(&e(&p, "S(Z.plus(Z))"), g) {
        Decomposition::Redex(ctx, Redex::Observe { scrutinee, consumer, args }) => {
            assert_eq!(ctx.frames.len(), 1);
            assert!(matches!(&ctx.frames[0], Frame::Producer { name, .. } if &**name == "S"));
            assert_eq!(scrutinee, e(&p, "Z"));
            assert_eq!(&*consumer, "plus");
            assert_eq!(args, vec![e(&p, "Z")]);
        }
        d => panic!("{d:?}"),
    }

    let b = load("bool_data.dd");
    let ix = b.index();
    let g = Globals::new(&b, &ix);
    match decompose(&e(&b, "True.neg"), g) {
        Decomposition::Redex(ctx, Redex::Observe { scrutinee, consumer, args }) => {
            assert!(ctx.is_hole());
            assert_eq!(scrutinee, e(&b, "True"));
            assert_eq!(&*consumer, "neg");
            assert!(args.is_empty());
        }
        d => panic!("{d:?}"),
    }
}

#[test]
fn arguments_reduce_left_to_right() {
    let p = load("peano_data.dd");
    let ix = p.index();
    let g = Globals::new(&p, &ix);
    match decompose(&e(&p, "Z.plus(Z).plus(Z.plus(Z))"), g) {
        Decomposition::Redex(ctx, Redex::Observe { args, .. }) => {
            assert!(matches!(&ctx.frames[0], Frame::ConsumerHead { .. }));
            assert_eq!(args, vec![e(&p, "Z")]);
        }
        d => panic!("{d:?}"),
    }
}

fn one_step(f: &str, from: &str, to: &str) {
    let p = load(f);
    let ix = p.index();
    match step(&e(&p, from), Globals::new(&p, &ix)) {
        Step::Next(n) => assert!(alpha_equal(&n, &e(&p, to)), "{from} stepped to {n:?}"),
        s => panic!("{from}: {s:?}"),
    }
}

#[test]
fn step_examples() {
    one_step("bool_data.dd", "True.neg", "False");
    one_step("bool_codata.dd", "True.neg", "False");
    one_step("peano_data.dd", "Z.plus(S(Z))", "S(Z)");
    one_step("stream.dd", "Ones.head(Nat)", "S(Z)");
}

#[test]
fn step_at_value() {
    let p = load("peano_data.dd");
    let ix = p.index();
    assert!(matches!(step(&e(&p, "S(S(Z))"), Globals::new(&p, &ix)), Step::AtValue));
}

#[test]
fn evaluate_examples() {
    let p = load("peano_data.dd");
    assert_eq!(evaluate(&e(&p, "S(Z).plus(S(Z))"), &p, DEFAULT_BUDGET).value(), Some(&e(&p, "S(S(Z))")));

    let src = read_corpus("pair_codata.dd") + "data Nat { Z, S(n: Nat) }\ndata Bool { True, False }\n";
    let q = parse(&src).unwrap();
    let v = evaluate(&e(&q, "Pair(Nat, Bool, Z, True).π₁(Nat, Bool)"), &q, DEFAULT_BUDGET);
    assert_eq!(v.value(), Some(&e(&q, "Z")));

    match evaluate(&e(&p, "S(Z)"), &p, DEFAULT_BUDGET) {
        Outcome::Value { value, steps } => {
            assert_eq!(steps, 0);
            assert_eq!(value, e(&p, "S(Z)"));
        }
        o => panic!("{o:?}"),
    }
}

#[test]
fn budget_is_respected() {
    let p = load("peano_data.dd");
    match evaluate(&e(&p, "S(S(Z)).mul(S(S(Z)))"), &p, 2) {
        Outcome::BudgetExhausted { steps, .. } => assert_eq!(steps, 2),
        o => panic!("{o:?}"),
    }
}

#[test]
fn open_terms_are_stuck() {
    let p = load("peano_data.dd");
    let x = dcalc::ast::Var::fresh("x");
    let t = Expr::cons(Expr::var(&x), "plus", vec![e(&p, "Z")]);
    assert!(matches!(evaluate(&t, &p, DEFAULT_BUDGET), Outcome::Stuck { .. }));
}

#[test]
fn local_comatches_evaluate_without_lifting() {
    let p = load("church_data.dd");
    let t = e(&p, "S(S(Z)).iter(Nat, Z, \\n. S(n))");
    assert_eq!(evaluate(&t, &p, DEFAULT_BUDGET).value(), Some(&e(&p, "S(S(Z))")));
}

#[test]
fn local_matches_evaluate_without_lifting() {
    let p = load("bool_data.dd");
    let t = e(&p, "True.match { True => False, False => True }");
    assert_eq!(evaluate(&t, &p, DEFAULT_BUDGET).value(), Some(&e(&p, "False")));
}

#[test]
fn lets_unfold_on_values() {
    let p = load("labels.dd");
    assert_eq!(evaluate(&e(&p, "two"), &p, DEFAULT_BUDGET).value(), Some(&e(&p, "S(S(Z))")));
}

#[test]
fn presentations_agree() {
    let (d, c) = (load("peano_data.dd"), load("peano_codata.dd"));
    for t in ["S(S(Z)).mul(S(S(S(Z))))", "Z.mul(S(Z)).plus(S(Z).plus(Z))"] {
        let a = evaluate(&e(&d, t), &d, DEFAULT_BUDGET);
        let b = evaluate(&e(&c, t), &c, DEFAULT_BUDGET);
        assert_eq!(a.value(), b.value(), "{t}");
        assert!(a.value().is_some());
    }
}
