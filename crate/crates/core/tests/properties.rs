mod common;

use std::sync::OnceLock;

use common::{lifted, positive_files, read_corpus, TermGen};
use dcalc::alpha::{alpha_equal, alpha_equal_decl};
use dcalc::ast::{Expr, Globals, Param, Program, Telescope, Var};
use dcalc::check::normalize::convertible;
use dcalc::check::unify::{unify, Unification};
use dcalc::check::{check_closed, check_program, infer, CheckOptions};
use dcalc::eval::{evaluate, step, Outcome, Step, DEFAULT_BUDGET};
use dcalc::lift::{closures, lift_term};
use dcalc::parser::{parse, parse_expr};
use dcalc::printer::print_expr;
use dcalc::subst::{identity_substitution, substitute, Subst};
use dcalc::xfunc::{build_matrix, transpose, type_names, Cell};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::SeedableRng;

const ARITH: &str = "
data Nat { Z, S(n: Nat) }
data Bool { True, False }
def Nat.plus(m: Nat): Nat { Z => m, S(n) => S(n.plus(m)) }
def Nat.mul(m: Nat): Nat { Z => Z, S(n) => m.plus(n.mul(m)) }
def Nat.is_zero: Bool { Z => True, S(n) => False }
def Bool.neg: Bool { True => False, False => True }
def Bool.and(c: Bool): Bool { True => c, False => False }
def Bool.pick(a b: Nat): Nat { True => a, False => b }
";

const OPTS: CheckOptions = CheckOptions { fuel: 100_000 };

fn arith() -> &'static Program {
    static P: OnceLock<Program> = OnceLock::new();
    P.get_or_init(|| parse(ARITH).unwrap())
}

struct Open {
    x: Var,
    y: Var,
    gamma: Telescope,
}

fn open() -> Open {
    let (x, y) = (Var::fresh("x"), Var::fresh("y"));
    let gamma = Telescope(vec![
        Param { var: x.clone(), ty: Expr::typ("Nat", vec![]) },
        Param { var: y.clone(), ty: Expr::typ("Bool", vec![]) },
    ]);
    Open { x, y, gamma }
}

fn closed_term(seed: u64, ty: &str, depth: u32) -> Expr {
    let mut rng = StdRng::seed_from_u64(seed);
    TermGen::new(arith()).gen(ty, depth, &mut rng).unwrap()
}

fn open_term(o: &Open, seed: u64, ty: &str, depth: u32) -> Expr {
    let mut rng = StdRng::seed_from_u64(seed);
    TermGen::new(arith()).with_vars(&[(o.x.clone(), "Nat"), (o.y.clone(), "Bool")]).gen(ty, depth, &mut rng).unwrap()
}

fn ty_name() -> impl Strategy<Value = &'static str> {
    prop_oneof![Just("Nat"), Just("Bool")]
}

fn value(e: &Expr) -> Expr {
    evaluate(e, arith(), DEFAULT_BUDGET).value().cloned().expect("terminates")
}

fn conv(a: &Expr, b: &Expr) -> bool {
    let ix = arith().index();
    convertible(Globals::new(arith(), &ix), a, b, OPTS.fuel).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn identity_substitution_is_identity(seed: u64, ty in ty_name()) {
        let o = open();
        let e = open_term(&o, seed, ty, 3);
        let got = substitute(&e, &identity_substitution(&o.gamma), &o.gamma).unwrap();
        prop_assert!(alpha_equal(&got, &e));
    }

    #[test]
    fn substitution_composes(seed: u64, ty in ty_name()) {
        let o = open();
        let e = open_term(&o, seed, ty, 3);
        let t = open_term(&o, seed ^ 1, "Nat", 2);
        let b = closed_term(seed ^ 2, "Bool", 2);
        let mut first = Subst::new();
        first.insert(&o.x, t.clone());
        let mut second = Subst::new();
        second.insert(&o.y, b.clone());
        let mut composed = Subst::new();
        composed.insert(&o.x, second.apply(&t));
        composed.insert(&o.y, b);
        prop_assert!(alpha_equal(&second.apply(&first.apply(&e)), &composed.apply(&e)));
    }

    #[test]
    fn printed_terms_reparse(seed: u64, ty in ty_name()) {
        let e = closed_term(seed, ty, 4);
        let text = print_expr(&e, arith());
        let back = parse_expr(&text, arith()).unwrap();
        prop_assert!(alpha_equal(&back, &e), "{}", text);
    }

    #[test]
    fn alpha_equal_is_an_equivalence(a: u64, b: u64, c: u64, ty in ty_name()) {
        let (a, b, c) = (closed_term(a, ty, 2), closed_term(b, ty, 2), closed_term(c, ty, 2));
        prop_assert!(alpha_equal(&a, &a));
        prop_assert_eq!(alpha_equal(&a, &b), alpha_equal(&b, &a));
        if alpha_equal(&a, &b) && alpha_equal(&b, &c) {
            prop_assert!(alpha_equal(&a, &c));
        }
    }

    // Closed terms are convertible exactly when they evaluate to the same
    // value.
    #[test]
    fn conversion_agrees_with_evaluation(a: u64, b: u64, ty in ty_name()) {
        let (a, b) = (closed_term(a, ty, 3), closed_term(b, ty, 3));
        let same = alpha_equal(&value(&a), &value(&b));
        prop_assert_eq!(conv(&a, &b), same);
        prop_assert_eq!(conv(&b, &a), same);
        prop_assert!(conv(&a, &a));
    }

    #[test]
    fn substitution_lemma(seed: u64, ty in ty_name()) {
        let o = open();
        let e = open_term(&o, seed, ty, 3);
        let t = infer(arith(), &o.gamma, &e, OPTS).unwrap();
        let mut theta = Subst::new();
        theta.insert(&o.x, closed_term(seed ^ 3, "Nat", 2));
        theta.insert(&o.y, closed_term(seed ^ 4, "Bool", 2));
        prop_assert!(check_closed(arith(), &theta.apply(&e), &theta.apply(&t), OPTS).is_ok());
    }

    #[test]
    fn unifiers_equate_both_sides(a: u64, b: u64, ty in ty_name()) {
        let o = open();
        let (l, r) = (open_term(&o, a, ty, 3), open_term(&o, b, ty, 3));
        let ix = arith().index();
        let g = Globals::new(arith(), &ix);
        match unify(g, &o.gamma, &[l.clone()], &[r.clone()], OPTS.fuel) {
            Unification::Unifies(theta) => prop_assert!(conv(&theta.apply(&l), &theta.apply(&r))),
            Unification::Absurd => {
                for n in 0..4 {
                    for b in ["True", "False"] {
                        let mut s = Subst::new();
                        s.insert(&o.x, (0..n).fold(Expr::prod("Z", vec![]), |e, _| Expr::prod("S", vec![e])));
                        s.insert(&o.y, Expr::prod(b, vec![]));
                        prop_assert!(!conv(&s.apply(&l), &s.apply(&r)));
                    }
                }
            }
            // Terms with consumers applied to variables are neutral.
            Unification::Undecided(..) => {}
        }
    }

    #[test]
    fn stepping_is_deterministic_and_values_are_fixed(seed: u64, ty in ty_name()) {
        let e = closed_term(seed, ty, 3);
        let ix = arith().index();
        let g = Globals::new(arith(), &ix);
        match (step(&e, g), step(&e, g)) {
            (Step::Next(a), Step::Next(b)) => prop_assert_eq!(a, b),
            (Step::AtValue, Step::AtValue) => {}
            (a, b) => prop_assert!(false, "{:?} vs {:?}", a, b),
        }
        let v = value(&e);
        prop_assert!(matches!(step(&v, g), Step::AtValue));
    }

    #[test]
    fn parser_never_panics(src in "[ -~\\n]{0,80}") {
        if let Err(ds) = parse(&src) {
            prop_assert!(!ds.is_empty());
            for d in ds {
                prop_assert!(d.span.start <= d.span.end && d.span.end <= src.len(), "{:?}", d);
            }
        }
    }

    #[test]
    fn mangled_corpus_files_get_in_bounds_diagnostics(file in 0usize..64, cut: usize, drop: usize) {
        let files = positive_files();
        let src = read_corpus(&files[file % files.len()]);
        let chars: Vec<char> = src.chars().collect();
        let cut = cut % (chars.len() + 1);
        let drop = drop % (chars.len() + 1);
        let text: String = chars[..cut].iter().enumerate().filter(|(i, _)| *i != drop).map(|(_, c)| *c).collect();
        let ds = match parse(&text) {
            Ok(p) => check_program(&p).err().unwrap_or_default(),
            Err(ds) => ds,
        };
        for d in ds {
            prop_assert!(d.span.start <= d.span.end && d.span.end <= text.len(), "{:?}", d);
        }
    }
}

#[test]
fn conversion_is_transitive_through_values() {
    for seed in 0..64 {
        let a = closed_term(seed, "Nat", 3);
        let b = closed_term(seed + 1000, "Nat", 3);
        let (va, vb) = (value(&a), value(&b));
        assert!(conv(&a, &va) && conv(&va, &a));
        assert_eq!(conv(&a, &b), conv(&a, &vb) && conv(&vb, &b), "{a:?} {b:?}");
    }
}

/// Cell bodies of a matrix by (row, column) name.
fn cells(p: &Program, ty: &str) -> Vec<(String, String, Option<Expr>)> {
    let m = build_matrix(p, ty).unwrap();
    let mut out = Vec::new();
    for (i, r) in m.rows.iter().enumerate() {
        for (j, c) in m.cols.iter().enumerate() {
            let body = match &m.cells[i][j] {
                Cell::Possible(e) => Some(e.clone()),
                Cell::Absurd => None,
            };
            out.push((r.name.to_string(), c.name.to_string(), body));
        }
    }
    out.sort_by(|a, b| (&a.0, &a.1).cmp(&(&b.0, &b.1)));
    out
}

#[test]
fn transposition_moves_cells_without_rewriting_them() {
    for f in positive_files() {
        let p = lifted(&read_corpus(&f));
        for t in type_names(&p) {
            let (q, _) = transpose(&p, &t).unwrap();
            let (before, after) = (cells(&p, &t), cells(&q, &t));
            assert_eq!(before.len(), after.len(), "{f} {t}");
            for (a, b) in before.iter().zip(&after) {
                assert_eq!((&a.0, &a.1), (&b.0, &b.1), "{f} {t}");
                let same = match (&a.2, &b.2) {
                    (Some(x), Some(y)) => alpha_equal(x, y),
                    (None, None) => true,
                    _ => false,
                };
                assert!(same, "{f} {t}: cell ({}, {}) changed", a.0, a.1);
            }
        }
    }
}

#[test]
fn transposition_preserves_evaluation() {
    let mut rng = StdRng::seed_from_u64(7);
    let mut checked = 0;
    for f in positive_files() {
        let p = lifted(&read_corpus(&f));
        let gen = TermGen::new(&p);
        let terms: Vec<Expr> =
            gen.inhabited().iter().flat_map(|t| (0..3).filter_map(|_| gen.gen(t, 3, &mut rng)).collect::<Vec<_>>()).collect();
        for t in type_names(&p) {
            let (q, _) = transpose(&p, &t).unwrap();
            for e in &terms {
                let a = evaluate(e, &p, DEFAULT_BUDGET);
                let b = evaluate(e, &q, DEFAULT_BUDGET);
                match (a.value(), b.value()) {
                    (Some(x), Some(y)) => assert!(alpha_equal(x, y), "{f} {t}: {}", print_expr(e, &p)),
                    _ => panic!("{f} {t}: {:?} / {:?}", a, b),
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 500, "{checked}");
}

#[test]
fn lifting_preserves_evaluation() {
    let mut rng = StdRng::seed_from_u64(11);
    let mut checked = 0;
    for f in positive_files() {
        let src = parse(&read_corpus(&f)).unwrap();
        let tp = check_program(&src).unwrap();
        let cl = closures(&tp.records);
        let gen = TermGen::new(&src);
        for t in gen.inhabited() {
            for _ in 0..4 {
                let Some(e) = gen.gen(&t, 3, &mut rng) else { continue };
                let a = evaluate(&e, &tp.source, DEFAULT_BUDGET);
                let b = evaluate(&e, &tp.program, DEFAULT_BUDGET);
                match (&a, &b) {
                    (Outcome::Value { value: x, .. }, Outcome::Value { value: y, .. }) => {
                        assert!(alpha_equal(&lift_term(x, &cl), y), "{f}: {}", print_expr(&e, &src))
                    }
                    _ => panic!("{f}: {a:?} / {b:?}"),
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 100, "{checked}");
}

#[test]
fn lifting_is_deterministic_and_idempotent() {
    for f in positive_files() {
        let src = read_corpus(&f);
        let a = check_program(&parse(&src).unwrap()).unwrap();
        let b = check_program(&parse(&src).unwrap()).unwrap();
        assert_eq!(a.generated(), b.generated(), "{f}");
        let again = check_program(&a.program).unwrap();
        assert!(again.records.is_empty(), "{f}");
        assert!(a.program.decls.iter().zip(&again.program.decls).all(|(x, y)| alpha_equal_decl(x, y)), "{f}");
    }
}

#[test]
fn corpus_report_is_deterministic() {
    let dir = common::corpus_dir();
    let text = std::fs::read_to_string(dir.join("manifest.tsv")).unwrap();
    let entries = dcalc::manifest::parse_manifest(&text).unwrap();
    let run = || {
        dcalc::manifest::run_manifest(&entries, &dir).unwrap().iter().map(|r| r.line()).collect::<Vec<_>>()
    };
    assert_eq!(run(), run());
}

#[test]
fn type_in_type() {
    let p = arith();
    assert_eq!(dcalc::check::infer_closed(p, &Expr::Type, OPTS).unwrap(), Expr::Type);
    assert!(check_closed(p, &Expr::typ("Nat", vec![]), &Expr::Type, OPTS).is_ok());
}
