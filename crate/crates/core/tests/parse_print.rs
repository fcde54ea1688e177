mod common;

use common::read_corpus;
use dcalc::alpha::alpha_equal_decl;
use dcalc::ast::{Body, Decl, Expr};
use dcalc::parser::{parse, parse_expr, parse_with, PreludeMode};
use dcalc::printer::print_program;

#[test]
fn parses_bool_data() {
    let p = parse(&read_corpus("bool_data.dd")).unwrap();
    let user: Vec<&Decl> = p.user_decls().collect();
    match user[0] {
        Decl::Data(d) => {
            assert_eq!(&*d.name, "Bool");
            let names: Vec<&str> = d.ctors.iter().map(|c| &*c.name).collect();
            assert_eq!(names, ["True", "False"]);
        }
        d => panic!("expected data, got {}", d.kind()),
    }
    match user[1] {
        Decl::Def(d) => {
            assert_eq!(&*d.name, "neg");
            assert_eq!(d.cases.len(), 2);
        }
        d => panic!("expected def, got {}", d.kind()),
    }
}

#[test]
fn lambda_is_a_comatch_with_one_ap_cocase() {
    let p = parse(&read_corpus("webserver_before.dd")).unwrap();
    let e = parse_expr("\\state. Return(state.counter(False))", &p).unwrap();
    match e {
        Expr::LocalComatch { cocases, .. } => {
            assert_eq!(cocases.len(), 1);
            assert_eq!(&*cocases[0].name, "ap");
            match &cocases[0].body {
                Body::Term(Expr::Producer { name, args }) => {
                    assert_eq!(&**name, "Return");
                    assert!(matches!(&args[0], Expr::Consumer { name, .. } if &**name == "counter"));
                }
                b => panic!("unexpected body {b:?}"),
            }
        }
        e => panic!("expected a comatch, got {e:?}"),
    }
}

#[test]
fn empty_file_is_empty_program() {
    assert!(parse_with("", PreludeMode::Never).unwrap().decls.is_empty());
    assert_eq!(parse("").unwrap().user_decls().count(), 0);
}

#[test]
fn prints_codef_in_source_syntax() {
    let p = parse(&read_corpus("bool_codata.dd")).unwrap();
    let text = print_program(&p);
    assert!(text.contains("codef True: Bool { neg => False }"), "{text}");
}

#[test]
fn empty_program_prints_empty() {
    assert_eq!(print_program(&parse_with("", PreludeMode::Never).unwrap()), "");
}

#[test]
fn webserver_round_trips() {
    let p1 = parse(&read_corpus("webserver_before.dd")).unwrap();
    let p2 = parse(&print_program(&p1)).unwrap();
    assert_eq!(p1.decls.len(), p2.decls.len());
    for (a, b) in p1.decls.iter().zip(&p2.decls) {
        assert!(alpha_equal_decl(a, b), "{} changed", a.name());
    }
}

#[test]
fn syntax_errors_are_reported() {
    let d = parse("data Bool { True, ").unwrap_err();
    assert!(!d.is_empty());
    let d = parse("def Bool.neg: Bool { True => Nope }\ndata Bool { True, False }").unwrap_err();
    assert!(d.iter().any(|d| d.message.contains("Nope")), "{d:?}");
}
