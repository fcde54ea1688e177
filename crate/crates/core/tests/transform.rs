mod common;

use common::{lifted, read_corpus};
use dcalc::alpha::{alpha_equal, equivalent_programs};
use dcalc::ast::{Decl, Expr};
use dcalc::check::check_program;
use dcalc::parser::parse;
use dcalc::xfunc::{build_matrix, defunctionalize, refunctionalize, xfunc, Cell, Direction, Presentation, XfuncError};

fn cell(m: &dcalc::xfunc::TypeMatrix, row: &str, col: &str) -> Cell {
    let r = m.rows.iter().position(|r| &*r.name == row).unwrap();
    let c = m.cols.iter().position(|c| &*c.name == col).unwrap();
    m.cells[r][c].clone()
}

#[test]
fn bool_matrix() {
    let m = build_matrix(&lifted(&read_corpus("bool_data.dd")), "Bool").unwrap();
    assert_eq!(m.presentation, Presentation::Data);
    assert_eq!((m.rows.len(), m.cols.len()), (2, 1));
    assert!(matches!(cell(&m, "True", "neg"), Cell::Possible(e) if e == Expr::prod("False", vec![])));
    assert!(matches!(cell(&m, "False", "neg"), Cell::Possible(e) if e == Expr::prod("True", vec![])));
}

#[test]
fn church_matrix_cell_mentions_row_and_column_binders() {
    let m = build_matrix(&lifted(&read_corpus("church_data.dd")), "Nat").unwrap();
    assert_eq!((m.rows.len(), m.cols.len()), (2, 1));
    let p = m.rows.iter().find(|r| &*r.name == "S").unwrap().params.vars();
    let abc = m.cols[0].params.vars();
    let (a, z, s) = (Expr::var(&abc[0]), Expr::var(&abc[1]), Expr::var(&abc[2]));
    let want = Expr::cons(
        s.clone(),
        "ap",
        vec![a.clone(), a.clone(), Expr::cons(Expr::var(&p[0]), "iter", vec![a, z, s])],
    );
    match cell(&m, "S", "iter") {
        Cell::Possible(e) => assert!(alpha_equal(&e, &want), "{e:?}"),
        Cell::Absurd => panic!("absurd"),
    }
}

#[test]
fn type_without_consumers_has_no_columns() {
    let p = lifted("data Nat { Z, S(n: Nat) }");
    let m = build_matrix(&p, "Nat").unwrap();
    assert_eq!((m.rows.len(), m.cols.len(), m.cell_count()), (2, 0, 0));
    let (q, r) = refunctionalize(&p, "Nat").unwrap();
    assert_eq!(r.direction, Direction::Refunctionalize);
    check_program(&q).unwrap();
    assert!(q.user_decls().any(|d| matches!(d, Decl::Codata(c) if c.dtors.is_empty())));
}

#[test]
fn empty_codata_becomes_empty_data() {
    let p = lifted("codata Void { }");
    let (q, r) = defunctionalize(&p, "Void").unwrap();
    assert_eq!((r.producers, r.consumers, r.cells), (0, 0, 0));
    let decls: Vec<&Decl> = q.user_decls().collect();
    assert_eq!(decls.len(), 1);
    assert!(matches!(decls[0], Decl::Data(d) if d.ctors.is_empty()));
}

#[test]
fn absurd_cells_survive() {
    let p = lifted(&read_corpus("buffer.dd"));
    let m = build_matrix(&p, "Buffer").unwrap();
    assert!(matches!(cell(&m, "EmptyBuffer", "read"), Cell::Absurd));
    let (q, _) = defunctionalize(&p, "Buffer").unwrap();
    let m2 = build_matrix(&q, "Buffer").unwrap();
    assert_eq!(m2.presentation, Presentation::Data);
    assert!(matches!(cell(&m2, "EmptyBuffer", "read"), Cell::Absurd));
}

#[test]
fn listing_pairs() {
    let pairs = [
        ("bool_codata.dd", "bool_data.dd", "Bool", true),
        ("induction_codata.dd", "induction_data.dd", "Nat", true),
        ("bool_data.dd", "bool_codata.dd", "Bool", false),
        ("church_data.dd", "church_codata.dd", "Nat", false),
        ("induction_data.dd", "induction_codata.dd", "Nat", false),
    ];
    for (from, to, t, defunc) in pairs {
        let p = lifted(&read_corpus(from));
        let (q, r) = if defunc { defunctionalize(&p, t) } else { refunctionalize(&p, t) }.unwrap();
        assert_eq!(r.direction == Direction::Defunctionalize, defunc);
        equivalent_programs(&q, &lifted(&read_corpus(to))).unwrap_or_else(|e| panic!("{from}: {e}"));
    }
}

#[test]
fn wrong_direction_and_unknown_types_are_errors() {
    let p = lifted(&read_corpus("bool_data.dd"));
    assert!(matches!(defunctionalize(&p, "Bool"), Err(XfuncError::NotCodata(_))));
    assert!(matches!(refunctionalize(&p, "Nope"), Err(XfuncError::UnknownType(_))));
    let c = lifted(&read_corpus("bool_codata.dd"));
    assert!(matches!(refunctionalize(&c, "Bool"), Err(XfuncError::NotData(_))));
    assert_eq!(XfuncError::UnknownType("Nope".into()).to_diagnostic().code, "xfunc/unknown-type");
}

#[test]
fn local_forms_must_be_lifted_first() {
    let p = parse(&read_corpus("webserver_before.dd")).unwrap();
    assert!(matches!(refunctionalize(&p, "Route"), Err(XfuncError::NotLifted)));
    let (q, _) = xfunc(&p, "Route").unwrap();
    check_program(&q).unwrap();
}

#[test]
fn webserver_routes_refunctionalize() {
    let p = lifted(&read_corpus("webserver_before.dd"));
    let (q, r) = refunctionalize(&p, "Route").unwrap();
    assert_eq!((r.producers, r.consumers), (1, 5));
    check_program(&q).unwrap();
    let route = q.user_decls().find(|d| &**d.name() == "Route").unwrap();
    assert!(matches!(route, Decl::Codata(c) if c.dtors.len() == 5));
}
