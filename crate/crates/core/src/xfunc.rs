//! Defunctionalization and refunctionalization as matrix transposition.
//!
//! A type's matrix has one row per producer (constructor or codefinition)
//! and one column per consumer (definition or destructor). Each cell is the
//! clause for that pair. The data presentation stores the matrix by column
//! (one definition per consumer), the codata presentation by row (one
//! codefinition per producer); converting between them moves cells without
//! changing them.

use std::fmt;

use crate::ast::*;
use crate::check::check_program;
use crate::diagnostic::Diagnostic;
use crate::subst::Subst;

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Defunctionalize,
    Refunctionalize,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Defunctionalize => "defunctionalize",
            Direction::Refunctionalize => "refunctionalize",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Presentation {
    Data,
    Codata,
}

/// A producer `C(Ξ): T(ρ)`.
#[derive(Clone, Debug)]
pub struct Row {
    pub name: Name,
    pub params: Telescope,
    pub args: Vec<Expr>,
    pub meta: Meta,
}

/// A consumer `(z: T(ρ)).d(Ξ): t`.
#[derive(Clone, Debug)]
pub struct Col {
    pub name: Name,
    pub params: Telescope,
    pub self_var: Var,
    pub self_args: Vec<Expr>,
    pub ret: Expr,
    pub meta: Meta,
}

/// A cell's body mentions the variables of its row's and its column's
/// telescopes.
#[derive(Clone, Debug)]
pub enum Cell {
    Possible(Expr),
    Absurd,
}

#[derive(Clone, Debug)]
pub struct TypeMatrix {
    pub name: Name,
    pub params: Telescope,
    pub presentation: Presentation,
    pub meta: Meta,
    pub rows: Vec<Row>,
    pub cols: Vec<Col>,
    /// Row-major.
    pub cells: Vec<Vec<Cell>>,
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct XfuncReport {
    pub direction: Direction,
    #[serde(rename = "type")]
    pub type_name: String,
    pub producers: usize,
    pub consumers: usize,
    pub cells: usize,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum XfuncError {
    #[error("unknown type `{0}`")]
    UnknownType(String),
    #[error("`{0}` is not a data type")]
    NotData(String),
    #[error("`{0}` is not a codata type")]
    NotCodata(String),
    #[error("the program still contains local matches or comatches; lift it first")]
    NotLifted,
    #[error("`{consumer}` has no clause for `{producer}`")]
    MissingCell { producer: String, consumer: String },
    #[error("the transformed program does not typecheck: {}", .0.first().map(|d| d.message.as_str()).unwrap_or(""))]
    Recheck(Vec<Diagnostic>),
}

impl XfuncError {
    pub fn to_diagnostic(&self) -> Diagnostic {
        let kind = match self {
            XfuncError::UnknownType(_) => "unknown-type",
            XfuncError::NotData(_) => "not-data",
            XfuncError::NotCodata(_) => "not-codata",
            XfuncError::NotLifted => "not-lifted",
            XfuncError::MissingCell { .. } => "missing-case",
            XfuncError::Recheck(_) => "recheck",
        };
        Diagnostic::error(format!("xfunc/{kind}"), self.to_string(), Span::default())
    }
}

fn cell_of(c: &Clause, binders: &Telescope) -> Cell {
    match &c.body {
        Body::Absurd => Cell::Absurd,
        Body::Term(b) => Cell::Possible(Subst::renaming(&c.params, &binders.vars()).apply(b)),
    }
}

/// The matrix of `ty` in the lifted program `p`.
pub fn build_matrix(p: &Program, ty: &str) -> Result<TypeMatrix, XfuncError> {
    if !p.is_core() {
        return Err(XfuncError::NotLifted);
    }
    let missing = |producer: &Name, consumer: &Name| XfuncError::MissingCell {
        producer: producer.to_string(),
        consumer: consumer.to_string(),
    };
    for d in &p.decls {
        match d {
            Decl::Data(data) if &*data.name == ty => {
                let rows: Vec<Row> = data
                    .ctors
                    .iter()
                    .map(|c| Row { name: c.name.clone(), params: c.params.clone(), args: c.result_args.clone(), meta: c.meta.clone() })
                    .collect();
                let defs: Vec<&DefDecl> = p
                    .decls
                    .iter()
                    .filter_map(|d| match d {
                        Decl::Def(f) if &*f.self_type == ty => Some(f),
                        _ => None,
                    })
                    .collect();
                let cols: Vec<Col> = defs
                    .iter()
                    .map(|f| Col {
                        name: f.name.clone(),
                        params: f.params.clone(),
                        self_var: f.self_var.clone(),
                        self_args: f.self_args.clone(),
                        ret: f.ret.clone(),
                        meta: f.meta.clone(),
                    })
                    .collect();
                let mut cells = Vec::with_capacity(rows.len());
                for r in &rows {
                    let mut row = Vec::with_capacity(cols.len());
                    for f in &defs {
                        let c = f.cases.iter().find(|c| c.name == r.name).ok_or_else(|| missing(&r.name, &f.name))?;
                        row.push(cell_of(c, &r.params));
                    }
                    cells.push(row);
                }
                return Ok(TypeMatrix {
                    name: data.name.clone(),
                    params: data.params.clone(),
                    presentation: Presentation::Data,
                    meta: data.meta.clone(),
                    rows,
                    cols,
                    cells,
                });
            }
            Decl::Codata(codata) if &*codata.name == ty => {
                let cols: Vec<Col> = codata
                    .dtors
                    .iter()
                    .map(|s| Col {
                        name: s.name.clone(),
                        params: s.params.clone(),
                        self_var: s.self_var.clone(),
                        self_args: s.self_args.clone(),
                        ret: s.ret.clone(),
                        meta: s.meta.clone(),
                    })
                    .collect();
                let codefs: Vec<&CodefDecl> = p
                    .decls
                    .iter()
                    .filter_map(|d| match d {
                        Decl::Codef(c) if &*c.result_type == ty => Some(c),
                        _ => None,
                    })
                    .collect();
                let rows: Vec<Row> = codefs
                    .iter()
                    .map(|c| Row { name: c.name.clone(), params: c.params.clone(), args: c.result_args.clone(), meta: c.meta.clone() })
                    .collect();
                let mut cells = Vec::with_capacity(rows.len());
                for c in &codefs {
                    let mut row = Vec::with_capacity(cols.len());
                    for col in &cols {
                        let k = c.cocases.iter().find(|k| k.name == col.name).ok_or_else(|| missing(&c.name, &col.name))?;
                        row.push(cell_of(k, &col.params));
                    }
                    cells.push(row);
                }
                return Ok(TypeMatrix {
                    name: codata.name.clone(),
                    params: codata.params.clone(),
                    presentation: Presentation::Codata,
                    meta: codata.meta.clone(),
                    rows,
                    cols,
                    cells,
                });
            }
            _ => {}
        }
    }
    Err(XfuncError::UnknownType(ty.to_string()))
}

/// A clause for `name` binding fresh copies of `binders`.
fn clause(name: &Name, binders: &Telescope, cell: &Cell) -> Clause {
    let fresh: Vec<Var> = binders.iter().map(|p| p.var.refresh()).collect();
    let body = match cell {
        Cell::Absurd => Body::Absurd,
        Cell::Possible(e) => Body::Term(Subst::renaming(&binders.vars(), &fresh).apply(e)),
    };
    Clause { name: name.clone(), params: fresh, body, span: Span::default() }
}

impl TypeMatrix {
    pub fn cell_count(&self) -> usize {
        self.rows.len() * self.cols.len()
    }

    /// The data presentation: the type declaration and one definition per
    /// column.
    pub fn to_data(&self) -> Vec<Decl> {
        let mut out = vec![Decl::Data(DataDecl {
            name: self.name.clone(),
            params: self.params.clone(),
            ctors: self
                .rows
                .iter()
                .map(|r| CtorSig { name: r.name.clone(), params: r.params.clone(), result_args: r.args.clone(), meta: r.meta.clone() })
                .collect(),
            meta: self.meta.clone(),
        })];
        for (j, c) in self.cols.iter().enumerate() {
            out.push(Decl::Def(DefDecl {
                name: c.name.clone(),
                params: c.params.clone(),
                self_type: self.name.clone(),
                self_args: c.self_args.clone(),
                self_var: c.self_var.clone(),
                ret: c.ret.clone(),
                cases: self.rows.iter().enumerate().map(|(i, r)| clause(&r.name, &r.params, &self.cells[i][j])).collect(),
                meta: c.meta.clone(),
            }));
        }
        out
    }

    /// The codata presentation: the type declaration and one codefinition
    /// per row.
    pub fn to_codata(&self) -> Vec<Decl> {
        let mut out = vec![Decl::Codata(CodataDecl {
            name: self.name.clone(),
            params: self.params.clone(),
            dtors: self
                .cols
                .iter()
                .map(|c| DtorSig {
                    name: c.name.clone(),
                    params: c.params.clone(),
                    self_args: c.self_args.clone(),
                    self_var: c.self_var.clone(),
                    ret: c.ret.clone(),
                    meta: c.meta.clone(),
                })
                .collect(),
            meta: self.meta.clone(),
        })];
        for (i, r) in self.rows.iter().enumerate() {
            out.push(Decl::Codef(CodefDecl {
                name: r.name.clone(),
                params: r.params.clone(),
                result_type: self.name.clone(),
                result_args: r.args.clone(),
                cocases: self.cols.iter().enumerate().map(|(j, c)| clause(&c.name, &c.params, &self.cells[i][j])).collect(),
                meta: r.meta.clone(),
            }));
        }
        out
    }
}

/// Replaces the declarations that make up `m` in `p` by `decls`, which go
/// where the type declaration was.
fn splice(p: &Program, m: &TypeMatrix, decls: Vec<Decl>) -> Program {
    let belongs = |d: &Decl| match d {
        Decl::Data(x) => x.name == m.name,
        Decl::Codata(x) => x.name == m.name,
        Decl::Def(x) => x.self_type == m.name,
        Decl::Codef(x) => x.result_type == m.name,
        Decl::Let(_) => false,
    };
    let mut decls = Some(decls);
    let mut out = Vec::with_capacity(p.decls.len());
    for d in &p.decls {
        if !belongs(d) {
            out.push(d.clone());
        } else if d.name() == &m.name && matches!(d, Decl::Data(_) | Decl::Codata(_)) {
            out.extend(decls.take().expect("one type declaration"));
        }
    }
    // A prelude type that changed presentation is no longer the prelude.
    if m.meta.prelude {
        for d in &mut out {
            d.meta_mut().prelude = false;
        }
    }
    Program::new(out)
}

fn report(m: &TypeMatrix, direction: Direction) -> XfuncReport {
    XfuncReport {
        direction,
        type_name: m.name.to_string(),
        producers: m.rows.len(),
        consumers: m.cols.len(),
        cells: m.cell_count(),
    }
}

/// Turns the codata type `ty` of the lifted program `p` into a data type.
pub fn defunctionalize(p: &Program, ty: &str) -> Result<(Program, XfuncReport), XfuncError> {
    let m = build_matrix(p, ty)?;
    if m.presentation != Presentation::Codata {
        return Err(XfuncError::NotCodata(ty.to_string()));
    }
    Ok((splice(p, &m, m.to_data()), report(&m, Direction::Defunctionalize)))
}

/// Turns the data type `ty` of the lifted program `p` into a codata type.
pub fn refunctionalize(p: &Program, ty: &str) -> Result<(Program, XfuncReport), XfuncError> {
    let m = build_matrix(p, ty)?;
    if m.presentation != Presentation::Data {
        return Err(XfuncError::NotData(ty.to_string()));
    }
    Ok((splice(p, &m, m.to_codata()), report(&m, Direction::Refunctionalize)))
}

/// Transposes `ty` in whichever direction its declaration allows.
pub fn transpose(p: &Program, ty: &str) -> Result<(Program, XfuncReport), XfuncError> {
    let m = build_matrix(p, ty)?;
    Ok(match m.presentation {
        Presentation::Data => (splice(p, &m, m.to_codata()), report(&m, Direction::Refunctionalize)),
        Presentation::Codata => (splice(p, &m, m.to_data()), report(&m, Direction::Defunctionalize)),
    })
}

/// Lifts and checks `p`, transposes `ty`, and checks the result.
pub fn xfunc(p: &Program, ty: &str) -> Result<(Program, XfuncReport), XfuncError> {
    let lifted = check_program(p).map_err(XfuncError::Recheck)?.program;
    let (out, report) = transpose(&lifted, ty)?;
    check_program(&out).map_err(XfuncError::Recheck)?;
    Ok((out, report))
}

/// Names of the data and codata types declared in `p`.
pub fn type_names(p: &Program) -> Vec<Name> {
    p.decls
        .iter()
        .filter_map(|d| match d {
            Decl::Data(x) => Some(x.name.clone()),
            Decl::Codata(x) => Some(x.name.clone()),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alpha::equivalent_programs;
    use crate::parser::parse;

    const DATA: &str = "data Bool { True, False }
def Bool.neg: Bool { True => False, False => True }";
    const CODATA: &str = "codata Bool { neg: Bool }
codef True: Bool { neg => False }
codef False: Bool { neg => True }";

    #[test]
    fn matrix_of_bool() {
        let m = build_matrix(&parse(DATA).unwrap(), "Bool").unwrap();
        assert_eq!((m.rows.len(), m.cols.len()), (2, 1));
        assert!(matches!(&m.cells[0][0], Cell::Possible(Expr::Producer { name, .. }) if &**name == "False"));
        assert!(matches!(&m.cells[1][0], Cell::Possible(Expr::Producer { name, .. }) if &**name == "True"));
    }

    #[test]
    fn both_directions() {
        let (codata, r) = refunctionalize(&parse(DATA).unwrap(), "Bool").unwrap();
        assert_eq!(r.cells, 2);
        equivalent_programs(&codata, &parse(CODATA).unwrap()).unwrap();
        let (data, _) = defunctionalize(&parse(CODATA).unwrap(), "Bool").unwrap();
        equivalent_programs(&data, &parse(DATA).unwrap()).unwrap();
    }

    #[test]
    fn wrong_direction_is_rejected() {
        assert!(matches!(defunctionalize(&parse(DATA).unwrap(), "Bool"), Err(XfuncError::NotCodata(_))));
        assert!(matches!(refunctionalize(&parse(CODATA).unwrap(), "Bool"), Err(XfuncError::NotData(_))));
        assert!(matches!(transpose(&parse(DATA).unwrap(), "Nat"), Err(XfuncError::UnknownType(_))));
    }

    #[test]
    fn consumerless_type() {
        let p = parse("data Unit { U } codata Void { }").unwrap();
        let m = build_matrix(&p, "Unit").unwrap();
        assert_eq!((m.rows.len(), m.cols.len()), (1, 0));
        let (q, _) = transpose(&p, "Void").unwrap();
        assert!(matches!(&q.decls[q.decls.len() - 1], Decl::Data(d) if d.ctors.is_empty()));
    }
}
