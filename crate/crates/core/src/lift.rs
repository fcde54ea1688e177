//! Lifting local matches and comatches to top-level definitions and
//! codefinitions.
//!
//! The typechecker records each local form with its closure; `assemble`
//! turns the records into declarations placed right after the one that
//! contained the form, and replaces every occurrence of a form by a call
//! that passes its closure.

use std::collections::HashMap;

use crate::ast::*;
use crate::check::{check_program, order_closure, LiftRecord, LocalForm};
use crate::diagnostic::Diagnostic;
use crate::subst::free_vars;

/// The lifted program. Fails with the checker's diagnostics if `p` does
/// not typecheck.
pub fn lift_program(p: &Program) -> Result<Program, Vec<Diagnostic>> {
    Ok(check_program(p)?.program)
}

/// Free variables of `e` closed under the types in `ctx`, ordered so that
/// each type only mentions earlier variables. Errors with a variable of a
/// dependency cycle.
pub fn free_closure(e: &Expr, ctx: &Telescope) -> Result<Telescope, Var> {
    let pos: HashMap<u64, (usize, Expr)> =
        ctx.iter().enumerate().map(|(i, p)| (p.var.id, (i, p.ty.clone()))).collect();
    order_closure(free_vars(e), &|v: &Var| pos.get(&v.id).cloned())
}

/// Closure variables of every lifted label.
pub type Closures = HashMap<Name, Vec<Var>>;

pub fn closures(records: &[LiftRecord]) -> Closures {
    records.iter().map(|r| (r.label.clone(), r.closure.vars())).collect()
}

/// Replaces every local form whose label is in `closures` by a call of its
/// lifted declaration.
pub fn lift_term(e: &Expr, closures: &Closures) -> Expr {
    crate::subst::grow(|| lift_inner(e, closures))
}

fn lift_inner(e: &Expr, cl: &Closures) -> Expr {
    let all = |es: &[Expr]| es.iter().map(|a| lift_term(a, cl)).collect::<Vec<_>>();
    match e {
        Expr::Var(_) | Expr::Type => e.clone(),
        Expr::TypCtor { name, args } => Expr::TypCtor { name: name.clone(), args: all(args) },
        Expr::Producer { name, args } => Expr::Producer { name: name.clone(), args: all(args) },
        Expr::Consumer { scrutinee, name, args } => Expr::Consumer {
            scrutinee: Box::new(lift_term(scrutinee, cl)),
            name: name.clone(),
            args: all(args),
        },
        Expr::LocalComatch { label, cocases, env } => match cl.get(&label.name) {
            Some(vars) => Expr::Producer { name: label.name.clone(), args: closure_args(vars, env, cl) },
            None => Expr::LocalComatch {
                label: label.clone(),
                cocases: cocases.iter().map(|c| lift_clause(c, cl)).collect(),
                env: env.clone(),
            },
        },
        Expr::LocalMatch { label, scrutinee, motive, cases, env } => match cl.get(&label.name) {
            Some(vars) => Expr::Consumer {
                scrutinee: Box::new(lift_term(scrutinee, cl)),
                name: label.name.clone(),
                args: closure_args(vars, env, cl),
            },
            None => Expr::LocalMatch {
                label: label.clone(),
                scrutinee: Box::new(lift_term(scrutinee, cl)),
                motive: motive
                    .as_ref()
                    .map(|m| Motive { binder: m.binder.clone(), ty: Box::new(lift_term(&m.ty, cl)) }),
                cases: cases.iter().map(|c| lift_clause(c, cl)).collect(),
                env: env.clone(),
            },
        },
    }
}

fn closure_args(vars: &[Var], env: &ClosureEnv, cl: &Closures) -> Vec<Expr> {
    vars.iter()
        .map(|v| match env.iter().find(|(k, _)| k == v) {
            Some((_, val)) => lift_term(val, cl),
            None => Expr::var(v),
        })
        .collect()
}

fn lift_clause(c: &Clause, cl: &Closures) -> Clause {
    let body = match &c.body {
        Body::Term(b) => Body::Term(lift_term(b, cl)),
        Body::Absurd => Body::Absurd,
    };
    Clause { name: c.name.clone(), params: c.params.clone(), body, span: c.span }
}

fn lift_tel(t: &Telescope, cl: &Closures) -> Telescope {
    Telescope(t.iter().map(|p| Param { var: p.var.clone(), ty: lift_term(&p.ty, cl) }).collect())
}

fn lift_decl(d: &Decl, cl: &Closures) -> Decl {
    let all = |es: &[Expr]| es.iter().map(|a| lift_term(a, cl)).collect::<Vec<_>>();
    let clauses = |cs: &[Clause]| cs.iter().map(|c| lift_clause(c, cl)).collect::<Vec<_>>();
    match d {
        Decl::Data(d) => Decl::Data(DataDecl {
            name: d.name.clone(),
            params: lift_tel(&d.params, cl),
            ctors: d
                .ctors
                .iter()
                .map(|c| CtorSig {
                    name: c.name.clone(),
                    params: lift_tel(&c.params, cl),
                    result_args: all(&c.result_args),
                    meta: c.meta.clone(),
                })
                .collect(),
            meta: d.meta.clone(),
        }),
        Decl::Codata(d) => Decl::Codata(CodataDecl {
            name: d.name.clone(),
            params: lift_tel(&d.params, cl),
            dtors: d
                .dtors
                .iter()
                .map(|s| DtorSig {
                    name: s.name.clone(),
                    params: lift_tel(&s.params, cl),
                    self_args: all(&s.self_args),
                    self_var: s.self_var.clone(),
                    ret: lift_term(&s.ret, cl),
                    meta: s.meta.clone(),
                })
                .collect(),
            meta: d.meta.clone(),
        }),
        Decl::Def(d) => Decl::Def(DefDecl {
            name: d.name.clone(),
            params: lift_tel(&d.params, cl),
            self_type: d.self_type.clone(),
            self_args: all(&d.self_args),
            self_var: d.self_var.clone(),
            ret: lift_term(&d.ret, cl),
            cases: clauses(&d.cases),
            meta: d.meta.clone(),
        }),
        Decl::Codef(d) => Decl::Codef(CodefDecl {
            name: d.name.clone(),
            params: lift_tel(&d.params, cl),
            result_type: d.result_type.clone(),
            result_args: all(&d.result_args),
            cocases: clauses(&d.cocases),
            meta: d.meta.clone(),
        }),
        Decl::Let(d) => Decl::Let(LetDecl {
            name: d.name.clone(),
            params: lift_tel(&d.params, cl),
            ty: lift_term(&d.ty, cl),
            body: lift_term(&d.body, cl),
            meta: d.meta.clone(),
        }),
    }
}

/// The declaration a record lifts to, with nested forms lifted.
pub fn generated_decl(r: &LiftRecord, cl: &Closures, owner_meta: &Meta) -> Decl {
    let meta = Meta { doc: Vec::new(), span: owner_meta.span, prelude: owner_meta.prelude };
    let clauses = |cs: &[Clause]| cs.iter().map(|c| lift_clause(c, cl)).collect::<Vec<_>>();
    let all = |es: &[Expr]| es.iter().map(|a| lift_term(a, cl)).collect::<Vec<_>>();
    match &r.form {
        LocalForm::Comatch { ty_name, ty_args, cocases } => Decl::Codef(CodefDecl {
            name: r.label.clone(),
            params: lift_tel(&r.closure, cl),
            result_type: ty_name.clone(),
            result_args: all(ty_args),
            cocases: clauses(cocases),
            meta,
        }),
        LocalForm::Match { self_var, ty_name, ty_args, ret, cases } => Decl::Def(DefDecl {
            name: r.label.clone(),
            params: lift_tel(&r.closure, cl),
            self_type: ty_name.clone(),
            self_args: all(ty_args),
            self_var: self_var.clone(),
            ret: lift_term(ret, cl),
            cases: clauses(cases),
            meta,
        }),
    }
}

/// Builds the lifted program from the checker's records.
pub fn assemble(p: &Program, records: &[LiftRecord]) -> Program {
    let cl = closures(records);
    let mut decls = Vec::with_capacity(p.decls.len() + records.len());
    for (i, d) in p.decls.iter().enumerate() {
        decls.push(lift_decl(d, &cl));
        for r in records.iter().filter(|r| r.owner == i) {
            decls.push(generated_decl(r, &cl, d.meta()));
        }
    }
    Program::new(decls)
}
