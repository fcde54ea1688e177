//! Bidirectional typechecking with dependent (co)pattern matching.
//!
//! The context carries a substitution θ of variables solved by unification
//! in enclosing cases. θ is applied to every type the checker builds, never
//! to source terms, so each local match or comatch can be recorded at the
//! place it is checked, together with its closure, for lifting.

pub mod normalize;
pub mod unify;

use std::collections::{HashMap, HashSet};

use crate::ast::*;
use crate::diagnostic::Diagnostic;
use crate::printer::print_expr;
use crate::subst::{free_vars, Subst};
use normalize::{convertible, Normalizer, DEFAULT_FUEL};
use unify::{unify_with, Unification};

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    /// β-step budget of each conversion or unification query.
    pub fuel: u64,
}

impl Default for CheckOptions {
    fn default() -> CheckOptions {
        CheckOptions { fuel: DEFAULT_FUEL }
    }
}

/// A local match or comatch as it will appear once lifted to the top level.
/// All expressions have the enclosing cases' solutions applied.
#[derive(Clone, Debug)]
pub enum LocalForm {
    Comatch { ty_name: Name, ty_args: Vec<Expr>, cocases: Vec<Clause> },
    Match { self_var: Var, ty_name: Name, ty_args: Vec<Expr>, ret: Expr, cases: Vec<Clause> },
}

#[derive(Clone, Debug)]
pub struct LiftRecord {
    pub label: Name,
    /// Index of the enclosing declaration in the source program.
    pub owner: usize,
    /// Free variables of the form, ordered so that each type only mentions
    /// earlier ones.
    pub closure: Telescope,
    pub form: LocalForm,
}

#[derive(Clone, Debug)]
pub struct TypedProgram {
    /// The program as written.
    pub source: Program,
    /// The lifted program: every local form replaced by a call of a
    /// generated top-level declaration.
    pub program: Program,
    pub records: Vec<LiftRecord>,
}

impl TypedProgram {
    /// Names of the declarations introduced by lifting.
    pub fn generated(&self) -> Vec<Name> {
        self.records.iter().map(|r| r.label.clone()).collect()
    }
}

pub fn check_program(p: &Program) -> Result<TypedProgram, Vec<Diagnostic>> {
    check_program_with(p, CheckOptions::default())
}

pub fn check_program_with(p: &Program, opts: CheckOptions) -> Result<TypedProgram, Vec<Diagnostic>> {
    let index = p.index();
    let g = Globals::new(p, &index);
    let mut c = Checker::new(g, opts);
    for (i, d) in p.decls.iter().enumerate() {
        c.owner = i;
        c.span = d.meta().span;
        let _ = c.decl(d);
    }
    if !c.diags.is_empty() {
        return Err(c.diags);
    }
    let records = c.records;
    let program = crate::lift::assemble(p, &records);
    Ok(TypedProgram { source: p.clone(), program, records })
}

/// Infers the type of a closed expression.
pub fn infer_closed(p: &Program, e: &Expr, opts: CheckOptions) -> Result<Expr, Vec<Diagnostic>> {
    let index = p.index();
    let mut c = Checker::new(Globals::new(p, &index), opts);
    match c.infer(&Ctx::default(), e) {
        Ok(t) => Ok(t),
        Err(()) => Err(c.diags),
    }
}

/// Checks a closed expression against a type.
pub fn check_closed(p: &Program, e: &Expr, ty: &Expr, opts: CheckOptions) -> Result<(), Vec<Diagnostic>> {
    let index = p.index();
    let mut c = Checker::new(Globals::new(p, &index), opts);
    let ctx = Ctx::default();
    let r = c.check(&ctx, ty, &Expr::Type).and_then(|_| c.check(&ctx, e, ty));
    match r {
        Ok(()) => Ok(()),
        Err(()) => Err(c.diags),
    }
}

/// Infers a type for `e` under the context `gamma`.
pub fn infer(p: &Program, gamma: &Telescope, e: &Expr, opts: CheckOptions) -> Result<Expr, Vec<Diagnostic>> {
    let index = p.index();
    let mut c = Checker::new(Globals::new(p, &index), opts);
    let mut ctx = Ctx::default();
    let r = c.telescope(&mut ctx, gamma).and_then(|_| c.infer(&ctx, e));
    r.map_err(|_| c.diags)
}

/// Checks `sigma` positionally against `xi` under `gamma`.
pub fn check_substitution(
    p: &Program,
    gamma: &Telescope,
    sigma: &[Expr],
    xi: &Telescope,
    opts: CheckOptions,
) -> Result<(), Diagnostic> {
    let index = p.index();
    let mut c = Checker::new(Globals::new(p, &index), opts);
    let mut ctx = Ctx::default();
    let r = c.telescope(&mut ctx, gamma).and_then(|_| c.args(&ctx, sigma, xi, "SUBST"));
    r.map_err(|_| c.diags.swap_remove(0))
}

/// Typing context: declared types and the solutions of enclosing cases.
#[derive(Clone, Default)]
struct Ctx {
    vars: Vec<(Var, Expr)>,
    pos: HashMap<u64, usize>,
    theta: Subst,
}

impl Ctx {
    fn push(&mut self, v: &Var, ty: Expr) {
        self.pos.insert(v.id, self.vars.len());
        self.vars.push((v.clone(), ty));
    }

    fn ty_of(&self, v: &Var) -> Option<Expr> {
        self.pos.get(&v.id).map(|&i| self.theta.apply(&self.vars[i].1))
    }

    fn sub(&self, e: &Expr) -> Expr {
        self.theta.apply(e)
    }

    fn solve(&mut self, sigma: &Subst) {
        self.theta.map_values(sigma);
        self.theta.extend(sigma);
    }
}

type R<T> = Result<T, ()>;

struct Checker<'p> {
    g: Globals<'p>,
    opts: CheckOptions,
    diags: Vec<Diagnostic>,
    records: Vec<LiftRecord>,
    recorded: HashSet<Name>,
    owner: usize,
    span: Span,
}

impl<'p> Checker<'p> {
    fn new(g: Globals<'p>, opts: CheckOptions) -> Checker<'p> {
        Checker {
            g,
            opts,
            diags: Vec::new(),
            records: Vec::new(),
            recorded: HashSet::new(),
            owner: 0,
            span: Span::default(),
        }
    }

    fn err<T>(&mut self, code: impl Into<String>, msg: impl Into<String>) -> R<T> {
        self.diags.push(Diagnostic::error(code, msg, self.span));
        Err(())
    }

    fn show(&self, e: &Expr) -> String {
        print_expr(e, self.g.program)
    }

    fn normalize(&mut self, e: &Expr) -> R<Expr> {
        match Normalizer::new(self.g, self.opts.fuel).normalize(e) {
            Ok(n) => Ok(n),
            Err(_) => {
                let m = format!("normalizing `{}` exceeded the budget", self.show(e));
                self.err("CONV/undecided", m)
            }
        }
    }

    fn conv(&mut self, found: &Expr, expected: &Expr, rule: &str) -> R<()> {
        match convertible(self.g, found, expected, self.opts.fuel) {
            Ok(true) => Ok(()),
            Ok(false) => {
                let m = format!("expected `{}`, found `{}`", self.show(expected), self.show(found));
                self.err(format!("{rule}/conversion-failure"), m)
            }
            Err(_) => {
                let m = format!(
                    "cannot decide whether `{}` and `{}` are equal within the budget",
                    self.show(found),
                    self.show(expected)
                );
                self.err(format!("{rule}/undecided"), m)
            }
        }
    }

    // Declarations

    fn decl(&mut self, d: &Decl) -> R<()> {
        match d {
            Decl::Data(d) => self.data(d),
            Decl::Codata(d) => self.codata(d),
            Decl::Def(d) => self.def(d),
            Decl::Codef(d) => self.codef(d),
            Decl::Let(d) => {
                let mut ctx = Ctx::default();
                self.telescope(&mut ctx, &d.params)?;
                self.check(&ctx, &d.ty, &Expr::Type)?;
                self.check(&ctx, &d.body, &d.ty)
            }
        }
    }

    fn telescope(&mut self, ctx: &mut Ctx, tel: &Telescope) -> R<()> {
        for p in tel.iter() {
            self.check(ctx, &p.ty, &Expr::Type)?;
            ctx.push(&p.var, p.ty.clone());
        }
        Ok(())
    }

    fn data(&mut self, d: &DataDecl) -> R<()> {
        let mut ctx = Ctx::default();
        self.telescope(&mut ctx, &d.params)?;
        let mut ok = true;
        for c in &d.ctors {
            self.span = c.meta.span;
            let mut ctx = Ctx::default();
            let r = self
                .telescope(&mut ctx, &c.params)
                .and_then(|_| self.args(&ctx, &c.result_args, &d.params, "DATA"));
            ok &= r.is_ok();
        }
        if ok { Ok(()) } else { Err(()) }
    }

    fn codata(&mut self, d: &CodataDecl) -> R<()> {
        let mut ctx = Ctx::default();
        self.telescope(&mut ctx, &d.params)?;
        let mut ok = true;
        for dt in &d.dtors {
            self.span = dt.meta.span;
            let r = self.signature(&d.name, &dt.params, &dt.self_args, &dt.self_var, &dt.ret, "CODATA");
            ok &= r.is_ok();
        }
        if ok { Ok(()) } else { Err(()) }
    }

    /// Checks `(z: T(args)).name(params): ret` and returns the context
    /// `params, z`.
    fn signature(
        &mut self,
        ty: &Name,
        params: &Telescope,
        self_args: &[Expr],
        self_var: &Var,
        ret: &Expr,
        rule: &str,
    ) -> R<Ctx> {
        let mut ctx = Ctx::default();
        self.telescope(&mut ctx, params)?;
        let Some(psi) = self.g.type_params(ty) else {
            return self.err(format!("{rule}/unknown-type"), format!("unknown type `{ty}`"));
        };
        self.args(&ctx, self_args, psi, rule)?;
        ctx.push(self_var, Expr::TypCtor { name: ty.clone(), args: self_args.to_vec() });
        self.check(&ctx, ret, &Expr::Type)?;
        Ok(ctx)
    }

    fn def(&mut self, d: &DefDecl) -> R<()> {
        let Some(data) = self.g.data(&d.self_type) else {
            let m = format!("`{}` is defined on `{}`, which is not a data type", d.name, d.self_type);
            return self.err("DEF/not-data", m);
        };
        let ctx = self.signature(&d.self_type, &d.params, &d.self_args, &d.self_var, &d.ret, "DEF")?;
        // The self variable is only in scope in the return type.
        let mut ctx = ctx;
        ctx.vars.pop();
        ctx.pos.remove(&d.self_var.id);
        self.cases(&ctx, data, &d.self_args, &d.cases, Some(&d.self_var), &d.ret, "CASE")
    }

    fn codef(&mut self, d: &CodefDecl) -> R<()> {
        let Some(codata) = self.g.codata(&d.result_type) else {
            let m = format!("`{}` returns `{}`, which is not a codata type", d.name, d.result_type);
            return self.err("CODEF/not-codata", m);
        };
        let mut ctx = Ctx::default();
        self.telescope(&mut ctx, &d.params)?;
        self.args(&ctx, &d.result_args, &codata.params, "CODEF")?;
        let this = Expr::Producer {
            name: d.name.clone(),
            args: d.params.iter().map(|p| Expr::var(&p.var)).collect(),
        };
        self.cocases(&ctx, codata, &d.result_args, &d.cocases, &this, "COCASE")
    }

    // Expressions

    /// Checks `args` against `tel`, each type instantiated with the
    /// arguments before it.
    fn args(&mut self, ctx: &Ctx, args: &[Expr], tel: &Telescope, rule: &str) -> R<()> {
        if args.len() != tel.len() {
            let m = format!("expected {} arguments, found {}", tel.len(), args.len());
            return self.err(format!("{rule}/arity-mismatch"), m);
        }
        let mut s = Subst::new();
        for (i, (p, a)) in tel.iter().zip(args).enumerate() {
            let expected = ctx.sub(&s.apply(&p.ty));
            if self.check(ctx, a, &expected).is_err() {
                if let Some(d) = self.diags.last_mut() {
                    if !d.message.contains("argument") {
                        d.message = format!("argument {i}: {}", d.message);
                    }
                }
                return Err(());
            }
            s.insert(&p.var, a.clone());
        }
        Ok(())
    }

    fn check(&mut self, ctx: &Ctx, e: &Expr, expected: &Expr) -> R<()> {
        crate::subst::grow(|| match e {
            Expr::LocalComatch { .. } => self.comatch(ctx, e, expected),
            Expr::LocalMatch { .. } => self.local_match(ctx, e, Some(expected)).map(|_| ()),
            _ => {
                let found = self.infer(ctx, e)?;
                self.conv(&found, expected, "CONV")
            }
        })
    }

    fn infer(&mut self, ctx: &Ctx, e: &Expr) -> R<Expr> {
        crate::subst::grow(|| self.infer_inner(ctx, e))
    }

    fn infer_inner(&mut self, ctx: &Ctx, e: &Expr) -> R<Expr> {
        match e {
            Expr::Var(v) => match ctx.ty_of(v) {
                Some(t) => Ok(t),
                None => self.err("VAR/unbound", format!("variable `{v}` is not in scope")),
            },
            Expr::Type => Ok(Expr::Type),
            Expr::TypCtor { name, args } => {
                let rule = if self.g.data(name).is_some() { "F-DATA" } else { "F-CODATA" };
                let Some(psi) = self.g.type_params(name) else {
                    return self.err(format!("{rule}/unknown-type"), format!("unknown type `{name}`"));
                };
                self.args(ctx, args, psi, rule)?;
                Ok(Expr::Type)
            }
            Expr::Producer { name, args } => {
                if let Some((d, c)) = self.g.ctor(name) {
                    self.args(ctx, args, &c.params, "I-DATA")?;
                    let s = Subst::from_telescope(&c.params, args).expect("arity checked");
                    Ok(ctx.sub(&Expr::TypCtor { name: d.name.clone(), args: s.apply_all(&c.result_args) }))
                } else if let Some(c) = self.g.codef(name) {
                    self.args(ctx, args, &c.params, "I-CODATA")?;
                    let s = Subst::from_telescope(&c.params, args).expect("arity checked");
                    Ok(ctx.sub(&Expr::TypCtor { name: c.result_type.clone(), args: s.apply_all(&c.result_args) }))
                } else if let Some(l) = self.g.let_decl(name) {
                    self.args(ctx, args, &l.params, "LET")?;
                    let s = Subst::from_telescope(&l.params, args).expect("arity checked");
                    Ok(ctx.sub(&s.apply(&l.ty)))
                } else {
                    self.err("I-DATA/unknown-producer", format!("unknown producer `{name}`"))
                }
            }
            Expr::Consumer { scrutinee, name, args } => {
                let (ty, params, self_args, self_var, ret, rule) = if let Some((cd, dt)) = self.g.dtor(name) {
                    (&cd.name, &dt.params, &dt.self_args, &dt.self_var, &dt.ret, "E-CODATA")
                } else if let Some(d) = self.g.def(name) {
                    (&d.self_type, &d.params, &d.self_args, &d.self_var, &d.ret, "E-DATA")
                } else {
                    return self.err("E-DATA/unknown-consumer", format!("unknown consumer `{name}`"));
                };
                let found = self.infer(ctx, scrutinee)?;
                let nf = self.normalize(&found)?;
                let targs = match &nf {
                    Expr::TypCtor { name: t, args } if t == ty => args.clone(),
                    _ => {
                        let m = format!(
                            "`{name}` observes `{ty}`, but `{}` has type `{}`",
                            self.show(scrutinee),
                            self.show(&found)
                        );
                        return self.err(format!("{rule}/type-mismatch"), m);
                    }
                };
                self.args(ctx, args, params, rule)?;
                let mut s = Subst::from_telescope(params, args).expect("arity checked");
                for (declared, actual) in self_args.iter().zip(&targs) {
                    let declared = ctx.sub(&s.apply(declared));
                    self.conv(actual, &declared, rule)?;
                }
                s.insert(self_var, (**scrutinee).clone());
                Ok(ctx.sub(&s.apply(ret)))
            }
            Expr::LocalMatch { motive: Some(_), .. } => self.local_match(ctx, e, None),
            Expr::LocalMatch { label, .. } => self.err(
                "MATCH/cannot-infer",
                format!("cannot infer the type of match `{}`; add a motive", label.name),
            ),
            Expr::LocalComatch { label, .. } => self.err(
                "COMATCH/cannot-infer",
                format!("cannot infer the type of comatch `{}`; use it where a type is expected", label.name),
            ),
        }
    }

    fn comatch(&mut self, ctx: &Ctx, e: &Expr, expected: &Expr) -> R<()> {
        let Expr::LocalComatch { label, cocases, .. } = e else { unreachable!() };
        let nf = self.normalize(expected)?;
        let (name, args) = match &nf {
            Expr::TypCtor { name, args } if self.g.codata(name).is_some() => (name.clone(), args.clone()),
            _ => {
                let m = format!("comatch `{}` has codata type, expected `{}`", label.name, self.show(expected));
                return self.err("COMATCH/not-codata", m);
            }
        };
        let codata = self.g.codata(&name).expect("checked above");
        let this = ctx.sub(e);
        self.cocases(ctx, codata, &args, cocases, &this, "COCASE")?;
        let ty = match expected {
            Expr::TypCtor { name: n, args } if *n == name => args.clone(),
            _ => args,
        };
        let Expr::LocalComatch { cocases, .. } = &this else { unreachable!() };
        let mut fv = Vec::new();
        ty.iter().for_each(|a| fv.extend(free_vars(a)));
        fv.extend(free_vars(&this));
        let closure = self.closure(ctx, fv)?;
        self.record(
            label,
            closure,
            LocalForm::Comatch { ty_name: name, ty_args: ty, cocases: cocases.clone() },
        );
        Ok(())
    }

    /// Checks or infers a local match; returns its type.
    fn local_match(&mut self, ctx: &Ctx, e: &Expr, expected: Option<&Expr>) -> R<Expr> {
        let Expr::LocalMatch { label, scrutinee, motive, cases, .. } = e else { unreachable!() };
        let found = self.infer(ctx, scrutinee)?;
        let nf = self.normalize(&found)?;
        let (name, args) = match &nf {
            Expr::TypCtor { name, args } if self.g.data(name).is_some() => (name.clone(), args.clone()),
            Expr::TypCtor { name, .. } if self.g.codata(name).is_some() => {
                let m = format!("cannot match on `{}` of codata type `{name}`", self.show(scrutinee));
                return self.err("MATCH/codata-scrutinee", m);
            }
            _ => {
                let m = format!("cannot match on `{}` of type `{}`", self.show(scrutinee), self.show(&found));
                return self.err("MATCH/not-data", m);
            }
        };
        let data = self.g.data(&name).expect("checked above");
        let (self_var, ret, result) = match motive {
            Some(m) => {
                let mut ctx2 = ctx.clone();
                ctx2.push(&m.binder, found.clone());
                self.check(&ctx2, &m.ty, &Expr::Type)?;
                let mut s = Subst::new();
                s.insert(&m.binder, (**scrutinee).clone());
                let result = ctx.sub(&s.apply(&m.ty));
                if let Some(t) = expected {
                    self.conv(&result, t, "MATCH")?;
                }
                (m.binder.clone(), (*m.ty).clone(), result)
            }
            None => match expected {
                Some(t) => (Var::fresh("_"), t.clone(), t.clone()),
                None => unreachable!("inferred matches have motives"),
            },
        };
        self.cases(ctx, data, &args, cases, motive.as_ref().map(|m| &m.binder), &ret, "CASE")?;

        let this = ctx.sub(e);
        let Expr::LocalMatch { motive: m2, cases: cases2, .. } = &this else { unreachable!() };
        let (self_var, ret) = match m2 {
            Some(m) => (m.binder.clone(), (*m.ty).clone()),
            None => (self_var, ctx.sub(&ret)),
        };
        let ty_args = match &found {
            Expr::TypCtor { name: n, args } if *n == name => args.clone(),
            _ => args,
        };
        let mut fv = Vec::new();
        ty_args.iter().for_each(|a| fv.extend(free_vars(a)));
        fv.extend(free_vars(&ret).into_iter().filter(|v| *v != self_var));
        cases2.iter().for_each(|c| fv.extend(clause_free_vars(c)));
        let closure = self.closure(ctx, fv)?;
        self.record(
            label,
            closure,
            LocalForm::Match { self_var, ty_name: name, ty_args, ret, cases: cases2.clone() },
        );
        Ok(result)
    }

    fn record(&mut self, label: &Label, closure: Telescope, form: LocalForm) {
        if self.recorded.insert(label.name.clone()) {
            self.records.push(LiftRecord { label: label.name.clone(), owner: self.owner, closure, form });
        }
    }

    /// Orders `fv` and the variables their types depend on so that each type
    /// mentions only earlier variables; ties follow context order.
    fn closure(&mut self, ctx: &Ctx, fv: Vec<Var>) -> R<Telescope> {
        let lookup = |v: &Var| ctx.pos.get(&v.id).map(|&i| (i, ctx.theta.apply(&ctx.vars[i].1)));
        match order_closure(fv, &lookup) {
            Ok(t) => Ok(t),
            Err(v) => self.err(
                "lift/closure-cycle",
                format!("the types of the free variables around `{v}` depend on each other"),
            ),
        }
    }

    /// Checks the cases of a definition or local match on `data` whose
    /// scrutinee has indices `args`. Each body is checked against `ret` with
    /// the case's constructor call for `binder`.
    #[allow(clippy::too_many_arguments)]
    fn cases(
        &mut self,
        ctx: &Ctx,
        data: &DataDecl,
        args: &[Expr],
        clauses: &[Clause],
        binder: Option<&Var>,
        ret: &Expr,
        rule: &str,
    ) -> R<()> {
        let names: Vec<&Name> = data.ctors.iter().map(|c| &c.name).collect();
        self.coverage(&names, clauses, rule)?;
        let mut ok = true;
        for c in clauses {
            let sig = data.ctors.iter().find(|k| k.name == c.name).expect("coverage checked");
            let outer = self.span;
            self.span = c.span;
            let r = self.clause(ctx, c, &sig.params, &sig.result_args, args, rule, |inner, this| {
                let mut s = Subst::new();
                if let Some(b) = binder {
                    s.insert(b, this.clone());
                }
                inner.sub(&s.apply(ret))
            });
            self.span = outer;
            ok &= r.is_ok();
        }
        if ok { Ok(()) } else { Err(()) }
    }

    fn cocases(
        &mut self,
        ctx: &Ctx,
        codata: &CodataDecl,
        args: &[Expr],
        clauses: &[Clause],
        this: &Expr,
        rule: &str,
    ) -> R<()> {
        let names: Vec<&Name> = codata.dtors.iter().map(|d| &d.name).collect();
        self.coverage(&names, clauses, rule)?;
        let mut ok = true;
        for c in clauses {
            let sig = codata.dtors.iter().find(|k| k.name == c.name).expect("coverage checked");
            let outer = self.span;
            self.span = c.span;
            let r = self.clause(ctx, c, &sig.params, &sig.self_args, args, rule, |inner, _| {
                let mut s = Subst::renaming(&sig.params.vars(), &c.params);
                s.insert(&sig.self_var, this.clone());
                inner.sub(&s.apply(&sig.ret))
            });
            self.span = outer;
            ok &= r.is_ok();
        }
        if ok { Ok(()) } else { Err(()) }
    }

    fn coverage(&mut self, names: &[&Name], clauses: &[Clause], rule: &str) -> R<()> {
        let mut ok = true;
        for c in clauses {
            if !names.contains(&&c.name) {
                self.diags.push(Diagnostic::error(
                    format!("{rule}/unknown-case"),
                    format!("`{}` is not one of {}", c.name, list(names)),
                    c.span,
                ));
                ok = false;
            }
        }
        for n in names {
            let k = clauses.iter().filter(|c| c.name == **n).count();
            if k == 0 {
                self.diags.push(Diagnostic::error(
                    format!("{rule}/missing-case"),
                    format!("missing clause for `{n}`"),
                    self.span,
                ));
                ok = false;
            } else if k > 1 {
                let c = clauses.iter().filter(|c| c.name == **n).nth(1).expect("counted");
                self.diags.push(Diagnostic::error(
                    format!("{rule}/duplicate-case"),
                    format!("more than one clause for `{n}`"),
                    c.span,
                ));
                ok = false;
            }
        }
        if ok { Ok(()) } else { Err(()) }
    }

    /// One case or cocase: `params` is the declared telescope the clause
    /// binds, `decl_args` the indices it declares and `args` the indices of
    /// the scrutinee or codefinition. `expected` builds the body type from the
    /// refined context and the clause's own producer (for cases).
    #[allow(clippy::too_many_arguments)]
    fn clause(
        &mut self,
        ctx: &Ctx,
        c: &Clause,
        params: &Telescope,
        decl_args: &[Expr],
        args: &[Expr],
        rule: &str,
        expected: impl FnOnce(&Ctx, &Expr) -> Expr,
    ) -> R<()> {
        if c.params.len() != params.len() {
            let m = format!("`{}` binds {} parameters, found {}", c.name, params.len(), c.params.len());
            return self.err(format!("{rule}/arity-mismatch"), m);
        }
        let ren = Subst::renaming(&params.vars(), &c.params);
        let mut inner = ctx.clone();
        for (p, v) in params.iter().zip(&c.params) {
            inner.push(v, ren.apply(&p.ty));
        }
        let lhs = ren.apply_all(decl_args);
        let pos = &inner.pos;
        let outcome = unify_with(self.g, &|v: &Var| pos.get(&v.id).copied(), &lhs, args, self.opts.fuel);
        match (outcome, &c.body) {
            (Unification::Unifies(sigma), Body::Term(body)) => {
                debug_assert!(
                    lhs.iter().zip(args).all(|(a, b)| {
                        convertible(self.g, &sigma.apply(a), &sigma.apply(b), self.opts.fuel) != Ok(false)
                    }),
                    "unifier does not equate the indices of `{}`",
                    c.name
                );
                inner.solve(&sigma);
                let this = Expr::Producer {
                    name: c.name.clone(),
                    args: c.params.iter().map(Expr::var).collect(),
                };
                let ty = expected(&inner, &this);
                self.check(&inner, body, &ty)
            }
            (Unification::Unifies(_), Body::Absurd) => {
                let m = format!("`{}` is marked absurd but its indices unify", c.name);
                self.err(format!("{rule}/reachable-absurd"), m)
            }
            (Unification::Absurd, Body::Absurd) => Ok(()),
            (Unification::Absurd, Body::Term(_)) => {
                let m = format!("`{}` can never apply and must be marked absurd", c.name);
                self.err(format!("{rule}/unreachable-case"), m)
            }
            (Unification::Undecided(a, b), _) => {
                let m = format!(
                    "cannot decide whether `{}` applies: `{}` against `{}`",
                    c.name,
                    self.show(&a),
                    self.show(&b)
                );
                self.err(format!("{rule}/undecided"), m)
            }
        }
    }
}

fn clause_free_vars(c: &Clause) -> Vec<Var> {
    match &c.body {
        Body::Term(b) => free_vars(b).into_iter().filter(|v| !c.params.contains(v)).collect(),
        Body::Absurd => Vec::new(),
    }
}

fn list(names: &[&Name]) -> String {
    names.iter().map(|n| format!("`{n}`")).collect::<Vec<_>>().join(", ")
}

/// Closes `fv` under type dependencies and orders it topologically, with
/// context position as the tie-break. `lookup` gives a context variable's
/// position and type; other variables are ignored. Returns the offending
/// variable on a cycle.
pub fn order_closure(fv: Vec<Var>, lookup: &dyn Fn(&Var) -> Option<(usize, Expr)>) -> Result<Telescope, Var> {
    let mut info: HashMap<u64, (usize, Var, Expr)> = HashMap::new();
    let mut work = fv;
    while let Some(v) = work.pop() {
        if info.contains_key(&v.id) {
            continue;
        }
        if let Some((i, t)) = lookup(&v) {
            work.extend(free_vars(&t));
            info.insert(v.id, (i, v, t));
        }
    }
    let mut nodes: Vec<&(usize, Var, Expr)> = info.values().collect();
    nodes.sort_by_key(|n| n.0);
    // 0 = unvisited, 1 = in progress, 2 = done
    let mut state: HashMap<u64, u8> = HashMap::new();
    let mut out = Vec::new();
    fn visit(
        id: u64,
        info: &HashMap<u64, (usize, Var, Expr)>,
        state: &mut HashMap<u64, u8>,
        out: &mut Vec<Param>,
    ) -> Result<(), Var> {
        let (_, v, t) = &info[&id];
        match state.get(&id) {
            Some(2) => return Ok(()),
            Some(1) => return Err(v.clone()),
            _ => {}
        }
        state.insert(id, 1);
        let mut deps: Vec<&(usize, Var, Expr)> =
            free_vars(t).iter().filter_map(|d| info.get(&d.id)).collect();
        deps.sort_by_key(|n| n.0);
        for d in deps {
            visit(d.1.id, info, state, out)?;
        }
        state.insert(id, 2);
        out.push(Param { var: v.clone(), ty: t.clone() });
        Ok(())
    }
    for n in nodes {
        visit(n.1.id, &info, &mut state, &mut out)?;
    }
    Ok(Telescope(out))
}
