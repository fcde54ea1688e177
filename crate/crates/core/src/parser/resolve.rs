//! Name resolution and desugaring of the raw tree into core syntax.
//!
//! `A -> B` becomes `Fun(A, B)` and `\x. e` becomes a comatch with a single
//! `ap` cocase whose leading parameters are wildcards. Both require a type
//! `Fun` with two parameters and, for lambdas, a codata destructor `ap`.

use std::collections::{HashMap, HashSet};

use super::grammar::*;
use crate::ast::*;
use crate::diagnostic::Diagnostic;
use crate::subst::grow;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum TypeKind {
    Data,
    Codata,
}

/// Global names visible during resolution.
#[derive(Clone, Debug, Default)]
pub struct Tables {
    types: HashMap<String, (TypeKind, usize)>,
    producers: HashSet<String>,
    consumers: HashSet<String>,
    /// Arity of `ap` when `Fun` is a codata type declaring it.
    lambda_arity: Option<usize>,
}

fn raw_arity(params: &[RawParam]) -> usize {
    params.iter().map(|p| p.binders.len()).sum()
}

impl Tables {
    pub fn from_program(p: &Program) -> Tables {
        let mut t = Tables::default();
        for d in &p.decls {
            match d {
                Decl::Data(d) => {
                    t.types.insert(d.name.to_string(), (TypeKind::Data, d.params.len()));
                    t.producers.extend(d.ctors.iter().map(|c| c.name.to_string()));
                }
                Decl::Codata(d) => {
                    t.types.insert(d.name.to_string(), (TypeKind::Codata, d.params.len()));
                    t.consumers.extend(d.dtors.iter().map(|c| c.name.to_string()));
                    if &*d.name == "Fun" {
                        if let Some(ap) = d.dtors.iter().find(|x| &*x.name == "ap") {
                            t.lambda_arity = Some(ap.params.len());
                        }
                    }
                }
                Decl::Def(d) => {
                    t.consumers.insert(d.name.to_string());
                }
                Decl::Codef(d) => {
                    t.producers.insert(d.name.to_string());
                }
                Decl::Let(d) => {
                    t.producers.insert(d.name.to_string());
                }
            }
        }
        t
    }

    fn from_raw(decls: &[RawDecl], diags: &mut Vec<Diagnostic>) -> Tables {
        let mut t = Tables::default();
        let mut seen: HashMap<(&'static str, String), ()> = HashMap::new();
        let mut add = |ns: &'static str, name: &str, span: Span, diags: &mut Vec<Diagnostic>| {
            if seen.insert((ns, name.to_string()), ()).is_some() {
                diags.push(Diagnostic::error(
                    "resolve/duplicate-name",
                    format!("`{name}` is declared more than once"),
                    span,
                ));
            }
        };
        for d in decls {
            match d {
                RawDecl::Data { name, params, ctors, span, .. } => {
                    add("type", name, *span, diags);
                    t.types.insert(name.clone(), (TypeKind::Data, raw_arity(params)));
                    for c in ctors {
                        add("producer", &c.name, c.span, diags);
                        t.producers.insert(c.name.clone());
                    }
                }
                RawDecl::Codata { name, params, dtors, span, .. } => {
                    add("type", name, *span, diags);
                    t.types.insert(name.clone(), (TypeKind::Codata, raw_arity(params)));
                    for c in dtors {
                        add("consumer", &c.name, c.span, diags);
                        t.consumers.insert(c.name.clone());
                        if name == "Fun" && c.name == "ap" {
                            t.lambda_arity = Some(raw_arity(&c.params));
                        }
                    }
                }
                RawDecl::Def { name, span, .. } => {
                    add("consumer", name, *span, diags);
                    t.consumers.insert(name.clone());
                }
                RawDecl::Codef { name, span, .. } | RawDecl::Let { name, span, .. } => {
                    add("producer", name, *span, diags);
                    t.producers.insert(name.clone());
                }
            }
        }
        t
    }

    fn arrow_ok(&self) -> bool {
        matches!(self.types.get("Fun"), Some((_, 2)))
    }

    fn taken(&self, name: &str) -> bool {
        self.types.contains_key(name) || self.producers.contains(name) || self.consumers.contains(name)
    }
}

/// Fills in generated labels, numbering local forms per declaration in
/// textual order.
fn assign_labels(decls: &mut [RawDecl], tables: &Tables, diags: &mut Vec<Diagnostic>) {
    let mut taken: HashSet<String> = HashSet::new();
    let mut user_labels: Vec<(String, Span)> = Vec::new();
    for d in decls.iter_mut() {
        walk_decl(d, &mut |e| match e {
            RawExpr::Comatch { label: Some(l), span, .. } | RawExpr::Match { label: Some(l), span, .. } => {
                user_labels.push((l.name.clone(), *span))
            }
            _ => {}
        });
    }
    for (name, span) in user_labels {
        if !taken.insert(name.clone()) || tables.taken(&name) {
            diags.push(Diagnostic::error(
                "lift/duplicate-label",
                format!("label `{name}` is not unique"),
                span,
            ));
        }
    }
    for d in decls.iter_mut() {
        let owner = d.name().to_string();
        let mut counts: HashMap<&'static str, usize> = HashMap::new();
        walk_decl(d, &mut |e| {
            let (slot, kind) = match e {
                RawExpr::Comatch { label, .. } | RawExpr::Lambda { label, .. } => (label, "comatch"),
                RawExpr::Match { label, .. } => (label, "match"),
                _ => return,
            };
            if slot.is_some() {
                return;
            }
            let k = counts.entry(kind).or_insert(0);
            loop {
                *k += 1;
                let name = format!("{owner}_{kind}_{k}");
                if !tables.taken(&name) && taken.insert(name.clone()) {
                    *slot = Some(RawLabel { name, user: false });
                    break;
                }
            }
        });
    }
}

fn walk_decl(d: &mut RawDecl, f: &mut dyn FnMut(&mut RawExpr)) {
    fn params(ps: &mut [RawParam], f: &mut dyn FnMut(&mut RawExpr)) {
        for p in ps {
            walk(&mut p.ty, f);
        }
    }
    fn app(t: &mut RawTypeApp, f: &mut dyn FnMut(&mut RawExpr)) {
        for a in &mut t.args {
            walk(a, f);
        }
    }
    fn selfspec(s: &mut RawSelf, f: &mut dyn FnMut(&mut RawExpr)) {
        match s {
            RawSelf::Implicit => {}
            RawSelf::Typed(t) | RawSelf::Named(_, t) => app(t, f),
        }
    }
    fn clauses(cs: &mut [RawClause], f: &mut dyn FnMut(&mut RawExpr)) {
        for c in cs {
            if let Some(b) = &mut c.body {
                walk(b, f);
            }
        }
    }
    match d {
        RawDecl::Data { params: ps, ctors, .. } => {
            params(ps, f);
            for c in ctors {
                params(&mut c.params, f);
                if let Some(r) = &mut c.result {
                    app(r, f);
                }
            }
        }
        RawDecl::Codata { params: ps, dtors, .. } => {
            params(ps, f);
            for c in dtors {
                selfspec(&mut c.self_spec, f);
                params(&mut c.params, f);
                walk(&mut c.ret, f);
            }
        }
        RawDecl::Def { self_spec, params: ps, ret, cases, .. } => {
            selfspec(self_spec, f);
            params(ps, f);
            walk(ret, f);
            clauses(cases, f);
        }
        RawDecl::Codef { params: ps, result, cocases, .. } => {
            params(ps, f);
            app(result, f);
            clauses(cocases, f);
        }
        RawDecl::Let { params: ps, ty, body, .. } => {
            params(ps, f);
            walk(ty, f);
            walk(body, f);
        }
    }
}

fn walk(e: &mut RawExpr, f: &mut dyn FnMut(&mut RawExpr)) {
    grow(|| match e {
        RawExpr::Ident { args, .. } => {
            for a in args.iter_mut().flatten() {
                walk(a, f);
            }
        }
        RawExpr::Type(_) => {}
        RawExpr::Dot { scrutinee, args, .. } => {
            walk(scrutinee, f);
            for a in args.iter_mut().flatten() {
                walk(a, f);
            }
        }
        RawExpr::Match { .. } => {
            if let RawExpr::Match { scrutinee, .. } = e {
                walk(scrutinee, f);
            }
            f(e);
            if let RawExpr::Match { motive, cases, .. } = e {
                if let Some((_, m)) = motive {
                    walk(m, f);
                }
                for c in cases {
                    if let Some(b) = &mut c.body {
                        walk(b, f);
                    }
                }
            }
        }
        RawExpr::Comatch { .. } => {
            f(e);
            if let RawExpr::Comatch { cocases, .. } = e {
                for c in cocases {
                    if let Some(b) = &mut c.body {
                        walk(b, f);
                    }
                }
            }
        }
        RawExpr::Lambda { .. } => {
            f(e);
            if let RawExpr::Lambda { body, .. } = e {
                walk(body, f);
            }
        }
        RawExpr::Arrow { lhs, rhs, .. } => {
            walk(lhs, f);
            walk(rhs, f);
        }
    })
}

struct Resolver<'a> {
    tables: &'a Tables,
    scope: Vec<(String, Var)>,
    diags: Vec<Diagnostic>,
}

impl<'a> Resolver<'a> {
    fn err(&mut self, code: &str, msg: String, span: Span) {
        self.diags.push(Diagnostic::error(format!("resolve/{code}"), msg, span));
    }

    fn lookup(&self, name: &str) -> Option<&Var> {
        self.scope.iter().rev().find(|(n, _)| n == name).map(|(_, v)| v)
    }

    fn env(&self) -> ClosureEnv {
        let mut seen = HashSet::new();
        let mut out: ClosureEnv = Vec::new();
        for (_, v) in self.scope.iter().rev() {
            if seen.insert(v.id) {
                out.push((v.clone(), Expr::Var(v.clone())));
            }
        }
        out.reverse();
        out
    }

    fn bind(&mut self, b: &RawBinder) -> Var {
        let v = Var::fresh(&b.name);
        if b.name != "_" {
            self.scope.push((b.name.clone(), v.clone()));
        }
        v
    }

    fn check_distinct(&mut self, binders: &[&RawBinder]) {
        let mut seen = HashSet::new();
        for b in binders {
            if b.name != "_" && !seen.insert(b.name.as_str()) {
                self.err("duplicate-binder", format!("`{}` is bound twice", b.name), b.span);
            }
        }
    }

    /// Resolves a telescope, leaving its variables in scope.
    fn telescope(&mut self, params: &[RawParam]) -> Telescope {
        let all: Vec<&RawBinder> = params.iter().flat_map(|p| p.binders.iter()).collect();
        self.check_distinct(&all);
        let mut out = Vec::new();
        for p in params {
            let ty = self.expr(&p.ty);
            for b in &p.binders {
                let var = self.bind(b);
                out.push(Param { var, ty: ty.clone() });
            }
        }
        Telescope(out)
    }

    fn exprs(&mut self, es: &[RawExpr]) -> Vec<Expr> {
        es.iter().map(|e| self.expr(e)).collect()
    }

    fn label(&self, l: &Option<RawLabel>) -> Label {
        match l {
            Some(l) => Label { name: l.name.as_str().into(), user: l.user },
            None => Label { name: "_unlabelled".into(), user: false },
        }
    }

    fn clause(&mut self, c: &RawClause) -> Clause {
        let bs: Vec<&RawBinder> = c.params.iter().collect();
        self.check_distinct(&bs);
        let n = self.scope.len();
        let params: Vec<Var> = c.params.iter().map(|b| self.bind(b)).collect();
        let body = match &c.body {
            Some(b) => Body::Term(self.expr(b)),
            None => Body::Absurd,
        };
        self.scope.truncate(n);
        Clause { name: c.name.as_str().into(), params, body, span: c.span }
    }

    fn expr(&mut self, e: &RawExpr) -> Expr {
        grow(|| self.expr_inner(e))
    }

    fn expr_inner(&mut self, e: &RawExpr) -> Expr {
        match e {
            RawExpr::Type(_) => Expr::Type,
            RawExpr::Ident { name, args, span } => {
                if let Some(v) = self.lookup(name).cloned() {
                    if args.is_some() {
                        self.err(
                            "variable-applied",
                            format!("variable `{name}` cannot take arguments"),
                            *span,
                        );
                    }
                    return Expr::Var(v);
                }
                let args = args.as_ref().map(|a| self.exprs(a)).unwrap_or_default();
                let is_type = self.tables.types.contains_key(name);
                let is_prod = self.tables.producers.contains(name);
                if is_type && is_prod {
                    self.err("ambiguous-name", format!("`{name}` is both a type and a producer"), *span);
                }
                if is_type {
                    Expr::TypCtor { name: name.as_str().into(), args }
                } else if is_prod {
                    Expr::Producer { name: name.as_str().into(), args }
                } else {
                    self.err("unbound-name", format!("cannot find `{name}`"), *span);
                    Expr::Producer { name: name.as_str().into(), args }
                }
            }
            RawExpr::Dot { scrutinee, name, args, span } => {
                let s = self.expr(scrutinee);
                let args = args.as_ref().map(|a| self.exprs(a)).unwrap_or_default();
                if !self.tables.consumers.contains(name) {
                    self.err(
                        "unbound-name",
                        format!("cannot find destructor or definition `{name}`"),
                        *span,
                    );
                }
                Expr::Consumer { scrutinee: Box::new(s), name: name.as_str().into(), args }
            }
            RawExpr::Arrow { lhs, rhs, span } => {
                if !self.tables.arrow_ok() {
                    self.err(
                        "missing-fun",
                        "`->` needs a type `Fun` with two parameters".into(),
                        *span,
                    );
                }
                Expr::TypCtor { name: "Fun".into(), args: vec![self.expr(lhs), self.expr(rhs)] }
            }
            RawExpr::Lambda { label, binder, body, span } => {
                let arity = match self.tables.lambda_arity {
                    Some(n) if n >= 1 && self.tables.types.get("Fun").map(|t| t.0) == Some(TypeKind::Codata) => n,
                    _ => {
                        self.err(
                            "missing-fun",
                            "`\\x. e` needs a codata type `Fun` with destructor `ap`".into(),
                            *span,
                        );
                        1
                    }
                };
                let env = self.env();
                let n = self.scope.len();
                let mut params: Vec<Var> = (0..arity - 1).map(|_| Var::fresh("_")).collect();
                params.push(self.bind(binder));
                let body = self.expr(body);
                self.scope.truncate(n);
                Expr::LocalComatch {
                    label: self.label(label),
                    cocases: vec![Clause { name: "ap".into(), params, body: Body::Term(body), span: *span }],
                    env,
                }
            }
            RawExpr::Comatch { label, cocases, .. } => {
                let env = self.env();
                let cocases = cocases.iter().map(|c| self.clause(c)).collect();
                Expr::LocalComatch { label: self.label(label), cocases, env }
            }
            RawExpr::Match { scrutinee, label, motive, cases, .. } => {
                let s = self.expr(scrutinee);
                let env = self.env();
                let motive = motive.as_ref().map(|(b, m)| {
                    let n = self.scope.len();
                    let binder = self.bind(b);
                    let ty = self.expr(m);
                    self.scope.truncate(n);
                    Motive { binder, ty: Box::new(ty) }
                });
                let cases = cases.iter().map(|c| self.clause(c)).collect();
                Expr::LocalMatch { label: self.label(label), scrutinee: Box::new(s), motive, cases, env }
            }
        }
    }

    fn self_app(&mut self, t: &RawTypeApp) -> Vec<Expr> {
        self.exprs(&t.args)
    }

    fn decl(&mut self, d: &RawDecl, prelude: bool) -> Option<Decl> {
        self.scope.clear();
        let meta = |docs: &Vec<String>, span: Span| Meta {
            doc: docs.clone(),
            span: if prelude { Span::default() } else { span },
            prelude,
        };
        let decl = match d {
            RawDecl::Data { docs, name, params, ctors, span } => {
                let ps = self.telescope(params);
                let mut out = Vec::new();
                for c in ctors {
                    self.scope.clear();
                    let cps = self.telescope(&c.params);
                    let result_args = match &c.result {
                        Some(r) => {
                            if &r.name != name {
                                self.err(
                                    "constructor-result",
                                    format!("constructor `{}` must return `{name}`", c.name),
                                    r.span,
                                );
                            }
                            self.self_app(r)
                        }
                        None => {
                            if !ps.is_empty() {
                                self.err(
                                    "constructor-result",
                                    format!("constructor `{}` needs a result type", c.name),
                                    c.span,
                                );
                            }
                            Vec::new()
                        }
                    };
                    out.push(CtorSig {
                        name: c.name.as_str().into(),
                        params: cps,
                        result_args,
                        meta: meta(&c.docs, c.span),
                    });
                }
                Decl::Data(DataDecl { name: name.as_str().into(), params: ps, ctors: out, meta: meta(docs, *span) })
            }
            RawDecl::Codata { docs, name, params, dtors, span } => {
                let ps = self.telescope(params);
                let mut out = Vec::new();
                for c in dtors {
                    self.scope.clear();
                    let dps = self.telescope(&c.params);
                    let (self_args, self_var) = match &c.self_spec {
                        RawSelf::Implicit => {
                            if !ps.is_empty() {
                                self.err(
                                    "destructor-self",
                                    format!("destructor `{}` must state its self type", c.name),
                                    c.span,
                                );
                            }
                            (Vec::new(), Var::fresh("self"))
                        }
                        RawSelf::Typed(t) | RawSelf::Named(_, t) => {
                            if &t.name != name {
                                self.err(
                                    "destructor-self",
                                    format!("destructor `{}` must take `{name}`", c.name),
                                    t.span,
                                );
                            }
                            let args = self.self_app(t);
                            let v = match &c.self_spec {
                                RawSelf::Named(b, _) => self.bind(b),
                                _ => Var::fresh("self"),
                            };
                            (args, v)
                        }
                    };
                    let ret = self.expr(&c.ret);
                    out.push(DtorSig {
                        name: c.name.as_str().into(),
                        params: dps,
                        self_args,
                        self_var,
                        ret,
                        meta: meta(&c.docs, c.span),
                    });
                }
                Decl::Codata(CodataDecl {
                    name: name.as_str().into(),
                    params: ps,
                    dtors: out,
                    meta: meta(docs, *span),
                })
            }
            RawDecl::Def { docs, self_spec, name, params, ret, cases, span } => {
                let ps = self.telescope(params);
                let (self_type, self_args, binder) = match self_spec {
                    RawSelf::Implicit => unreachable!("definitions always name their self type"),
                    RawSelf::Typed(t) => (t.name.clone(), self.self_app(t), None),
                    RawSelf::Named(b, t) => (t.name.clone(), self.self_app(t), Some(b)),
                };
                let n = self.scope.len();
                let self_var = match binder {
                    Some(b) => self.bind(b),
                    None => Var::fresh("self"),
                };
                let ret = self.expr(ret);
                self.scope.truncate(n);
                let cases = cases.iter().map(|c| self.clause(c)).collect();
                Decl::Def(DefDecl {
                    name: name.as_str().into(),
                    params: ps,
                    self_type: self_type.as_str().into(),
                    self_args,
                    self_var,
                    ret,
                    cases,
                    meta: meta(docs, *span),
                })
            }
            RawDecl::Codef { docs, name, params, result, cocases, span } => {
                let ps = self.telescope(params);
                let result_args = self.self_app(result);
                let cocases = cocases.iter().map(|c| self.clause(c)).collect();
                Decl::Codef(CodefDecl {
                    name: name.as_str().into(),
                    params: ps,
                    result_type: result.name.as_str().into(),
                    result_args,
                    cocases,
                    meta: meta(docs, *span),
                })
            }
            RawDecl::Let { docs, name, params, ty, body, span } => {
                let ps = self.telescope(params);
                let ty = self.expr(ty);
                let body = self.expr(body);
                Decl::Let(LetDecl {
                    name: name.as_str().into(),
                    params: ps,
                    ty,
                    body,
                    meta: meta(docs, *span),
                })
            }
        };
        Some(decl)
    }
}

/// Resolves prelude and user declarations into one program.
pub fn resolve_program(
    prelude: Vec<RawDecl>,
    user: Vec<RawDecl>,
) -> (Program, Vec<Diagnostic>) {
    let mut diags = Vec::new();
    let n_prelude = prelude.len();
    let mut all: Vec<RawDecl> = prelude.into_iter().chain(user).collect();
    let tables = Tables::from_raw(&all, &mut diags);
    assign_labels(&mut all, &tables, &mut diags);
    let mut r = Resolver { tables: &tables, scope: Vec::new(), diags: Vec::new() };
    let mut decls = Vec::new();
    for (i, d) in all.iter().enumerate() {
        if let Some(d) = r.decl(d, i < n_prelude) {
            decls.push(d);
        }
    }
    diags.extend(r.diags);
    (Program::new(decls), diags)
}

/// Resolves a standalone closed expression against `program`'s names.
pub fn resolve_expr(raw: &RawExpr, program: &Program, owner: &str) -> (Expr, Vec<Diagnostic>) {
    let tables = Tables::from_program(program);
    let mut raw = raw.clone();
    let mut decl = RawDecl::Let {
        docs: Vec::new(),
        name: owner.to_string(),
        params: Vec::new(),
        ty: RawExpr::Type(Span::default()),
        body: raw.clone(),
        span: Span::default(),
    };
    let mut diags = Vec::new();
    let mut taken = tables.clone();
    for l in program.labels() {
        taken.producers.insert(l.name.to_string());
    }
    assign_labels(std::slice::from_mut(&mut decl), &taken, &mut diags);
    if let RawDecl::Let { body, .. } = decl {
        raw = body;
    }
    let mut r = Resolver { tables: &tables, scope: Vec::new(), diags: Vec::new() };
    let e = r.expr(&raw);
    diags.extend(r.diags);
    (e, diags)
}
