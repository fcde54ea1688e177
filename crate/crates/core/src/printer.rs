//! Pretty-printer. Output re-parses to an alpha-equivalent program.
//!
//! Variables are printed by name. A binder is renamed only when printing it
//! under its own name would capture a reference to another variable or a
//! global name; the printer retries with fresh names until no capture
//! remains. Generated labels are omitted, and `Fun` terms use the `->` and
//! `\x.` sugar when the program allows it.

use std::collections::{HashMap, HashSet};

use crate::ast::*;
use crate::parser::lexer::{is_ident_continue, is_ident_start, keyword};
use crate::subst::{free_var_ids, grow};

const WIDTH: usize = 100;

#[derive(Clone, Debug)]
enum Doc {
    Text(String),
    /// A space when flat, a newline otherwise.
    Line,
    /// Nothing when flat, a newline otherwise.
    SoftLine,
    /// Always a newline; forces the enclosing groups to break.
    HardLine,
    Concat(Vec<Doc>),
    Nest(usize, Box<Doc>),
    Group(Box<Doc>),
}

fn text(s: impl Into<String>) -> Doc {
    Doc::Text(s.into())
}

fn cat(ds: Vec<Doc>) -> Doc {
    Doc::Concat(ds)
}

fn group(d: Doc) -> Doc {
    Doc::Group(Box::new(d))
}

fn nest(d: Doc) -> Doc {
    Doc::Nest(2, Box::new(d))
}

/// Flat width of `d`, or `None` if it contains a hard line break.
fn flat_width(d: &Doc, limit: usize) -> Option<usize> {
    let mut w = 0;
    let mut stack = vec![d];
    while let Some(d) = stack.pop() {
        match d {
            Doc::Text(s) => w += s.chars().count(),
            Doc::Line => w += 1,
            Doc::SoftLine => {}
            Doc::HardLine => return None,
            Doc::Concat(ds) => stack.extend(ds.iter().rev()),
            Doc::Nest(_, d) | Doc::Group(d) => stack.push(d),
        }
        if w > limit {
            return Some(w);
        }
    }
    Some(w)
}

fn render(doc: &Doc) -> String {
    let mut out = String::new();
    let mut col = 0usize;
    let mut stack: Vec<(usize, bool, &Doc)> = vec![(0, false, doc)];
    let newline = |out: &mut String, col: &mut usize, ind: usize| {
        while out.ends_with(' ') {
            out.pop();
        }
        out.push('\n');
        out.extend(std::iter::repeat(' ').take(ind));
        *col = ind;
    };
    while let Some((ind, flat, d)) = stack.pop() {
        match d {
            Doc::Text(s) => {
                out.push_str(s);
                col += s.chars().count();
            }
            Doc::Line => {
                if flat {
                    out.push(' ');
                    col += 1;
                } else {
                    newline(&mut out, &mut col, ind);
                }
            }
            Doc::SoftLine => {
                if !flat {
                    newline(&mut out, &mut col, ind);
                }
            }
            Doc::HardLine => newline(&mut out, &mut col, ind),
            Doc::Concat(ds) => {
                for d in ds.iter().rev() {
                    stack.push((ind, flat, d));
                }
            }
            Doc::Nest(i, d) => stack.push((ind + i, flat, d)),
            Doc::Group(d) => {
                let fits = flat
                    || flat_width(d, WIDTH).is_some_and(|w| col + w <= WIDTH);
                stack.push((ind, fits, d));
            }
        }
    }
    while out.ends_with(' ') {
        out.pop();
    }
    out
}

/// Surface sugar available in a program.
#[derive(Clone, Debug, Default)]
struct Sugar {
    arrow: bool,
    lambda_arity: Option<usize>,
    globals: HashSet<String>,
}

impl Sugar {
    fn of(p: &Program) -> Sugar {
        let mut s = Sugar::default();
        for d in &p.decls {
            s.globals.insert(d.name().to_string());
            match d {
                Decl::Data(x) => {
                    if &*x.name == "Fun" && x.params.len() == 2 {
                        s.arrow = true;
                    }
                    s.globals.extend(x.ctors.iter().map(|c| c.name.to_string()));
                }
                Decl::Codata(x) => {
                    if &*x.name == "Fun" && x.params.len() == 2 {
                        s.arrow = true;
                        s.lambda_arity = x.dtors.iter().find(|d| &*d.name == "ap").map(|d| d.params.len());
                    }
                    s.globals.extend(x.dtors.iter().map(|c| c.name.to_string()));
                }
                _ => {}
            }
        }
        for l in p.labels() {
            s.globals.insert(l.name.to_string());
        }
        s
    }
}

struct Printer<'a> {
    sugar: &'a Sugar,
    renames: &'a HashMap<u64, String>,
    scope: Vec<(u64, String)>,
    /// Binders that must be renamed, with their current names.
    conflicts: HashMap<u64, String>,
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Top,
    /// Left of `->`, scrutinee of `.d`: lambdas and arrows need parentheses.
    Postfix,
}

fn valid_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if is_ident_start(c)) && cs.all(is_ident_continue) && keyword(s).is_none()
}

impl<'a> Printer<'a> {
    fn printed(&self, v: &Var) -> String {
        match self.renames.get(&v.id) {
            Some(n) => n.clone(),
            None if v.is_wildcard() || valid_ident(&v.name) => v.name.to_string(),
            None => "_".to_string(),
        }
    }

    fn bind(&mut self, v: &Var) -> Doc {
        let n = self.printed(v);
        self.scope.push((v.id, n.clone()));
        text(n)
    }

    fn unbind(&mut self, n: usize) {
        self.scope.truncate(self.scope.len() - n);
    }

    fn var(&mut self, v: &Var) -> Doc {
        let n = self.printed(v);
        if n == "_" {
            self.conflicts.insert(v.id, v.name.to_string());
            return text(n);
        }
        if let Some((id, m)) = self.scope.iter().rev().find(|(_, m)| *m == n) {
            if *id != v.id {
                self.conflicts.insert(*id, m.clone());
            }
        }
        text(n)
    }

    fn global(&mut self, n: &str) -> Doc {
        if let Some((id, m)) = self.scope.iter().rev().find(|(_, m)| m == n) {
            self.conflicts.insert(*id, m.clone());
        }
        text(n)
    }

    fn args(&mut self, args: &[Expr]) -> Doc {
        let mut items = Vec::new();
        for (i, a) in args.iter().enumerate() {
            if i > 0 {
                items.push(text(","));
                items.push(Doc::Line);
            }
            items.push(self.expr(a, Prec::Top));
        }
        group(cat(vec![text("("), nest(cat(vec![Doc::SoftLine, cat(items)])), Doc::SoftLine, text(")")]))
    }

    fn app(&mut self, name: &str, args: &[Expr]) -> Doc {
        let head = self.global(name);
        if args.is_empty() {
            head
        } else {
            cat(vec![head, self.args(args)])
        }
    }

    fn block(&mut self, items: Vec<Doc>) -> Doc {
        if items.is_empty() {
            return text("{}");
        }
        let mut body = Vec::new();
        for (i, it) in items.into_iter().enumerate() {
            if i > 0 {
                body.push(text(","));
            }
            body.push(Doc::Line);
            body.push(it);
        }
        group(cat(vec![text("{"), nest(cat(body)), Doc::Line, text("}")]))
    }

    fn clause(&mut self, c: &Clause) -> Doc {
        let mut head = vec![self.global(&c.name)];
        if !c.params.is_empty() {
            let mut ps = Vec::new();
            for (i, p) in c.params.iter().enumerate() {
                if i > 0 {
                    ps.push(text(", "));
                }
                ps.push(self.bind(p));
            }
            head.push(text("("));
            head.extend(ps);
            head.push(text(")"));
        }
        let body = match &c.body {
            Body::Absurd => text(" absurd"),
            Body::Term(e) => {
                let e = self.expr(e, Prec::Top);
                group(cat(vec![text(" =>"), nest(cat(vec![Doc::Line, e]))]))
            }
        };
        self.unbind(c.params.len());
        cat(vec![cat(head), body])
    }

    fn clauses(&mut self, cs: &[Clause]) -> Doc {
        let items = cs.iter().map(|c| self.clause(c)).collect();
        self.block(items)
    }

    fn lambda_parts<'e>(&self, label: &Label, cocases: &'e [Clause]) -> Option<(&'e Var, &'e Expr)> {
        if label.user || cocases.len() != 1 {
            return None;
        }
        let c = &cocases[0];
        if &*c.name != "ap" || self.sugar.lambda_arity != Some(c.params.len()) {
            return None;
        }
        let body = c.body.term()?;
        let fv = free_var_ids(body);
        let (last, init) = c.params.split_last()?;
        if init.iter().any(|p| fv.contains(&p.id)) {
            return None;
        }
        Some((last, body))
    }

    fn expr(&mut self, e: &Expr, prec: Prec) -> Doc {
        grow(|| self.expr_inner(e, prec))
    }

    fn expr_inner(&mut self, e: &Expr, prec: Prec) -> Doc {
        let paren = |d: Doc, needs: bool| {
            if needs {
                cat(vec![text("("), d, text(")")])
            } else {
                d
            }
        };
        match e {
            Expr::Var(v) => self.var(v),
            Expr::Type => text("Type"),
            Expr::TypCtor { name, args } if self.sugar.arrow && &**name == "Fun" && args.len() == 2 => {
                let l = self.expr(&args[0], Prec::Postfix);
                let r = self.expr(&args[1], Prec::Top);
                self.global("Fun");
                let d = group(cat(vec![l, text(" ->"), Doc::Line, r]));
                paren(d, prec == Prec::Postfix)
            }
            Expr::TypCtor { name, args } | Expr::Producer { name, args } => self.app(name, args),
            Expr::Consumer { scrutinee, name, args } => {
                let s = self.expr(scrutinee, Prec::Postfix);
                let d = self.app(name, args);
                cat(vec![s, text("."), d])
            }
            Expr::LocalComatch { label, cocases, .. } => {
                if let Some((x, body)) = self.lambda_parts(label, cocases) {
                    let c = &cocases[0];
                    for p in &c.params[..c.params.len() - 1] {
                        self.scope.push((p.id, "_".into()));
                    }
                    let b = self.bind(x);
                    let body = self.expr(body, Prec::Top);
                    self.unbind(c.params.len());
                    let d = group(cat(vec![text("\\"), b, text("."), nest(cat(vec![Doc::Line, body]))]));
                    return paren(d, prec == Prec::Postfix);
                }
                let mut head = vec![text("comatch ")];
                if label.user {
                    head.push(text(format!("{} ", label.name)));
                }
                let block = self.clauses(cocases);
                head.push(block);
                cat(head)
            }
            Expr::LocalMatch { label, scrutinee, motive, cases, .. } => {
                let s = self.expr(scrutinee, Prec::Postfix);
                let mut d = vec![s, text(".match ")];
                if label.user {
                    d.push(text(format!("{} ", label.name)));
                }
                if let Some(m) = motive {
                    d.push(text("as "));
                    d.push(self.bind(&m.binder));
                    d.push(text(" => "));
                    d.push(self.expr(&m.ty, Prec::Top));
                    self.unbind(1);
                    d.push(text(" "));
                }
                d.push(self.clauses(cases));
                cat(d)
            }
        }
    }

    /// Prints a telescope, leaving its variables in scope. Adjacent
    /// parameters with the same type are grouped.
    fn telescope(&mut self, tel: &Telescope) -> Doc {
        if tel.is_empty() {
            return text("");
        }
        let mut groups: Vec<(Vec<Doc>, Doc, String)> = Vec::new();
        let mut prev: Option<(u64, Vec<u64>)> = None;
        for p in tel.iter() {
            let ty = self.expr(&p.ty, Prec::Top);
            let key = render(&ty);
            let fv = free_var_ids(&p.ty);
            let joinable = match (&prev, groups.last()) {
                (Some((_, ids)), Some((_, _, k))) => *k == key && !ids.iter().any(|i| fv.contains(i)),
                _ => false,
            };
            let b = self.bind(&p.var);
            if joinable {
                groups.last_mut().unwrap().0.push(b);
                prev.as_mut().unwrap().1.push(p.var.id);
            } else {
                groups.push((vec![b], ty, key));
                prev = Some((0, vec![p.var.id]));
            }
        }
        let mut items = Vec::new();
        for (i, (bs, ty, _)) in groups.into_iter().enumerate() {
            if i > 0 {
                items.push(text(","));
                items.push(Doc::Line);
            }
            let mut names = Vec::new();
            for (j, b) in bs.into_iter().enumerate() {
                if j > 0 {
                    names.push(text(" "));
                }
                names.push(b);
            }
            items.push(cat(vec![cat(names), text(": "), ty]));
        }
        group(cat(vec![text("("), nest(cat(vec![Doc::SoftLine, cat(items)])), Doc::SoftLine, text(")")]))
    }

    fn docs(&self, meta: &Meta) -> Doc {
        let mut out = Vec::new();
        for d in &meta.doc {
            out.push(text(if d.is_empty() { "-- |".to_string() } else { format!("-- | {d}") }));
            out.push(Doc::HardLine);
        }
        cat(out)
    }

    /// `T`, `T(args)` or `(z: T(args))` depending on whether `z` is used.
    fn self_spec(&mut self, ty: &str, args: &[Expr], self_var: &Var, ret: &Expr, implicit_ok: bool) -> Doc {
        let used = free_var_ids(ret).contains(&self_var.id);
        let t = self.app(ty, args);
        if used {
            let z = self.bind(self_var);
            cat(vec![text("("), z, text(": "), t, text(")."), ])
        } else if implicit_ok && args.is_empty() {
            text("")
        } else {
            cat(vec![t, text(".")])
        }
    }

    fn decl(&mut self, d: &Decl) -> Doc {
        self.scope.clear();
        let docs = self.docs(d.meta());
        let body = match d {
            Decl::Data(x) => {
                let tel = self.telescope(&x.params);
                self.scope.clear();
                let mut items = Vec::new();
                for c in &x.ctors {
                    let docs = self.docs(&c.meta);
                    let tel = self.telescope(&c.params);
                    let mut item = vec![docs, self.global(&c.name), tel];
                    if !x.params.is_empty() || !c.result_args.is_empty() {
                        item.push(text(": "));
                        item.push(self.app(&x.name, &c.result_args));
                    }
                    self.scope.clear();
                    items.push(cat(item));
                }
                let block = self.block(items);
                cat(vec![text("data "), text(x.name.to_string()), tel, text(" "), block])
            }
            Decl::Codata(x) => {
                let tel = self.telescope(&x.params);
                self.scope.clear();
                let mut items = Vec::new();
                for c in &x.dtors {
                    let docs = self.docs(&c.meta);
                    let tel = self.telescope(&c.params);
                    let implicit_ok = x.params.is_empty();
                    let selfd = self.self_spec(&x.name, &c.self_args, &c.self_var, &c.ret, implicit_ok);
                    let ret = self.expr(&c.ret, Prec::Top);
                    self.scope.clear();
                    let name = self.global(&c.name);
                    items.push(cat(vec![docs, selfd, name, tel, text(": "), ret]));
                }
                let block = self.block(items);
                cat(vec![text("codata "), text(x.name.to_string()), tel, text(" "), block])
            }
            Decl::Def(x) => {
                let tel = self.telescope(&x.params);
                let n = self.scope.len();
                let selfd = self.self_spec(&x.self_type, &x.self_args, &x.self_var, &x.ret, false);
                let ret = self.expr(&x.ret, Prec::Top);
                self.scope.truncate(n);
                let cases = self.clauses(&x.cases);
                let name = self.global(&x.name);
                cat(vec![
                    text("def "),
                    selfd,
                    name,
                    tel,
                    text(": "),
                    ret,
                    text(" "),
                    cases,
                ])
            }
            Decl::Codef(x) => {
                let tel = self.telescope(&x.params);
                let res = self.app(&x.result_type, &x.result_args);
                let cocases = self.clauses(&x.cocases);
                cat(vec![
                    text("codef "),
                    text(x.name.to_string()),
                    tel,
                    text(": "),
                    res,
                    text(" "),
                    cocases,
                ])
            }
            Decl::Let(x) => {
                let tel = self.telescope(&x.params);
                let ty = self.expr(&x.ty, Prec::Top);
                let body = self.expr(&x.body, Prec::Top);
                cat(vec![
                    text("let "),
                    text(x.name.to_string()),
                    tel,
                    text(": "),
                    ty,
                    text(" :="),
                    group(nest(cat(vec![Doc::Line, body]))),
                    text(";"),
                ])
            }
        };
        cat(vec![docs, body])
    }
}

/// Runs `f` with increasingly many binders renamed until nothing is
/// captured.
fn print_with(sugar: &Sugar, mut taken: HashSet<String>, f: impl Fn(&mut Printer) -> Doc) -> String {
    let mut renames: HashMap<u64, String> = HashMap::new();
    loop {
        let mut p = Printer { sugar, renames: &renames, scope: Vec::new(), conflicts: HashMap::new() };
        let doc = f(&mut p);
        if p.conflicts.is_empty() || renames.len() > 10_000 {
            return render(&doc);
        }
        let mut conflicts: Vec<(u64, String)> = p.conflicts.into_iter().collect();
        conflicts.sort();
        for (id, stem) in conflicts {
            let stem = stem.trim_end_matches(|c: char| c.is_ascii_digit());
            let stem = if stem.is_empty() || stem == "_" { "x" } else { stem };
            let mut k = 1;
            let name = loop {
                let cand = format!("{stem}{k}");
                if taken.insert(cand.clone()) {
                    break cand;
                }
                k += 1;
            };
            renames.insert(id, name);
        }
    }
}

fn names_in(e: &Expr, out: &mut HashSet<String>) {
    e.visit(&mut |e| match e {
        Expr::Var(v) => {
            out.insert(v.name.to_string());
        }
        Expr::LocalComatch { cocases: cs, .. } | Expr::LocalMatch { cases: cs, .. } => {
            for c in cs {
                out.extend(c.params.iter().map(|p| p.name.to_string()));
            }
            if let Expr::LocalMatch { motive: Some(m), .. } = e {
                out.insert(m.binder.name.to_string());
            }
        }
        _ => {}
    });
}

fn names_in_decl(d: &Decl, out: &mut HashSet<String>) {
    for e in d.exprs() {
        names_in(e, out);
    }
    fn tel(t: &Telescope, out: &mut HashSet<String>) {
        out.extend(t.iter().map(|p| p.var.name.to_string()));
    }
    match d {
        Decl::Data(x) => {
            tel(&x.params, out);
            x.ctors.iter().for_each(|c| tel(&c.params, out));
        }
        Decl::Codata(x) => {
            tel(&x.params, out);
            for c in &x.dtors {
                tel(&c.params, out);
                out.insert(c.self_var.name.to_string());
            }
        }
        Decl::Def(x) => {
            tel(&x.params, out);
            out.insert(x.self_var.name.to_string());
        }
        Decl::Codef(x) => tel(&x.params, out),
        Decl::Let(x) => tel(&x.params, out),
    }
    let clauses: &[Clause] = match d {
        Decl::Def(x) => &x.cases,
        Decl::Codef(x) => &x.cocases,
        _ => &[],
    };
    for c in clauses {
        out.extend(c.params.iter().map(|p| p.name.to_string()));
    }
}

/// Prints one declaration in the context of `program`.
pub fn print_decl(d: &Decl, program: &Program) -> String {
    let sugar = Sugar::of(program);
    let mut taken = sugar.globals.clone();
    names_in_decl(d, &mut taken);
    print_with(&sugar, taken, |p| p.decl(d))
}

/// Prints every non-prelude declaration, separated by blank lines.
pub fn print_program(program: &Program) -> String {
    let mut out = String::new();
    for d in program.user_decls() {
        if !out.is_empty() {
            out.push_str("\n\n");
        }
        out.push_str(&print_decl(d, program));
    }
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

/// Prints an expression using `program`'s sugar.
pub fn print_expr(e: &Expr, program: &Program) -> String {
    let sugar = Sugar::of(program);
    let mut taken = sugar.globals.clone();
    names_in(e, &mut taken);
    print_with(&sugar, taken, |p| p.expr(e, Prec::Top))
}
