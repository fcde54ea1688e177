//! Syntax trees for programs: variables, expressions, telescopes and declarations.
//!
//! Variables are identified by a globally unique id; the name is kept only for
//! printing. Constructor, codefinition, destructor, definition and label names
//! are plain strings and are compared literally.

use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

pub type Name = Arc<str>;

static NEXT_VAR: AtomicU64 = AtomicU64::new(1);

/// Byte range into a source file.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }

    pub fn to(self, other: Span) -> Span {
        Span::new(self.start.min(other.start), self.end.max(other.end))
    }
}

#[derive(Clone, Debug)]
pub struct Var {
    pub name: Name,
    pub id: u64,
}

impl Var {
    pub fn fresh(name: &str) -> Var {
        Var { name: name.into(), id: NEXT_VAR.fetch_add(1, Ordering::Relaxed) }
    }

    /// A new variable with the same display name.
    pub fn refresh(&self) -> Var {
        Var { name: self.name.clone(), id: NEXT_VAR.fetch_add(1, Ordering::Relaxed) }
    }

    pub fn is_wildcard(&self) -> bool {
        &*self.name == "_"
    }
}

impl PartialEq for Var {
    fn eq(&self, other: &Var) -> bool {
        self.id == other.id
    }
}

impl Eq for Var {}

impl Hash for Var {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.id.hash(state)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Label of a local match or comatch. Unlabelled forms receive a generated
/// label during resolution; `user` records which kind it is.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Label {
    pub name: Name,
    pub user: bool,
}

/// Values of every variable in scope at the site where a local form was
/// written. Substitution updates the values, never the keys, so a lifted
/// form can recover its closure arguments from any copy of the term.
pub type ClosureEnv = Vec<(Var, Expr)>;

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Var(Var),
    Type,
    TypCtor { name: Name, args: Vec<Expr> },
    Producer { name: Name, args: Vec<Expr> },
    Consumer { scrutinee: Box<Expr>, name: Name, args: Vec<Expr> },
    LocalComatch { label: Label, cocases: Vec<Clause>, env: ClosureEnv },
    LocalMatch {
        label: Label,
        scrutinee: Box<Expr>,
        motive: Option<Motive>,
        cases: Vec<Clause>,
        env: ClosureEnv,
    },
}

#[derive(Clone, Debug, PartialEq)]
pub struct Motive {
    pub binder: Var,
    pub ty: Box<Expr>,
}

/// A case (of a match or definition) or a cocase (of a comatch or
/// codefinition). `name` is the constructor or destructor it handles; the
/// parameter types are those of the declared telescope.
#[derive(Clone, Debug, PartialEq)]
pub struct Clause {
    pub name: Name,
    pub params: Vec<Var>,
    pub body: Body,
    pub span: Span,
}

pub type Case = Clause;
pub type Cocase = Clause;

#[derive(Clone, Debug, PartialEq)]
pub enum Body {
    Term(Expr),
    Absurd,
}

impl Body {
    pub fn term(&self) -> Option<&Expr> {
        match self {
            Body::Term(e) => Some(e),
            Body::Absurd => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    pub var: Var,
    pub ty: Expr,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Telescope(pub Vec<Param>);

impl Telescope {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn vars(&self) -> Vec<Var> {
        self.0.iter().map(|p| p.var.clone()).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Param> {
        self.0.iter()
    }
}

/// Documentation, position and provenance shared by declarations and their
/// constructor and destructor entries.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Meta {
    pub doc: Vec<String>,
    pub span: Span,
    /// Declarations added from the prelude are not printed.
    pub prelude: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CtorSig {
    pub name: Name,
    pub params: Telescope,
    pub result_args: Vec<Expr>,
    pub meta: Meta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DtorSig {
    pub name: Name,
    pub params: Telescope,
    pub self_args: Vec<Expr>,
    pub self_var: Var,
    pub ret: Expr,
    pub meta: Meta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DataDecl {
    pub name: Name,
    pub params: Telescope,
    pub ctors: Vec<CtorSig>,
    pub meta: Meta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodataDecl {
    pub name: Name,
    pub params: Telescope,
    pub dtors: Vec<DtorSig>,
    pub meta: Meta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DefDecl {
    pub name: Name,
    pub params: Telescope,
    pub self_type: Name,
    pub self_args: Vec<Expr>,
    pub self_var: Var,
    pub ret: Expr,
    pub cases: Vec<Case>,
    pub meta: Meta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CodefDecl {
    pub name: Name,
    pub params: Telescope,
    pub result_type: Name,
    pub result_args: Vec<Expr>,
    pub cocases: Vec<Cocase>,
    pub meta: Meta,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LetDecl {
    pub name: Name,
    pub params: Telescope,
    pub ty: Expr,
    pub body: Expr,
    pub meta: Meta,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Decl {
    Data(DataDecl),
    Codata(CodataDecl),
    Def(DefDecl),
    Codef(CodefDecl),
    Let(LetDecl),
}

impl Decl {
    pub fn name(&self) -> &Name {
        match self {
            Decl::Data(d) => &d.name,
            Decl::Codata(d) => &d.name,
            Decl::Def(d) => &d.name,
            Decl::Codef(d) => &d.name,
            Decl::Let(d) => &d.name,
        }
    }

    pub fn meta(&self) -> &Meta {
        match self {
            Decl::Data(d) => &d.meta,
            Decl::Codata(d) => &d.meta,
            Decl::Def(d) => &d.meta,
            Decl::Codef(d) => &d.meta,
            Decl::Let(d) => &d.meta,
        }
    }

    pub fn meta_mut(&mut self) -> &mut Meta {
        match self {
            Decl::Data(d) => &mut d.meta,
            Decl::Codata(d) => &mut d.meta,
            Decl::Def(d) => &mut d.meta,
            Decl::Codef(d) => &mut d.meta,
            Decl::Let(d) => &mut d.meta,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Decl::Data(_) => "data",
            Decl::Codata(_) => "codata",
            Decl::Def(_) => "def",
            Decl::Codef(_) => "codef",
            Decl::Let(_) => "let",
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Program {
    pub decls: Vec<Decl>,
}

impl Program {
    pub fn new(decls: Vec<Decl>) -> Program {
        Program { decls }
    }

    /// Declarations that did not come from the prelude.
    pub fn user_decls(&self) -> impl Iterator<Item = &Decl> {
        self.decls.iter().filter(|d| !d.meta().prelude)
    }

    pub fn index(&self) -> Index {
        Index::new(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ProducerRef {
    Ctor { decl: usize, index: usize },
    Codef(usize),
    Let(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConsumerRef {
    Dtor { decl: usize, index: usize },
    Def(usize),
}

/// Name lookup tables for a program. Later duplicates are ignored here; they
/// are reported by the well-formedness scan.
#[derive(Clone, Debug, Default)]
pub struct Index {
    pub types: HashMap<Name, usize>,
    pub producers: HashMap<Name, ProducerRef>,
    pub consumers: HashMap<Name, ConsumerRef>,
}

impl Index {
    pub fn new(program: &Program) -> Index {
        let mut ix = Index::default();
        for (i, decl) in program.decls.iter().enumerate() {
            match decl {
                Decl::Data(d) => {
                    ix.types.entry(d.name.clone()).or_insert(i);
                    for (j, c) in d.ctors.iter().enumerate() {
                        ix.producers.entry(c.name.clone()).or_insert(ProducerRef::Ctor { decl: i, index: j });
                    }
                }
                Decl::Codata(d) => {
                    ix.types.entry(d.name.clone()).or_insert(i);
                    for (j, c) in d.dtors.iter().enumerate() {
                        ix.consumers.entry(c.name.clone()).or_insert(ConsumerRef::Dtor { decl: i, index: j });
                    }
                }
                Decl::Def(d) => {
                    ix.consumers.entry(d.name.clone()).or_insert(ConsumerRef::Def(i));
                }
                Decl::Codef(d) => {
                    ix.producers.entry(d.name.clone()).or_insert(ProducerRef::Codef(i));
                }
                Decl::Let(d) => {
                    ix.producers.entry(d.name.clone()).or_insert(ProducerRef::Let(i));
                }
            }
        }
        ix
    }
}

/// A program together with its lookup tables.
#[derive(Clone, Copy)]
pub struct Globals<'p> {
    pub program: &'p Program,
    pub index: &'p Index,
}

impl<'p> Globals<'p> {
    pub fn new(program: &'p Program, index: &'p Index) -> Globals<'p> {
        Globals { program, index }
    }

    pub fn data(&self, name: &str) -> Option<&'p DataDecl> {
        match self.index.types.get(name).map(|&i| &self.program.decls[i]) {
            Some(Decl::Data(d)) => Some(d),
            _ => None,
        }
    }

    pub fn codata(&self, name: &str) -> Option<&'p CodataDecl> {
        match self.index.types.get(name).map(|&i| &self.program.decls[i]) {
            Some(Decl::Codata(d)) => Some(d),
            _ => None,
        }
    }

    /// Parameters of a data or codata type.
    pub fn type_params(&self, name: &str) -> Option<&'p Telescope> {
        match self.index.types.get(name).map(|&i| &self.program.decls[i]) {
            Some(Decl::Data(d)) => Some(&d.params),
            Some(Decl::Codata(d)) => Some(&d.params),
            _ => None,
        }
    }

    pub fn ctor(&self, name: &str) -> Option<(&'p DataDecl, &'p CtorSig)> {
        match self.index.producers.get(name) {
            Some(&ProducerRef::Ctor { decl, index }) => match &self.program.decls[decl] {
                Decl::Data(d) => Some((d, &d.ctors[index])),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn codef(&self, name: &str) -> Option<&'p CodefDecl> {
        match self.index.producers.get(name) {
            Some(&ProducerRef::Codef(i)) => match &self.program.decls[i] {
                Decl::Codef(d) => Some(d),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn let_decl(&self, name: &str) -> Option<&'p LetDecl> {
        match self.index.producers.get(name) {
            Some(&ProducerRef::Let(i)) => match &self.program.decls[i] {
                Decl::Let(d) => Some(d),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn dtor(&self, name: &str) -> Option<(&'p CodataDecl, &'p DtorSig)> {
        match self.index.consumers.get(name) {
            Some(&ConsumerRef::Dtor { decl, index }) => match &self.program.decls[decl] {
                Decl::Codata(d) => Some((d, &d.dtors[index])),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn def(&self, name: &str) -> Option<&'p DefDecl> {
        match self.index.consumers.get(name) {
            Some(&ConsumerRef::Def(i)) => match &self.program.decls[i] {
                Decl::Def(d) => Some(d),
                _ => None,
            },
            _ => None,
        }
    }
}

impl Expr {
    pub fn var(v: &Var) -> Expr {
        Expr::Var(v.clone())
    }

    pub fn typ(name: &str, args: Vec<Expr>) -> Expr {
        Expr::TypCtor { name: name.into(), args }
    }

    pub fn prod(name: &str, args: Vec<Expr>) -> Expr {
        Expr::Producer { name: name.into(), args }
    }

    pub fn cons(scrutinee: Expr, name: &str, args: Vec<Expr>) -> Expr {
        Expr::Consumer { scrutinee: Box::new(scrutinee), name: name.into(), args }
    }

    pub fn is_local(&self) -> bool {
        matches!(self, Expr::LocalComatch { .. } | Expr::LocalMatch { .. })
    }

    /// True if the expression contains no local match or comatch.
    pub fn is_core(&self) -> bool {
        let mut core = true;
        self.visit(&mut |e| {
            if e.is_local() {
                core = false;
            }
        });
        core
    }

    /// Pre-order traversal of every subexpression, including clause bodies
    /// and motives but not closure environments.
    pub fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Var(_) | Expr::Type => {}
            Expr::TypCtor { args, .. } | Expr::Producer { args, .. } => {
                args.iter().for_each(|a| a.visit(f));
            }
            Expr::Consumer { scrutinee, args, .. } => {
                scrutinee.visit(f);
                args.iter().for_each(|a| a.visit(f));
            }
            Expr::LocalComatch { cocases, .. } => {
                for c in cocases {
                    if let Body::Term(b) = &c.body {
                        b.visit(f);
                    }
                }
            }
            Expr::LocalMatch { scrutinee, motive, cases, .. } => {
                scrutinee.visit(f);
                if let Some(m) = motive {
                    m.ty.visit(f);
                }
                for c in cases {
                    if let Body::Term(b) = &c.body {
                        b.visit(f);
                    }
                }
            }
        }
    }
}

impl Decl {
    /// Every top-level expression of the declaration: telescope types,
    /// indices, return types and clause bodies.
    pub fn exprs(&self) -> Vec<&Expr> {
        fn tel<'a>(t: &'a Telescope, out: &mut Vec<&'a Expr>) {
            out.extend(t.iter().map(|p| &p.ty));
        }
        fn clauses<'a>(cs: &'a [Clause], out: &mut Vec<&'a Expr>) {
            out.extend(cs.iter().filter_map(|c| c.body.term()));
        }
        let mut out = Vec::new();
        match self {
            Decl::Data(d) => {
                tel(&d.params, &mut out);
                for c in &d.ctors {
                    tel(&c.params, &mut out);
                    out.extend(c.result_args.iter());
                }
            }
            Decl::Codata(d) => {
                tel(&d.params, &mut out);
                for c in &d.dtors {
                    tel(&c.params, &mut out);
                    out.extend(c.self_args.iter());
                    out.push(&c.ret);
                }
            }
            Decl::Def(d) => {
                tel(&d.params, &mut out);
                out.extend(d.self_args.iter());
                out.push(&d.ret);
                clauses(&d.cases, &mut out);
            }
            Decl::Codef(d) => {
                tel(&d.params, &mut out);
                out.extend(d.result_args.iter());
                clauses(&d.cocases, &mut out);
            }
            Decl::Let(d) => {
                tel(&d.params, &mut out);
                out.push(&d.ty);
                out.push(&d.body);
            }
        }
        out
    }

    pub fn is_core(&self) -> bool {
        self.exprs().iter().all(|e| e.is_core())
    }
}

impl Program {
    pub fn is_core(&self) -> bool {
        self.decls.iter().all(|d| d.is_core())
    }

    /// Labels of all local forms, in traversal order.
    pub fn labels(&self) -> Vec<Label> {
        let mut out = Vec::new();
        for d in &self.decls {
            for e in d.exprs() {
                e.visit(&mut |e| match e {
                    Expr::LocalComatch { label, .. } | Expr::LocalMatch { label, .. } => {
                        out.push(label.clone())
                    }
                    _ => {}
                });
            }
        }
        out
    }
}
