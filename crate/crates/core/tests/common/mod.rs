//! Helpers shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use dcalc::ast::{Decl, Expr, Name, Program, Telescope, Var};
use dcalc::check::check_program;
use dcalc::parser::parse;
use rand::seq::SliceRandom;
use rand::Rng;

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("corpus")
}

pub fn read_corpus(file: &str) -> String {
    std::fs::read_to_string(corpus_dir().join(file)).unwrap_or_else(|e| panic!("{file}: {e}"))
}

/// Every corpus file that is expected to typecheck, sorted by name.
pub fn positive_files() -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|f| f.ends_with(".dd") && !f.starts_with("neg_"))
        .collect();
    v.sort();
    v
}

pub fn all_files() -> Vec<String> {
    let mut v: Vec<String> = std::fs::read_dir(corpus_dir())
        .unwrap()
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|f| f.ends_with(".dd"))
        .collect();
    v.sort();
    v
}

pub fn lifted(src: &str) -> Program {
    let p = parse(src).unwrap_or_else(|d| panic!("{:?}", d));
    check_program(&p).unwrap_or_else(|d| panic!("{:?}", d)).program
}

/// A call whose every argument and result is a parameterless type.
#[derive(Clone, Debug)]
pub struct Sig {
    pub name: Name,
    /// `Some(ty)` for consumers: the type of the scrutinee.
    pub on: Option<Name>,
    pub params: Vec<Name>,
    pub ret: Name,
}

/// Random generator of closed terms over the simply typed fragment of a
/// program: calls whose argument, scrutinee and result types are all
/// parameterless types.
#[derive(Clone, Debug)]
pub struct TermGen {
    pub sigs: Vec<Sig>,
    /// Free variables that may appear as leaves.
    pub vars: Vec<(Var, Name)>,
}

fn simple(e: &Expr) -> Option<Name> {
    match e {
        Expr::TypCtor { name, args } if args.is_empty() => Some(name.clone()),
        _ => None,
    }
}

fn simple_tel(p: &Program, t: &Telescope) -> Option<Vec<Name>> {
    t.iter().map(|q| simple(&q.ty).filter(|n| params_empty(p, n))).collect()
}

fn params_empty(p: &Program, name: &str) -> bool {
    p.decls.iter().any(|d| match d {
        Decl::Data(d) => &*d.name == name && d.params.is_empty(),
        Decl::Codata(d) => &*d.name == name && d.params.is_empty(),
        _ => false,
    })
}

impl TermGen {
    pub fn new(p: &Program) -> TermGen {
        let mut sigs = Vec::new();
        let mut push = |name: &Name, on: Option<Name>, params: Option<Vec<Name>>, ret: Option<Name>| {
            if let (Some(params), Some(ret)) = (params, ret) {
                if params_empty(p, &ret) && on.as_deref().map_or(true, |o| params_empty(p, o)) {
                    sigs.push(Sig { name: name.clone(), on, params, ret });
                }
            }
        };
        for d in &p.decls {
            match d {
                Decl::Data(d) if d.params.is_empty() => {
                    for c in &d.ctors {
                        push(&c.name, None, simple_tel(p, &c.params), Some(d.name.clone()));
                    }
                }
                Decl::Codata(d) if d.params.is_empty() => {
                    for s in &d.dtors {
                        push(&s.name, Some(d.name.clone()), simple_tel(p, &s.params), simple(&s.ret));
                    }
                }
                Decl::Def(d) if d.self_args.is_empty() => {
                    push(&d.name, Some(d.self_type.clone()), simple_tel(p, &d.params), simple(&d.ret));
                }
                Decl::Codef(d) if d.result_args.is_empty() => {
                    push(&d.name, None, simple_tel(p, &d.params), Some(d.result_type.clone()));
                }
                Decl::Let(d) => push(&d.name, None, simple_tel(p, &d.params), simple(&d.ty)),
                _ => {}
            }
        }
        TermGen { sigs, vars: Vec::new() }
    }

    /// Types that have a nullary producer, so that terms of them can be
    /// generated at every depth.
    pub fn inhabited(&self) -> Vec<Name> {
        let mut v: Vec<Name> = self.base().map(|s| s.ret.clone()).collect();
        v.sort();
        v.dedup();
        v
    }

    fn base(&self) -> impl Iterator<Item = &Sig> {
        self.sigs.iter().filter(|s| s.on.is_none() && s.params.is_empty())
    }

    fn usable(&self, s: &Sig) -> bool {
        let inh = self.inhabited();
        s.params.iter().chain(s.on.iter()).all(|t| inh.contains(t))
    }

    pub fn with_vars(mut self, vars: &[(Var, &str)]) -> TermGen {
        self.vars = vars.iter().map(|(v, t)| (v.clone(), (*t).into())).collect();
        self
    }

    pub fn gen(&self, ty: &str, depth: u32, rng: &mut impl Rng) -> Option<Expr> {
        if depth == 0 || rng.gen_bool(0.15) {
            let mut leaves: Vec<Expr> =
                self.base().filter(|s| &*s.ret == ty).map(|s| Expr::prod(&s.name, vec![])).collect();
            leaves.extend(self.vars.iter().filter(|(_, t)| &**t == ty).map(|(v, _)| Expr::var(v)));
            return leaves.choose(rng).cloned();
        }
        let calls: Vec<&Sig> = self.sigs.iter().filter(|s| &*s.ret == ty && self.usable(s)).collect();
        let consumers: Vec<&Sig> = calls.iter().copied().filter(|s| s.on.is_some()).collect();
        let s = if !consumers.is_empty() && rng.gen_bool(0.7) { consumers.choose(rng)? } else { calls.choose(rng)? };
        let args = s.params.iter().map(|t| self.gen(t, depth - 1, rng)).collect::<Option<Vec<_>>>()?;
        Some(match &s.on {
            None => Expr::prod(&s.name, args),
            Some(on) => Expr::cons(self.gen(on, depth - 1, rng)?, &s.name, args),
        })
    }
}
