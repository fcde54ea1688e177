//! Capture-avoiding simultaneous substitution and free variables.

use std::cell::OnceCell;
use std::collections::{HashMap, HashSet};

use thiserror::Error;

use crate::ast::{Body, Clause, Expr, Motive, Param, Telescope, Var};

const RED_ZONE: usize = 256 * 1024;
const STACK_SEGMENT: usize = 8 * 1024 * 1024;

/// Runs `f` on a stack segment large enough for deep recursion.
pub fn grow<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(RED_ZONE, STACK_SEGMENT, f)
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("substitution has {found} terms but the telescope has {expected} parameters")]
pub struct ArityError {
    pub expected: usize,
    pub found: usize,
}

/// A finite map from variables to expressions, applied simultaneously.
#[derive(Debug, Default)]
pub struct Subst {
    map: HashMap<u64, Expr>,
    range_fv: OnceCell<HashSet<u64>>,
}

impl Clone for Subst {
    fn clone(&self) -> Subst {
        Subst { map: self.map.clone(), range_fv: OnceCell::new() }
    }
}

impl Subst {
    pub fn new() -> Subst {
        Subst::default()
    }

    /// Binds the telescope's variables to `args`, position by position.
    pub fn from_telescope(tel: &Telescope, args: &[Expr]) -> Result<Subst, ArityError> {
        Subst::from_vars(&tel.vars(), args)
    }

    pub fn from_vars(vars: &[Var], args: &[Expr]) -> Result<Subst, ArityError> {
        if vars.len() != args.len() {
            return Err(ArityError { expected: vars.len(), found: args.len() });
        }
        let mut s = Subst::new();
        for (v, a) in vars.iter().zip(args) {
            s.insert(v, a.clone());
        }
        Ok(s)
    }

    /// Renames `from[i]` to `to[i]`.
    pub fn renaming(from: &[Var], to: &[Var]) -> Subst {
        let mut s = Subst::new();
        for (a, b) in from.iter().zip(to) {
            if a.id != b.id {
                s.insert(a, Expr::Var(b.clone()));
            }
        }
        s
    }

    pub fn insert(&mut self, v: &Var, e: Expr) {
        self.map.insert(v.id, e);
        self.range_fv = OnceCell::new();
    }

    pub fn extend(&mut self, other: &Subst) {
        for (k, v) in &other.map {
            self.map.insert(*k, v.clone());
        }
        self.range_fv = OnceCell::new();
    }

    pub fn get(&self, v: &Var) -> Option<&Expr> {
        self.map.get(&v.id)
    }

    pub fn contains(&self, v: &Var) -> bool {
        self.map.contains_key(&v.id)
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&u64, &Expr)> {
        self.map.iter()
    }

    /// Applies `other` to every value of this substitution.
    pub fn map_values(&mut self, other: &Subst) {
        for v in self.map.values_mut() {
            *v = other.apply(v);
        }
        self.range_fv = OnceCell::new();
    }

    /// Replaces every value by `f` of it.
    pub fn try_map_values<E>(&mut self, mut f: impl FnMut(&Expr) -> Result<Expr, E>) -> Result<(), E> {
        for v in self.map.values_mut() {
            *v = f(v)?;
        }
        self.range_fv = OnceCell::new();
        Ok(())
    }

    fn range_fv(&self) -> &HashSet<u64> {
        self.range_fv.get_or_init(|| {
            let mut out = HashSet::new();
            for e in self.map.values() {
                collect_free(e, &mut out);
            }
            out
        })
    }

    pub fn apply(&self, e: &Expr) -> Expr {
        if self.map.is_empty() {
            return e.clone();
        }
        grow(|| self.go(e))
    }

    fn go(&self, e: &Expr) -> Expr {
        match e {
            Expr::Var(v) => self.map.get(&v.id).cloned().unwrap_or_else(|| e.clone()),
            Expr::Type => Expr::Type,
            Expr::TypCtor { name, args } => {
                Expr::TypCtor { name: name.clone(), args: self.apply_all(args) }
            }
            Expr::Producer { name, args } => {
                Expr::Producer { name: name.clone(), args: self.apply_all(args) }
            }
            Expr::Consumer { scrutinee, name, args } => Expr::Consumer {
                scrutinee: Box::new(self.apply(scrutinee)),
                name: name.clone(),
                args: self.apply_all(args),
            },
            Expr::LocalComatch { label, cocases, env } => Expr::LocalComatch {
                label: label.clone(),
                cocases: cocases.iter().map(|c| self.apply_clause(c)).collect(),
                env: env.iter().map(|(k, v)| (k.clone(), self.apply(v))).collect(),
            },
            Expr::LocalMatch { label, scrutinee, motive, cases, env } => Expr::LocalMatch {
                label: label.clone(),
                scrutinee: Box::new(self.apply(scrutinee)),
                motive: motive.as_ref().map(|m| {
                    let (bs, inner) = self.under(std::slice::from_ref(&m.binder));
                    Motive { binder: bs[0].clone(), ty: Box::new(inner.apply(&m.ty)) }
                }),
                cases: cases.iter().map(|c| self.apply_clause(c)).collect(),
                env: env.iter().map(|(k, v)| (k.clone(), self.apply(v))).collect(),
            },
        }
    }

    pub fn apply_all(&self, es: &[Expr]) -> Vec<Expr> {
        es.iter().map(|e| self.apply(e)).collect()
    }

    pub fn apply_clause(&self, c: &Clause) -> Clause {
        if self.map.is_empty() {
            return c.clone();
        }
        let (params, inner) = self.under(&c.params);
        let body = match &c.body {
            Body::Term(e) => Body::Term(inner.apply(e)),
            Body::Absurd => Body::Absurd,
        };
        Clause { name: c.name.clone(), params, body, span: c.span }
    }

    /// Applies the substitution to a telescope's types, treating its
    /// variables as binders. Returns the (possibly renamed) telescope and the
    /// substitution to use in the telescope's scope.
    pub fn apply_telescope(&self, tel: &Telescope) -> (Telescope, Subst) {
        let mut cur = self.clone();
        let mut out = Vec::new();
        for p in tel.iter() {
            let ty = cur.apply(&p.ty);
            let (bs, next) = cur.under(std::slice::from_ref(&p.var));
            let next = next.into_owned();
            out.push(Param { var: bs[0].clone(), ty });
            cur = next;
        }
        (Telescope(out), cur)
    }

    /// The substitution to use below `binders`, renaming any binder that
    /// would capture a variable of the range.
    pub fn under(&self, binders: &[Var]) -> (Vec<Var>, std::borrow::Cow<'_, Subst>) {
        let clash = binders
            .iter()
            .any(|b| self.map.contains_key(&b.id) || self.range_fv().contains(&b.id));
        if !clash {
            return (binders.to_vec(), std::borrow::Cow::Borrowed(self));
        }
        let mut s = Subst { map: self.map.clone(), range_fv: OnceCell::new() };
        let mut out = Vec::with_capacity(binders.len());
        for b in binders {
            s.map.remove(&b.id);
            if self.range_fv().contains(&b.id) {
                let nb = b.refresh();
                s.map.insert(b.id, Expr::Var(nb.clone()));
                out.push(nb);
            } else {
                out.push(b.clone());
            }
        }
        (out, std::borrow::Cow::Owned(s))
    }
}

/// e[σ/Ξ]: replaces the telescope's variables by `args`.
pub fn substitute(e: &Expr, args: &[Expr], tel: &Telescope) -> Result<Expr, ArityError> {
    Ok(Subst::from_telescope(tel, args)?.apply(e))
}

/// id_Ξ: the telescope's variables as expressions.
pub fn identity_substitution(tel: &Telescope) -> Vec<Expr> {
    tel.iter().map(|p| Expr::Var(p.var.clone())).collect()
}

/// Instantiates each parameter type with the arguments before it; returns
/// the types of the arguments `args` are checked against, one at a time.
pub fn instantiate_telescope(tel: &Telescope, args: &[Expr]) -> Vec<Expr> {
    let mut s = Subst::new();
    let mut out = Vec::with_capacity(tel.len());
    for (p, a) in tel.iter().zip(args) {
        out.push(s.apply(&p.ty));
        s.insert(&p.var, a.clone());
    }
    out
}

/// Free variable ids of `e`.
pub fn free_var_ids(e: &Expr) -> HashSet<u64> {
    let mut out = HashSet::new();
    collect_free(e, &mut out);
    out
}

/// Free variables of `e`, in order of first occurrence.
pub fn free_vars(e: &Expr) -> Vec<Var> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    grow(|| fv_ordered(e, &mut Vec::new(), &mut seen, &mut out));
    out
}

fn fv_ordered(e: &Expr, bound: &mut Vec<u64>, seen: &mut HashSet<u64>, out: &mut Vec<Var>) {
    match e {
        Expr::Var(v) => {
            if !bound.contains(&v.id) && seen.insert(v.id) {
                out.push(v.clone());
            }
        }
        Expr::Type => {}
        Expr::TypCtor { args, .. } | Expr::Producer { args, .. } => {
            args.iter().for_each(|a| fv_ordered(a, bound, seen, out));
        }
        Expr::Consumer { scrutinee, args, .. } => {
            fv_ordered(scrutinee, bound, seen, out);
            args.iter().for_each(|a| grow(|| fv_ordered(a, bound, seen, out)));
        }
        Expr::LocalComatch { cocases, .. } => {
            for c in cocases {
                fv_clause(c, bound, seen, out);
            }
        }
        Expr::LocalMatch { scrutinee, motive, cases, .. } => {
            fv_ordered(scrutinee, bound, seen, out);
            if let Some(m) = motive {
                bound.push(m.binder.id);
                grow(|| fv_ordered(&m.ty, bound, seen, out));
                bound.pop();
            }
            for c in cases {
                fv_clause(c, bound, seen, out);
            }
        }
    }
}

fn fv_clause(c: &Clause, bound: &mut Vec<u64>, seen: &mut HashSet<u64>, out: &mut Vec<Var>) {
    if let Body::Term(b) = &c.body {
        let n = bound.len();
        bound.extend(c.params.iter().map(|p| p.id));
        grow(|| fv_ordered(b, bound, seen, out));
        bound.truncate(n);
    }
}

fn collect_free(e: &Expr, out: &mut HashSet<u64>) {
    for v in free_vars(e) {
        out.insert(v.id);
    }
}

/// True if `v` occurs free in `e`.
pub fn occurs(v: &Var, e: &Expr) -> bool {
    free_vars(e).iter().any(|x| x.id == v.id)
}
