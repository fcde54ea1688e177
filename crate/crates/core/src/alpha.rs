//! Alpha-equivalence of expressions, declarations and programs.
//!
//! Bound variables are compared up to renaming; type, constructor,
//! destructor and label names literally. Documentation, spans and closure
//! environments are ignored.

use std::collections::HashMap;

use crate::ast::*;
use crate::subst::grow;

#[derive(Default)]
struct Alpha {
    left: HashMap<u64, u64>,
    right: HashMap<u64, u64>,
    unordered: bool,
}

/// Pairs up the items of two lists, by position or, if `unordered`, by name.
fn paired<'a, T>(a: &'a [T], b: &'a [T], name: fn(&T) -> &Name, unordered: bool) -> Option<Vec<(&'a T, &'a T)>> {
    if a.len() != b.len() {
        return None;
    }
    if !unordered {
        return Some(a.iter().zip(b).collect());
    }
    a.iter().map(|x| b.iter().find(|y| name(y) == name(x)).map(|y| (x, y))).collect()
}

type Saved = Vec<(u64, Option<u64>, u64, Option<u64>)>;

impl Alpha {
    fn bind(&mut self, a: &[Var], b: &[Var]) -> Saved {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let l = self.left.insert(x.id, y.id);
                let r = self.right.insert(y.id, x.id);
                (x.id, l, y.id, r)
            })
            .collect()
    }

    fn restore(&mut self, saved: Saved) {
        for (x, l, y, r) in saved.into_iter().rev() {
            match l {
                Some(v) => self.left.insert(x, v),
                None => self.left.remove(&x),
            };
            match r {
                Some(v) => self.right.insert(y, v),
                None => self.right.remove(&y),
            };
        }
    }

    fn var(&self, a: &Var, b: &Var) -> bool {
        match (self.left.get(&a.id), self.right.get(&b.id)) {
            (Some(&x), Some(&y)) => x == b.id && y == a.id,
            (None, None) => a.id == b.id,
            _ => false,
        }
    }

    fn exprs(&mut self, a: &[Expr], b: &[Expr]) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| self.expr(x, y))
    }

    fn expr(&mut self, a: &Expr, b: &Expr) -> bool {
        grow(|| self.expr_inner(a, b))
    }

    fn expr_inner(&mut self, a: &Expr, b: &Expr) -> bool {
        match (a, b) {
            (Expr::Var(x), Expr::Var(y)) => self.var(x, y),
            (Expr::Type, Expr::Type) => true,
            (Expr::TypCtor { name: n1, args: a1 }, Expr::TypCtor { name: n2, args: a2 })
            | (Expr::Producer { name: n1, args: a1 }, Expr::Producer { name: n2, args: a2 }) => {
                n1 == n2 && self.exprs(a1, a2)
            }
            (
                Expr::Consumer { scrutinee: s1, name: n1, args: a1 },
                Expr::Consumer { scrutinee: s2, name: n2, args: a2 },
            ) => n1 == n2 && self.expr(s1, s2) && self.exprs(a1, a2),
            (
                Expr::LocalComatch { label: l1, cocases: c1, .. },
                Expr::LocalComatch { label: l2, cocases: c2, .. },
            ) => l1.name == l2.name && self.clauses(c1, c2),
            (
                Expr::LocalMatch { label: l1, scrutinee: s1, motive: m1, cases: c1, .. },
                Expr::LocalMatch { label: l2, scrutinee: s2, motive: m2, cases: c2, .. },
            ) => {
                l1.name == l2.name
                    && self.expr(s1, s2)
                    && match (m1, m2) {
                        (None, None) => true,
                        (Some(m1), Some(m2)) => {
                            let saved = self.bind(
                                std::slice::from_ref(&m1.binder),
                                std::slice::from_ref(&m2.binder),
                            );
                            let ok = self.expr(&m1.ty, &m2.ty);
                            self.restore(saved);
                            ok
                        }
                        _ => false,
                    }
                    && self.clauses(c1, c2)
            }
            _ => false,
        }
    }

    fn clause(&mut self, a: &Clause, b: &Clause) -> bool {
        if a.name != b.name || a.params.len() != b.params.len() {
            return false;
        }
        let saved = self.bind(&a.params, &b.params);
        let ok = match (&a.body, &b.body) {
            (Body::Absurd, Body::Absurd) => true,
            (Body::Term(x), Body::Term(y)) => self.expr(x, y),
            _ => false,
        };
        self.restore(saved);
        ok
    }

    fn clauses(&mut self, a: &[Clause], b: &[Clause]) -> bool {
        match paired(a, b, |c| &c.name, self.unordered) {
            Some(ps) => ps.into_iter().all(|(x, y)| self.clause(x, y)),
            None => false,
        }
    }

    /// Compares two telescopes and leaves their variables bound.
    fn telescope(&mut self, a: &Telescope, b: &Telescope, saved: &mut Saved) -> bool {
        if a.len() != b.len() {
            return false;
        }
        for (p, q) in a.iter().zip(b.iter()) {
            if !self.expr(&p.ty, &q.ty) {
                return false;
            }
            saved.extend(self.bind(std::slice::from_ref(&p.var), std::slice::from_ref(&q.var)));
        }
        true
    }

    fn scoped(&mut self, f: impl FnOnce(&mut Alpha, &mut Saved) -> bool) -> bool {
        let mut saved = Vec::new();
        let ok = f(self, &mut saved);
        self.restore(saved);
        ok
    }

    fn decl(&mut self, a: &Decl, b: &Decl) -> bool {
        match (a, b) {
            (Decl::Data(x), Decl::Data(y)) => {
                x.name == y.name
                    && self.scoped(|s, sv| s.telescope(&x.params, &y.params, sv))
                    && paired(&x.ctors, &y.ctors, |c| &c.name, self.unordered).is_some_and(|ps| ps.into_iter().all(|(c, d)| {
                        c.name == d.name
                            && self.scoped(|s, sv| {
                                s.telescope(&c.params, &d.params, sv)
                                    && s.exprs(&c.result_args, &d.result_args)
                            })
                    }))
            }
            (Decl::Codata(x), Decl::Codata(y)) => {
                x.name == y.name
                    && self.scoped(|s, sv| s.telescope(&x.params, &y.params, sv))
                    && paired(&x.dtors, &y.dtors, |c| &c.name, self.unordered).is_some_and(|ps| ps.into_iter().all(|(c, d)| {
                        c.name == d.name
                            && self.scoped(|s, sv| {
                                s.telescope(&c.params, &d.params, sv)
                                    && s.exprs(&c.self_args, &d.self_args)
                                    && {
                                        sv.extend(s.bind(
                                            std::slice::from_ref(&c.self_var),
                                            std::slice::from_ref(&d.self_var),
                                        ));
                                        s.expr(&c.ret, &d.ret)
                                    }
                            })
                    }))
            }
            (Decl::Def(x), Decl::Def(y)) => {
                x.name == y.name
                    && x.self_type == y.self_type
                    && self.scoped(|s, sv| {
                        s.telescope(&x.params, &y.params, sv)
                            && s.exprs(&x.self_args, &y.self_args)
                            && s.scoped(|s, sv2| {
                                sv2.extend(s.bind(
                                    std::slice::from_ref(&x.self_var),
                                    std::slice::from_ref(&y.self_var),
                                ));
                                s.expr(&x.ret, &y.ret)
                            })
                            && s.clauses(&x.cases, &y.cases)
                    })
            }
            (Decl::Codef(x), Decl::Codef(y)) => {
                x.name == y.name
                    && x.result_type == y.result_type
                    && self.scoped(|s, sv| {
                        s.telescope(&x.params, &y.params, sv)
                            && s.exprs(&x.result_args, &y.result_args)
                            && s.clauses(&x.cocases, &y.cocases)
                    })
            }
            (Decl::Let(x), Decl::Let(y)) => {
                x.name == y.name
                    && self.scoped(|s, sv| {
                        s.telescope(&x.params, &y.params, sv)
                            && s.expr(&x.ty, &y.ty)
                            && s.expr(&x.body, &y.body)
                    })
            }
            _ => false,
        }
    }
}

/// Syntactic identity up to renaming of bound variables.
pub fn alpha_equal(a: &Expr, b: &Expr) -> bool {
    Alpha::default().expr(a, b)
}

pub fn alpha_equal_clause(a: &Clause, b: &Clause) -> bool {
    Alpha::default().clause(a, b)
}

/// Declaration equality up to renaming; clause order matters.
pub fn alpha_equal_decl(a: &Decl, b: &Decl) -> bool {
    Alpha::default().decl(a, b)
}

/// Declaration equality up to renaming and the order of clauses,
/// constructors and destructors.
pub fn equivalent_decl(a: &Decl, b: &Decl) -> bool {
    Alpha { unordered: true, ..Alpha::default() }.decl(a, b)
}

/// Compares two programs up to renaming, declaration order and clause order.
/// On mismatch returns a short description of the first difference.
pub fn equivalent_programs(a: &Program, b: &Program) -> Result<(), String> {
    if a.decls.len() != b.decls.len() {
        let names = |p: &Program| p.decls.iter().map(|d| d.name().to_string()).collect::<Vec<_>>();
        return Err(format!(
            "declaration counts differ: {} vs {} ({:?} vs {:?})",
            a.decls.len(),
            b.decls.len(),
            names(a),
            names(b)
        ));
    }
    for d in &a.decls {
        match b.decls.iter().find(|e| e.name() == d.name() && e.kind() == d.kind()) {
            None => return Err(format!("{} {} has no counterpart", d.kind(), d.name())),
            Some(e) => {
                if !equivalent_decl(d, e) {
                    return Err(format!("{} {} differs", d.kind(), d.name()));
                }
            }
        }
    }
    Ok(())
}
