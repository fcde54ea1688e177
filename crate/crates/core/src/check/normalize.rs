//! β-normalization and conversion.
//!
//! Redexes are a consumer applied to a producer (definition on constructor,
//! destructor on codefinition or local comatch), a local match on a
//! constructor, and a `let` call. Normalization goes under binders and
//! leaves variable-headed consumers neutral. There is no η rule.

use crate::alpha::alpha_equal;
use crate::ast::{Body, Clause, Expr, Globals, Motive};
use crate::subst::{grow, Subst};

/// Default number of β-steps one conversion query may take.
pub const DEFAULT_FUEL: u64 = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OutOfFuel;

pub struct Normalizer<'p> {
    g: Globals<'p>,
    fuel: u64,
}

impl<'p> Normalizer<'p> {
    pub fn new(g: Globals<'p>, fuel: u64) -> Normalizer<'p> {
        Normalizer { g, fuel }
    }

    pub fn remaining(&self) -> u64 {
        self.fuel
    }

    fn tick(&mut self) -> Result<(), OutOfFuel> {
        if self.fuel == 0 {
            return Err(OutOfFuel);
        }
        self.fuel -= 1;
        Ok(())
    }

    pub fn normalize(&mut self, e: &Expr) -> Result<Expr, OutOfFuel> {
        grow(|| self.norm(e))
    }

    fn norm_all(&mut self, es: &[Expr]) -> Result<Vec<Expr>, OutOfFuel> {
        es.iter().map(|e| self.normalize(e)).collect()
    }

    fn norm_clause(&mut self, c: &Clause) -> Result<Clause, OutOfFuel> {
        let body = match &c.body {
            Body::Term(b) => Body::Term(self.normalize(b)?),
            Body::Absurd => Body::Absurd,
        };
        Ok(Clause { name: c.name.clone(), params: c.params.clone(), body, span: c.span })
    }

    fn norm(&mut self, e: &Expr) -> Result<Expr, OutOfFuel> {
        match e {
            Expr::Var(_) | Expr::Type => Ok(e.clone()),
            Expr::TypCtor { name, args } => {
                Ok(Expr::TypCtor { name: name.clone(), args: self.norm_all(args)? })
            }
            Expr::Producer { name, args } => {
                let args = self.norm_all(args)?;
                if let Some(l) = self.g.let_decl(name) {
                    if let Ok(s) = Subst::from_telescope(&l.params, &args) {
                        self.tick()?;
                        return self.normalize(&s.apply(&l.body));
                    }
                }
                Ok(Expr::Producer { name: name.clone(), args })
            }
            Expr::Consumer { scrutinee, name, args } => {
                let s = self.normalize(scrutinee)?;
                let args = self.norm_all(args)?;
                if let Some(body) = self.redex(&s, name, &args) {
                    self.tick()?;
                    return self.normalize(&body);
                }
                Ok(Expr::Consumer { scrutinee: Box::new(s), name: name.clone(), args })
            }
            Expr::LocalComatch { label, cocases, env } => Ok(Expr::LocalComatch {
                label: label.clone(),
                cocases: cocases.iter().map(|c| self.norm_clause(c)).collect::<Result<_, _>>()?,
                env: env.clone(),
            }),
            Expr::LocalMatch { label, scrutinee, motive, cases, env } => {
                let s = self.normalize(scrutinee)?;
                if let Some(body) = match_redex(&s, cases) {
                    self.tick()?;
                    return self.normalize(&body);
                }
                let motive = match motive {
                    Some(m) => Some(Motive { binder: m.binder.clone(), ty: Box::new(self.normalize(&m.ty)?) }),
                    None => None,
                };
                Ok(Expr::LocalMatch {
                    label: label.clone(),
                    scrutinee: Box::new(s),
                    motive,
                    cases: cases.iter().map(|c| self.norm_clause(c)).collect::<Result<_, _>>()?,
                    env: env.clone(),
                })
            }
        }
    }

    /// The contractum of `s.name(args)` if it is a redex.
    fn redex(&self, s: &Expr, name: &str, args: &[Expr]) -> Option<Expr> {
        redex(self.g, s, name, args)
    }
}

/// The contractum of `s.name(args)`, if `s` is a producer or comatch with a
/// possible clause for `name`.
pub fn redex(g: Globals<'_>, s: &Expr, name: &str, args: &[Expr]) -> Option<Expr> {
    match s {
        Expr::Producer { name: c, args: cargs } => {
            if let Some(def) = g.def(name) {
                if g.ctor(c).is_none() {
                    return None;
                }
                let case = def.cases.iter().find(|k| &k.name == c)?;
                let body = case.body.term()?;
                let mut sub = Subst::from_telescope(&def.params, args).ok()?;
                sub.extend(&Subst::from_vars(&case.params, cargs).ok()?);
                Some(sub.apply(body))
            } else if g.dtor(name).is_some() {
                let codef = g.codef(c)?;
                let cocase = codef.cocases.iter().find(|k| &*k.name == name)?;
                let body = cocase.body.term()?;
                let mut sub = Subst::from_telescope(&codef.params, cargs).ok()?;
                sub.extend(&Subst::from_vars(&cocase.params, args).ok()?);
                Some(sub.apply(body))
            } else {
                None
            }
        }
        Expr::LocalComatch { cocases, .. } => {
            let cocase = cocases.iter().find(|k| &*k.name == name)?;
            let body = cocase.body.term()?;
            Some(Subst::from_vars(&cocase.params, args).ok()?.apply(body))
        }
        _ => None,
    }
}

/// The contractum of a local match whose scrutinee is `s`, if `s` is a
/// constructor call with a possible case.
pub fn match_redex(s: &Expr, cases: &[Clause]) -> Option<Expr> {
    let Expr::Producer { name, args } = s else { return None };
    let case = cases.iter().find(|k| &k.name == name)?;
    let body = case.body.term()?;
    Some(Subst::from_vars(&case.params, args).ok()?.apply(body))
}

pub fn normalize(g: Globals<'_>, e: &Expr, fuel: u64) -> Result<Expr, OutOfFuel> {
    Normalizer::new(g, fuel).normalize(e)
}

/// β-conversion: alpha-equality of normal forms.
pub fn convertible(g: Globals<'_>, a: &Expr, b: &Expr, fuel: u64) -> Result<bool, OutOfFuel> {
    if alpha_equal(a, b) {
        return Ok(true);
    }
    let mut n = Normalizer::new(g, fuel);
    let na = n.normalize(a)?;
    let nb = n.normalize(b)?;
    Ok(alpha_equal(&na, &nb))
}
