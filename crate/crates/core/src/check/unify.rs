//! First-order unification of index expressions up to β-conversion.
//!
//! Both sides are normalized first. Type constructors, data constructors,
//! codefinition calls, `Type` and comatch labels are rigid: distinct heads
//! never unify. A flexible variable against anything binds after an occurs
//! check; two flexible variables bind the later one to the earlier one.
//! Anything involving a neutral term that is not already alpha-equal is
//! undecided.

use std::collections::{HashMap, VecDeque};

use crate::alpha::alpha_equal;
use crate::ast::{Expr, Globals, Telescope, Var};
use crate::check::normalize::Normalizer;
use crate::subst::{occurs, Subst};

#[derive(Clone, Debug)]
pub enum Unification {
    /// The most general unifier of the equations.
    Unifies(Subst),
    /// No substitution makes the two sides convertible.
    Absurd,
    /// Neither: the pair of sides that could not be decided.
    Undecided(Expr, Expr),
}

impl Unification {
    pub fn is_unifies(&self) -> bool {
        matches!(self, Unification::Unifies(_))
    }

    pub fn is_absurd(&self) -> bool {
        matches!(self, Unification::Absurd)
    }
}

/// Unifies `lhs` with `rhs` pointwise, solving for the variables of
/// `joint`. Later variables of the telescope are solved in terms of earlier
/// ones.
pub fn unify(g: Globals<'_>, joint: &Telescope, lhs: &[Expr], rhs: &[Expr], fuel: u64) -> Unification {
    let pos: HashMap<u64, usize> = joint.iter().enumerate().map(|(i, p)| (p.var.id, i)).collect();
    unify_with(g, &|v: &Var| pos.get(&v.id).copied(), lhs, rhs, fuel)
}

/// Unification where `flex` gives the position of every solvable variable.
pub fn unify_with(
    g: Globals<'_>,
    flex: &dyn Fn(&Var) -> Option<usize>,
    lhs: &[Expr],
    rhs: &[Expr],
    fuel: u64,
) -> Unification {
    if lhs.len() != rhs.len() {
        return Unification::Absurd;
    }
    let mut u = Unifier { norm: Normalizer::new(g, fuel), flex, solution: Subst::new() };
    u.run(lhs.iter().cloned().zip(rhs.iter().cloned()).collect())
}

struct Unifier<'a, 'p> {
    norm: Normalizer<'p>,
    flex: &'a dyn Fn(&Var) -> Option<usize>,
    solution: Subst,
}

enum Step {
    Split(Vec<(Expr, Expr)>),
    Absurd,
    Stuck,
}

impl Unifier<'_, '_> {
    fn run(&mut self, eqs: Vec<(Expr, Expr)>) -> Unification {
        let mut work: VecDeque<(Expr, Expr)> = eqs.into();
        let mut stuck: Vec<(Expr, Expr)> = Vec::new();
        loop {
            let mut progressed = false;
            while let Some((a, b)) = work.pop_front() {
                let (Ok(a), Ok(b)) = (self.resolve(&a), self.resolve(&b)) else {
                    return Unification::Undecided(a, b);
                };
                match self.step(&a, &b) {
                    Step::Split(eqs) => {
                        progressed = true;
                        work.extend(eqs);
                    }
                    Step::Absurd => return Unification::Absurd,
                    Step::Stuck => stuck.push((a, b)),
                }
            }
            if stuck.is_empty() {
                let mut sol = std::mem::take(&mut self.solution);
                let norm = &mut self.norm;
                let mut failed = None;
                let _ = sol.try_map_values(|e| {
                    norm.normalize(e).map_err(|_| failed = Some(e.clone()))
                });
                return match failed {
                    Some(e) => Unification::Undecided(e.clone(), e),
                    None => Unification::Unifies(sol),
                };
            }
            if !progressed {
                let (a, b) = stuck.swap_remove(0);
                return Unification::Undecided(a, b);
            }
            work.extend(stuck.drain(..));
        }
    }

    fn resolve(&mut self, e: &Expr) -> Result<Expr, super::normalize::OutOfFuel> {
        let e = self.solution.apply(e);
        self.norm.normalize(&e)
    }

    fn flex_pos(&self, e: &Expr) -> Option<(Var, usize)> {
        match e {
            Expr::Var(v) => (self.flex)(v).map(|p| (v.clone(), p)),
            _ => None,
        }
    }

    fn bind(&mut self, v: &Var, e: Expr) {
        let mut one = Subst::new();
        one.insert(v, e.clone());
        self.solution.map_values(&one);
        self.solution.insert(v, e);
    }

    fn step(&mut self, a: &Expr, b: &Expr) -> Step {
        if alpha_equal(a, b) {
            return Step::Split(Vec::new());
        }
        match (self.flex_pos(a), self.flex_pos(b)) {
            (Some((x, px)), Some((y, py))) => {
                if px >= py {
                    self.bind(&x, b.clone());
                } else {
                    self.bind(&y, a.clone());
                }
                return Step::Split(Vec::new());
            }
            (Some((x, _)), None) => return self.bind_checked(&x, b),
            (None, Some((y, _))) => return self.bind_checked(&y, a),
            (None, None) => {}
        }
        match (a, b) {
            (Expr::TypCtor { name: n1, args: a1 }, Expr::TypCtor { name: n2, args: a2 })
            | (Expr::Producer { name: n1, args: a1 }, Expr::Producer { name: n2, args: a2 }) => {
                if n1 != n2 || a1.len() != a2.len() {
                    Step::Absurd
                } else {
                    Step::Split(a1.iter().cloned().zip(a2.iter().cloned()).collect())
                }
            }
            (Expr::LocalComatch { label: l1, .. }, Expr::LocalComatch { label: l2, .. }) => {
                if l1.name != l2.name {
                    Step::Absurd
                } else {
                    Step::Stuck
                }
            }
            _ if is_rigid(a) && is_rigid(b) => Step::Absurd,
            _ => Step::Stuck,
        }
    }

    fn bind_checked(&mut self, x: &Var, t: &Expr) -> Step {
        if occurs(x, t) {
            return if occurs_rigidly(x, t) { Step::Absurd } else { Step::Stuck };
        }
        self.bind(x, t.clone());
        Step::Split(Vec::new())
    }
}

fn is_rigid(e: &Expr) -> bool {
    matches!(e, Expr::Type | Expr::TypCtor { .. } | Expr::Producer { .. } | Expr::LocalComatch { .. })
}

/// True if `x` occurs in `t` along a path of rigid constructors only.
fn occurs_rigidly(x: &Var, t: &Expr) -> bool {
    match t {
        Expr::Var(v) => v == x,
        Expr::TypCtor { args, .. } | Expr::Producer { args, .. } => {
            args.iter().any(|a| occurs_rigidly(x, a))
        }
        _ => false,
    }
}
