//! Call-by-value evaluation of closed expressions with evaluation contexts.
//!
//! Values are `Type`, type constructors and producers applied to values,
//! and local comatches (closures, which only occur in programs that have not
//! been lifted). Arguments are evaluated left to right, scrutinee first.
//! Evaluation never goes under binders.

use crate::ast::*;
use crate::check::normalize::{match_redex, redex};
use crate::subst::Subst;

pub const DEFAULT_BUDGET: u64 = 1_000_000;

pub fn is_value(e: &Expr) -> bool {
    match e {
        Expr::Type | Expr::LocalComatch { .. } => true,
        Expr::TypCtor { args, .. } | Expr::Producer { args, .. } => args.iter().all(is_value),
        _ => false,
    }
}

/// One layer of an evaluation context; the hole is where the frame's
/// missing subexpression goes.
#[derive(Clone, Debug)]
pub enum Frame {
    /// `C(v̄, □, ē)`
    Producer { name: Name, done: Vec<Expr>, pending: Vec<Expr> },
    /// `T(v̄, □, ē)`
    TypCtor { name: Name, done: Vec<Expr>, pending: Vec<Expr> },
    /// `□.d(σ)`
    ConsumerHead { name: Name, args: Vec<Expr> },
    /// `v.d(v̄, □, ē)`
    ConsumerArg { scrutinee: Expr, name: Name, done: Vec<Expr>, pending: Vec<Expr> },
    /// `□.match { … }`
    MatchHead { label: Label, motive: Option<Motive>, cases: Vec<Clause>, env: ClosureEnv },
}

/// Frames from the innermost outwards.
#[derive(Clone, Debug, Default)]
pub struct EvalContext {
    pub frames: Vec<Frame>,
}

impl EvalContext {
    pub fn is_hole(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn plug(&self, e: Expr) -> Expr {
        let mut cur = e;
        for f in &self.frames {
            cur = match f {
                Frame::Producer { name, done, pending } => {
                    Expr::Producer { name: name.clone(), args: splice(done, cur, pending) }
                }
                Frame::TypCtor { name, done, pending } => {
                    Expr::TypCtor { name: name.clone(), args: splice(done, cur, pending) }
                }
                Frame::ConsumerHead { name, args } => {
                    Expr::Consumer { scrutinee: Box::new(cur), name: name.clone(), args: args.clone() }
                }
                Frame::ConsumerArg { scrutinee, name, done, pending } => Expr::Consumer {
                    scrutinee: Box::new(scrutinee.clone()),
                    name: name.clone(),
                    args: splice(done, cur, pending),
                },
                Frame::MatchHead { label, motive, cases, env } => Expr::LocalMatch {
                    label: label.clone(),
                    scrutinee: Box::new(cur),
                    motive: motive.clone(),
                    cases: cases.clone(),
                    env: env.clone(),
                },
            };
        }
        cur
    }
}

fn splice(done: &[Expr], hole: Expr, pending: &[Expr]) -> Vec<Expr> {
    let mut v = Vec::with_capacity(done.len() + 1 + pending.len());
    v.extend_from_slice(done);
    v.push(hole);
    v.extend_from_slice(pending);
    v
}

#[derive(Clone, Debug)]
pub enum Redex {
    /// `v.d(v̄)` where `v` is a constructor call, codefinition call or
    /// comatch.
    Observe { scrutinee: Expr, consumer: Name, args: Vec<Expr> },
    /// A local match on a value.
    Match { scrutinee: Expr, cases: Vec<Clause> },
    /// A `let` applied to values.
    Let { name: Name, args: Vec<Expr> },
}

#[derive(Clone, Debug)]
pub enum Decomposition {
    Value,
    Redex(EvalContext, Redex),
    Stuck(Expr),
}

/// Splits `e` into a context and the redex in its hole, or reports that it
/// is a value or stuck.
pub fn decompose(e: &Expr, g: Globals<'_>) -> Decomposition {
    crate::subst::grow(|| decompose_inner(e, g))
}

/// Decomposes `args` left to right; `Ok` with the first non-value's
/// position and its decomposition, or `Err(())` if all are values.
fn first_redex(args: &[Expr], g: Globals<'_>) -> Result<(usize, Decomposition), ()> {
    for (i, a) in args.iter().enumerate() {
        match decompose(a, g) {
            Decomposition::Value => continue,
            d => return Ok((i, d)),
        }
    }
    Err(())
}

fn wrap(d: Decomposition, frame: impl FnOnce() -> Frame) -> Decomposition {
    match d {
        Decomposition::Redex(mut ctx, r) => {
            ctx.frames.push(frame());
            Decomposition::Redex(ctx, r)
        }
        other => other,
    }
}

fn decompose_inner(e: &Expr, g: Globals<'_>) -> Decomposition {
    match e {
        Expr::Var(_) => Decomposition::Stuck(e.clone()),
        Expr::Type | Expr::LocalComatch { .. } => Decomposition::Value,
        Expr::TypCtor { name, args } => match first_redex(args, g) {
            Ok((i, d)) => wrap(d, || Frame::TypCtor {
                name: name.clone(),
                done: args[..i].to_vec(),
                pending: args[i + 1..].to_vec(),
            }),
            Err(()) => Decomposition::Value,
        },
        Expr::Producer { name, args } => match first_redex(args, g) {
            Ok((i, d)) => wrap(d, || Frame::Producer {
                name: name.clone(),
                done: args[..i].to_vec(),
                pending: args[i + 1..].to_vec(),
            }),
            Err(()) if g.let_decl(name).is_some() => Decomposition::Redex(
                EvalContext::default(),
                Redex::Let { name: name.clone(), args: args.clone() },
            ),
            Err(()) => Decomposition::Value,
        },
        Expr::Consumer { scrutinee, name, args } => match decompose(scrutinee, g) {
            Decomposition::Value => match first_redex(args, g) {
                Ok((i, d)) => wrap(d, || Frame::ConsumerArg {
                    scrutinee: (**scrutinee).clone(),
                    name: name.clone(),
                    done: args[..i].to_vec(),
                    pending: args[i + 1..].to_vec(),
                }),
                Err(()) => match &**scrutinee {
                    Expr::Producer { .. } | Expr::LocalComatch { .. } => Decomposition::Redex(
                        EvalContext::default(),
                        Redex::Observe { scrutinee: (**scrutinee).clone(), consumer: name.clone(), args: args.clone() },
                    ),
                    _ => Decomposition::Stuck(e.clone()),
                },
            },
            d => wrap(d, || Frame::ConsumerHead { name: name.clone(), args: args.clone() }),
        },
        Expr::LocalMatch { label, scrutinee, motive, cases, env } => match decompose(scrutinee, g) {
            Decomposition::Value => Decomposition::Redex(
                EvalContext::default(),
                Redex::Match { scrutinee: (**scrutinee).clone(), cases: cases.clone() },
            ),
            d => wrap(d, || Frame::MatchHead {
                label: label.clone(),
                motive: motive.clone(),
                cases: cases.clone(),
                env: env.clone(),
            }),
        },
    }
}

/// The contractum of a redex, or `None` if no clause applies.
pub fn contract(r: &Redex, g: Globals<'_>) -> Option<Expr> {
    match r {
        Redex::Observe { scrutinee, consumer, args } => redex(g, scrutinee, consumer, args),
        Redex::Match { scrutinee, cases } => match_redex(scrutinee, cases),
        Redex::Let { name, args } => {
            let l = g.let_decl(name)?;
            Some(Subst::from_telescope(&l.params, args).ok()?.apply(&l.body))
        }
    }
}

#[derive(Clone, Debug)]
pub enum Step {
    Next(Expr),
    AtValue,
    /// The subterm that cannot reduce.
    Stuck(Expr),
}

pub fn step(e: &Expr, g: Globals<'_>) -> Step {
    match decompose(e, g) {
        Decomposition::Value => Step::AtValue,
        Decomposition::Stuck(t) => Step::Stuck(t),
        Decomposition::Redex(ctx, r) => match contract(&r, g) {
            Some(c) => Step::Next(ctx.plug(c)),
            None => Step::Stuck(EvalContext::default().plug(redex_expr(&r))),
        },
    }
}

fn redex_expr(r: &Redex) -> Expr {
    match r {
        Redex::Observe { scrutinee, consumer, args } => {
            Expr::Consumer { scrutinee: Box::new(scrutinee.clone()), name: consumer.clone(), args: args.clone() }
        }
        Redex::Match { scrutinee, .. } => scrutinee.clone(),
        Redex::Let { name, args } => Expr::Producer { name: name.clone(), args: args.clone() },
    }
}

#[derive(Clone, Debug)]
pub enum Outcome {
    Value { value: Expr, steps: u64 },
    BudgetExhausted { term: Expr, steps: u64 },
    Stuck { term: Expr, at: Expr, steps: u64 },
}

impl Outcome {
    pub fn value(&self) -> Option<&Expr> {
        match self {
            Outcome::Value { value, .. } => Some(value),
            _ => None,
        }
    }
}

/// Steps `e` to a value, for at most `budget` steps.
pub fn evaluate(e: &Expr, p: &Program, budget: u64) -> Outcome {
    let index = p.index();
    let g = Globals::new(p, &index);
    let mut cur = e.clone();
    let mut steps = 0;
    loop {
        if steps == budget {
            if is_value(&cur) {
                return Outcome::Value { value: cur, steps };
            }
            return Outcome::BudgetExhausted { term: cur, steps };
        }
        match step(&cur, g) {
            Step::AtValue => return Outcome::Value { value: cur, steps },
            Step::Stuck(at) => return Outcome::Stuck { term: cur, at, steps },
            Step::Next(n) => {
                cur = n;
                steps += 1;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::parser::{parse, parse_expr};
    use crate::printer::print_expr;

    const SRC: &str = "data Bool { True, False }
def Bool.neg: Bool { True => False, False => True }
data Nat { Z, S(n: Nat) }
def Nat.plus(n: Nat): Nat { Z => n, S(m) => S(m.plus(n)) }
codata Stream { head(a: Type): Nat, tail: Stream }
codef Ones: Stream { head(_) => S(Z), tail => Ones }
codata Pair(a b: Type) { Pair(a, b).π₁(a b: Type): a, Pair(a, b).π₂(a b: Type): b }
codef MkPair(a b: Type, x: a, y: b): Pair(a, b) { π₁(_, _) => x, π₂(_, _) => y }
let one: Nat := S(Z);";

    fn run(e: &str) -> String {
        let p = parse(SRC).unwrap();
        let e = parse_expr(e, &p).unwrap();
        match evaluate(&e, &p, DEFAULT_BUDGET) {
            Outcome::Value { value, .. } => print_expr(&value, &p),
            other => panic!("{other:?}"),
        }
    }

    fn decomp(e: &str) -> Decomposition {
        let p = parse(SRC).unwrap();
        let ix = p.index();
        let e = parse_expr(e, &p).unwrap();
        decompose(&e, Globals::new(&p, &ix))
    }

    #[test]
    fn producer_of_values_is_a_value() {
        assert!(matches!(decomp("S(Z)"), Decomposition::Value));
    }

    #[test]
    fn redex_at_the_top() {
        let Decomposition::Redex(ctx, Redex::Observe { consumer, .. }) = decomp("True.neg") else { panic!() };
        assert!(ctx.is_hole());
        assert_eq!(&*consumer, "neg");
    }

    #[test]
    fn redex_under_a_constructor() {
        let Decomposition::Redex(ctx, Redex::Observe { consumer, args, .. }) = decomp("S(Z.plus(Z))") else {
            panic!()
        };
        assert!(matches!(ctx.frames.as_slice(), [Frame::Producer { name, .. }] if &**name == "S"));
        assert_eq!(&*consumer, "plus");
        assert_eq!(args.len(), 1);
    }

    #[test]
    fn evaluates() {
        assert_eq!(run("True.neg"), "False");
        assert_eq!(run("Z.plus(S(Z))"), "S(Z)");
        assert_eq!(run("Ones.head(Nat)"), "S(Z)");
        assert_eq!(run("S(Z).plus(S(Z))"), "S(S(Z))");
        assert_eq!(run("MkPair(Nat, Bool, Z, True).π₁(Nat, Bool)"), "Z");
        assert_eq!(run("one.plus(one)"), "S(S(Z))");
        assert_eq!(run("S(Z)"), "S(Z)");
    }

    #[test]
    fn local_forms_evaluate() {
        assert_eq!(run("S(Z).match { Z => True, S(_) => False }"), "False");
        assert_eq!(run("comatch { head(_) => Z, tail => Ones }.tail.head(Nat)"), "S(Z)");
    }

    #[test]
    fn values_take_no_steps() {
        let p = parse(SRC).unwrap();
        let e = parse_expr("S(S(Z))", &p).unwrap();
        assert!(matches!(evaluate(&e, &p, 10), Outcome::Value { steps: 0, .. }));
    }

    #[test]
    fn budget_is_reported() {
        let p = parse("data U { T } def U.loop: U { T => T.loop }").unwrap();
        let e = parse_expr("T.loop", &p).unwrap();
        assert!(matches!(evaluate(&e, &p, 100), Outcome::BudgetExhausted { steps: 100, .. }));
    }

    #[test]
    fn open_terms_are_stuck() {
        let p = parse(SRC).unwrap();
        let x = Var::fresh("x");
        let e = Expr::cons(Expr::var(&x), "neg", vec![]);
        assert!(matches!(evaluate(&e, &p, 10), Outcome::Stuck { .. }));
    }
}
