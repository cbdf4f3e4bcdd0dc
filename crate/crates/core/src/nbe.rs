//! Normalization by evaluation.
//!
//! [`nbe_cbn`] interprets terms as functions from levels to semantic values
//! and computes normal-order normal forms; [`nbe_cbv`] evaluates arguments
//! right to left before applying and computes the normal forms of strong
//! right-to-left call-by-value. Semantic functions are host closures.
//!
//! Both evaluators are partial, so every call to `eval`, every semantic
//! application and every call to `reify` is counted against a budget. The
//! count is unrelated to machine fuel.

use std::cell::Cell;
use std::rc::Rc;

use crate::list::List;
use crate::term::{open_count, Term};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NbeOutcome {
    Normal { nf: Term, spent: u64 },
    BudgetExhausted { spent: u64 },
}

impl NbeOutcome {
    pub fn normal_form(&self) -> Option<&Term> {
        match self {
            NbeOutcome::Normal { nf, .. } => Some(nf),
            NbeOutcome::BudgetExhausted { .. } => None,
        }
    }

    pub fn spent(&self) -> u64 {
        match self {
            NbeOutcome::Normal { spent, .. } | NbeOutcome::BudgetExhausted { spent } => *spent,
        }
    }
}

/// How the call-by-value evaluator interprets an abstraction.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum RetractMode {
    /// `to_sem f`
    #[default]
    Direct,
    /// `to_sem (from_sem (to_sem f))`, which must behave the same.
    RoundTrip,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Halt {
    Budget,
    ScopeEscape,
}

#[derive(Clone)]
struct Counter {
    spent: Rc<Cell<u64>>,
    limit: u64,
}

impl Counter {
    fn new(limit: u64) -> Counter {
        Counter {
            spent: Rc::new(Cell::new(0)),
            limit,
        }
    }

    fn tick(&self) -> Result<(), Halt> {
        let n = self.spent.get() + 1;
        self.spent.set(n);
        if n > self.limit {
            Err(Halt::Budget)
        } else {
            Ok(())
        }
    }
}

fn grow<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(128 * 1024, 4 * 1024 * 1024, f)
}

/// Index of a variable introduced at level `m` and read back at `at`.
fn fresh_index(m: usize, at: usize) -> Result<Term, Halt> {
    at.checked_sub(m + 1)
        .map(Term::Var)
        .ok_or(Halt::ScopeEscape)
}

fn finish(t: &Term, counter: &Counter, result: Result<Term, Halt>) -> Result<NbeOutcome, Error> {
    let spent = counter.spent.get().min(counter.limit);
    match result {
        Ok(nf) => Ok(NbeOutcome::Normal { nf, spent }),
        Err(Halt::Budget) => Ok(NbeOutcome::BudgetExhausted { spent }),
        Err(Halt::ScopeEscape) => Err(Error::Stuck(format!(
            "a variable escaped its scope while normalizing {t}"
        ))),
    }
}

fn check_closed(t: &Term) -> Result<(), Error> {
    match open_count(t) {
        0 => Ok(()),
        open => Err(Error::OpenTerm { open }),
    }
}

mod cbn {
    use super::*;

    pub(super) type Fun = Rc<dyn Fn(Sem) -> Result<Sem, Halt>>;

    #[derive(Clone)]
    pub(super) struct Sem(Rc<dyn Fn(usize) -> Result<Glue, Halt>>);

    pub(super) enum Glue {
        Abs(Fun),
        Neutral(Term),
    }

    impl Sem {
        fn at(&self, m: usize) -> Result<Glue, Halt> {
            grow(|| (self.0)(m))
        }
    }

    pub(super) fn reify(c: &Counter, d: &Sem, m: usize) -> Result<Term, Halt> {
        c.tick()?;
        match d.at(m)? {
            Glue::Abs(f) => {
                let var = Sem(Rc::new(move |at| Ok(Glue::Neutral(fresh_index(m, at)?))));
                let body = grow(|| f(var))?;
                Ok(Term::lam(grow(|| reify(c, &body, m + 1))?))
            }
            Glue::Neutral(a) => Ok(a),
        }
    }

    fn to_sem(f: Fun) -> Sem {
        Sem(Rc::new(move |_| Ok(Glue::Abs(f.clone()))))
    }

    fn from_sem(c: &Counter, d: Sem, arg: Sem) -> Sem {
        let c = c.clone();
        Sem(Rc::new(move |m| {
            c.tick()?;
            match d.at(m)? {
                Glue::Abs(f) => grow(|| f(arg.clone()))?.at(m),
                Glue::Neutral(a) => Ok(Glue::Neutral(Term::app(a, reify(&c, &arg, m)?))),
            }
        }))
    }

    pub(super) fn eval(c: &Counter, t: &Term, env: &List<Sem>) -> Result<Sem, Halt> {
        c.tick()?;
        match t {
            Term::Var(n) => env.get(*n).cloned().ok_or(Halt::ScopeEscape),
            Term::Lam(body) => {
                let (c, body, env) = (c.clone(), body.clone(), env.clone());
                Ok(to_sem(Rc::new(move |d| eval(&c, &body, &env.cons(d)))))
            }
            Term::App(t1, t2) => {
                let d1 = eval(c, t1, env)?;
                let (c2, t2, env) = (c.clone(), t2.clone(), env.clone());
                // The argument stays an unevaluated thunk.
                let thunk = Sem(Rc::new(move |m| eval(&c2, &t2, &env)?.at(m)));
                Ok(from_sem(c, d1, thunk))
            }
        }
    }
}

mod cbv {
    use super::*;

    pub(super) type Fun = Rc<dyn Fn(Sem) -> Result<Sem, Halt>>;

    #[derive(Clone)]
    pub(super) enum Sem {
        Abs(Fun),
        Neutral(Rc<dyn Fn(usize) -> Result<Term, Halt>>),
    }

    pub(super) fn reify(c: &Counter, d: &Sem, m: usize) -> Result<Term, Halt> {
        c.tick()?;
        match d {
            Sem::Abs(f) => {
                let var = Sem::Neutral(Rc::new(move |at| fresh_index(m, at)));
                let body = grow(|| f(var))?;
                Ok(Term::lam(grow(|| reify(c, &body, m + 1))?))
            }
            Sem::Neutral(l) => grow(|| l(m)),
        }
    }

    fn to_sem(f: Fun) -> Sem {
        Sem::Abs(f)
    }

    fn from_sem(c: &Counter, d: &Sem, arg: Sem) -> Result<Sem, Halt> {
        c.tick()?;
        match d {
            Sem::Abs(f) => grow(|| f(arg)),
            Sem::Neutral(l) => {
                let (c, l) = (c.clone(), l.clone());
                Ok(Sem::Neutral(Rc::new(move |m| {
                    let n = reify(&c, &arg, m)?;
                    Ok(Term::app(l(m)?, n))
                })))
            }
        }
    }

    pub(super) fn eval(
        c: &Counter,
        mode: RetractMode,
        t: &Term,
        env: &List<Sem>,
    ) -> Result<Sem, Halt> {
        c.tick()?;
        match t {
            Term::Var(n) => env.get(*n).cloned().ok_or(Halt::ScopeEscape),
            Term::Lam(body) => {
                let (c, body, env) = (c.clone(), body.clone(), env.clone());
                let f: Fun = {
                    let c = c.clone();
                    Rc::new(move |d| grow(|| eval(&c, mode, &body, &env.cons(d))))
                };
                Ok(match mode {
                    RetractMode::Direct => to_sem(f),
                    RetractMode::RoundTrip => {
                        let d = to_sem(f);
                        to_sem(Rc::new(move |arg| from_sem(&c, &d, arg)))
                    }
                })
            }
            Term::App(t1, t2) => {
                let d2 = grow(|| eval(c, mode, t2, env))?;
                let d1 = grow(|| eval(c, mode, t1, env))?;
                from_sem(c, &d1, d2)
            }
        }
    }
}

/// Normal-order normalization by evaluation.
pub fn nbe_cbn(t: &Term, budget: u64) -> Result<NbeOutcome, Error> {
    check_closed(t)?;
    let counter = Counter::new(budget);
    let result = cbn::eval(&counter, t, &List::nil()).and_then(|d| cbn::reify(&counter, &d, 0));
    finish(t, &counter, result)
}

/// Call-by-value normalization by evaluation.
pub fn nbe_cbv(t: &Term, budget: u64) -> Result<NbeOutcome, Error> {
    nbe_cbv_with(t, budget, RetractMode::Direct)
}

pub fn nbe_cbv_with(t: &Term, budget: u64, mode: RetractMode) -> Result<NbeOutcome, Error> {
    check_closed(t)?;
    let counter = Counter::new(budget);
    let result =
        cbv::eval(&counter, mode, t, &List::nil()).and_then(|d| cbv::reify(&counter, &d, 0));
    finish(t, &counter, result)
}
