//! Pure lambda terms with de Bruijn indices.
//!
//! Besides the term type this module holds the index arithmetic (shift and
//! substitution), the two contraction rules used by the strategies in this
//! crate, and the grammars of normal, neutral, weak normal and inert terms.

mod syntax;

use std::fmt;
use std::sync::Arc;

pub use syntax::{parse, print, Notation, ParseError};
pub(crate) use syntax::{print_syntax, Shape, Syntax};

/// A lambda term. Variables are de Bruijn indices.
// Equality is structural with a pointer shortcut, so it agrees with the
// derived hash.
#[allow(clippy::derived_hash_with_manual_eq)]
#[derive(Clone, Eq, Hash)]
pub enum Term {
    Var(usize),
    App(Arc<Term>, Arc<Term>),
    Lam(Arc<Term>),
}

impl Term {
    pub fn var(index: usize) -> Term {
        Term::Var(index)
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term::App(Arc::new(fun), Arc::new(arg))
    }

    pub fn lam(body: Term) -> Term {
        Term::Lam(Arc::new(body))
    }

    /// Left-nested application of `head` to `args`.
    pub fn apps<I: IntoIterator<Item = Term>>(head: Term, args: I) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    /// Number of constructors.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) => 1,
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Lam(b) => 1 + b.size(),
        }
    }

    pub fn is_closed(&self) -> bool {
        open_count(self) == 0
    }

    pub fn classify(&self) -> Forms {
        classify(self)
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        match (self, other) {
            (Term::Var(a), Term::Var(b)) => a == b,
            (Term::App(f1, a1), Term::App(f2, a2)) => {
                (Arc::ptr_eq(f1, f2) || f1 == f2) && (Arc::ptr_eq(a1, a2) || a1 == a2)
            }
            (Term::Lam(b1), Term::Lam(b2)) => Arc::ptr_eq(b1, b2) || b1 == b2,
            _ => false,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self, Notation::DeBruijn))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", print(self, Notation::DeBruijn))
    }
}

/// A term that may contain holes, used to display contexts and partial
/// normal forms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Partial {
    Hole,
    Var(usize),
    App(Box<Partial>, Box<Partial>),
    Lam(Box<Partial>),
}

impl Partial {
    pub fn app(fun: Partial, arg: Partial) -> Partial {
        Partial::App(Box::new(fun), Box::new(arg))
    }

    pub fn lam(body: Partial) -> Partial {
        Partial::Lam(Box::new(body))
    }

    pub fn print(&self, notation: Notation) -> String {
        print_syntax(self, notation)
    }
}

impl From<&Term> for Partial {
    fn from(t: &Term) -> Partial {
        match t {
            Term::Var(n) => Partial::Var(*n),
            Term::App(f, a) => Partial::app(f.as_ref().into(), a.as_ref().into()),
            Term::Lam(b) => Partial::lam(b.as_ref().into()),
        }
    }
}

impl Syntax for Partial {
    fn shape(&self) -> Shape<'_, Partial> {
        match self {
            Partial::Hole => Shape::Hole,
            Partial::Var(n) => Shape::Var(*n),
            Partial::App(f, a) => Shape::App(f, a),
            Partial::Lam(b) => Shape::Lam(b),
        }
    }
}

impl fmt::Display for Partial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.print(Notation::DeBruijn))
    }
}

/// `shift(i, k, t)` adds `i` to every index of `t` that is at least `k`,
/// where `k` grows by one under each binder.
pub fn shift(amount: usize, cutoff: usize, t: &Term) -> Term {
    if amount == 0 {
        return t.clone();
    }
    match t {
        Term::Var(n) if *n >= cutoff => Term::Var(n + amount),
        Term::Var(n) => Term::Var(*n),
        Term::App(f, a) => Term::app(shift(amount, cutoff, f), shift(amount, cutoff, a)),
        Term::Lam(b) => Term::lam(shift(amount, cutoff + 1, b)),
    }
}

/// `subst(i, s, t)` replaces index `i` in `t` by `s` (shifted past the `i`
/// binders it moves under) and closes the gap left by the removed binder.
pub fn subst(index: usize, s: &Term, t: &Term) -> Term {
    match t {
        Term::Var(n) if *n < index => Term::Var(*n),
        Term::Var(n) if *n == index => shift(index, 0, s),
        Term::Var(n) => Term::Var(n - 1),
        Term::App(f, a) => Term::app(subst(index, s, f), subst(index, s, a)),
        Term::Lam(b) => Term::lam(subst(index + 1, s, b)),
    }
}

/// `(λ b) a ⇁ b[0 := a]`; `None` when `t` is not a β-redex.
pub fn beta_contract(t: &Term) -> Option<Term> {
    match t {
        Term::App(f, a) => match f.as_ref() {
            Term::Lam(body) => Some(subst(0, a, body)),
            _ => None,
        },
        _ => None,
    }
}

/// β-contraction restricted to arguments in weak normal form.
pub fn beta_wnf_contract(t: &Term) -> Option<Term> {
    match t {
        Term::App(f, a) if matches!(f.as_ref(), Term::Lam(_)) && classify(a).weak_normal => {
            beta_contract(t)
        }
        _ => None,
    }
}

/// Number of λ constructors needed to close `t`; zero iff `t` is closed.
pub fn open_count(t: &Term) -> usize {
    match t {
        Term::Var(n) => n + 1,
        Term::App(f, a) => open_count(f).max(open_count(a)),
        Term::Lam(b) => open_count(b).saturating_sub(1),
    }
}

/// The Church numeral `λλ 1 (1 (… (1 0)))` with `n` applications.
pub fn church(n: usize) -> Term {
    let body = (0..n).fold(Term::var(0), |acc, _| Term::app(Term::var(1), acc));
    Term::lam(Term::lam(body))
}

/// One of the syntactic classes a term may belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormClass {
    NormalForm,
    Neutral,
    WeakNormalForm,
    InertTerm,
}

/// Grammar memberships of a term. The grammars overlap, so a term usually
/// belongs to several classes at once; a term in none of them is `Forms::NONE`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Forms {
    pub normal: bool,
    pub neutral: bool,
    pub weak_normal: bool,
    pub inert: bool,
}

impl Forms {
    pub const NONE: Forms = Forms {
        normal: false,
        neutral: false,
        weak_normal: false,
        inert: false,
    };

    pub const VAR: Forms = Forms {
        normal: true,
        neutral: true,
        weak_normal: true,
        inert: true,
    };

    /// The classes of `λ b` given those of `b`.
    pub fn lam(body: Forms) -> Forms {
        Forms {
            normal: body.normal,
            neutral: false,
            weak_normal: true,
            inert: false,
        }
    }

    /// The classes of `f a` given those of `f` and `a`.
    pub fn app(fun: Forms, arg: Forms) -> Forms {
        let neutral = fun.neutral && arg.normal;
        let inert = fun.inert && arg.weak_normal;
        Forms {
            normal: neutral,
            neutral,
            weak_normal: inert,
            inert,
        }
    }

    pub fn contains(&self, class: FormClass) -> bool {
        match class {
            FormClass::NormalForm => self.normal,
            FormClass::Neutral => self.neutral,
            FormClass::WeakNormalForm => self.weak_normal,
            FormClass::InertTerm => self.inert,
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == Forms::NONE
    }

    pub fn classes(&self) -> Vec<FormClass> {
        [
            FormClass::NormalForm,
            FormClass::Neutral,
            FormClass::WeakNormalForm,
            FormClass::InertTerm,
        ]
        .into_iter()
        .filter(|c| self.contains(*c))
        .collect()
    }
}

/// Membership in the four grammars
///
/// ```text
/// nf  ::= λ nf | neu        neu ::= n | neu nf
/// wnf ::= λ T  | inert      inert ::= n | inert wnf
/// ```
pub fn classify(t: &Term) -> Forms {
    match t {
        Term::Var(_) => Forms::VAR,
        Term::Lam(b) => Forms::lam(classify(b)),
        Term::App(f, a) => Forms::app(classify(f), classify(a)),
    }
}

pub fn is_normal(t: &Term) -> bool {
    classify(t).normal
}

pub fn is_neutral(t: &Term) -> bool {
    classify(t).neutral
}

pub fn is_weak_normal(t: &Term) -> bool {
    classify(t).weak_normal
}

pub fn is_inert(t: &Term) -> bool {
    classify(t).inert
}
