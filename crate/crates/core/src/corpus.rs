//! Named terms and term enumeration.

use crate::term::{church, Term};

fn v(n: usize) -> Term {
    Term::var(n)
}

fn lam(t: Term) -> Term {
    Term::lam(t)
}

fn app(f: Term, a: Term) -> Term {
    Term::app(f, a)
}

/// `λx. x`
pub fn identity() -> Term {
    lam(v(0))
}

/// `λx. λy. x`
pub fn k() -> Term {
    lam(lam(v(1)))
}

/// `λx. x x`
pub fn omega() -> Term {
    lam(app(v(0), v(0)))
}

/// `(λx. x x) (λx. x x)`
pub fn big_omega() -> Term {
    app(omega(), omega())
}

/// `λn. λf. λx. f (n f x)`
pub fn succ() -> Term {
    lam(lam(lam(app(v(1), Term::apps(v(2), [v(1), v(0)])))))
}

/// `λm. λn. λf. λx. m f (n f x)`
pub fn plus() -> Term {
    lam(lam(lam(lam(Term::apps(
        v(3),
        [v(1), Term::apps(v(2), [v(1), v(0)])],
    )))))
}

/// `λm. λn. λf. m (n f)`
pub fn mult() -> Term {
    lam(lam(lam(app(v(2), app(v(1), v(0))))))
}

/// `λm. λn. n m`, computing `m` to the power `n`.
pub fn exp() -> Term {
    lam(lam(app(v(0), v(1))))
}

/// `λx. (c_n ω) x`, whose normal form has size exponential in `n`.
pub fn size_explosion(n: usize) -> Term {
    lam(app(app(church(n), omega()), v(0)))
}

/// Closed terms built from Church numerals and arithmetic, with the numeral
/// each one denotes.
pub fn church_arithmetic() -> Vec<(Term, usize)> {
    let c = church;
    vec![
        (app(succ(), c(0)), 1),
        (app(succ(), c(3)), 4),
        (Term::apps(plus(), [c(2), c(3)]), 5),
        (Term::apps(plus(), [c(0), c(0)]), 0),
        (Term::apps(mult(), [c(2), c(3)]), 6),
        (Term::apps(mult(), [c(3), c(0)]), 0),
        (Term::apps(exp(), [c(2), c(3)]), 8),
        (Term::apps(exp(), [c(3), c(2)]), 9),
        (app(c(2), c(2)), 4),
        (app(c(3), c(2)), 8),
        (
            Term::apps(plus(), [Term::apps(mult(), [c(2), c(2)]), app(succ(), c(1))]),
            6,
        ),
        (Term::apps(mult(), [app(succ(), c(2)), Term::apps(exp(), [c(2), c(2)])]), 12),
    ]
}

/// Every term of exactly `size` constructors whose free indices are below
/// `scope`.
pub fn terms_of_size(size: usize, scope: usize) -> Vec<Term> {
    let mut out = Vec::new();
    match size {
        0 => {}
        1 => out.extend((0..scope).map(Term::var)),
        _ => {
            out.extend(terms_of_size(size - 1, scope + 1).into_iter().map(Term::lam));
            for left in 1..size - 1 {
                let funs = terms_of_size(left, scope);
                if funs.is_empty() {
                    continue;
                }
                let args = terms_of_size(size - 1 - left, scope);
                for f in &funs {
                    out.extend(args.iter().map(|a| app(f.clone(), a.clone())));
                }
            }
        }
    }
    out
}

/// Every closed term with at most `max_size` constructors.
pub fn closed_terms_up_to(max_size: usize) -> Vec<Term> {
    (1..=max_size)
        .flat_map(|size| terms_of_size(size, 0))
        .collect()
}
