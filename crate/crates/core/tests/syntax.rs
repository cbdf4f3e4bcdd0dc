mod common;

use lamvm::term::{classify, FormClass};
use lamvm::{parse, print, Notation, ParseError, Term};

#[test]
fn printing_round_trips_in_both_notations() {
    let mut rng = common::rng(21);
    for _ in 0..2000 {
        let t = common::random_closed_term(&mut rng, 40);
        for n in [Notation::DeBruijn, Notation::Named] {
            assert_eq!(parse(&print(&t, n), n).unwrap(), t, "{}", print(&t, n));
        }
    }
}

#[test]
fn named_binders_resolve_to_indices() {
    let t = parse(r"\x.\y. x (\z. y z)", Notation::Named).unwrap();
    assert_eq!(print(&t, Notation::DeBruijn), "λ λ 1 (λ 1 0)");
    let shadowed = parse("λx. λx. x", Notation::Named).unwrap();
    assert_eq!(shadowed, parse("λ λ 0", Notation::DeBruijn).unwrap());
}

#[test]
fn malformed_input_is_rejected() {
    for s in ["", "λ", "(λ 0", "λ 0)", "λ x"] {
        assert!(parse(s, Notation::DeBruijn).is_err(), "{s:?}");
    }
    assert!(matches!(
        parse(r"\x. y", Notation::Named),
        Err(ParseError::Unbound { pos: 4, .. })
    ));
}

#[test]
fn open_terms_parse_but_are_not_closed() {
    let t = parse("λ 1 0", Notation::DeBruijn).unwrap();
    assert!(!t.is_closed());
    assert_eq!(t.size(), 4);
}

#[test]
fn syntactic_classes() {
    let classes = |s: &str| classify(&parse(s, Notation::DeBruijn).unwrap());
    let var_app = classes("λ 0 (λ 0)");
    assert!(var_app.contains(FormClass::NormalForm));
    let inner = Term::app(Term::var(0), Term::lam(Term::var(0)));
    assert!(classify(&inner).contains(FormClass::Neutral));
    assert!(classify(&inner).contains(FormClass::InertTerm));
    let redex = classes("(λ 0) (λ 0)");
    assert!(!redex.contains(FormClass::NormalForm));
    assert!(!redex.contains(FormClass::WeakNormalForm));
    assert!(classes("λ (λ 0) 0").contains(FormClass::WeakNormalForm));
    assert!(!classes("λ (λ 0) 0").contains(FormClass::NormalForm));
}
