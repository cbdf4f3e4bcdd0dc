mod common;

use lamvm::convert::{convertible, Verdict};
use lamvm::corpus::church_arithmetic;
use lamvm::knv::run;
use lamvm::{church, parse, Notation, Term};

fn named(s: &str) -> Term {
    parse(s, Notation::Named).unwrap()
}

#[test]
fn arithmetic_is_convertible_with_its_numeral() {
    for (t, n) in church_arithmetic() {
        assert_eq!(convertible(&t, &church(n), 1_000_000).unwrap(), Verdict::Convertible, "{t}");
        assert!(matches!(
            convertible(&t, &church(n + 1), 1_000_000).unwrap(),
            Verdict::NotConvertible { .. }
        ));
    }
}

#[test]
fn divergent_normal_forms_are_told_apart_early() {
    let left = named(r"\x.\y.((\z. z z)(\z. z z))");
    let right = named(r"\x.(x (\y.((\z. z z)(\z. z z)))) x");
    match convertible(&left, &right, 1000).unwrap() {
        Verdict::NotConvertible {
            diverging_index,
            left_partial,
            right_partial,
            ..
        } => {
            assert_eq!(diverging_index, 1);
            assert_eq!(left_partial.print(Notation::Named), "λx. λy. □");
            assert_eq!(right_partial.print(Notation::Named), "λx. □ x");
        }
        v => panic!("{v:?}"),
    }
}

#[test]
fn divergence_on_both_sides_is_unknown() {
    let omega = named(r"(\x. x x)(\x. x x)");
    assert!(matches!(
        convertible(&omega, &omega, 100).unwrap(),
        Verdict::Unknown { .. }
    ));
}

#[test]
fn verdicts_match_normal_forms_on_random_pairs() {
    let corpus = common::random_corpus(31, 400, 20);
    for pair in corpus.chunks(2) {
        let (a, b) = (&pair[0], &pair[1]);
        let (Some(na), Some(nb)) = (
            run(a, 50_000).unwrap().normal_form().cloned(),
            run(b, 50_000).unwrap().normal_form().cloned(),
        ) else {
            continue;
        };
        let v = convertible(a, b, 50_000).unwrap();
        assert_eq!(v == Verdict::Convertible, na == nb, "{a} {b}");
        assert!(convertible(a, a, 50_000).unwrap() == Verdict::Convertible);
    }
}
