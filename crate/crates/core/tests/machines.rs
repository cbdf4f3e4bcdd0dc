mod common;

use lamvm::corpus::{self, church_arithmetic, closed_terms_up_to};
use lamvm::kn::{kn_replay, kn_run, kn_trace};
use lamvm::knv::{self, replay, run, Rule};
use lamvm::nbe::{nbe_cbn, nbe_cbv};
use lamvm::oracle::{normalize_normal_order, normalize_rrcbv};
use lamvm::term::is_normal;
use lamvm::{church, parse, Error, Notation, Term};

const FUEL: u64 = 20_000;

fn db(s: &str) -> Term {
    parse(s, Notation::DeBruijn).unwrap()
}

#[test]
fn knv_matches_rrcbv_oracle_on_random_terms() {
    for t in common::random_corpus(11, 1500, 30) {
        let machine = run(&t, FUEL).unwrap();
        let Some(nf) = machine.normal_form() else { continue };
        assert!(is_normal(nf), "{t}");
        let oracle = normalize_rrcbv(&t, machine.stats().contractions());
        assert_eq!(oracle.normal_form(), Some(nf), "{t}");
        assert_eq!(oracle.steps(), machine.stats().contractions(), "{t}");
    }
}

#[test]
fn kn_matches_normal_order_oracle_on_random_terms() {
    for t in common::random_corpus(12, 1500, 30) {
        let machine = kn_run(&t, FUEL).unwrap();
        let Some(nf) = machine.normal_form() else { continue };
        let oracle = normalize_normal_order(&t, machine.stats().contractions());
        assert_eq!(oracle.normal_form(), Some(nf), "{t}");
    }
}

#[test]
fn nbe_agrees_with_machines_on_small_terms() {
    for t in closed_terms_up_to(7) {
        if let Some(nf) = run(&t, FUEL).unwrap().normal_form() {
            assert_eq!(nbe_cbv(&t, 1_000_000).unwrap().normal_form(), Some(nf), "{t}");
        }
        if let Some(nf) = kn_run(&t, FUEL).unwrap().normal_form() {
            assert_eq!(nbe_cbn(&t, 1_000_000).unwrap().normal_form(), Some(nf), "{t}");
        }
    }
}

#[test]
fn church_arithmetic_normalizes_to_numerals() {
    for (t, n) in church_arithmetic() {
        assert_eq!(run(&t, 1_000_000).unwrap().normal_form(), Some(&church(n)), "{t}");
        assert_eq!(kn_run(&t, 1_000_000).unwrap().normal_form(), Some(&church(n)), "{t}");
    }
}

#[test]
fn strategies_split_on_discarded_divergence() {
    // K I Ω under a binder: only normal order discards Ω before evaluating it.
    let t = Term::lam(Term::apps(corpus::k(), [corpus::identity(), corpus::big_omega()]));
    assert!(run(&t, 5000).unwrap().normal_form().is_none());
    assert_eq!(kn_run(&t, 5000).unwrap().normal_form(), Some(&db("λ λ 0")));
    assert!(nbe_cbv(&t, 5000).unwrap().normal_form().is_none());
    assert_eq!(nbe_cbn(&t, 5000).unwrap().normal_form(), Some(&db("λ λ 0")));
}

#[test]
fn traces_replay_to_the_same_configuration() {
    for t in common::random_corpus(13, 200, 20) {
        let tr = knv::trace(&t, 2000).unwrap();
        let rules: Vec<Rule> = tr.steps.iter().map(|s| s.rule).collect();
        assert_eq!(replay(&t, &rules).unwrap(), tr.steps.last().unwrap().config, "{t}");
        assert!(tr.steps.iter().all(|s| knv::is_wellformed(&s.config)), "{t}");

        let (steps, _) = kn_trace(&t, 2000).unwrap();
        let rules: Vec<_> = steps.iter().map(|s| s.rule).collect();
        assert_eq!(kn_replay(&t, &rules).unwrap(), steps.last().unwrap().config, "{t}");
    }
}

#[test]
fn replay_rejects_a_wrong_rule() {
    let t = db("(λ 0) (λ 0)");
    assert!(matches!(replay(&t, &[Rule::Load, Rule::EvalLam]), Err(Error::Replay(_))));
}

#[test]
fn open_terms_are_rejected() {
    let t = db("λ 1");
    assert_eq!(run(&t, 10).unwrap_err(), Error::OpenTerm { open: 1 });
    assert!(kn_run(&t, 10).is_err());
    assert!(nbe_cbv(&t, 10).is_err());
}

#[test]
fn fuel_counts_transitions() {
    let t = db("λ 0 0");
    let n = run(&t, FUEL).unwrap().stats().transitions();
    assert!(run(&t, n).unwrap().normal_form().is_some());
    assert!(run(&t, n - 1).unwrap().normal_form().is_none());
}
