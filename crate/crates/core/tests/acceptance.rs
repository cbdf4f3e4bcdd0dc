//! Acceptance suite. Prints one line per criterion and exits with a failure
//! status if any criterion fails.

mod common;

use std::cmp::Ordering;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use lamvm::audit::Auditor;
use lamvm::convert::{convertible, Verdict};
use lamvm::corpus;
use lamvm::decode::{decode_config, rlex_less, AnnDecomposition, AnnFrame, AnnTerm};
use lamvm::kn::kn_run;
use lamvm::knv::{self, Config, Frame, Inert, Rule, RunOutcome, Wnf};
use lamvm::list::List;
use lamvm::nbe::{nbe_cbn, nbe_cbv};
use lamvm::oracle::{
    enumerate_f_decompositions, enumerate_r_decompositions, normalize_normal_order,
    normalize_rrcbv, step_rrcbv, Normalized,
};
use lamvm::term::{beta_contract, is_normal, is_weak_normal};
use lamvm::{parse, print, Notation, Term};
use rand::Rng;

const CORPUS_SEED: u64 = 1;
const CORPUS_SIZE: usize = 10_000;
const MAX_TERM_SIZE: usize = 40;
const FUEL: u64 = 100_000;
/// Rule-6 firings per term that are also checked on fully decoded terms.
const GLOBAL_BUDGET: u64 = 200_000;
/// Contractions the oracle replays on runs that ran out of fuel.
const EXHAUSTED_REPLAY: u64 = 200;
/// Oracle replays give up once the term grows beyond this.
const ORACLE_SIZE_CAP: usize = 100_000;
const NBE_BUDGET: u64 = 50_000_000;
const CONVERT_PAIRS: usize = 1_000;
const CONVERT_FUEL: u64 = 1_000_000;
const EXHAUSTIVE_SIZE: usize = 9;
const SUBST_SIZE: usize = 8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn db(s: &str) -> Term {
    parse(s, Notation::DeBruijn).unwrap()
}

fn named(s: &str) -> Term {
    parse(s, Notation::Named).unwrap()
}

fn abs_var(n: usize) -> Wnf {
    Wnf::Inert(Inert::AbsVar(n))
}

// 1 -------------------------------------------------------------------------

fn worked_example() -> Outcome {
    let t = db("λ 0 0");
    let trace = knv::trace(&t, 1000).unwrap();
    let stack = |frames: Vec<Frame>| List::from_vec(frames);
    let expected_configs = [
        Config::ContW {
            wnf: abs_var(1),
            stack: stack(vec![Frame::ArgWnf(abs_var(1)), Frame::LamBox]),
            level: 1,
        },
        Config::ContW {
            wnf: Wnf::Inert(Inert::App(Inert::AbsVar(1).into(), abs_var(1).into())),
            stack: stack(vec![Frame::LamBox]),
            level: 1,
        },
        Config::ContW {
            wnf: abs_var(1),
            stack: stack(vec![Frame::StrongFun(Inert::AbsVar(1)), Frame::LamBox]),
            level: 1,
        },
        Config::ContN {
            term: Term::var(0),
            level: 1,
            stack: stack(vec![Frame::StrongFun(Inert::AbsVar(1)), Frame::LamBox]),
        },
        Config::ContW {
            wnf: abs_var(1),
            stack: stack(vec![Frame::StrongArg(Term::var(0)), Frame::LamBox]),
            level: 1,
        },
    ];
    let rules = [Rule::InertApp, Rule::InertArg, Rule::AbsVar, Rule::StrongArg];
    let found = trace.steps.windows(5).position(|w| {
        w.iter().map(|s| &s.config).eq(expected_configs.iter())
            && w[1..].iter().map(|s| s.rule).eq(rules.iter().copied())
    });
    let Some(start) = found else {
        return outcome(false, "fragment not found in the trace of λ(0 0)".into());
    };

    let v0 = Term::var(0);
    let w = |t: &Term| AnnTerm::StrongW(t.clone());
    let decomposition = |head: AnnTerm, frames: Vec<AnnFrame>| AnnDecomposition { head, frames };
    let chain = [
        decomposition(w(&v0), vec![AnnFrame::FrApp(v0.clone()), AnnFrame::LamBox]),
        decomposition(w(&Term::app(v0.clone(), v0.clone())), vec![AnnFrame::LamBox]),
        decomposition(w(&v0), vec![AnnFrame::FlStrongAnn(v0.clone()), AnnFrame::LamBox]),
        decomposition(
            AnnTerm::StrongN(v0.clone()),
            vec![AnnFrame::FlStrongAnn(v0.clone()), AnnFrame::LamBox],
        ),
        decomposition(w(&v0), vec![AnnFrame::FrStrongAnn(v0.clone()), AnnFrame::LamBox]),
    ];
    let decoded: Vec<AnnDecomposition> = trace.steps[start..start + 5]
        .iter()
        .map(|s| decode_config(&s.config).unwrap())
        .collect();
    let exact = decoded == chain;
    let increasing = decoded.windows(2).all(|p| rlex_less(&p[0], &p[1]));
    outcome(
        exact && increasing,
        format!(
            "fragment at transition {start}, decoded chain exact={exact}, strictly increasing={increasing}"
        ),
    )
}

// 2 -------------------------------------------------------------------------

fn example_one() -> Outcome {
    let lam_i = db("λ λ 0");
    let t1 = named(r"\a. (\x.\y.x) (\x.x) (\b. (\x. x x) (\x. x x))");
    let t2 = named(r"\a. (\x.\y.x) (\x.x) ((\x. x x) (\x. x x))");
    let run1 = knv::run(&t1, FUEL).unwrap();
    let oracle1 = normalize_rrcbv(&t1, 100);
    let first = run1.normal_form() == Some(&lam_i)
        && run1.stats().contractions() == 2
        && oracle1 == Normalized::Normal { nf: lam_i.clone(), steps: 2 };
    let run2 = knv::run(&t2, FUEL).unwrap();
    let kn2 = kn_run(&t2, FUEL).unwrap();
    let no2 = normalize_normal_order(&t2, 1000);
    let second = run2.normal_form().is_none()
        && run2.stats().transitions() == FUEL
        && kn2.normal_form() == Some(&lam_i)
        && no2.normal_form() == Some(&lam_i);
    outcome(
        first && second,
        format!(
            "λ(K I (λΩ)): {:?} with {} rule-6 firings, oracle {} steps; λ(K I Ω): KNV {:?}, KN {:?}, normal order {:?}",
            run1,
            run1.stats().contractions(),
            oracle1.steps(),
            run2,
            kn2.normal_form(),
            no2.normal_form(),
        ),
    )
}

// 3, 4, 5, 7 ----------------------------------------------------------------

#[derive(Default)]
struct CorpusTally {
    terms: usize,
    transitions: u64,
    terminated: usize,
    // 3
    nf_mismatch: Vec<String>,
    replay_inconclusive: usize,
    // 4
    invariant_violations: Vec<String>,
    // 5
    plug_violations: u64,
    literal_equal_violations: [u64; 2],
    increase_violations: u64,
    contraction_violations: u64,
    contractions: u64,
    globally_checked: u64,
    corrected_violations: u64,
    // 7
    nbe_cbv_mismatch: Vec<String>,
    nbe_cbn_mismatch: Vec<String>,
    kn_terminated: usize,
    nbe_time: Duration,
    audit_time: Duration,
    oracle_time: Duration,
}

/// Iterates the oracle at most `steps` times. Returns the number of steps
/// taken if it reaches a normal form, and whether the size cap stopped it.
fn oracle_prefix(t: &Term, steps: u64) -> (Option<u64>, bool) {
    let mut current = t.clone();
    for taken in 0..steps {
        match step_rrcbv(&current) {
            None => return (Some(taken), false),
            Some(next) => current = next,
        }
        if current.size() > ORACLE_SIZE_CAP {
            return (None, true);
        }
    }
    (None, false)
}

fn audit_term(t: &Term, tally: &mut CorpusTally) -> RunOutcome {
    let start = Instant::now();
    let mut auditor = match Auditor::new(&knv::inject(t).unwrap()) {
        Ok(a) => Some(a.with_global_budget(GLOBAL_BUDGET)),
        Err(v) => {
            tally.invariant_violations.push(format!("{t}: initial configuration: {v}"));
            None
        }
    };
    let out = knv::drive(t, FUEL, |before, rule, after| {
        let Some(a) = auditor.as_mut() else { return };
        let check = match a.observe(before, rule, after) {
            Ok(c) => c,
            Err(v) => {
                tally.invariant_violations.push(format!("{t}: after rule {rule}: {v}"));
                auditor = None;
                return;
            }
        };
        match rule {
            Rule::Beta => {
                tally.contractions += 1;
                tally.globally_checked += u64::from(check.global);
                if check.contraction != Some(true) {
                    tally.contraction_violations += 1;
                }
            }
            _ => {
                if !check.plug_preserved {
                    tally.plug_violations += 1;
                }
                let literal = match rule {
                    Rule::VarHit | Rule::VarSkip => check.order == Some(Ordering::Equal),
                    _ => check.order == Some(Ordering::Less),
                };
                if !literal {
                    match rule {
                        Rule::VarHit => tally.literal_equal_violations[0] += 1,
                        Rule::VarSkip => tally.literal_equal_violations[1] += 1,
                        _ => tally.increase_violations += 1,
                    }
                }
                let corrected = match rule {
                    Rule::VarSkip => check.order == Some(Ordering::Equal),
                    _ => check.order == Some(Ordering::Less),
                };
                if !corrected {
                    tally.corrected_violations += 1;
                }
            }
        }
    })
    .unwrap();
    tally.audit_time += start.elapsed();
    out
}

fn corpus_pass(terms: &[Term]) -> (CorpusTally, Vec<(Term, Term)>) {
    let mut tally = CorpusTally::default();
    let mut normal = Vec::new();
    for t in terms {
        tally.terms += 1;
        let out = audit_term(t, &mut tally);
        let stats = *out.stats();
        tally.transitions += stats.transitions();
        let c = stats.contractions();

        let start = Instant::now();
        match out.normal_form() {
            Some(nf) => {
                tally.terminated += 1;
                let oracle = normalize_rrcbv(t, c + 1);
                if oracle != (Normalized::Normal { nf: nf.clone(), steps: c }) {
                    tally.nf_mismatch.push(format!(
                        "{t}: machine {nf} after {c} contractions, oracle {oracle:?}"
                    ));
                }
            }
            None => match oracle_prefix(t, c.min(EXHAUSTED_REPLAY)) {
                (Some(steps), _) => tally.nf_mismatch.push(format!(
                    "{t}: machine ran out of fuel but the oracle finished in {steps} steps"
                )),
                (None, capped) => tally.replay_inconclusive += usize::from(capped),
            },
        }
        tally.oracle_time += start.elapsed();

        let start = Instant::now();
        if let Some(nf) = out.normal_form() {
            match nbe_cbv(t, NBE_BUDGET).unwrap().normal_form() {
                Some(n) if n == nf => {}
                other => tally
                    .nbe_cbv_mismatch
                    .push(format!("{t}: machine {nf}, nbe_cbv {other:?}")),
            }
            normal.push((t.clone(), nf.clone()));
        }
        if let Some(nf) = kn_run(t, FUEL).unwrap().normal_form() {
            tally.kn_terminated += 1;
            match nbe_cbn(t, NBE_BUDGET).unwrap().normal_form() {
                Some(n) if n == nf => {}
                other => tally
                    .nbe_cbn_mismatch
                    .push(format!("{t}: kn {nf}, nbe_cbn {other:?}")),
            }
        }
        tally.nbe_time += start.elapsed();
    }
    (tally, normal)
}

fn first(list: &[String]) -> String {
    list.first().map_or(String::new(), |s| format!("; first: {s}"))
}

fn differential(tally: &CorpusTally, church_ok: bool) -> Outcome {
    outcome(
        tally.nf_mismatch.is_empty() && church_ok,
        format!(
            "{} terms, {} terminated within fuel {FUEL}, {} normal-form or contraction-count mismatches, \
             church numerals denoted correctly={church_ok}, {} out-of-fuel replays stopped by the size cap{}",
            tally.terms,
            tally.terminated,
            tally.nf_mismatch.len(),
            tally.replay_inconclusive,
            first(&tally.nf_mismatch),
        ),
    )
}

fn invariants(tally: &CorpusTally) -> Outcome {
    outcome(
        tally.invariant_violations.is_empty(),
        format!(
            "{} configurations checked (well-formedness, level = λ□ count, five closedness rows), {} violations{}",
            tally.transitions + tally.terms as u64,
            tally.invariant_violations.len(),
            first(&tally.invariant_violations),
        ),
    )
}

fn plug_and_increase(tally: &CorpusTally) -> Outcome {
    let [hit, skip] = tally.literal_equal_violations;
    let pass = tally.plug_violations == 0
        && hit == 0
        && skip == 0
        && tally.increase_violations == 0
        && tally.contraction_violations == 0;
    outcome(
        pass,
        format!(
            "{} transitions: plug changed by a non-6 rule {}, decoding changed by rule 3 {hit} and by rule 4 {skip}, \
             other non-6 rules not strictly increasing {}, rule-6 steps not one rrCbV step {} of {} ({} also checked on fully decoded terms); \
             reading rule 3 as strictly increasing: {} violations",
            tally.transitions,
            tally.plug_violations,
            tally.increase_violations,
            tally.contraction_violations,
            tally.contractions,
            tally.globally_checked,
            tally.corrected_violations,
        ),
    )
}

fn nbe_endpoints(tally: &CorpusTally) -> Outcome {
    outcome(
        tally.nbe_cbv_mismatch.is_empty() && tally.nbe_cbn_mismatch.is_empty(),
        format!(
            "nbe_cbv vs KNV on {} terms: {} mismatches; nbe_cbn vs KN on {} terms: {} mismatches{}{}",
            tally.terminated,
            tally.nbe_cbv_mismatch.len(),
            tally.kn_terminated,
            tally.nbe_cbn_mismatch.len(),
            first(&tally.nbe_cbv_mismatch),
            first(&tally.nbe_cbn_mismatch),
        ),
    )
}

// 6 -------------------------------------------------------------------------

fn determinism(random: &[Term]) -> Outcome {
    let exhaustive = corpus::closed_terms_up_to(EXHAUSTIVE_SIZE);
    let mut bad = Vec::new();
    for t in exhaustive.iter().chain(random) {
        let r = enumerate_r_decompositions(t).len();
        let f = enumerate_f_decompositions(t).len();
        if r > 1 || (r == 0) != is_normal(t) {
            bad.push(format!("{t}: {r} R-decompositions"));
        }
        if f > 1 || (f == 0) != is_weak_normal(t) {
            bad.push(format!("{t}: {f} F-decompositions"));
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} closed terms up to size {EXHAUSTIVE_SIZE} and {} random terms, {} violations{}",
            exhaustive.len(),
            random.len(),
            bad.len(),
            first(&bad),
        ),
    )
}

// 8 -------------------------------------------------------------------------

fn convertibility(normal: &[(Term, Term)]) -> Outcome {
    let t1 = named(r"\x.\y.((\z. z z)(\z. z z))");
    let t2 = named(r"\x.(x (\y.((\z. z z)(\z. z z)))) x");
    let prefix_pair = matches!(
        convertible(&t1, &t2, 1000).unwrap(),
        Verdict::NotConvertible { .. }
    );

    let mut rng = common::rng(2);
    let mut pairs = Vec::new();
    while pairs.len() < CONVERT_PAIRS {
        let (t, _) = &normal[rng.random_range(0..normal.len())];
        if pairs.len() % 2 == 0 {
            // A term and one of its rrCbV reducts.
            let mut u = t.clone();
            for _ in 0..rng.random_range(1..=5) {
                match step_rrcbv(&u) {
                    Some(next) => u = next,
                    None => break,
                }
            }
            pairs.push((t.clone(), u));
        } else {
            let (u, _) = &normal[rng.random_range(0..normal.len())];
            pairs.push((t.clone(), u.clone()));
        }
    }
    let (mut false_accept, mut false_reject, mut unknown, mut convertible_pairs) = (0, 0, 0, 0);
    for (a, b) in &pairs {
        let truth = normalize_rrcbv(a, FUEL).normal_form() == normalize_rrcbv(b, FUEL).normal_form();
        convertible_pairs += usize::from(truth);
        match convertible(a, b, CONVERT_FUEL).unwrap() {
            Verdict::Convertible if !truth => false_accept += 1,
            Verdict::NotConvertible { .. } if truth => false_reject += 1,
            Verdict::Unknown { .. } => unknown += 1,
            _ => {}
        }
    }
    outcome(
        prefix_pair && false_accept == 0 && false_reject == 0 && unknown == 0,
        format!(
            "λ-prefix pair NotConvertible within fuel 1000={prefix_pair}; {} pairs ({convertible_pairs} convertible): \
             {false_accept} false acceptances, {false_reject} false rejections, {unknown} unknown",
            pairs.len()
        ),
    )
}

// 9 -------------------------------------------------------------------------

fn size_explosion() -> Outcome {
    let start = Instant::now();
    let mut sizes = Vec::new();
    let mut transitions = Vec::new();
    for n in 2..=8 {
        let out = knv::run(&corpus::size_explosion(n), u64::MAX).unwrap();
        let Some(nf) = out.normal_form() else {
            return outcome(false, format!("e_{n} did not terminate"));
        };
        sizes.push(nf.size());
        transitions.push(out.stats().transitions());
    }
    let elapsed = start.elapsed();
    let doubling = sizes.windows(2).all(|w| w[1] as f64 >= 1.8 * w[0] as f64);
    let steps: Vec<u64> = transitions.windows(2).map(|w| w[1] - w[0]).collect();
    let superlinear = steps.windows(2).all(|w| w[1] > w[0]);
    let fast = elapsed < Duration::from_secs(30);
    outcome(
        doubling && superlinear && fast,
        format!(
            "nf sizes {sizes:?}, transitions {transitions:?}, ratio ≥ 1.8={doubling}, increments growing={superlinear}, {:.2}s < 30s={fast}",
            elapsed.as_secs_f64()
        ),
    )
}

// 10 ------------------------------------------------------------------------

/// Terms with names, for substitution by renaming.
#[derive(Clone, Debug, PartialEq)]
enum Named {
    Var(String),
    Lam(String, Box<Named>),
    App(Box<Named>, Box<Named>),
}

fn to_named(t: &Term, scope: &mut Vec<String>, fresh: &mut usize) -> Named {
    match t {
        Term::Var(n) => Named::Var(scope[scope.len() - 1 - n].clone()),
        Term::Lam(b) => {
            *fresh += 1;
            let x = format!("v{fresh}");
            scope.push(x.clone());
            let body = to_named(b, scope, fresh);
            scope.pop();
            Named::Lam(x, Box::new(body))
        }
        Term::App(f, a) => Named::App(
            Box::new(to_named(f, scope, fresh)),
            Box::new(to_named(a, scope, fresh)),
        ),
    }
}

fn from_named(t: &Named, scope: &mut Vec<String>) -> Term {
    match t {
        Named::Var(x) => {
            let pos = scope.iter().rposition(|y| y == x).expect("bound variable");
            Term::var(scope.len() - 1 - pos)
        }
        Named::Lam(x, b) => {
            scope.push(x.clone());
            let body = from_named(b, scope);
            scope.pop();
            Term::lam(body)
        }
        Named::App(f, a) => Term::app(from_named(f, scope), from_named(a, scope)),
    }
}

fn free_in(x: &str, t: &Named) -> bool {
    match t {
        Named::Var(y) => x == y,
        Named::Lam(y, b) => x != y && free_in(x, b),
        Named::App(f, a) => free_in(x, f) || free_in(x, a),
    }
}

/// `t[x := s]`, renaming binders that would capture a free variable of `s`.
fn substitute(t: &Named, x: &str, s: &Named, fresh: &mut usize) -> Named {
    match t {
        Named::Var(y) if y == x => s.clone(),
        Named::Var(_) => t.clone(),
        Named::App(f, a) => Named::App(
            Box::new(substitute(f, x, s, fresh)),
            Box::new(substitute(a, x, s, fresh)),
        ),
        Named::Lam(y, _) if y == x => t.clone(),
        Named::Lam(y, b) if free_in(y, s) => {
            *fresh += 1;
            let z = format!("r{fresh}");
            let renamed = substitute(b, y, &Named::Var(z.clone()), fresh);
            Named::Lam(z, Box::new(substitute(&renamed, x, s, fresh)))
        }
        Named::Lam(y, b) => Named::Lam(y.clone(), Box::new(substitute(b, x, s, fresh))),
    }
}

/// Paths to every β-redex, as child choices (0 = body or function, 1 = argument).
fn redex_paths(t: &Term, path: &mut Vec<u8>, out: &mut Vec<Vec<u8>>) {
    match t {
        Term::Var(_) => {}
        Term::Lam(b) => {
            path.push(0);
            redex_paths(b, path, out);
            path.pop();
        }
        Term::App(f, a) => {
            if matches!(**f, Term::Lam(_)) {
                out.push(path.clone());
            }
            path.push(0);
            redex_paths(f, path, out);
            path.pop();
            path.push(1);
            redex_paths(a, path, out);
            path.pop();
        }
    }
}

fn contract_db(t: &Term, path: &[u8]) -> Term {
    match (t, path) {
        (_, []) => beta_contract(t).expect("redex"),
        (Term::Lam(b), [0, rest @ ..]) => Term::lam(contract_db(b, rest)),
        (Term::App(f, a), [0, rest @ ..]) => Term::app(contract_db(f, rest), (**a).clone()),
        (Term::App(f, a), [1, rest @ ..]) => Term::app((**f).clone(), contract_db(a, rest)),
        _ => unreachable!(),
    }
}

fn contract_named(t: &Named, path: &[u8], fresh: &mut usize) -> Named {
    match (t, path) {
        (Named::App(f, a), []) => match &**f {
            Named::Lam(x, b) => substitute(b, x, a, fresh),
            _ => unreachable!(),
        },
        (Named::Lam(x, b), [0, rest @ ..]) => {
            Named::Lam(x.clone(), Box::new(contract_named(b, rest, fresh)))
        }
        (Named::App(f, a), [0, rest @ ..]) => {
            Named::App(Box::new(contract_named(f, rest, fresh)), a.clone())
        }
        (Named::App(f, a), [1, rest @ ..]) => {
            Named::App(f.clone(), Box::new(contract_named(a, rest, fresh)))
        }
        _ => unreachable!(),
    }
}

fn substitution() -> Outcome {
    let terms = corpus::closed_terms_up_to(SUBST_SIZE);
    let (mut redexes, mut bad) = (0, Vec::new());
    for t in &terms {
        let round = parse(&print(t, Notation::Named), Notation::Named);
        if round.as_ref() != Ok(t) {
            bad.push(format!("{t}: named round trip gave {round:?}"));
            continue;
        }
        let mut fresh = 0;
        let n = to_named(t, &mut Vec::new(), &mut fresh);
        let mut paths = Vec::new();
        redex_paths(t, &mut Vec::new(), &mut paths);
        for path in paths {
            redexes += 1;
            let expected = from_named(&contract_named(&n, &path, &mut fresh), &mut Vec::new());
            let got = contract_db(t, &path);
            if got != expected {
                bad.push(format!("{t} at {path:?}: {got} but renaming gives {expected}"));
            }
        }
    }
    outcome(
        bad.is_empty(),
        format!(
            "{} closed terms up to size {SUBST_SIZE}, {redexes} redex positions, {} disagreements{}",
            terms.len(),
            bad.len(),
            first(&bad),
        ),
    )
}

// ---------------------------------------------------------------------------

fn report(number: usize, name: &str, elapsed: Duration, o: &Outcome) {
    println!(
        "criterion {number:>2} [{}] {name} ({:.1}s): {}",
        if o.pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        o.detail
    );
}

fn timed(f: impl FnOnce() -> Outcome) -> (Outcome, Duration) {
    let start = Instant::now();
    let o = f();
    (o, start.elapsed())
}

fn main() -> ExitCode {
    let mut results = Vec::new();
    let mut record = |number: usize, name: &str, (o, elapsed): (Outcome, Duration)| {
        report(number, name, elapsed, &o);
        results.push(o.pass);
    };

    record(1, "worked example", timed(worked_example));
    record(2, "example 1", timed(example_one));

    let random = common::random_corpus(CORPUS_SEED, CORPUS_SIZE, MAX_TERM_SIZE);
    let church = corpus::church_arithmetic();
    let mut terms = random.clone();
    terms.extend(church.iter().map(|(t, _)| t.clone()));
    let start = Instant::now();
    let (tally, normal) = corpus_pass(&terms);
    let pass_time = start.elapsed();
    let church_ok = church.iter().all(|(t, n)| {
        normal
            .iter()
            .any(|(u, nf)| u == t && *nf == lamvm::church(*n))
    });
    eprintln!(
        "corpus pass {:.1}s: audit {:.1}s, oracle {:.1}s, nbe and kn {:.1}s",
        pass_time.as_secs_f64(),
        tally.audit_time.as_secs_f64(),
        tally.oracle_time.as_secs_f64(),
        tally.nbe_time.as_secs_f64(),
    );
    let audit_share = tally.audit_time;
    record(3, "differential", (differential(&tally, church_ok), pass_time - audit_share - tally.nbe_time));
    record(4, "invariants", (invariants(&tally), audit_share));
    record(5, "plug and increase", (plug_and_increase(&tally), audit_share));
    record(6, "determinism", timed(|| determinism(&random)));
    record(7, "nbe endpoints", (nbe_endpoints(&tally), tally.nbe_time));
    record(8, "convertibility", timed(|| convertibility(&normal)));
    record(9, "size explosion", timed(size_explosion));
    record(10, "substitution", timed(substitution));

    let failed = results.iter().filter(|p| !**p).count();
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
