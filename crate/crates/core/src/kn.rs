//! KN: Crégut's strong call-by-name machine, computing normal forms by
//! normal-order reduction.

use std::fmt;

use crate::list::List;
use crate::term::{is_neutral, open_count, Term};
use crate::Error;

/// Code of a closure: a term or an abstract variable (a de Bruijn level).
#[derive(Clone, PartialEq, Eq)]
pub enum TermN {
    Term(Term),
    AbsVar(usize),
}

#[derive(Clone, PartialEq, Eq)]
pub struct KnClosure {
    pub code: TermN,
    pub env: KnEnv,
}

pub type KnEnv = List<KnClosure>;

#[derive(Clone, PartialEq, Eq)]
pub enum KnFrame {
    /// An unevaluated argument.
    ArgClosure(Term, KnEnv),
    LamBox,
    /// A neutral function whose argument is being normalized.
    StrongFun(Term),
}

pub type KnStack = List<KnFrame>;

#[derive(Clone, PartialEq, Eq)]
pub enum KnConfig {
    Eval {
        code: TermN,
        env: KnEnv,
        level: usize,
        stack: KnStack,
    },
    ContN {
        term: Term,
        level: usize,
        stack: KnStack,
    },
}

impl KnConfig {
    pub fn stack(&self) -> &KnStack {
        match self {
            KnConfig::Eval { stack, .. } | KnConfig::ContN { stack, .. } => stack,
        }
    }

    pub fn level(&self) -> usize {
        match self {
            KnConfig::Eval { level, .. } | KnConfig::ContN { level, .. } => *level,
        }
    }

    pub fn mode(&self) -> &'static str {
        match self {
            KnConfig::Eval { .. } => "eval",
            KnConfig::ContN { .. } => "cont-nf",
        }
    }
}

/// Rule numbers 1 to 10; rule 7 is the final unload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum KnRule {
    Load = 0,
    EvalApp = 1,
    Beta = 2,
    EnterLam = 3,
    VarHit = 4,
    VarSkip = 5,
    AbsVar = 6,
    Unload = 7,
    NeutralFun = 8,
    CloseLam = 9,
    NeutralApp = 10,
}

impl KnRule {
    pub const ALL: [KnRule; 11] = [
        KnRule::Load,
        KnRule::EvalApp,
        KnRule::Beta,
        KnRule::EnterLam,
        KnRule::VarHit,
        KnRule::VarSkip,
        KnRule::AbsVar,
        KnRule::Unload,
        KnRule::NeutralFun,
        KnRule::CloseLam,
        KnRule::NeutralApp,
    ];

    pub const fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<KnRule> {
        KnRule::ALL.get(n as usize).copied()
    }
}

impl fmt::Display for KnRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct KnStats {
    counts: [u64; 11],
}

impl KnStats {
    pub fn record(&mut self, rule: KnRule) {
        self.counts[rule as usize] += 1;
    }

    pub fn count(&self, rule: KnRule) -> u64 {
        self.counts[rule as usize]
    }

    /// Fired transitions; load and unload are not counted.
    pub fn transitions(&self) -> u64 {
        KnRule::ALL
            .iter()
            .filter(|r| !matches!(r, KnRule::Load | KnRule::Unload))
            .map(|r| self.count(*r))
            .sum()
    }

    /// Number of β-contractions performed.
    pub fn contractions(&self) -> u64 {
        self.count(KnRule::Beta)
    }

    pub fn iter(&self) -> impl Iterator<Item = (KnRule, u64)> + '_ {
        KnRule::ALL.iter().map(|r| (*r, self.count(*r)))
    }
}

pub enum KnStep {
    Next(KnConfig, KnRule),
    Final(Term),
    Stuck(String),
}

pub fn kn_inject(t: &Term) -> Result<KnConfig, Error> {
    match open_count(t) {
        0 => Ok(KnConfig::Eval {
            code: TermN::Term(t.clone()),
            env: List::nil(),
            level: 0,
            stack: List::nil(),
        }),
        open => Err(Error::OpenTerm { open }),
    }
}

fn stuck(msg: impl Into<String>) -> KnStep {
    KnStep::Stuck(msg.into())
}

pub fn kn_step(k: &KnConfig) -> KnStep {
    match k {
        KnConfig::Eval {
            code,
            env,
            level,
            stack,
        } => {
            let level = *level;
            let term = match code {
                // (6)
                TermN::AbsVar(n) => {
                    return match level.checked_sub(*n) {
                        Some(index) => KnStep::Next(
                            KnConfig::ContN {
                                term: Term::Var(index),
                                level,
                                stack: stack.clone(),
                            },
                            KnRule::AbsVar,
                        ),
                        None => stuck(format!("abstract variable V({n}) above level {level}")),
                    }
                }
                TermN::Term(t) => t,
            };
            match term {
                // (1)
                Term::App(t1, t2) => KnStep::Next(
                    KnConfig::Eval {
                        code: TermN::Term(t1.as_ref().clone()),
                        env: env.clone(),
                        level,
                        stack: stack.cons(KnFrame::ArgClosure(t2.as_ref().clone(), env.clone())),
                    },
                    KnRule::EvalApp,
                ),
                Term::Lam(body) => match stack.uncons() {
                    // (2)
                    Some((KnFrame::ArgClosure(arg, arg_env), rest)) => KnStep::Next(
                        KnConfig::Eval {
                            code: TermN::Term(body.as_ref().clone()),
                            env: env.cons(KnClosure {
                                code: TermN::Term(arg.clone()),
                                env: arg_env.clone(),
                            }),
                            level,
                            stack: rest.clone(),
                        },
                        KnRule::Beta,
                    ),
                    // (3)
                    _ => KnStep::Next(
                        KnConfig::Eval {
                            code: TermN::Term(body.as_ref().clone()),
                            env: env.cons(KnClosure {
                                code: TermN::AbsVar(level + 1),
                                env: List::nil(),
                            }),
                            level: level + 1,
                            stack: stack.cons(KnFrame::LamBox),
                        },
                        KnRule::EnterLam,
                    ),
                },
                Term::Var(n) => match (n, env.uncons()) {
                    // (4)
                    (0, Some((c, _))) => KnStep::Next(
                        KnConfig::Eval {
                            code: c.code.clone(),
                            env: c.env.clone(),
                            level,
                            stack: stack.clone(),
                        },
                        KnRule::VarHit,
                    ),
                    // (5)
                    (n, Some((_, rest))) => KnStep::Next(
                        KnConfig::Eval {
                            code: TermN::Term(Term::Var(n - 1)),
                            env: rest.clone(),
                            level,
                            stack: stack.clone(),
                        },
                        KnRule::VarSkip,
                    ),
                    (n, None) => stuck(format!("index {n} looked up in an empty environment")),
                },
            }
        }
        KnConfig::ContN { term, level, stack } => {
            let level = *level;
            match stack.uncons() {
                // (7)
                None if level == 0 => KnStep::Final(term.clone()),
                None => stuck(format!("empty stack at level {level}")),
                // (8)
                Some((KnFrame::ArgClosure(arg, env), rest)) => KnStep::Next(
                    KnConfig::Eval {
                        code: TermN::Term(arg.clone()),
                        env: env.clone(),
                        level,
                        stack: rest.cons(KnFrame::StrongFun(term.clone())),
                    },
                    KnRule::NeutralFun,
                ),
                // (9)
                Some((KnFrame::LamBox, rest)) => match level.checked_sub(1) {
                    Some(level) => KnStep::Next(
                        KnConfig::ContN {
                            term: Term::lam(term.clone()),
                            level,
                            stack: rest.clone(),
                        },
                        KnRule::CloseLam,
                    ),
                    None => stuck("binder closed at level 0"),
                },
                // (10)
                Some((KnFrame::StrongFun(neu), rest)) => KnStep::Next(
                    KnConfig::ContN {
                        term: Term::app(neu.clone(), term.clone()),
                        level,
                        stack: rest.clone(),
                    },
                    KnRule::NeutralApp,
                ),
            }
        }
    }
}

#[derive(Clone)]
pub enum KnOutcome {
    Normal { nf: Term, stats: KnStats },
    FuelExhausted { last: KnConfig, stats: KnStats },
}

impl KnOutcome {
    pub fn normal_form(&self) -> Option<&Term> {
        match self {
            KnOutcome::Normal { nf, .. } => Some(nf),
            KnOutcome::FuelExhausted { .. } => None,
        }
    }

    pub fn stats(&self) -> &KnStats {
        match self {
            KnOutcome::Normal { stats, .. } | KnOutcome::FuelExhausted { stats, .. } => stats,
        }
    }
}

impl fmt::Debug for KnOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnOutcome::Normal { nf, stats } => {
                write!(f, "Normal({nf:?}, {} transitions)", stats.transitions())
            }
            KnOutcome::FuelExhausted { stats, .. } => {
                write!(f, "FuelExhausted({} transitions)", stats.transitions())
            }
        }
    }
}

/// Runs the machine, calling `observe(rule, after)` for every transition.
/// Unloading does not consume fuel.
pub fn kn_drive<F>(t: &Term, fuel: u64, mut observe: F) -> Result<KnOutcome, Error>
where
    F: FnMut(KnRule, &KnConfig),
{
    let mut k = kn_inject(t)?;
    let mut stats = KnStats::default();
    let mut fuel = fuel;
    loop {
        if fuel == 0 && !matches!(&k, KnConfig::ContN { level: 0, stack, .. } if stack.is_empty()) {
            return Ok(KnOutcome::FuelExhausted { last: k, stats });
        }
        match kn_step(&k) {
            KnStep::Next(next, rule) => {
                fuel -= 1;
                stats.record(rule);
                observe(rule, &next);
                k = next;
            }
            KnStep::Final(nf) => return Ok(KnOutcome::Normal { nf, stats }),
            KnStep::Stuck(msg) => return Err(Error::Stuck(msg)),
        }
    }
}

pub fn kn_run(t: &Term, fuel: u64) -> Result<KnOutcome, Error> {
    kn_drive(t, fuel, |_, _| {})
}

#[derive(Clone, Debug)]
pub struct KnTraceStep {
    pub config: KnConfig,
    pub rule: KnRule,
}

/// The loaded configuration (tagged with rule 0) followed by the
/// configuration reached by every transition.
pub fn kn_trace(t: &Term, fuel: u64) -> Result<(Vec<KnTraceStep>, KnOutcome), Error> {
    let mut steps = vec![KnTraceStep {
        config: kn_inject(t)?,
        rule: KnRule::Load,
    }];
    let outcome = kn_drive(t, fuel, |rule, next| {
        steps.push(KnTraceStep {
            config: next.clone(),
            rule,
        })
    })?;
    Ok((steps, outcome))
}

pub fn kn_replay(t: &Term, rules: &[KnRule]) -> Result<KnConfig, Error> {
    let mut k = kn_inject(t)?;
    for (i, expected) in rules.iter().filter(|r| **r != KnRule::Load).enumerate() {
        match kn_step(&k) {
            KnStep::Next(next, rule) if rule == *expected => k = next,
            KnStep::Next(_, rule) => {
                return Err(Error::Replay(format!(
                    "transition {i}: expected rule {expected}, machine fired {rule}"
                )))
            }
            KnStep::Final(_) => {
                return Err(Error::Replay(format!(
                    "transition {i}: machine already finished"
                )))
            }
            KnStep::Stuck(msg) => return Err(Error::Stuck(msg)),
        }
    }
    Ok(k)
}

pub fn kn_lam_count(stack: &KnStack) -> usize {
    stack.iter().filter(|f| matches!(f, KnFrame::LamBox)).count()
}

/// Membership in the stack grammar of reachable configurations:
///
/// ```text
/// S1 ::= (T,E) :: S1 | S2
/// S2 ::= • | λ□ :: S2 | neu◦ :: S1
/// ```
///
/// `Eval` configurations take S1 stacks, `ContN` configurations with a
/// neutral term take S1 stacks and other normal forms take S2 stacks.
pub fn kn_is_wellformed(k: &KnConfig) -> bool {
    // Reading top-down, `in_s1` is true while argument frames are allowed.
    fn derives(stack: &KnStack, mut in_s1: bool) -> bool {
        for frame in stack {
            in_s1 = match frame {
                KnFrame::ArgClosure(..) if in_s1 => true,
                KnFrame::ArgClosure(..) => return false,
                KnFrame::LamBox => false,
                KnFrame::StrongFun(neu) if is_neutral(neu) => true,
                KnFrame::StrongFun(_) => return false,
            };
        }
        true
    }
    let levels_match = k.level() == kn_lam_count(k.stack());
    levels_match
        && match k {
            KnConfig::Eval { .. } => derives(k.stack(), true),
            KnConfig::ContN { term, stack, .. } => {
                crate::term::is_normal(term) && derives(stack, is_neutral(term))
            }
        }
}

impl fmt::Debug for TermN {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TermN::Term(t) => write!(f, "{t:?}"),
            TermN::AbsVar(n) => write!(f, "V({n})"),
        }
    }
}

impl fmt::Debug for KnClosure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}, {:?})", self.code, self.env)
    }
}

impl fmt::Debug for KnFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnFrame::ArgClosure(t, e) => write!(f, "({t:?}, {e:?})"),
            KnFrame::LamBox => f.write_str("λ□"),
            KnFrame::StrongFun(neu) => write!(f, "{neu:?}◦"),
        }
    }
}

impl fmt::Debug for KnConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KnConfig::Eval {
                code,
                env,
                level,
                stack,
            } => write!(f, "⟨{code:?}, {env:?}, {level}, {stack:?}⟩"),
            KnConfig::ContN { term, level, stack } => {
                write!(f, "⟨{term:?}, {level}, {stack:?}⟩")
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::{parse, Notation};

    fn db(s: &str) -> Term {
        parse(s, Notation::DeBruijn).unwrap()
    }

    #[test]
    fn inject_examples() {
        let i = db("λ 0");
        assert_eq!(
            kn_inject(&i),
            Ok(KnConfig::Eval {
                code: TermN::Term(i.clone()),
                env: List::nil(),
                level: 0,
                stack: List::nil()
            })
        );
        assert!(kn_inject(&db("λ 0 0")).is_ok());
        assert_eq!(kn_inject(&Term::var(1)), Err(Error::OpenTerm { open: 2 }));
    }

    #[test]
    fn rule_one_pushes_the_argument() {
        let (t1, t2) = (db("λ 0"), db("λ λ 1"));
        let k = KnConfig::Eval {
            code: TermN::Term(Term::app(t1.clone(), t2.clone())),
            env: List::nil(),
            level: 0,
            stack: List::nil(),
        };
        match kn_step(&k) {
            KnStep::Next(next, KnRule::EvalApp) => assert_eq!(
                next,
                KnConfig::Eval {
                    code: TermN::Term(t1),
                    env: List::nil(),
                    level: 0,
                    stack: List::nil().cons(KnFrame::ArgClosure(t2, List::nil())),
                }
            ),
            _ => panic!("expected rule 1"),
        }
    }

    #[test]
    fn rule_six_reads_back_abstract_variables() {
        let stack = List::nil().cons(KnFrame::LamBox).cons(KnFrame::LamBox);
        let k = KnConfig::Eval {
            code: TermN::AbsVar(1),
            env: List::nil(),
            level: 2,
            stack: stack.clone(),
        };
        match kn_step(&k) {
            KnStep::Next(next, KnRule::AbsVar) => assert_eq!(
                next,
                KnConfig::ContN {
                    term: Term::var(1),
                    level: 2,
                    stack
                }
            ),
            _ => panic!("expected rule 6"),
        }
    }

    #[test]
    fn unload() {
        let k = KnConfig::ContN {
            term: db("λ 0"),
            level: 0,
            stack: List::nil(),
        };
        assert!(matches!(kn_step(&k), KnStep::Final(t) if t == db("λ 0")));
    }

    #[test]
    fn normal_order_results() {
        let k = "(λ λ 1)";
        let i = "(λ 0)";
        let omega = "((λ 0 0) (λ 0 0))";
        let t = db(&format!("λ {k} {i} {omega}"));
        let out = kn_run(&t, 1000).unwrap();
        assert_eq!(out.normal_form(), Some(&db("λ λ 0")));
        assert!(kn_run(&db(omega), 1000).unwrap().normal_form().is_none());
        let four = kn_run(&Term::app(crate::church(2), crate::church(2)), 1000).unwrap();
        assert_eq!(four.normal_form(), Some(&crate::church(4)));
    }

    #[test]
    fn identity_rule_sequence() {
        let (steps, out) = kn_trace(&db("λ 0"), 100).unwrap();
        let rules: Vec<u8> = steps.iter().map(|s| s.rule.number()).collect();
        assert_eq!(rules, vec![0, 3, 4, 6, 9]);
        assert_eq!(out.stats().transitions(), 4);
        for s in &steps {
            assert!(kn_is_wellformed(&s.config), "{:?}", s.config);
        }
    }

    #[test]
    fn traces_are_wellformed_and_replayable() {
        let t = db("λ (λ λ 1) (λ 0) (0 (λ 0))");
        let (steps, out) = kn_trace(&t, 1000).unwrap();
        assert_eq!(out.normal_form(), Some(&db("λ λ 0")));
        for s in &steps {
            assert!(kn_is_wellformed(&s.config), "{:?}", s.config);
        }
        let rules: Vec<KnRule> = steps.iter().map(|s| s.rule).collect();
        assert_eq!(kn_replay(&t, &rules).unwrap(), steps.last().unwrap().config);
    }

    #[test]
    fn fuel() {
        assert!(kn_run(&db("λ 0"), 3).unwrap().normal_form().is_none());
        assert!(kn_run(&db("λ 0"), 4).unwrap().normal_form().is_some());
    }
}
