//! KNV: the strong right-to-left call-by-value machine.
//!
//! Configurations come in three modes. `Eval` evaluates a term in an
//! environment to a weak normal form, `ContW` continues with a computed weak
//! normal form and `ContN` continues with a computed normal form. Rule numbers
//! follow the machine's transition table (0 = load, 11 = unload).
//!
//! All structures are persistent, so every transition is constant time and a
//! configuration can be kept around after the machine has moved on.

use std::fmt;
use std::sync::Arc;

use crate::list::List;
use crate::term::{open_count, Partial, Term};
use crate::Error;

/// Machine representation of a weak normal form.
#[derive(Clone, PartialEq, Eq)]
pub enum Wnf {
    /// The closure `(λ body, env)`.
    Clo { body: Term, env: Env },
    Inert(Inert),
}

/// Machine representation of an inert term. Abstract variables carry de
/// Bruijn levels, counted from 1 at the outermost binder.
#[derive(Clone, PartialEq, Eq)]
pub enum Inert {
    AbsVar(usize),
    App(Arc<Inert>, Arc<Wnf>),
}

pub type Env = List<Wnf>;

#[derive(Clone, PartialEq, Eq)]
pub enum Frame {
    /// A function term still to be evaluated once the argument is a wnf.
    PendingFun(Term, Env),
    /// An evaluated argument waiting for the function.
    ArgWnf(Wnf),
    /// A normalized argument of an inert term whose head is being normalized.
    StrongArg(Term),
    LamBox,
    /// An inert head whose argument is being normalized.
    StrongFun(Inert),
}

pub type Stack = List<Frame>;

/// Machine configuration. `level` is always the number of `LamBox` frames in
/// `stack` for reachable configurations.
#[derive(Clone, PartialEq, Eq)]
pub enum Config {
    Eval {
        term: Term,
        env: Env,
        stack: Stack,
        level: usize,
    },
    ContW {
        wnf: Wnf,
        stack: Stack,
        level: usize,
    },
    ContN {
        term: Term,
        level: usize,
        stack: Stack,
    },
}

impl Config {
    pub fn stack(&self) -> &Stack {
        match self {
            Config::Eval { stack, .. } | Config::ContW { stack, .. } | Config::ContN { stack, .. } => {
                stack
            }
        }
    }

    pub fn level(&self) -> usize {
        match self {
            Config::Eval { level, .. } | Config::ContW { level, .. } | Config::ContN { level, .. } => {
                *level
            }
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Config::Eval { .. } => Mode::Eval,
            Config::ContW { .. } => Mode::ContW,
            Config::ContN { .. } => Mode::ContN,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Mode {
    Eval,
    ContW,
    ContN,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Eval => "eval",
            Mode::ContW => "cont-wnf",
            Mode::ContN => "cont-nf",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Transition rules, numbered as in the machine's transition table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
#[repr(u8)]
pub enum Rule {
    Load = 0,
    EvalApp = 1,
    EvalLam = 2,
    VarHit = 3,
    VarSkip = 4,
    EvalFun = 5,
    Beta = 6,
    InertApp = 7,
    EnterLam = 8,
    InertArg = 9,
    AbsVar = 10,
    Unload = 11,
    CloseLam = 12,
    StrongArg = 13,
    NeutralApp = 14,
}

impl Rule {
    pub const ALL: [Rule; 15] = [
        Rule::Load,
        Rule::EvalApp,
        Rule::EvalLam,
        Rule::VarHit,
        Rule::VarSkip,
        Rule::EvalFun,
        Rule::Beta,
        Rule::InertApp,
        Rule::EnterLam,
        Rule::InertArg,
        Rule::AbsVar,
        Rule::Unload,
        Rule::CloseLam,
        Rule::StrongArg,
        Rule::NeutralApp,
    ];

    pub const fn number(self) -> u8 {
        self as u8
    }

    pub fn from_number(n: u8) -> Option<Rule> {
        Rule::ALL.get(n as usize).copied()
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// Per-rule transition counts.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RuleStats {
    counts: [u64; 15],
}

impl RuleStats {
    pub fn record(&mut self, rule: Rule) {
        self.counts[rule as usize] += 1;
    }

    pub fn count(&self, rule: Rule) -> u64 {
        self.counts[rule as usize]
    }

    /// Fired transitions; load and unload are not counted.
    pub fn transitions(&self) -> u64 {
        Rule::ALL
            .iter()
            .filter(|r| !matches!(r, Rule::Load | Rule::Unload))
            .map(|r| self.count(*r))
            .sum()
    }

    /// Number of β_wnf-contractions performed.
    pub fn contractions(&self) -> u64 {
        self.count(Rule::Beta)
    }

    pub fn iter(&self) -> impl Iterator<Item = (Rule, u64)> + '_ {
        Rule::ALL.iter().map(|r| (*r, self.count(*r)))
    }
}

pub enum Step {
    Next(Config, Rule),
    Final(Term),
    Stuck(String),
}

/// Loads a closed term.
pub fn inject(t: &Term) -> Result<Config, Error> {
    match open_count(t) {
        0 => Ok(Config::Eval {
            term: t.clone(),
            env: List::nil(),
            stack: List::nil(),
            level: 0,
        }),
        open => Err(Error::OpenTerm { open }),
    }
}

fn stuck(msg: impl Into<String>) -> Step {
    Step::Stuck(msg.into())
}

/// Fires the one transition whose left-hand side matches `k`.
pub fn step(k: &Config) -> Step {
    match k {
        Config::Eval {
            term,
            env,
            stack,
            level,
        } => {
            let level = *level;
            match term {
                // (1)
                Term::App(t1, t2) => Step::Next(
                    Config::Eval {
                        term: t2.as_ref().clone(),
                        env: env.clone(),
                        stack: stack.cons(Frame::PendingFun(t1.as_ref().clone(), env.clone())),
                        level,
                    },
                    Rule::EvalApp,
                ),
                // (2)
                Term::Lam(body) => Step::Next(
                    Config::ContW {
                        wnf: Wnf::Clo {
                            body: body.as_ref().clone(),
                            env: env.clone(),
                        },
                        stack: stack.clone(),
                        level,
                    },
                    Rule::EvalLam,
                ),
                Term::Var(n) => match (n, env.uncons()) {
                    // (3)
                    (0, Some((w, _))) => Step::Next(
                        Config::ContW {
                            wnf: w.clone(),
                            stack: stack.clone(),
                            level,
                        },
                        Rule::VarHit,
                    ),
                    // (4)
                    (n, Some((_, rest))) => Step::Next(
                        Config::Eval {
                            term: Term::Var(n - 1),
                            env: rest.clone(),
                            stack: stack.clone(),
                            level,
                        },
                        Rule::VarSkip,
                    ),
                    (n, None) => stuck(format!("index {n} looked up in an empty environment")),
                },
            }
        }
        Config::ContW { wnf, stack, level } => {
            let level = *level;
            match (stack.uncons(), wnf) {
                // (5)
                (Some((Frame::PendingFun(t, e), rest)), w) => Step::Next(
                    Config::Eval {
                        term: t.clone(),
                        env: e.clone(),
                        stack: rest.cons(Frame::ArgWnf(w.clone())),
                        level,
                    },
                    Rule::EvalFun,
                ),
                // (6)
                (Some((Frame::ArgWnf(arg), rest)), Wnf::Clo { body, env }) => Step::Next(
                    Config::Eval {
                        term: body.clone(),
                        env: env.cons(arg.clone()),
                        stack: rest.clone(),
                        level,
                    },
                    Rule::Beta,
                ),
                // (7)
                (Some((Frame::ArgWnf(arg), rest)), Wnf::Inert(i)) => Step::Next(
                    Config::ContW {
                        wnf: Wnf::Inert(Inert::App(Arc::new(i.clone()), Arc::new(arg.clone()))),
                        stack: rest.clone(),
                        level,
                    },
                    Rule::InertApp,
                ),
                // (8), on S3 stacks
                (None | Some((Frame::LamBox | Frame::StrongFun(_), _)), Wnf::Clo { body, env }) => {
                    Step::Next(
                        Config::Eval {
                            term: body.clone(),
                            env: env.cons(Wnf::Inert(Inert::AbsVar(level + 1))),
                            stack: stack.cons(Frame::LamBox),
                            level: level + 1,
                        },
                        Rule::EnterLam,
                    )
                }
                (Some((Frame::StrongArg(_), _)), Wnf::Clo { .. }) => {
                    stuck("closure continued on a stack holding a normalized argument")
                }
                // (9), on S2 stacks
                (_, Wnf::Inert(Inert::App(i, w))) => Step::Next(
                    Config::ContW {
                        wnf: w.as_ref().clone(),
                        stack: stack.cons(Frame::StrongFun(i.as_ref().clone())),
                        level,
                    },
                    Rule::InertArg,
                ),
                // (10)
                (_, Wnf::Inert(Inert::AbsVar(n))) => match level.checked_sub(*n) {
                    Some(index) => Step::Next(
                        Config::ContN {
                            term: Term::Var(index),
                            level,
                            stack: stack.clone(),
                        },
                        Rule::AbsVar,
                    ),
                    None => stuck(format!("abstract variable V({n}) above level {level}")),
                },
            }
        }
        Config::ContN { term, level, stack } => {
            let level = *level;
            match stack.uncons() {
                // (11)
                None if level == 0 => Step::Final(term.clone()),
                None => stuck(format!("empty stack at level {level}")),
                // (13)
                Some((Frame::StrongFun(i), rest)) => Step::Next(
                    Config::ContW {
                        wnf: Wnf::Inert(i.clone()),
                        stack: rest.cons(Frame::StrongArg(term.clone())),
                        level,
                    },
                    Rule::StrongArg,
                ),
                // (12)
                Some((Frame::LamBox, rest)) => match level.checked_sub(1) {
                    Some(level) => Step::Next(
                        Config::ContN {
                            term: Term::lam(term.clone()),
                            level,
                            stack: rest.clone(),
                        },
                        Rule::CloseLam,
                    ),
                    None => stuck("binder closed at level 0"),
                },
                // (14)
                Some((Frame::StrongArg(nf), rest)) => Step::Next(
                    Config::ContN {
                        term: Term::app(term.clone(), nf.clone()),
                        level,
                        stack: rest.clone(),
                    },
                    Rule::NeutralApp,
                ),
                Some((Frame::PendingFun(..) | Frame::ArgWnf(_), _)) => {
                    stuck("normal form continued on a weak evaluation frame")
                }
            }
        }
    }
}

/// Result of a single [`Machine::step`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Progress {
    Moved(Rule),
    Finished(Term),
    OutOfFuel,
}

/// A fueled run of the machine that can be advanced one transition at a time.
#[derive(Clone)]
pub struct Machine {
    config: Config,
    stats: RuleStats,
    fuel: u64,
    result: Option<Term>,
}

impl Machine {
    pub fn new(t: &Term, fuel: u64) -> Result<Machine, Error> {
        Ok(Machine {
            config: inject(t)?,
            stats: RuleStats::default(),
            fuel,
            result: None,
        })
    }

    pub fn config(&self) -> &Config {
        &self.config
    }

    pub fn stats(&self) -> &RuleStats {
        &self.stats
    }

    pub fn result(&self) -> Option<&Term> {
        self.result.as_ref()
    }

    pub fn fuel_left(&self) -> u64 {
        self.fuel
    }

    pub fn step(&mut self) -> Result<Progress, Error> {
        if let Some(nf) = &self.result {
            return Ok(Progress::Finished(nf.clone()));
        }
        // Unloading is free.
        if let Config::ContN { term, level: 0, stack } = &self.config {
            if stack.is_empty() {
                self.result = Some(term.clone());
                return Ok(Progress::Finished(term.clone()));
            }
        }
        if self.fuel == 0 {
            return Ok(Progress::OutOfFuel);
        }
        match step(&self.config) {
            Step::Next(next, rule) => {
                self.fuel -= 1;
                self.stats.record(rule);
                self.config = next;
                Ok(Progress::Moved(rule))
            }
            Step::Final(nf) => {
                self.result = Some(nf.clone());
                Ok(Progress::Finished(nf))
            }
            Step::Stuck(msg) => Err(Error::Stuck(msg)),
        }
    }
}

#[derive(Clone)]
pub enum RunOutcome {
    Normal { nf: Term, stats: RuleStats },
    FuelExhausted { last: Config, stats: RuleStats },
}

impl RunOutcome {
    pub fn normal_form(&self) -> Option<&Term> {
        match self {
            RunOutcome::Normal { nf, .. } => Some(nf),
            RunOutcome::FuelExhausted { .. } => None,
        }
    }

    pub fn stats(&self) -> &RuleStats {
        match self {
            RunOutcome::Normal { stats, .. } | RunOutcome::FuelExhausted { stats, .. } => stats,
        }
    }
}

impl fmt::Debug for RunOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunOutcome::Normal { nf, stats } => {
                write!(f, "Normal({nf:?}, {} transitions)", stats.transitions())
            }
            RunOutcome::FuelExhausted { stats, .. } => {
                write!(f, "FuelExhausted({} transitions)", stats.transitions())
            }
        }
    }
}

/// Runs the machine on `t`, calling `observe(before, rule, after)` for every
/// fired transition.
pub fn drive<F>(t: &Term, fuel: u64, mut observe: F) -> Result<RunOutcome, Error>
where
    F: FnMut(&Config, Rule, &Config),
{
    let mut machine = Machine::new(t, fuel)?;
    loop {
        let before = machine.config.clone();
        match machine.step()? {
            Progress::Moved(rule) => observe(&before, rule, &machine.config),
            Progress::Finished(nf) => {
                return Ok(RunOutcome::Normal {
                    nf,
                    stats: machine.stats,
                })
            }
            Progress::OutOfFuel => {
                return Ok(RunOutcome::FuelExhausted {
                    last: machine.config,
                    stats: machine.stats,
                })
            }
        }
    }
}

pub fn run(t: &Term, fuel: u64) -> Result<RunOutcome, Error> {
    drive(t, fuel, |_, _, _| {})
}

#[derive(Clone, Debug)]
pub struct TraceStep {
    pub config: Config,
    pub rule: Rule,
}

/// A recorded run: the loaded configuration (tagged with rule 0) followed by
/// the configuration reached by every transition.
#[derive(Clone, Debug)]
pub struct Trace {
    pub steps: Vec<TraceStep>,
    pub normal_form: Option<Term>,
}

pub fn trace(t: &Term, fuel: u64) -> Result<Trace, Error> {
    let mut steps = vec![TraceStep {
        config: inject(t)?,
        rule: Rule::Load,
    }];
    let outcome = drive(t, fuel, |_, rule, next| {
        steps.push(TraceStep {
            config: next.clone(),
            rule,
        })
    })?;
    Ok(Trace {
        steps,
        normal_form: outcome.normal_form().cloned(),
    })
}

/// Re-runs `t` checking that the machine fires exactly `rules` (rule 0 entries
/// are skipped) and returns the configuration it ends in.
pub fn replay(t: &Term, rules: &[Rule]) -> Result<Config, Error> {
    let mut k = inject(t)?;
    for (i, expected) in rules.iter().filter(|r| **r != Rule::Load).enumerate() {
        match step(&k) {
            Step::Next(next, rule) if rule == *expected => k = next,
            Step::Next(_, rule) => {
                return Err(Error::Replay(format!(
                    "transition {i}: expected rule {expected}, machine fired {rule}"
                )))
            }
            Step::Final(_) => {
                return Err(Error::Replay(format!(
                    "transition {i}: machine already finished"
                )))
            }
            Step::Stuck(msg) => return Err(Error::Stuck(msg)),
        }
    }
    Ok(k)
}

/// Partial results emitted while normalizing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PrefixEvent {
    /// A binder of the normal form was entered (rule 8).
    LamRevealed,
    /// An argument of a neutral subterm is fully normalized (rule 13).
    ArgNfRevealed(Term),
    Done(Term),
}

/// The event produced by a transition, if any.
pub fn prefix_event(rule: Rule, after: &Config) -> Option<PrefixEvent> {
    match rule {
        Rule::EnterLam => Some(PrefixEvent::LamRevealed),
        Rule::StrongArg => match after.stack().head() {
            Some(Frame::StrongArg(nf)) => Some(PrefixEvent::ArgNfRevealed(nf.clone())),
            _ => None,
        },
        _ => None,
    }
}

pub fn stream_prefix(t: &Term, fuel: u64) -> Result<Vec<PrefixEvent>, Error> {
    let mut events = Vec::new();
    let outcome = drive(t, fuel, |_, rule, next| {
        events.extend(prefix_event(rule, next));
    })?;
    if let RunOutcome::Normal { nf, .. } = outcome {
        events.push(PrefixEvent::Done(nf));
    }
    Ok(events)
}

/// The part of the normal form fixed by the strong frames of `stack`, with
/// holes where the machine has not finished yet. Weak frames belong to the
/// computation inside the innermost hole and are skipped.
pub fn decode_prefix(stack: &Stack) -> Partial {
    stack.iter().fold(Partial::Hole, |acc, frame| match frame {
        Frame::PendingFun(..) | Frame::ArgWnf(_) => acc,
        Frame::StrongArg(nf) => Partial::app(acc, nf.into()),
        Frame::LamBox => Partial::lam(acc),
        Frame::StrongFun(_) => Partial::app(Partial::Hole, acc),
    })
}

pub fn lam_count(stack: &Stack) -> usize {
    stack.iter().filter(|f| matches!(f, Frame::LamBox)).count()
}

#[derive(Clone, Copy, PartialEq)]
enum StackSort {
    S1,
    S2,
    S3,
}

/// Whether `stack` is derivable from `start` in
///
/// ```text
/// S1 ::= (T,E)◦ :: S1 | ◦W :: S1 | S3
/// S2 ::= (◦nf) :: S2 | S3
/// S3 ::= • | λ□ :: S3 | I◦ :: S2
/// ```
fn stack_derives(stack: &Stack, start: StackSort) -> bool {
    let mut sort = start;
    for frame in stack {
        sort = match (sort, frame) {
            (StackSort::S1, Frame::PendingFun(..) | Frame::ArgWnf(_)) => StackSort::S1,
            (StackSort::S2, Frame::StrongArg(nf)) if crate::term::is_normal(nf) => StackSort::S2,
            (_, Frame::LamBox) => StackSort::S3,
            (_, Frame::StrongFun(_)) => StackSort::S2,
            _ => return false,
        };
    }
    true
}

/// Membership in the grammar of well-formed configurations:
///
/// ```text
/// K ::= ⟨T, E, S1, m⟩ | ⟨W | S1⟩ | ⟨I | S2⟩ | ⟨neu, m, S2⟩ | ⟨nf, m, S3⟩
/// ```
pub fn is_wellformed(k: &Config) -> bool {
    use crate::term::classify;
    match k {
        Config::Eval { stack, .. } => stack_derives(stack, StackSort::S1),
        Config::ContW { wnf, stack, .. } => {
            stack_derives(stack, StackSort::S1)
                || (matches!(wnf, Wnf::Inert(_)) && stack_derives(stack, StackSort::S2))
        }
        Config::ContN { term, stack, .. } => {
            let forms = classify(term);
            (forms.neutral && stack_derives(stack, StackSort::S2))
                || (forms.normal && stack_derives(stack, StackSort::S3))
        }
    }
}

impl fmt::Debug for Wnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Wnf::Clo { body, env } => write!(f, "(λ{body:?}, {env:?})"),
            Wnf::Inert(i) => write!(f, "{i:?}"),
        }
    }
}

impl fmt::Debug for Inert {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inert::AbsVar(n) => write!(f, "V({n})"),
            Inert::App(i, w) => write!(f, "({i:?} {w:?})"),
        }
    }
}

impl fmt::Debug for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Frame::PendingFun(t, e) => write!(f, "({t:?}, {e:?})◦"),
            Frame::ArgWnf(w) => write!(f, "◦{w:?}"),
            Frame::StrongArg(nf) => write!(f, "◦N({nf:?})"),
            Frame::LamBox => f.write_str("λ□"),
            Frame::StrongFun(i) => write!(f, "{i:?}◦"),
        }
    }
}

impl fmt::Debug for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Config::Eval {
                term,
                env,
                stack,
                level,
            } => write!(f, "⟨{term:?}, {env:?}, {stack:?}, {level}⟩_e"),
            Config::ContW { wnf, stack, level } => write!(f, "⟨{wnf:?} | {stack:?}⟩_{level}"),
            Config::ContN { term, level, stack } => {
                write!(f, "⟨{term:?}, {level}, {stack:?}⟩_s")
            }
        }
    }
}
