//! Reduction semantics without machines.
//!
//! Strong right-to-left call-by-value reduces β_wnf-redexes in the contexts
//! generated (outside-in) by
//!
//! ```text
//! F ::= (□ wnf) F | (T □) F | ε
//! H ::= (□ nf) H | (inert □) R
//! R ::= λ□ R | H | F
//! ```
//!
//! and normal order reduces β-redexes in
//!
//! ```text
//! L ::= λ□ L | B
//! B ::= (□ T) B | (neu □) L | ε
//! ```
//!
//! [`decompose_rrcbv`] finds the decomposition by structural recursion;
//! [`enumerate_r_decompositions`] generates every redex position and keeps
//! those the grammar accepts, as a slow cross-check.

use std::fmt;

use crate::term::{beta_contract, beta_wnf_contract, classify, Forms, Notation, Partial, Term};

/// One layer of a context.
#[derive(Clone, PartialEq, Eq, Hash)]
pub enum CtxFrame {
    /// `□ arg`
    AppFunHole(Term),
    /// `fun □`
    AppArgHole(Term),
    UnderLam,
}

/// Grammar symbol a context frame was derived under.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Nonterminal {
    R,
    H,
    F,
}

#[derive(Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// Innermost frame first.
    pub context: Vec<CtxFrame>,
    /// `symbols[i]` is the nonterminal that produced `context[i]`. Empty for
    /// normal-order decompositions.
    pub symbols: Vec<Nonterminal>,
    pub redex: Term,
}

impl Decomposition {
    fn at_root(redex: &Term) -> Decomposition {
        Decomposition {
            context: Vec::new(),
            symbols: Vec::new(),
            redex: redex.clone(),
        }
    }

    fn wrap(mut self, frame: CtxFrame, symbol: Nonterminal) -> Decomposition {
        self.context.push(frame);
        self.symbols.push(symbol);
        self
    }

    pub fn plug(&self) -> Term {
        plug_ctx(&self.context, &self.redex)
    }

    /// The context with a hole in place of the redex.
    pub fn context_term(&self) -> Partial {
        self.context
            .iter()
            .fold(Partial::Hole, |acc, frame| match frame {
                CtxFrame::AppFunHole(arg) => Partial::app(acc, arg.into()),
                CtxFrame::AppArgHole(fun) => Partial::app(fun.into(), acc),
                CtxFrame::UnderLam => Partial::lam(acc),
            })
    }

    pub fn print(&self, notation: Notation) -> String {
        format!(
            "{} [{}]",
            self.context_term().print(notation),
            crate::term::print(&self.redex, Notation::DeBruijn)
        )
    }
}

impl fmt::Debug for CtxFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CtxFrame::AppFunHole(t) => write!(f, "(□ {t:?})"),
            CtxFrame::AppArgHole(t) => write!(f, "({t:?} □)"),
            CtxFrame::UnderLam => f.write_str("λ□"),
        }
    }
}

impl fmt::Debug for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} in {:?}", self.redex, self.context)
    }
}

/// Rebuilds a term from an inside-out context and the term in its hole.
pub fn plug_ctx(context: &[CtxFrame], t: &Term) -> Term {
    context.iter().fold(t.clone(), |acc, frame| match frame {
        CtxFrame::AppFunHole(arg) => Term::app(acc, arg.clone()),
        CtxFrame::AppArgHole(fun) => Term::app(fun.clone(), acc),
        CtxFrame::UnderLam => Term::lam(acc),
    })
}

fn is_lam(t: &Term) -> bool {
    matches!(t, Term::Lam(_))
}

/// The F-decomposition, which exists iff `t` is not a weak normal form.
pub fn decompose_weak(t: &Term) -> Option<Decomposition> {
    stacker::maybe_grow(64 * 1024, 1024 * 1024, || match t {
        Term::Var(_) | Term::Lam(_) => None,
        Term::App(t1, t2) => {
            if let Some(d) = decompose_weak(t2) {
                return Some(d.wrap(CtxFrame::AppArgHole(t1.as_ref().clone()), Nonterminal::F));
            }
            if let Some(d) = decompose_weak(t1) {
                return Some(d.wrap(CtxFrame::AppFunHole(t2.as_ref().clone()), Nonterminal::F));
            }
            is_lam(t1).then(|| Decomposition::at_root(t))
        }
    })
}

/// The unique R-decomposition, which exists iff `t` is not a normal form.
pub fn decompose_rrcbv(t: &Term) -> Option<Decomposition> {
    stacker::maybe_grow(64 * 1024, 1024 * 1024, || match t {
        Term::Var(_) => None,
        Term::Lam(body) => decompose_rrcbv(body).map(|d| d.wrap(CtxFrame::UnderLam, Nonterminal::R)),
        Term::App(t1, t2) => {
            // The argument is not a wnf.
            if let Some(d) = decompose_weak(t2) {
                return Some(d.wrap(CtxFrame::AppArgHole(t1.as_ref().clone()), Nonterminal::F));
            }
            // The argument is a wnf, the function is not.
            if let Some(d) = decompose_weak(t1) {
                return Some(d.wrap(CtxFrame::AppFunHole(t2.as_ref().clone()), Nonterminal::F));
            }
            if is_lam(t1) {
                return Some(Decomposition::at_root(t));
            }
            // The function is inert: normalize the argument, then the function.
            if let Some(d) = decompose_rrcbv(t2) {
                return Some(d.wrap(CtxFrame::AppArgHole(t1.as_ref().clone()), Nonterminal::H));
            }
            decompose_rrcbv(t1).map(|d| d.wrap(CtxFrame::AppFunHole(t2.as_ref().clone()), Nonterminal::H))
        }
    })
}

fn contract_in(d: Decomposition, contract: fn(&Term) -> Option<Term>) -> Term {
    let reduct = contract(&d.redex).expect("decomposition focuses on a redex");
    plug_ctx(&d.context, &reduct)
}

/// One step of weak right-to-left call-by-value.
pub fn step_weak(t: &Term) -> Option<Term> {
    decompose_weak(t).map(|d| contract_in(d, beta_wnf_contract))
}

pub fn step_rrcbv(t: &Term) -> Option<Term> {
    decompose_rrcbv(t).map(|d| contract_in(d, beta_wnf_contract))
}

/// Leftmost-outermost decomposition, which exists iff `t` is not a β-normal
/// form.
pub fn decompose_normal_order(t: &Term) -> Option<Decomposition> {
    fn dec_l(t: &Term) -> Option<Decomposition> {
        match t {
            Term::Lam(body) => dec_l(body).map(|d| d.wrap(CtxFrame::UnderLam, Nonterminal::R)),
            _ => dec_b(t),
        }
    }
    fn dec_b(t: &Term) -> Option<Decomposition> {
        stacker::maybe_grow(64 * 1024, 1024 * 1024, || match t {
            Term::Var(_) | Term::Lam(_) => None,
            Term::App(t1, _) if is_lam(t1) => Some(Decomposition::at_root(t)),
            Term::App(t1, t2) => {
                if let Some(d) = dec_b(t1) {
                    return Some(d.wrap(CtxFrame::AppFunHole(t2.as_ref().clone()), Nonterminal::F));
                }
                dec_l(t2).map(|d| d.wrap(CtxFrame::AppArgHole(t1.as_ref().clone()), Nonterminal::H))
            }
        })
    }
    dec_l(t).map(|mut d| {
        d.symbols.clear();
        d
    })
}

pub fn step_normal_order(t: &Term) -> Option<Term> {
    decompose_normal_order(t).map(|d| contract_in(d, beta_contract))
}

/// Result of iterating a one-step reduction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Normalized {
    Normal { nf: Term, steps: u64 },
    FuelExhausted { last: Term, steps: u64 },
}

impl Normalized {
    pub fn normal_form(&self) -> Option<&Term> {
        match self {
            Normalized::Normal { nf, .. } => Some(nf),
            Normalized::FuelExhausted { .. } => None,
        }
    }

    pub fn steps(&self) -> u64 {
        match self {
            Normalized::Normal { steps, .. } | Normalized::FuelExhausted { steps, .. } => *steps,
        }
    }
}

/// Performs at most `fuel` contractions.
pub fn normalize_with(t: &Term, fuel: u64, step: impl Fn(&Term) -> Option<Term>) -> Normalized {
    let mut current = t.clone();
    let mut steps = 0;
    loop {
        if steps == fuel {
            return match step(&current) {
                None => Normalized::Normal { nf: current, steps },
                Some(_) => Normalized::FuelExhausted {
                    last: current,
                    steps,
                },
            };
        }
        match step(&current) {
            None => return Normalized::Normal { nf: current, steps },
            Some(next) => {
                current = next;
                steps += 1;
            }
        }
    }
}

pub fn normalize_rrcbv(t: &Term, fuel: u64) -> Normalized {
    normalize_with(t, fuel, step_rrcbv)
}

pub fn normalize_normal_order(t: &Term, fuel: u64) -> Normalized {
    normalize_with(t, fuel, step_normal_order)
}

/// Every β_wnf-redex together with its context, outside-in and inside-out.
fn redex_positions(t: &Term) -> Vec<(Vec<CtxFrame>, Term)> {
    fn go(t: &Term, path: &mut Vec<CtxFrame>, out: &mut Vec<(Vec<CtxFrame>, Term)>) {
        if beta_wnf_contract(t).is_some() {
            out.push((path.clone(), t.clone()));
        }
        match t {
            Term::Var(_) => {}
            Term::Lam(b) => {
                path.push(CtxFrame::UnderLam);
                go(b, path, out);
                path.pop();
            }
            Term::App(f, a) => {
                path.push(CtxFrame::AppFunHole(a.as_ref().clone()));
                go(f, path, out);
                path.pop();
                path.push(CtxFrame::AppArgHole(f.as_ref().clone()));
                go(a, path, out);
                path.pop();
            }
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

const SYMBOLS: [Nonterminal; 3] = [Nonterminal::R, Nonterminal::H, Nonterminal::F];

fn index(s: Nonterminal) -> usize {
    match s {
        Nonterminal::R => 0,
        Nonterminal::H => 1,
        Nonterminal::F => 2,
    }
}

/// Symbols reachable by ε-productions, most specific first.
fn closure(s: Nonterminal) -> &'static [Nonterminal] {
    match s {
        Nonterminal::R => &[Nonterminal::F, Nonterminal::H, Nonterminal::R],
        Nonterminal::H => &[Nonterminal::H],
        Nonterminal::F => &[Nonterminal::F],
    }
}

/// The symbol reached from `s` by producing `frame`, if `s` can produce it.
fn produce(s: Nonterminal, frame: &CtxFrame) -> Option<Nonterminal> {
    let forms = match frame {
        CtxFrame::AppFunHole(t) | CtxFrame::AppArgHole(t) => classify(t),
        CtxFrame::UnderLam => Forms::NONE,
    };
    produce_classified(s, frame, forms)
}

/// Like [`produce`], given the classification of the frame's term.
fn produce_classified(s: Nonterminal, frame: &CtxFrame, forms: Forms) -> Option<Nonterminal> {
    match (s, frame) {
        (Nonterminal::R, CtxFrame::UnderLam) => Some(Nonterminal::R),
        (Nonterminal::H, CtxFrame::AppFunHole(_)) if forms.normal => Some(Nonterminal::H),
        (Nonterminal::H, CtxFrame::AppArgHole(_)) if forms.inert => Some(Nonterminal::R),
        (Nonterminal::F, CtxFrame::AppFunHole(_)) if forms.weak_normal => Some(Nonterminal::F),
        (Nonterminal::F, CtxFrame::AppArgHole(_)) => Some(Nonterminal::F),
        _ => None,
    }
}

fn bit(s: Nonterminal) -> u8 {
    1 << index(s)
}

fn close_states(states: u8) -> u8 {
    SYMBOLS
        .iter()
        .filter(|s| states & bit(**s) != 0)
        .flat_map(|s| closure(*s))
        .fold(0, |acc, s| acc | bit(*s))
}

/// Symbols (as a bit set, closed under ε-productions) that can derive a hole
/// at the root of a term.
pub(crate) const ROOT_STATES: u8 = 0b111;

/// Symbols that can derive a hole just inside `frame`, given those that can
/// derive a hole just outside it and the classification of the frame's term.
pub(crate) fn states_after(states: u8, frame: &CtxFrame, forms: Forms) -> u8 {
    let next = SYMBOLS
        .iter()
        .filter(|s| states & bit(**s) != 0)
        .filter_map(|s| produce_classified(*s, frame, forms))
        .fold(0, |acc, s| acc | bit(s));
    close_states(next)
}

/// Whether a redex may sit in a hole derived from `states`.
pub(crate) fn accepts_redex(states: u8) -> bool {
    states & bit(Nonterminal::F) != 0
}

/// Parses an outside-in frame list from `start`, returning the symbol used
/// for each frame (outside-in) when the list is a complete context.
fn derive(frames: &[CtxFrame], start: Nonterminal) -> Option<Vec<Nonterminal>> {
    let n = frames.len();
    // accepts[i][s]: the suffix from frame i is derivable from symbol s.
    let mut accepts = vec![[false; 3]; n + 1];
    for s in SYMBOLS {
        accepts[n][index(s)] = closure(s).contains(&Nonterminal::F);
    }
    for i in (0..n).rev() {
        for s in SYMBOLS {
            accepts[i][index(s)] = closure(s).iter().any(|&c| {
                produce(c, &frames[i]).is_some_and(|next| accepts[i + 1][index(next)])
            });
        }
    }
    if !accepts[0][index(start)] {
        return None;
    }
    let mut symbols = Vec::with_capacity(n);
    let mut s = start;
    for (i, frame) in frames.iter().enumerate() {
        let (used, next) = closure(s)
            .iter()
            .find_map(|&c| {
                produce(c, frame)
                    .filter(|next| accepts[i + 1][index(*next)])
                    .map(|next| (c, next))
            })
            .expect("accepting derivation");
        symbols.push(used);
        s = next;
    }
    Some(symbols)
}

fn enumerate_from(t: &Term, start: Nonterminal) -> Vec<Decomposition> {
    redex_positions(t)
        .into_iter()
        .filter_map(|(outside_in, redex)| {
            let mut symbols = derive(&outside_in, start)?;
            let mut context = outside_in;
            context.reverse();
            symbols.reverse();
            Some(Decomposition {
                context,
                symbols,
                redex,
            })
        })
        .collect()
}

/// All decompositions of `t` into an R-context and a β_wnf-redex.
pub fn enumerate_r_decompositions(t: &Term) -> Vec<Decomposition> {
    enumerate_from(t, Nonterminal::R)
}

/// All decompositions of `t` into an F-context and a β_wnf-redex.
pub fn enumerate_f_decompositions(t: &Term) -> Vec<Decomposition> {
    enumerate_from(t, Nonterminal::F)
}
