//! Decoding KNV configurations into annotated decompositions.
//!
//! A configuration decodes to a focus term (annotated with what the machine
//! knows about it) and the list of annotated frames around it, innermost
//! first. Plugging the focus back into the frames gives the term the
//! configuration stands for. The reversed lexicographic order on annotated
//! decompositions is the measure that every administrative transition
//! increases.

use std::cmp::Ordering;
use std::fmt;

use crate::knv::{lam_count, Config, Env, Frame, Inert, Stack, Wnf};
use crate::term::{classify, open_count, Term};
use crate::Error;

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum AnnTerm {
    Plain(Term),
    /// Known to be a weak normal form.
    StrongW(Term),
    /// Known to be a normal form.
    StrongN(Term),
}

impl AnnTerm {
    pub fn term(&self) -> &Term {
        match self {
            AnnTerm::Plain(t) | AnnTerm::StrongW(t) | AnnTerm::StrongN(t) => t,
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum AnnFrame {
    /// `t □`
    FlApp(Term),
    /// `□ t`
    FrApp(Term),
    /// `t □` with `t` known to be inert.
    FlStrongAnn(Term),
    /// `□ t` with `t` known to be normal.
    FrStrongAnn(Term),
    LamBox,
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AnnDecomposition {
    pub head: AnnTerm,
    /// Innermost frame first.
    pub frames: Vec<AnnFrame>,
}

fn undecodable<T>(msg: String) -> Result<T, Error> {
    Err(Error::Undecodable(msg))
}

pub fn decode_wnf(w: &Wnf, level: usize) -> Result<Term, Error> {
    match w {
        Wnf::Clo { body, env } => {
            let env = env.cons(Wnf::Inert(Inert::AbsVar(level + 1)));
            Ok(Term::lam(decode_term_unchecked(body, &env, level + 1)?))
        }
        Wnf::Inert(i) => decode_inert(i, level),
    }
}

pub fn decode_inert(i: &Inert, level: usize) -> Result<Term, Error> {
    match i {
        Inert::AbsVar(n) => match level.checked_sub(*n) {
            Some(index) => Ok(Term::Var(index)),
            None => undecodable(format!("V({n}) decoded at level {level}")),
        },
        Inert::App(i, w) => Ok(Term::app(decode_inert(i, level)?, decode_wnf(w, level)?)),
    }
}

// Any lookup that falls off the environment means the environment does not
// close the term.
fn decode_term_unchecked(t: &Term, env: &Env, level: usize) -> Result<Term, Error> {
    match t {
        Term::App(f, a) => Ok(Term::app(
            decode_term_unchecked(f, env, level)?,
            decode_term_unchecked(a, env, level)?,
        )),
        Term::Lam(body) => decode_wnf(
            &Wnf::Clo {
                body: body.as_ref().clone(),
                env: env.clone(),
            },
            level,
        ),
        Term::Var(n) => match env.get(*n) {
            Some(w) => decode_wnf(w, level),
            None => undecodable(format!(
                "index {n} in an environment of length {}",
                env.len()
            )),
        },
    }
}

/// Decodes `t` in environment `env` at level `level`; `env` must close `t`.
pub fn decode_term(t: &Term, env: &Env, level: usize) -> Result<Term, Error> {
    let (open, len) = (open_count(t), env.len());
    if open > len {
        return undecodable(format!(
            "environment of length {len} does not close a term needing {open}"
        ));
    }
    decode_term_unchecked(t, env, level)
}

/// Decodes every frame at the level given by the `LamBox` frames beneath it.
pub fn decode_stack(stack: &Stack) -> Result<Vec<AnnFrame>, Error> {
    let frames: Vec<&Frame> = stack.iter().collect();
    let mut below = frames
        .iter()
        .filter(|f| matches!(f, Frame::LamBox))
        .count();
    let mut out = Vec::with_capacity(frames.len());
    for frame in frames {
        out.push(match frame {
            Frame::LamBox => {
                below -= 1;
                AnnFrame::LamBox
            }
            Frame::PendingFun(t, e) => AnnFrame::FlApp(decode_term(t, e, below)?),
            Frame::ArgWnf(w) => AnnFrame::FrApp(decode_wnf(w, below)?),
            Frame::StrongArg(nf) => AnnFrame::FrStrongAnn(nf.clone()),
            Frame::StrongFun(i) => AnnFrame::FlStrongAnn(decode_inert(i, below)?),
        });
    }
    Ok(out)
}

fn decode_config_at(k: &Config, level: usize) -> Result<AnnDecomposition, Error> {
    let head = match k {
        Config::Eval { term, env, .. } => AnnTerm::Plain(decode_term(term, env, level)?),
        Config::ContW { wnf, .. } => AnnTerm::StrongW(decode_wnf(wnf, level)?),
        Config::ContN { term, .. } => AnnTerm::StrongN(term.clone()),
    };
    Ok(AnnDecomposition {
        head,
        frames: decode_stack(k.stack())?,
    })
}

pub fn decode_config(k: &Config) -> Result<AnnDecomposition, Error> {
    decode_config_at(k, k.level())
}

/// Like [`decode_config`] but takes the level from the stack instead of the
/// configuration's level register.
pub fn decode_config_recounted(k: &Config) -> Result<AnnDecomposition, Error> {
    decode_config_at(k, lam_count(k.stack()))
}

/// Reconstructs the term, ignoring annotations.
pub fn plug(d: &AnnDecomposition) -> Term {
    d.frames
        .iter()
        .fold(d.head.term().clone(), |acc, frame| match frame {
            AnnFrame::FlApp(f) | AnnFrame::FlStrongAnn(f) => Term::app(f.clone(), acc),
            AnnFrame::FrApp(a) | AnnFrame::FrStrongAnn(a) => Term::app(acc, a.clone()),
            AnnFrame::LamBox => Term::lam(acc),
        })
}

/// An element of an annotated decomposition: the focus or one frame.
#[derive(Clone, Copy)]
enum Elem<'a> {
    Head(&'a AnnTerm),
    Frame(&'a AnnFrame),
}

impl<'a> Elem<'a> {
    // plain < (t □) < (□ t) < W(t) < (W(t) □) < (□ N(t)) < λ□ < N(t)
    fn rank(self) -> u8 {
        match self {
            Elem::Head(AnnTerm::Plain(_)) => 0,
            Elem::Frame(AnnFrame::FlApp(_)) => 1,
            Elem::Frame(AnnFrame::FrApp(_)) => 2,
            Elem::Head(AnnTerm::StrongW(_)) => 3,
            Elem::Frame(AnnFrame::FlStrongAnn(_)) => 4,
            Elem::Frame(AnnFrame::FrStrongAnn(_)) => 5,
            Elem::Frame(AnnFrame::LamBox) => 6,
            Elem::Head(AnnTerm::StrongN(_)) => 7,
        }
    }

    fn payload(self) -> Option<&'a Term> {
        match self {
            Elem::Head(a) => Some(a.term()),
            Elem::Frame(AnnFrame::LamBox) => None,
            Elem::Frame(
                AnnFrame::FlApp(t)
                | AnnFrame::FrApp(t)
                | AnnFrame::FlStrongAnn(t)
                | AnnFrame::FrStrongAnn(t),
            ) => Some(t),
        }
    }

    fn partial_cmp_by(
        self,
        other: Elem<'_>,
        same: &mut impl FnMut(&Term, &Term) -> bool,
    ) -> Option<Ordering> {
        match self.rank().cmp(&other.rank()) {
            Ordering::Equal => {
                let equal = match (self.payload(), other.payload()) {
                    (Some(a), Some(b)) => same(a, b),
                    (None, None) => true,
                    _ => false,
                };
                equal.then_some(Ordering::Equal)
            }
            ord => Some(ord),
        }
    }
}

impl AnnDecomposition {
    /// Elements from the outermost frame inwards, ending with the focus.
    fn reversed(&self) -> impl Iterator<Item = Elem<'_>> {
        self.frames
            .iter()
            .rev()
            .map(Elem::Frame)
            .chain(std::iter::once(Elem::Head(&self.head)))
    }
}

/// Reversed lexicographic comparison. Elements of equal rank are only
/// comparable when they are identical, so the result is a partial order.
pub fn rlex_cmp(d1: &AnnDecomposition, d2: &AnnDecomposition) -> Option<Ordering> {
    rlex_cmp_by(d1, d2, |a, b| a == b)
}

/// [`rlex_cmp`] with a caller-supplied term equality.
pub fn rlex_cmp_by(
    d1: &AnnDecomposition,
    d2: &AnnDecomposition,
    mut same: impl FnMut(&Term, &Term) -> bool,
) -> Option<Ordering> {
    let mut a = d1.reversed();
    let mut b = d2.reversed();
    loop {
        match (a.next(), b.next()) {
            (None, None) => return Some(Ordering::Equal),
            (None, Some(_)) => return Some(Ordering::Less),
            (Some(_), None) => return Some(Ordering::Greater),
            (Some(x), Some(y)) => match x.partial_cmp_by(y, &mut same)? {
                Ordering::Equal => continue,
                ord => return Some(ord),
            },
        }
    }
}

pub fn rlex_less(d1: &AnnDecomposition, d2: &AnnDecomposition) -> bool {
    rlex_cmp(d1, d2) == Some(Ordering::Less)
}

impl PartialOrd for AnnDecomposition {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        rlex_cmp(self, other)
    }
}

/// Number of binders needed to close a machine weak normal form.
pub fn open_w(w: &Wnf) -> Result<usize, Error> {
    match w {
        Wnf::Clo { body, env } => {
            let need = open_count(body).saturating_sub(1);
            let have = env.len();
            if need > have {
                return undecodable(format!(
                    "closure environment of length {have} does not close a body needing {need}"
                ));
            }
            open_e(env)
        }
        Wnf::Inert(i) => open_i(i),
    }
}

pub fn open_i(i: &Inert) -> Result<usize, Error> {
    match i {
        Inert::AbsVar(n) => Ok(*n),
        Inert::App(i, w) => Ok(open_i(i)?.max(open_w(w)?)),
    }
}

pub fn open_e(env: &Env) -> Result<usize, Error> {
    env.iter()
        .try_fold(0, |acc, w| Ok(acc.max(open_w(w)?)))
}

/// A reachable-configuration invariant that does not hold.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    IllFormed,
    Level { level: usize, lam_boxes: usize },
    Closedness(String),
    NotNormal,
    Undecodable(String),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::IllFormed => f.write_str("stack does not match the configuration's mode"),
            Violation::Level { level, lam_boxes } => {
                write!(f, "level {level} but {lam_boxes} binder frames on the stack")
            }
            Violation::Closedness(msg) => write!(f, "closedness: {msg}"),
            Violation::NotNormal => f.write_str("normal-form register holds a non-normal term"),
            Violation::Undecodable(msg) => write!(f, "undecodable: {msg}"),
        }
    }
}

fn bound(what: &str, value: Result<usize, Error>, limit: usize) -> Result<(), Violation> {
    match value {
        Ok(v) if v <= limit => Ok(()),
        Ok(v) => Err(Violation::Closedness(format!("{what} is {v}, above {limit}"))),
        Err(e) => Err(Violation::Closedness(format!("{what}: {e}"))),
    }
}

/// Checks well-formedness, the level register, every closedness bound of
/// reachable configurations and decodability.
pub fn check_invariants(k: &Config) -> Result<(), Violation> {
    if !crate::knv::is_wellformed(k) {
        return Err(Violation::IllFormed);
    }
    let level = k.level();
    let lam_boxes = lam_count(k.stack());
    if level != lam_boxes {
        return Err(Violation::Level { level, lam_boxes });
    }
    match k {
        Config::Eval { term, env, .. } => {
            let (open, len) = (open_count(term), env.len());
            if open > len {
                return Err(Violation::Closedness(format!(
                    "environment of length {len} does not close a term needing {open}"
                )));
            }
            bound("open(E)", open_e(env), level)?;
        }
        Config::ContW { wnf, .. } => bound("open(W)", open_w(wnf), level)?,
        Config::ContN { term, .. } => {
            bound("open(T)", Ok(open_count(term)), level)?;
            if !classify(term).normal {
                return Err(Violation::NotNormal);
            }
        }
    }
    for suffix in k.stack().suffixes() {
        let below = suffix.tail().map_or(0, lam_count);
        match suffix.head() {
            Some(Frame::ArgWnf(w)) => bound("open(W) in ◦W frame", open_w(w), below)?,
            Some(Frame::StrongFun(i)) => bound("open(I) in I◦ frame", open_i(i), below)?,
            _ => {}
        }
    }
    decode_config(k).map_err(|e| Violation::Undecodable(e.to_string()))?;
    Ok(())
}

impl fmt::Debug for AnnTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnTerm::Plain(t) => write!(f, "{t:?}"),
            AnnTerm::StrongW(t) => write!(f, "W({t:?})"),
            AnnTerm::StrongN(t) => write!(f, "N({t:?})"),
        }
    }
}

impl fmt::Debug for AnnFrame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AnnFrame::FlApp(t) => write!(f, "({t:?} □)"),
            AnnFrame::FrApp(t) => write!(f, "(□ {t:?})"),
            AnnFrame::FlStrongAnn(t) => write!(f, "(W({t:?}) □)"),
            AnnFrame::FrStrongAnn(t) => write!(f, "(□ N({t:?}))"),
            AnnFrame::LamBox => f.write_str("λ□"),
        }
    }
}

impl fmt::Debug for AnnDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{:?}", self.head)?;
        for frame in &self.frames {
            write!(f, ", {frame:?}")?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::knv::{inject, Rule};
    use crate::list::List;
    use std::sync::Arc;

    fn v(n: usize) -> Term {
        Term::var(n)
    }
    fn abs_var(n: usize) -> Wnf {
        Wnf::Inert(Inert::AbsVar(n))
    }

    #[test]
    fn wnf_and_inert_decoding() {
        assert_eq!(decode_inert(&Inert::AbsVar(1), 1), Ok(v(0)));
        assert!(decode_inert(&Inert::AbsVar(2), 1).is_err());
        let clo = Wnf::Clo {
            body: v(1),
            env: List::nil(),
        };
        assert!(decode_wnf(&clo, 0).is_err());
        let app = Inert::App(Arc::new(Inert::AbsVar(1)), Arc::new(abs_var(1)));
        assert_eq!(decode_inert(&app, 1), Ok(Term::app(v(0), v(0))));
    }

    #[test]
    fn term_decoding() {
        let env = List::from_vec(vec![abs_var(1)]);
        assert_eq!(
            decode_term(&Term::app(v(0), v(0)), &env, 1),
            Ok(Term::app(v(0), v(0)))
        );
        // An unreachable input where an open term decodes to a closed one.
        let env = List::from_vec(vec![abs_var(5)]);
        assert_eq!(
            decode_term(&Term::lam(Term::lam(v(2))), &env, 4),
            Ok(Term::lam(Term::lam(v(1))))
        );
        let k = crate::term::church(3);
        assert_eq!(decode_term(&k, &List::nil(), 0), Ok(k));
        assert!(decode_term(&v(0), &List::nil(), 0).is_err());
    }

    #[test]
    fn stack_decoding() {
        assert_eq!(decode_stack(&List::nil()), Ok(vec![]));
        let s = List::from_vec(vec![Frame::ArgWnf(abs_var(1)), Frame::LamBox]);
        assert_eq!(
            decode_stack(&s),
            Ok(vec![AnnFrame::FrApp(v(0)), AnnFrame::LamBox])
        );
        let s = List::from_vec(vec![Frame::StrongArg(v(0)), Frame::LamBox]);
        assert_eq!(
            decode_stack(&s),
            Ok(vec![AnnFrame::FrStrongAnn(v(0)), AnnFrame::LamBox])
        );
    }

    #[test]
    fn config_decoding() {
        let k = Config::ContW {
            wnf: abs_var(1),
            stack: List::from_vec(vec![Frame::ArgWnf(abs_var(1)), Frame::LamBox]),
            level: 1,
        };
        let d = decode_config(&k).unwrap();
        assert_eq!(d.head, AnnTerm::StrongW(v(0)));
        assert_eq!(d.frames, vec![AnnFrame::FrApp(v(0)), AnnFrame::LamBox]);
        let nf = Term::lam(v(0));
        let done = Config::ContN {
            term: nf.clone(),
            level: 0,
            stack: List::nil(),
        };
        assert_eq!(
            decode_config(&done).unwrap(),
            AnnDecomposition {
                head: AnnTerm::StrongN(nf),
                frames: vec![]
            }
        );
        let t = crate::term::church(2);
        assert_eq!(plug(&decode_config(&inject(&t).unwrap()).unwrap()), t);
    }

    #[test]
    fn plug_examples() {
        let t = Term::app(v(0), v(1));
        let single = AnnDecomposition {
            head: AnnTerm::Plain(t.clone()),
            frames: vec![],
        };
        assert_eq!(plug(&single), t);
        let left = AnnDecomposition {
            head: AnnTerm::Plain(v(0)),
            frames: vec![AnnFrame::FlApp(v(1))],
        };
        assert_eq!(plug(&left), Term::app(v(1), v(0)));
        let lam = AnnDecomposition {
            head: AnnTerm::StrongN(Term::app(v(0), v(0))),
            frames: vec![AnnFrame::LamBox],
        };
        assert_eq!(plug(&lam), Term::lam(Term::app(v(0), v(0))));
    }

    #[test]
    fn rlex_examples() {
        let d = |head: AnnTerm, frames: Vec<AnnFrame>| AnnDecomposition { head, frames };
        let x = d(AnnTerm::Plain(v(0)), vec![AnnFrame::LamBox]);
        assert!(!rlex_less(&x, &x));
        // [T1 T2 | L] < [T2, (T1 □) | L]
        let (t1, t2) = (v(1), Term::lam(v(0)));
        let l = vec![AnnFrame::FrApp(v(2)), AnnFrame::LamBox];
        let before = d(AnnTerm::Plain(Term::app(t1.clone(), t2.clone())), l.clone());
        let mut frames = vec![AnnFrame::FlApp(t1)];
        frames.extend(l);
        let after = d(AnnTerm::Plain(t2), frames);
        assert!(rlex_less(&before, &after));
        assert!(!rlex_less(&after, &before));
        // Same rank, different payloads: unordered.
        let a = d(AnnTerm::Plain(v(0)), vec![]);
        let b = d(AnnTerm::Plain(v(1)), vec![]);
        assert_eq!(rlex_cmp(&a, &b), None);
        // A strict prefix after reversal is smaller.
        let short = d(AnnTerm::StrongN(v(0)), vec![]);
        assert!(rlex_less(&d(AnnTerm::Plain(v(0)), vec![]), &short));
    }

    #[test]
    fn open_measures() {
        assert_eq!(open_i(&Inert::AbsVar(3)), Ok(3));
        assert_eq!(open_e(&List::nil()), Ok(0));
        let clo = Wnf::Clo {
            body: v(0),
            env: List::from_vec(vec![abs_var(2)]),
        };
        assert_eq!(open_w(&clo), Ok(2));
        let open_clo = Wnf::Clo {
            body: v(1),
            env: List::nil(),
        };
        assert!(open_w(&open_clo).is_err());
    }

    #[test]
    fn invariants_hold_along_a_trace() {
        let t = crate::parse("λ (λ λ 1) (λ 0) (λ 0 0)", crate::Notation::DeBruijn).unwrap();
        let tr = crate::knv::trace(&t, 1000).unwrap();
        for s in &tr.steps {
            assert_eq!(check_invariants(&s.config), Ok(()), "{:?}", s.config);
            assert_eq!(
                decode_config(&s.config).unwrap(),
                decode_config_recounted(&s.config).unwrap()
            );
        }
        assert!(tr.steps.iter().any(|s| s.rule == Rule::Beta));
    }

    #[test]
    fn violations_are_detected() {
        let k = Config::ContW {
            wnf: abs_var(1),
            stack: List::nil(),
            level: 1,
        };
        assert!(matches!(check_invariants(&k), Err(Violation::Level { .. })));
        let k = Config::ContW {
            wnf: abs_var(2),
            stack: List::from_vec(vec![Frame::LamBox]),
            level: 1,
        };
        assert!(matches!(
            check_invariants(&k),
            Err(Violation::Closedness(_))
        ));
    }
}
