//! Incremental auditing of KNV runs.
//!
//! Checking every configuration of a long run from scratch costs time
//! proportional to the size of each configuration. A transition only touches
//! the top of the stack, so the auditor keeps per-frame facts about the
//! current stack and computes them only for frames a transition pushes.
//! Facts about environments and inert terms are memoized by node identity.
//!
//! Because the decodings before and after a transition share the decoding of
//! the untouched part of the stack, comparing them (for equality, for the
//! reversed lexicographic order, or after plugging) reduces to comparing the
//! decoded tops.

use std::cmp::Ordering;
use std::sync::Arc;

use rustc_hash::{FxHashMap as HashMap, FxHashSet as HashSet};

use crate::decode::{self, AnnDecomposition, AnnFrame, AnnTerm, Violation};
use crate::knv::{Config, Env, Frame, Inert, Rule, Stack, Wnf};
use crate::oracle::{self, CtxFrame};
use crate::term::{classify, open_count, Forms, Term};

/// What the auditor established about one transition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StepCheck {
    pub rule: Rule,
    /// The plugged decodings are equal.
    pub plug_preserved: bool,
    /// The decoding after compared with the decoding before; `None` when the
    /// two are unordered.
    pub order: Option<Ordering>,
    /// For contractions: the decoding after is one strong call-by-value step
    /// away from the decoding before.
    pub contraction: Option<bool>,
    /// For contractions: whether the full reduction semantics was consulted,
    /// as opposed to checking the redex and the grammar of its context only.
    pub global: bool,
}

struct FrameInfo {
    /// The stack whose top is this frame; keeps the node alive.
    node: Stack,
    lam_with: usize,
    /// Whether the stack down from this frame derives from S1, S2, S3.
    derives: [bool; 3],
    decoded: AnnFrame,
    /// Constructor count of the decoded frame, saturating.
    size: u64,
    /// Grammar symbols that can derive a hole right above this frame.
    states: u8,
}

const S1: usize = 0;
const S2: usize = 1;
const S3: usize = 2;

#[derive(Default)]
struct Memo {
    open_env: HashMap<usize, (Env, usize)>,
    open_inert: HashMap<usize, (Arc<Inert>, usize)>,
    open_wnf: HashMap<usize, (Arc<Wnf>, usize)>,
    decoded_env: HashMap<(usize, usize), (Env, Term)>,
    decoded_inert: HashMap<(usize, usize), (Arc<Inert>, Term)>,
    decoded_wnf: HashMap<(usize, usize), (Arc<Wnf>, Term)>,
    shared: Shared,
}

const MEMO_LIMIT: usize = 1 << 21;

fn closedness(msg: String) -> Violation {
    Violation::Closedness(msg)
}

fn grow<R>(f: impl FnOnce() -> R) -> R {
    stacker::maybe_grow(64 * 1024, 1024 * 1024, f)
}

/// Closed values decode the same at every level, so they share one entry.
fn level_key(open: usize, level: usize) -> usize {
    if open == 0 {
        usize::MAX
    } else {
        level
    }
}

impl Memo {
    fn trim(&mut self) {
        let total = self.open_env.len()
            + self.open_inert.len()
            + self.open_wnf.len()
            + self.decoded_env.len()
            + self.decoded_inert.len()
            + self.decoded_wnf.len()
            + self.shared.len();
        if total > MEMO_LIMIT {
            *self = Memo::default();
        }
    }

    fn open_e(&mut self, env: &Env) -> Result<usize, Violation> {
        let Some((w, rest)) = env.uncons() else {
            return Ok(0);
        };
        if let Some((_, n)) = self.open_env.get(&env.addr()) {
            return Ok(*n);
        }
        let n = grow(|| Ok::<_, Violation>(self.open_w(w)?.max(self.open_e(rest)?)))?;
        self.open_env.insert(env.addr(), (env.clone(), n));
        Ok(n)
    }

    fn open_w(&mut self, w: &Wnf) -> Result<usize, Violation> {
        match w {
            Wnf::Clo { body, env } => {
                let need = open_count(body).saturating_sub(1);
                if !env.has_at_least(need) {
                    return Err(closedness(format!(
                        "closure environment of length {} does not close a body needing {need}",
                        env.len()
                    )));
                }
                self.open_e(env)
            }
            Wnf::Inert(i) => self.open_i(i),
        }
    }

    fn open_i(&mut self, i: &Inert) -> Result<usize, Violation> {
        match i {
            Inert::AbsVar(n) => Ok(*n),
            Inert::App(f, a) => {
                let f_open = match self.open_inert.get(&(Arc::as_ptr(f) as usize)) {
                    Some((_, n)) => *n,
                    None => {
                        let n = grow(|| self.open_i(f))?;
                        self.open_inert.insert(Arc::as_ptr(f) as usize, (f.clone(), n));
                        n
                    }
                };
                let a_open = match self.open_wnf.get(&(Arc::as_ptr(a) as usize)) {
                    Some((_, n)) => *n,
                    None => {
                        let n = grow(|| self.open_w(a))?;
                        self.open_wnf.insert(Arc::as_ptr(a) as usize, (a.clone(), n));
                        n
                    }
                };
                Ok(f_open.max(a_open))
            }
        }
    }

    fn decode_wnf(&mut self, w: &Wnf, level: usize) -> Result<Term, Violation> {
        match w {
            Wnf::Clo { body, env } => {
                let env = env.cons(Wnf::Inert(Inert::AbsVar(level + 1)));
                Ok(Term::lam(self.decode_term(body, &env, level + 1)?))
            }
            Wnf::Inert(i) => self.decode_inert(i, level),
        }
    }

    fn decode_inert(&mut self, i: &Inert, level: usize) -> Result<Term, Violation> {
        match i {
            Inert::AbsVar(n) => level
                .checked_sub(*n)
                .map(Term::Var)
                .ok_or_else(|| Violation::Undecodable(format!("V({n}) at level {level}"))),
            Inert::App(f, a) => {
                let key = (Arc::as_ptr(f) as usize, level_key(self.open_i(f)?, level));
                let f_term = match self.decoded_inert.get(&key) {
                    Some((_, t)) => t.clone(),
                    None => {
                        let t = grow(|| self.decode_inert(f, level))?;
                        self.decoded_inert.insert(key, (f.clone(), t.clone()));
                        t
                    }
                };
                let key = (Arc::as_ptr(a) as usize, level_key(self.open_w(a)?, level));
                let a_term = match self.decoded_wnf.get(&key) {
                    Some((_, t)) => t.clone(),
                    None => {
                        let t = grow(|| self.decode_wnf(a, level))?;
                        self.decoded_wnf.insert(key, (a.clone(), t.clone()));
                        t
                    }
                };
                Ok(Term::app(f_term, a_term))
            }
        }
    }

    fn decode_term(&mut self, t: &Term, env: &Env, level: usize) -> Result<Term, Violation> {
        match t {
            Term::App(f, a) => Ok(Term::app(
                grow(|| self.decode_term(f, env, level))?,
                grow(|| self.decode_term(a, env, level))?,
            )),
            Term::Lam(body) => {
                let env = env.cons(Wnf::Inert(Inert::AbsVar(level + 1)));
                Ok(Term::lam(grow(|| self.decode_term(body, &env, level + 1))?))
            }
            Term::Var(n) => {
                let suffix = env.suffixes().nth(*n).ok_or_else(|| {
                    Violation::Undecodable(format!(
                        "index {n} in an environment of length {}",
                        env.len()
                    ))
                })?;
                let w = suffix.head().expect("non-empty suffix");
                if let Wnf::Inert(i @ Inert::AbsVar(_)) = w {
                    return self.decode_inert(i, level);
                }
                let key = (suffix.addr(), level_key(self.open_w(w)?, level));
                if let Some((_, t)) = self.decoded_env.get(&key) {
                    return Ok(t.clone());
                }
                let t = grow(|| self.decode_wnf(w, level))?;
                self.decoded_env.insert(key, (suffix.clone(), t.clone()));
                Ok(t)
            }
        }
    }
}

fn addr(t: &Term) -> usize {
    t as *const Term as usize
}

/// Facts about a decoded term.
#[derive(Clone, Copy)]
struct Facts {
    forms: Forms,
    size: u64,
    open: usize,
}

/// Answers about decoded terms, computed once per shared node. Decoded terms
/// share subterms and can be exponentially larger than their sharing graph.
/// Entries are keyed by node address and keep their nodes alive.
/// Both compared nodes, kept alive so their addresses stay unique, and the answer.
type Answer = (Arc<Term>, Arc<Term>, bool);

#[derive(Default)]
struct Shared {
    facts: HashMap<usize, (Arc<Term>, Facts)>,
    /// `r == t` with every free index above `index` lowered by one; false
    /// when index `index` itself occurs free in `t`.
    lowered: HashMap<(usize, usize, usize), Answer>,
    /// `r == shift(amount, cutoff, s)`
    shifted: HashMap<(usize, usize, usize, usize), Answer>,
}

fn arc_addr(t: &Arc<Term>) -> usize {
    Arc::as_ptr(t) as usize
}

/// Structural equality, visiting each pair of shared nodes once.
fn same(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, seen: &mut HashSet<(usize, usize)>) -> bool {
        if std::ptr::eq(a, b) || seen.contains(&(addr(a), addr(b))) {
            return true;
        }
        let equal = match (a, b) {
            (Term::Var(m), Term::Var(n)) => m == n,
            (Term::App(f, x), Term::App(g, y)) => grow(|| go(f, g, seen)) && grow(|| go(x, y, seen)),
            (Term::Lam(s), Term::Lam(t)) => grow(|| go(s, t, seen)),
            _ => false,
        };
        if equal {
            seen.insert((addr(a), addr(b)));
        }
        equal
    }
    go(a, b, &mut HashSet::default())
}

impl Shared {
    fn len(&self) -> usize {
        self.facts.len() + self.lowered.len() + self.shifted.len()
    }

    fn facts(&mut self, t: &Term) -> Facts {
        match t {
            Term::Var(n) => Facts {
                forms: Forms::VAR,
                size: 1,
                open: n + 1,
            },
            Term::Lam(b) => {
                let b = self.facts_arc(b);
                Facts {
                    forms: Forms::lam(b.forms),
                    size: b.size.saturating_add(1),
                    open: b.open.saturating_sub(1),
                }
            }
            Term::App(f, a) => {
                let (f, a) = (self.facts_arc(f), self.facts_arc(a));
                Facts {
                    forms: Forms::app(f.forms, a.forms),
                    size: f.size.saturating_add(a.size).saturating_add(1),
                    open: f.open.max(a.open),
                }
            }
        }
    }

    fn facts_arc(&mut self, t: &Arc<Term>) -> Facts {
        if let Some((_, f)) = self.facts.get(&arc_addr(t)) {
            return *f;
        }
        let f = grow(|| self.facts(t));
        self.facts.insert(arc_addr(t), (t.clone(), f));
        f
    }

    fn lowered(&mut self, index: usize, t: &Term, r: &Term) -> bool {
        match (t, r) {
            (Term::Var(n), Term::Var(m)) if *n < index => m == n,
            (Term::Var(n), Term::Var(m)) => *n > index && m + 1 == *n,
            (Term::App(f, a), Term::App(g, b)) => {
                self.lowered_arc(index, f, g) && self.lowered_arc(index, a, b)
            }
            (Term::Lam(b), Term::Lam(c)) => self.lowered_arc(index + 1, b, c),
            _ => false,
        }
    }

    fn lowered_arc(&mut self, index: usize, t: &Arc<Term>, r: &Arc<Term>) -> bool {
        if Arc::ptr_eq(t, r) && self.facts_arc(t).open <= index {
            return true;
        }
        let key = (arc_addr(t), index, arc_addr(r));
        if let Some((_, _, ok)) = self.lowered.get(&key) {
            return *ok;
        }
        let ok = grow(|| self.lowered(index, t, r));
        self.lowered.insert(key, (t.clone(), r.clone(), ok));
        ok
    }

    fn shifted(&mut self, amount: usize, cutoff: usize, s: &Term, r: &Term) -> bool {
        match (s, r) {
            (Term::Var(n), Term::Var(m)) if *n >= cutoff => *m == n + amount,
            (Term::Var(n), Term::Var(m)) => m == n,
            (Term::App(f, a), Term::App(g, b)) => {
                self.shifted_arc(amount, cutoff, f, g) && self.shifted_arc(amount, cutoff, a, b)
            }
            (Term::Lam(b), Term::Lam(c)) => self.shifted_arc(amount, cutoff + 1, b, c),
            _ => false,
        }
    }

    fn shifted_arc(&mut self, amount: usize, cutoff: usize, s: &Arc<Term>, r: &Arc<Term>) -> bool {
        if Arc::ptr_eq(s, r) && self.facts_arc(s).open <= cutoff {
            return true;
        }
        let key = (arc_addr(s), amount, cutoff, arc_addr(r));
        if let Some((_, _, ok)) = self.shifted.get(&key) {
            return *ok;
        }
        let ok = grow(|| self.shifted(amount, cutoff, s, r));
        self.shifted.insert(key, (s.clone(), r.clone(), ok));
        ok
    }

    /// Whether `reduct == subst(0, arg, body)`.
    fn is_substitution(&mut self, body: &Term, arg: &Term, reduct: &Term) -> bool {
        SubstEq {
            shared: self,
            arg,
            seen: HashMap::default(),
        }
        .node(0, body, reduct)
    }
}

/// One substitution check. Subterms without the substituted index are
/// settled by the argument-independent cache in [`Shared`].
struct SubstEq<'a> {
    shared: &'a mut Shared,
    arg: &'a Term,
    seen: HashMap<(usize, usize, usize), bool>,
}

impl SubstEq<'_> {
    fn node(&mut self, index: usize, t: &Term, r: &Term) -> bool {
        match (t, r) {
            (Term::Var(n), _) if *n == index => {
                (std::ptr::eq(self.arg, r) && self.shared.facts(r).open == 0)
                    || self.shared.shifted(index, 0, self.arg, r)
            }
            (Term::Var(n), Term::Var(m)) if *n < index => m == n,
            (Term::Var(n), Term::Var(m)) => m + 1 == *n,
            (Term::App(f, a), Term::App(g, b)) => self.arc(index, f, g) && self.arc(index, a, b),
            (Term::Lam(b), Term::Lam(c)) => self.arc(index + 1, b, c),
            _ => false,
        }
    }

    fn arc(&mut self, index: usize, t: &Arc<Term>, r: &Arc<Term>) -> bool {
        if self.shared.lowered_arc(index, t, r) {
            return true;
        }
        let key = (arc_addr(t), index, arc_addr(r));
        if let Some(ok) = self.seen.get(&key) {
            return *ok;
        }
        let ok = grow(|| self.node(index, t, r));
        self.seen.insert(key, ok);
        ok
    }
}

fn ctx_frame(frame: &AnnFrame) -> CtxFrame {
    match frame {
        AnnFrame::FlApp(t) | AnnFrame::FlStrongAnn(t) => CtxFrame::AppArgHole(t.clone()),
        AnnFrame::FrApp(t) | AnnFrame::FrStrongAnn(t) => CtxFrame::AppFunHole(t.clone()),
        AnnFrame::LamBox => CtxFrame::UnderLam,
    }
}

/// Checks the transitions of one run.
pub struct Auditor {
    shadow: Vec<FrameInfo>,
    /// Decoded focus of the last configuration seen.
    head: AnnTerm,
    memo: Memo,
    global_budget: u64,
    global_spent: u64,
}

impl Auditor {
    /// Starts auditing at `initial`, which is checked like every later
    /// configuration.
    pub fn new(initial: &Config) -> Result<Auditor, Violation> {
        let mut auditor = Auditor {
            shadow: Vec::new(),
            head: AnnTerm::Plain(Term::var(0)),
            memo: Memo::default(),
            global_budget: u64::MAX,
            global_spent: 0,
        };
        auditor.rebuild(initial.stack())?;
        auditor.check_config(initial)?;
        auditor.head = auditor.decode_head(initial)?;
        Ok(auditor)
    }

    /// Every contraction is checked locally: the redex must be a
    /// β_wnf-redex, its contraction must be the new focus, and the context
    /// must be derivable in the R grammar, which by determinism makes it the
    /// unique decomposition. Contractions are also checked by running the
    /// reduction semantics on the whole decoded term until the sizes of the
    /// terms checked that way add up to `budget`.
    pub fn with_global_budget(mut self, budget: u64) -> Auditor {
        self.global_budget = budget;
        self
    }

    fn lam_count(&self) -> usize {
        self.shadow.last().map_or(0, |f| f.lam_with)
    }

    fn derives(&self) -> [bool; 3] {
        self.shadow.last().map_or([true; 3], |f| f.derives)
    }

    fn states(&self) -> u8 {
        self.shadow.last().map_or(oracle::ROOT_STATES, |f| f.states)
    }

    fn push(&mut self, node: &Stack) -> Result<(), Violation> {
        let frame = node.head().expect("pushed node is not empty");
        let lam_below = self.lam_count();
        let below = self.derives();
        let next = |sort: usize| -> Option<usize> {
            match (sort, frame) {
                (S1, Frame::PendingFun(..) | Frame::ArgWnf(_)) => Some(S1),
                (S2, Frame::StrongArg(nf)) if classify(nf).normal => Some(S2),
                (_, Frame::LamBox) => Some(S3),
                (_, Frame::StrongFun(_)) => Some(S2),
                _ => None,
            }
        };
        let derives = [S1, S2, S3].map(|s| next(s).is_some_and(|n| below[n]));
        let decoded = match frame {
            Frame::LamBox => AnnFrame::LamBox,
            Frame::PendingFun(t, e) => {
                let open = open_count(t);
                if !e.has_at_least(open) {
                    return Err(closedness(format!(
                        "(T,E)◦ frame: environment of length {} does not close a term needing {open}",
                        e.len()
                    )));
                }
                AnnFrame::FlApp(self.memo.decode_term(t, e, lam_below)?)
            }
            Frame::ArgWnf(w) => {
                let open = self.memo.open_w(w)?;
                if open > lam_below {
                    return Err(closedness(format!(
                        "open(W) in ◦W frame is {open}, above {lam_below}"
                    )));
                }
                AnnFrame::FrApp(self.memo.decode_wnf(w, lam_below)?)
            }
            Frame::StrongArg(nf) => AnnFrame::FrStrongAnn(nf.clone()),
            Frame::StrongFun(i) => {
                let open = self.memo.open_i(i)?;
                if open > lam_below {
                    return Err(closedness(format!(
                        "open(I) in I◦ frame is {open}, above {lam_below}"
                    )));
                }
                AnnFrame::FlStrongAnn(self.memo.decode_inert(i, lam_below)?)
            }
        };
        let frame_facts = match &decoded {
            AnnFrame::LamBox => Facts {
                forms: Forms::NONE,
                size: 0,
                open: 0,
            },
            AnnFrame::FlApp(t)
            | AnnFrame::FrApp(t)
            | AnnFrame::FlStrongAnn(t)
            | AnnFrame::FrStrongAnn(t) => self.memo.shared.facts(t),
        };
        let states = oracle::states_after(self.states(), &ctx_frame(&decoded), frame_facts.forms);
        self.shadow.push(FrameInfo {
            node: node.clone(),
            lam_with: lam_below + usize::from(matches!(frame, Frame::LamBox)),
            derives,
            decoded,
            size: frame_facts.size.saturating_add(1),
            states,
        });
        Ok(())
    }

    fn rebuild(&mut self, stack: &Stack) -> Result<(), Violation> {
        self.shadow.clear();
        let nodes: Vec<&Stack> = stack.suffixes().collect();
        for node in nodes.into_iter().rev() {
            self.push(node)?;
        }
        Ok(())
    }

    /// Moves the shadow to `stack`. Returns the decoded frames that were
    /// popped, innermost first, and the number of frames pushed.
    fn sync(&mut self, stack: &Stack) -> Result<(Vec<AnnFrame>, usize), Violation> {
        const REACH: usize = 4;
        let mut pushed = Vec::new();
        let mut common = None;
        let mut nodes = stack.suffixes();
        while pushed.len() < REACH {
            let Some(node) = nodes.next() else {
                common = Some(0);
                break;
            };
            let depth = self.shadow.len();
            if let Some(j) = (depth.saturating_sub(REACH)..depth)
                .rev()
                .find(|&j| self.shadow[j].node.ptr_eq(node))
            {
                common = Some(j + 1);
                break;
            }
            pushed.push(node);
        }
        let Some(common) = common else {
            let popped = self.shadow.iter().rev().map(|f| f.decoded.clone()).collect();
            self.rebuild(stack)?;
            return Ok((popped, self.shadow.len()));
        };
        let popped = self.shadow[common..]
            .iter()
            .rev()
            .map(|f| f.decoded.clone())
            .collect();
        self.shadow.truncate(common);
        let count = pushed.len();
        for node in pushed.into_iter().rev() {
            self.push(node)?;
        }
        Ok((popped, count))
    }

    fn decode_head(&mut self, k: &Config) -> Result<AnnTerm, Violation> {
        Ok(match k {
            Config::Eval {
                term, env, level, ..
            } => AnnTerm::Plain(self.memo.decode_term(term, env, *level)?),
            Config::ContW { wnf, level, .. } => AnnTerm::StrongW(self.memo.decode_wnf(wnf, *level)?),
            Config::ContN { term, .. } => AnnTerm::StrongN(term.clone()),
        })
    }

    /// The configuration rows; the shadow must describe `k`'s stack.
    fn check_config(&mut self, k: &Config) -> Result<(), Violation> {
        let level = k.level();
        let lam_boxes = self.lam_count();
        if level != lam_boxes {
            return Err(Violation::Level { level, lam_boxes });
        }
        let derives = self.derives();
        let wellformed = match k {
            Config::Eval { .. } => derives[S1],
            Config::ContW { wnf, .. } => {
                derives[S1] || (matches!(wnf, Wnf::Inert(_)) && derives[S2])
            }
            Config::ContN { term, .. } => {
                let forms = classify(term);
                if !forms.normal {
                    return Err(Violation::NotNormal);
                }
                (forms.neutral && derives[S2]) || derives[S3]
            }
        };
        if !wellformed {
            return Err(Violation::IllFormed);
        }
        let (what, open) = match k {
            Config::Eval { term, env, .. } => {
                let need = open_count(term);
                if !env.has_at_least(need) {
                    return Err(closedness(format!(
                        "environment of length {} does not close a term needing {need}",
                        env.len()
                    )));
                }
                ("open(E)", self.memo.open_e(env)?)
            }
            Config::ContW { wnf, .. } => ("open(W)", self.memo.open_w(wnf)?),
            Config::ContN { term, .. } => ("open(T)", open_count(term)),
        };
        if open > level {
            return Err(closedness(format!("{what} is {open}, above {level}")));
        }
        Ok(())
    }

    /// Checks the transition `before → after` by `rule`. `before` must be the
    /// configuration the auditor saw last.
    pub fn observe(&mut self, before: &Config, rule: Rule, after: &Config) -> Result<StepCheck, Violation> {
        self.memo.trim();
        let (popped, count) = self.sync(after.stack())?;
        let pushed: Vec<AnnFrame> = self.shadow[self.shadow.len() - count..]
            .iter()
            .rev()
            .map(|f| f.decoded.clone())
            .collect();
        self.check_config(after)?;
        let head = self.decode_head(after)?;
        let old = AnnDecomposition {
            head: std::mem::replace(&mut self.head, head.clone()),
            frames: popped,
        };
        let new = AnnDecomposition {
            head,
            frames: pushed,
        };
        if rule == Rule::Beta {
            let local = match (&old.head, old.frames.as_slice(), &new.head) {
                (
                    AnnTerm::StrongW(Term::Lam(body)),
                    [AnnFrame::FrApp(arg)],
                    AnnTerm::Plain(reduct),
                ) => {
                    new.frames.is_empty()
                        && self.memo.shared.facts(arg).forms.weak_normal
                        && self.memo.shared.is_substitution(body, arg, reduct)
                        && oracle::accepts_redex(self.states())
                }
                _ => false,
            };
            // The whole term is decoded as a tree, so its size is what the
            // global check costs.
            let size = if self.global_spent < self.global_budget {
                self.shadow
                    .iter()
                    .fold(self.memo.shared.facts(old.head.term()).size, |acc, f| {
                        acc.saturating_add(f.size)
                    })
            } else {
                u64::MAX
            };
            let global = self.global_spent.saturating_add(size) <= self.global_budget;
            let ok = local
                && (!global || {
                    self.global_spent += size;
                    let undecodable = |e: crate::Error| Violation::Undecodable(e.to_string());
                    let b = decode::plug(&decode::decode_config(before).map_err(undecodable)?);
                    let a = decode::plug(&decode::decode_config(after).map_err(undecodable)?);
                    oracle::step_rrcbv(&b) == Some(a)
                });
            if !global {
                self.global_spent = self.global_budget;
            }
            return Ok(StepCheck {
                rule,
                plug_preserved: false,
                order: decode::rlex_cmp_by(&old, &new, same),
                contraction: Some(ok),
                global,
            });
        }
        Ok(StepCheck {
            rule,
            plug_preserved: same(&decode::plug(&old), &decode::plug(&new)),
            order: decode::rlex_cmp_by(&old, &new, same),
            contraction: None,
            global: false,
        })
    }
}
