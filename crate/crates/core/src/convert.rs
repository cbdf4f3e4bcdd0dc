//! Convertibility by comparing partial normal forms.
//!
//! Both terms are normalized by the strong call-by-value machine in lockstep.
//! Each machine emits an event whenever it reveals a part of the normal form
//! (a binder or a normalized argument of a neutral term); the first
//! difference between the two event streams proves that the normal forms
//! differ, so the check can stop before either run finishes.

use crate::knv::{decode_prefix, Config, Machine, PrefixEvent, Progress};
use crate::term::{Partial, Term};
use crate::Error;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Convertible,
    NotConvertible {
        left_prefix: Vec<PrefixEvent>,
        right_prefix: Vec<PrefixEvent>,
        /// First index where the two event streams differ.
        diverging_index: usize,
        /// The part of each normal form known when the differing events were
        /// emitted.
        left_partial: Partial,
        right_partial: Partial,
    },
    /// Fuel ran out before the streams could be told apart.
    Unknown { budget_spent: u64 },
}

struct Side {
    machine: Machine,
    events: Vec<PrefixEvent>,
    /// The configuration right after each event.
    configs: Vec<Option<Config>>,
    stopped: bool,
}

impl Side {
    fn new(t: &Term, fuel: u64) -> Result<Side, Error> {
        Ok(Side {
            machine: Machine::new(t, fuel)?,
            events: Vec::new(),
            configs: Vec::new(),
            stopped: false,
        })
    }

    /// Advances by one transition, recording any event.
    fn advance(&mut self) -> Result<(), Error> {
        if self.stopped {
            return Ok(());
        }
        match self.machine.step()? {
            Progress::Moved(rule) => {
                let config = self.machine.config();
                if let Some(event) = crate::knv::prefix_event(rule, config) {
                    self.events.push(event);
                    self.configs.push(Some(config.clone()));
                }
            }
            Progress::Finished(nf) => {
                self.events.push(PrefixEvent::Done(nf));
                self.configs.push(None);
                self.stopped = true;
            }
            Progress::OutOfFuel => self.stopped = true,
        }
        Ok(())
    }

    fn partial(&self, index: usize) -> Partial {
        match (&self.configs[index], &self.events[index]) {
            (_, PrefixEvent::Done(nf)) => Partial::from(nf),
            (Some(config), _) => decode_prefix(config.stack()),
            (None, _) => Partial::Hole,
        }
    }

    fn finished(&self) -> bool {
        matches!(self.events.last(), Some(PrefixEvent::Done(_)))
    }
}

/// Decides whether `t1` and `t2` have the same normal form, spending at most
/// `fuel` transitions on each.
pub fn convertible(t1: &Term, t2: &Term, fuel: u64) -> Result<Verdict, Error> {
    let mut left = Side::new(t1, fuel)?;
    let mut right = Side::new(t2, fuel)?;
    let mut compared = 0;
    loop {
        left.advance()?;
        right.advance()?;
        while compared < left.events.len().min(right.events.len()) {
            if left.events[compared] != right.events[compared] {
                return Ok(Verdict::NotConvertible {
                    left_prefix: left.events[..=compared].to_vec(),
                    right_prefix: right.events[..=compared].to_vec(),
                    diverging_index: compared,
                    left_partial: left.partial(compared),
                    right_partial: right.partial(compared),
                });
            }
            compared += 1;
        }
        if left.finished() && right.finished() {
            return Ok(Verdict::Convertible);
        }
        // A stopped side with no event left to compare settles nothing more.
        let exhausted = |s: &Side, other: &Side| s.stopped && other.events.len() >= s.events.len();
        if (left.stopped && right.stopped) || exhausted(&left, &right) || exhausted(&right, &left)
        {
            let spent = left.machine.stats().transitions() + right.machine.stats().transitions();
            return Ok(Verdict::Unknown {
                budget_spent: spent,
            });
        }
    }
}
