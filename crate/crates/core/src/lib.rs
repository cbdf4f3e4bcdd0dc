//! A normalization workbench for the pure lambda calculus.
//!
//! * [`knv`]: an abstract machine for strong, twice right-to-left
//!   call-by-value normalization.
//! * [`kn`]: Crégut's machine for normal-order normalization.
//! * [`nbe`]: the two normalization-by-evaluation functions matching the
//!   machines.
//! * [`oracle`]: a machine-free reduction semantics for both strategies.
//! * [`decode`]: decoding of machine configurations back into annotated
//!   decompositions of terms, used to check the machine against the oracle.
//! * [`convert`]: convertibility checking by comparing partial normal forms.

pub mod audit;
pub mod convert;
pub mod corpus;
pub mod decode;
pub mod kn;
pub mod knv;
pub mod list;
pub mod nbe;
pub mod oracle;
pub mod term;

use thiserror::Error;

pub use term::{church, parse, print, Notation, ParseError, Term};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error("term is not closed ({open} enclosing binder(s) missing)")]
    OpenTerm { open: usize },
    #[error("machine is stuck: {0}")]
    Stuck(String),
    #[error("configuration cannot be decoded: {0}")]
    Undecodable(String),
    #[error("replay diverged from the recorded trace: {0}")]
    Replay(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}
