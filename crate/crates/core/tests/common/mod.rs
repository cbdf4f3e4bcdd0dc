#![allow(dead_code)]

use lamvm::Term;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A closed term with between 2 and `max_size` constructors.
pub fn random_closed_term(rng: &mut ChaCha8Rng, max_size: usize) -> Term {
    let size = rng.random_range(2..=max_size);
    random_term(rng, size, 0)
}

/// A term of exactly `size` constructors with free indices below `scope`.
/// Requires `size >= 2` when `scope == 0`.
pub fn random_term(rng: &mut ChaCha8Rng, size: usize, scope: usize) -> Term {
    match size {
        1 => Term::var(rng.random_range(0..scope)),
        2 => Term::lam(random_term(rng, 1, scope + 1)),
        _ => {
            let fits = |n: usize| n > 1 || scope > 0;
            let splits: Vec<usize> = (1..size - 1).filter(|&l| fits(l) && fits(size - 1 - l)).collect();
            if splits.is_empty() || rng.random_bool(0.4) {
                Term::lam(random_term(rng, size - 1, scope + 1))
            } else {
                let left = splits[rng.random_range(0..splits.len())];
                Term::app(
                    random_term(rng, left, scope),
                    random_term(rng, size - 1 - left, scope),
                )
            }
        }
    }
}

pub fn random_corpus(seed: u64, count: usize, max_size: usize) -> Vec<Term> {
    let mut rng = rng(seed);
    (0..count).map(|_| random_closed_term(&mut rng, max_size)).collect()
}
