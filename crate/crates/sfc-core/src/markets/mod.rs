//! Market clearing: labour, credit, housing, and goods.
//!
//! Each market exposes phase functions that take the economy state and
//! a phase-local RNG. Clearing moves money inline (buyer deposits down,
//! seller deposits up) and books every leg in the per-agent flow
//! records the settlement phases and audits consume.

pub mod credit;
pub mod goods;
pub mod housing;
pub mod labour;

use rand::seq::SliceRandom;
use rand::Rng;

/// Indices 0..n in random order.
pub(crate) fn shuffled_indices(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    idx
}
