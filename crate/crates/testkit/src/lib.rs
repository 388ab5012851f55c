//! Seeded generators and brute-force oracles for the test suites. Nothing
//! here is clever on purpose: every oracle recomputes its answer the slow,
//! obvious way.

pub mod corpus;
pub mod graphs;
pub mod specs;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
