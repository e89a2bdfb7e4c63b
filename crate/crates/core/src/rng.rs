//! Keyed random streams.
//!
//! A [`SeedKey`] is a 64-bit key that can be split into child keys by tag.
//! Every subroutine invocation draws from the Xoshiro256++ stream of its own key, so
//! adding or reordering calls in one branch never shifts the randomness seen by
//! another branch, and parallel trials are reproducible independently of
//! scheduling.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedKey(u64);

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn fnv1a(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3)
    })
}

impl SeedKey {
    pub fn new(master: u64) -> Self {
        SeedKey(splitmix(master))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// Derives the child stream for `tag`. Distinct tags give unrelated keys.
    pub fn child(self, tag: u64) -> Self {
        SeedKey(splitmix(self.0 ^ splitmix(tag.wrapping_mul(GOLDEN) ^ 0x5851_f42d_4c95_7f2d)))
    }

    pub fn named(self, label: &str) -> Self {
        self.child(fnv1a(label))
    }

    /// Key for `(master, trial, subroutine)`.
    pub fn for_trial(master: u64, trial: u64, subroutine: &str) -> Self {
        SeedKey::new(master).child(trial).named(subroutine)
    }

    pub fn rng(self) -> Xoshiro256PlusPlus {
        let mut seed = [0u8; 32];
        let mut z = self.0;
        for chunk in seed.chunks_exact_mut(8) {
            z = splitmix(z);
            chunk.copy_from_slice(&z.to_le_bytes());
        }
        Xoshiro256PlusPlus::from_seed(seed)
    }
}
