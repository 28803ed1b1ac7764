//! Counter-based random streams keyed by `(master_seed, experiment_id, trial_id)`.
//!
//! Each key selects a ChaCha8 key and stream, so a trial draws the same numbers
//! whatever order trials are evaluated in.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct StreamKey {
    pub master: u64,
    pub experiment: u64,
    pub trial: u64,
}

impl StreamKey {
    pub const fn new(master: u64, experiment: u64, trial: u64) -> Self {
        StreamKey { master, experiment, trial }
    }

    pub fn from_seed(master: u64) -> Self {
        StreamKey { master, experiment: 0, trial: 0 }
    }

    pub fn with_experiment(self, experiment: u64) -> Self {
        StreamKey { experiment, ..self }
    }

    pub fn with_trial(self, trial: u64) -> Self {
        StreamKey { trial, ..self }
    }

    /// A child key that folds the current key into the master seed, for nesting.
    pub fn child(self, experiment: u64, trial: u64) -> Self {
        let folded = splitmix64(self.master ^ splitmix64(self.experiment ^ splitmix64(self.trial)));
        StreamKey { master: folded, experiment, trial }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut key = [0u8; 32];
        let mut state = self.master;
        for chunk in key.chunks_mut(8) {
            state = splitmix64(state);
            chunk.copy_from_slice(&state.to_le_bytes());
        }
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(splitmix64(splitmix64(self.experiment) ^ self.trial));
        rng
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
