//! Reproducible random streams.
//!
//! Every draw in an experiment is keyed by a `(master_seed, run_index, purpose)`
//! triple. The key is mixed through SplitMix64 into a 256-bit ChaCha key, and
//! ChaCha is a counter-based generator, so any stream can be regenerated on its
//! own without replaying the others.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;

/// What a stream is used for. Distinct purposes never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Target,
    Data,
    Init,
    Perturbation,
    Probe,
    Custom(u64),
}

impl Purpose {
    fn tag(self) -> u64 {
        match self {
            Purpose::Target => 0x7461_7267,
            Purpose::Data => 0x6461_7461,
            Purpose::Init => 0x696e_6974,
            Purpose::Perturbation => 0x7065_7274,
            Purpose::Probe => 0x7072_6f62,
            Purpose::Custom(v) => 0x6375_7374_0000_0000 ^ v,
        }
    }
}

#[inline]
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Root of a family of independent streams.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeedStream {
    master: u64,
}

impl SeedStream {
    pub fn new(master_seed: u64) -> Self {
        Self {
            master: master_seed,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master
    }

    /// Stream for one `(run_index, purpose)` pair.
    pub fn stream(&self, run_index: u64, purpose: Purpose) -> Stream {
        let mut state = self.master;
        let a = splitmix64(&mut state);
        let mut state = a ^ run_index.wrapping_mul(0xd134_2543_de82_ef95);
        let b = splitmix64(&mut state);
        let mut state = b ^ purpose.tag();
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        Stream {
            rng: ChaCha12Rng::from_seed(key),
        }
    }
}

/// A single reproducible random stream.
#[derive(Debug, Clone)]
pub struct Stream {
    rng: ChaCha12Rng,
}

impl Stream {
    pub fn normal(&mut self) -> f64 {
        self.rng.sample(StandardNormal)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    pub fn normal_vec(&mut self, len: usize) -> Vec<f64> {
        (0..len).map(|_| self.normal()).collect()
    }

    /// Uniform point on the unit sphere in `dim` coordinates.
    pub fn unit_vector(&mut self, dim: usize) -> Vec<f64> {
        loop {
            let mut v = self.normal_vec(dim);
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            if norm > 1e-300 {
                v.iter_mut().for_each(|x| *x /= norm);
                return v;
            }
        }
    }

    pub fn rng(&mut self) -> &mut ChaCha12Rng {
        &mut self.rng
    }
}
