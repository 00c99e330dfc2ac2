//! Seeded, portable random number generation.
//!
//! Scenario files must be byte-identical across platforms for a given seed,
//! so the generator is pinned to SplitMix64 (Steele/Lea/Vigna): the state
//! advances by the 64-bit constant `0x9E3779B97F4A7C15` and each output is
//! the new state scrambled by two xorshift-multiply rounds with constants
//! `0xBF58476D1CE4E5B9` (shift 30) and `0x94D049BB133111EB` (shift 27),
//! finished by `z ^ (z >> 31)`. Floats take the top 53 bits of an output.

#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in `[0, 1)` with 53 bits of precision.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`. Returns `lo` when the interval is empty.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.next_f64() < p
    }

    /// Uniform index in `[0, n)`. The modulo bias is irrelevant here; what
    /// matters is that the draw sequence is identical on every platform.
    pub fn next_index(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }
}
