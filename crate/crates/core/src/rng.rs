//! Portable seeded randomness.
//!
//! Every random choice in the toolkit (protocol splits, validation subsets,
//! selection iterations, synthetic data) is drawn from a [`SplitMix64`]
//! stream so that a seed reproduces the same result in any language that
//! implements the same few lines of integer arithmetic.

/// The SplitMix64 generator.
///
/// The state starts at the seed; each call adds the golden-ratio increment
/// `0x9E3779B97F4A7C15` and returns the mixed state.
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

    /// Uniform integer in `0..bound` by plain modulo reduction.
    ///
    /// The modulo bias is negligible for the small bounds used here and
    /// keeps the mapping trivial to reproduce elsewhere.
    pub fn below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0, "bound must be positive");
        self.next_u64() % bound
    }

    /// Uniform double in `[0, 1)` built from the top 53 bits.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal deviate (Box-Muller, one value per two uniforms).
    pub fn next_normal(&mut self) -> f64 {
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// In-place Fisher-Yates shuffle, iterating `i` from `len - 1` down to 1
    /// and swapping with `j = below(i + 1)`.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i as u64 + 1) as usize;
            items.swap(i, j);
        }
    }
}

/// Deterministic random partition of `0..n` into `(train, held_out)`, with
/// `held_out` receiving `round(n * fraction)` indices (at least one and at
/// most `n - 1`). Both halves are returned in ascending order.
pub fn random_holdout(n: usize, fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    assert!(n >= 2, "need at least two items to split");
    let n_out = ((n as f64 * fraction).round() as usize).clamp(1, n - 1);
    let mut idx: Vec<usize> = (0..n).collect();
    SplitMix64::new(seed).shuffle(&mut idx);
    let mut out = idx[..n_out].to_vec();
    let mut keep = idx[n_out..].to_vec();
    out.sort_unstable();
    keep.sort_unstable();
    (keep, out)
}
