//! Deterministic seeded random source.
//!
//! One fixed generator backs every stochastic step in the pipeline:
//! xoshiro256++ (64-bit shift/rotate core) seeded through splitmix64, with
//! normals drawn by Box–Muller. The exact draw layout is part of the
//! contract — identical seeds must give identical artifacts on every
//! platform — so each consuming method documents how many base draws it
//! takes and in which order.

/// Identifier recorded in reports so an artifact names the stream that
/// produced it. Bump the suffix if the stream layout ever changes.
pub const ALGORITHM_ID: &str = "xoshiro256++/splitmix64/box-muller/v1";

/// Multiplier for deriving independent child seeds (the splitmix64 golden
/// gamma): child = master XOR index·SEED_STREAM_MIX. Index 0 reuses the
/// master seed itself.
pub const SEED_STREAM_MIX: u64 = 0x9E3779B97F4A7C15;

/// Derives the seed for the `index`-th child stream of `master` (fold
/// seeds, pipeline stage seeds).
pub fn derive_seed(master: u64, index: u64) -> u64 {
    master ^ index.wrapping_mul(SEED_STREAM_MIX)
}

#[derive(Debug, Clone)]
pub struct RandomSource {
    seed: u64,
    state: [u64; 4],
    /// Second Box–Muller variate waiting to be handed out.
    pending_normal: Option<f64>,
}

fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E3779B97F4A7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58476D1CE4E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D049BB133111EB);
    z ^ (z >> 31)
}

impl RandomSource {
    pub fn new(seed: u64) -> Self {
        let mut sm = seed;
        let state = [
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
            splitmix64(&mut sm),
        ];
        RandomSource {
            seed,
            state,
            pending_normal: None,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm_id(&self) -> &'static str {
        ALGORITHM_ID
    }

    /// Next raw 64-bit output (xoshiro256++).
    pub fn next_u64(&mut self) -> u64 {
        let s = &mut self.state;
        let result = s[0].wrapping_add(s[3]).rotate_left(23).wrapping_add(s[0]);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in [0, 1) with 53 bits of precision. One base draw.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / 9007199254740992.0)
    }

    /// Uniform in [low, high). One base draw.
    pub fn uniform(&mut self, low: f64, high: f64) -> f64 {
        low + self.next_f64() * (high - low)
    }

    /// Uniform integer in [low, high] inclusive. One base draw.
    pub fn uniform_int(&mut self, low: i64, high: i64) -> i64 {
        debug_assert!(low <= high);
        let span = (high - low + 1) as f64;
        low + (self.next_f64() * span) as i64
    }

    /// Standard normal via Box–Muller. Draws two uniforms at once and hands
    /// out the cosine variate first, caching the sine variate for the next
    /// call, so the base stream always advances in pairs.
    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.pending_normal.take() {
            return z;
        }
        // 1 - u keeps the log argument in (0, 1].
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.pending_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.standard_normal()
    }

    /// Fisher–Yates shuffle, iterating from the last index down; each step
    /// takes one base draw via `uniform_int`.
    pub fn shuffle<T>(&mut self, xs: &mut [T]) {
        for i in (1..xs.len()).rev() {
            let j = self.uniform_int(0, i as i64) as usize;
            xs.swap(i, j);
        }
    }

    /// Random permutation of 0..n.
    pub fn permutation(&mut self, n: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..n).collect();
        self.shuffle(&mut idx);
        idx
    }
}
