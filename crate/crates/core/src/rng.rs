//! Seeded, splittable pseudo-random streams.
//!
//! Every stream is a xoshiro256** generator whose 256-bit state is expanded
//! from a 64-bit seed with SplitMix64. Child streams are derived from a master
//! seed and a label, so runs are reproducible bit-for-bit in any language that
//! implements the same three pieces:
//!
//! - `derive_seed(master, label, index)`: FNV-1a 64 of the UTF-8 label, then
//!   `mix64(master ^ mix64(label_hash) ^ mix64(index + GOLDEN))`.
//! - uniform `f64` in `[0, 1)`: top 53 bits of `next_u64` times `2^-53`.
//! - standard normal: Box–Muller on `(u1, u2)` with `u1` mapped to `(0, 1]`;
//!   the cosine branch is returned first and the sine branch is cached.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// SplitMix64 finalizer.
pub fn mix64(mut x: u64) -> u64 {
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Seed of the child stream `label[index]` under `master`.
pub fn derive_seed(master: u64, label: &str, index: u64) -> u64 {
    mix64(master ^ mix64(fnv1a(label.as_bytes())) ^ mix64(index.wrapping_add(GOLDEN)))
}

/// Well-known child streams of a training run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StreamRole {
    Init,
    RealData,
    Noise,
    Harness,
}

impl StreamRole {
    pub fn label(self) -> &'static str {
        match self {
            StreamRole::Init => "init",
            StreamRole::RealData => "real-data",
            StreamRole::Noise => "noise",
            StreamRole::Harness => "harness",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RngStream {
    state: [u64; 4],
    spare_normal: Option<f64>,
    draws: u64,
}

impl RngStream {
    pub fn from_seed(seed: u64) -> Self {
        let mut sm = seed;
        let mut next = || {
            sm = sm.wrapping_add(GOLDEN);
            mix64(sm)
        };
        let state = [next(), next(), next(), next()];
        Self {
            state,
            spare_normal: None,
            draws: 0,
        }
    }

    /// Child stream for one of the fixed training roles.
    pub fn for_role(master: u64, role: StreamRole) -> Self {
        Self::from_seed(derive_seed(master, role.label(), 0))
    }

    /// Child stream for an arbitrary label and index (e.g. per-epoch evaluation).
    pub fn child(master: u64, label: &str, index: u64) -> Self {
        Self::from_seed(derive_seed(master, label, index))
    }

    /// Number of raw 64-bit words consumed so far.
    pub fn draws(&self) -> u64 {
        self.draws
    }

    pub fn next_u64(&mut self) -> u64 {
        self.draws += 1;
        let s = &mut self.state;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform in `[0, 1)`.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform index in `0..n`.
    pub fn index(&mut self, n: usize) -> usize {
        let i = (self.next_f64() * n as f64) as usize;
        i.min(n - 1)
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = 1.0 - self.next_f64();
        let u2 = self.next_f64();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = 2.0 * std::f64::consts::PI * u2;
        self.spare_normal = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn normal(&mut self, mean: f64, std: f64) -> f64 {
        mean + std * self.standard_normal()
    }
}
