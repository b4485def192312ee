//! Deterministic seed derivation and stateless per-step noise.
//!
//! All randomness in the toolkit flows from a single 64-bit master seed.
//! Per-source streams are derived by hashing a fixed label into the master
//! seed, so swapping one source (say, the disturbance) does not perturb the
//! draws of any other. Signal sources additionally need *random access* in
//! time (the pole-placement controller reads the reference up to `n` steps
//! back, the one-step-ahead controller one step forward), so their draws are
//! pure functions of `(stream seed, t, component)` rather than sequential
//! generator state.

/// Stream label for the parameter-trajectory generator.
pub const LABEL_THETA: &str = "theta";
/// Stream label for the disturbance source `w`.
pub const LABEL_W: &str = "w";
/// Stream label for the reference source.
pub const LABEL_R: &str = "r";
/// Stream label for the unmodelled-dynamics direction source.
pub const LABEL_DIR: &str = "dir";

/// SplitMix64 step; the de-facto standard 64-bit finalizer/mixer.
#[inline]
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf29ce484222325;
    for &b in bytes {
        hash ^= b as u64;
        hash = hash.wrapping_mul(0x100000001b3);
    }
    hash
}

/// Derive the seed of a named sub-stream from the master seed.
pub fn derive_stream(master: u64, label: &str) -> u64 {
    splitmix64(master ^ fnv1a(label.as_bytes()))
}

/// Uniform draw in `[0, 1)` addressed by `(seed, t, component)`.
pub fn unit_uniform(seed: u64, t: i64, component: u64) -> f64 {
    let word = splitmix64(seed ^ splitmix64((t as u64) ^ component.rotate_left(32)));
    // 53 mantissa bits of the mixed word.
    (word >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform draw in `[-amplitude, amplitude]` addressed by `(seed, t, component)`.
pub fn symmetric_uniform(seed: u64, t: i64, component: u64, amplitude: f64) -> f64 {
    amplitude * (2.0 * unit_uniform(seed, t, component) - 1.0)
}
