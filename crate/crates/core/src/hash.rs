//! Small deterministic hashing helpers for seeds and paths.

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

/// The splitmix64 finaliser.
pub(crate) fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Order-sensitive combination of two words.
pub(crate) fn mix(a: u64, b: u64) -> u64 {
    splitmix(a.rotate_left(23) ^ splitmix(b))
}

/// Uniform float in `[0, 1)` from the top 53 bits.
pub(crate) fn unit(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Hash of a path given as a sequence of state ids.
pub(crate) fn path_hash(path: &[usize]) -> u64 {
    let mut h = splitmix(path.len() as u64 ^ 0xA5A5);
    for (i, &s) in path.iter().enumerate() {
        h = if i == 0 { root_hash(s) } else { extend(h, s) };
    }
    h
}

pub(crate) fn root_hash(s: usize) -> u64 {
    splitmix(s as u64 ^ 0x5EED_0000_0000_0000)
}

pub(crate) fn extend(h: u64, s: usize) -> u64 {
    mix(h, s as u64)
}
