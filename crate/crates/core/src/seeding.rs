//! Deterministic seed derivation: one top-level seed fans out through a
//! splittable tree keyed by a domain label and an index, so concurrent or
//! reordered consumers always see the same streams.

/// SplitMix64 step; full-period mixer over u64.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Derive a child seed from `(seed, domain, index)`.
pub fn derive(seed: u64, domain: &str, index: u64) -> u64 {
    // FNV-1a over the domain label keeps the derivation platform-stable.
    let mut h: u64 = 0xcbf29ce484222325;
    for b in domain.as_bytes() {
        h ^= *b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    splitmix64(splitmix64(seed ^ h).wrapping_add(index))
}
