//! Halton low-discrepancy points. Deterministic, so every sweep that uses
//! them is reproducible bit for bit.

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Radical inverse of `index` in `base`, in [0, 1).
pub fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while index > 0 {
        out += f * (index % base) as f64;
        index /= base;
        f *= inv;
    }
    out
}

/// Coordinate `dim` of Halton point `index`. The sequence starts at index 1
/// so the corner (0, …, 0) is never produced.
pub fn halton(index: usize, dim: usize) -> f64 {
    radical_inverse(index as u64 + 1, PRIMES[dim % PRIMES.len()])
}
