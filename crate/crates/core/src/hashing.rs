//! Double polynomial hashing modulo 2^61 - 1, used for O(log n) longest
//! common extension queries on expanded texts.

use crate::slp::Ch;

const MOD: u64 = (1 << 61) - 1;
const BASE_A: u64 = 0x2545_F491_4F6C_DD1D % MOD;
const BASE_B: u64 = 0x9E37_79B9_7F4A_7C15 % MOD;

#[inline]
fn mulmod(a: u64, b: u64) -> u64 {
    let p = a as u128 * b as u128;
    let lo = (p & MOD as u128) as u64;
    let hi = (p >> 61) as u64;
    let mut s = lo + hi;
    if s >= MOD {
        s -= MOD;
    }
    s
}

#[inline]
fn addmod(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= MOD {
        s - MOD
    } else {
        s
    }
}

#[inline]
fn submod(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + MOD - b
    }
}

/// Prefix hashes of one text under two independent bases.
pub struct PrefixHashes {
    ha: Vec<u64>,
    hb: Vec<u64>,
}

/// Powers of the two bases, shared between texts.
pub struct HashPowers {
    pa: Vec<u64>,
    pb: Vec<u64>,
}

impl HashPowers {
    pub fn new(max_len: usize) -> Self {
        let mut pa = Vec::with_capacity(max_len + 1);
        let mut pb = Vec::with_capacity(max_len + 1);
        pa.push(1);
        pb.push(1);
        for i in 0..max_len {
            pa.push(mulmod(pa[i], BASE_A));
            pb.push(mulmod(pb[i], BASE_B));
        }
        HashPowers { pa, pb }
    }
}

impl PrefixHashes {
    pub fn new(text: &[Ch]) -> Self {
        let mut ha = Vec::with_capacity(text.len() + 1);
        let mut hb = Vec::with_capacity(text.len() + 1);
        ha.push(0);
        hb.push(0);
        for (i, &c) in text.iter().enumerate() {
            // +1 so the zero character still contributes
            let v = c as u64 + 1;
            ha.push(addmod(mulmod(ha[i], BASE_A), v));
            hb.push(addmod(mulmod(hb[i], BASE_B), v));
        }
        PrefixHashes { ha, hb }
    }

    pub fn len(&self) -> usize {
        self.ha.len() - 1
    }

    /// Combined hash of the 0-based half-open range `[i, j)`.
    #[inline]
    pub fn range(&self, pw: &HashPowers, i: usize, j: usize) -> (u64, u64) {
        let a = submod(self.ha[j], mulmod(self.ha[i], pw.pa[j - i]));
        let b = submod(self.hb[j], mulmod(self.hb[i], pw.pb[j - i]));
        (a, b)
    }
}

/// Longest common extension of `x[i..]` and `y[j..]` (0-based), via a direct
/// probe of the first few characters followed by exponential + binary search
/// on range hashes.
pub fn lce(
    x: &[Ch],
    hx: &PrefixHashes,
    i: usize,
    y: &[Ch],
    hy: &PrefixHashes,
    j: usize,
    pw: &HashPowers,
) -> usize {
    let max = (x.len() - i).min(y.len() - j);
    // short extensions dominate in practice
    let mut l = 0;
    while l < max.min(4) {
        if x[i + l] != y[j + l] {
            return l;
        }
        l += 1;
    }
    if l < 4 || l == max {
        return l;
    }
    // exponential search for the first mismatching block
    let mut hi = 8usize;
    let mut lo = 4usize; // matched prefix length
    while hi <= max && hx.range(pw, i, i + hi) == hy.range(pw, j, j + hi) {
        lo = hi;
        hi *= 2;
    }
    let mut hi = hi.min(max);
    if hx.range(pw, i, i + hi) == hy.range(pw, j, j + hi) {
        return hi;
    }
    // binary search in (lo, hi)
    while lo + 1 < hi {
        let mid = (lo + hi) / 2;
        if hx.range(pw, i, i + mid) == hy.range(pw, j, j + mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn lce_matches_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..50 {
            let n = 1 + rng.random_range(0..300usize);
            let x: Vec<Ch> = (0..n).map(|_| 'a' as Ch + rng.random_range(0..2)).collect();
            let y: Vec<Ch> = (0..n).map(|_| 'a' as Ch + rng.random_range(0..2)).collect();
            let pw = HashPowers::new(n);
            let hx = PrefixHashes::new(&x);
            let hy = PrefixHashes::new(&y);
            for _ in 0..30 {
                let i = rng.random_range(0..n);
                let j = rng.random_range(0..n);
                let fast = lce(&x, &hx, i, &y, &hy, j, &pw);
                let mut slow = 0;
                while i + slow < n && j + slow < n && x[i + slow] == y[j + slow] {
                    slow += 1;
                }
                assert_eq!(fast, slow, "lce mismatch at ({i},{j})");
            }
        }
    }
}
