//! Banded diagonal dynamic programs over expanded texts: edit distance and
//! deletion distance in O(N + M + cap^2) time, with longest-common-extension
//! slides answered by range hashing.

use crate::hashing::{lce, HashPowers, PrefixHashes};
use crate::slp::Ch;

/// Expanded text plus its hash tables, reusable across a doubling search.
pub struct LvContext {
    pub x: Vec<Ch>,
    pub y: Vec<Ch>,
    hx: PrefixHashes,
    hy: PrefixHashes,
    pw: HashPowers,
}

impl LvContext {
    pub fn new(x: Vec<Ch>, y: Vec<Ch>) -> Self {
        let pw = HashPowers::new(x.len().max(y.len()));
        let hx = PrefixHashes::new(&x);
        let hy = PrefixHashes::new(&y);
        LvContext { x, y, hx, hy, pw }
    }

    #[inline]
    fn slide(&self, i: usize, j: usize) -> usize {
        lce(&self.x, &self.hx, i, &self.y, &self.hy, j, &self.pw)
    }
}

const NEG: i64 = i64::MIN / 2;

/// Edit distance if it is at most `cap`, else `None`.
///
/// Wave `h` stores, per diagonal `k = x - y`, the furthest row reachable
/// with cost `h` after sliding along matches.
pub fn edit_distance_banded(ctx: &LvContext, cap: u64) -> Option<u64> {
    let n = ctx.x.len() as i64;
    let m = ctx.y.len() as i64;
    let target_k = n - m;
    if target_k.unsigned_abs() > cap {
        return None;
    }
    let cap = cap as i64;
    let width = (2 * cap + 1) as usize;
    let off = cap;
    let mut f = vec![NEG; width];
    let mut g = vec![NEG; width];
    // wave 0
    {
        let s = ctx.slide(0, 0) as i64;
        f[off as usize] = s;
        if target_k == 0 && s >= n {
            return Some(0);
        }
    }
    for h in 1..=cap {
        let lo = -h.min(cap);
        let hi = h.min(cap);
        for k in lo..=hi {
            let idx = (k + off) as usize;
            // same diagonal carries over (waves are monotone)
            let mut best = f[idx];
            // substitution: same diagonal, consumes one char of each
            let cur = f[idx];
            if cur != NEG && cur < n.min(m + k) {
                best = best.max(cur + 1);
            }
            // deletion from x (right move): from diagonal k-1
            if k - 1 >= -cap {
                let v = f[(k - 1 + off) as usize];
                if v != NEG && v < n {
                    best = best.max(v + 1);
                }
            }
            // insertion into x (down move): from diagonal k+1
            if k + 1 <= cap {
                let v = f[(k + 1 + off) as usize];
                if v != NEG && v <= m + k {
                    best = best.max(v);
                }
            }
            if best == NEG {
                g[idx] = NEG;
                continue;
            }
            let mut x = best;
            debug_assert!(x >= 0 && x <= n && x - k <= m);
            x += ctx.slide(x as usize, (x - k) as usize) as i64;
            g[idx] = x;
            if k == target_k && x >= n {
                return Some(h as u64);
            }
        }
        std::mem::swap(&mut f, &mut g);
    }
    // cap reached without completing
    if f[(target_k + off) as usize] >= n {
        Some(cap as u64)
    } else {
        None
    }
}

/// Deletion distance (no substitutions) if it is at most `cap`, else `None`.
pub fn deletion_distance_banded(ctx: &LvContext, cap: u64) -> Option<u64> {
    let n = ctx.x.len() as i64;
    let m = ctx.y.len() as i64;
    let target_k = n - m;
    if target_k.unsigned_abs() > cap {
        return None;
    }
    let cap = cap as i64;
    let width = (2 * cap + 1) as usize;
    let off = cap;
    let mut f = vec![NEG; width];
    let mut g = vec![NEG; width];
    {
        let s = ctx.slide(0, 0) as i64;
        f[off as usize] = s;
        if target_k == 0 && s >= n {
            return Some(0);
        }
    }
    for h in 1..=cap {
        let lo = -h.min(cap);
        let hi = h.min(cap);
        for k in lo..=hi {
            let idx = (k + off) as usize;
            let mut best = NEG;
            if k - 1 >= -cap {
                let v = f[(k - 1 + off) as usize];
                if v != NEG && v < n {
                    best = best.max(v + 1);
                }
            }
            if k + 1 <= cap {
                let v = f[(k + 1 + off) as usize];
                if v != NEG && v <= m + k {
                    best = best.max(v);
                }
            }
            // same diagonal carries over (monotonicity of waves)
            best = best.max(f[idx]);
            if best == NEG {
                g[idx] = NEG;
                continue;
            }
            let mut x = best;
            x += ctx.slide(x as usize, (x - k) as usize) as i64;
            g[idx] = x;
            if k == target_k && x >= n {
                return Some(h as u64);
            }
        }
        std::mem::swap(&mut f, &mut g);
    }
    if f[(target_k + off) as usize] >= n {
        Some(cap as u64)
    } else {
        None
    }
}
