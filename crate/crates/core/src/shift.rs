//! k-Shift Distance: cyclic alignments maximizing the number of positions
//! where all strings agree. Two strings go through per-symbol FFT
//! cross-correlation; k strings enumerate the middle offsets and reduce to
//! the two-string case through a merged string; an l-group split gives an
//! l-approximation bracket.

use crate::error::{Error, Result};
use crate::slp::{Ch, Slp, MERGE_MISMATCH};

/// Inputs larger than this risk losing integrality in the f64 FFT.
pub const FFT_LEN_CAP: usize = 1 << 20;
/// Guard on the `N^(k-2)` offset enumeration.
pub const OFFSET_ENUM_CAP: u64 = 1_000_000;

/// Best cyclic alignment: offsets for all but the last string (which stays
/// fixed), the agreement count, and the distance `k * (N - score)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftResult {
    pub offsets: Vec<u64>,
    pub score: u64,
    pub distance: u64,
}

#[derive(Clone, Copy)]
struct Cpx {
    re: f64,
    im: f64,
}

impl Cpx {
    const ZERO: Cpx = Cpx { re: 0.0, im: 0.0 };

    #[inline]
    fn mul(self, o: Cpx) -> Cpx {
        Cpx {
            re: self.re * o.re - self.im * o.im,
            im: self.re * o.im + self.im * o.re,
        }
    }

    #[inline]
    fn conj(self) -> Cpx {
        Cpx {
            re: self.re,
            im: -self.im,
        }
    }

    #[inline]
    fn add(self, o: Cpx) -> Cpx {
        Cpx {
            re: self.re + o.re,
            im: self.im + o.im,
        }
    }

    #[inline]
    fn sub(self, o: Cpx) -> Cpx {
        Cpx {
            re: self.re - o.re,
            im: self.im - o.im,
        }
    }
}

/// Iterative radix-2 FFT (inverse via `inv`, unscaled).
fn fft(buf: &mut [Cpx], inv: bool) {
    let n = buf.len();
    debug_assert!(n.is_power_of_two());
    // bit-reversal permutation
    let mut j = 0usize;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            buf.swap(i, j);
        }
    }
    let sign = if inv { 1.0 } else { -1.0 };
    let mut len = 2;
    while len <= n {
        let ang = sign * 2.0 * std::f64::consts::PI / len as f64;
        let wl = Cpx {
            re: ang.cos(),
            im: ang.sin(),
        };
        for chunk in buf.chunks_mut(len) {
            let mut w = Cpx { re: 1.0, im: 0.0 };
            for i in 0..len / 2 {
                let u = chunk[i];
                let v = chunk[i + len / 2].mul(w);
                chunk[i] = u.add(v);
                chunk[i + len / 2] = u.sub(v);
                w = w.mul(wl);
            }
        }
        len <<= 1;
    }
}

/// Per-offset agreement scores of `x` against `y` (cyclic), summed over the
/// alphabet via FFT cross-correlation. `scores[d]` counts positions `i` with
/// `x[(i + d) mod N] == y[i]`.
fn cyclic_scores(x: &[Ch], y: &[Ch], threads: usize) -> Vec<u64> {
    let n = x.len();
    let size = (2 * n).next_power_of_two();
    let mut alphabet: Vec<Ch> = x.iter().chain(y.iter()).copied().collect();
    alphabet.sort_unstable();
    alphabet.dedup();

    let correlate_one = |sym: Ch| -> Vec<f64> {
        let mut fa = vec![Cpx::ZERO; size];
        let mut fb = vec![Cpx::ZERO; size];
        for (i, &c) in x.iter().enumerate() {
            if c == sym {
                fa[i].re = 1.0;
            }
        }
        for (i, &c) in y.iter().enumerate() {
            if c == sym {
                fb[i].re = 1.0;
            }
        }
        fft(&mut fa, false);
        fft(&mut fb, false);
        for i in 0..size {
            fa[i] = fa[i].mul(fb[i].conj());
        }
        fft(&mut fa, true);
        fa.iter().map(|c| c.re / size as f64).collect()
    };

    let sum_into = |acc: &mut [f64], corr: &[f64]| {
        // linear correlation at lag d lives at index d; the wrapped part of
        // cyclic lag d is the linear correlation at lag d - N, at index
        // size - (N - d)
        for (d, a) in acc.iter_mut().enumerate() {
            *a += corr[d];
            if d > 0 {
                *a += corr[size - (n - d)];
            }
        }
    };

    let mut acc = vec![0.0f64; n];
    if threads <= 1 || alphabet.len() <= 1 {
        for &sym in &alphabet {
            sum_into(&mut acc, &correlate_one(sym));
        }
    } else {
        let chunks: Vec<Vec<Ch>> = alphabet
            .chunks(alphabet.len().div_ceil(threads))
            .map(|c| c.to_vec())
            .collect();
        let partials: Vec<Vec<f64>> = std::thread::scope(|scope| {
            let handles: Vec<_> = chunks
                .iter()
                .map(|chunk| {
                    scope.spawn(move || {
                        let mut local = vec![0.0f64; n];
                        for &sym in chunk {
                            sum_into(&mut local, &correlate_one(sym));
                        }
                        local
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        // deterministic reduction in chunk order
        for p in partials {
            for (a, v) in acc.iter_mut().zip(p) {
                *a += v;
            }
        }
    }
    acc.iter().map(|&v| (v + 0.5).floor() as u64).collect()
}

/// Best cyclic offset of `x` against a fixed `y`: exact integer scores from
/// rounded FFT correlations, ties toward the smallest offset.
pub fn shift_match_2(x: &[Ch], y: &[Ch]) -> Result<ShiftResult> {
    shift_match_2_threads(x, y, 1)
}

pub fn shift_match_2_threads(x: &[Ch], y: &[Ch], threads: usize) -> Result<ShiftResult> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch(x.len() as u64, y.len() as u64));
    }
    if x.is_empty() {
        return Err(Error::EmptyInput);
    }
    if x.len() > FFT_LEN_CAP {
        return Err(Error::TooLarge(format!(
            "shift matching capped at N = {FFT_LEN_CAP}"
        )));
    }
    let scores = cyclic_scores(x, y, threads);
    let (mut best_d, mut best_s) = (0u64, 0u64);
    for (d, &s) in scores.iter().enumerate() {
        if s > best_s {
            best_s = s;
            best_d = d as u64;
        }
    }
    let n = x.len() as u64;
    Ok(ShiftResult {
        offsets: vec![best_d],
        score: best_s,
        distance: 2 * (n - best_s),
    })
}

/// Best cyclic alignment of `k` strings: enumerate offsets of strings
/// `2..k-1`, merge them with the last string (mismatches become a fresh
/// character absent from the first string), and solve the two-string case.
pub fn shift_match_k(strings: &[&[Ch]]) -> Result<ShiftResult> {
    shift_match_k_threads(strings, 1)
}

pub fn shift_match_k_threads(strings: &[&[Ch]], threads: usize) -> Result<ShiftResult> {
    let k = strings.len();
    if !(2..=4).contains(&k) {
        return Err(Error::UnsupportedK(k));
    }
    let n = strings[0].len();
    for s in strings {
        if s.len() != n {
            return Err(Error::LengthMismatch(n as u64, s.len() as u64));
        }
    }
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if k == 2 {
        return shift_match_2_threads(strings[0], strings[1], threads);
    }
    let combos = (n as u64).pow(k as u32 - 2);
    if combos > OFFSET_ENUM_CAP {
        return Err(Error::TooLarge(format!(
            "offset enumeration needs {combos} rounds (cap {OFFSET_ENUM_CAP})"
        )));
    }
    // fresh mismatch character: '@' unless the first string uses it
    let mismatch: Ch = if strings[0].contains(&MERGE_MISMATCH) {
        strings.iter().flat_map(|s| s.iter()).max().unwrap() + 1
    } else {
        MERGE_MISMATCH
    };

    let mut best: Option<ShiftResult> = None;
    let mut mid = vec![0u64; k - 2]; // offsets of strings 2..k-1
    let mut merged = vec![0 as Ch; n];
    loop {
        for i in 0..n {
            let c = strings[k - 1][i];
            let agree = (0..k - 2).all(|s| strings[s + 1][(i + mid[s] as usize) % n] == c);
            merged[i] = if agree { c } else { mismatch };
        }
        let scores = cyclic_scores(strings[0], &merged, threads);
        for (d, &s) in scores.iter().enumerate() {
            let mut offsets = Vec::with_capacity(k - 1);
            offsets.push(d as u64);
            offsets.extend_from_slice(&mid);
            let better = match &best {
                None => true,
                Some(b) => s > b.score || (s == b.score && offsets < b.offsets),
            };
            if better {
                best = Some(ShiftResult {
                    offsets,
                    score: s,
                    distance: k as u64 * (n as u64 - s),
                });
            }
        }
        // odometer over the middle offsets
        let mut idx = k - 2;
        loop {
            if idx == 0 {
                return Ok(best.unwrap());
            }
            idx -= 1;
            mid[idx] += 1;
            if (mid[idx] as usize) < n {
                break;
            }
            mid[idx] = 0;
        }
    }
}

/// Bracket produced by the group-partition approximation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShiftBracket {
    /// Max of the group distances: a lower bound on the true distance.
    pub lower: u64,
    /// Sum of the group distances: an upper bound; upper <= l * lower
    /// whenever lower > 0.
    pub upper: u64,
    /// Per-group results (each group solved with the last string appended).
    pub groups: Vec<ShiftResult>,
}

/// Split strings `1..k-1` into `l` near-equal groups, append the last string
/// to each, and solve each group exactly. Group distances are scaled to the
/// full k-string count so `[max, sum]` brackets the true distance.
pub fn shift_distance_approx(strings: &[&[Ch]], l: usize) -> Result<ShiftBracket> {
    let k = strings.len();
    if k < 3 {
        return Err(Error::UnsupportedK(k));
    }
    if !(2..=k - 1).contains(&l) {
        return Err(Error::InvalidGroups(l));
    }
    let n = strings[0].len();
    for s in strings {
        if s.len() != n {
            return Err(Error::LengthMismatch(n as u64, s.len() as u64));
        }
    }
    let heads = &strings[..k - 1];
    let per = heads.len().div_ceil(l);
    let mut groups = Vec::with_capacity(l);
    let mut lower = 0u64;
    let mut upper = 0u64;
    for chunk in heads.chunks(per) {
        let mut grp: Vec<&[Ch]> = chunk.to_vec();
        grp.push(strings[k - 1]);
        let mut res = shift_match_k(&grp)?;
        // rescale the unmatched count to all k strings
        res.distance = k as u64 * (n as u64 - res.score);
        lower = lower.max(res.distance);
        upper += res.distance;
        groups.push(res);
    }
    Ok(ShiftBracket {
        lower,
        upper,
        groups,
    })
}

/// Convenience wrapper accepting compressed inputs (decompress-and-solve;
/// compression gives no speedup for shift matching).
pub fn shift_match_slp(grammars: &[&Slp]) -> Result<ShiftResult> {
    let texts: Vec<Vec<Ch>> = grammars
        .iter()
        .map(|g| g.expand())
        .collect::<Result<_>>()?;
    let refs: Vec<&[Ch]> = texts.iter().map(|t| t.as_slice()).collect();
    shift_match_k(&refs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slp::text_of;
    use gramdist_oracles as oracles;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn self_alignment() {
        let x = text_of("abcabc");
        let r = shift_match_2(&x, &x).unwrap();
        assert_eq!(r.offsets, vec![0]);
        assert_eq!(r.score, 6);
        assert_eq!(r.distance, 0);
    }

    #[test]
    fn simple_rotation() {
        let x = text_of("ab");
        let y = text_of("ba");
        let r = shift_match_2(&x, &y).unwrap();
        assert_eq!((r.offsets, r.score), (vec![1], 2));
    }

    #[test]
    fn fft_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(101);
        for _ in 0..60 {
            let n = 1 + rng.random_range(0..200usize);
            let sigma = 1 + rng.random_range(0..8);
            let x: Vec<Ch> = (0..n).map(|_| 'a' as Ch + rng.random_range(0..sigma)).collect();
            let y: Vec<Ch> = (0..n).map(|_| 'a' as Ch + rng.random_range(0..sigma)).collect();
            let got = shift_match_2(&x, &y).unwrap();
            let (off, score, dist) = oracles::shift_naive(&[&x, &y]);
            assert_eq!(got.score, score, "n={n} x={x:?} y={y:?}");
            assert_eq!(got.offsets, off);
            assert_eq!(got.distance, dist);
        }
    }

    #[test]
    fn fft_matches_brute_force_larger() {
        let mut rng = ChaCha8Rng::seed_from_u64(103);
        for n in [256usize, 512] {
            let x: Vec<Ch> = (0..n).map(|_| 'a' as Ch + rng.random_range(0..8)).collect();
            let y: Vec<Ch> = (0..n).map(|_| 'a' as Ch + rng.random_range(0..8)).collect();
            let got = shift_match_2(&x, &y).unwrap();
            let (_, score, _) = oracles::shift_naive(&[&x, &y]);
            assert_eq!(got.score, score);
        }
    }

    #[test]
    fn threads_are_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(107);
        let n = 300;
        let x: Vec<Ch> = (0..n).map(|_| 'a' as Ch + rng.random_range(0..6)).collect();
        let y: Vec<Ch> = (0..n).map(|_| 'a' as Ch + rng.random_range(0..6)).collect();
        let a = shift_match_2_threads(&x, &y, 1).unwrap();
        let b = shift_match_2_threads(&x, &y, 4).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn three_equal_strings() {
        let x = text_of("abca");
        let r = shift_match_k(&[&x, &x, &x]).unwrap();
        assert_eq!(r.offsets, vec![0, 0]);
        assert_eq!(r.score, 4);
    }

    #[test]
    fn rotations_recovered() {
        let x = text_of("abcdefg");
        let rot = |t: &[Ch], r: usize| -> Vec<Ch> {
            (0..t.len()).map(|i| t[(i + r) % t.len()]).collect()
        };
        let x1 = rot(&x, 3);
        let x2 = rot(&x, 5);
        let r = shift_match_k(&[&x1, &x2, &x]).unwrap();
        assert_eq!(r.score, 7);
        // x1[i + d1] == x[i] needs d1 = len - 3 mod len
        assert_eq!(r.offsets, vec![4, 2]);
    }

    #[test]
    fn k3_matches_exhaustive() {
        let mut rng = ChaCha8Rng::seed_from_u64(109);
        for _ in 0..25 {
            let n = 2 + rng.random_range(0..40usize);
            let strings: Vec<Vec<Ch>> = (0..3)
                .map(|_| (0..n).map(|_| 'a' as Ch + rng.random_range(0..3)).collect())
                .collect();
            let refs: Vec<&[Ch]> = strings.iter().map(|s| s.as_slice()).collect();
            let got = shift_match_k(&refs).unwrap();
            let (off, score, dist) = oracles::shift_naive(&refs);
            assert_eq!((got.score, got.distance), (score, dist), "n={n}");
            assert_eq!(got.offsets, off);
        }
    }

    #[test]
    fn cyclic_invariance() {
        let mut rng = ChaCha8Rng::seed_from_u64(113);
        for _ in 0..20 {
            let n = 2 + rng.random_range(0..60usize);
            let x: Vec<Ch> = (0..n).map(|_| 'a' as Ch + rng.random_range(0..4)).collect();
            let y: Vec<Ch> = (0..n).map(|_| 'a' as Ch + rng.random_range(0..4)).collect();
            let r = rng.random_range(0..n);
            let rot = |t: &[Ch]| -> Vec<Ch> { (0..n).map(|i| t[(i + r) % n]).collect() };
            let a = shift_match_2(&x, &y).unwrap();
            let b = shift_match_2(&rot(&x), &rot(&y)).unwrap();
            assert_eq!(a.score, b.score);
        }
    }

    #[test]
    fn approx_bracket_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(127);
        for _ in 0..15 {
            let n = 2 + rng.random_range(0..12usize);
            let strings: Vec<Vec<Ch>> = (0..5)
                .map(|_| (0..n).map(|_| 'a' as Ch + rng.random_range(0..2)).collect())
                .collect();
            let refs: Vec<&[Ch]> = strings.iter().map(|s| s.as_slice()).collect();
            let (_, _, exact) = oracles::shift_naive(&refs);
            for l in [2usize, 3, 4] {
                let br = shift_distance_approx(&refs, l).unwrap();
                assert!(
                    br.lower <= exact && exact <= br.upper,
                    "bracket [{}, {}] misses exact {exact} (l={l}, n={n})",
                    br.lower,
                    br.upper
                );
                if br.lower > 0 {
                    assert!(br.upper <= l as u64 * br.lower);
                }
            }
        }
    }

    #[test]
    fn approx_identical_strings() {
        let x = text_of("abab");
        let refs: Vec<&[Ch]> = vec![&x; 5];
        let br = shift_distance_approx(&refs, 2).unwrap();
        assert_eq!((br.lower, br.upper), (0, 0));
    }

    #[test]
    fn invalid_groups_rejected() {
        let x = text_of("ab");
        let refs: Vec<&[Ch]> = vec![&x; 5];
        assert!(matches!(
            shift_distance_approx(&refs, 1),
            Err(Error::InvalidGroups(1))
        ));
        assert!(matches!(
            shift_distance_approx(&refs, 5),
            Err(Error::InvalidGroups(5))
        ));
    }

    #[test]
    fn slp_wrapper() {
        let g = crate::slp::slp_from_text(&text_of("abab")).unwrap();
        let r = shift_match_slp(&[&g, &g]).unwrap();
        assert_eq!(r.score, 4);
    }
}
