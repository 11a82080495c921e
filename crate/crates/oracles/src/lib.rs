//! Deliberately naive reference implementations used to validate the main
//! library. Everything here is written from the definitions, with no code
//! shared with the implementations under test, and no attention to speed
//! beyond what the test sizes require.

pub mod generators;
pub mod report;

/// Character type used across the oracles (kept structurally identical to
/// the main crate's alphabet but defined independently).
pub type Ch = u32;

pub fn text_of(s: &str) -> Vec<Ch> {
    s.chars().map(|c| c as Ch).collect()
}

/// Wagner–Fischer edit distance, full O(NM) table.
pub fn edit_distance_naive(x: &[Ch], y: &[Ch]) -> u64 {
    let (n, m) = (x.len(), y.len());
    let mut prev: Vec<u64> = (0..=m as u64).collect();
    let mut cur = vec![0u64; m + 1];
    for i in 1..=n {
        cur[0] = i as u64;
        for j in 1..=m {
            let sub = prev[j - 1] + u64::from(x[i - 1] != y[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// Banded edit distance: the classic O(N * cap) dynamic program restricted
/// to the diagonal band `|i - j| <= cap`. Returns `None` when the distance
/// exceeds `cap`.
pub fn edit_distance_banded_naive(x: &[Ch], y: &[Ch], cap: u64) -> Option<u64> {
    let (n, m) = (x.len() as i64, y.len() as i64);
    if (n - m).unsigned_abs() > cap {
        return None;
    }
    let w = cap as i64;
    let big = u64::MAX / 4;
    // row i stores columns j in [i-w, i+w]
    let width = (2 * w + 1) as usize;
    let mut prev = vec![big; width];
    let mut cur = vec![big; width];
    // row 0: j in [0, w]
    for j in 0..=w.min(m) {
        prev[(j + w) as usize] = j as u64;
    }
    for i in 1..=n {
        for c in cur.iter_mut() {
            *c = big;
        }
        let jlo = (i - w).max(0);
        let jhi = (i + w).min(m);
        for j in jlo..=jhi {
            let idx = (j - i + w) as usize;
            let mut best = big;
            if j > 0 {
                // left neighbour: column j-1 of row i -> idx-1 in cur
                if idx > 0 {
                    best = best.min(cur[idx - 1] + 1);
                }
                // diagonal: column j-1 of row i-1 -> same idx offset shifts by one
                let didx = j - 1 - (i - 1) + w;
                if (0..width as i64).contains(&didx) {
                    let cost = u64::from(x[(i - 1) as usize] != y[(j - 1) as usize]);
                    best = best.min(prev[didx as usize] + cost);
                }
            }
            // up: column j of row i-1
            let uidx = j - (i - 1) + w;
            if (0..width as i64).contains(&uidx) {
                best = best.min(prev[uidx as usize] + 1);
            }
            cur[idx] = best;
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    let idx = (m - n + w) as usize;
    let v = prev[idx];
    if v <= cap {
        Some(v)
    } else {
        None
    }
}

/// LCS of two strings, full table.
pub fn lcs2_naive(x: &[Ch], y: &[Ch]) -> u64 {
    let m = y.len();
    let mut prev = vec![0u64; m + 1];
    let mut cur = vec![0u64; m + 1];
    for i in 1..=x.len() {
        for j in 1..=m {
            cur[j] = if x[i - 1] == y[j - 1] {
                prev[j - 1] + 1
            } else {
                prev[j].max(cur[j - 1])
            };
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[m]
}

/// LCS of three strings, full cubic table. Errors when the state space
/// exceeds `10^7`.
pub fn lcs3_naive(x: &[Ch], y: &[Ch], z: &[Ch]) -> Result<u64, String> {
    let (a, b, c) = (x.len(), y.len(), z.len());
    if (a + 1) * (b + 1) * (c + 1) > 10_000_000 {
        return Err(format!("lcs3 state space too large: {}", (a + 1) * (b + 1) * (c + 1)));
    }
    let idx = |i: usize, j: usize, k: usize| (i * (b + 1) + j) * (c + 1) + k;
    let mut dp = vec![0u64; (a + 1) * (b + 1) * (c + 1)];
    for i in 1..=a {
        for j in 1..=b {
            for k in 1..=c {
                let v = if x[i - 1] == y[j - 1] && y[j - 1] == z[k - 1] {
                    dp[idx(i - 1, j - 1, k - 1)] + 1
                } else {
                    dp[idx(i - 1, j, k)]
                        .max(dp[idx(i, j - 1, k)])
                        .max(dp[idx(i, j, k - 1)])
                };
                dp[idx(i, j, k)] = v;
            }
        }
    }
    Ok(dp[idx(a, b, c)])
}

/// LCS for up to three strings.
pub fn lcs_naive(strings: &[&[Ch]]) -> Result<u64, String> {
    match strings.len() {
        1 => Ok(strings[0].len() as u64),
        2 => Ok(lcs2_naive(strings[0], strings[1])),
        3 => lcs3_naive(strings[0], strings[1], strings[2]),
        k => Err(format!("lcs oracle supports up to 3 strings, got {k}")),
    }
}

/// Deletion distance via the LCS identity.
pub fn deletion_distance_naive(x: &[Ch], y: &[Ch]) -> u64 {
    (x.len() + y.len()) as u64 - 2 * lcs2_naive(x, y)
}

/// Median edit distance of k strings by the position-tuple dynamic program:
/// states are consumed-prefix tuples, transitions delete one character or
/// emit a center character advancing a nonempty subset of the strings.
/// Exact, O(prod(len+1) * 2^k * k) time; errors beyond 10^6 states.
pub fn median_edit_naive(strings: &[&[Ch]]) -> Result<u64, String> {
    let k = strings.len();
    if !(1..=4).contains(&k) {
        return Err(format!("median oracle supports 1..=4 strings, got {k}"));
    }
    let dims: Vec<usize> = strings.iter().map(|s| s.len() + 1).collect();
    let states: usize = dims.iter().product();
    if states > 1_000_000 {
        return Err(format!("median oracle state space too large: {states}"));
    }
    let big = u64::MAX / 4;
    let mut dp = vec![big; states];
    dp[0] = 0;
    // strides for mixed-radix encoding of position tuples
    let mut stride = vec![1usize; k];
    for i in (0..k - 1).rev() {
        stride[i] = stride[i + 1] * dims[i + 1];
    }
    let decode = |s: usize| -> Vec<usize> {
        let mut pos = vec![0usize; k];
        let mut rem = s;
        for i in 0..k {
            pos[i] = rem / stride[i];
            rem %= stride[i];
        }
        pos
    };
    for s in 0..states {
        if dp[s] == big {
            continue;
        }
        let pos = decode(s);
        let base = dp[s];
        // delete one character from string i
        for i in 0..k {
            if pos[i] < strings[i].len() {
                let t = s + stride[i];
                if base + 1 < dp[t] {
                    dp[t] = base + 1;
                }
            }
        }
        // emit a center character c, advancing strings in subset T
        for mask in 1u32..(1 << k) {
            let mut t = s;
            let mut ok = true;
            for i in 0..k {
                if mask & (1 << i) != 0 {
                    if pos[i] < strings[i].len() {
                        t += stride[i];
                    } else {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            // candidate center chars: the next character of each advancing string
            let mut best_cost = big;
            for ci in 0..k {
                if mask & (1 << ci) == 0 {
                    continue;
                }
                let c = strings[ci][pos[ci]];
                let mut cost = (k - mask.count_ones() as usize) as u64;
                for i in 0..k {
                    if mask & (1 << i) != 0 && strings[i][pos[i]] != c {
                        cost += 1;
                    }
                }
                best_cost = best_cost.min(cost);
            }
            if base + best_cost < dp[t] {
                dp[t] = base + best_cost;
            }
        }
    }
    Ok(dp[states - 1])
}

/// All strings over `alphabet` of length `0..=max_len`, shortest first.
pub fn enumerate_strings(alphabet: &[Ch], max_len: usize) -> Vec<Vec<Ch>> {
    let mut out: Vec<Vec<Ch>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<Ch>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for s in &frontier {
            for &c in alphabet {
                let mut t = s.clone();
                t.push(c);
                next.push(t);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Center edit distance by explicit enumeration of candidate center strings
/// over the joint alphabet. Exact but exponential; tiny instances only.
pub fn center_edit_naive(strings: &[&[Ch]]) -> Result<u64, String> {
    let mut alphabet: Vec<Ch> = strings.iter().flat_map(|s| s.iter().copied()).collect();
    alphabet.sort_unstable();
    alphabet.dedup();
    let max_len = strings.iter().map(|s| s.len()).max().unwrap_or(0);
    // distance to the first string bounds the optimum; centers longer than
    // max_len + bound can never win
    let ub = strings
        .iter()
        .map(|s| edit_distance_naive(strings[0], s))
        .max()
        .unwrap_or(0);
    let limit = max_len + ub as usize;
    let candidates = (alphabet.len() as f64).powi(limit as i32 + 1);
    if candidates > 3e6 {
        return Err(format!("center enumeration too large: ~{candidates:.0} candidates"));
    }
    let mut best = u64::MAX;
    for center in enumerate_strings(&alphabet, limit) {
        let d = strings
            .iter()
            .map(|s| edit_distance_naive(s, &center))
            .max()
            .unwrap_or(0);
        best = best.min(d);
        if best == 0 {
            break;
        }
    }
    Ok(best)
}

/// All Pareto-minimal edit-distance vectors within `{0..=cap}^k`, found by
/// enumerating center strings.
pub fn edit_tuples_by_enumeration(strings: &[&[Ch]], cap: u64) -> Result<Vec<Vec<u64>>, String> {
    let mut alphabet: Vec<Ch> = strings.iter().flat_map(|s| s.iter().copied()).collect();
    alphabet.sort_unstable();
    alphabet.dedup();
    let max_len = strings.iter().map(|s| s.len()).max().unwrap_or(0);
    let limit = max_len + cap as usize;
    let candidates = (alphabet.len() as f64).powi(limit as i32 + 1);
    if candidates > 3e6 {
        return Err(format!("tuple enumeration too large: ~{candidates:.0} candidates"));
    }
    let mut tuples: Vec<Vec<u64>> = Vec::new();
    'outer: for center in enumerate_strings(&alphabet, limit) {
        let mut v = Vec::with_capacity(strings.len());
        for s in strings {
            let d = edit_distance_naive(s, &center);
            if d > cap {
                continue 'outer;
            }
            v.push(d);
        }
        // Pareto insert
        let mut dominated = false;
        for t in &tuples {
            if t.iter().zip(&v).all(|(a, b)| a <= b) {
                dominated = true;
                break;
            }
        }
        if !dominated {
            tuples.retain(|t| !v.iter().zip(t).all(|(a, b)| a <= b));
            tuples.push(v);
        }
    }
    tuples.sort();
    Ok(tuples)
}

/// Position-wise Hamming distance.
pub fn hamming_naive(x: &[Ch], y: &[Ch]) -> u64 {
    assert_eq!(x.len(), y.len());
    x.iter().zip(y).filter(|(a, b)| a != b).count() as u64
}

/// Position-wise "all characters equal" count over k strings.
pub fn hamming_all_equal_naive(strings: &[&[Ch]]) -> u64 {
    let n = strings[0].len();
    (0..n)
        .filter(|&j| !strings.iter().all(|s| s[j] == strings[0][j]))
        .count() as u64
}

/// Position-wise median Hamming distance: sum over positions of
/// `min_i sum_j [x_i != x_j]`.
pub fn hamming_median_naive(strings: &[&[Ch]]) -> u64 {
    let n = strings[0].len();
    let k = strings.len();
    let mut total = 0u64;
    for j in 0..n {
        let mut best = u64::MAX;
        for i in 0..k {
            let cost = (0..k).filter(|&l| strings[l][j] != strings[i][j]).count() as u64;
            best = best.min(cost);
        }
        total += best;
    }
    total
}

/// Offset score for a fixed set of cyclic offsets (last string unshifted).
pub fn shift_score_at(strings: &[&[Ch]], offsets: &[u64]) -> u64 {
    let n = strings[0].len();
    let k = strings.len();
    debug_assert_eq!(offsets.len(), k - 1);
    let mut score = 0u64;
    for i in 0..n {
        let c = strings[k - 1][i];
        let all = (0..k - 1).all(|s| strings[s][(i + offsets[s] as usize) % n] == c);
        if all {
            score += 1;
        }
    }
    score
}

/// Exhaustive k-shift matching: best offsets, score and distance k(N - score).
/// Ties prefer lexicographically smallest offset vectors.
pub fn shift_naive(strings: &[&[Ch]]) -> (Vec<u64>, u64, u64) {
    let n = strings[0].len();
    let k = strings.len();
    assert!(k >= 2);
    let mut best_score = 0u64;
    let mut best_offsets = vec![0u64; k - 1];
    let mut found = false;
    let mut offsets = vec![0u64; k - 1];
    loop {
        let score = shift_score_at(strings, &offsets);
        if !found || score > best_score || (score == best_score && offsets < best_offsets) {
            best_score = score;
            best_offsets = offsets.clone();
            found = true;
        }
        // increment odometer
        let mut i = k - 1;
        loop {
            if i == 0 {
                return (
                    best_offsets,
                    best_score,
                    k as u64 * (n as u64 - best_score),
                );
            }
            i -= 1;
            offsets[i] += 1;
            if offsets[i] < n as u64 {
                break;
            }
            offsets[i] = 0;
        }
    }
}

/// Alignment-graph distances from every vertex of the `(w+1) x (h+1)` grid
/// of `x` vs `y`, starting at `(sx, sy)`, by 0-1 BFS over the explicit graph.
/// Horizontal and vertical edges cost 1; diagonal edges cost 0 on matches.
pub fn alignment_graph_distances(x: &[Ch], y: &[Ch], sx: usize, sy: usize) -> Vec<Vec<u64>> {
    let (w, h) = (x.len(), y.len());
    let big = u64::MAX / 4;
    let mut dist = vec![vec![big; h + 1]; w + 1];
    let mut dq: std::collections::VecDeque<(usize, usize)> = std::collections::VecDeque::new();
    dist[sx][sy] = 0;
    dq.push_back((sx, sy));
    while let Some((a, b)) = dq.pop_front() {
        let d = dist[a][b];
        let mut relax = |na: usize, nb: usize, cost: u64, dq: &mut std::collections::VecDeque<(usize, usize)>| {
            if dist[na][nb] > d + cost {
                dist[na][nb] = d + cost;
                if cost == 0 {
                    dq.push_front((na, nb));
                } else {
                    dq.push_back((na, nb));
                }
            }
        };
        // undirected unit edges in all four axis directions
        if a > 0 {
            relax(a - 1, b, 1, &mut dq);
        }
        if a < w {
            relax(a + 1, b, 1, &mut dq);
        }
        if b > 0 {
            relax(a, b - 1, 1, &mut dq);
        }
        if b < h {
            relax(a, b + 1, 1, &mut dq);
        }
        // zero-weight diagonals on matches, both directions
        if a < w && b < h && x[a] == y[b] {
            relax(a + 1, b + 1, 0, &mut dq);
        }
        if a > 0 && b > 0 && x[a - 1] == y[b - 1] {
            relax(a - 1, b - 1, 0, &mut dq);
        }
    }
    dist
}

/// Boundary-to-boundary DIST table of the box for `x` vs `y`, via one BFS per
/// input vertex. Input vertices walk the left column upward then the top row
/// rightward; output vertices walk the bottom row rightward then the right
/// column upward.
pub fn dist_matrix_naive(x: &[Ch], y: &[Ch]) -> Vec<Vec<u64>> {
    let (w, h) = (x.len(), y.len());
    let size = w + h + 1;
    let in_vertex = |i: usize| -> (usize, usize) {
        if i <= w {
            (w - i, 0)
        } else {
            (0, i - w)
        }
    };
    let out_vertex = |j: usize| -> (usize, usize) {
        if j <= h {
            (w, j)
        } else {
            (w + h - j, h)
        }
    };
    let mut table = vec![vec![0u64; size]; size];
    for i in 0..size {
        let (sx, sy) = in_vertex(i);
        let dist = alignment_graph_distances(x, y, sx, sy);
        for j in 0..size {
            let (tx, ty) = out_vertex(j);
            table[i][j] = dist[tx][ty];
        }
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edit_distance_textbook() {
        assert_eq!(
            edit_distance_naive(&text_of("kitten"), &text_of("sitting")),
            3
        );
        assert_eq!(edit_distance_naive(&[], &text_of("abc")), 3);
        assert_eq!(edit_distance_naive(&text_of("abc"), &text_of("abc")), 0);
    }

    #[test]
    fn banded_matches_full() {
        let x = text_of("abcdefgh");
        let y = text_of("axcdffgh");
        let d = edit_distance_naive(&x, &y);
        assert_eq!(edit_distance_banded_naive(&x, &y, d), Some(d));
        assert_eq!(edit_distance_banded_naive(&x, &y, d - 1), None);
    }

    #[test]
    fn deletion_distance_identities() {
        assert_eq!(deletion_distance_naive(&text_of("ab"), &text_of("ab")), 0);
        assert_eq!(deletion_distance_naive(&text_of("ab"), &text_of("ba")), 2);
    }

    #[test]
    fn dollar_identity_holds() {
        let pairs = [("kitten", "sitting"), ("abcabc", "cbacba"), ("aa", "bb")];
        for (a, b) in pairs {
            let (x, y) = (text_of(a), text_of(b));
            let dollar = |t: &[Ch]| -> Vec<Ch> {
                t.iter().flat_map(|&c| [c, '$' as Ch]).collect()
            };
            assert_eq!(
                deletion_distance_naive(&dollar(&x), &dollar(&y)),
                2 * edit_distance_naive(&x, &y)
            );
        }
    }

    #[test]
    fn median_equals_pairwise_for_two() {
        let x = text_of("abcd");
        let y = text_of("bcda");
        assert_eq!(
            median_edit_naive(&[&x, &y]).unwrap(),
            edit_distance_naive(&x, &y)
        );
    }

    #[test]
    fn median_example() {
        let (a, b, c) = (text_of("ab"), text_of("ab"), text_of("b"));
        assert_eq!(median_edit_naive(&[&a, &b, &c]).unwrap(), 1);
    }

    #[test]
    fn median_with_empties_is_lcs_complement() {
        // median of (S1..Sk, k-1 empties) = Mk - LCS(S1..Sk)
        let s1 = text_of("abba");
        let s2 = text_of("baab");
        let empty: Vec<Ch> = Vec::new();
        let m = 4u64;
        let k = 2u64;
        let med = median_edit_naive(&[&s1, &s2, &empty]).unwrap();
        let lcs = lcs2_naive(&s1, &s2);
        assert_eq!(med, m * k - lcs);
    }

    #[test]
    fn center_two_strings_is_half_edit() {
        let x = text_of("aabb");
        let y = text_of("bbaa");
        let d = edit_distance_naive(&x, &y);
        assert_eq!(center_edit_naive(&[&x, &y]).unwrap(), d.div_ceil(2));
    }

    #[test]
    fn shift_rotation() {
        let x = text_of("ab");
        let y = text_of("ba");
        let (off, score, dist) = shift_naive(&[&x, &y]);
        assert_eq!((off, score, dist), (vec![1], 2, 0));
    }

    #[test]
    fn bfs_unordered_is_manhattan() {
        let x = text_of("ab");
        let y = text_of("cde");
        let dist = alignment_graph_distances(&x, &y, 2, 0);
        // vertex (0, 2): x' < x and y' > y, mixed orientation
        assert_eq!(dist[0][2], 2 + 2);
    }
}
