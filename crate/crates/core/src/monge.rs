//! DIST matrices of alignment-graph boxes, Monge verification, offset
//! Monge views and SMAWK row minima.
//!
//! A box over fragments `x` (height `w`) and `y` (width `h`) has `w+h+1`
//! input vertices (left column bottom-to-top, then top row left-to-right)
//! and `w+h+1` output vertices (bottom row left-to-right, then right column
//! bottom-to-top). `DIST[i][j]` is the shortest alignment-graph distance
//! from input `i` to output `j`: unit horizontal/vertical steps, free
//! diagonals on matches, and plain Manhattan distance between vertices with
//! mixed orientation.

use crate::error::{Error, Result};
use crate::partition::PhrasePartition;
use crate::slp::{Ch, SymbolId};
use std::collections::HashMap;
use std::sync::{Arc, Mutex};

/// Entries are exact distances; `INF32` is kept for generality only.
pub const INF32: u32 = u32::MAX;
/// Infinity for accumulated walk lengths.
pub const INF: u64 = u64::MAX / 4;

/// Cap on fragment lengths accepted by [`dist_matrix`].
pub const FRAGMENT_CAP: usize = 4096;

/// Dense DIST table of one box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistMatrix {
    w: usize,
    h: usize,
    data: Vec<u32>, // (w+h+1)^2, row = input index, col = output index
}

impl DistMatrix {
    pub fn side(&self) -> usize {
        self.w + self.h + 1
    }

    pub fn width(&self) -> usize {
        self.w
    }

    pub fn height(&self) -> usize {
        self.h
    }

    #[inline]
    pub fn at(&self, input: usize, output: usize) -> u32 {
        self.data[input * self.side() + output]
    }

    /// Local coordinates of input vertex `i`.
    pub fn in_vertex(&self, i: usize) -> (usize, usize) {
        if i <= self.w {
            (self.w - i, 0)
        } else {
            (0, i - self.w)
        }
    }

    /// Local coordinates of output vertex `j`.
    pub fn out_vertex(&self, j: usize) -> (usize, usize) {
        if j <= self.h {
            (self.w, j)
        } else {
            (self.w + self.h - j, self.h)
        }
    }

    /// Input index of the top-left corner `(0, 0)` (start of walks).
    pub fn in_origin(&self) -> usize {
        self.w
    }

    /// Output index of the bottom-right corner `(w, h)`.
    pub fn out_corner(&self) -> usize {
        self.h
    }

    /// Index of the input vertex at local coordinates.
    pub fn in_index(&self, x: usize, y: usize) -> usize {
        if y == 0 {
            self.w - x
        } else {
            debug_assert_eq!(x, 0);
            self.w + y
        }
    }

    /// Index of the output vertex at local coordinates.
    pub fn out_index(&self, x: usize, y: usize) -> usize {
        if x == self.w {
            y
        } else {
            debug_assert_eq!(y, self.h);
            self.h + (self.w - x)
        }
    }
}

/// Build the full DIST table of the box for `xfrag` vs `yfrag` by one
/// deletion-distance sweep per input vertex; entries between vertices with
/// mixed orientation follow the Manhattan rule.
pub fn dist_matrix(xfrag: &[Ch], yfrag: &[Ch]) -> Result<DistMatrix> {
    if xfrag.len() > FRAGMENT_CAP || yfrag.len() > FRAGMENT_CAP {
        return Err(Error::FragmentTooLarge {
            len: xfrag.len().max(yfrag.len()) as u64,
            cap: FRAGMENT_CAP as u64,
        });
    }
    let (w, h) = (xfrag.len(), yfrag.len());
    let side = w + h + 1;
    let mut m = DistMatrix {
        w,
        h,
        data: vec![0u32; side * side],
    };
    // one forward DP per input vertex over its dominated quadrant
    let mut dp = vec![0u32; (w + 1) * (h + 1)];
    for i in 0..side {
        let (sx, sy) = m.in_vertex(i);
        // dp[(x - sx) * (h - sy + 1) + (y - sy)] over x in [sx..w], y in [sy..h]
        let cols = h - sy + 1;
        for x in sx..=w {
            for y in sy..=h {
                let idx = (x - sx) * cols + (y - sy);
                dp[idx] = if x == sx && y == sy {
                    0
                } else {
                    let mut best = u32::MAX;
                    if x > sx {
                        best = best.min(dp[idx - cols] + 1);
                    }
                    if y > sy {
                        best = best.min(dp[idx - 1] + 1);
                    }
                    if x > sx && y > sy && xfrag[x - 1] == yfrag[y - 1] {
                        best = best.min(dp[idx - cols - 1]);
                    }
                    best
                };
            }
        }
        for j in 0..side {
            let (tx, ty) = m.out_vertex(j);
            // Non-dominated pairs reduce to Manhattan distance: for boundary
            // vertices the both-reversed case only occurs along a degenerate
            // side where one fragment range is empty.
            let v = if tx >= sx && ty >= sy {
                dp[(tx - sx) * cols + (ty - sy)]
            } else {
                (sx.abs_diff(tx) + sy.abs_diff(ty)) as u32
            };
            m.data[i * side + j] = v;
        }
    }
    Ok(m)
}

/// Verify the Monge property on all adjacent quadruples (sufficient by
/// telescoping).
pub fn check_monge(m: &DistMatrix) -> bool {
    let s = m.side();
    for i in 0..s.saturating_sub(1) {
        for j in 0..s.saturating_sub(1) {
            let a = m.at(i, j) as u64 + m.at(i + 1, j + 1) as u64;
            let b = m.at(i, j + 1) as u64 + m.at(i + 1, j) as u64;
            if a > b {
                return false;
            }
        }
    }
    true
}

/// Read-only matrix abstraction consumed by SMAWK.
pub trait MongeSource {
    fn rows(&self) -> usize;
    fn cols(&self) -> usize;
    fn at(&self, r: usize, c: usize) -> u64;
}

/// A DIST submatrix with per-column additive offsets: rows are output
/// (query) vertices, columns are input portals carrying accumulated walk
/// lengths. Offsets preserve the Monge property.
pub struct MongeView<'a> {
    pub dist: &'a DistMatrix,
    /// Output-vertex indices, one per row.
    pub out_rows: &'a [usize],
    /// Input-vertex indices, one per column.
    pub in_cols: &'a [usize],
    /// Accumulated walk length added to each column.
    pub offsets: &'a [u64],
}

impl MongeSource for MongeView<'_> {
    fn rows(&self) -> usize {
        self.out_rows.len()
    }
    fn cols(&self) -> usize {
        self.in_cols.len()
    }
    #[inline]
    fn at(&self, r: usize, c: usize) -> u64 {
        self.offsets[c].saturating_add(self.dist.at(self.in_cols[c], self.out_rows[r]) as u64)
    }
}

/// Row minima of a totally monotone (e.g. Monge) matrix via SMAWK.
/// Returns `(argmin column, min value)` per row; ties break toward the
/// smallest column index. O(rows + cols) matrix accesses.
pub fn smawk_row_minima<M: MongeSource>(m: &M) -> Vec<(usize, u64)> {
    let mut result = vec![(0usize, 0u64); m.rows()];
    if m.rows() == 0 || m.cols() == 0 {
        return result;
    }
    let rows: Vec<usize> = (0..m.rows()).collect();
    let cols: Vec<usize> = (0..m.cols()).collect();
    smawk_inner(m, &rows, &cols, &mut result);
    result
}

fn smawk_inner<M: MongeSource>(
    m: &M,
    rows: &[usize],
    cols: &[usize],
    result: &mut [(usize, u64)],
) {
    if rows.is_empty() {
        return;
    }
    // REDUCE: prune columns that cannot hold any row minimum.
    // The stack keeps columns that are candidates on a prefix of `rows`.
    let mut stack: Vec<usize> = Vec::with_capacity(rows.len());
    for &c in cols {
        loop {
            match stack.last() {
                None => break,
                Some(&top) => {
                    let r = rows[stack.len() - 1];
                    // strict: keeps the leftmost column on ties
                    if m.at(r, c) < m.at(r, top) {
                        stack.pop();
                    } else {
                        break;
                    }
                }
            }
        }
        if stack.len() < rows.len() {
            stack.push(c);
        }
    }
    let cols = stack;

    // recurse on odd rows
    let odd_rows: Vec<usize> = rows.iter().skip(1).step_by(2).copied().collect();
    smawk_inner(m, &odd_rows, &cols, result);

    // INTERPOLATE: fill even rows scanning between neighbours' argmins
    let mut cidx = 0usize;
    for (k, &r) in rows.iter().enumerate().step_by(2) {
        let upper = if k + 1 < rows.len() {
            result[rows[k + 1]].0
        } else {
            *cols.last().unwrap()
        };
        let mut best_col = cols[cidx];
        let mut best = m.at(r, cols[cidx]);
        while cols[cidx] < upper {
            cidx += 1;
            let v = m.at(r, cols[cidx]);
            if v < best {
                best = v;
                best_col = cols[cidx];
            }
        }
        result[r] = (best_col, best);
    }
}

/// Naive row-minima scan used as the SMAWK reference and for tiny views.
pub fn naive_row_minima<M: MongeSource>(m: &M) -> Vec<(usize, u64)> {
    (0..m.rows())
        .map(|r| {
            let mut best = (0usize, u64::MAX);
            for c in 0..m.cols() {
                let v = m.at(r, c);
                if v < best.1 {
                    best = (c, v);
                }
            }
            best
        })
        .collect()
}

/// Memoizing oracle mapping box indices `(i, j)` to DIST matrices.
///
/// Distinct phrase-symbol pairs are computed once; repeated pairs hit the
/// memo. Insertion is idempotent, so concurrent use is safe.
pub struct DistOracle {
    ppx: Arc<PhrasePartition>,
    ppy: Arc<PhrasePartition>,
    memo: Mutex<HashMap<(SymbolId, SymbolId), Arc<DistMatrix>>>,
    exp_x: Mutex<HashMap<SymbolId, Arc<Vec<Ch>>>>,
    exp_y: Mutex<HashMap<SymbolId, Arc<Vec<Ch>>>>,
    misses: Mutex<u64>,
    queries: Mutex<u64>,
}

/// Wire two phrase partitions (sharing the same tau) into a DIST oracle.
pub fn dist_box_oracle(ppx: Arc<PhrasePartition>, ppy: Arc<PhrasePartition>) -> Result<DistOracle> {
    if ppx.tau != ppy.tau {
        return Err(Error::InvalidParams(format!(
            "partitions disagree on tau: {} vs {}",
            ppx.tau, ppy.tau
        )));
    }
    Ok(DistOracle {
        ppx,
        ppy,
        memo: Mutex::new(HashMap::new()),
        exp_x: Mutex::new(HashMap::new()),
        exp_y: Mutex::new(HashMap::new()),
        misses: Mutex::new(0),
        queries: Mutex::new(0),
    })
}

impl DistOracle {
    fn phrase_expansion(&self, x_side: bool, sym: SymbolId) -> Arc<Vec<Ch>> {
        let (pp, memo) = if x_side {
            (&self.ppx, &self.exp_x)
        } else {
            (&self.ppy, &self.exp_y)
        };
        let mut guard = memo.lock().unwrap();
        guard
            .entry(sym)
            .or_insert_with(|| Arc::new(pp.g_plus.expand_symbol(sym)))
            .clone()
    }

    /// DIST matrix of box `(i, j)` (0-based phrase indices).
    pub fn get(&self, i: usize, j: usize) -> Result<Arc<DistMatrix>> {
        let sx = self.ppx.phrases[i];
        let sy = self.ppy.phrases[j];
        *self.queries.lock().unwrap() += 1;
        {
            let memo = self.memo.lock().unwrap();
            if let Some(m) = memo.get(&(sx, sy)) {
                return Ok(m.clone());
            }
        }
        let xf = self.phrase_expansion(true, sx);
        let yf = self.phrase_expansion(false, sy);
        let m = Arc::new(dist_matrix(&xf, &yf)?);
        let mut memo = self.memo.lock().unwrap();
        let entry = memo.entry((sx, sy)).or_insert_with(|| {
            *self.misses.lock().unwrap() += 1;
            m
        });
        Ok(entry.clone())
    }

    /// `(queries, distinct pairs computed)`.
    pub fn stats(&self) -> (u64, u64) {
        (*self.queries.lock().unwrap(), *self.misses.lock().unwrap())
    }

    pub fn partitions(&self) -> (&PhrasePartition, &PhrasePartition) {
        (&self.ppx, &self.ppy)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::partition;
    use crate::slp::{slp_from_text, text_of};
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;
    use std::cell::Cell;

    struct OwnedMatrix {
        rows: usize,
        cols: usize,
        data: Vec<u64>,
    }

    impl MongeSource for OwnedMatrix {
        fn rows(&self) -> usize {
            self.rows
        }
        fn cols(&self) -> usize {
            self.cols
        }
        fn at(&self, r: usize, c: usize) -> u64 {
            self.data[r * self.cols + c]
        }
    }

    struct Counting<'a, M: MongeSource> {
        inner: &'a M,
        count: Cell<usize>,
    }

    impl<M: MongeSource> MongeSource for Counting<'_, M> {
        fn rows(&self) -> usize {
            self.inner.rows()
        }
        fn cols(&self) -> usize {
            self.inner.cols()
        }
        fn at(&self, r: usize, c: usize) -> u64 {
            self.count.set(self.count.get() + 1);
            self.inner.at(r, c)
        }
    }

    /// Random Monge matrix: M[i][j] = r_i + c_j + 2D suffix-prefix sums of a
    /// non-negative density.
    fn random_monge(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> OwnedMatrix {
        let mut density = vec![vec![0u64; cols]; rows];
        for row in density.iter_mut() {
            for v in row.iter_mut() {
                *v = rng.random_range(0..4);
            }
        }
        // S[i][j] = sum over i' >= i, j' <= j
        let mut s = vec![vec![0u64; cols]; rows];
        for i in (0..rows).rev() {
            for j in 0..cols {
                let below = if i + 1 < rows { s[i + 1][j] } else { 0 };
                let left = if j > 0 { s[i][j - 1] } else { 0 };
                let diag = if i + 1 < rows && j > 0 { s[i + 1][j - 1] } else { 0 };
                s[i][j] = density[i][j] + below + left - diag;
            }
        }
        let rs: Vec<u64> = (0..rows).map(|_| rng.random_range(0..20)).collect();
        let cs: Vec<u64> = (0..cols).map(|_| rng.random_range(0..20)).collect();
        let mut data = vec![0u64; rows * cols];
        for i in 0..rows {
            for j in 0..cols {
                data[i * cols + j] = rs[i] + cs[j] + s[i][j];
            }
        }
        OwnedMatrix { rows, cols, data }
    }

    #[test]
    fn single_match_box() {
        let m = dist_matrix(&text_of("a"), &text_of("a")).unwrap();
        // corner-to-corner: input (0,0) to output (1,1) uses the free diagonal
        assert_eq!(m.at(m.in_origin(), m.out_index(1, 1)), 0);
        // input (1,0) to output (1,1): one horizontal step
        assert_eq!(m.at(m.in_index(1, 0), m.out_index(1, 1)), 1);
        // mixed orientation: input (0,1) to output (1,0) is Manhattan
        assert_eq!(m.at(m.in_index(0, 1), m.out_index(1, 0)), 2);
        assert!(check_monge(&m));
    }

    #[test]
    fn dist_matrix_matches_bfs_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..40 {
            let w = rng.random_range(0..9usize);
            let h = rng.random_range(0..9usize);
            let x: Vec<Ch> = (0..w).map(|_| 'a' as Ch + rng.random_range(0..2)).collect();
            let y: Vec<Ch> = (0..h).map(|_| 'a' as Ch + rng.random_range(0..2)).collect();
            let m = dist_matrix(&x, &y).unwrap();
            let oracle = gramdist_oracles::dist_matrix_naive(&x, &y);
            for i in 0..m.side() {
                for j in 0..m.side() {
                    assert_eq!(
                        m.at(i, j) as u64,
                        oracle[i][j],
                        "entry ({i},{j}) for {x:?} vs {y:?}"
                    );
                }
            }
            assert!(check_monge(&m));
        }
    }

    #[test]
    fn corrupted_entry_fails_monge() {
        let mut m = dist_matrix(&text_of("ab"), &text_of("ba")).unwrap();
        assert!(check_monge(&m));
        let side = m.side();
        m.data[1 * side + 1] += 5;
        assert!(!check_monge(&m));
    }

    #[test]
    fn fragment_cap_enforced() {
        let long = vec!['a' as Ch; FRAGMENT_CAP + 1];
        assert!(matches!(
            dist_matrix(&long, &[]),
            Err(Error::FragmentTooLarge { .. })
        ));
    }

    #[test]
    fn smawk_single_entry() {
        let m = OwnedMatrix {
            rows: 1,
            cols: 1,
            data: vec![7],
        };
        assert_eq!(smawk_row_minima(&m), vec![(0, 7)]);
    }

    #[test]
    fn smawk_absolute_difference() {
        let n = 9usize;
        let data: Vec<u64> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i as i64 - j as i64).unsigned_abs()))
            .collect();
        let m = OwnedMatrix {
            rows: n,
            cols: n,
            data,
        };
        let minima = smawk_row_minima(&m);
        for (i, (c, v)) in minima.iter().enumerate() {
            assert_eq!((*c, *v), (i, 0));
        }
    }

    #[test]
    fn smawk_matches_naive_on_random_monge() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..300 {
            let rows = 1 + rng.random_range(0..20usize);
            let cols = 1 + rng.random_range(0..20usize);
            let m = random_monge(&mut rng, rows, cols);
            assert_eq!(smawk_row_minima(&m), naive_row_minima(&m));
        }
    }

    #[test]
    fn smawk_access_count_is_linear() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..50 {
            let rows = 1 + rng.random_range(0..60usize);
            let cols = 1 + rng.random_range(0..60usize);
            let m = random_monge(&mut rng, rows, cols);
            let counting = Counting {
                inner: &m,
                count: Cell::new(0),
            };
            let _ = smawk_row_minima(&counting);
            let bound = 8 * (rows + cols) + 16;
            assert!(
                counting.count.get() <= bound,
                "{} accesses for {rows}x{cols}",
                counting.count.get()
            );
        }
    }

    #[test]
    fn monge_view_offsets_preserve_minima() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..60 {
            let w = 1 + rng.random_range(0..6usize);
            let h = 1 + rng.random_range(0..6usize);
            let x: Vec<Ch> = (0..w).map(|_| 'a' as Ch + rng.random_range(0..2)).collect();
            let y: Vec<Ch> = (0..h).map(|_| 'a' as Ch + rng.random_range(0..2)).collect();
            let d = dist_matrix(&x, &y).unwrap();
            let side = d.side();
            let out_rows: Vec<usize> = (0..side).collect();
            let in_cols: Vec<usize> = (0..side).step_by(2).collect();
            let offsets: Vec<u64> = in_cols.iter().map(|_| rng.random_range(0..10)).collect();
            let view = MongeView {
                dist: &d,
                out_rows: &out_rows,
                in_cols: &in_cols,
                offsets: &offsets,
            };
            assert_eq!(smawk_row_minima(&view), naive_row_minima(&view));
        }
    }

    #[test]
    fn oracle_memoizes_repeated_phrases() {
        // S -> A A, A -> a b: the tau=2 partition is exactly [A, A]
        let g = {
            let mut b = crate::slp::SlpBuilder::default();
            let a = b.terminal('a' as Ch);
            let t = b.terminal('b' as Ch);
            let ab = b.rule2(a, t);
            let s = b.rule2(ab, ab);
            b.finish(s).unwrap()
        };
        let ppx = Arc::new(partition(&g, 2).unwrap());
        let ppy = Arc::new(partition(&g, 2).unwrap());
        let oracle = dist_box_oracle(ppx.clone(), ppy.clone()).unwrap();
        let m00 = oracle.get(0, 0).unwrap();
        for i in 0..ppx.num_phrases() {
            for j in 0..ppy.num_phrases() {
                let m = oracle.get(i, j).unwrap();
                assert_eq!(*m, *m00, "all boxes share one matrix");
            }
        }
        let (queries, misses) = oracle.stats();
        assert_eq!(queries as usize, ppx.num_phrases() * ppy.num_phrases() + 1);
        assert_eq!(misses, 1);
    }

    #[test]
    fn oracle_matches_direct_dist() {
        let gx = slp_from_text(&text_of("abcabcab")).unwrap().to_cnf();
        let gy = slp_from_text(&text_of("cabcab")).unwrap().to_cnf();
        let ppx = Arc::new(partition(&gx, 3).unwrap());
        let ppy = Arc::new(partition(&gy, 3).unwrap());
        let oracle = dist_box_oracle(ppx.clone(), ppy.clone()).unwrap();
        for i in 0..ppx.num_phrases() {
            for j in 0..ppy.num_phrases() {
                let m = oracle.get(i, j).unwrap();
                let xf = ppx.g_plus.expand_symbol(ppx.phrases[i]);
                let yf = ppy.g_plus.expand_symbol(ppy.phrases[j]);
                assert_eq!(*m, dist_matrix(&xf, &yf).unwrap());
            }
        }
    }
}
