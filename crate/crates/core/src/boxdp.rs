//! Box decompositions of the alignment graph, portal-respecting walk DPs,
//! and the four end-to-end two-string algorithms: bounded exact deletion
//! distance, exact edit distance by exponential search, (1+eps) edit
//! distance, and (1+eps) LCS with adaptively placed portals.

use crate::error::{Error, Result};
use crate::lv::{deletion_distance_banded, edit_distance_banded, LvContext};
use crate::monge::{dist_box_oracle, smawk_row_minima, DistOracle, MongeView, FRAGMENT_CAP, INF};
use crate::partition::{partition, PhrasePartition};
use crate::slp::{expansion_cap, Slp};
use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

/// How the distance routines run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Banded dynamic program on the expanded strings when the expansion cap
    /// allows it, boxes otherwise.
    #[default]
    Auto,
    /// Force the box-decomposition path.
    Boxes,
    /// Force the banded path (errors if the expansion cap is exceeded).
    Banded,
}

/// Tunables for the two-string algorithms.
#[derive(Debug, Clone)]
pub struct BoxDpConfig {
    pub strategy: Strategy,
    pub tau_override: Option<u64>,
    /// Multiplier on the tau balancing formulas.
    pub tau_scale: f64,
    pub expansion_cap: u64,
}

impl Default for BoxDpConfig {
    fn default() -> Self {
        BoxDpConfig {
            strategy: Strategy::Auto,
            tau_override: None,
            tau_scale: 1.0,
            expansion_cap: expansion_cap(),
        }
    }
}

/// A box grid over two phrase partitions plus the DIST oracle.
pub struct BoxDecomposition {
    pub ppx: Arc<PhrasePartition>,
    pub ppy: Arc<PhrasePartition>,
    pub oracle: DistOracle,
    pub n: u64,
    pub m: u64,
}

impl BoxDecomposition {
    pub fn grid(&self) -> (usize, usize) {
        (self.ppx.num_phrases(), self.ppy.num_phrases())
    }

    fn bx(&self) -> &[u64] {
        &self.ppx.boundaries
    }

    fn by(&self) -> &[u64] {
        &self.ppy.boundaries
    }
}

/// Partition both strings with the same `tau` and wire up the DIST oracle.
/// Inputs are normalized to Chomsky normal form internally.
pub fn box_decomposition(gx: &Slp, gy: &Slp, tau: u64) -> Result<BoxDecomposition> {
    let (n, m) = (gx.len(), gy.len());
    if tau < 1 || tau > n + m {
        return Err(Error::InvalidTau(tau));
    }
    let cx = if gx.is_cnf() { gx.clone() } else { gx.to_cnf() };
    let cy = if gy.is_cnf() { gy.clone() } else { gy.to_cnf() };
    let ppx = Arc::new(partition(&cx, tau)?);
    let ppy = Arc::new(partition(&cy, tau)?);
    let oracle = dist_box_oracle(ppx.clone(), ppy.clone())?;
    Ok(BoxDecomposition {
        ppx,
        ppy,
        oracle,
        n,
        m,
    })
}

/// Selected boundary vertices, stored per boundary line.
#[derive(Debug, Clone)]
pub struct PortalSet {
    /// For each x-boundary line `i` (vertical coordinate `bx[i]`): sorted ys.
    pub xlines: Vec<Vec<u64>>,
    /// For each y-boundary line `j`: sorted xs.
    pub ylines: Vec<Vec<u64>>,
    /// Band radius when the set is a diagonal band (prunes box iteration).
    pub band: Option<u64>,
}

impl PortalSet {
    pub fn count(&self) -> u64 {
        let a: usize = self.xlines.iter().map(Vec::len).sum();
        let b: usize = self.ylines.iter().map(Vec::len).sum();
        (a + b) as u64
    }

    pub fn contains(&self, bd: &BoxDecomposition, x: u64, y: u64) -> bool {
        if let Ok(i) = bd.bx().binary_search(&x) {
            if self.xlines[i].binary_search(&y).is_ok() {
                return true;
            }
        }
        if let Ok(j) = bd.by().binary_search(&y) {
            if self.ylines[j].binary_search(&x).is_ok() {
                return true;
            }
        }
        false
    }
}

fn range_of(sorted: &[u64], lo: u64, hi: u64) -> &[u64] {
    let a = sorted.partition_point(|&v| v < lo);
    let b = sorted.partition_point(|&v| v <= hi);
    &sorted[a..b]
}

/// All grid vertices plus boundary vertices on geometric diagonals
/// `|x - y| = floor((1+alpha)^r)` (both signs, with 0 and 1 as base levels).
pub fn approx_portals(bd: &BoxDecomposition, alpha: f64) -> PortalSet {
    assert!(alpha > 0.0);
    let (n, m) = (bd.n, bd.m);
    let lim = n.max(m);
    let mut levels: Vec<u64> = vec![0, 1];
    let mut v = 1.0f64;
    loop {
        v *= 1.0 + alpha;
        if v > lim as f64 || !v.is_finite() {
            break;
        }
        levels.push(v as u64);
    }
    levels.sort_unstable();
    levels.dedup();

    let bx = bd.bx();
    let by = bd.by();
    let mut xlines = Vec::with_capacity(bx.len());
    for &x in bx {
        let mut ys: Vec<u64> = by.to_vec();
        for &d in &levels {
            if x >= d {
                ys.push(x - d);
            }
            if x + d <= m {
                ys.push(x + d);
            }
        }
        ys.retain(|&y| y <= m);
        ys.sort_unstable();
        ys.dedup();
        xlines.push(ys);
    }
    let mut ylines = Vec::with_capacity(by.len());
    for &y in by {
        let mut xs: Vec<u64> = bx.to_vec();
        for &d in &levels {
            if y >= d {
                xs.push(y - d);
            }
            if y + d <= n {
                xs.push(y + d);
            }
        }
        xs.retain(|&x| x <= n);
        xs.sort_unstable();
        xs.dedup();
        ylines.push(xs);
    }
    PortalSet {
        xlines,
        ylines,
        band: None,
    }
}

/// All boundary vertices within the band `|x - y| <= d_cap`.
pub fn bounded_portals(bd: &BoxDecomposition, d_cap: u64) -> PortalSet {
    let (n, m) = (bd.n, bd.m);
    let xlines = bd
        .bx()
        .iter()
        .map(|&x| {
            let lo = x.saturating_sub(d_cap);
            let hi = (x + d_cap).min(m);
            if lo > hi {
                Vec::new()
            } else {
                (lo..=hi).collect()
            }
        })
        .collect();
    let ylines = bd
        .by()
        .iter()
        .map(|&y| {
            let lo = y.saturating_sub(d_cap);
            let hi = (y + d_cap).min(n);
            if lo > hi {
                Vec::new()
            } else {
                (lo..=hi).collect()
            }
        })
        .collect();
    PortalSet {
        xlines,
        ylines,
        band: Some(d_cap),
    }
}

/// Result of a portal DP sweep: walk lengths at every reached portal plus the
/// value at `v_{N,M}` (`INF` when no portal-respecting walk gets there).
pub struct DpRun {
    pub values: HashMap<(u64, u64), u64>,
    pub target: u64,
}

/// Portals on the in-boundary of box `(i, j)` (1-based), as
/// `(in_index, coordinate)` sorted by input index.
fn in_portals(
    bd: &BoxDecomposition,
    portals: &PortalSet,
    i: usize,
    j: usize,
) -> Vec<(usize, (u64, u64))> {
    let bx = bd.bx();
    let by = bd.by();
    let (xlo, xhi) = (bx[i - 1], bx[i]);
    let (ylo, yhi) = (by[j - 1], by[j]);
    let w = (xhi - xlo) as usize;
    let mut out: Vec<(usize, (u64, u64))> = Vec::new();
    // left side: y = ylo, x descending from xhi to xlo => index xhi - x
    let mut left: Vec<u64> = range_of(&portals.ylines[j - 1], xlo, xhi).to_vec();
    for cand in [xlo, xhi] {
        if portals.xlines[bx.binary_search(&cand).unwrap()]
            .binary_search(&ylo)
            .is_ok()
            && left.binary_search(&cand).is_err()
        {
            left.push(cand);
            left.sort_unstable();
        }
    }
    for &x in left.iter().rev() {
        out.push(((xhi - x) as usize, (x, ylo)));
    }
    // top side: x = xlo, y ascending => index w + (y - ylo); corner (xlo, ylo)
    // already covered by the left side
    let mut top: Vec<u64> = range_of(&portals.xlines[i - 1], ylo, yhi).to_vec();
    for cand in [ylo, yhi] {
        if portals.ylines[by.binary_search(&cand).unwrap()]
            .binary_search(&xlo)
            .is_ok()
            && top.binary_search(&cand).is_err()
        {
            top.push(cand);
            top.sort_unstable();
        }
    }
    for &y in top.iter() {
        if y == ylo {
            continue; // corner shared with the left side
        }
        out.push((w + (y - ylo) as usize, (xlo, y)));
    }
    out
}

/// Portals on the out-boundary of box `(i, j)`, as `(out_index, coordinate)`.
fn out_portals(
    bd: &BoxDecomposition,
    portals: &PortalSet,
    i: usize,
    j: usize,
) -> Vec<(usize, (u64, u64))> {
    let bx = bd.bx();
    let by = bd.by();
    let (xlo, xhi) = (bx[i - 1], bx[i]);
    let (ylo, yhi) = (by[j - 1], by[j]);
    let h = (yhi - ylo) as usize;
    let mut out: Vec<(usize, (u64, u64))> = Vec::new();
    // bottom side: x = xhi, y ascending => index y - ylo
    let mut bottom: Vec<u64> = range_of(&portals.xlines[i], ylo, yhi).to_vec();
    for cand in [ylo, yhi] {
        if portals.ylines[by.binary_search(&cand).unwrap()]
            .binary_search(&xhi)
            .is_ok()
            && bottom.binary_search(&cand).is_err()
        {
            bottom.push(cand);
            bottom.sort_unstable();
        }
    }
    for &y in bottom.iter() {
        out.push(((y - ylo) as usize, (xhi, y)));
    }
    // right side: y = yhi, x descending => index h + (xhi - x); corner
    // (xhi, yhi) already covered by the bottom side
    let mut right: Vec<u64> = range_of(&portals.ylines[j], xlo, xhi).to_vec();
    for cand in [xlo, xhi] {
        if portals.xlines[bx.binary_search(&cand).unwrap()]
            .binary_search(&yhi)
            .is_ok()
            && right.binary_search(&cand).is_err()
        {
            right.push(cand);
            right.sort_unstable();
        }
    }
    for &x in right.iter().rev() {
        if x == xhi {
            continue;
        }
        out.push((h + (xhi - x) as usize, (x, yhi)));
    }
    out
}

/// Range of box columns `j` whose box `(i, j)` intersects the portal band.
fn band_j_range(bd: &BoxDecomposition, i: usize, band: Option<u64>) -> (usize, usize) {
    let py = bd.grid().1;
    match band {
        None => (1, py),
        Some(d) => {
            let bx = bd.bx();
            let by = bd.by();
            let xlo = bx[i - 1];
            let xhi = bx[i];
            // box intersects band iff by[j] >= xlo - d and by[j-1] <= xhi + d
            let lo_val = xlo.saturating_sub(d);
            let hi_val = xhi + d;
            let jlo = by.partition_point(|&v| v < lo_val).max(1);
            let jhi = by.partition_point(|&v| v <= hi_val).min(py);
            (jlo, jhi)
        }
    }
}

/// Shortest portal-respecting walk lengths from `v_{0,0}` to every portal,
/// processing boxes by increasing `i + j` and combining predecessor fronts
/// with DIST columns through offset Monge views and SMAWK.
pub fn portal_dp(bd: &BoxDecomposition, portals: &PortalSet) -> Result<DpRun> {
    let (px, py) = bd.grid();
    let mut values: HashMap<(u64, u64), u64> = HashMap::new();
    values.insert((0, 0), 0);

    for s in 2..=(px + py) {
        let ilo = s.saturating_sub(py).max(1);
        let ihi = (s - 1).min(px);
        for i in ilo..=ihi {
            let j = s - i;
            if let Some(_d) = portals.band {
                let (jlo, jhi) = band_j_range(bd, i, portals.band);
                if j < jlo || j > jhi {
                    continue;
                }
            }
            let mut outs = out_portals(bd, portals, i, j);
            if i == px && j == py {
                // always query the final vertex
                let target_idx = {
                    let h = (bd.by()[j] - bd.by()[j - 1]) as usize;
                    h // out index of (bx[px], by[py]) on the bottom side
                };
                if !outs.iter().any(|&(_, c)| c == (bd.n, bd.m)) {
                    outs.push((target_idx, (bd.n, bd.m)));
                    outs.sort_unstable_by_key(|&(idx, _)| idx);
                }
            }
            if outs.is_empty() {
                continue;
            }
            let ins: Vec<(usize, (u64, u64), u64)> = in_portals(bd, portals, i, j)
                .into_iter()
                .filter_map(|(idx, c)| values.get(&c).map(|&v| (idx, c, v)))
                .collect();
            if ins.is_empty() {
                continue;
            }
            let dist = bd.oracle.get(i - 1, j - 1)?;
            let out_rows: Vec<usize> = outs.iter().map(|&(idx, _)| idx).collect();
            let in_cols: Vec<usize> = ins.iter().map(|&(idx, _, _)| idx).collect();
            let offsets: Vec<u64> = ins.iter().map(|&(_, _, v)| v).collect();
            let view = MongeView {
                dist: &dist,
                out_rows: &out_rows,
                in_cols: &in_cols,
                offsets: &offsets,
            };
            let minima = smawk_row_minima(&view);
            for (row, &(_, coord)) in outs.iter().enumerate() {
                let v = minima[row].1;
                if v >= INF {
                    continue;
                }
                values
                    .entry(coord)
                    .and_modify(|old| *old = (*old).min(v))
                    .or_insert(v);
            }
        }
    }
    let target = values.get(&(bd.n, bd.m)).copied().unwrap_or(INF);
    Ok(DpRun { values, target })
}

/// Result of the bounded deletion-distance decision procedure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bounded {
    Exact(u64),
    /// The distance provably exceeds the cap.
    Exceeds,
}

impl Bounded {
    pub fn value(self) -> Option<u64> {
        match self {
            Bounded::Exact(v) => Some(v),
            Bounded::Exceeds => None,
        }
    }
}

fn pick_tau_bounded(n_sz: u64, m_sz: u64, len_sum: u64, d_cap: u64, cfg: &BoxDpConfig) -> u64 {
    if let Some(t) = cfg.tau_override {
        return t.clamp(1, len_sum.min(FRAGMENT_CAP as u64));
    }
    let t = ((d_cap as f64 * len_sum as f64) / (n_sz as f64 * m_sz as f64)).sqrt() * cfg.tau_scale;
    (t.round() as u64).clamp(1, len_sum.min(FRAGMENT_CAP as u64))
}

fn banded_feasible(gx: &Slp, gy: &Slp, cfg: &BoxDpConfig) -> bool {
    gx.len() <= cfg.expansion_cap && gy.len() <= cfg.expansion_cap
}

/// Exact deletion distance if it is at most `d_cap`, else [`Bounded::Exceeds`].
///
/// Box route: tau balances the DIST bill against the band portal count, all
/// band boundary vertices become portals, and the walk DP is exact inside
/// the band. The banded route runs the diagonal DP on the expansions; `Auto`
/// picks it whenever the expansion cap allows, which is the cheaper side at
/// any size where decompression is possible at all.
pub fn deletion_distance_bounded(gx: &Slp, gy: &Slp, d_cap: u64) -> Result<Bounded> {
    deletion_distance_bounded_with(gx, gy, d_cap, &BoxDpConfig::default())
}

pub fn deletion_distance_bounded_with(
    gx: &Slp,
    gy: &Slp,
    d_cap: u64,
    cfg: &BoxDpConfig,
) -> Result<Bounded> {
    let (n, m) = (gx.len(), gy.len());
    if d_cap < 1 || d_cap > n + m {
        return Err(Error::InvalidCap {
            cap: d_cap,
            max: n + m,
        });
    }
    if n.abs_diff(m) > d_cap {
        return Ok(Bounded::Exceeds);
    }
    let use_banded = match cfg.strategy {
        Strategy::Boxes => false,
        Strategy::Banded => {
            if !banded_feasible(gx, gy, cfg) {
                return Err(Error::ExpansionTooLarge {
                    len: n.max(m),
                    cap: cfg.expansion_cap,
                });
            }
            true
        }
        Strategy::Auto => banded_feasible(gx, gy, cfg),
    };
    if use_banded {
        let ctx = LvContext::new(
            gx.expand_with_cap(cfg.expansion_cap)?,
            gy.expand_with_cap(cfg.expansion_cap)?,
        );
        return Ok(match deletion_distance_banded(&ctx, d_cap) {
            Some(v) => Bounded::Exact(v),
            None => Bounded::Exceeds,
        });
    }
    let tau = pick_tau_bounded(gx.size(), gy.size(), n + m, d_cap, cfg);
    let bd = box_decomposition(gx, gy, tau)?;
    let portals = bounded_portals(&bd, d_cap);
    let run = portal_dp(&bd, &portals)?;
    if run.target <= d_cap {
        Ok(Bounded::Exact(run.target))
    } else {
        Ok(Bounded::Exceeds)
    }
}

/// Exact edit distance through the `a -> a$` reduction: deletion distance of
/// the transformed strings is twice the edit distance, and the bounded
/// procedure is repeated with a doubling cap. With the banded route the
/// identity lets the diagonal DP run on the original expansions directly.
pub fn edit_distance_exact(gx: &Slp, gy: &Slp) -> Result<u64> {
    edit_distance_exact_with(gx, gy, &BoxDpConfig::default())
}

pub fn edit_distance_exact_with(gx: &Slp, gy: &Slp, cfg: &BoxDpConfig) -> Result<u64> {
    let use_banded = match cfg.strategy {
        Strategy::Boxes => false,
        Strategy::Banded => {
            if !banded_feasible(gx, gy, cfg) {
                return Err(Error::ExpansionTooLarge {
                    len: gx.len().max(gy.len()),
                    cap: cfg.expansion_cap,
                });
            }
            true
        }
        Strategy::Auto => banded_feasible(gx, gy, cfg),
    };
    if use_banded {
        let ctx = LvContext::new(
            gx.expand_with_cap(cfg.expansion_cap)?,
            gy.expand_with_cap(cfg.expansion_cap)?,
        );
        let max = (ctx.x.len() + ctx.y.len()) as u64;
        let mut cap = ctx.x.len().abs_diff(ctx.y.len()).max(1) as u64;
        loop {
            if let Some(v) = edit_distance_banded(&ctx, cap) {
                return Ok(v);
            }
            if cap >= max {
                unreachable!("edit distance is at most N + M");
            }
            cap = (cap * 2).min(max);
        }
    }
    let dx = gx.dollar_transform()?;
    let dy = gy.dollar_transform()?;
    let max = dx.len() + dy.len();
    let mut d = dx.len().abs_diff(dy.len()).max(1);
    loop {
        match deletion_distance_bounded_with(&dx, &dy, d, cfg)? {
            Bounded::Exact(v) => {
                debug_assert_eq!(v % 2, 0);
                return Ok(v / 2);
            }
            Bounded::Exceeds => {
                if d >= max {
                    unreachable!("deletion distance is at most N + M");
                }
                d = (d * 2).min(max);
            }
        }
    }
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    Ok(())
}

/// Tau for the approximation routes, balancing the cubic per-pair DIST cost
/// against the portal count.
fn pick_tau_approx(n_sz: u64, m_sz: u64, len_sum: u64, eps: f64, cfg: &BoxDpConfig) -> u64 {
    if let Some(t) = cfg.tau_override {
        return t.clamp(1, len_sum.min(FRAGMENT_CAP as u64));
    }
    let num = (len_sum as f64).powi(2) * (2.0 / 3.0);
    let den = eps * n_sz as f64 * m_sz as f64;
    let t = (num / den).powf(0.2) * cfg.tau_scale;
    (t.round() as u64).clamp(1, len_sum.min(FRAGMENT_CAP as u64))
}

/// An integer in `[delta_E, (1+eps) * delta_E]`, via the deletion-distance
/// reduction and geometric diagonal portals. Degenerate parameter ranges
/// (dense portals or single-box grids) fall back to the exact routine, which
/// trivially satisfies the window.
pub fn edit_distance_approx(gx: &Slp, gy: &Slp, eps: f64) -> Result<u64> {
    edit_distance_approx_with(gx, gy, eps, &BoxDpConfig::default())
}

pub fn edit_distance_approx_with(gx: &Slp, gy: &Slp, eps: f64, cfg: &BoxDpConfig) -> Result<u64> {
    check_epsilon(eps)?;
    let dx = gx.dollar_transform()?;
    let dy = gy.dollar_transform()?;
    let len_sum = dx.len() + dy.len();
    let tau = pick_tau_approx(dx.size(), dy.size(), len_sum, eps, cfg);
    if tau <= 2 {
        return edit_distance_exact_with(gx, gy, cfg);
    }
    let bd = box_decomposition(&dx, &dy, tau)?;
    let (px, py) = bd.grid();
    let levels = px + py - 2;
    if levels == 0 {
        // single box: the DP is exact
        let run = portal_dp(&bd, &approx_portals(&bd, 1.0))?;
        debug_assert_eq!(run.target % 2, 0);
        return Ok(run.target / 2);
    }
    let alpha = ((1.0 + eps).powf(1.0 / levels as f64) - 1.0) / 2.0;
    if alpha * (len_sum as f64) < 2.0 || alpha < 1e-7 {
        // portals would be dense; exact is cheaper and always within window
        return edit_distance_exact_with(gx, gy, cfg);
    }
    let portals = approx_portals(&bd, alpha);
    let run = portal_dp(&bd, &portals)?;
    debug_assert!(run.target < INF);
    debug_assert_eq!(run.target % 2, 0);
    Ok(run.target / 2)
}

/// Exact LCS via exact deletion distance (used by the approx fallback).
fn lcs_exact(gx: &Slp, gy: &Slp, cfg: &BoxDpConfig) -> Result<u64> {
    let (n, m) = (gx.len(), gy.len());
    let max = n + m;
    let mut d = 1u64;
    loop {
        match deletion_distance_bounded_with(gx, gy, d, cfg)? {
            Bounded::Exact(v) => return Ok((n + m - v) / 2),
            Bounded::Exceeds => {
                if d >= max {
                    return Ok(0);
                }
                d = (d * 2).min(max);
            }
        }
    }
}

/// An integer in `[LCS / (1+eps), LCS]` by the adaptive-portal DP: output
/// portals are placed where the scaled prefix-LCS level increases, located
/// by binary search with on-demand distance probes.
pub fn lcs_approx(gx: &Slp, gy: &Slp, eps: f64) -> Result<u64> {
    lcs_approx_with(gx, gy, eps, &BoxDpConfig::default())
}

pub fn lcs_approx_with(gx: &Slp, gy: &Slp, eps: f64, cfg: &BoxDpConfig) -> Result<u64> {
    check_epsilon(eps)?;
    let len_sum = gx.len() + gy.len();
    let tau = pick_tau_approx(gx.size(), gy.size(), len_sum, eps, cfg);
    if tau <= 2 {
        return lcs_exact(gx, gy, cfg);
    }
    let bd = box_decomposition(gx, gy, tau)?;
    let (px, py) = bd.grid();
    let levels = px + py - 2;
    if levels == 0 {
        let run = portal_dp(&bd, &approx_portals(&bd, 1.0))?;
        return Ok((bd.n + bd.m - run.target) / 2);
    }
    let alpha = (1.0 + eps).powf(1.0 / levels as f64) - 1.0;
    if alpha * (len_sum as f64) < 2.0 || alpha < 1e-7 {
        return lcs_exact(gx, gy, cfg);
    }
    lcs_adaptive_dp(&bd, alpha)
}

/// Prefix-LCS value at a vertex from its walk length: `(x + y - D) / 2`.
#[inline]
fn lcs_value(x: u64, y: u64, d: u64) -> u64 {
    debug_assert!(d <= x + y && (x + y - d) % 2 == 0);
    (x + y - d) / 2
}

/// Level thresholds: `thresholds[r]` is the smallest L with
/// `floor(log_{1+alpha} L) >= r`; slightly conservative rounding can only
/// add portals, never lose the guarantee.
fn level_thresholds(alpha: f64, max_l: u64) -> Vec<u64> {
    let mut t = vec![1u64];
    let mut v = 1.0f64;
    loop {
        v *= 1.0 + alpha;
        let next = (v * (1.0 - 1e-12)).ceil() as u64;
        let next = next.max(t.last().unwrap() + 1);
        if next > max_l {
            break;
        }
        t.push(next);
    }
    t
}

fn level_of(thresholds: &[u64], l: u64) -> i64 {
    // number of thresholds <= l, minus one; L = 0 maps to level -1
    thresholds.partition_point(|&t| t <= l) as i64 - 1
}

fn lcs_adaptive_dp(bd: &BoxDecomposition, alpha: f64) -> Result<u64> {
    let (px, py) = bd.grid();
    let bx = bd.bx().to_vec();
    let by = bd.by().to_vec();
    let thresholds = level_thresholds(alpha, bd.n.min(bd.m).max(1));
    let mut values: HashMap<(u64, u64), u64> = HashMap::new();
    values.insert((0, 0), 0);
    // adaptively chosen portals per boundary line
    let mut xsets: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); px + 1];
    let mut ysets: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); py + 1];
    ysets[0].insert(0);

    for s in 2..=(px + py) {
        let ilo = s.saturating_sub(py).max(1);
        let ihi = (s - 1).min(px);
        for i in ilo..=ihi {
            let j = s - i;
            let (xlo, xhi) = (bx[i - 1], bx[i]);
            let (ylo, yhi) = (by[j - 1], by[j]);
            let w = (xhi - xlo) as usize;
            let h = (yhi - ylo) as usize;
            // gather known in-portals
            let mut ins: Vec<(usize, u64)> = Vec::new(); // (in index, offset)
            {
                let mut seen_corner = false;
                for &x in ysets[j - 1].range(xlo..=xhi).rev() {
                    if let Some(&v) = values.get(&(x, ylo)) {
                        ins.push(((xhi - x) as usize, v));
                        if x == xlo {
                            seen_corner = true;
                        }
                    }
                }
                for &y in xsets[i - 1].range(ylo..=yhi) {
                    if y == ylo && seen_corner {
                        continue;
                    }
                    if let Some(&v) = values.get(&(xlo, y)) {
                        if y == ylo {
                            // corner may live in either set
                            ins.push((w, v));
                        } else {
                            ins.push((w + (y - ylo) as usize, v));
                        }
                    }
                }
                ins.sort_unstable_by_key(|&(idx, _)| idx);
                ins.dedup_by_key(|&mut (idx, _)| idx);
            }
            if ins.is_empty() {
                continue;
            }
            let dist = bd.oracle.get(i - 1, j - 1)?;
            let probe = |out_idx: usize| -> u64 {
                let mut best = INF;
                for &(ii, off) in &ins {
                    let v = off.saturating_add(dist.at(ii, out_idx) as u64);
                    best = best.min(v);
                }
                best
            };
            // one side at a time: bottom row by y, right column by x
            let add_portal = |x: u64, y: u64, d: u64, values: &mut HashMap<(u64, u64), u64>,
                                  xsets: &mut Vec<BTreeSet<u64>>, ysets: &mut Vec<BTreeSet<u64>>| {
                values
                    .entry((x, y))
                    .and_modify(|old| *old = (*old).min(d))
                    .or_insert(d);
                if x == xhi {
                    xsets[i].insert(y);
                }
                if y == yhi {
                    ysets[j].insert(x);
                }
            };
            // bottom row: vertices (xhi, y), y in [ylo..yhi], L nondecreasing in y
            {
                let out_idx = |y: u64| (y - ylo) as usize;
                let d_lo = probe(out_idx(ylo));
                let d_hi = probe(out_idx(yhi));
                add_portal(xhi, ylo, d_lo, &mut values, &mut xsets, &mut ysets);
                add_portal(xhi, yhi, d_hi, &mut values, &mut xsets, &mut ysets);
                if d_lo < INF {
                    let l_lo = lcs_value(xhi, ylo, d_lo);
                    let l_hi = lcs_value(xhi, yhi, d_hi);
                    let (r_lo, r_hi) = (level_of(&thresholds, l_lo), level_of(&thresholds, l_hi));
                    for r in (r_lo + 1)..=r_hi {
                        let want = thresholds[r as usize];
                        // smallest y with L(y) >= want
                        let (mut a, mut b) = (ylo, yhi);
                        while a < b {
                            let mid = (a + b) / 2;
                            let d = probe(out_idx(mid));
                            if d < INF && lcs_value(xhi, mid, d) >= want {
                                b = mid;
                            } else {
                                a = mid + 1;
                            }
                        }
                        let d = probe(out_idx(a));
                        add_portal(xhi, a, d, &mut values, &mut xsets, &mut ysets);
                    }
                }
            }
            // right column: vertices (x, yhi), x in [xlo..xhi], L nondecreasing in x
            {
                let out_idx = |x: u64| h + (xhi - x) as usize;
                let d_lo = probe(out_idx(xlo));
                let d_hi = probe(out_idx(xhi));
                add_portal(xlo, yhi, d_lo, &mut values, &mut xsets, &mut ysets);
                add_portal(xhi, yhi, d_hi, &mut values, &mut xsets, &mut ysets);
                if d_lo < INF {
                    let l_lo = lcs_value(xlo, yhi, d_lo);
                    let l_hi = lcs_value(xhi, yhi, d_hi);
                    let (r_lo, r_hi) = (level_of(&thresholds, l_lo), level_of(&thresholds, l_hi));
                    for r in (r_lo + 1)..=r_hi {
                        let want = thresholds[r as usize];
                        let (mut a, mut b) = (xlo, xhi);
                        while a < b {
                            let mid = (a + b) / 2;
                            let d = probe(out_idx(mid));
                            if d < INF && lcs_value(mid, yhi, d) >= want {
                                b = mid;
                            } else {
                                a = mid + 1;
                            }
                        }
                        let d = probe(out_idx(a));
                        add_portal(a, yhi, d, &mut values, &mut xsets, &mut ysets);
                    }
                }
            }
        }
    }
    let d = values.get(&(bd.n, bd.m)).copied().unwrap_or(INF);
    debug_assert!(d < INF);
    Ok(lcs_value(bd.n, bd.m, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::slp::{slp_from_text, text_of, Ch};
    use gramdist_oracles as oracles;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn compressed(s: &str) -> Slp {
        slp_from_text(&text_of(s)).unwrap()
    }

    fn random_pair(rng: &mut ChaCha8Rng, max_len: usize) -> (Vec<Ch>, Vec<Ch>) {
        let kind = rng.random_range(0..3);
        let n = 1 + rng.random_range(0..max_len);
        let x: Vec<Ch> = match kind {
            0 => (0..n).map(|_| 'a' as Ch + rng.random_range(0..2)).collect(),
            1 => oracles::generators::fibonacci_word(n),
            _ => {
                let mut r2 = ChaCha8Rng::seed_from_u64(rng.random());
                oracles::generators::repeated_block_noise(&mut r2, 1 + n / 4, n, n / 10, 3)
            }
        };
        let edits = rng.random_range(0..(n / 2 + 2));
        let mut r2 = ChaCha8Rng::seed_from_u64(rng.random());
        let mut y = oracles::generators::apply_random_edits(&mut r2, &x, edits, 3);
        if y.is_empty() {
            y.push('a' as Ch);
        }
        (x, y)
    }

    #[test]
    fn trivial_grids() {
        let gx = compressed("abab");
        let gy = compressed("ba");
        let bd = box_decomposition(&gx, &gy, 6).unwrap();
        assert_eq!(bd.grid(), (1, 1));
        let bd = box_decomposition(&gx, &gy, 2).unwrap();
        let (px, py) = bd.grid();
        assert!(px >= 2 && py >= 1);
    }

    #[test]
    fn portal_dp_single_box_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..30 {
            let (x, y) = random_pair(&mut rng, 24);
            let gx = slp_from_text(&x).unwrap();
            let gy = slp_from_text(&y).unwrap();
            let bd = box_decomposition(&gx, &gy, gx.len() + gy.len()).unwrap();
            assert_eq!(bd.grid(), (1, 1));
            let run = portal_dp(&bd, &approx_portals(&bd, 5.0)).unwrap();
            assert_eq!(run.target, oracles::deletion_distance_naive(&x, &y));
        }
    }

    #[test]
    fn portal_dp_full_boundary_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for round in 0..40 {
            let (x, y) = random_pair(&mut rng, 40);
            let gx = slp_from_text(&x).unwrap();
            let gy = slp_from_text(&y).unwrap();
            let tau = 1 + rng.random_range(0..8u64.min(gx.len() + gy.len() - 1).max(1));
            let bd = box_decomposition(&gx, &gy, tau).unwrap();
            // a band of width N+M contains every boundary vertex
            let portals = bounded_portals(&bd, bd.n + bd.m);
            let run = portal_dp(&bd, &portals).unwrap();
            assert_eq!(
                run.target,
                oracles::deletion_distance_naive(&x, &y),
                "round {round} tau {tau} x={x:?} y={y:?}"
            );
        }
    }

    #[test]
    fn portal_dp_values_dominate_true_distances() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let (x, y) = random_pair(&mut rng, 30);
            let gx = slp_from_text(&x).unwrap();
            let gy = slp_from_text(&y).unwrap();
            let bd = box_decomposition(&gx, &gy, 4).unwrap();
            let portals = approx_portals(&bd, 0.3);
            let run = portal_dp(&bd, &portals).unwrap();
            let truth = oracles::alignment_graph_distances(&x, &y, 0, 0);
            for (&(vx, vy), &dv) in &run.values {
                assert!(
                    dv >= truth[vx as usize][vy as usize],
                    "walk value below true distance at ({vx},{vy})"
                );
            }
        }
    }

    #[test]
    fn bounded_band_exact_when_within_cap() {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let cfg = BoxDpConfig {
            strategy: Strategy::Boxes,
            ..Default::default()
        };
        for _ in 0..40 {
            let (x, y) = random_pair(&mut rng, 50);
            let gx = slp_from_text(&x).unwrap();
            let gy = slp_from_text(&y).unwrap();
            let d = oracles::deletion_distance_naive(&x, &y);
            for cap in [d.max(1), d + 1, d + 5, (d * 2).max(1)] {
                if cap > gx.len() + gy.len() {
                    continue;
                }
                let got = deletion_distance_bounded_with(&gx, &gy, cap, &cfg).unwrap();
                assert_eq!(got, Bounded::Exact(d), "cap {cap}");
            }
            if d > 1 {
                let got = deletion_distance_bounded_with(&gx, &gy, d - 1, &cfg).unwrap();
                assert_eq!(got, Bounded::Exceeds);
            }
        }
    }

    #[test]
    fn edit_exact_both_strategies() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for strategy in [Strategy::Banded, Strategy::Boxes, Strategy::Auto] {
            let cfg = BoxDpConfig {
                strategy,
                ..Default::default()
            };
            for _ in 0..25 {
                let (x, y) = random_pair(&mut rng, 40);
                let gx = slp_from_text(&x).unwrap();
                let gy = slp_from_text(&y).unwrap();
                let want = oracles::edit_distance_naive(&x, &y);
                assert_eq!(
                    edit_distance_exact_with(&gx, &gy, &cfg).unwrap(),
                    want,
                    "strategy {strategy:?} x={x:?} y={y:?}"
                );
            }
        }
    }

    #[test]
    fn edit_exact_kitten() {
        let gx = compressed("kitten");
        let gy = compressed("sitting");
        assert_eq!(edit_distance_exact(&gx, &gy).unwrap(), 3);
        let g = compressed("abcabc");
        assert_eq!(edit_distance_exact(&g, &g).unwrap(), 0);
    }

    #[test]
    fn approx_edit_within_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(43);
        for _ in 0..30 {
            let (x, y) = random_pair(&mut rng, 60);
            let gx = slp_from_text(&x).unwrap();
            let gy = slp_from_text(&y).unwrap();
            let want = oracles::edit_distance_naive(&x, &y);
            for eps in [0.1, 0.5, 1.0] {
                let got = edit_distance_approx(&gx, &gy, eps).unwrap();
                assert!(
                    got >= want && got as f64 <= (1.0 + eps) * want as f64 + 1e-9,
                    "eps {eps}: got {got}, exact {want}, x={x:?} y={y:?}"
                );
            }
        }
    }

    #[test]
    fn approx_edit_forced_boxes_small_tau() {
        // force the portal machinery on with a small tau override
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        let cfg = BoxDpConfig {
            strategy: Strategy::Boxes,
            tau_override: Some(5),
            ..Default::default()
        };
        for _ in 0..25 {
            let (x, y) = random_pair(&mut rng, 50);
            let gx = slp_from_text(&x).unwrap();
            let gy = slp_from_text(&y).unwrap();
            let want = oracles::edit_distance_naive(&x, &y);
            for eps in [0.3, 1.0] {
                let got = edit_distance_approx_with(&gx, &gy, eps, &cfg).unwrap();
                assert!(
                    got >= want && got as f64 <= (1.0 + eps) * want as f64 + 1e-9,
                    "eps {eps}: got {got}, exact {want}"
                );
            }
        }
    }

    #[test]
    fn lcs_approx_within_window() {
        let mut rng = ChaCha8Rng::seed_from_u64(53);
        for round in 0..30 {
            let (x, y) = random_pair(&mut rng, 60);
            let gx = slp_from_text(&x).unwrap();
            let gy = slp_from_text(&y).unwrap();
            let want = oracles::lcs2_naive(&x, &y);
            for eps in [0.1, 0.5, 1.0] {
                let got = lcs_approx(&gx, &gy, eps).unwrap();
                assert!(
                    got <= want && got as f64 >= want as f64 / (1.0 + eps) - 1e-9,
                    "round {round} eps {eps}: got {got}, exact {want}, x={x:?} y={y:?}"
                );
            }
        }
    }

    #[test]
    fn lcs_approx_forced_small_tau() {
        let mut rng = ChaCha8Rng::seed_from_u64(59);
        let cfg = BoxDpConfig {
            tau_override: Some(4),
            ..Default::default()
        };
        for _ in 0..25 {
            let (x, y) = random_pair(&mut rng, 50);
            let gx = slp_from_text(&x).unwrap();
            let gy = slp_from_text(&y).unwrap();
            let want = oracles::lcs2_naive(&x, &y);
            for eps in [0.25, 1.0] {
                let got = lcs_approx_with(&gx, &gy, eps, &cfg).unwrap();
                assert!(
                    got <= want && got as f64 >= want as f64 / (1.0 + eps) - 1e-9,
                    "eps {eps}: got {got}, exact {want}, x={x:?} y={y:?}"
                );
            }
        }
    }

    #[test]
    fn lcs_identical_and_disjoint() {
        let g = compressed("abcabcabc");
        assert_eq!(lcs_approx(&g, &g, 0.5).unwrap(), 9);
        let gx = compressed("aaaa");
        let gy = compressed("bbbb");
        assert_eq!(lcs_approx(&gx, &gy, 0.5).unwrap(), 0);
    }

    #[test]
    fn bounded_rejects_bad_cap() {
        let g = compressed("abc");
        assert!(matches!(
            deletion_distance_bounded(&g, &g, 0),
            Err(Error::InvalidCap { .. })
        ));
        assert!(matches!(
            deletion_distance_bounded(&g, &g, 100),
            Err(Error::InvalidCap { .. })
        ));
    }

    #[test]
    fn approx_portal_count_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..10 {
            let (x, y) = random_pair(&mut rng, 400);
            let gx = slp_from_text(&x).unwrap();
            let gy = slp_from_text(&y).unwrap();
            let tau = 6;
            let bd = box_decomposition(&gx, &gy, tau).unwrap();
            let alpha = 0.2;
            let portals = approx_portals(&bd, alpha);
            let (n, m) = (bd.n as f64, bd.m as f64);
            let lines = (bd.grid().0 + bd.grid().1 + 2) as f64;
            let levels = ((n + m).ln() / (1.0f64 + alpha).ln()).max(1.0);
            // grid vertices + per-line diagonal hits (both signs), constant 4
            let bound = 4.0 * (lines * lines / 4.0 + lines * (2.0 * levels + 3.0));
            assert!(
                (portals.count() as f64) <= bound,
                "portal count {} exceeds bound {bound:.0} (n={n}, m={m})",
                portals.count()
            );
        }
    }

    #[test]
    fn apportals_guarantee_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(67);
        for alpha in [0.1f64, 0.3] {
            for _ in 0..12 {
                let (x, y) = random_pair(&mut rng, 55);
                let gx = slp_from_text(&x).unwrap();
                let gy = slp_from_text(&y).unwrap();
                let tau = 1 + rng.random_range(0..10u64);
                let tau = tau.min(gx.len() + gy.len());
                let bd = box_decomposition(&gx, &gy, tau).unwrap();
                let portals = approx_portals(&bd, alpha);
                let run = portal_dp(&bd, &portals).unwrap();
                let truth = oracles::alignment_graph_distances(&x, &y, 0, 0);
                let bx = bd.bx();
                let by = bd.by();
                for (&(vx, vy), &dv) in &run.values {
                    // smallest i+j over boxes containing the vertex
                    let i_min = bx.partition_point(|&b| b < vx).max(1);
                    let j_min = by.partition_point(|&b| b < vy).max(1);
                    let expo = (i_min + j_min) as i32;
                    let d = truth[vx as usize][vy as usize] as f64;
                    let bound = (1.0 + 2.0 * alpha).powi(expo) * d;
                    assert!(
                        (dv as f64) <= bound + 1e-9,
                        "portal ({vx},{vy}): value {dv}, bound {bound:.3}, alpha {alpha}"
                    );
                }
            }
        }
    }
}
