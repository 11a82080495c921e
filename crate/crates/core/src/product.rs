//! Product grammars over tuple characters and additive aggregation: the
//! compressed Hamming distance pipeline and its k-string generalizations.

use crate::error::{Error, Result};
use crate::partition::{partition, PhrasePartition};
use crate::slp::{Ch, Slp, SlpBuilder, SymbolId};
use std::collections::HashMap;

/// One product symbol's origin: equal-length fragments of one symbol per
/// input grammar, at least one a prefix and one a suffix of its symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelevantTuple {
    pub symbols: Vec<SymbolId>,
    pub starts: Vec<u64>,
    pub len: u64,
    /// Index whose fragment is a prefix of its symbol's expansion.
    pub prefix_anchor: usize,
    /// Index whose fragment is a suffix of its symbol's expansion.
    pub suffix_anchor: usize,
}

/// Grammar over k-tuple characters: terminal code points index `tuples`.
pub struct ProductSlp {
    pub slp: Slp,
    pub tuples: Vec<Vec<Ch>>,
    pub provenance: HashMap<SymbolId, RelevantTuple>,
    pub k: usize,
}

impl ProductSlp {
    pub fn len(&self) -> u64 {
        self.slp.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Decode the expansion into explicit tuple characters.
    pub fn expand_tuples(&self) -> Result<Vec<Vec<Ch>>> {
        let flat = self.slp.expand()?;
        Ok(flat
            .into_iter()
            .map(|idx| self.tuples[idx as usize].clone())
            .collect())
    }

    /// Sum of `delta` over all positions, one bottom-up pass over the grammar.
    pub fn additive_aggregate(&self, delta: impl Fn(&[Ch]) -> u64) -> u64 {
        let mut vals: Vec<u64> = Vec::with_capacity(self.slp.symbol_count());
        for a in self.slp.symbols() {
            let v = match self.slp.terminal_char(a) {
                Some(idx) => delta(&self.tuples[idx as usize]),
                None => self.slp.rhs(a).iter().map(|&b| vals[b as usize]).sum(),
            };
            vals.push(v);
        }
        vals[self.slp.start() as usize]
    }
}

struct Builder<'a> {
    parts: &'a [PhrasePartition],
    out: SlpBuilder,
    memo: HashMap<(Vec<SymbolId>, Vec<u64>), SymbolId>,
    tuples: Vec<Vec<Ch>>,
    tuple_ids: HashMap<Vec<Ch>, Ch>,
    provenance: HashMap<SymbolId, RelevantTuple>,
}

impl Builder<'_> {
    fn tuple_terminal(&mut self, chars: Vec<Ch>) -> SymbolId {
        let idx = match self.tuple_ids.get(&chars) {
            Some(&i) => i,
            None => {
                let i = self.tuples.len() as Ch;
                self.tuples.push(chars.clone());
                self.tuple_ids.insert(chars, i);
                i
            }
        };
        self.out.terminal(idx)
    }

    /// Symbol expanding to the tuple-character string of the fragments
    /// `exp(symbols[i])[starts[i] .. starts[i] + len)`.
    fn build(&mut self, symbols: Vec<SymbolId>, starts: Vec<u64>, len: u64) -> SymbolId {
        debug_assert!(len >= 1);
        let key = (symbols, starts);
        if let Some(&id) = self.memo.get(&key) {
            return id;
        }
        let (symbols, starts) = key;
        // pick the first non-terminal component to descend into
        let j = (0..symbols.len())
            .find(|&i| !self.parts[i].g_plus.is_terminal(symbols[i]))
            .unwrap_or(usize::MAX);
        let id = if j == usize::MAX {
            // all terminals: len == 1, a single tuple character
            debug_assert_eq!(len, 1);
            let chars: Vec<Ch> = symbols
                .iter()
                .enumerate()
                .map(|(i, &s)| self.parts[i].g_plus.terminal_char(s).unwrap())
                .collect();
            self.tuple_terminal(chars)
        } else {
            let g = &self.parts[j].g_plus;
            let rhs = g.rhs(symbols[j]).to_vec();
            debug_assert!(!rhs.is_empty() && rhs.len() <= 2);
            if rhs.len() == 1 {
                let mut syms = symbols.clone();
                syms[j] = rhs[0];
                self.build(syms, starts.clone(), len)
            } else {
                let left_len = g.sym_len(rhs[0]);
                let s = starts[j];
                if s + len <= left_len {
                    let mut syms = symbols.clone();
                    syms[j] = rhs[0];
                    self.build(syms, starts.clone(), len)
                } else if s >= left_len {
                    let mut syms = symbols.clone();
                    syms[j] = rhs[1];
                    let mut sts = starts.clone();
                    sts[j] = s - left_len;
                    self.build(syms, sts, len)
                } else {
                    // straddles the split point of symbols[j]
                    let l1 = left_len - s;
                    let mut lsyms = symbols.clone();
                    lsyms[j] = rhs[0];
                    let left = self.build(lsyms, starts.clone(), l1);
                    let mut rsyms = symbols.clone();
                    rsyms[j] = rhs[1];
                    let mut rsts: Vec<u64> = starts.iter().map(|&x| x + l1).collect();
                    rsts[j] = 0;
                    let right = self.build(rsyms, rsts, len - l1);
                    self.out.rule2(left, right)
                }
            }
        };
        // record provenance with the anchor flags
        let prefix_anchor = (0..symbols.len()).find(|&i| starts[i] == 0);
        let suffix_anchor = (0..symbols.len())
            .find(|&i| starts[i] + len == self.parts[i].g_plus.sym_len(symbols[i]));
        debug_assert!(prefix_anchor.is_some() && suffix_anchor.is_some());
        self.provenance.entry(id).or_insert(RelevantTuple {
            symbols: symbols.clone(),
            starts: starts.clone(),
            len,
            prefix_anchor: prefix_anchor.unwrap_or(0),
            suffix_anchor: suffix_anchor.unwrap_or(0),
        });
        self.memo.insert((symbols, starts), id);
        id
    }
}

/// Build the grammar of the position-wise tuple string of `k` equal-length
/// inputs: phrase-partition each grammar with the shared `tau`, merge the
/// boundary sets, and create one product symbol per merged phrase.
///
/// Falls back to the trivial decompress-and-zip grammar when the product of
/// the grammar sizes exceeds N (the relevant-tuple bound would lose).
pub fn product_slp(grammars: &[&Slp], tau: u64) -> Result<ProductSlp> {
    let k = grammars.len();
    if !(2..=4).contains(&k) {
        return Err(Error::UnsupportedK(k));
    }
    let n = grammars[0].len();
    for g in grammars {
        if g.len() != n {
            return Err(Error::LengthMismatch(n, g.len()));
        }
    }
    if tau < 1 {
        return Err(Error::InvalidTau(tau));
    }
    let size_product: f64 = grammars.iter().map(|g| g.size() as f64).product();
    if size_product > n as f64 {
        return product_slp_trivial(grammars);
    }

    let parts: Vec<PhrasePartition> = grammars
        .iter()
        .map(|g| {
            let c = if g.is_cnf() { (*g).clone() } else { g.to_cnf() };
            partition(&c, tau)
        })
        .collect::<Result<_>>()?;

    // merged boundary set B = union of the per-string boundary sets
    let mut merged: Vec<u64> = parts
        .iter()
        .flat_map(|p| p.boundaries.iter().copied())
        .collect();
    merged.sort_unstable();
    merged.dedup();

    let mut b = Builder {
        parts: &parts,
        out: SlpBuilder::default(),
        memo: HashMap::new(),
        tuples: Vec::new(),
        tuple_ids: HashMap::new(),
        provenance: HashMap::new(),
    };

    // cursor per string: current phrase index
    let mut cursor = vec![0usize; k];
    let mut top: Vec<SymbolId> = Vec::with_capacity(merged.len() - 1);
    for w in merged.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let len = hi - lo;
        let mut symbols = Vec::with_capacity(k);
        let mut starts = Vec::with_capacity(k);
        for i in 0..k {
            while parts[i].boundaries[cursor[i] + 1] <= lo {
                cursor[i] += 1;
            }
            let phrase_start = parts[i].boundaries[cursor[i]];
            symbols.push(parts[i].phrases[cursor[i]]);
            starts.push(lo - phrase_start);
        }
        top.push(b.build(symbols, starts, len));
    }
    let start = if top.len() == 1 {
        top[0]
    } else {
        b.out.rule(&top)
    };
    let slp = b.out.finish(start)?;
    debug_assert_eq!(slp.len(), n);
    Ok(ProductSlp {
        slp,
        tuples: b.tuples,
        provenance: b.provenance,
        k,
    })
}

fn product_slp_trivial(grammars: &[&Slp]) -> Result<ProductSlp> {
    let k = grammars.len();
    let texts: Vec<Vec<Ch>> = grammars
        .iter()
        .map(|g| g.expand())
        .collect::<Result<_>>()?;
    let n = texts[0].len();
    let mut out = SlpBuilder::default();
    let mut tuples: Vec<Vec<Ch>> = Vec::new();
    let mut tuple_ids: HashMap<Vec<Ch>, Ch> = HashMap::new();
    let mut syms = Vec::with_capacity(n);
    for j in 0..n {
        let chars: Vec<Ch> = (0..k).map(|i| texts[i][j]).collect();
        let idx = match tuple_ids.get(&chars) {
            Some(&i) => i,
            None => {
                let i = tuples.len() as Ch;
                tuples.push(chars.clone());
                tuple_ids.insert(chars, i);
                i
            }
        };
        syms.push(out.terminal(idx));
    }
    let start = if syms.len() == 1 {
        syms[0]
    } else {
        out.rule(&syms)
    };
    Ok(ProductSlp {
        slp: out.finish(start)?,
        tuples,
        provenance: HashMap::new(),
        k,
    })
}

fn default_tau(n: u64, sizes: &[u64]) -> u64 {
    // balance N/tau phrases against tau^{k-1} * prod(sizes) relevant tuples
    let k = sizes.len() as f64;
    let prod: f64 = sizes.iter().map(|&s| s as f64).product();
    let t = ((n as f64) / prod).powf(1.0 / k);
    (t.round() as u64).clamp(1, n)
}

/// Exact Hamming distance of two equal-length compressed strings.
pub fn hamming(gx: &Slp, gy: &Slp) -> Result<u64> {
    if gx.len() != gy.len() {
        return Err(Error::LengthMismatch(gx.len(), gy.len()));
    }
    let tau = default_tau(gx.len(), &[gx.size(), gy.size()]);
    let p = product_slp(&[gx, gy], tau)?;
    Ok(p.additive_aggregate(|t| u64::from(t[0] != t[1])))
}

/// Multi-string position-wise aggregation mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiMode {
    /// 0 iff all k characters agree, else 1.
    AllEqual,
    /// Per position: `min_i sum_j [x_i != x_j]` (median string score).
    Median,
}

/// Generalized Hamming distances for 2..=4 strings of equal length.
pub fn hamming_multi(grammars: &[&Slp], mode: MultiMode) -> Result<u64> {
    let k = grammars.len();
    if !(2..=4).contains(&k) {
        return Err(Error::UnsupportedK(k));
    }
    let n = grammars[0].len();
    for g in grammars {
        if g.len() != n {
            return Err(Error::LengthMismatch(n, g.len()));
        }
    }
    let sizes: Vec<u64> = grammars.iter().map(|g| g.size()).collect();
    let tau = default_tau(n, &sizes);
    let p = product_slp(grammars, tau)?;
    let delta = |t: &[Ch]| -> u64 {
        match mode {
            MultiMode::AllEqual => u64::from(!t.iter().all(|&c| c == t[0])),
            MultiMode::Median => (0..t.len())
                .map(|i| t.iter().filter(|&&c| c != t[i]).count() as u64)
                .min()
                .unwrap(),
        }
    };
    Ok(p.additive_aggregate(delta))
}
