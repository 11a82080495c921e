//! Phrase partitions: from a CNF grammar, derive an augmented grammar `G+`
//! and a phrase grammar `GP` whose terminals are `G+` symbols expanding to
//! at most `tau` characters, such that the phrase sequence reassembles the
//! original string with at most `ceil(3N/tau)` phrases.

use crate::error::{Error, Result};
use crate::slp::{Ch, Slp, SlpBuilder, SymbolDef, SymbolId};

/// The `(G+, GP, P)` triple for one string.
///
/// `g_p`'s terminal characters are `g_plus` symbol ids; expanding `g_p` gives
/// the phrase sequence `P`. Empty productions are permitted inside `g_p`
/// only (the construction needs them for middle parts that vanish).
#[derive(Debug, Clone)]
pub struct PhrasePartition {
    pub g_plus: Slp,
    pub g_p: Slp,
    /// Phrase sequence: `g_plus` symbol ids, each expanding to <= tau chars.
    pub phrases: Vec<SymbolId>,
    pub tau: u64,
    /// Prefix sums `0 = b_0 < b_1 < ... < b_p = N`.
    pub boundaries: Vec<u64>,
}

impl PhrasePartition {
    pub fn num_phrases(&self) -> usize {
        self.phrases.len()
    }

    pub fn text_len(&self) -> u64 {
        *self.boundaries.last().unwrap()
    }

    /// Expansion of the phrase sequence under `g_plus` (equals the original string).
    pub fn expand_phrases(&self) -> Vec<Ch> {
        let mut out = Vec::with_capacity(self.text_len() as usize);
        for &p in &self.phrases {
            out.extend(self.g_plus.expand_symbol(p));
        }
        out
    }
}

/// Build the phrase partition of `g` (must be in Chomsky normal form) for
/// threshold `tau`. When `tau >= N` the partition is a single phrase equal
/// to the start symbol and `g_p` has no non-terminals.
pub fn partition(g: &Slp, tau: u64) -> Result<PhrasePartition> {
    if tau < 1 {
        return Err(Error::InvalidTau(tau));
    }
    if !g.is_cnf() {
        return Err(Error::NotCnf);
    }
    let n_len = g.len();
    if tau >= n_len {
        let g_plus = g.clone();
        let mut pb = SlpBuilder::default();
        let start = pb.terminal(g.start() as Ch);
        let g_p = pb.finish(start)?;
        return Ok(PhrasePartition {
            g_plus,
            g_p,
            phrases: vec![g.start()],
            tau,
            boundaries: vec![0, n_len],
        });
    }

    // g_plus starts as a copy of g; L/R symbols are appended in symbol order,
    // so the result is reproducible byte for byte.
    let n_syms = g.symbol_count();
    let mut plus_defs: Vec<SymbolDef> = (0..n_syms as u32).map(|i| g.def(i).clone()).collect();
    let mut plus_lens: Vec<u64> = (0..n_syms as u32).map(|i| g.sym_len(i)).collect();
    // unary border rules collapse to the child symbol itself, so identical
    // phrases share one symbol id and the DIST memo actually hits
    let push_plus = |rhs: Vec<SymbolId>, lens: &mut Vec<u64>, defs: &mut Vec<SymbolDef>| -> SymbolId {
        if rhs.len() == 1 {
            return rhs[0];
        }
        let len = rhs.iter().map(|&r| lens[r as usize]).sum();
        defs.push(SymbolDef::Rule(rhs));
        lens.push(len);
        (defs.len() - 1) as SymbolId
    };

    let mut pb = SlpBuilder::default();
    let mut l_of: Vec<Option<SymbolId>> = vec![None; n_syms];
    let mut r_of: Vec<Option<SymbolId>> = vec![None; n_syms];
    let mut m_of: Vec<Option<SymbolId>> = vec![None; n_syms]; // ids inside g_p

    for a in 0..n_syms as u32 {
        if g.sym_len(a) <= tau {
            continue;
        }
        let rhs = g.rhs(a);
        debug_assert_eq!(rhs.len(), 2);
        let (bl, br) = (rhs[0], rhs[1]);
        let (ll, rl) = (g.sym_len(bl), g.sym_len(br));
        let (l_a, r_a, m_a);
        if ll <= tau && rl <= tau {
            // both children small: they become the border phrases
            l_a = push_plus(vec![bl], &mut plus_lens, &mut plus_defs);
            r_a = push_plus(vec![br], &mut plus_lens, &mut plus_defs);
            m_a = pb.rule_empty();
        } else if ll > tau && rl > tau {
            let (lbl, rbl) = (l_of[bl as usize].unwrap(), r_of[bl as usize].unwrap());
            let (lbr, rbr) = (l_of[br as usize].unwrap(), r_of[br as usize].unwrap());
            l_a = push_plus(vec![lbl], &mut plus_lens, &mut plus_defs);
            r_a = push_plus(vec![rbr], &mut plus_lens, &mut plus_defs);
            let m_bl = m_of[bl as usize].unwrap();
            let m_br = m_of[br as usize].unwrap();
            let t_rbl = pb.terminal(rbl as Ch);
            let t_lbr = pb.terminal(lbr as Ch);
            m_a = pb.rule(&[m_bl, t_rbl, t_lbr, m_br]);
        } else if ll > tau {
            // left child big, right child small
            let (lbl, rbl) = (l_of[bl as usize].unwrap(), r_of[bl as usize].unwrap());
            let m_bl = m_of[bl as usize].unwrap();
            l_a = push_plus(vec![lbl], &mut plus_lens, &mut plus_defs);
            if plus_lens[rbl as usize] + rl <= tau {
                r_a = push_plus(vec![rbl, br], &mut plus_lens, &mut plus_defs);
                m_a = pb.rule(&[m_bl]);
            } else {
                r_a = push_plus(vec![br], &mut plus_lens, &mut plus_defs);
                let t_rbl = pb.terminal(rbl as Ch);
                m_a = pb.rule(&[m_bl, t_rbl]);
            }
        } else {
            // right child big, left child small
            let (lbr, rbr) = (l_of[br as usize].unwrap(), r_of[br as usize].unwrap());
            let m_br = m_of[br as usize].unwrap();
            r_a = push_plus(vec![rbr], &mut plus_lens, &mut plus_defs);
            if ll + plus_lens[lbr as usize] <= tau {
                l_a = push_plus(vec![bl, lbr], &mut plus_lens, &mut plus_defs);
                m_a = pb.rule(&[m_br]);
            } else {
                l_a = push_plus(vec![bl], &mut plus_lens, &mut plus_defs);
                let t_lbr = pb.terminal(lbr as Ch);
                m_a = pb.rule(&[t_lbr, m_br]);
            }
        }
        debug_assert!(plus_lens[l_a as usize] <= tau && plus_lens[r_a as usize] <= tau);
        l_of[a as usize] = Some(l_a);
        r_of[a as usize] = Some(r_a);
        m_of[a as usize] = Some(m_a);
    }

    let s = g.start() as usize;
    let (ls, rs, ms) = (
        l_of[s].unwrap(),
        r_of[s].unwrap(),
        m_of[s].unwrap(),
    );
    let t_ls = pb.terminal(ls as Ch);
    let t_rs = pb.terminal(rs as Ch);
    let sp = pb.rule(&[t_ls, ms, t_rs]);
    let g_p = pb.finish_allow_empty(sp)?;
    let g_plus = Slp::from_defs(plus_defs, g.start(), false)?;

    // the potential inequality from the phrase-count proof, checked in debug
    #[cfg(debug_assertions)]
    for a in 0..n_syms as u32 {
        if g.sym_len(a) > tau {
            let l = g_plus.sym_len(l_of[a as usize].unwrap());
            let r = g_plus.sym_len(r_of[a as usize].unwrap());
            let m = g_p.sym_len(m_of[a as usize].unwrap());
            debug_assert!(
                l + r + tau * (m + 2) < 3 * g.sym_len(a),
                "potential inequality violated at symbol {a}"
            );
        }
    }

    let phrases: Vec<SymbolId> = g_p.expand_symbol(sp).into_iter().map(|c| c as SymbolId).collect();
    let mut boundaries = Vec::with_capacity(phrases.len() + 1);
    boundaries.push(0u64);
    let mut acc = 0u64;
    for &p in &phrases {
        acc += g_plus.sym_len(p);
        boundaries.push(acc);
    }
    debug_assert_eq!(acc, n_len);
    Ok(PhrasePartition {
        g_plus,
        g_p,
        phrases,
        tau,
        boundaries,
    })
}

/// Strictly increasing phrase boundary positions, from 0 to N, with
/// consecutive differences at most tau.
pub fn phrase_boundaries(pp: &PhrasePartition) -> &[u64] {
    &pp.boundaries
}
