//! Deterministic instance generators for tests and the benchmark harness.

use crate::Ch;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Fibonacci word of length at least `min_len`, truncated to `min_len`.
pub fn fibonacci_word(min_len: usize) -> Vec<Ch> {
    let mut prev: Vec<Ch> = vec!['b' as Ch];
    let mut cur: Vec<Ch> = vec!['a' as Ch];
    while cur.len() < min_len {
        let next: Vec<Ch> = cur.iter().chain(prev.iter()).copied().collect();
        prev = cur;
        cur = next;
    }
    cur.truncate(min_len);
    cur
}

/// Thue–Morse word of length `len` over {a, b}.
pub fn thue_morse(len: usize) -> Vec<Ch> {
    (0..len)
        .map(|i| {
            if (i as u64).count_ones() % 2 == 0 {
                'a' as Ch
            } else {
                'b' as Ch
            }
        })
        .collect()
}

/// A block repeated to length `len` with `noise` random single-character
/// substitutions.
pub fn repeated_block_noise(
    rng: &mut ChaCha8Rng,
    block_len: usize,
    len: usize,
    noise: usize,
    sigma: u32,
) -> Vec<Ch> {
    let block: Vec<Ch> = (0..block_len)
        .map(|_| 'a' as Ch + rng.random_range(0..sigma))
        .collect();
    let mut out: Vec<Ch> = (0..len).map(|i| block[i % block_len]).collect();
    for _ in 0..noise {
        let p = rng.random_range(0..len);
        out[p] = 'a' as Ch + rng.random_range(0..sigma);
    }
    out
}

/// Uniformly random text over `sigma` characters starting at 'a'.
pub fn random_text(rng: &mut ChaCha8Rng, len: usize, sigma: u32) -> Vec<Ch> {
    (0..len)
        .map(|_| 'a' as Ch + rng.random_range(0..sigma))
        .collect()
}

/// Apply `edits` random single-character edits (insert/delete/substitute).
pub fn apply_random_edits(rng: &mut ChaCha8Rng, text: &[Ch], edits: usize, sigma: u32) -> Vec<Ch> {
    let mut t = text.to_vec();
    for _ in 0..edits {
        if t.is_empty() {
            t.push('a' as Ch + rng.random_range(0..sigma));
            continue;
        }
        let p = rng.random_range(0..t.len());
        match rng.random_range(0..3) {
            0 => t[p] = 'a' as Ch + rng.random_range(0..sigma),
            1 => t.insert(p, 'a' as Ch + rng.random_range(0..sigma)),
            _ => {
                t.remove(p);
            }
        }
    }
    t
}

/// Mixed-compressibility text: picks one family at random.
pub fn mixed_text(rng: &mut ChaCha8Rng, len: usize, sigma: u32) -> Vec<Ch> {
    match rng.random_range(0..4) {
        0 => fibonacci_word(len),
        1 => thue_morse(len),
        2 => {
            let bl = 1 + rng.random_range(0..(len / 2).max(1));
            let noise = rng.random_range(0..(len / 8 + 1));
            repeated_block_noise(rng, bl, len, noise, sigma)
        }
        _ => random_text(rng, len, sigma),
    }
}

/// A random grammar already in Chomsky normal form, generating a string of
/// length at most `max_len`. Rules pair previously created symbols.
pub type CnfRule = (u32, Option<(u32, u32)>, Option<Ch>);

/// Returns `(rules, start)` where each rule is `(id, Some((left, right)), None)`
/// for binary rules or `(id, None, Some(char))` for terminals. Ids are dense.
pub fn random_cnf_grammar(
    rng: &mut ChaCha8Rng,
    terminals: u32,
    nonterminals: u32,
    max_len: u64,
) -> (Vec<CnfRule>, u32) {
    let mut rules: Vec<CnfRule> = Vec::new();
    let mut lens: Vec<u64> = Vec::new();
    for c in 0..terminals {
        rules.push((c, None, Some('a' as Ch + c)));
        lens.push(1);
    }
    let mut id = terminals;
    for _ in 0..nonterminals {
        // bias towards recent symbols so depth actually grows
        let pick = |rng: &mut ChaCha8Rng, n: u32| -> u32 {
            if n <= 1 || rng.random_bool(0.5) {
                rng.random_range(0..n)
            } else {
                n - 1 - rng.random_range(0..(n / 2).max(1))
            }
        };
        let mut l = pick(rng, id);
        let mut r = pick(rng, id);
        if lens[l as usize] + lens[r as usize] > max_len {
            // fall back to two terminals to keep the expansion bounded
            l = rng.random_range(0..terminals);
            r = rng.random_range(0..terminals);
        }
        rules.push((id, Some((l, r)), None));
        lens.push(lens[l as usize] + lens[r as usize]);
        id += 1;
    }
    (rules, id - 1)
}
