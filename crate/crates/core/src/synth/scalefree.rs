//! Directed configuration model with power-law in- and out-degree sequences.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zeta};

use crate::error::{Error, Result};

/// Attempts at drawing and wiring a sequence before giving up.
const MAX_REDRAWS: usize = 10;

/// Degrees of `n` nodes summing exactly to `m`: power-law samples handed to
/// nodes in random order until the total is reached (the last one truncated).
/// Nodes left over keep degree 0.
pub fn degree_sequence(n: usize, m: usize, gamma: f64, rng: &mut ChaCha8Rng) -> Result<Vec<u32>> {
    if !(gamma > 1.0) {
        return Err(Error::InvalidParameter(format!("exponent must exceed 1, got {gamma}")));
    }
    let zeta = Zeta::new(gamma).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    let cap = n.saturating_sub(1) as f64;
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut deg = vec![0u32; n];
    let mut remaining = m;
    for &u in &order {
        if remaining == 0 {
            break;
        }
        let k = zeta.sample(rng).min(cap) as usize;
        let k = k.min(remaining);
        deg[u] = k as u32;
        remaining -= k;
    }
    if remaining > 0 {
        return Err(Error::InfeasibleDegrees(format!("{n} nodes cannot carry {m} links at γ = {gamma}")));
    }
    Ok(deg)
}

/// Pairs out-stubs with shuffled in-stubs, rejecting self-loops and repeated
/// pairs by swapping with a random position. Gives up after `100 · m` swaps.
fn wire(k_out: &[u32], k_in: &[u32], rng: &mut ChaCha8Rng) -> Option<Vec<(u32, u32)>> {
    let out: Vec<u32> = k_out.iter().enumerate().flat_map(|(u, &k)| std::iter::repeat_n(u as u32, k as usize)).collect();
    let mut inn: Vec<u32> = k_in.iter().enumerate().flat_map(|(v, &k)| std::iter::repeat_n(v as u32, k as usize)).collect();
    debug_assert_eq!(out.len(), inn.len());
    let m = out.len();
    inn.shuffle(rng);
    let mut seen: HashSet<(u32, u32)> = HashSet::with_capacity(m);
    let mut budget = 100 * m.max(1);
    for i in 0..m {
        loop {
            let pair = (out[i], inn[i]);
            if pair.0 != pair.1 && !seen.contains(&pair) {
                seen.insert(pair);
                break;
            }
            if budget == 0 {
                return None;
            }
            budget -= 1;
            let j = rng.random_range(0..m);
            if j < i {
                // keep the already accepted pair at j valid
                let moved = (out[j], inn[i]);
                if moved.0 == moved.1 || seen.contains(&moved) {
                    continue;
                }
                seen.remove(&(out[j], inn[j]));
                seen.insert(moved);
            }
            inn.swap(i, j);
        }
    }
    Some(out.into_iter().zip(inn).collect())
}

/// `m` distinct links among `n` nodes; in-degrees (subsidiaries held) follow
/// `gamma_in`, out-degrees (shareholders) follow `gamma_out`.
pub fn scale_free_links(n: usize, m: usize, gamma_in: f64, gamma_out: f64, rng: &mut ChaCha8Rng) -> Result<Vec<(u32, u32)>> {
    if m > n.saturating_mul(n.saturating_sub(1)) {
        return Err(Error::InfeasibleDegrees(format!("{m} links exceed the {n}-node simple digraph")));
    }
    if m == 0 {
        return Ok(Vec::new());
    }
    let mut last = None;
    for _ in 0..MAX_REDRAWS {
        let k_in = degree_sequence(n, m, gamma_in, rng)?;
        let k_out = degree_sequence(n, m, gamma_out, rng)?;
        match wire(&k_out, &k_in, rng) {
            Some(links) => return Ok(links),
            None => last = Some("rejection budget exhausted"),
        }
    }
    Err(Error::InfeasibleDegrees(format!(
        "no simple wiring after {MAX_REDRAWS} draws ({})",
        last.unwrap_or_default()
    )))
}
