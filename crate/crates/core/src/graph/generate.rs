//! Seeded random graph families.
//!
//! Every generator owns its RNG (ChaCha8 seeded from the caller's integer), so
//! output depends only on the arguments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, Partition};
use crate::error::{Error, Result};

fn check_probability(name: &str, p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} = {p} is not in [0, 1]")))
    }
}

/// Erdős–Rényi G(n, p) with unit weights. Pairs are visited in lexicographic
/// order and each is kept with probability `p`.
pub fn generate_er(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n < 2 {
        return Err(Error::InvalidConfig(format!("need n >= 2, got {n}")));
    }
    check_probability("p", p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_unweighted(n, edges)
}

/// Two-community planted partition: nodes `0..n/2` form community 0.
pub fn generate_planted(n: usize, p_in: f64, p_out: f64, seed: u64) -> Result<(Graph, Partition)> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(Error::InvalidConfig(format!("need an even n >= 2, got {n}")));
    }
    check_probability("p_in", p_in)?;
    check_probability("p_out", p_out)?;
    if p_out > p_in {
        return Err(Error::InvalidConfig(format!(
            "need p_out <= p_in, got p_out = {p_out}, p_in = {p_in}"
        )));
    }
    let half = n / 2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            let p = if (u < half) == (v < half) { p_in } else { p_out };
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let labels = (0..n).map(|v| u8::from(v >= half)).collect();
    Ok((
        Graph::from_unweighted(n, edges)?,
        Partition::from_labels_unchecked(labels),
    ))
}

/// The first connected G(n, p) draw, trying seeds `seed, seed + 1, ...`.
/// Returns the graph and the seed that produced it.
pub fn generate_connected_er(n: usize, p: f64, seed: u64, max_attempts: usize) -> Result<(Graph, u64)> {
    for attempt in 0..max_attempts as u64 {
        let s = seed.wrapping_add(attempt);
        let g = generate_er(n, p, s)?;
        if g.is_connected() {
            return Ok((g, s));
        }
    }
    Err(Error::InvalidConfig(format!(
        "no connected G({n}, {p}) within {max_attempts} seeds from {seed}"
    )))
}

/// Complete graph on `n` nodes.
pub fn complete(n: usize) -> Graph {
    let edges = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
    Graph::from_unweighted(n, edges).expect("complete graph is simple")
}

/// Two `K_k` cliques on nodes `0..k` and `k..2k`, optionally joined by the
/// single edge `(k - 1, k)`.
fn cliques(k: usize, bridge: bool) -> (Graph, Partition) {
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for offset in [0, k] {
        for u in 0..k {
            for v in u + 1..k {
                edges.push((offset + u, offset + v));
            }
        }
    }
    if bridge && k > 0 {
        edges.push((k - 1, k));
    }
    let labels = (0..2 * k).map(|v| u8::from(v >= k)).collect();
    (
        Graph::from_unweighted(2 * k, edges).expect("clique pair is simple"),
        Partition::from_labels_unchecked(labels),
    )
}

/// Two `K_k` joined by one bridge edge, with the planted split.
pub fn two_cliques_bridge(k: usize) -> (Graph, Partition) {
    cliques(k, true)
}

/// Two disjoint `K_k`, with the planted split.
pub fn disjoint_cliques(k: usize) -> (Graph, Partition) {
    cliques(k, false)
}
