//! Kernighan-Lin bisection refinement.
//!
//! Each pass tentatively swaps pairs `(a, b)` across the cut, always taking
//! the unlocked pair with the largest gain `D_a + D_b - 2 w_ab` where
//! `D_v` is external minus internal incident weight. Swapped nodes are
//! locked. At the end of the pass the prefix of swaps with the largest
//! positive cumulative gain is committed. Partition sizes never change.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};

/// Minimum cumulative gain for a pass to count as an improvement.
const GAIN_EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KlConfig {
    pub max_passes: usize,
    /// Seeds the random balanced starting partition.
    pub seed: u64,
}

impl Default for KlConfig {
    fn default() -> Self {
        Self {
            max_passes: 20,
            seed: 0,
        }
    }
}

/// Uniformly random split with sizes `floor(n/2)` (label 1) and `ceil(n/2)`.
pub fn random_balanced(n: usize, seed: u64) -> Partition {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut labels = vec![0u8; n];
    for &v in &order[..n / 2] {
        labels[v] = 1;
    }
    Partition::from_labels_unchecked(labels)
}

pub fn kernighan_lin(g: &Graph, cfg: &KlConfig) -> Result<Partition> {
    Ok(kernighan_lin_trace(g, cfg)?.0)
}

/// Like [`kernighan_lin`], also returning the cut weight before the first
/// pass and after every committed pass.
pub fn kernighan_lin_trace(g: &Graph, cfg: &KlConfig) -> Result<(Partition, Vec<f64>)> {
    if g.n() < 2 {
        return Err(Error::InvalidConfig(format!("need n >= 2, got {}", g.n())));
    }
    kernighan_lin_from(g, random_balanced(g.n(), cfg.seed), cfg)
}

/// Refines `initial` in place of a random start.
pub fn kernighan_lin_from(g: &Graph, initial: Partition, cfg: &KlConfig) -> Result<(Partition, Vec<f64>)> {
    if initial.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            actual: initial.len(),
        });
    }
    if cfg.max_passes == 0 {
        return Err(Error::InvalidConfig("max_passes must be >= 1".into()));
    }
    let mut labels = initial.labels().to_vec();
    let mut history = vec![g.cut_weight(&labels)];
    let mut scratch = vec![0.0; g.n()];
    for _ in 0..cfg.max_passes {
        match run_pass(g, &labels, &mut scratch) {
            Some(swaps) => {
                for (a, b) in swaps {
                    labels.swap(a, b);
                }
                history.push(g.cut_weight(&labels));
            }
            None => break,
        }
    }
    Ok((Partition::from_labels_unchecked(labels), history))
}

/// One pass; returns the committed swaps, or `None` when no prefix improves.
fn run_pass(g: &Graph, labels: &[u8], scratch: &mut [f64]) -> Option<Vec<(usize, usize)>> {
    let n = g.n();
    let mut d: Vec<f64> = (0..n)
        .map(|v| {
            g.neighbors(v)
                .map(|(u, w)| if labels[u] == labels[v] { -w } else { w })
                .sum()
        })
        .collect();
    let mut locked = vec![false; n];
    let mut side_a: Vec<usize> = (0..n).filter(|&v| labels[v] == 0).collect();
    let mut side_b: Vec<usize> = (0..n).filter(|&v| labels[v] == 1).collect();
    let steps = side_a.len().min(side_b.len());

    let mut swaps = Vec::with_capacity(steps);
    let mut cumulative = 0.0;
    let mut best = (0.0, 0usize);
    for _ in 0..steps {
        side_a.retain(|&v| !locked[v]);
        side_b.retain(|&v| !locked[v]);
        let by_d = |x: &usize, y: &usize| d[*y].total_cmp(&d[*x]).then(x.cmp(y));
        side_a.sort_by(by_d);
        side_b.sort_by(by_d);

        // Gains are bounded by D_a + D_b since w_ab >= 0, so the sorted scan
        // stops once that bound cannot beat the incumbent.
        let mut pick: Option<(f64, usize, usize)> = None;
        for &a in &side_a {
            if let Some((gbest, _, _)) = pick {
                if d[a] + d[side_b[0]] <= gbest {
                    break;
                }
            }
            for (u, w) in g.neighbors(a) {
                scratch[u] = w;
            }
            for &b in &side_b {
                let bound = d[a] + d[b];
                if pick.is_some_and(|(gbest, _, _)| bound <= gbest) {
                    break;
                }
                let gain = bound - 2.0 * scratch[b];
                if pick.is_none_or(|(gbest, _, _)| gain > gbest) {
                    pick = Some((gain, a, b));
                }
            }
            for (u, _) in g.neighbors(a) {
                scratch[u] = 0.0;
            }
        }
        let (gain, a, b) = pick?;
        locked[a] = true;
        locked[b] = true;
        // Moving a to side 1 and b to side 0.
        for (x, w) in g.neighbors(a) {
            if !locked[x] {
                d[x] += if labels[x] == labels[a] { 2.0 * w } else { -2.0 * w };
            }
        }
        for (y, w) in g.neighbors(b) {
            if !locked[y] {
                d[y] += if labels[y] == labels[b] { 2.0 * w } else { -2.0 * w };
            }
        }
        swaps.push((a, b));
        cumulative += gain;
        if cumulative > best.0 + GAIN_EPS {
            best = (cumulative, swaps.len());
        }
    }
    if best.1 == 0 {
        return None;
    }
    swaps.truncate(best.1);
    Some(swaps)
}
