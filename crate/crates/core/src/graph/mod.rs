//! Weighted undirected graphs, bisections and their quality metrics.

pub mod generate;
pub mod io;

use std::collections::HashSet;

use crate::error::{Error, Result};

/// Largest instance `brute_force_min_cut` will enumerate.
pub const BRUTE_FORCE_MAX_NODES: usize = 20;

/// An undirected edge with `u < v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// Immutable weighted undirected graph.
///
/// Edges are kept both as a list (in insertion order, each normalized so that
/// `u < v`) and as a compressed adjacency structure: the neighbors of node `u`
/// are `adjncy[xadj[u]..xadj[u + 1]]` with weights in the same range of
/// `adjwgt`.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    xadj: Vec<usize>,
    adjncy: Vec<usize>,
    adjwgt: Vec<f64>,
    total_weight: f64,
}

impl Graph {
    /// Builds a graph on `n` nodes, rejecting self-loops, duplicate
    /// undirected edges, out-of-range endpoints and negative or non-finite
    /// weights. Error line numbers are the 1-based position in `edges`.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (i, (u, v, w)) in edges.into_iter().enumerate() {
            let line = i + 1;
            for index in [u, v] {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, n, line });
                }
            }
            if u == v {
                return Err(Error::SelfLoop { node: u, line });
            }
            if !w.is_finite() || w < 0.0 {
                return Err(Error::InvalidWeight { u, v, weight: w });
            }
            let (a, b) = if u < v { (u, v) } else { (v, u) };
            if !seen.insert((a, b)) {
                return Err(Error::DuplicateEdge { u: a, v: b, line });
            }
            list.push(Edge { u: a, v: b, w });
        }
        Ok(Self::build(n, list))
    }

    /// Unit-weight convenience constructor.
    pub fn from_unweighted(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        Self::from_edges(n, edges.into_iter().map(|(u, v)| (u, v, 1.0)))
    }

    fn build(n: usize, edges: Vec<Edge>) -> Self {
        let mut degree = vec![0usize; n];
        for e in &edges {
            degree[e.u] += 1;
            degree[e.v] += 1;
        }
        let mut xadj = Vec::with_capacity(n + 1);
        xadj.push(0);
        for d in &degree {
            xadj.push(xadj.last().unwrap() + d);
        }
        let mut fill = xadj[..n].to_vec();
        let mut adjncy = vec![0; 2 * edges.len()];
        let mut adjwgt = vec![0.0; 2 * edges.len()];
        for e in &edges {
            adjncy[fill[e.u]] = e.v;
            adjwgt[fill[e.u]] = e.w;
            fill[e.u] += 1;
            adjncy[fill[e.v]] = e.u;
            adjwgt[fill[e.v]] = e.w;
            fill[e.v] += 1;
        }
        let total_weight = edges.iter().map(|e| e.w).sum();
        Self {
            n,
            edges,
            xadj,
            adjncy,
            adjwgt,
            total_weight,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn degree(&self, u: usize) -> usize {
        self.xadj[u + 1] - self.xadj[u]
    }

    /// Sum of incident edge weights.
    pub fn weighted_degree(&self, u: usize) -> f64 {
        self.adjwgt[self.xadj[u]..self.xadj[u + 1]].iter().sum()
    }

    /// Neighbors of `u` paired with the connecting edge weight.
    pub fn neighbors(&self, u: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.xadj[u]..self.xadj[u + 1];
        self.adjncy[range.clone()]
            .iter()
            .copied()
            .zip(self.adjwgt[range].iter().copied())
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for (v, _) in self.neighbors(u) {
                if !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == self.n
    }

    /// Total weight of edges whose endpoints carry different labels.
    pub fn cut_weight(&self, labels: &[u8]) -> f64 {
        self.edges
            .iter()
            .filter(|e| labels[e.u] != labels[e.v])
            .map(|e| e.w)
            .sum()
    }

    /// Same graph with node `i` renamed to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                actual: perm.len(),
            });
        }
        Self::from_edges(self.n, self.edges.iter().map(|e| (perm[e.u], perm[e.v], e.w)))
    }
}

/// Hard two-way assignment: `labels[v]` is 0 or 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<u8>,
}

impl Partition {
    pub fn new(labels: Vec<u8>) -> Result<Self> {
        if let Some(pos) = labels.iter().position(|&l| l > 1) {
            return Err(Error::Parse {
                line: pos + 1,
                msg: format!("label {} is not 0 or 1", labels[pos]),
            });
        }
        Ok(Self { labels })
    }

    pub(crate) fn from_labels_unchecked(labels: Vec<u8>) -> Self {
        debug_assert!(labels.iter().all(|&l| l <= 1));
        Self { labels }
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Node counts `(n0, n1)`.
    pub fn sizes(&self) -> (usize, usize) {
        let ones = self.labels.iter().filter(|&&l| l == 1).count();
        (self.labels.len() - ones, ones)
    }

    /// `|n0 - n1|`.
    pub fn imbalance(&self) -> usize {
        let (a, b) = self.sizes();
        a.abs_diff(b)
    }

    pub fn flipped(&self) -> Self {
        Self {
            labels: self.labels.iter().map(|&l| 1 - l).collect(),
        }
    }

    /// Moves the label of node `i` to position `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut labels = vec![0; self.labels.len()];
        for (i, &l) in self.labels.iter().enumerate() {
            labels[perm[i]] = l;
        }
        Self { labels }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Metrics {
    /// Percentage of edges (by count) whose endpoints are separated.
    pub cut_percent: f64,
    /// `100 * |n0 - n1| / n`.
    pub imbalance_percent: f64,
    pub cut_weight: f64,
    pub cut_edges: usize,
}

pub fn cut_metrics(g: &Graph, part: &Partition) -> Result<Metrics> {
    if part.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            actual: part.len(),
        });
    }
    if g.edge_count() == 0 {
        return Err(Error::EmptyEdgeSet);
    }
    let labels = part.labels();
    let mut cut_edges = 0;
    let mut cut_weight = 0.0;
    for e in g.edges() {
        if labels[e.u] != labels[e.v] {
            cut_edges += 1;
            cut_weight += e.w;
        }
    }
    Ok(Metrics {
        cut_percent: 100.0 * cut_edges as f64 / g.edge_count() as f64,
        imbalance_percent: 100.0 * part.imbalance() as f64 / g.n() as f64,
        cut_weight,
        cut_edges,
    })
}

/// Exhaustive minimum-weight bisection subject to `|n0 - n1| <= max_imbalance_nodes`.
///
/// Node 0 is pinned to label 0, so each of the `2^(n-1)` label-symmetric
/// pairs is visited once. Candidates are visited in lexicographic order of
/// their label sequence and only a strictly smaller cut replaces the
/// incumbent, so the returned minimizer is the lexicographically smallest.
/// Fails with `InvalidConfig` when no bisection meets the bound.
pub fn brute_force_min_cut(g: &Graph, max_imbalance_nodes: usize) -> Result<(Partition, f64)> {
    let n = g.n();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(Error::InstanceTooLarge {
            n,
            max: BRUTE_FORCE_MAX_NODES,
        });
    }
    if n == 0 {
        return Ok((Partition::from_labels_unchecked(Vec::new()), 0.0));
    }
    // Node i maps to bit (n - 1 - i), so increasing masks are increasing label sequences.
    let bit = |i: usize| 1u32 << (n - 1 - i);
    let edges: Vec<(u32, u32, f64)> = g.edges().iter().map(|e| (bit(e.u), bit(e.v), e.w)).collect();

    let mut best: Option<(u32, f64)> = None;
    for mask in 0u32..(1u32 << (n - 1)) {
        let ones = mask.count_ones() as usize;
        if ones.abs_diff(n - ones) > max_imbalance_nodes {
            continue;
        }
        let cut: f64 = edges
            .iter()
            .filter(|(a, b, _)| (mask & a == 0) != (mask & b == 0))
            .map(|(_, _, w)| w)
            .sum();
        if best.is_none_or(|(_, c)| cut < c) {
            best = Some((mask, cut));
        }
    }
    let (mask, cut) = best.ok_or_else(|| {
        Error::InvalidConfig(format!(
            "no bisection of {n} nodes has imbalance <= {max_imbalance_nodes}"
        ))
    })?;
    let labels = (0..n).map(|i| u8::from(mask & bit(i) != 0)).collect();
    Ok((Partition::from_labels_unchecked(labels), cut))
}
