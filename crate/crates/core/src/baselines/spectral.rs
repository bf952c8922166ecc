//! Spectral bisection via the Fiedler vector of the graph Laplacian.
//!
//! The eigensolver is Lanczos with full reorthogonalization, run on the
//! complement of the constant vector (the kernel of `L` for a connected
//! graph), so the smallest Ritz pair converges to `(lambda_2, v_2)`. When the
//! Krylov basis hits its size cap the iteration restarts from the current
//! Ritz vector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SplitRule {
    /// Label 1 iff the Fiedler entry is positive.
    #[default]
    Sign,
    /// Label 1 for the `ceil(n/2)` largest entries.
    Median,
}

impl std::str::FromStr for SplitRule {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sign" => Ok(SplitRule::Sign),
            "median" => Ok(SplitRule::Median),
            other => Err(Error::InvalidConfig(format!("unknown split rule `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpectralConfig {
    /// Bound on `||L v - lambda v||` and `|<v, 1>|` for unit `v`.
    pub tol: f64,
    /// Total Lanczos steps; `None` means `10 n + 1000`.
    pub max_iter: Option<usize>,
    pub split_rule: SplitRule,
}

impl Default for SpectralConfig {
    fn default() -> Self {
        Self {
            tol: 1e-8,
            max_iter: None,
            split_rule: SplitRule::Sign,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Fiedler {
    pub value: f64,
    /// Unit norm, orthogonal to the all-ones vector, first nonzero entry positive.
    pub vector: Vec<f64>,
}

/// Cap on the Krylov basis before restarting.
const MAX_BASIS: usize = 300;

/// `out = L x` with `L = D - W`.
pub fn laplacian_apply(g: &Graph, x: &[f64], out: &mut [f64]) {
    for (u, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        let mut deg = 0.0;
        for (v, w) in g.neighbors(u) {
            acc += w * x[v];
            deg += w;
        }
        *o = deg * x[u] - acc;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn remove_mean(x: &mut [f64]) {
    let mean = x.iter().sum::<f64>() / x.len() as f64;
    x.iter_mut().for_each(|v| *v -= mean);
}

/// Number of eigenvalues of the symmetric tridiagonal `(diag, off)` below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut q = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        q = diag[i] - x - if i == 0 { 0.0 } else { b2 / q };
        if q == 0.0 {
            q = f64::EPSILON * (x.abs() + 1.0);
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenpair of a symmetric tridiagonal matrix: bisection on the
/// Sturm count, then inverse iteration for the vector.
fn smallest_tridiagonal_eigenpair(diag: &[f64], off: &[f64]) -> (f64, Vec<f64>) {
    let k = diag.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..k {
        let r = if i > 0 { off[i - 1].abs() } else { 0.0 } + if i + 1 < k { off[i].abs() } else { 0.0 };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let theta = 0.5 * (lo + hi);

    // Inverse iteration on (T - theta I) with partial-pivoting elimination.
    let scale = hi.abs().max(lo.abs()).max(1.0);
    let shift = theta - 1e3 * f64::EPSILON * scale;
    let mut y = vec![1.0; k];
    for _ in 0..3 {
        y = solve_tridiagonal(diag, off, shift, &y);
        let nrm = norm(&y);
        y.iter_mut().for_each(|v| *v /= nrm);
    }
    (theta, y)
}

/// Solves `(T - shift I) x = rhs` by Gaussian elimination with partial pivoting.
fn solve_tridiagonal(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let k = diag.len();
    if k == 1 {
        let d = diag[0] - shift;
        return vec![rhs[0] / if d == 0.0 { f64::EPSILON } else { d }];
    }
    // Row i holds entries at columns i, i+1, i+2 after pivoting.
    let mut rows: Vec<[f64; 3]> = (0..k)
        .map(|i| [diag[i] - shift, if i + 1 < k { off[i] } else { 0.0 }, 0.0])
        .collect();
    let mut sub: Vec<f64> = (0..k).map(|i| if i > 0 { off[i - 1] } else { 0.0 }).collect();
    let mut b = rhs.to_vec();
    for i in 0..k - 1 {
        // Candidate rows: i (leading entry rows[i][0]) and i+1 (leading entry sub[i+1]).
        if sub[i + 1].abs() > rows[i][0].abs() {
            let next = rows[i + 1];
            let lower = [sub[i + 1], next[0], next[1]];
            rows[i + 1] = [rows[i][1], rows[i][2], 0.0];
            sub[i + 1] = rows[i][0];
            rows[i] = lower;
            b.swap(i, i + 1);
        }
        let pivot = if rows[i][0] == 0.0 { f64::EPSILON } else { rows[i][0] };
        let factor = sub[i + 1] / pivot;
        rows[i + 1][0] -= factor * rows[i][1];
        rows[i + 1][1] -= factor * rows[i][2];
        b[i + 1] -= factor * b[i];
    }
    let mut x = vec![0.0; k];
    for i in (0..k).rev() {
        let mut acc = b[i];
        if i + 1 < k {
            acc -= rows[i][1] * x[i + 1];
        }
        if i + 2 < k {
            acc -= rows[i][2] * x[i + 2];
        }
        let pivot = if rows[i][0] == 0.0 { f64::EPSILON } else { rows[i][0] };
        x[i] = acc / pivot;
    }
    x
}

/// Orthogonalizes `w` against the all-ones direction and every basis vector, twice.
fn reorthogonalize(w: &mut [f64], basis: &[Vec<f64>]) {
    for _ in 0..2 {
        remove_mean(w);
        for q in basis {
            let c = dot(w, q);
            w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
    }
}

pub fn fiedler_vector(g: &Graph, cfg: &SpectralConfig) -> Result<Fiedler> {
    let n = g.n();
    if n < 2 {
        return Err(Error::InvalidConfig(format!("need n >= 2, got {n}")));
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(Error::InvalidConfig(format!("tol must be positive, got {}", cfg.tol)));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let max_iter = cfg.max_iter.unwrap_or(10 * n + 1000);
    let max_basis = MAX_BASIS.min(n - 1);
    // Scale for breakdown detection: ||L|| <= 2 * max weighted degree.
    let norm_bound = 2.0 * (0..n).map(|u| g.weighted_degree(u)).fold(0.0, f64::max);

    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let mut lw = vec![0.0; n];
    let mut iterations = 0;
    let mut last_residual = f64::INFINITY;

    while iterations < max_iter {
        reorthogonalize(&mut start, &[]);
        let s = norm(&start);
        start.iter_mut().for_each(|x| *x /= s);

        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut diag = Vec::new();
        let mut off: Vec<f64> = Vec::new();
        let mut ritz: (f64, Vec<f64>);
        loop {
            let q = basis.last().unwrap();
            let mut w = vec![0.0; n];
            laplacian_apply(g, q, &mut w);
            iterations += 1;
            let alpha = dot(&w, q);
            diag.push(alpha);
            reorthogonalize(&mut w, &basis);
            let beta = norm(&w);

            let (theta, y) = smallest_tridiagonal_eigenpair(&diag, &off);
            let estimate = beta * y.last().unwrap().abs();
            ritz = (theta, y);
            let breakdown = beta <= 1e-14 * norm_bound.max(1.0);
            if breakdown || estimate <= 0.1 * cfg.tol || basis.len() >= max_basis || iterations >= max_iter {
                break;
            }
            off.push(beta);
            w.iter_mut().for_each(|x| *x /= beta);
            basis.push(w);
        }

        let (_, y) = ritz;
        let mut v = vec![0.0; n];
        for (q, c) in basis.iter().zip(&y) {
            v.iter_mut().zip(q).for_each(|(x, qi)| *x += c * qi);
        }
        remove_mean(&mut v);
        let nv = norm(&v);
        v.iter_mut().for_each(|x| *x /= nv);
        laplacian_apply(g, &v, &mut lw);
        let value = dot(&v, &lw);
        let residual = lw
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - value * b).powi(2))
            .sum::<f64>()
            .sqrt();
        last_residual = residual;
        if residual <= cfg.tol {
            if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            return Ok(Fiedler { value, vector: v });
        }
        start = v;
    }
    Err(Error::NoConvergence {
        iterations,
        residual: last_residual,
    })
}

pub fn spectral_bisect(g: &Graph, cfg: &SpectralConfig) -> Result<Partition> {
    let v = fiedler_vector(g, cfg)?.vector;
    let labels = match cfg.split_rule {
        SplitRule::Sign => v.iter().map(|&x| u8::from(x > 0.0)).collect(),
        SplitRule::Median => {
            let n = v.len();
            let mut order: Vec<usize> = (0..n).collect();
            order.sort_by(|&i, &j| v[j].total_cmp(&v[i]).then(i.cmp(&j)));
            let mut labels = vec![0u8; n];
            for &i in &order[..n.div_ceil(2)] {
                labels[i] = 1;
            }
            labels
        }
    };
    Ok(Partition::from_labels_unchecked(labels))
}
