//! Two-layer graph convolutional network with learnable node embeddings.
//!
//! ```text
//! H1     = relu(A_hat X W1 + b1)
//! logits = A_hat H1 W2 + b2
//! p      = softmax(logits)        (row-wise, two classes)
//! ```
//!
//! `A_hat = D^-1/2 (A + I) D^-1/2` is built from the unweighted adjacency;
//! edge weights only enter through the loss. Input graphs carry no node
//! features, so `X` is a trainable `n x d0` embedding table.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::loss::SoftAssignment;

/// Symmetrically normalized adjacency with self-loops, stored as CSR.
#[derive(Clone, Debug, PartialEq)]
pub struct NormalizedAdjacency {
    n: usize,
    indptr: Vec<usize>,
    indices: Vec<usize>,
    values: Vec<f64>,
}

impl NormalizedAdjacency {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row `i` as `(column, value)` pairs, diagonal first.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let r = self.indptr[i]..self.indptr[i + 1];
        self.indices[r.clone()]
            .iter()
            .copied()
            .zip(self.values[r].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).find(|&(c, _)| c == j).map_or(0.0, |(_, v)| v)
    }

    /// `A_hat * m` for an `n x cols` row-major matrix.
    fn apply(&self, m: &[f64], cols: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n * cols];
        for i in 0..self.n {
            let dst = &mut out[i * cols..(i + 1) * cols];
            for (j, a) in self.row(i) {
                for (d, s) in dst.iter_mut().zip(&m[j * cols..(j + 1) * cols]) {
                    *d += a * s;
                }
            }
        }
        out
    }
}

pub fn normalized_adjacency(g: &Graph) -> NormalizedAdjacency {
    let n = g.n();
    let inv_sqrt: Vec<f64> = (0..n).map(|u| 1.0 / ((g.degree(u) + 1) as f64).sqrt()).collect();
    let mut indptr = Vec::with_capacity(n + 1);
    let mut indices = Vec::with_capacity(n + 2 * g.edge_count());
    let mut values = Vec::with_capacity(n + 2 * g.edge_count());
    indptr.push(0);
    for u in 0..n {
        indices.push(u);
        values.push(inv_sqrt[u] * inv_sqrt[u]);
        for (v, _) in g.neighbors(u) {
            indices.push(v);
            values.push(inv_sqrt[u] * inv_sqrt[v]);
        }
        indptr.push(indices.len());
    }
    NormalizedAdjacency {
        n,
        indptr,
        indices,
        values,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelConfig {
    pub embed_dim: usize,
    pub hidden_dim: usize,
    pub seed: u64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            embed_dim: 16,
            hidden_dim: 16,
            seed: 0,
        }
    }
}

/// Network parameters. The same layout holds gradients.
#[derive(Clone, Debug, PartialEq)]
pub struct GnnModel {
    pub n: usize,
    pub embed_dim: usize,
    pub hidden_dim: usize,
    /// `n x embed_dim`, row-major.
    pub embeddings: Vec<f64>,
    /// `embed_dim x hidden_dim`, row-major.
    pub w1: Vec<f64>,
    pub b1: Vec<f64>,
    /// `hidden_dim x 2`, row-major.
    pub w2: Vec<f64>,
    pub b2: Vec<f64>,
}

impl GnnModel {
    pub fn zeros(n: usize, embed_dim: usize, hidden_dim: usize) -> Self {
        Self {
            n,
            embed_dim,
            hidden_dim,
            embeddings: vec![0.0; n * embed_dim],
            w1: vec![0.0; embed_dim * hidden_dim],
            b1: vec![0.0; hidden_dim],
            w2: vec![0.0; hidden_dim * 2],
            b2: vec![0.0; 2],
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.n, self.embed_dim, self.hidden_dim)
    }

    /// All parameter tensors, in a fixed order.
    pub fn tensors(&self) -> [&[f64]; 5] {
        [&self.embeddings, &self.w1, &self.b1, &self.w2, &self.b2]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f64]; 5] {
        [
            &mut self.embeddings,
            &mut self.w1,
            &mut self.b1,
            &mut self.w2,
            &mut self.b2,
        ]
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    fn check(&self) -> Result<()> {
        let (n, d0, d) = (self.n, self.embed_dim, self.hidden_dim);
        let shapes = [n * d0, d0 * d, d, d * 2, 2];
        for (t, want) in self.tensors().iter().zip(shapes) {
            if t.len() != want {
                return Err(Error::DimensionMismatch(format!(
                    "parameter of length {} where {want} expected",
                    t.len()
                )));
            }
        }
        Ok(())
    }
}

/// Uniform init in `±1/sqrt(fan_in)`; embeddings use fan-in 1 (one-hot
/// lookup), biases start at zero.
pub fn init_model(g: &Graph, cfg: &ModelConfig) -> Result<GnnModel> {
    if cfg.embed_dim == 0 || cfg.hidden_dim == 0 {
        return Err(Error::InvalidConfig("embed_dim and hidden_dim must be >= 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut model = GnnModel::zeros(g.n(), cfg.embed_dim, cfg.hidden_dim);
    let mut fill = |t: &mut [f64], bound: f64| {
        for x in t {
            *x = rng.gen_range(-bound..=bound);
        }
    };
    fill(&mut model.embeddings, 1.0);
    fill(&mut model.w1, 1.0 / (cfg.embed_dim as f64).sqrt());
    fill(&mut model.w2, 1.0 / (cfg.hidden_dim as f64).sqrt());
    Ok(model)
}

/// `a (r x k) * b (k x c)`.
fn matmul(a: &[f64], b: &[f64], r: usize, k: usize, c: usize) -> Vec<f64> {
    let mut out = vec![0.0; r * c];
    for i in 0..r {
        let row = &mut out[i * c..(i + 1) * c];
        for (p, &x) in a[i * k..(i + 1) * k].iter().enumerate() {
            if x != 0.0 {
                for (o, &y) in row.iter_mut().zip(&b[p * c..(p + 1) * c]) {
                    *o += x * y;
                }
            }
        }
    }
    out
}

/// `a^T (k x r) * b (r x c)` for row-major `a: r x k`.
fn matmul_tn(a: &[f64], b: &[f64], r: usize, k: usize, c: usize) -> Vec<f64> {
    let mut out = vec![0.0; k * c];
    for i in 0..r {
        let brow = &b[i * c..(i + 1) * c];
        for (p, &x) in a[i * k..(i + 1) * k].iter().enumerate() {
            if x != 0.0 {
                for (o, &y) in out[p * c..(p + 1) * c].iter_mut().zip(brow) {
                    *o += x * y;
                }
            }
        }
    }
    out
}

/// `a (r x c) * b^T` for row-major `b: k x c`, giving `r x k`.
fn matmul_nt(a: &[f64], b: &[f64], r: usize, c: usize, k: usize) -> Vec<f64> {
    let mut out = vec![0.0; r * k];
    for i in 0..r {
        let arow = &a[i * c..(i + 1) * c];
        for p in 0..k {
            out[i * k + p] = arow.iter().zip(&b[p * c..(p + 1) * c]).map(|(x, y)| x * y).sum();
        }
    }
    out
}

fn add_bias(m: &mut [f64], b: &[f64]) {
    for row in m.chunks_mut(b.len()) {
        for (x, bi) in row.iter_mut().zip(b) {
            *x += bi;
        }
    }
}

/// Intermediate activations kept for the backward pass.
#[derive(Clone, Debug)]
pub struct Activations {
    ax: Vec<f64>,
    z1: Vec<f64>,
    ah: Vec<f64>,
    f: Vec<f64>,
}

impl Activations {
    /// Fails only when non-finite parameters produced NaN outputs.
    pub fn assignment(&self) -> Result<SoftAssignment> {
        SoftAssignment::from_f(self.f.clone())
    }
}

fn check_dims(model: &GnnModel, adj: &NormalizedAdjacency) -> Result<()> {
    model.check()?;
    if model.n != adj.n() {
        return Err(Error::DimensionMismatch(format!(
            "model has {} nodes, adjacency {}",
            model.n,
            adj.n()
        )));
    }
    Ok(())
}

pub fn forward_cached(model: &GnnModel, adj: &NormalizedAdjacency) -> Result<Activations> {
    check_dims(model, adj)?;
    let (n, d0, d) = (model.n, model.embed_dim, model.hidden_dim);
    let ax = adj.apply(&model.embeddings, d0);
    let mut z1 = matmul(&ax, &model.w1, n, d0, d);
    add_bias(&mut z1, &model.b1);
    let h1: Vec<f64> = z1.iter().map(|&x| x.max(0.0)).collect();
    let ah = adj.apply(&h1, d);
    let mut logits = matmul(&ah, &model.w2, n, d, 2);
    add_bias(&mut logits, &model.b2);
    // Two-class softmax: p[1] = sigmoid(l1 - l0).
    let f = logits.chunks(2).map(|l| 1.0 / (1.0 + (l[0] - l[1]).exp())).collect();
    Ok(Activations { ax, z1, ah, f })
}

pub fn forward(model: &GnnModel, adj: &NormalizedAdjacency) -> Result<SoftAssignment> {
    forward_cached(model, adj)?.assignment()
}

/// Parameter gradients given `upstream[i] = d loss / d f_i`.
pub fn backward_cached(
    model: &GnnModel,
    adj: &NormalizedAdjacency,
    acts: &Activations,
    upstream: &[f64],
) -> Result<GnnModel> {
    check_dims(model, adj)?;
    let (n, d0, d) = (model.n, model.embed_dim, model.hidden_dim);
    if upstream.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            actual: upstream.len(),
        });
    }
    let mut grads = model.zeros_like();

    // d f / d l1 = f(1 - f) = -d f / d l0.
    let mut dlogits = vec![0.0; n * 2];
    for i in 0..n {
        let s = upstream[i] * acts.f[i] * (1.0 - acts.f[i]);
        dlogits[2 * i] = -s;
        dlogits[2 * i + 1] = s;
    }
    for row in dlogits.chunks(2) {
        grads.b2[0] += row[0];
        grads.b2[1] += row[1];
    }
    grads.w2 = matmul_tn(&acts.ah, &dlogits, n, d, 2);

    // A_hat is symmetric, so its transpose is itself.
    let dah = matmul_nt(&dlogits, &model.w2, n, 2, d);
    let mut dz1 = adj.apply(&dah, d);
    for (g, &z) in dz1.iter_mut().zip(&acts.z1) {
        if z <= 0.0 {
            *g = 0.0;
        }
    }
    for row in dz1.chunks(d) {
        for (b, x) in grads.b1.iter_mut().zip(row) {
            *b += x;
        }
    }
    grads.w1 = matmul_tn(&acts.ax, &dz1, n, d0, d);
    let dax = matmul_nt(&dz1, &model.w1, n, d, d0);
    grads.embeddings = adj.apply(&dax, d0);
    Ok(grads)
}

pub fn backward(model: &GnnModel, adj: &NormalizedAdjacency, upstream: &[f64]) -> Result<GnnModel> {
    let acts = forward_cached(model, adj)?;
    backward_cached(model, adj, &acts, upstream)
}
