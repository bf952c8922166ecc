//! Differentiable bisection loss over per-node soft assignments.
//!
//! A [`SoftAssignment`] gives each node a probability `f_i` of belonging to
//! partition 1. Read as an independent Bernoulli product distribution over
//! hard bisections, it has a closed-form expected cut, and the Markov bound
//! `E[cut] / (1 - z)` is exceeded with probability at most `1 - z`.
//!
//! The training loss is the sum of three terms: a cut term on `m_i` (the
//! soft argmax, equal to `f_i` for two classes), a balance term and a
//! centrality term on `f_i`. Each comes in two forms. [`LossMode::Literal`]
//! evaluates the formulas as printed, with `tan` read as `tanh`.
//! [`LossMode::Corrected`] fixes their orientation:
//!
//! * cut: `w * (1/4 - s_u s_v)` with `s(m) = tanh(a(m - 1/2)) / (2 tanh(a/2))`,
//!   which is 0 for agreeing confident endpoints and `w/2` for a confident cut;
//! * balance: `2|E| * tanh(a(mean(f) - 1/2))^2`, the printed per-endpoint sum
//!   evaluated at the mean of `f`, so it tracks the expected size difference
//!   while keeping the same scale as the per-edge terms;
//! * centrality: `exp(-(f_u + f_v - 1)^2 / (2 xi^2))`, peaked at `f = 1/2`.
//!
//! Every corrected term is invariant under `f -> 1 - f`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};

const NORMALIZATION_TOL: f64 = 1e-9;

/// Per-node probability of partition 1.
#[derive(Clone, Debug, PartialEq)]
pub struct SoftAssignment {
    f: Vec<f64>,
}

impl SoftAssignment {
    pub fn from_f(f: Vec<f64>) -> Result<Self> {
        if let Some(&bad) = f.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::InvalidConfig(format!("probability {bad} is not in [0, 1]")));
        }
        Ok(Self { f })
    }

    /// From softmax rows `(p[0], p[1])`.
    pub fn from_probabilities(p: &[[f64; 2]]) -> Result<Self> {
        let f = p.iter().map(soft_argmax).collect::<Result<Vec<_>>>()?;
        Self::from_f(f)
    }

    /// The deterministic assignment that puts all mass on `part`.
    pub fn from_partition(part: &Partition) -> Self {
        Self {
            f: part.labels().iter().map(|&l| f64::from(l)).collect(),
        }
    }

    pub fn f(&self) -> &[f64] {
        &self.f
    }

    pub fn len(&self) -> usize {
        self.f.len()
    }

    pub fn is_empty(&self) -> bool {
        self.f.is_empty()
    }

    pub fn probabilities(&self, i: usize) -> [f64; 2] {
        [1.0 - self.f[i], self.f[i]]
    }

    /// `f -> 1 - f`.
    pub fn flipped(&self) -> Self {
        Self {
            f: self.f.iter().map(|x| 1.0 - x).collect(),
        }
    }
}

/// Expected class index `0 * p[0] + 1 * p[1]`.
pub fn soft_argmax(p: &[f64; 2]) -> Result<f64> {
    let valid = p.iter().all(|x| (0.0..=1.0).contains(x));
    if !valid || (p[0] + p[1] - 1.0).abs() > NORMALIZATION_TOL {
        return Err(Error::NotNormalized(p[0], p[1]));
    }
    Ok(p[1])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum LossMode {
    Literal,
    #[default]
    Corrected,
}

impl std::str::FromStr for LossMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(LossMode::Literal),
            "corrected" => Ok(LossMode::Corrected),
            other => Err(Error::InvalidConfig(format!("unknown loss mode `{other}`"))),
        }
    }
}

impl std::fmt::Display for LossMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            LossMode::Literal => "literal",
            LossMode::Corrected => "corrected",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossConfig {
    /// Sharpness of the tanh squashing in the cut and balance terms.
    pub alpha: f64,
    /// Width of the centrality Gaussian.
    pub xi: f64,
    /// Confidence level of the Markov bound, in `[0, 1)`.
    pub z: f64,
    pub mode: LossMode,
    pub lambda_cut: f64,
    pub lambda_bal: f64,
    pub lambda_cen: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        Self {
            alpha: 2.0,
            xi: 0.6,
            z: 0.0,
            mode: LossMode::Corrected,
            lambda_cut: 1.0,
            lambda_bal: 1.0,
            lambda_cen: 1.0,
        }
    }
}

impl LossConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad(format!("alpha must be positive, got {}", self.alpha));
        }
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return bad(format!("xi must be positive, got {}", self.xi));
        }
        if !(0.0..1.0).contains(&self.z) {
            return bad(format!("z must be in [0, 1), got {}", self.z));
        }
        for (name, l) in [
            ("lambda_cut", self.lambda_cut),
            ("lambda_bal", self.lambda_bal),
            ("lambda_cen", self.lambda_cen),
        ] {
            if !(l >= 0.0 && l.is_finite()) {
                return bad(format!("{name} must be nonnegative, got {l}"));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LossBreakdown {
    pub l_cuts: f64,
    pub l_balance: f64,
    pub l_centrality: f64,
    pub total: f64,
}

fn check_len(g: &Graph, a: &SoftAssignment) -> Result<()> {
    if a.len() != g.n() {
        return Err(Error::LengthMismatch {
            expected: g.n(),
            actual: a.len(),
        });
    }
    Ok(())
}

fn sech2(x: f64) -> f64 {
    let t = x.tanh();
    1.0 - t * t
}

/// Cut-term squashing `s(m)` and its derivative.
fn squash(m: f64, cfg: &LossConfig) -> (f64, f64) {
    let a = cfg.alpha;
    match cfg.mode {
        LossMode::Literal => ((a * m).tanh() - 0.5, a * sech2(a * m)),
        LossMode::Corrected => {
            let scale = 0.5 / (0.5 * a).tanh();
            let x = a * (m - 0.5);
            (scale * x.tanh(), scale * a * sech2(x))
        }
    }
}

/// Adds the cut term's gradient into `grad` (scaled by `weight`) and returns its value.
fn cuts_into(g: &Graph, f: &[f64], cfg: &LossConfig, weight: f64, grad: Option<&mut [f64]>) -> f64 {
    let s: Vec<(f64, f64)> = f.iter().map(|&m| squash(m, cfg)).collect();
    let sign = match cfg.mode {
        LossMode::Literal => 1.0,
        LossMode::Corrected => -1.0,
    };
    let value = g
        .edges()
        .iter()
        .map(|e| {
            let prod = s[e.u].0 * s[e.v].0;
            e.w * match cfg.mode {
                LossMode::Literal => prod,
                LossMode::Corrected => 0.25 - prod,
            }
        })
        .sum();
    if let Some(grad) = grad {
        for e in g.edges() {
            let (su, du) = s[e.u];
            let (sv, dv) = s[e.v];
            grad[e.u] += weight * sign * e.w * du * sv;
            grad[e.v] += weight * sign * e.w * su * dv;
        }
    }
    value
}

fn balance_into(g: &Graph, f: &[f64], cfg: &LossConfig, weight: f64, grad: Option<&mut [f64]>) -> f64 {
    let a = cfg.alpha;
    match cfg.mode {
        LossMode::Literal => {
            // tanh(a(f - 1/2))^2 per endpoint, counted once per incident edge.
            let term = |x: f64| {
                let t = (a * (x - 0.5)).tanh();
                (t * t, 2.0 * a * t * (1.0 - t * t))
            };
            let value = g.edges().iter().map(|e| term(f[e.u]).0 + term(f[e.v]).0).sum();
            if let Some(grad) = grad {
                for e in g.edges() {
                    grad[e.u] += weight * term(f[e.u]).1;
                    grad[e.v] += weight * term(f[e.v]).1;
                }
            }
            value
        }
        LossMode::Corrected => {
            let n = f.len() as f64;
            if n == 0.0 {
                return 0.0;
            }
            // The literal sum with every f replaced by the mean: one term per edge endpoint.
            let count = 2.0 * g.edge_count() as f64;
            let mean = f.iter().sum::<f64>() / n;
            let t = (a * (mean - 0.5)).tanh();
            if let Some(grad) = grad {
                let d = weight * count * 2.0 * a * t * (1.0 - t * t) / n;
                grad.iter_mut().for_each(|gi| *gi += d);
            }
            count * t * t
        }
    }
}

fn centrality_into(g: &Graph, f: &[f64], cfg: &LossConfig, weight: f64, grad: Option<&mut [f64]>) -> f64 {
    let shift = match cfg.mode {
        LossMode::Literal => 0.0,
        LossMode::Corrected => 1.0,
    };
    let inv = 1.0 / (2.0 * cfg.xi * cfg.xi);
    let term = |e: &crate::graph::Edge| {
        let c = f[e.u] + f[e.v] - shift;
        let k = (-c * c * inv).exp();
        (k, -2.0 * c * inv * k)
    };
    let value = g.edges().iter().map(|e| term(e).0).sum();
    if let Some(grad) = grad {
        for e in g.edges() {
            let d = weight * term(e).1;
            grad[e.u] += d;
            grad[e.v] += d;
        }
    }
    value
}

pub fn loss_cuts(g: &Graph, a: &SoftAssignment, cfg: &LossConfig) -> Result<f64> {
    check_len(g, a)?;
    Ok(cuts_into(g, a.f(), cfg, 0.0, None))
}

pub fn loss_balance(g: &Graph, a: &SoftAssignment, cfg: &LossConfig) -> Result<f64> {
    check_len(g, a)?;
    Ok(balance_into(g, a.f(), cfg, 0.0, None))
}

pub fn loss_centrality(g: &Graph, a: &SoftAssignment, cfg: &LossConfig) -> Result<f64> {
    check_len(g, a)?;
    Ok(centrality_into(g, a.f(), cfg, 0.0, None))
}

fn evaluate(g: &Graph, f: &[f64], cfg: &LossConfig, mut grad: Option<&mut [f64]>) -> LossBreakdown {
    let l_cuts = cuts_into(g, f, cfg, cfg.lambda_cut, grad.as_deref_mut());
    let l_balance = balance_into(g, f, cfg, cfg.lambda_bal, grad.as_deref_mut());
    let l_centrality = centrality_into(g, f, cfg, cfg.lambda_cen, grad);
    LossBreakdown {
        l_cuts,
        l_balance,
        l_centrality,
        total: cfg.lambda_cut * l_cuts + cfg.lambda_bal * l_balance + cfg.lambda_cen * l_centrality,
    }
}

pub fn total_loss(g: &Graph, a: &SoftAssignment, cfg: &LossConfig) -> Result<LossBreakdown> {
    check_len(g, a)?;
    Ok(evaluate(g, a.f(), cfg, None))
}

/// `d total / d f_i` for every node.
pub fn grad_total_loss(g: &Graph, a: &SoftAssignment, cfg: &LossConfig) -> Result<Vec<f64>> {
    Ok(loss_and_grad(g, a, cfg)?.1)
}

/// Loss value and its gradient with respect to `f` in one pass.
pub fn loss_and_grad(g: &Graph, a: &SoftAssignment, cfg: &LossConfig) -> Result<(LossBreakdown, Vec<f64>)> {
    check_len(g, a)?;
    let mut grad = vec![0.0; g.n()];
    let breakdown = evaluate(g, a.f(), cfg, Some(&mut grad));
    Ok((breakdown, grad))
}

/// Exact `E[cut weight]` under the independent product distribution.
pub fn expected_cut_cost(g: &Graph, a: &SoftAssignment) -> Result<f64> {
    check_len(g, a)?;
    let f = a.f();
    Ok(g.edges()
        .iter()
        .map(|e| e.w * (f[e.u] * (1.0 - f[e.v]) + (1.0 - f[e.u]) * f[e.v]))
        .sum())
}

/// `expected_cost / (1 - z)`: by Markov's inequality a draw costs less than
/// this with probability at least `z`.
pub fn markov_bound(expected_cost: f64, z: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&z) {
        return Err(Error::InvalidConfig(format!("z must be in [0, 1), got {z}")));
    }
    if expected_cost.is_nan() || expected_cost < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "expected cost must be nonnegative, got {expected_cost}"
        )));
    }
    Ok(expected_cost / (1.0 - z))
}

/// Fraction of `samples` Bernoulli draws whose cut weight is at most the
/// Markov bound. Should be at least `z` up to sampling noise.
pub fn check_markov_guarantee(g: &Graph, a: &SoftAssignment, z: f64, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(Error::InvalidConfig("need at least one sample".into()));
    }
    let bound = markov_bound(expected_cut_cost(g, a)?, z)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut labels = vec![0u8; g.n()];
    let mut hits = 0usize;
    for _ in 0..samples {
        for (l, &p) in labels.iter_mut().zip(a.f()) {
            *l = u8::from(rng.gen::<f64>() < p);
        }
        if g.cut_weight(&labels) <= bound {
            hits += 1;
        }
    }
    Ok(hits as f64 / samples as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::generate;
    use rand::Rng;

    fn edge() -> Graph {
        Graph::from_unweighted(2, [(0, 1)]).unwrap()
    }

    fn triangle() -> Graph {
        Graph::from_unweighted(3, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    fn sa(f: &[f64]) -> SoftAssignment {
        SoftAssignment::from_f(f.to_vec()).unwrap()
    }

    fn cfg(mode: LossMode, alpha: f64, xi: f64) -> LossConfig {
        LossConfig {
            alpha,
            xi,
            mode,
            ..LossConfig::default()
        }
    }

    #[test]
    fn soft_argmax_cases() {
        assert_eq!(soft_argmax(&[1.0, 0.0]).unwrap(), 0.0);
        assert_eq!(soft_argmax(&[0.0, 1.0]).unwrap(), 1.0);
        assert_eq!(soft_argmax(&[0.5, 0.5]).unwrap(), 0.5);
        assert!(matches!(soft_argmax(&[0.5, 0.6]), Err(Error::NotNormalized(..))));
        assert!(SoftAssignment::from_probabilities(&[[0.3, 0.7], [1.0, 0.0]]).is_ok());
        assert!(SoftAssignment::from_f(vec![1.5]).is_err());
    }

    #[test]
    fn cut_term_values() {
        let g = edge();
        for alpha in [0.5, 2.0, 10.0] {
            let c = loss_cuts(&g, &sa(&[0.0, 0.0]), &cfg(LossMode::Corrected, alpha, 0.25)).unwrap();
            assert!(c.abs() < 1e-15, "alpha {alpha}: {c}");
        }
        let c = loss_cuts(&g, &sa(&[1.0, 0.0]), &cfg(LossMode::Corrected, 10.0, 0.25)).unwrap();
        assert!((c - 0.5).abs() < 1e-6);
        // (tanh(10) - 0.5)^2 with tanh(10) = 1 - 4.1e-9.
        let c = loss_cuts(&g, &sa(&[1.0, 1.0]), &cfg(LossMode::Literal, 10.0, 0.25)).unwrap();
        assert!((c - 0.25).abs() < 1e-6);
    }

    #[test]
    fn balance_term_values() {
        for mode in [LossMode::Literal, LossMode::Corrected] {
            let b = loss_balance(&triangle(), &sa(&[0.5; 3]), &cfg(mode, 2.0, 0.25)).unwrap();
            assert_eq!(b, 0.0);
        }
        let g = generate::complete(4);
        let b = loss_balance(&g, &sa(&[1.0, 1.0, 0.0, 0.0]), &cfg(LossMode::Corrected, 3.0, 0.25)).unwrap();
        assert_eq!(b, 0.0);
        let b = loss_balance(&edge(), &sa(&[1.0, 1.0]), &cfg(LossMode::Literal, 2.0, 0.25)).unwrap();
        assert!((b - 2.0 * 1f64.tanh().powi(2)).abs() < 1e-12);
        assert!((b - 1.1600515).abs() < 1e-4);
    }

    #[test]
    fn corrected_balance_matches_literal_at_uniform_f() {
        let (g, _) = generate::generate_connected_er(15, 0.3, 4, 50).unwrap();
        for v in [0.0, 0.2, 0.7, 1.0] {
            let a = sa(&[v; 15]);
            let lit = loss_balance(&g, &a, &cfg(LossMode::Literal, 2.0, 0.25)).unwrap();
            let cor = loss_balance(&g, &a, &cfg(LossMode::Corrected, 2.0, 0.25)).unwrap();
            assert!((lit - cor).abs() < 1e-12 * lit.max(1.0));
        }
        // mean 0.75 on the triangle: six endpoints times tanh(0.5)^2
        let b = loss_balance(
            &triangle(),
            &sa(&[1.0, 0.5, 0.75]),
            &cfg(LossMode::Corrected, 2.0, 0.25),
        )
        .unwrap();
        assert!((b - 6.0 * 0.462_117_157_260_009_8f64.powi(2)).abs() < 1e-12);
    }

    #[test]
    fn centrality_term_values() {
        let c = cfg(LossMode::Corrected, 2.0, 0.25);
        assert_eq!(loss_centrality(&edge(), &sa(&[0.5, 0.5]), &c).unwrap(), 1.0);
        assert_eq!(loss_centrality(&edge(), &sa(&[1.0, 0.0]), &c).unwrap(), 1.0);
        let v = loss_centrality(&edge(), &sa(&[1.0, 1.0]), &c).unwrap();
        assert!((v - (-8f64).exp()).abs() < 1e-8);
        assert!((v - 3.3546e-4).abs() < 1e-8);
    }

    #[test]
    fn literal_centrality_is_not_label_symmetric() {
        let c = cfg(LossMode::Literal, 2.0, 0.25);
        let ones = loss_centrality(&edge(), &sa(&[1.0, 1.0]), &c).unwrap();
        let zeros = loss_centrality(&edge(), &sa(&[0.0, 0.0]), &c).unwrap();
        assert_eq!(zeros, 1.0);
        assert!(ones < 1e-3);
    }

    #[test]
    fn total_is_weighted_sum() {
        let g = triangle();
        let a = sa(&[0.2, 0.7, 0.9]);
        let zero = LossConfig {
            lambda_cut: 0.0,
            lambda_bal: 0.0,
            lambda_cen: 0.0,
            ..LossConfig::default()
        };
        assert_eq!(total_loss(&g, &a, &zero).unwrap().total, 0.0);
        assert!(grad_total_loss(&g, &a, &zero).unwrap().iter().all(|&x| x == 0.0));

        let weighted = LossConfig {
            lambda_cut: 2.0,
            lambda_bal: 0.5,
            lambda_cen: 3.0,
            ..LossConfig::default()
        };
        let b = total_loss(&g, &a, &weighted).unwrap();
        let expected = 2.0 * b.l_cuts + 0.5 * b.l_balance + 3.0 * b.l_centrality;
        assert!((b.total - expected).abs() < 1e-14);
    }

    #[test]
    fn triangle_at_center() {
        // Corrected terms at f = 1/2: s = 0 so each edge costs 1/4; mean f is
        // 1/2 so balance vanishes; each pair sums to 1 so centrality is 1.
        let b = total_loss(&triangle(), &sa(&[0.5; 3]), &cfg(LossMode::Corrected, 2.0, 0.25)).unwrap();
        assert!((b.l_cuts - 0.75).abs() < 1e-12);
        assert_eq!(b.l_balance, 0.0);
        assert_eq!(b.l_centrality, 3.0);
        assert!((b.total - 3.75).abs() < 1e-12);
    }

    #[test]
    fn gradient_vanishes_at_center_without_centrality() {
        let g = generate::generate_er(12, 0.4, 3).unwrap();
        let c = LossConfig {
            lambda_cen: 0.0,
            ..LossConfig::default()
        };
        let grad = grad_total_loss(&g, &sa(&[0.5; 12]), &c).unwrap();
        assert!(grad.iter().all(|&x| x == 0.0), "{grad:?}");
    }

    fn finite_difference(g: &Graph, f: &[f64], c: &LossConfig, i: usize, h: f64) -> f64 {
        let mut plus = f.to_vec();
        let mut minus = f.to_vec();
        plus[i] += h;
        minus[i] -= h;
        let lp = total_loss(g, &sa(&plus), c).unwrap().total;
        let lm = total_loss(g, &sa(&minus), c).unwrap().total;
        (lp - lm) / (2.0 * h)
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let n = 10;
            let g = generate::generate_er(n, 0.4, trial).unwrap();
            let f: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..0.95)).collect();
            for mode in [LossMode::Literal, LossMode::Corrected] {
                let c = LossConfig {
                    alpha: rng.gen_range(0.5..4.0),
                    xi: rng.gen_range(0.2..1.0),
                    mode,
                    lambda_cut: rng.gen_range(0.0..2.0),
                    lambda_bal: rng.gen_range(0.0..2.0),
                    lambda_cen: rng.gen_range(0.0..2.0),
                    ..LossConfig::default()
                };
                let grad = grad_total_loss(&g, &sa(&f), &c).unwrap();
                for (i, &gi) in grad.iter().enumerate() {
                    let fd = finite_difference(&g, &f, &c, i, 1e-5);
                    let err = (gi - fd).abs() / gi.abs().max(fd.abs()).max(1e-6);
                    assert!(err < 1e-4, "trial {trial} {mode} node {i}: {gi} vs {fd}");
                }
            }
        }
    }

    #[test]
    fn corrected_loss_is_label_symmetric() {
        let g = generate::generate_er(15, 0.3, 5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = SoftAssignment::from_f((0..15).map(|_| rng.gen::<f64>()).collect()).unwrap();
        let c = LossConfig::default();
        let x = total_loss(&g, &a, &c).unwrap().total;
        let y = total_loss(&g, &a.flipped(), &c).unwrap().total;
        assert!((x - y).abs() < 1e-12);
    }

    #[test]
    fn expected_cut() {
        let g = edge();
        assert_eq!(expected_cut_cost(&g, &sa(&[0.5, 0.5])).unwrap(), 0.5);
        assert_eq!(expected_cut_cost(&g, &sa(&[1.0, 0.0])).unwrap(), 1.0);
        let g = generate::generate_er(20, 0.3, 8).unwrap();
        let part = Partition::new((0..20).map(|i| (i % 3 == 0) as u8).collect()).unwrap();
        let a = SoftAssignment::from_partition(&part);
        assert_eq!(expected_cut_cost(&g, &a).unwrap(), g.cut_weight(part.labels()));
    }

    #[test]
    fn markov_bound_values() {
        assert_eq!(markov_bound(1.5, 0.0).unwrap(), 1.5);
        assert_eq!(markov_bound(1.5, 0.5).unwrap(), 3.0);
        assert!((markov_bound(2.0, 0.9).unwrap() - 20.0).abs() < 1e-12);
        assert!(markov_bound(1.0, 1.0).is_err());
        assert!(markov_bound(1.0, -0.1).is_err());
    }

    #[test]
    fn markov_guarantee_degenerate() {
        let g = triangle();
        assert_eq!(check_markov_guarantee(&g, &sa(&[0.0; 3]), 0.5, 100, 1).unwrap(), 1.0);
        assert_eq!(check_markov_guarantee(&g, &sa(&[1.0; 3]), 0.5, 100, 1).unwrap(), 1.0);
        assert!(check_markov_guarantee(&g, &sa(&[1.0; 3]), 0.5, 0, 1).is_err());
    }

    #[test]
    fn markov_guarantee_triangle() {
        // All eight outcomes cut 0 or 2 edges; E = 1.5 so the z = 1/2 bound is 3.
        let mut cuts = Vec::new();
        for mask in 0u8..8 {
            let labels: Vec<u8> = (0..3).map(|i| (mask >> i) & 1).collect();
            cuts.push(triangle().cut_weight(&labels));
        }
        assert!(cuts.iter().all(|&c| c == 0.0 || c == 2.0));
        assert_eq!(cuts.iter().sum::<f64>() / 8.0, 1.5);
        let frac = check_markov_guarantee(&triangle(), &sa(&[0.5; 3]), 0.5, 100_000, 3).unwrap();
        assert_eq!(frac, 1.0);
    }

    #[test]
    fn length_mismatch() {
        let c = LossConfig::default();
        assert!(matches!(
            total_loss(&triangle(), &sa(&[0.5; 2]), &c),
            Err(Error::LengthMismatch { expected: 3, actual: 2 })
        ));
        assert!(expected_cut_cost(&triangle(), &sa(&[0.5])).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(LossConfig::default().validate().is_ok());
        for bad in [
            LossConfig {
                alpha: 0.0,
                ..LossConfig::default()
            },
            LossConfig {
                xi: -1.0,
                ..LossConfig::default()
            },
            LossConfig {
                z: 1.0,
                ..LossConfig::default()
            },
            LossConfig {
                lambda_bal: -1.0,
                ..LossConfig::default()
            },
        ] {
            assert!(bad.validate().is_err());
        }
    }
}
