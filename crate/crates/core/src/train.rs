//! Per-instance unsupervised training and hard-partition decoding.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::gnn::{backward_cached, forward_cached, init_model, normalized_adjacency, ModelConfig};
use crate::graph::{Graph, Partition};
use crate::loss::{expected_cut_cost, loss_and_grad, markov_bound, LossBreakdown, LossConfig, SoftAssignment};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Moment accumulators for a list of parameter tensors.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct AdamState {
    pub m: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub step: u64,
}

/// One bias-corrected Adam update applied to every tensor in `params`.
pub fn adam_step(params: &mut [&mut [f64]], grads: &[&[f64]], state: &mut AdamState, hyper: &AdamConfig) -> Result<()> {
    let mismatch = || Error::DimensionMismatch("parameter and gradient shapes differ".into());
    if params.len() != grads.len() {
        return Err(mismatch());
    }
    if params.iter().zip(grads).any(|(p, g)| p.len() != g.len()) {
        return Err(mismatch());
    }
    if state.step == 0 && state.m.is_empty() {
        state.m = params.iter().map(|p| vec![0.0; p.len()]).collect();
        state.v = state.m.clone();
    }
    if state.m.len() != params.len() || state.m.iter().zip(params.iter()).any(|(m, p)| m.len() != p.len()) {
        return Err(mismatch());
    }
    state.step += 1;
    let t = state.step as i32;
    let c1 = 1.0 - hyper.beta1.powi(t);
    let c2 = 1.0 - hyper.beta2.powi(t);
    for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
        let (m, v) = (&mut state.m[k], &mut state.v[k]);
        for i in 0..p.len() {
            m[i] = hyper.beta1 * m[i] + (1.0 - hyper.beta1) * g[i];
            v[i] = hyper.beta2 * v[i] + (1.0 - hyper.beta2) * g[i] * g[i];
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            p[i] -= hyper.learning_rate * m_hat / (v_hat.sqrt() + hyper.eps);
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrainConfig {
    pub adam: AdamConfig,
    pub epochs: usize,
    /// Stop after this many epochs without a new best loss; 0 disables.
    pub patience: usize,
    /// Seeds the model initialization (overrides `ModelConfig::seed`).
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            adam: AdamConfig::default(),
            epochs: 500,
            patience: 100,
            seed: 0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.adam.learning_rate > 0.0 && self.adam.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "learning rate must be positive, got {}",
                self.adam.learning_rate
            )));
        }
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainReport {
    pub loss_curve: Vec<LossBreakdown>,
    pub best_epoch: usize,
    pub best_loss: f64,
    /// Expected cut weight of the returned assignment.
    pub expected_cut: f64,
    /// `expected_cut / (1 - z)`.
    pub markov_bound: f64,
    pub wall_time: Duration,
}

/// Trains a fresh model on `g` and returns the assignment from the epoch
/// with the lowest total loss.
pub fn train(
    g: &Graph,
    mcfg: &ModelConfig,
    lcfg: &LossConfig,
    tcfg: &TrainConfig,
) -> Result<(SoftAssignment, TrainReport)> {
    lcfg.validate()?;
    tcfg.validate()?;
    let start = Instant::now();
    let adj = normalized_adjacency(g);
    let mut model = init_model(
        g,
        &ModelConfig {
            seed: tcfg.seed,
            ..*mcfg
        },
    )?;
    let mut state = AdamState::default();

    let mut curve = Vec::with_capacity(tcfg.epochs);
    let mut best: Option<(usize, f64, SoftAssignment)> = None;
    let mut stale = 0;
    for epoch in 0..tcfg.epochs {
        let acts = forward_cached(&model, &adj)?;
        let assignment = acts
            .assignment()
            .map_err(|_| Error::NonFiniteLoss { epoch, value: f64::NAN })?;
        let (loss, grad_f) = loss_and_grad(g, &assignment, lcfg)?;
        if !loss.total.is_finite() {
            return Err(Error::NonFiniteLoss {
                epoch,
                value: loss.total,
            });
        }
        curve.push(loss);
        if best.as_ref().is_none_or(|(_, b, _)| loss.total < *b) {
            best = Some((epoch, loss.total, assignment));
            stale = 0;
        } else {
            stale += 1;
            if tcfg.patience > 0 && stale >= tcfg.patience {
                break;
            }
        }
        if epoch + 1 == tcfg.epochs {
            break;
        }
        let grads = backward_cached(&model, &adj, &acts, &grad_f)?;
        adam_step(&mut model.tensors_mut(), &grads.tensors(), &mut state, &tcfg.adam)?;
    }

    let (best_epoch, best_loss, assignment) = best.expect("at least one epoch runs");
    let expected_cut = expected_cut_cost(g, &assignment)?;
    let report = TrainReport {
        loss_curve: curve,
        best_epoch,
        best_loss,
        expected_cut,
        markov_bound: markov_bound(expected_cut, lcfg.z)?,
        wall_time: start.elapsed(),
    };
    Ok((assignment, report))
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Decoder {
    #[default]
    Argmax,
    Balanced,
}

impl std::str::FromStr for Decoder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "argmax" => Ok(Decoder::Argmax),
            "balanced" => Ok(Decoder::Balanced),
            other => Err(Error::InvalidConfig(format!("unknown decoder `{other}`"))),
        }
    }
}

impl Decoder {
    pub fn decode(self, a: &SoftAssignment) -> Partition {
        match self {
            Decoder::Argmax => decode_argmax(a),
            Decoder::Balanced => decode_balanced(a),
        }
    }
}

/// Label 1 iff `f > 0.5`; exact ties go to 0.
pub fn decode_argmax(a: &SoftAssignment) -> Partition {
    Partition::from_labels_unchecked(a.f().iter().map(|&f| u8::from(f > 0.5)).collect())
}

/// The `ceil(n/2)` nodes with the largest `f` (ties by lower index) get label 1.
pub fn decode_balanced(a: &SoftAssignment) -> Partition {
    let n = a.len();
    let f = a.f();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| f[j].total_cmp(&f[i]).then(i.cmp(&j)));
    let mut labels = vec![0u8; n];
    for &i in &order[..n.div_ceil(2)] {
        labels[i] = 1;
    }
    Partition::from_labels_unchecked(labels)
}

/// Train on `g` and decode.
pub fn gnn_partition(
    g: &Graph,
    mcfg: &ModelConfig,
    lcfg: &LossConfig,
    tcfg: &TrainConfig,
    decoder: Decoder,
) -> Result<(Partition, TrainReport)> {
    let (assignment, report) = train(g, mcfg, lcfg, tcfg)?;
    Ok((decoder.decode(&assignment), report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{brute_force_min_cut, generate};
    use crate::loss::total_loss;
    use proptest::prelude::*;

    fn sa(f: &[f64]) -> SoftAssignment {
        SoftAssignment::from_f(f.to_vec()).unwrap()
    }

    #[test]
    fn adam_zero_gradient_keeps_params() {
        let mut p = vec![1.0, -2.0];
        let mut state = AdamState::default();
        for _ in 0..3 {
            adam_step(&mut [&mut p], &[&[0.0, 0.0]], &mut state, &AdamConfig::default()).unwrap();
        }
        assert_eq!(p, vec![1.0, -2.0]);
    }

    #[test]
    fn adam_first_step() {
        // m_hat = g, v_hat = g^2, so the step is lr * g / (|g| + eps).
        let mut p = vec![0.0];
        let hyper = AdamConfig {
            learning_rate: 0.1,
            ..AdamConfig::default()
        };
        adam_step(&mut [&mut p], &[&[1.0]], &mut AdamState::default(), &hyper).unwrap();
        assert!((p[0] + 0.1 / (1.0 + 1e-8)).abs() < 1e-15);
    }

    #[test]
    fn adam_is_deterministic_and_checks_shapes() {
        let run = || {
            let mut p = vec![0.3, 0.7];
            let mut state = AdamState::default();
            for k in 0..10 {
                let g = [(k as f64).sin(), (k as f64).cos()];
                adam_step(&mut [&mut p], &[&g], &mut state, &AdamConfig::default()).unwrap();
            }
            p
        };
        assert_eq!(run(), run());
        let mut p = vec![0.0; 2];
        let mut state = AdamState::default();
        assert!(adam_step(&mut [&mut p], &[&[1.0]], &mut state, &AdamConfig::default()).is_err());
        adam_step(&mut [&mut p], &[&[1.0, 1.0]], &mut state, &AdamConfig::default()).unwrap();
        let mut q = vec![0.0; 3];
        assert!(adam_step(&mut [&mut q], &[&[1.0; 3]], &mut state, &AdamConfig::default()).is_err());
    }

    #[test]
    fn single_epoch() {
        let (g, _) = generate::two_cliques_bridge(4);
        let tcfg = TrainConfig {
            epochs: 1,
            ..TrainConfig::default()
        };
        let (a, report) = train(&g, &ModelConfig::default(), &LossConfig::default(), &tcfg).unwrap();
        assert_eq!(report.loss_curve.len(), 1);
        assert_eq!(report.best_epoch, 0);
        let adj = normalized_adjacency(&g);
        let model = init_model(&g, &ModelConfig::default()).unwrap();
        assert_eq!(a, crate::gnn::forward(&model, &adj).unwrap());
    }

    #[test]
    fn training_is_deterministic_and_consistent() {
        let g = generate::generate_er(30, 0.2, 3).unwrap();
        let lcfg = LossConfig::default();
        let tcfg = TrainConfig {
            epochs: 100,
            seed: 4,
            ..TrainConfig::default()
        };
        let (a, r) = train(&g, &ModelConfig::default(), &lcfg, &tcfg).unwrap();
        let (b, s) = train(&g, &ModelConfig::default(), &lcfg, &tcfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(r.loss_curve, s.loss_curve);
        assert_eq!(total_loss(&g, &a, &lcfg).unwrap().total, r.best_loss);
        assert!(r.best_loss <= r.loss_curve[0].total);
        let min = r.loss_curve.iter().map(|l| l.total).fold(f64::INFINITY, f64::min);
        assert_eq!(min, r.best_loss);
        assert_eq!(r.loss_curve[r.best_epoch].total, r.best_loss);
        assert_eq!(r.markov_bound, r.expected_cut);
    }

    #[test]
    fn best_loss_is_a_running_minimum() {
        let g = generate::generate_er(20, 0.3, 1).unwrap();
        let lcfg = LossConfig::default();
        let mut previous = f64::INFINITY;
        for epochs in [1, 5, 20, 60] {
            let tcfg = TrainConfig {
                epochs,
                patience: 0,
                ..TrainConfig::default()
            };
            let (_, r) = train(&g, &ModelConfig::default(), &lcfg, &tcfg).unwrap();
            assert!(r.best_loss <= previous);
            previous = r.best_loss;
        }
    }

    #[test]
    fn divergence_is_reported() {
        let g = generate::generate_er(10, 0.5, 0).unwrap();
        let lcfg = LossConfig {
            lambda_cut: f64::MAX,
            lambda_cen: f64::MAX,
            ..LossConfig::default()
        };
        let err = train(&g, &ModelConfig::default(), &lcfg, &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteLoss { epoch: 0, .. }), "{err}");
        // NaN gradients poison the parameters, so the next forward pass fails
        let lcfg = LossConfig {
            xi: 1e-200,
            ..LossConfig::default()
        };
        let err = train(&g, &ModelConfig::default(), &lcfg, &TrainConfig::default()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteLoss { epoch: 1, .. }), "{err}");
        let bad = TrainConfig {
            epochs: 0,
            ..TrainConfig::default()
        };
        assert!(train(&g, &ModelConfig::default(), &LossConfig::default(), &bad).is_err());
    }

    #[test]
    fn bridged_cliques_are_split_at_the_bridge() {
        let (g, _) = generate::two_cliques_bridge(4);
        let (_, optimum) = brute_force_min_cut(&g, 0).unwrap();
        assert_eq!(optimum, 1.0);
        let hits = (0..10)
            .filter(|&seed| {
                let tcfg = TrainConfig {
                    seed,
                    ..TrainConfig::default()
                };
                let (a, _) = train(&g, &ModelConfig::default(), &LossConfig::default(), &tcfg).unwrap();
                g.cut_weight(decode_argmax(&a).labels()) == optimum
            })
            .count();
        assert!(hits >= 8, "{hits}/10");
    }

    #[test]
    fn disjoint_cliques_separate() {
        let (g, _) = generate::disjoint_cliques(5);
        let hits = (0..10)
            .filter(|&seed| {
                let tcfg = TrainConfig {
                    seed,
                    ..TrainConfig::default()
                };
                let (a, _) = train(&g, &ModelConfig::default(), &LossConfig::default(), &tcfg).unwrap();
                g.cut_weight(decode_argmax(&a).labels()) == 0.0
            })
            .count();
        assert!(hits >= 9, "{hits}/10");
    }

    #[test]
    fn argmax_decoding() {
        assert_eq!(decode_argmax(&sa(&[0.9, 0.1])).labels(), &[1, 0]);
        assert_eq!(decode_argmax(&sa(&[0.5, 0.5])).labels(), &[0, 0]);
        let g = generate::generate_er(20, 0.3, 2).unwrap();
        let a = sa(&(0..20).map(|i| i as f64 / 19.0).collect::<Vec<_>>());
        let part = decode_argmax(&a);
        let hard = SoftAssignment::from_partition(&part);
        assert_eq!(expected_cut_cost(&g, &hard).unwrap(), g.cut_weight(part.labels()));
    }

    #[test]
    fn balanced_decoding() {
        assert_eq!(decode_balanced(&sa(&[0.9, 0.8, 0.1, 0.2])).labels(), &[1, 1, 0, 0]);
        assert_eq!(decode_balanced(&sa(&[0.3; 6])).sizes(), (3, 3));
        assert_eq!(decode_balanced(&sa(&[0.3; 6])).labels(), &[1, 1, 1, 0, 0, 0]);
        assert_eq!(decode_balanced(&sa(&[0.7; 5])).sizes(), (2, 3));
    }

    proptest! {
        #[test]
        fn balanced_decoder_bound(f in proptest::collection::vec(0.0f64..=1.0, 1..60)) {
            let part = decode_balanced(&sa(&f));
            prop_assert!(part.imbalance() <= 1);
            prop_assert!(100.0 * part.imbalance() as f64 / f.len() as f64 <= 100.0 / f.len() as f64);
        }
    }
}
