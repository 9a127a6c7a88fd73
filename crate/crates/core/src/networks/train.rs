use std::ops::ControlFlow;

use indexmap::IndexMap;

use super::build::{check_batch, Network};
use crate::autodiff::Tensor;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Optimizer {
    /// `θ ← θ − η ∇L`
    GradientDescent,
    /// Full-batch Adam with bias correction.
    Adam { beta1: f64, beta2: f64, eps: f64 },
}

impl Optimizer {
    pub fn adam() -> Self {
        Optimizer::Adam {
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    /// Rate for multiplicative-branch matrices `Aℓ`.
    pub lr_multiplicative: f64,
    pub iterations: usize,
    pub seed: u64,
    pub record_every: usize,
    pub optimizer: Optimizer,
    /// Keep a flat parameter copy at every recorded step.
    pub keep_snapshots: bool,
}

impl TrainConfig {
    /// Plain gradient descent with `lr_multiplicative = learning_rate / 10`
    /// and a record every 100 steps.
    pub fn new(learning_rate: f64, iterations: usize) -> Self {
        Self {
            learning_rate,
            lr_multiplicative: learning_rate / 10.0,
            iterations,
            seed: 0,
            record_every: 100,
            optimizer: Optimizer::GradientDescent,
            keep_snapshots: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0) || !(self.lr_multiplicative >= 0.0) {
            return Err(Error::Config("learning rates must be non-negative".into()));
        }
        if self.record_every == 0 {
            return Err(Error::Config("record_every must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainingTrace {
    pub iterations: Vec<usize>,
    pub loss: Vec<f64>,
    pub snapshots: Vec<Vec<f64>>,
}

/// Steps at which a run of `iterations` steps records: every `every`-th
/// step and the last one.
pub fn checkpoints(iterations: usize, every: usize) -> Vec<usize> {
    let mut v: Vec<usize> = (0..=iterations).step_by(every.max(1)).collect();
    if v.last() != Some(&iterations) {
        v.push(iterations);
    }
    v
}

/// Full-batch training on the mean squared error.
pub fn train_full_batch(
    net: &mut Network,
    x: &Tensor,
    y: &Tensor,
    cfg: &TrainConfig,
) -> Result<TrainingTrace> {
    train_full_batch_with(net, x, y, cfg, |_, _, _| Ok(ControlFlow::Continue(())))
}

/// As [`train_full_batch`], calling `observe(iteration, prediction, loss)`
/// at every recorded step. Iteration `t` is the state after `t` updates.
/// Returning `ControlFlow::Break` ends training at that step.
pub fn train_full_batch_with<F>(
    net: &mut Network,
    x: &Tensor,
    y: &Tensor,
    cfg: &TrainConfig,
    mut observe: F,
) -> Result<TrainingTrace>
where
    F: FnMut(usize, &Tensor, f64) -> Result<ControlFlow<()>>,
{
    cfg.validate()?;
    check_batch(x, y)?;
    let mut trace = TrainingTrace::default();
    let mut adam: IndexMap<String, (Vec<f64>, Vec<f64>)> = IndexMap::new();
    let (out_id, loss_id) = (net.output_node(), net.loss_node());
    for it in 0..=cfg.iterations {
        let graph = net.graph_mut();
        let loss = graph.forward(&[("x", x), ("y", y)], loss_id)?.item();
        if !loss.is_finite() {
            return Err(Error::Divergence {
                iteration: it,
                loss,
            });
        }
        if it % cfg.record_every == 0 || it == cfg.iterations {
            trace.iterations.push(it);
            trace.loss.push(loss);
            if cfg.keep_snapshots {
                trace.snapshots.push(graph.flat_params());
            }
            if observe(it, graph.value(out_id)?, loss)?.is_break() {
                break;
            }
        }
        if it == cfg.iterations {
            break;
        }
        graph.backward_in_place(loss_id)?;
        let step = it + 1;
        graph.update_params(|name, theta, grad| {
            let lr = if Network::is_multiplicative_param(name) {
                cfg.lr_multiplicative
            } else {
                cfg.learning_rate
            };
            match cfg.optimizer {
                Optimizer::GradientDescent => {
                    for (t, g) in theta.iter_mut().zip(grad) {
                        *t -= lr * g;
                    }
                }
                Optimizer::Adam { beta1, beta2, eps } => {
                    let (m, v) = adam
                        .entry(name.to_string())
                        .or_insert_with(|| (vec![0.0; theta.len()], vec![0.0; theta.len()]));
                    let c1 = 1.0 - beta1.powi(step as i32);
                    let c2 = 1.0 - beta2.powi(step as i32);
                    for i in 0..theta.len() {
                        let gi = grad[i];
                        m[i] = beta1 * m[i] + (1.0 - beta1) * gi;
                        v[i] = beta2 * v[i] + (1.0 - beta2) * gi * gi;
                        theta[i] -= lr * (m[i] / c1) / ((v[i] / c2).sqrt() + eps);
                    }
                }
            }
        })?;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::{build, NetworkSpec};

    #[test]
    fn scalar_linear_model_step() {
        // f(x) = w x + b at x = 1 with loss (w + b − 2)²: from zero, both
        // coordinates move by 0.25 · 4 = 1 and the fit becomes exact.
        let mut net = build(&NetworkSpec::mlp(1, 1, 1, 1), 0).unwrap();
        net.graph_mut().set_flat_params(&[0.0, 0.0]).unwrap();
        let x = Tensor::matrix(1, 1, vec![1.0]).unwrap();
        let y = Tensor::matrix(1, 1, vec![2.0]).unwrap();
        let mut cfg = TrainConfig::new(0.25, 1);
        cfg.record_every = 1;
        let trace = train_full_batch(&mut net, &x, &y, &cfg).unwrap();
        // both w and b move by 0.25·4 = 1
        assert_eq!(net.graph().flat_params(), vec![1.0, 1.0]);
        assert_eq!(trace.iterations, vec![0, 1]);
        assert_eq!(trace.loss, vec![4.0, 0.0]);
    }

    #[test]
    fn matches_scalar_iteration() {
        // w, b ← w, b − η · 2 (w x + b − y) · (x, 1), several steps.
        let mut net = build(&NetworkSpec::mlp(1, 1, 1, 1), 0).unwrap();
        net.graph_mut().set_flat_params(&[0.0, 0.0]).unwrap();
        let x = Tensor::matrix(1, 1, vec![1.5]).unwrap();
        let y = Tensor::matrix(1, 1, vec![2.0]).unwrap();
        let lr = 0.1;
        train_full_batch(&mut net, &x, &y, &TrainConfig::new(lr, 4)).unwrap();
        let (mut w, mut b) = (0.0f64, 0.0f64);
        for _ in 0..4 {
            let r = 2.0 * (w * 1.5 + b - 2.0);
            w -= lr * r * 1.5;
            b -= lr * r;
        }
        let p = net.graph().flat_params();
        assert!((p[0] - w).abs() < 1e-15 && (p[1] - b).abs() < 1e-15);
    }

    #[test]
    fn zero_learning_rate_freezes_parameters() {
        let mut net = build(&NetworkSpec::pi_ncp(1, 8, 3, 1, vec![1]), 4).unwrap();
        let before = net.graph().flat_params();
        let x = Tensor::matrix(3, 1, vec![0.1, 0.5, 0.9]).unwrap();
        let y = Tensor::matrix(3, 1, vec![1.0, 0.0, -1.0]).unwrap();
        let mut cfg = TrainConfig::new(0.0, 5);
        cfg.record_every = 1;
        let trace = train_full_batch(&mut net, &x, &y, &cfg).unwrap();
        assert_eq!(before, net.graph().flat_params());
        assert!(trace.loss.windows(2).all(|w| w[0] == w[1]));
    }

    #[test]
    fn divergence_is_an_error() {
        let mut net = build(&NetworkSpec::mlp(1, 8, 3, 1), 4).unwrap();
        let x = Tensor::matrix(2, 1, vec![1.0, 2.0]).unwrap();
        let y = Tensor::matrix(2, 1, vec![1e3, -1e3]).unwrap();
        let err = train_full_batch(&mut net, &x, &y, &TrainConfig::new(10.0, 200)).unwrap_err();
        assert!(matches!(err, Error::Divergence { .. }), "{err}");
    }

    #[test]
    fn adam_reduces_loss() {
        let mut net = build(&NetworkSpec::mlp(1, 16, 3, 1), 1).unwrap();
        let xs: Vec<f64> = (0..20).map(|i| i as f64 / 20.0).collect();
        let ys: Vec<f64> = xs.iter().map(|v| (6.0 * v).sin()).collect();
        let x = Tensor::matrix(20, 1, xs).unwrap();
        let y = Tensor::matrix(20, 1, ys).unwrap();
        let mut cfg = TrainConfig::new(1e-2, 300);
        cfg.optimizer = Optimizer::adam();
        let trace = train_full_batch(&mut net, &x, &y, &cfg).unwrap();
        assert!(trace.loss.last().unwrap() < &(0.2 * trace.loss[0]));
    }

    #[test]
    fn checkpoint_schedule() {
        assert_eq!(checkpoints(250, 100), vec![0, 100, 200, 250]);
        assert_eq!(checkpoints(0, 100), vec![0]);
        assert_eq!(checkpoints(200, 100), vec![0, 100, 200]);
    }
}
