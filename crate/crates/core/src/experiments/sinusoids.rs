use std::ops::ControlFlow;

use super::measure::{dft_amplitude, FrequencyTrace, Metric};
use super::targets::SinusoidTarget;
use crate::autodiff::Tensor;
use crate::error::{Error, Result};
use crate::networks::{build_with_stream, train_full_batch_with, Network, NetworkSpec, Optimizer, TrainConfig};
use crate::rng::{Purpose, SeedStream};

#[derive(Debug, Clone, PartialEq)]
pub struct SinusoidConfig {
    pub spec: NetworkSpec,
    pub frequencies: Vec<usize>,
    pub amplitudes: Vec<f64>,
    pub samples: usize,
    pub learning_rate: f64,
    pub lr_multiplicative: f64,
    pub optimizer: Optimizer,
    pub iterations: usize,
    pub record_every: usize,
    pub master_seed: u64,
    pub run_index: u64,
    /// Stop at the first checkpoint where every ratio exceeds this.
    pub stop_when_converged: Option<f64>,
}

impl SinusoidConfig {
    /// `K = (5, 10, …, 50)` with unit amplitudes on 200 samples, full-batch
    /// Adam at `1e-3` for 3000 steps, recording every 100.
    pub fn new(spec: NetworkSpec) -> Self {
        Self {
            spec,
            frequencies: (1..=10).map(|i| 5 * i).collect(),
            amplitudes: vec![1.0; 10],
            samples: 200,
            learning_rate: 1e-3,
            lr_multiplicative: 1e-4,
            optimizer: Optimizer::adam(),
            iterations: 3000,
            record_every: 100,
            master_seed: 0,
            run_index: 0,
            stop_when_converged: None,
        }
    }

    /// The target shared by every architecture at this `(master_seed, run_index)`.
    pub fn target(&self) -> Result<SinusoidTarget> {
        let mut s = SeedStream::new(self.master_seed).stream(self.run_index, Purpose::Target);
        SinusoidTarget::with_random_phases(self.frequencies.clone(), self.amplitudes.clone(), self.samples, &mut s)
    }
}

/// `|f̃(k_i)| / A_i` for each target frequency.
pub fn amplitude_ratios(prediction: &[f64], target: &SinusoidTarget) -> Result<Vec<f64>> {
    target
        .frequencies()
        .iter()
        .zip(target.amplitudes())
        .map(|(&k, a)| Ok(dft_amplitude(prediction, k)? / a))
        .collect()
}

/// Inputs `j/N` as an `[N, 1]` batch.
pub fn grid_inputs(target: &SinusoidTarget) -> Tensor {
    Tensor::matrix(target.samples(), 1, target.grid()).expect("sized buffer")
}

#[derive(Debug, Clone)]
pub struct SinusoidRun {
    pub target: SinusoidTarget,
    pub trace: FrequencyTrace,
    pub loss: Vec<f64>,
    pub network: Network,
}

impl SinusoidRun {
    /// Ratios of the final network.
    pub fn final_ratios(&self) -> Vec<f64> {
        self.trace.final_values()
    }
}

/// Trains `cfg.spec` on the sinusoid superposition and records amplitude
/// ratios at every checkpoint.
pub fn run_sinusoids(cfg: &SinusoidConfig) -> Result<SinusoidRun> {
    if cfg.spec.input_dim != 1 || cfg.spec.output_dim != 1 {
        return Err(Error::Config("sinusoid runs need scalar input and output".into()));
    }
    let target = cfg.target()?;
    let seeds = SeedStream::new(cfg.master_seed);
    let mut net = build_with_stream(&cfg.spec, &mut seeds.stream(cfg.run_index, Purpose::Init))?;
    let x = grid_inputs(&target);
    let y = Tensor::matrix(target.samples(), 1, target.values())?;

    let train = TrainConfig {
        learning_rate: cfg.learning_rate,
        lr_multiplicative: cfg.lr_multiplicative,
        iterations: cfg.iterations,
        seed: cfg.master_seed,
        record_every: cfg.record_every,
        optimizer: cfg.optimizer,
        keep_snapshots: false,
    };
    let mut trace = FrequencyTrace::new(Metric::AmplitudeRatio, cfg.frequencies.clone(), 1);
    let mut loss = Vec::new();
    train_full_batch_with(&mut net, &x, &y, &train, |it, pred, l| {
        let ratios = amplitude_ratios(pred.data(), &target)?;
        trace.push(it, &ratios)?;
        loss.push(l);
        Ok(match cfg.stop_when_converged {
            Some(th) if ratios.iter().all(|&r| r > th) => ControlFlow::Break(()),
            _ => ControlFlow::Continue(()),
        })
    })?;
    Ok(SinusoidRun {
        target,
        trace,
        loss,
        network: net,
    })
}
