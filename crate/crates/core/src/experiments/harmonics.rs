use std::ops::ControlFlow;

use super::measure::{residual_projection, FrequencyTrace, Metric};
use super::targets::HarmonicTarget;
use crate::autodiff::Tensor;
use crate::error::{Error, Result};
use crate::kernels::UnitVector;
use crate::networks::{build_with_stream, train_full_batch_with, Architecture, NetworkSpec, TrainConfig};
use crate::rng::{Purpose, SeedStream};

#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicsConfig {
    pub architecture: Architecture,
    pub width: usize,
    pub samples: usize,
    pub d: usize,
    pub degrees: Vec<usize>,
    pub amplitudes: Vec<f64>,
    pub learning_rate: f64,
    pub iterations: usize,
    pub record_every: usize,
    /// Moving-average window, in checkpoints.
    pub window: usize,
    pub master_seed: u64,
    pub run_index: u64,
    /// Stop at the first checkpoint where every normalized projection is at
    /// or below this.
    pub stop_when_below: Option<f64>,
}

impl HarmonicsConfig {
    /// `d = 10`, `n = 1000`, `K = {1, 2, 4}` with unit weights, width 8192.
    pub fn new(architecture: Architecture) -> Self {
        Self {
            architecture,
            width: 8192,
            samples: 1000,
            d: 10,
            degrees: vec![1, 2, 4],
            amplitudes: vec![1.0; 3],
            learning_rate: 1.0,
            iterations: 1000,
            record_every: 10,
            window: 20,
            master_seed: 0,
            run_index: 0,
            stop_when_below: None,
        }
    }
}

/// Data and target shared by every architecture at one `(master_seed, run_index)`.
#[derive(Debug, Clone)]
pub struct HarmonicProblem {
    pub target: HarmonicTarget,
    pub points: Vec<UnitVector>,
    /// `components[i][j]`: the `i`-th target term at point `j`.
    pub components: Vec<Vec<f64>>,
    pub values: Vec<f64>,
}

impl HarmonicProblem {
    pub fn sample(cfg: &HarmonicsConfig) -> Result<Self> {
        let seeds = SeedStream::new(cfg.master_seed);
        let target = HarmonicTarget::random(
            cfg.d,
            cfg.degrees.clone(),
            cfg.amplitudes.clone(),
            &mut seeds.stream(cfg.run_index, Purpose::Target),
        )?;
        let mut data = seeds.stream(cfg.run_index, Purpose::Data);
        let points: Vec<UnitVector> = (0..cfg.samples).map(|_| UnitVector::random(&mut data, cfg.d + 1)).collect();
        let components = (0..cfg.degrees.len())
            .map(|i| points.iter().map(|x| target.component(i, x)).collect::<Result<Vec<f64>>>())
            .collect::<Result<Vec<_>>>()?;
        let values = (0..points.len()).map(|j| components.iter().map(|c| c[j]).sum()).collect();
        Ok(Self {
            target,
            points,
            components,
            values,
        })
    }
}

#[derive(Debug, Clone)]
pub struct HarmonicsRun {
    /// Residual projection per degree over its initial value.
    pub trace: FrequencyTrace,
    pub loss: Vec<f64>,
    /// Unnormalized projections at iteration 0.
    pub initial_projections: Vec<f64>,
}

/// Trains a two-layer network by full-batch gradient descent on a sampled
/// harmonic target and records per-degree residual projections.
///
/// The network is trained on `y + f₀(X)`, where `f₀` is its output at
/// initialization, so the tracked predictor `f − f₀` starts at zero.
pub fn run_harmonics(cfg: &HarmonicsConfig) -> Result<HarmonicsRun> {
    let spec = match cfg.architecture {
        Architecture::TwoLayerReLU => NetworkSpec::two_layer_relu(cfg.d + 1, cfg.width),
        Architecture::TwoLayerPi => NetworkSpec::two_layer_pi(cfg.d + 1, cfg.width),
        other => {
            return Err(Error::UnsupportedArchitecture(format!(
                "harmonics runs take two-layer networks, got {}",
                other.name()
            )))
        }
    };
    if cfg.samples == 0 {
        return Err(Error::Config("samples must be positive".into()));
    }
    let problem = HarmonicProblem::sample(cfg)?;
    let seeds = SeedStream::new(cfg.master_seed);
    let mut net = build_with_stream(&spec, &mut seeds.stream(cfg.run_index, Purpose::Init))?;

    let n = cfg.samples;
    let flat: Vec<f64> = problem.points.iter().flat_map(|p| p.coords().iter().copied()).collect();
    let x = Tensor::matrix(n, cfg.d + 1, flat)?;
    let f0 = net.predict(&x)?.into_data();
    let shifted: Vec<f64> = problem.values.iter().zip(&f0).map(|(y, f)| y + f).collect();
    let y = Tensor::matrix(n, 1, shifted.clone())?;

    let mut train = TrainConfig::new(cfg.learning_rate, cfg.iterations);
    train.lr_multiplicative = cfg.learning_rate;
    train.record_every = cfg.record_every;
    train.seed = cfg.master_seed;

    let mut trace = FrequencyTrace::new(Metric::ResidualProjection, cfg.degrees.clone(), cfg.window);
    let mut initial = Vec::new();
    let mut loss = Vec::new();
    let mut resid = vec![0.0; n];
    train_full_batch_with(&mut net, &x, &y, &train, |it, pred, l| {
        for ((r, s), p) in resid.iter_mut().zip(&shifted).zip(pred.data()) {
            *r = s - p;
        }
        let proj = problem
            .components
            .iter()
            .map(|c| residual_projection(&resid, c))
            .collect::<Result<Vec<f64>>>()?;
        if initial.is_empty() {
            if let Some(i) = proj.iter().position(|&p| p == 0.0) {
                return Err(Error::DegenerateComponent(format!(
                    "target is orthogonal to its degree-{} term at the samples",
                    cfg.degrees[i]
                )));
            }
            initial = proj.clone();
        }
        let row: Vec<f64> = proj.iter().zip(&initial).map(|(p, p0)| p / p0).collect();
        trace.push(it, &row)?;
        loss.push(l);
        Ok(match cfg.stop_when_below {
            Some(th) if row.iter().all(|&r| r <= th) => ControlFlow::Break(()),
            _ => ControlFlow::Continue(()),
        })
    })?;
    Ok(HarmonicsRun {
        trace,
        loss,
        initial_projections: initial,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(arch: Architecture) -> HarmonicsConfig {
        HarmonicsConfig {
            width: 64,
            samples: 40,
            d: 3,
            iterations: 30,
            record_every: 5,
            window: 3,
            ..HarmonicsConfig::new(arch)
        }
    }

    #[test]
    fn zero_iterations_has_one_unit_checkpoint() {
        let cfg = HarmonicsConfig {
            iterations: 0,
            ..small(Architecture::TwoLayerPi)
        };
        let run = run_harmonics(&cfg).unwrap();
        assert_eq!(run.trace.checkpoints(), &[0]);
        assert!(run.trace.final_values().iter().all(|&v| v == 1.0));
    }

    #[test]
    fn constant_target_decays() {
        let cfg = HarmonicsConfig {
            degrees: vec![0],
            amplitudes: vec![1.0],
            ..small(Architecture::TwoLayerReLU)
        };
        let run = run_harmonics(&cfg).unwrap();
        let s = run.trace.smoothed(0);
        assert!(s.windows(2).all(|w| w[1] <= w[0]), "{s:?}");
        assert!(*s.last().unwrap() < 0.9);
    }

    #[test]
    fn early_stop_below_threshold() {
        let cfg = HarmonicsConfig {
            degrees: vec![0],
            amplitudes: vec![1.0],
            iterations: 400,
            stop_when_below: Some(0.7),
            ..small(Architecture::TwoLayerReLU)
        };
        let run = run_harmonics(&cfg).unwrap();
        let last = *run.trace.checkpoints().last().unwrap();
        assert!(last < 400);
        assert!(run.trace.final_values()[0] <= 0.7);
        assert!(run.trace.series(0)[..run.trace.checkpoints().len() - 1].iter().all(|&v| v > 0.7));
    }

    #[test]
    fn architectures_share_the_problem() {
        let a = HarmonicProblem::sample(&small(Architecture::TwoLayerPi)).unwrap();
        let b = HarmonicProblem::sample(&small(Architecture::TwoLayerReLU)).unwrap();
        assert_eq!(a.values, b.values);
        assert!(matches!(
            run_harmonics(&small(Architecture::Mlp)),
            Err(Error::UnsupportedArchitecture(_))
        ));
    }
}
