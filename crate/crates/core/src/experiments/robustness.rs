use super::sinusoids::{amplitude_ratios, grid_inputs};
use super::targets::SinusoidTarget;
use crate::error::{Error, Result};
use crate::networks::{perturb_with_stream, Network};
use crate::rng::{Purpose, SeedStream};

/// A checkpoint counts as converged when every ratio exceeds this.
pub const CONVERGED_RATIO: f64 = 0.8;

#[derive(Debug, Clone, PartialEq)]
pub struct RobustnessConfig {
    pub deltas: Vec<f64>,
    pub master_seed: u64,
    /// Selects the perturbation direction.
    pub run_index: u64,
}

/// Amplitude ratios after perturbing by each `delta`.
#[derive(Debug, Clone, PartialEq)]
pub struct RetentionTable {
    pub frequencies: Vec<usize>,
    pub deltas: Vec<f64>,
    /// Ratios of the unperturbed checkpoint.
    pub converged: Vec<f64>,
    /// `rows[i][j]`: ratio at frequency `j` after perturbation `deltas[i]`.
    pub rows: Vec<Vec<f64>>,
}

impl RetentionTable {
    /// Ratio at `frequency` for `deltas[i]`.
    pub fn at(&self, i: usize, frequency: usize) -> Option<f64> {
        let j = self.frequencies.iter().position(|&k| k == frequency)?;
        Some(self.rows[i][j])
    }
}

/// Perturbs a converged network along one random unit direction, scaled by
/// each `delta`, and measures the surviving amplitude ratios.
pub fn run_robustness(net: &Network, target: &SinusoidTarget, cfg: &RobustnessConfig) -> Result<RetentionTable> {
    let x = grid_inputs(target);
    let mut base = net.clone();
    let converged = amplitude_ratios(base.predict(&x)?.data(), target)?;
    if let Some((k, r)) = target
        .frequencies()
        .iter()
        .zip(&converged)
        .find(|(_, r)| !(**r > CONVERGED_RATIO))
    {
        return Err(Error::Precondition(format!(
            "checkpoint not converged: amplitude ratio {r:.3} at frequency {k} is not above {CONVERGED_RATIO}"
        )));
    }
    let seeds = SeedStream::new(cfg.master_seed);
    let mut rows = Vec::with_capacity(cfg.deltas.len());
    for &delta in &cfg.deltas {
        // same stream for every delta: one direction, several radii
        let mut stream = seeds.stream(cfg.run_index, Purpose::Perturbation);
        let mut p = perturb_with_stream(net, delta, &mut stream)?;
        rows.push(amplitude_ratios(p.predict(&x)?.data(), target)?);
    }
    Ok(RetentionTable {
        frequencies: target.frequencies().to_vec(),
        deltas: cfg.deltas.clone(),
        converged,
        rows,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::{run_sinusoids, SinusoidConfig};
    use crate::networks::NetworkSpec;

    fn trained(iterations: usize) -> crate::experiments::SinusoidRun {
        let cfg = SinusoidConfig {
            frequencies: vec![2],
            amplitudes: vec![1.0],
            samples: 20,
            learning_rate: 1e-2,
            lr_multiplicative: 1e-3,
            iterations,
            record_every: 10,
            stop_when_converged: Some(0.9),
            ..SinusoidConfig::new(NetworkSpec::mlp(1, 16, 3, 1))
        };
        run_sinusoids(&cfg).unwrap()
    }

    #[test]
    fn zero_delta_keeps_ratios() {
        let run = trained(2000);
        let cfg = RobustnessConfig {
            deltas: vec![0.0, 0.5, 4.0],
            master_seed: 1,
            run_index: 0,
        };
        let t = run_robustness(&run.network, &run.target, &cfg).unwrap();
        assert_eq!(t.rows[0], t.converged);
        assert_ne!(t.rows[2], t.converged);
        assert_eq!(t.at(0, 2), Some(t.converged[0]));
    }

    #[test]
    fn unconverged_checkpoint_is_rejected() {
        let run = trained(0);
        let cfg = RobustnessConfig {
            deltas: vec![0.0],
            master_seed: 1,
            run_index: 0,
        };
        assert!(matches!(
            run_robustness(&run.network, &run.target, &cfg),
            Err(Error::Precondition(_))
        ));
    }
}
