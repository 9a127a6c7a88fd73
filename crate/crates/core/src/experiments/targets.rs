use std::collections::HashSet;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::kernels::UnitVector;
use crate::rng::Stream;
use crate::specfun::{normalized_gegenbauer_all, sphere_alpha};

/// `f*(x) = (1/N(K)) Σ_k A_k Ĉ_k(⟨x, ζ_k⟩)` on `Sᵈ`, with `Ĉ_k(1) = 1` and
/// `N(K) = |K|`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicTarget {
    d: usize,
    degrees: Vec<usize>,
    amplitudes: Vec<f64>,
    anchors: Vec<UnitVector>,
    normalizer: f64,
}

impl HarmonicTarget {
    pub fn new(d: usize, degrees: Vec<usize>, amplitudes: Vec<f64>, anchors: Vec<UnitVector>) -> Result<Self> {
        if d < 2 {
            return Err(Error::Domain(format!("sphere dimension must be at least 2, got {d}")));
        }
        if degrees.is_empty() || degrees.len() != amplitudes.len() || degrees.len() != anchors.len() {
            return Err(Error::Config(format!(
                "need one amplitude and one anchor per degree; got {} degrees, {} amplitudes, {} anchors",
                degrees.len(),
                amplitudes.len(),
                anchors.len()
            )));
        }
        if let Some(a) = anchors.iter().find(|a| a.dim() != d + 1) {
            return Err(Error::Domain(format!("anchor has {} coordinates, expected {}", a.dim(), d + 1)));
        }
        if amplitudes.iter().any(|a| !a.is_finite()) {
            return Err(Error::Config("amplitudes must be finite".into()));
        }
        Ok(Self {
            d,
            normalizer: degrees.len() as f64,
            degrees,
            amplitudes,
            anchors,
        })
    }

    /// Anchors drawn uniformly on the same sphere as the data.
    pub fn random(d: usize, degrees: Vec<usize>, amplitudes: Vec<f64>, stream: &mut Stream) -> Result<Self> {
        let anchors = (0..degrees.len()).map(|_| UnitVector::random(stream, d + 1)).collect();
        Self::new(d, degrees, amplitudes, anchors)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn anchors(&self) -> &[UnitVector] {
        &self.anchors
    }

    pub fn normalizer(&self) -> f64 {
        self.normalizer
    }

    /// The `i`-th term `A_k Ĉ_k(⟨x, ζ_k⟩) / N(K)`.
    pub fn component(&self, i: usize, x: &UnitVector) -> Result<f64> {
        if x.dim() != self.d + 1 {
            return Err(Error::Domain(format!("point has {} coordinates, expected {}", x.dim(), self.d + 1)));
        }
        let k = self.degrees[i];
        let t = x.dot(&self.anchors[i]).clamp(-1.0, 1.0);
        let c = normalized_gegenbauer_all(sphere_alpha(self.d), k, t)[k];
        Ok(self.amplitudes[i] * c / self.normalizer)
    }

    pub fn eval(&self, x: &UnitVector) -> Result<f64> {
        (0..self.degrees.len()).map(|i| self.component(i, x)).sum()
    }
}

pub fn harmonic_target_eval(target: &HarmonicTarget, x: &UnitVector) -> Result<f64> {
    target.eval(x)
}

/// `f*(x) = Σ_i A_i sin(2π k_i x + φ_i)` sampled at `x_j = j/N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SinusoidTarget {
    frequencies: Vec<usize>,
    amplitudes: Vec<f64>,
    phases: Vec<f64>,
    samples: usize,
}

impl SinusoidTarget {
    pub fn new(frequencies: Vec<usize>, amplitudes: Vec<f64>, phases: Vec<f64>, samples: usize) -> Result<Self> {
        if frequencies.is_empty() || frequencies.len() != amplitudes.len() || frequencies.len() != phases.len() {
            return Err(Error::Config(format!(
                "need one amplitude and phase per frequency; got {}, {}, {}",
                frequencies.len(),
                amplitudes.len(),
                phases.len()
            )));
        }
        let mut seen = HashSet::new();
        for &k in &frequencies {
            if k == 0 || 2 * k >= samples {
                return Err(Error::Config(format!(
                    "frequency {k} must be positive and below the Nyquist limit {samples}/2"
                )));
            }
            if !seen.insert(k) {
                return Err(Error::Config(format!("frequency {k} listed twice")));
            }
        }
        if let Some(a) = amplitudes.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
            return Err(Error::Config(format!("amplitudes must be positive, got {a}")));
        }
        Ok(Self {
            frequencies,
            amplitudes,
            phases,
            samples,
        })
    }

    /// Phases drawn uniformly on `[0, 2π)`.
    pub fn with_random_phases(frequencies: Vec<usize>, amplitudes: Vec<f64>, samples: usize, stream: &mut Stream) -> Result<Self> {
        let phases = (0..frequencies.len()).map(|_| 2.0 * PI * stream.uniform()).collect();
        Self::new(frequencies, amplitudes, phases, samples)
    }

    pub fn frequencies(&self) -> &[usize] {
        &self.frequencies
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.samples).map(|j| j as f64 / self.samples as f64).collect()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.frequencies
            .iter()
            .zip(&self.amplitudes)
            .zip(&self.phases)
            .map(|((&k, a), p)| a * (2.0 * PI * k as f64 * x + p).sin())
            .sum()
    }

    pub fn values(&self) -> Vec<f64> {
        self.grid().into_iter().map(|x| self.eval(x)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::experiments::dft_amplitude;
    use crate::rng::{Purpose, SeedStream};
    use crate::specfun::{gegenbauer_at_one, gegenbauer_eval, GegenbauerParams};

    fn e(dim: usize, i: usize) -> UnitVector {
        let mut v = vec![0.0; dim];
        v[i] = 1.0;
        UnitVector::new(v).unwrap()
    }

    #[test]
    fn harmonic_examples() {
        let d = 4;
        let c = HarmonicTarget::new(d, vec![0], vec![1.0], vec![e(5, 0)]).unwrap();
        assert_eq!(c.eval(&e(5, 3)).unwrap(), 1.0);
        let one = HarmonicTarget::new(d, vec![1], vec![1.0], vec![e(5, 1)]).unwrap();
        assert!((one.eval(&e(5, 1)).unwrap() - 1.0).abs() < 1e-15);

        let two = HarmonicTarget::new(d, vec![1, 2], vec![1.0, 1.0], vec![e(5, 0), e(5, 1)]).unwrap();
        let x = e(5, 4);
        let hat = |k| {
            let p = GegenbauerParams::for_sphere(d, k).unwrap();
            gegenbauer_eval(p, 0.0).unwrap() / gegenbauer_at_one(p)
        };
        assert!((two.eval(&x).unwrap() - (hat(1) + hat(2)) / 2.0).abs() < 1e-15);
        assert!(two.eval(&e(3, 0)).is_err());
    }

    #[test]
    fn rejects_bad_sinusoids() {
        assert!(SinusoidTarget::new(vec![5], vec![0.0], vec![0.0], 200).is_err());
        assert!(SinusoidTarget::new(vec![100], vec![1.0], vec![0.0], 200).is_err());
        assert!(SinusoidTarget::new(vec![5, 5], vec![1.0, 1.0], vec![0.0, 0.0], 200).is_err());
        assert!(SinusoidTarget::new(vec![], vec![], vec![], 200).is_err());
    }

    #[test]
    fn superposition_spectrum() {
        let mut s = SeedStream::new(3).stream(0, Purpose::Target);
        let freqs: Vec<usize> = (1..=10).map(|i| 5 * i).collect();
        let t = SinusoidTarget::with_random_phases(freqs.clone(), vec![1.0; 10], 200, &mut s).unwrap();
        let v = t.values();
        for k in freqs {
            assert!((dft_amplitude(&v, k).unwrap() - 1.0).abs() < 1e-10);
        }
        assert!(dft_amplitude(&v, 7).unwrap() < 1e-10);
    }
}
