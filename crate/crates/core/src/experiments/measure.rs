use std::f64::consts::PI;

use crate::error::{Error, Result};

/// `(2/N) |Σ_j v_j e^{−2πi k j/N}|`: unit for a unit-amplitude sinusoid of
/// integer frequency `k` sampled on the grid `j/N`.
pub fn dft_amplitude(values: &[f64], k: usize) -> Result<f64> {
    let n = values.len();
    if k == 0 || 2 * k >= n {
        return Err(Error::Domain(format!("frequency {k} outside [1, {n}/2)")));
    }
    let (mut re, mut im) = (0.0, 0.0);
    for (j, v) in values.iter().enumerate() {
        // reduce k·j mod N first so the angle stays small
        let phase = 2.0 * PI * ((k * j) % n) as f64 / n as f64;
        re += v * phase.cos();
        im -= v * phase.sin();
    }
    Ok(2.0 / n as f64 * re.hypot(im))
}

/// `|⟨r, c⟩| / ‖c‖`, the length of the projection of `r` onto `c`.
pub fn residual_projection(residual: &[f64], component: &[f64]) -> Result<f64> {
    if residual.len() != component.len() {
        return Err(Error::Shape(format!(
            "residual has {} entries, component {}",
            residual.len(),
            component.len()
        )));
    }
    let norm = component.iter().map(|c| c * c).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::DegenerateComponent("component vanishes at every sample".into()));
    }
    let dot: f64 = residual.iter().zip(component).map(|(r, c)| r * c).sum();
    Ok(dot.abs() / norm)
}

/// What a [`FrequencyTrace`] measures, which fixes the crossing direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    /// `|f̃(k)| / A_k`, crosses upward.
    AmplitudeRatio,
    /// Residual projection over its initial value, crosses downward.
    ResidualProjection,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::AmplitudeRatio => "amplitude_ratio",
            Metric::ResidualProjection => "residual_projection",
        }
    }

    fn crossed(self, v: f64, threshold: f64) -> bool {
        match self {
            Metric::AmplitudeRatio => v >= threshold,
            Metric::ResidualProjection => v <= threshold,
        }
    }
}

/// Per-frequency (or per-degree) metric at each recorded iteration.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTrace {
    metric: Metric,
    labels: Vec<usize>,
    checkpoints: Vec<usize>,
    /// `values[i][c]`: label `i` at checkpoint `c`.
    values: Vec<Vec<f64>>,
    window: usize,
}

impl FrequencyTrace {
    pub fn new(metric: Metric, labels: Vec<usize>, window: usize) -> Self {
        Self {
            metric,
            values: vec![Vec::new(); labels.len()],
            labels,
            checkpoints: Vec::new(),
            window: window.max(1),
        }
    }

    /// Appends one checkpoint with a value per label.
    pub fn push(&mut self, iteration: usize, row: &[f64]) -> Result<()> {
        if row.len() != self.labels.len() {
            return Err(Error::Shape(format!("{} values for {} labels", row.len(), self.labels.len())));
        }
        if self.checkpoints.last().is_some_and(|&c| c >= iteration) {
            return Err(Error::State(format!("checkpoint {iteration} is not after the previous one")));
        }
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite trace value {v} at iteration {iteration}")));
        }
        self.checkpoints.push(iteration);
        for (series, &v) in self.values.iter_mut().zip(row) {
            series.push(v);
        }
        Ok(())
    }

    pub fn metric(&self) -> Metric {
        self.metric
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn checkpoints(&self) -> &[usize] {
        &self.checkpoints
    }

    pub fn window(&self) -> usize {
        self.window
    }

    /// Raw series for the `i`-th label.
    pub fn series(&self, i: usize) -> &[f64] {
        &self.values[i]
    }

    pub fn index_of(&self, label: usize) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    /// Trailing moving average over the last `window` checkpoints (fewer at
    /// the start).
    pub fn smoothed(&self, i: usize) -> Vec<f64> {
        let s = &self.values[i];
        let mut out = Vec::with_capacity(s.len());
        let mut acc = 0.0;
        for j in 0..s.len() {
            acc += s[j];
            if j >= self.window {
                acc -= s[j - self.window];
            }
            out.push(acc / (j + 1).min(self.window) as f64);
        }
        out
    }

    /// First recorded iteration at which the raw metric reaches `threshold`.
    pub fn time_to_threshold(&self, i: usize, threshold: f64) -> Option<usize> {
        self.values[i]
            .iter()
            .position(|&v| self.metric.crossed(v, threshold))
            .map(|c| self.checkpoints[c])
    }

    /// Last recorded value per label.
    pub fn final_values(&self) -> Vec<f64> {
        self.values.iter().map(|s| s.last().copied().unwrap_or(f64::NAN)).collect()
    }

    /// `[label][checkpoint]` matrix.
    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tone(n: usize, k: f64, amp: f64, phase: f64) -> Vec<f64> {
        (0..n)
            .map(|j| amp * (2.0 * PI * k * j as f64 / n as f64 + phase).sin())
            .collect()
    }

    #[test]
    fn pure_tones() {
        let v = tone(200, 7.0, 1.0, 0.0);
        assert!((dft_amplitude(&v, 7).unwrap() - 1.0).abs() < 1e-10);
        assert!(dft_amplitude(&v, 8).unwrap() < 1e-10);
        let mix: Vec<f64> = tone(200, 5.0, 0.5, 0.0)
            .iter()
            .zip(tone(200, 10.0, 2.0, 1.0))
            .map(|(a, b)| a + b)
            .collect();
        assert!((dft_amplitude(&mix, 10).unwrap() - 2.0).abs() < 1e-9);
        assert!(dft_amplitude(&v, 100).is_err());
        assert!(dft_amplitude(&v, 0).is_err());
    }

    #[test]
    fn projections() {
        let c1 = [1.0, 1.0, 0.0, 0.0];
        let c2 = [0.0, 0.0, 2.0, -1.0];
        let n1 = 2f64.sqrt();
        assert!((residual_projection(&c1, &c1).unwrap() - n1).abs() < 1e-15);
        assert_eq!(residual_projection(&c2, &c1).unwrap(), 0.0);
        let r: Vec<f64> = c1.iter().zip(&c2).map(|(a, b)| 0.5 * a + b).collect();
        assert!((residual_projection(&r, &c1).unwrap() - 0.5 * n1).abs() < 1e-15);
        assert!(matches!(
            residual_projection(&r, &[0.0; 4]),
            Err(Error::DegenerateComponent(_))
        ));
    }

    #[test]
    fn smoothing_and_thresholds() {
        let mut t = FrequencyTrace::new(Metric::ResidualProjection, vec![3], 2);
        for (it, v) in [(0, 1.0), (10, 0.8), (20, 0.4), (30, 0.6)] {
            t.push(it, &[v]).unwrap();
        }
        for (got, want) in t.smoothed(0).iter().zip([1.0, 0.9, 0.6, 0.5]) {
            assert!((got - want).abs() < 1e-12);
        }
        assert_eq!(t.time_to_threshold(0, 0.5), Some(20));
        assert_eq!(t.time_to_threshold(0, 0.1), None);
        assert!(t.push(30, &[0.1]).is_err());
        assert!(t.push(40, &[f64::NAN]).is_err());

        let mut a = FrequencyTrace::new(Metric::AmplitudeRatio, vec![5, 10], 1);
        a.push(0, &[0.1, 0.0]).unwrap();
        a.push(100, &[0.6, 0.2]).unwrap();
        assert_eq!(a.time_to_threshold(0, 0.5), Some(100));
        assert_eq!(a.time_to_threshold(1, 0.5), None);
        assert_eq!(a.final_values(), vec![0.6, 0.2]);
    }
}
