//! Mercer eigenvalues of dot-product kernels under the uniform measure on
//! `Sᵈ`, truncated reconstruction, and power-law decay fits.
//!
//! For `k(x, x′) = g(⟨x, x′⟩)` the degree-`k` spherical harmonics are
//! eigenfunctions with eigenvalue
//!
//! `μ_k = Z(d) ∫ g(t) P_k(t) (1 − t²)^{(d−2)/2} dt`,  `P_k = C_k^α / C_k^α(1)`,
//!
//! and `g(t) = Σ_k μ_k N(d, k) P_k(t)`. The constant `Z(d)` is fixed so that
//! the linear kernel `g(t) = t` has `μ₁ N(d, 1) = 1`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::kernels::DotProductKernel;
use crate::quadrature::AngularRule;
use crate::specfun::{check_unit_interval, harmonic_dim, normalized_gegenbauer_all, sphere_alpha, HarmonicIndex};

/// Eigenvalues with `|μ| <` this are flagged and excluded from decay fits.
pub const ZERO_FLOOR: f64 = 1e-14;

/// Minimum number of quadrature nodes.
pub const MIN_NODES: usize = 64;

/// Gauss–Legendre rule size for the eigenvalue integrals.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuadratureSpec {
    node_count: usize,
}

impl QuadratureSpec {
    pub fn new(node_count: usize) -> Result<Self> {
        if node_count < MIN_NODES {
            return Err(Error::Precision(format!(
                "quadrature needs at least {MIN_NODES} nodes, got {node_count}"
            )));
        }
        Ok(Self { node_count })
    }

    /// `max(2000, 16 · k_max)` nodes.
    pub fn default_for(k_max: usize) -> Self {
        Self {
            node_count: (16 * k_max).max(2000),
        }
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    fn check_degree(&self, k: usize) -> Result<()> {
        if self.node_count < 8 * k {
            return Err(Error::Precision(format!(
                "{} nodes cannot resolve degree {k}; need at least {}",
                self.node_count,
                8 * k
            )));
        }
        Ok(())
    }
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::Domain(format!("sphere dimension must be at least 2, got {d}")));
    }
    Ok(())
}

/// Rule and normalization shared by all degrees at one `d`.
struct FunkHecke {
    alpha: f64,
    rule: AngularRule,
    z: f64,
}

impl FunkHecke {
    fn new(d: usize, q: QuadratureSpec) -> Self {
        // (1 − t²)^{(d−2)/2} is sin^{d−1} θ dθ after t = cos θ.
        let rule = AngularRule::new(q.node_count, d as f64 - 1.0);
        let n1 = harmonic_dim(HarmonicIndex::new(d, 1).expect("d ≥ 2")) as f64;
        // Linear-kernel calibration: Z · N(d,1) · ∫ t · P₁(t) w(t) dt = 1.
        let z = 1.0 / (n1 * rule.integrate(|t| t * t));
        Self {
            alpha: sphere_alpha(d),
            rule,
            z,
        }
    }

    fn spectrum(&self, kernel: &DotProductKernel, k_max: usize) -> Vec<f64> {
        let mut mu = vec![0.0; k_max + 1];
        for ((&t, &theta), &w) in self.rule.points().iter().zip(self.rule.angles()).zip(self.rule.weights()) {
            let gw = kernel.eval_angle(theta) * w;
            for (m, p) in mu.iter_mut().zip(normalized_gegenbauer_all(self.alpha, k_max, t)) {
                *m += gw * p;
            }
        }
        mu.iter_mut().for_each(|m| *m *= self.z);
        mu
    }
}

/// Eigenvalue `μ_k` of the integral operator of `kernel` on `Sᵈ`.
pub fn funk_hecke_eigenvalue(kernel: &DotProductKernel, d: usize, k: usize, q: QuadratureSpec) -> Result<f64> {
    check_dim(d)?;
    q.check_degree(k)?;
    Ok(FunkHecke::new(d, q).spectrum(kernel, k)[k])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub k: usize,
    pub mu: f64,
    pub numerically_zero: bool,
}

/// Eigenvalues `μ_0 … μ_{k_max}` of one kernel on `Sᵈ`.
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicSpectrum {
    d: usize,
    entries: Vec<SpectrumEntry>,
}

/// All eigenvalues up to `k_max`.
pub fn compute_spectrum(kernel: &DotProductKernel, d: usize, k_max: usize, q: QuadratureSpec) -> Result<HarmonicSpectrum> {
    check_dim(d)?;
    q.check_degree(k_max)?;
    let mu = FunkHecke::new(d, q).spectrum(kernel, k_max);
    Ok(HarmonicSpectrum::from_values(d, &mu))
}

impl HarmonicSpectrum {
    /// Spectrum from `μ_0, μ_1, …`.
    pub fn from_values(d: usize, mu: &[f64]) -> Self {
        Self {
            d,
            entries: mu
                .iter()
                .enumerate()
                .map(|(k, &mu)| SpectrumEntry {
                    k,
                    mu,
                    numerically_zero: mu.abs() < ZERO_FLOOR,
                })
                .collect(),
        }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn k_max(&self) -> usize {
        self.entries.len().saturating_sub(1)
    }

    pub fn mu(&self, k: usize) -> Option<f64> {
        self.entries.get(k).map(|e| e.mu)
    }

    /// `k,mu,numerically_zero` with a header row.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("k,mu,numerically_zero\n");
        for e in &self.entries {
            writeln!(s, "{},{:.16e},{}", e.k, e.mu, e.numerically_zero).expect("write to string");
        }
        s
    }

    /// Parses [`HarmonicSpectrum::to_csv`] output. Lines starting with `#`
    /// are skipped; when `d` is `None` it is read from a `# d = N` line.
    pub fn from_csv(text: &str, d: Option<usize>) -> Result<Self> {
        let mut found_d = d;
        let mut header = false;
        let mut mu = Vec::new();
        for (ln, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            if let Some(c) = line.strip_prefix('#') {
                if found_d.is_none() {
                    if let Some((key, val)) = c.split_once('=') {
                        if key.trim() == "d" {
                            found_d = val.trim().parse().ok();
                        }
                    }
                }
                continue;
            }
            if !header {
                if line != "k,mu,numerically_zero" {
                    return Err(Error::Format(format!("unexpected spectrum header `{line}`")));
                }
                header = true;
                continue;
            }
            let bad = || Error::Format(format!("line {}: malformed row `{line}`", ln + 1));
            let mut parts = line.split(',');
            let k: usize = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            let v: f64 = parts.next().and_then(|v| v.parse().ok()).ok_or_else(bad)?;
            if k != mu.len() {
                return Err(Error::Format(format!("degrees must run 0, 1, 2, …; got {k}")));
            }
            mu.push(v);
        }
        if !header {
            return Err(Error::Format("missing spectrum header".into()));
        }
        let d = found_d.ok_or_else(|| Error::Format("sphere dimension d not given".into()))?;
        Ok(Self::from_values(d, &mu))
    }
}

/// `Σ_{k ≤ k_max} μ_k N(d, k) P_k(t)`, truncated to the degrees available.
pub fn mercer_reconstruct(s: &HarmonicSpectrum, t: f64, k_max: usize) -> Result<f64> {
    let t = check_unit_interval(t)?;
    check_dim(s.d)?;
    let k_max = k_max.min(s.k_max());
    let p = normalized_gegenbauer_all(sphere_alpha(s.d), k_max, t);
    Ok(s.entries[..=k_max]
        .iter()
        .zip(p)
        .map(|(e, pk)| e.mu * harmonic_dim(HarmonicIndex::new(s.d, e.k).expect("d ≥ 2")) as f64 * pk)
        .sum())
}

/// Which degrees enter a decay fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassFilter {
    All,
    Even,
    Odd,
    /// `k ≡ r (mod 4)`
    Mod4(u8),
}

impl ClassFilter {
    pub fn accepts(self, k: usize) -> bool {
        match self {
            ClassFilter::All => true,
            ClassFilter::Even => k.is_multiple_of(2),
            ClassFilter::Odd => k % 2 == 1,
            ClassFilter::Mod4(r) => k % 4 == r as usize,
        }
    }

    pub fn name(self) -> String {
        match self {
            ClassFilter::All => "all".into(),
            ClassFilter::Even => "even".into(),
            ClassFilter::Odd => "odd".into(),
            ClassFilter::Mod4(r) => format!("mod4eq{r}"),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "all" => Ok(ClassFilter::All),
            "even" => Ok(ClassFilter::Even),
            "odd" => Ok(ClassFilter::Odd),
            _ => s
                .strip_prefix("mod4eq")
                .and_then(|r| r.parse::<u8>().ok())
                .filter(|&r| r < 4)
                .map(ClassFilter::Mod4)
                .ok_or_else(|| {
                    Error::Config(format!(
                        "unknown class filter `{s}` (expected all, even, odd or mod4eq0..mod4eq3)"
                    ))
                }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub k_range: (usize, usize),
    pub class_filter: ClassFilter,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

impl DecayFit {
    /// Whether the fit is straight enough to compare with an asymptotic rate.
    pub fn is_reliable(&self) -> bool {
        self.r_squared >= 0.95
    }
}

/// Least-squares line through `(x, y)`: `(slope, intercept, r²)`.
pub fn least_squares(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, intercept, r2)
}

/// Fits `log μ_k = slope · log k + intercept` over `k_min ≤ k ≤ k_max`
/// restricted to `filter`, skipping eigenvalues at or below [`ZERO_FLOOR`].
pub fn decay_slope_fit(s: &HarmonicSpectrum, k_min: usize, k_max: usize, filter: ClassFilter) -> Result<DecayFit> {
    if k_min >= k_max {
        return Err(Error::Fit(format!("empty degree range [{k_min}, {k_max}]")));
    }
    let pts: Vec<(f64, f64)> = s
        .entries
        .iter()
        .filter(|e| e.k >= k_min.max(1) && e.k <= k_max && filter.accepts(e.k) && e.mu > ZERO_FLOOR)
        .map(|e| ((e.k as f64).ln(), e.mu.ln()))
        .collect();
    if pts.len() < 4 {
        return Err(Error::Fit(format!(
            "{} usable eigenvalues in [{k_min}, {k_max}] for class {}; need at least 4",
            pts.len(),
            filter.name()
        )));
    }
    let (slope, intercept, r_squared) = least_squares(&pts);
    Ok(DecayFit {
        k_range: (k_min, k_max),
        class_filter: filter,
        slope,
        intercept,
        r_squared,
        points: pts.len(),
    })
}
