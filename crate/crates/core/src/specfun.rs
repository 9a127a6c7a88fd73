//! Gegenbauer polynomials and spherical-harmonic combinatorics.
//!
//! For data on the sphere `Sᵈ ⊂ ℝ^{d+1}` the relevant index is
//! `α = (d − 1)/2`; the normalized polynomial `C_k^α(t) / C_k^α(1)` is the
//! zonal harmonic of degree `k` up to the factor `N(d, k)`.

use crate::error::{Error, Result};
use crate::quadrature::AngularRule;

/// Arguments within this distance outside `[-1, 1]` are clamped, not rejected.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Linearization coefficients smaller than this are reported as zero.
pub const LINEARIZATION_FLOOR: f64 = 1e-12;

pub(crate) fn check_unit_interval(t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain(format!("argument {t} lies outside [-1, 1]")));
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// Index `α` and degree `k` of `C_k^α`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GegenbauerParams {
    alpha: f64,
    degree: usize,
}

impl GegenbauerParams {
    pub fn new(alpha: f64, degree: usize) -> Result<Self> {
        if !(alpha > 0.0) || !alpha.is_finite() {
            return Err(Error::Domain(format!(
                "Gegenbauer index must be positive, got {alpha}"
            )));
        }
        Ok(Self { alpha, degree })
    }

    /// Parameters for data on `Sᵈ`: `α = (d − 1)/2`. Requires `d ≥ 2`.
    pub fn for_sphere(d: usize, degree: usize) -> Result<Self> {
        Self::new(sphere_alpha(d), degree)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn degree(&self) -> usize {
        self.degree
    }
}

/// `α = (d − 1)/2` for the sphere `Sᵈ`.
pub fn sphere_alpha(d: usize) -> f64 {
    (d as f64 - 1.0) / 2.0
}

/// Sphere dimension `d` and harmonic degree `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct HarmonicIndex {
    d: usize,
    k: usize,
}

impl HarmonicIndex {
    pub fn new(d: usize, k: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::Domain("sphere dimension must be at least 1".into()));
        }
        Ok(Self { d, k })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// `C_k^α(t)` by the three-term recurrence
/// `n C_n = 2(n + α − 1) t C_{n−1} − (n + 2α − 2) C_{n−2}`.
pub fn gegenbauer_eval(p: GegenbauerParams, t: f64) -> Result<f64> {
    let t = check_unit_interval(t)?;
    Ok(gegenbauer_unchecked(p.alpha, p.degree, t))
}

pub(crate) fn gegenbauer_unchecked(alpha: f64, k: usize, t: f64) -> f64 {
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = 2.0 * alpha * t;
    for n in 2..=k {
        let nf = n as f64;
        let next = (2.0 * (nf + alpha - 1.0) * t * cur - (nf + 2.0 * alpha - 2.0) * prev) / nf;
        prev = cur;
        cur = next;
    }
    cur
}

/// `C_k^α(1) = (2α)_k / k!`, which is `binomial(k + 2α − 1, k)` for integer `2α`.
pub fn gegenbauer_at_one(p: GegenbauerParams) -> f64 {
    at_one(p.alpha, p.degree)
}

fn at_one(alpha: f64, k: usize) -> f64 {
    (1..=k).fold(1.0, |acc, j| acc * (j as f64 + 2.0 * alpha - 1.0) / j as f64)
}

/// Values `C_j^α(t) / C_j^α(1)` for `j = 0..=k_max`.
///
/// Runs the recurrence on the normalized sequence directly so large degrees
/// never overflow.
pub fn normalized_gegenbauer_all(alpha: f64, k_max: usize, t: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(k_max + 1);
    out.push(1.0);
    if k_max == 0 {
        return out;
    }
    out.push(t);
    // With P_n = C_n / C_n(1) and C_n(1) = C_{n-1}(1)(n + 2α − 1)/n:
    // P_n = [2(n + α − 1) t P_{n−1} − (n − 1) P_{n−2}] / (n + 2α − 1).
    for n in 2..=k_max {
        let nf = n as f64;
        let next = (2.0 * (nf + alpha - 1.0) * t * out[n - 1] - (nf - 1.0) * out[n - 2])
            / (nf + 2.0 * alpha - 1.0);
        out.push(next);
    }
    out
}

/// Number of linearly independent spherical harmonics of degree `k` in
/// `d + 1` variables.
pub fn harmonic_dim(h: HarmonicIndex) -> u64 {
    let (d, k) = (h.d as u128, h.k as u128);
    if k == 0 {
        return 1;
    }
    let b = binomial(k + d - 2, d - 1);
    let n = (2 * k + d - 1) * b / k;
    u64::try_from(n).expect("harmonic dimension overflows u64")
}

pub(crate) fn binomial(n: u128, r: u128) -> u128 {
    if r > n {
        return 0;
    }
    let r = r.min(n - r);
    (0..r).fold(1u128, |acc, i| acc * (n - i) / (i + 1))
}

fn ln_factorial(n: u64) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// Leading linearization coefficient `λ₀^{(k,k)}` in
/// `C_k^α C_k^α = Σ_s λ_s C_{2k−2s}^α`, for integer `α ≥ 1`:
///
/// `((α+k−1)!)² (2k)! / ((α−1)! (k!)² (α+2k−1)!)`, evaluated in log space.
pub fn lambda0_kk(alpha: f64, k: usize) -> Result<f64> {
    if !(alpha >= 1.0) || alpha.fract() != 0.0 || !alpha.is_finite() {
        return Err(Error::Domain(format!(
            "closed form needs a positive integer index, got {alpha}"
        )));
    }
    let a = alpha as u64;
    let k = k as u64;
    let ln = 2.0 * ln_factorial(a + k - 1) + ln_factorial(2 * k)
        - ln_factorial(a - 1)
        - 2.0 * ln_factorial(k)
        - ln_factorial(a + 2 * k - 1);
    Ok(ln.exp())
}

/// Coefficients `λ_s`, `s = 0..=min(m, n)`, with
/// `C_m^α C_n^α = Σ_s λ_s C_{m+n−2s}^α`.
///
/// Each coefficient is the weighted projection of the product onto
/// `C_{m+n−2s}^α`, computed by quadrature. No closed form is used.
pub fn linearize_product(m: usize, n: usize, alpha: f64) -> Result<Vec<f64>> {
    GegenbauerParams::new(alpha, m)?;
    let nodes = (4 * (m + n)).max(64) + 2 * alpha.ceil() as usize + 32;
    let rule = AngularRule::new(nodes, 2.0 * alpha);
    let top = m + n;
    // Tabulate C_0..C_top at every node once.
    let table: Vec<Vec<f64>> = rule
        .points()
        .iter()
        .map(|&t| {
            let norm = normalized_gegenbauer_all(alpha, top, t);
            norm.iter()
                .enumerate()
                .map(|(j, v)| v * at_one(alpha, j))
                .collect()
        })
        .collect();
    let coeffs = (0..=m.min(n))
        .map(|s| {
            let j = top - 2 * s;
            let (mut num, mut den) = (0.0, 0.0);
            for (row, &w) in table.iter().zip(rule.weights()) {
                num += w * row[m] * row[n] * row[j];
                den += w * row[j] * row[j];
            }
            let c = num / den;
            if c.abs() < LINEARIZATION_FLOOR {
                0.0
            } else {
                c
            }
        })
        .collect();
    Ok(coeffs)
}
