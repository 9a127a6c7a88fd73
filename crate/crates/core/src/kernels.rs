//! Dot-product kernels on the sphere: the arc-cosine components, the two-layer
//! NTK, the product kernel of a network with one Hadamard layer, Gram
//! matrices, finite-width estimates and kernel gradient descent.

use std::f64::consts::PI;
use std::ops::ControlFlow;

use crate::error::{Error, Result};
use crate::linalg;
use crate::networks::{Activation, Architecture, NetworkSpec};
use crate::rng::{Purpose, SeedStream, Stream};
use crate::specfun::check_unit_interval;

/// Tolerance on `‖x‖ = 1` for [`UnitVector`].
pub const UNIT_NORM_TOL: f64 = 1e-12;

/// `t`, `sin θ` and `θ` for `t = cos θ`, so profiles can be evaluated from
/// either end without losing the small `sin θ` near `t = ±1`.
#[derive(Debug, Clone, Copy)]
struct Angle {
    t: f64,
    s: f64,
    theta: f64,
}

impl Angle {
    fn from_t(t: f64) -> Self {
        Self {
            t,
            s: ((1.0 - t) * (1.0 + t)).max(0.0).sqrt(),
            theta: t.acos(),
        }
    }

    fn from_theta(theta: f64) -> Self {
        Self {
            t: theta.cos(),
            s: theta.sin().max(0.0),
            theta,
        }
    }

    fn g1(self) -> f64 {
        (PI - self.theta) / (2.0 * PI)
    }

    fn g2(self) -> f64 {
        (self.s + (PI - self.theta) * self.t) / (2.0 * PI)
    }
}

/// `E[σ′(⟨w,x⟩) σ′(⟨w,x′⟩)] = (π − arccos t) / 2π` for `w ~ N(0, I)`.
pub fn kappa1(t: f64) -> Result<f64> {
    Ok(Angle::from_t(check_unit_interval(t)?).g1())
}

/// `E[σ(⟨w,x⟩) σ(⟨w,x′⟩)] = (√(1−t²) + (π − arccos t) t) / 2π`.
pub fn kappa2(t: f64) -> Result<f64> {
    Ok(Angle::from_t(check_unit_interval(t)?).g2())
}

/// Two-layer ReLU NTK, `2 t κ₁ + 2 κ₂`.
pub fn ntk_standard(t: f64) -> Result<f64> {
    DotProductKernel::StandardNtk.eval(t)
}

/// NTK of the two-layer network with one Hadamard layer,
/// `2 (2 t κ₁ + κ₂) κ₂`.
pub fn ntk_pi(t: f64) -> Result<f64> {
    DotProductKernel::PiKernel.eval(t)
}

/// A kernel `k(x, x′) = g(⟨x, x′⟩)` identified by its profile `g`.
#[derive(Debug, Clone, PartialEq)]
pub enum DotProductKernel {
    Kappa1,
    Kappa2,
    StandardNtk,
    PiKernel,
    /// `g(t) = t`
    Linear,
    /// `g(t) = 1`
    Constant,
    Sum(Vec<DotProductKernel>),
    Product(Vec<DotProductKernel>),
    /// `t · g(t)`
    DotWeighted(Box<DotProductKernel>),
}

impl DotProductKernel {
    /// Profile value at `t ∈ [−1, 1]`.
    pub fn eval(&self, t: f64) -> Result<f64> {
        Ok(self.at(Angle::from_t(check_unit_interval(t)?)))
    }

    /// Profile value at `t = cos θ`, `θ ∈ [0, π]`.
    pub fn eval_angle(&self, theta: f64) -> f64 {
        self.at(Angle::from_theta(theta))
    }

    fn at(&self, a: Angle) -> f64 {
        match self {
            DotProductKernel::Kappa1 => a.g1(),
            DotProductKernel::Kappa2 => a.g2(),
            DotProductKernel::StandardNtk => 2.0 * a.t * a.g1() + 2.0 * a.g2(),
            DotProductKernel::PiKernel => {
                let g2 = a.g2();
                2.0 * (2.0 * a.t * a.g1() + g2) * g2
            }
            DotProductKernel::Linear => a.t,
            DotProductKernel::Constant => 1.0,
            DotProductKernel::Sum(ks) => ks.iter().map(|k| k.at(a)).sum(),
            DotProductKernel::Product(ks) => ks.iter().map(|k| k.at(a)).product(),
            DotProductKernel::DotWeighted(k) => a.t * k.at(a),
        }
    }

    /// Short name of a leaf kernel, as accepted by [`DotProductKernel::parse`].
    pub fn name(&self) -> String {
        match self {
            DotProductKernel::Kappa1 => "kappa1".into(),
            DotProductKernel::Kappa2 => "kappa2".into(),
            DotProductKernel::StandardNtk => "standard".into(),
            DotProductKernel::PiKernel => "pi".into(),
            DotProductKernel::Linear => "linear".into(),
            DotProductKernel::Constant => "constant".into(),
            DotProductKernel::Sum(ks) => {
                let parts: Vec<String> = ks.iter().map(|k| k.name()).collect();
                format!("sum({})", parts.join(","))
            }
            DotProductKernel::Product(ks) => {
                let parts: Vec<String> = ks.iter().map(|k| k.name()).collect();
                format!("product({})", parts.join(","))
            }
            DotProductKernel::DotWeighted(k) => format!("dot({})", k.name()),
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "kappa1" => Ok(DotProductKernel::Kappa1),
            "kappa2" => Ok(DotProductKernel::Kappa2),
            "standard" | "ntk" => Ok(DotProductKernel::StandardNtk),
            "pi" => Ok(DotProductKernel::PiKernel),
            "linear" => Ok(DotProductKernel::Linear),
            "constant" => Ok(DotProductKernel::Constant),
            other => Err(Error::Config(format!(
                "unknown kernel `{other}` (expected kappa1, kappa2, standard, pi, linear or constant)"
            ))),
        }
    }
}

/// A point on the unit sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitVector {
    coords: Vec<f64>,
}

impl UnitVector {
    /// Accepts `coords` if its Euclidean norm is 1 within [`UNIT_NORM_TOL`].
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if coords.is_empty() || !((norm - 1.0).abs() <= UNIT_NORM_TOL) {
            return Err(Error::Domain(format!("point has norm {norm}, expected 1")));
        }
        Ok(Self { coords })
    }

    /// Divides by the norm. Fails on the zero vector.
    pub fn normalize(mut coords: Vec<f64>) -> Result<Self> {
        let norm = coords.iter().map(|x| x * x).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::Domain("cannot normalize a zero vector".into()));
        }
        coords.iter_mut().for_each(|x| *x /= norm);
        Ok(Self { coords })
    }

    /// Uniform on the sphere in `dim` coordinates.
    pub fn random(stream: &mut Stream, dim: usize) -> Self {
        Self {
            coords: stream.unit_vector(dim),
        }
    }

    /// A pair with inner product exactly `t`: `e₁` and `t e₁ + √(1−t²) e₂`.
    pub fn pair_with_inner_product(dim: usize, t: f64) -> Result<(Self, Self)> {
        if dim < 2 {
            return Err(Error::Domain("need at least two coordinates".into()));
        }
        let t = check_unit_interval(t)?;
        let mut a = vec![0.0; dim];
        let mut b = vec![0.0; dim];
        a[0] = 1.0;
        b[0] = t;
        b[1] = ((1.0 - t) * (1.0 + t)).sqrt();
        Ok((Self { coords: a }, Self { coords: b }))
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn dot(&self, other: &UnitVector) -> f64 {
        self.coords.iter().zip(&other.coords).map(|(a, b)| a * b).sum()
    }
}

/// Symmetric kernel matrix over a set of points.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    entries: Vec<f64>,
    points: Vec<UnitVector>,
}

/// `entries[i][j] = g(⟨xᵢ, xⱼ⟩)`.
pub fn gram(kernel: &DotProductKernel, points: &[UnitVector]) -> Result<GramMatrix> {
    let n = points.len();
    if let Some(p) = points.iter().find(|p| p.dim() != points[0].dim()) {
        return Err(Error::Domain(format!(
            "points of dimension {} and {}",
            points[0].dim(),
            p.dim()
        )));
    }
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = if i == j {
                kernel.eval(1.0)?
            } else {
                kernel.eval(points[i].dot(&points[j]))?
            };
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    Ok(GramMatrix {
        n,
        entries,
        points: points.to_vec(),
    })
}

impl GramMatrix {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[i * self.n + j]
    }

    pub fn points(&self) -> &[UnitVector] {
        &self.points
    }

    /// Entrywise product with another Gram matrix over the same points.
    pub fn hadamard(&self, other: &GramMatrix) -> Result<GramMatrix> {
        if self.n != other.n {
            return Err(Error::Shape(format!("{} vs {} points", self.n, other.n)));
        }
        Ok(GramMatrix {
            n: self.n,
            entries: self.entries.iter().zip(&other.entries).map(|(a, b)| a * b).collect(),
            points: self.points.clone(),
        })
    }

    /// Eigenvalues in ascending order (Jacobi).
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        linalg::symmetric_eigenvalues(&self.entries, self.n)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.first().copied().unwrap_or(0.0))
    }

    /// Largest eigenvalue (power iteration).
    pub fn max_eigenvalue(&self) -> Result<f64> {
        linalg::largest_eigenvalue(&self.entries, self.n)
    }

    /// `K v`.
    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        linalg::matvec(&self.entries, self.n, v, &mut out);
        out
    }
}

/// Calls `visit(t, prediction, residual)` for `t = 0..=steps` of
/// `ŷ ← ŷ + η K (y − ŷ)` from `ŷ = 0`, stopping early on `Break`.
pub fn kernel_gd_visit<F>(k: &GramMatrix, y: &[f64], eta: f64, steps: usize, mut visit: F) -> Result<()>
where
    F: FnMut(usize, &[f64], &[f64]) -> ControlFlow<()>,
{
    if y.len() != k.n {
        return Err(Error::Shape(format!("{} targets for {} points", y.len(), k.n)));
    }
    let lmax = k.max_eigenvalue()?;
    if !(eta > 0.0) || !(eta * lmax < 2.0) {
        return Err(Error::Config(format!(
            "step {eta} is unstable: eta * lambda_max = {} must lie in (0, 2)",
            eta * lmax
        )));
    }
    let n = k.n;
    let mut pred = vec![0.0; n];
    let mut resid = y.to_vec();
    let mut step = vec![0.0; n];
    for t in 0..=steps {
        if visit(t, &pred, &resid).is_break() || t == steps {
            break;
        }
        linalg::matvec(&k.entries, n, &resid, &mut step);
        for i in 0..n {
            pred[i] += eta * step[i];
            resid[i] = y[i] - pred[i];
        }
    }
    Ok(())
}

/// Prediction trace `ŷ⁽⁰⁾ … ŷ⁽ᵀ⁾` of kernel gradient descent.
pub fn kernel_gd_dynamics(k: &GramMatrix, y: &[f64], eta: f64, steps: usize) -> Result<Vec<Vec<f64>>> {
    let mut out = Vec::with_capacity(steps + 1);
    kernel_gd_visit(k, y, eta, steps, |_, p, _| {
        out.push(p.to_vec());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Sample statistics of a finite-width NTK estimate.
#[derive(Debug, Clone, PartialEq)]
pub struct NtkEstimate {
    pub mean: f64,
    /// Standard error of the mean; `NaN` for a single draw.
    pub stderr: f64,
    pub samples: Vec<f64>,
}

impl NtkEstimate {
    fn from_samples(samples: Vec<f64>) -> Self {
        let n = samples.len() as f64;
        let mean = samples.iter().sum::<f64>() / n;
        let stderr = if samples.len() > 1 {
            let var = samples.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
            (var / n).sqrt()
        } else {
            f64::NAN
        };
        Self {
            mean,
            stderr,
            samples,
        }
    }

    /// Mean of `|sample − reference|` over draws.
    pub fn mean_abs_deviation(&self, reference: f64) -> f64 {
        self.samples.iter().map(|v| (v - reference).abs()).sum::<f64>() / self.samples.len() as f64
    }
}

fn relu(v: f64) -> f64 {
    v.max(0.0)
}

fn step(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else {
        0.0
    }
}

/// `⟨∇_θ f(x), ∇_θ f(x′)⟩` at initialization for two-layer networks of
/// width `m`, one value per independent draw.
///
/// Draw `i` uses `SeedStream::new(seed).stream(i, Purpose::Init)` and consumes
/// it in the same order as [`crate::networks::build_with_stream`], so each
/// sample equals the tape gradient product of the network built from that
/// stream. Gradients are formed analytically in `O(m · dim)` memory.
pub fn empirical_ntk_samples(
    spec: &NetworkSpec,
    m: usize,
    x: &UnitVector,
    xp: &UnitVector,
    seed: u64,
    n_draws: usize,
) -> Result<Vec<f64>> {
    let supported = matches!(spec.kind, Architecture::TwoLayerReLU | Architecture::TwoLayerPi)
        && spec.output_dim == 1
        && spec.activation == Activation::Relu;
    if !supported {
        return Err(Error::UnsupportedArchitecture(format!(
            "finite-width NTK is available for scalar two-layer ReLU networks, got {}",
            spec
        )));
    }
    if m == 0 || n_draws == 0 {
        return Err(Error::Config("width and draw count must be positive".into()));
    }
    let dim = x.dim();
    if xp.dim() != dim || spec.input_dim != dim {
        return Err(Error::Domain(format!(
            "network input dimension {} with points of dimension {} and {}",
            spec.input_dim,
            dim,
            xp.dim()
        )));
    }
    let t = x.dot(xp);
    let root = SeedStream::new(seed);
    let mut out = Vec::with_capacity(n_draws);
    let project = |s: &mut Stream| -> (Vec<f64>, Vec<f64>) {
        let mut u = Vec::with_capacity(m);
        let mut up = Vec::with_capacity(m);
        for _ in 0..m {
            let (mut a, mut b) = (0.0, 0.0);
            for j in 0..dim {
                let w = s.normal();
                a += w * x.coords()[j];
                b += w * xp.coords()[j];
            }
            u.push(a);
            up.push(b);
        }
        (u, up)
    };
    for draw in 0..n_draws {
        let mut s = root.stream(draw as u64, Purpose::Init);
        let total = match spec.kind {
            Architecture::TwoLayerReLU => {
                let (u, up) = project(&mut s);
                let mut acc = 0.0;
                for i in 0..m {
                    let c = s.normal();
                    acc += relu(u[i]) * relu(up[i]) + t * c * c * step(u[i]) * step(up[i]);
                }
                acc
            }
            _ => {
                // f = √(2/m) Σ cᵢ σ(vᵢ) σ(uᵢ) with u = W₁x, v = W₂x
                let (u, up) = project(&mut s);
                let (v, vp) = project(&mut s);
                let mut acc = 0.0;
                for i in 0..m {
                    let c = s.normal();
                    let out_w = relu(v[i]) * relu(u[i]) * relu(vp[i]) * relu(up[i]);
                    let d_w1 = relu(v[i]) * relu(vp[i]) * step(u[i]) * step(up[i]);
                    let d_w2 = relu(u[i]) * relu(up[i]) * step(v[i]) * step(vp[i]);
                    acc += out_w + t * c * c * (d_w1 + d_w2);
                }
                acc
            }
        };
        out.push(2.0 / m as f64 * total);
    }
    Ok(out)
}

/// Mean and standard error of the finite-width NTK over `n_draws`
/// initializations.
pub fn empirical_ntk(
    spec: &NetworkSpec,
    m: usize,
    x: &UnitVector,
    xp: &UnitVector,
    seed: u64,
    n_draws: usize,
) -> Result<NtkEstimate> {
    empirical_ntk_samples(spec, m, x, xp, seed, n_draws).map(NtkEstimate::from_samples)
}

/// Monte-Carlo estimates of `κ₁(t)` and `κ₂(t)` from their defining
/// expectations over `w ~ N(0, I₂)`, with standard errors.
pub fn monte_carlo_kappas(t: f64, draws: usize, stream: &mut Stream) -> Result<[(f64, f64); 2]> {
    let t = check_unit_interval(t)?;
    let s = ((1.0 - t) * (1.0 + t)).sqrt();
    let (mut s1, mut q1, mut s2, mut q2) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..draws {
        let (a, b) = (stream.normal(), stream.normal());
        let (p, q) = (a, a * t + b * s);
        let v1 = step(p) * step(q);
        let v2 = relu(p) * relu(q);
        s1 += v1;
        q1 += v1 * v1;
        s2 += v2;
        q2 += v2 * v2;
    }
    let n = draws as f64;
    let stat = |s: f64, q: f64| {
        let mean = s / n;
        let var = (q / n - mean * mean).max(0.0) * n / (n - 1.0);
        (mean, (var / n).sqrt())
    };
    Ok([stat(s1, q1), stat(s2, q2)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::networks::build_with_stream;

    #[test]
    fn endpoint_and_midpoint_values() {
        let close = |a: f64, b: f64| (a - b).abs() < 1e-15;
        assert!(close(kappa1(1.0).unwrap(), 0.5));
        assert!(close(kappa1(-1.0).unwrap(), 0.0));
        assert!(close(kappa1(0.0).unwrap(), 0.25));
        assert!(close(kappa2(1.0).unwrap(), 0.5));
        assert!(close(kappa2(-1.0).unwrap(), 0.0));
        assert!(close(kappa2(0.0).unwrap(), 1.0 / (2.0 * PI)));
        assert!(close(ntk_standard(1.0).unwrap(), 2.0));
        assert!(close(ntk_standard(-1.0).unwrap(), 0.0));
        assert!(close(ntk_standard(0.0).unwrap(), 1.0 / PI));
        assert!(close(ntk_pi(1.0).unwrap(), 1.5));
        assert!(close(ntk_pi(-1.0).unwrap(), 0.0));
        assert!(close(ntk_pi(0.0).unwrap(), 1.0 / (2.0 * PI * PI)));
    }

    #[test]
    fn domain_slack() {
        assert!(kappa1(1.0 + 5e-13).is_ok());
        assert!(matches!(kappa1(1.0 + 1e-9), Err(Error::Domain(_))));
        assert!(matches!(ntk_pi(-1.5), Err(Error::Domain(_))));
    }

    #[test]
    fn angle_and_inner_product_forms_agree() {
        let kernels = [
            DotProductKernel::Kappa1,
            DotProductKernel::Kappa2,
            DotProductKernel::StandardNtk,
            DotProductKernel::PiKernel,
        ];
        for k in &kernels {
            for i in 0..=50 {
                let theta = PI * i as f64 / 50.0;
                let a = k.eval_angle(theta);
                let b = k.eval(theta.cos()).unwrap();
                assert!((a - b).abs() < 1e-12, "{} at θ={theta}", k.name());
            }
        }
    }

    #[test]
    fn combinators() {
        let k = DotProductKernel::Product(vec![
            DotProductKernel::Sum(vec![
                DotProductKernel::DotWeighted(Box::new(DotProductKernel::Kappa1)),
                DotProductKernel::DotWeighted(Box::new(DotProductKernel::Kappa1)),
                DotProductKernel::Kappa2,
            ]),
            DotProductKernel::Kappa2,
            DotProductKernel::Sum(vec![DotProductKernel::Constant, DotProductKernel::Constant]),
        ]);
        for t in [-0.8, -0.1, 0.35, 0.99] {
            assert!((k.eval(t).unwrap() - ntk_pi(t).unwrap()).abs() < 1e-15);
        }
    }

    fn grid(k: &DotProductKernel) -> Vec<f64> {
        (0..=10_000).map(|i| k.eval(-1.0 + 2.0 * i as f64 / 10_000.0).unwrap()).collect()
    }

    #[test]
    fn component_profiles_are_monotone() {
        for k in [DotProductKernel::Kappa1, DotProductKernel::Kappa2] {
            assert!(grid(&k).windows(2).all(|w| w[1] >= w[0] - 1e-15), "{}", k.name());
        }
    }

    #[test]
    fn ntk_profiles_dip_below_zero_then_increase() {
        // Both NTKs fall from 0 at t = −1 to a negative minimum and increase
        // from there on; the minima sit near t = −0.794 and t = −0.490.
        for (k, t_min) in [(DotProductKernel::StandardNtk, -0.7941), (DotProductKernel::PiKernel, -0.4899)] {
            let g = grid(&k);
            let i_min = (0..g.len()).min_by(|&a, &b| g[a].total_cmp(&g[b])).unwrap();
            let t_found = -1.0 + 2.0 * i_min as f64 / 10_000.0;
            assert!((t_found - t_min).abs() < 1e-3, "{}: {t_found}", k.name());
            assert!(g[i_min] < 0.0);
            assert!(g[..=i_min].windows(2).all(|w| w[1] <= w[0] + 1e-15));
            assert!(g[i_min..].windows(2).all(|w| w[1] >= w[0] - 1e-15));
        }
    }

    #[test]
    fn monte_carlo_agrees_with_closed_forms() {
        let mut s = SeedStream::new(3).stream(0, Purpose::Probe);
        for t in [-0.7, 0.0, 0.6] {
            let [(m1, e1), (m2, e2)] = monte_carlo_kappas(t, 200_000, &mut s).unwrap();
            assert!((m1 - kappa1(t).unwrap()).abs() < 4.0 * e1);
            assert!((m2 - kappa2(t).unwrap()).abs() < 4.0 * e2);
        }
    }

    #[test]
    fn gram_examples() {
        let p = UnitVector::new(vec![0.6, 0.8]).unwrap();
        let g = gram(&DotProductKernel::PiKernel, &[p.clone(), p]).unwrap();
        assert!(g.entries().iter().all(|&v| (v - 1.5).abs() < 1e-15));

        let mut s = SeedStream::new(1).stream(0, Purpose::Data);
        let pts: Vec<UnitVector> = (0..3).map(|_| UnitVector::random(&mut s, 4)).collect();
        let g = gram(&DotProductKernel::Constant, &pts).unwrap();
        assert!(g.entries().iter().all(|&v| v == 1.0));

        let pts: Vec<UnitVector> = (0..50).map(|_| UnitVector::random(&mut s, 6)).collect();
        let g = gram(&DotProductKernel::StandardNtk, &pts).unwrap();
        assert!(g.min_eigenvalue().unwrap() >= -1e-9);
        let h = gram(&DotProductKernel::Kappa2, &pts).unwrap();
        assert!(g.hadamard(&h).unwrap().min_eigenvalue().unwrap() >= -1e-9);
    }

    #[test]
    fn unit_vector_checks() {
        assert!(matches!(UnitVector::new(vec![1.0, 1.0]), Err(Error::Domain(_))));
        assert!(UnitVector::new(vec![0.0, 1.0]).is_ok());
        assert!(UnitVector::normalize(vec![0.0, 0.0]).is_err());
        let (a, b) = UnitVector::pair_with_inner_product(5, 0.3).unwrap();
        assert!((a.dot(&b) - 0.3).abs() < 1e-15);
    }

    fn diag_gram(d: &[f64]) -> GramMatrix {
        let n = d.len();
        let mut entries = vec![0.0; n * n];
        for (i, v) in d.iter().enumerate() {
            entries[i * n + i] = *v;
        }
        GramMatrix {
            n,
            entries,
            points: vec![],
        }
    }

    #[test]
    fn kernel_gd_examples() {
        let k = diag_gram(&[2.0]);
        let tr = kernel_gd_dynamics(&k, &[1.0], 0.25, 2).unwrap();
        assert_eq!(tr[0], vec![0.0]);
        assert_eq!(tr[2], vec![0.75]);

        let k = diag_gram(&[1.0, 0.5, 0.1]);
        let y = [1.0, -2.0, 3.0];
        kernel_gd_visit(&k, &y, 0.7, 20, |t, _, r| {
            for i in 0..3 {
                let want = y[i] * (1.0 - 0.7 * k.get(i, i)).powi(t as i32);
                assert!((r[i] - want).abs() < 1e-14);
            }
            ControlFlow::Continue(())
        })
        .unwrap();

        assert!(matches!(kernel_gd_dynamics(&k, &y, 2.5, 3), Err(Error::Config(_))));
        assert_eq!(kernel_gd_dynamics(&k, &y, 0.5, 0).unwrap(), vec![vec![0.0; 3]]);
    }

    #[test]
    fn analytic_ntk_matches_tape_gradients() {
        let mut s = SeedStream::new(4).stream(0, Purpose::Data);
        let x = UnitVector::random(&mut s, 4);
        let xp = UnitVector::random(&mut s, 4);
        for spec in [NetworkSpec::two_layer_relu(4, 32), NetworkSpec::two_layer_pi(4, 32)] {
            let samples = empirical_ntk_samples(&spec, 32, &x, &xp, 77, 3).unwrap();
            for (draw, analytic) in samples.iter().enumerate() {
                let mut stream = SeedStream::new(77).stream(draw as u64, Purpose::Init);
                let mut net = build_with_stream(&spec, &mut stream).unwrap();
                let ga = net.output_gradient(x.coords()).unwrap();
                let gb = net.output_gradient(xp.coords()).unwrap();
                let tape: f64 = ga.iter().zip(&gb).map(|(a, b)| a * b).sum();
                assert!((tape - analytic).abs() < 1e-12 * tape.abs().max(1.0), "{tape} vs {analytic}");
            }
        }
    }

    #[test]
    fn empirical_ntk_errors_and_width_one() {
        let (x, xp) = UnitVector::pair_with_inner_product(3, 0.2).unwrap();
        let mlp = NetworkSpec::mlp(3, 8, 3, 1);
        assert!(matches!(
            empirical_ntk(&mlp, 8, &x, &xp, 0, 2),
            Err(Error::UnsupportedArchitecture(_))
        ));
        let e = empirical_ntk(&NetworkSpec::two_layer_relu(3, 1), 1, &x, &xp, 0, 1).unwrap();
        assert!(e.mean.is_finite());
    }
}
