//! Gauss–Legendre rules and their angular form for sphere-weighted integrals.

use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Builds an `n`-point rule by Newton iteration on `P_n`.
    ///
    /// Nodes come out in increasing order.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "a quadrature rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        let half = n.div_ceil(2);
        for i in 0..half {
            // Tricomi's initial guess for the i-th largest root.
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    let (_, d) = legendre_with_derivative(n, x);
                    dp = d;
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = w;
            nodes[i] = -x;
            weights[i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, a: f64, b: f64, f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(mid + half * x))
            .sum::<f64>()
            * half
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let (p, pm1) = if n == 0 { (1.0, 0.0) } else { (p1, p0) };
    let d = n as f64 * (x * p - pm1) / (x * x - 1.0);
    (p, d)
}

/// Rule for `∫_{-1}^{1} f(t) (1 - t²)^{(power - 1)/2} dt`.
///
/// The substitution `t = cos θ` turns the weight into `sin^power θ dθ` on
/// `[0, π]`, where the integrand is smooth even when the weight has a square
/// root singularity at `t = ±1`. A Gauss–Legendre rule in `θ` then converges
/// geometrically for analytic `f ∘ cos`.
#[derive(Debug, Clone)]
pub struct AngularRule {
    power: f64,
    angles: Vec<f64>,
    points: Vec<f64>,
    weights: Vec<f64>,
}

impl AngularRule {
    pub fn new(node_count: usize, power: f64) -> Self {
        let gl = GaussLegendre::new(node_count);
        let mut angles = Vec::with_capacity(node_count);
        let mut points = Vec::with_capacity(node_count);
        let mut weights = Vec::with_capacity(node_count);
        for (&x, &w) in gl.nodes().iter().zip(gl.weights()) {
            let theta = 0.5 * PI * (x + 1.0);
            angles.push(theta);
            points.push(theta.cos());
            weights.push(0.5 * PI * w * theta.sin().powf(power));
        }
        Self {
            power,
            angles,
            points,
            weights,
        }
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Nodes `t_i = cos θ_i` in `[-1, 1]`.
    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Weights with the `(1 - t²)` factor already folded in.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(&t, &w)| w * f(t))
            .sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn low_order_rules_match_tables() {
        let r = GaussLegendre::new(2);
        let x = 1.0 / 3f64.sqrt();
        assert!((r.nodes()[0] + x).abs() < 1e-15);
        assert!((r.nodes()[1] - x).abs() < 1e-15);
        assert!((r.weights()[0] - 1.0).abs() < 1e-15);

        let r = GaussLegendre::new(3);
        assert!(r.nodes()[1].abs() < 1e-16);
        assert!((r.weights()[1] - 8.0 / 9.0).abs() < 1e-15);
        assert!((r.nodes()[2] - (0.6f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn exact_for_polynomials_up_to_degree_2n_minus_1() {
        let r = GaussLegendre::new(6);
        for p in 0..12 {
            let exact = if p % 2 == 1 { 0.0 } else { 2.0 / (p as f64 + 1.0) };
            let got = r.integrate(-1.0, 1.0, |x| x.powi(p));
            assert!((got - exact).abs() < 1e-14, "degree {p}: {got} vs {exact}");
        }
    }

    #[test]
    fn weights_sum_to_two_for_large_rules() {
        for n in [64, 500, 2000, 4096] {
            let r = GaussLegendre::new(n);
            let s: f64 = r.weights().iter().sum();
            assert!((s - 2.0).abs() < 1e-12, "n = {n}: {s}");
        }
    }

    #[test]
    fn angular_rule_integrates_half_integer_weights() {
        // ∫ (1 - t²)^{1/2} dt = π/2 and ∫ t² (1 - t²)^{1/2} dt = π/8.
        let r = AngularRule::new(64, 2.0);
        assert!((r.integrate(|_| 1.0) - PI / 2.0).abs() < 1e-14);
        assert!((r.integrate(|t| t * t) - PI / 8.0).abs() < 1e-14);
        // power 1 is the plain Lebesgue measure in t.
        let r = AngularRule::new(64, 1.0);
        assert!((r.integrate(|t| t.powi(4)) - 0.4).abs() < 1e-14);
    }
}
