use polyspec::quadrature::AngularRule;
use polyspec::specfun::{
    gegenbauer_eval, harmonic_dim, lambda0_kk, linearize_product, GegenbauerParams, HarmonicIndex,
};
use proptest::prelude::*;

fn c(alpha: f64, k: usize, t: f64) -> f64 {
    gegenbauer_eval(GegenbauerParams::new(alpha, k).unwrap(), t).unwrap()
}

#[test]
fn orthogonality_up_to_degree_12() {
    for alpha in [0.5, 1.0, 2.0] {
        let rule = AngularRule::new(128, 2.0 * alpha);
        for m in 0..=12 {
            for n in 0..m {
                let v = rule.integrate(|t| c(alpha, m, t) * c(alpha, n, t));
                assert!(v.abs() < 1e-10, "alpha {alpha}, <C_{m}, C_{n}> = {v:e}");
            }
        }
    }
}

#[test]
fn lambda0_matches_quadrature_oracle() {
    for alpha in [1.0, 2.0, 3.0] {
        for k in 0..=8 {
            let closed = lambda0_kk(alpha, k).unwrap();
            let oracle = linearize_product(k, k, alpha).unwrap()[0];
            assert!((closed - oracle).abs() <= 1e-6 * oracle.abs(), "alpha {alpha}, k {k}: {closed} vs {oracle}");
        }
    }
}

fn binomial(n: u64, k: u64) -> u64 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

#[test]
fn harmonic_dimension_sum_rule() {
    for d in 1..=6 {
        for kk in 0..=10u64 {
            let sum: u64 = (0..=kk).map(|k| harmonic_dim(HarmonicIndex::new(d, k as usize).unwrap())).sum();
            let d = d as u64;
            let expected = binomial(kk + d, d) + if kk >= 1 { binomial(kk + d - 1, d) } else { 0 };
            assert_eq!(sum, expected, "d {d}, K {kk}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn linearization_identity(m in 0usize..=8, n in 0usize..=8, alpha in prop::sample::select(vec![1.0, 2.0]),
                              ts in prop::collection::vec(-1.0f64..=1.0, 50)) {
        let lambda = linearize_product(m, n, alpha).unwrap();
        for t in ts {
            let lhs = c(alpha, m, t) * c(alpha, n, t);
            let rhs: f64 = lambda.iter().enumerate().map(|(s, l)| l * c(alpha, m + n - 2 * s, t)).sum();
            prop_assert!((lhs - rhs).abs() < 1e-8, "m {} n {} t {}: {} vs {}", m, n, t, lhs, rhs);
        }
    }

    #[test]
    fn symmetric_in_argument_parity(alpha in 0.5f64..4.0, k in 0usize..20, t in -1.0f64..=1.0) {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let (a, b) = (c(alpha, k, t), c(alpha, k, -t));
        prop_assert!((a - sign * b).abs() <= 1e-9 * a.abs().max(1.0));
    }

    #[test]
    fn bounded_by_value_at_one(alpha in 0.5f64..4.0, k in 0usize..30, t in -1.0f64..=1.0) {
        let p = GegenbauerParams::new(alpha, k).unwrap();
        let top = polyspec::specfun::gegenbauer_at_one(p);
        prop_assert!(c(alpha, k, t).abs() <= top * (1.0 + 1e-12));
    }
}
