use polyspec::kernels::{empirical_ntk, gram, kernel_gd_dynamics, ntk_pi, ntk_standard, DotProductKernel, UnitVector};
use polyspec::networks::NetworkSpec;
use polyspec::rng::{Purpose, SeedStream};
use proptest::prelude::*;

fn points(seed: u64, n: usize, dim: usize) -> Vec<UnitVector> {
    let mut s = SeedStream::new(seed).stream(0, Purpose::Data);
    (0..n).map(|_| UnitVector::random(&mut s, dim)).collect()
}

const NAMED: [DotProductKernel; 4] = [
    DotProductKernel::Kappa1,
    DotProductKernel::Kappa2,
    DotProductKernel::StandardNtk,
    DotProductKernel::PiKernel,
];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn schur_products_stay_psd(seed in 0u64..1000, n in 2usize..40, dim in 2usize..8, a in 0usize..4, b in 0usize..4) {
        let pts = points(seed, n, dim);
        let ka = gram(&NAMED[a], &pts).unwrap();
        let kb = gram(&NAMED[b], &pts).unwrap();
        prop_assert!(ka.min_eigenvalue().unwrap() >= -1e-9);
        let prod = ka.hadamard(&kb).unwrap();
        prop_assert!(prod.min_eigenvalue().unwrap() >= -1e-9);
    }

    #[test]
    fn kernel_gd_matches_matrix_powers(seed in 0u64..1000, n in 1usize..=20, steps in 0usize..=50, frac in 0.1f64..1.9) {
        let pts = points(seed, n, 4);
        let k = gram(&DotProductKernel::PiKernel, &pts).unwrap();
        let eta = frac / k.max_eigenvalue().unwrap();
        let y: Vec<f64> = pts.iter().map(|p| p.coords()[0] - 0.3 * p.coords()[1]).collect();
        let trace = kernel_gd_dynamics(&k, &y, eta, steps).unwrap();
        // oracle: r_t = (I − ηK)^t y
        prop_assert_eq!(trace.len(), steps + 1);
        let mut r = y.clone();
        for pred in &trace {
            for i in 0..n {
                prop_assert!((y[i] - pred[i] - r[i]).abs() < 1e-8);
            }
            let kr = k.apply(&r);
            r = r.iter().zip(&kr).map(|(a, b)| a - eta * b).collect();
        }
    }
}

#[test]
fn ntk_deviation_shrinks_with_width() {
    let d = 5;
    let mut s = SeedStream::new(21).stream(0, Purpose::Probe);
    let (x, xp) = (UnitVector::random(&mut s, d + 1), UnitVector::random(&mut s, d + 1));
    let t = x.dot(&xp);
    for (make, closed) in [
        (NetworkSpec::two_layer_relu as fn(usize, usize) -> NetworkSpec, ntk_standard(t).unwrap()),
        (NetworkSpec::two_layer_pi, ntk_pi(t).unwrap()),
    ] {
        let dev: Vec<f64> = [256, 1024, 4096, 16384]
            .iter()
            .map(|&m| empirical_ntk(&make(d + 1, m), m, &x, &xp, 3, 20).unwrap().mean_abs_deviation(closed))
            .collect();
        assert!(dev.windows(2).all(|w| w[1] <= w[0]), "{dev:?}");
    }
}
