//! Gram matrices on the sphere and gradient descent in function space:
//! residuals along each eigenvector shrink as `(1 − η λ)^t`.

use polyspec::kernels::{gram, kernel_gd_dynamics, DotProductKernel, UnitVector};
use polyspec::rng::{Purpose, SeedStream};

fn main() -> polyspec::Result<()> {
    let mut s = SeedStream::new(3).stream(0, Purpose::Data);
    let points: Vec<UnitVector> = (0..60).map(|_| UnitVector::random(&mut s, 6)).collect();
    for kernel in [DotProductKernel::StandardNtk, DotProductKernel::PiKernel] {
        let k = gram(&kernel, &points)?;
        let ev = k.eigenvalues()?;
        println!(
            "{:>9}: lambda_min {:+.2e}  lambda_max {:.3}",
            kernel.name(),
            ev[0],
            ev[ev.len() - 1]
        );
        let y: Vec<f64> = points.iter().map(|p| p.coords()[0] * p.coords()[1]).collect();
        let eta = 1.0 / ev[ev.len() - 1];
        let trace = kernel_gd_dynamics(&k, &y, eta, 200)?;
        for t in [0, 10, 50, 200] {
            let r: f64 = trace[t].iter().zip(&y).map(|(p, y)| (y - p).powi(2)).sum::<f64>().sqrt();
            println!("    step {t:>3}: residual norm {r:.4}");
        }
    }
    Ok(())
}
