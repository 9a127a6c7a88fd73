//! Mercer eigenvalues of the NTKs on S⁵, the parity structure of the
//! standard kernel, decay fits and truncated reconstruction.

use polyspec::kernels::DotProductKernel;
use polyspec::spectral::{compute_spectrum, decay_slope_fit, mercer_reconstruct, ClassFilter, QuadratureSpec};

fn main() -> polyspec::Result<()> {
    let (d, k_max) = (5, 40);
    let q = QuadratureSpec::default_for(k_max);
    let std = compute_spectrum(&DotProductKernel::StandardNtk, d, k_max, q)?;
    let pi = compute_spectrum(&DotProductKernel::PiKernel, d, k_max, q)?;
    println!("{:>3} {:>12} {:>12}", "k", "standard", "pi");
    for k in 0..=12 {
        println!("{k:>3} {:>12.4e} {:>12.4e}", std.mu(k).unwrap(), pi.mu(k).unwrap());
    }

    let fits = [
        ("standard, even k in [10,40]", decay_slope_fit(&std, 10, 40, ClassFilter::Even)?),
        ("pi, k = 0 mod 4 in [12,40]", decay_slope_fit(&pi, 12, 40, ClassFilter::Mod4(0))?),
        ("pi, odd k in [11,39]", decay_slope_fit(&pi, 11, 39, ClassFilter::Odd)?),
    ];
    for (label, f) in fits {
        println!("{label}: slope {:.3}, r² {:.4}", f.slope, f.r_squared);
    }

    let t = 0.4;
    let full = compute_spectrum(&DotProductKernel::PiKernel, d, 80, QuadratureSpec::default_for(80))?;
    println!(
        "reconstruction at t = {t}: {:.6} vs {:.6}",
        mercer_reconstruct(&full, t, 80)?,
        DotProductKernel::PiKernel.eval(t)?
    );
    Ok(())
}
