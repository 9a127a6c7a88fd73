//! Finite-width gradient inner products approach the closed-form kernels as
//! the width grows.

use polyspec::kernels::{empirical_ntk, ntk_pi, ntk_standard, UnitVector};
use polyspec::networks::NetworkSpec;

fn main() -> polyspec::Result<()> {
    let (d, t) = (5, 0.3);
    let (x, xp) = UnitVector::pair_with_inner_product(d + 1, t)?;
    for m in [256, 1024, 4096] {
        let relu = empirical_ntk(&NetworkSpec::two_layer_relu(d + 1, m), m, &x, &xp, 7, 10)?;
        let pi = empirical_ntk(&NetworkSpec::two_layer_pi(d + 1, m), m, &x, &xp, 7, 10)?;
        println!(
            "m = {m:>5}: relu {:.4} ± {:.4} (limit {:.4})   pi {:.4} ± {:.4} (limit {:.4})",
            relu.mean,
            relu.stderr,
            ntk_standard(t)?,
            pi.mean,
            pi.stderr,
            ntk_pi(t)?
        );
    }
    Ok(())
}
