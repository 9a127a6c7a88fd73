//! Gegenbauer polynomials, harmonic dimensions and product linearization.

use polyspec::specfun::{
    gegenbauer_at_one, gegenbauer_eval, harmonic_dim, lambda0_kk, linearize_product, GegenbauerParams,
    HarmonicIndex,
};

fn main() -> polyspec::Result<()> {
    let p = GegenbauerParams::new(1.0, 2)?;
    println!("C_2^1(0.5) = {}   C_2^1(1) = {}", gegenbauer_eval(p, 0.5)?, gegenbauer_at_one(p));

    for d in [2, 5, 10] {
        let dims: Vec<u64> = (0..6).map(|k| harmonic_dim(HarmonicIndex::new(d, k).unwrap())).collect();
        println!("N({d}, 0..5) = {dims:?}");
    }

    // C_3 · C_3 = Σ_s λ_s C_{6−2s}
    let lambda = linearize_product(3, 3, 2.0)?;
    println!("alpha = 2, C_3 C_3 coefficients: {lambda:?}");
    println!("closed form for the leading one: {}", lambda0_kk(2.0, 3)?);

    // growth of the leading coefficient with k
    for k in [10, 20, 40, 80] {
        println!("lambda0(alpha = 2, k = {k:>2}) = {:.4e}", lambda0_kk(2.0, k)?);
    }
    Ok(())
}
