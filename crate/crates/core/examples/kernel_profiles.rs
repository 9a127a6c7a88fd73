//! Closed-form NTK profiles and a Monte-Carlo check of the two arc-cosine
//! components.

use polyspec::kernels::{kappa1, kappa2, monte_carlo_kappas, ntk_pi, ntk_standard};
use polyspec::rng::{Purpose, SeedStream};

fn main() -> polyspec::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "t", "kappa1", "kappa2", "standard", "pi");
    for i in 0..=8 {
        let t = -1.0 + 0.25 * i as f64;
        println!(
            "{t:>6.2} {:>10.6} {:>10.6} {:>10.6} {:>10.6}",
            kappa1(t)?,
            kappa2(t)?,
            ntk_standard(t)?,
            ntk_pi(t)?
        );
    }

    let mut stream = SeedStream::new(1).stream(0, Purpose::Probe);
    let t = 0.3;
    let [(m1, s1), (m2, s2)] = monte_carlo_kappas(t, 200_000, &mut stream)?;
    println!("\nMonte Carlo at t = {t}:");
    println!("  kappa1 {m1:.5} ± {s1:.5}  (closed form {:.5})", kappa1(t)?);
    println!("  kappa2 {m2:.5} ± {s2:.5}  (closed form {:.5})", kappa2(t)?);
    Ok(())
}
