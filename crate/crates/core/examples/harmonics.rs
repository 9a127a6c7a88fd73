//! Two-layer ReLU and Π networks learning a mixture of spherical harmonics.
//! Prints the iteration at which each degree's residual projection halves.

use polyspec::experiments::{run_harmonics, HarmonicsConfig};
use polyspec::networks::Architecture;

fn main() -> polyspec::Result<()> {
    for arch in [Architecture::TwoLayerReLU, Architecture::TwoLayerPi] {
        let cfg = HarmonicsConfig {
            width: 1024,
            samples: 300,
            d: 6,
            iterations: 1500,
            ..HarmonicsConfig::new(arch)
        };
        let run = run_harmonics(&cfg)?;
        let t = &run.trace;
        let halves: Vec<String> = (0..t.labels().len())
            .map(|i| match t.time_to_threshold(i, 0.5) {
                Some(it) => format!("k={}: {it}", t.labels()[i]),
                None => format!("k={}: never", t.labels()[i]),
            })
            .collect();
        println!("{:<15} {}", arch.name(), halves.join(", "));
    }
    Ok(())
}
