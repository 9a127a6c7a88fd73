//! Train until every frequency is captured, then measure how much of each
//! survives random parameter perturbations of growing radius.

use polyspec::experiments::{run_robustness, run_sinusoids, RobustnessConfig, SinusoidConfig};
use polyspec::networks::NetworkSpec;

fn main() -> polyspec::Result<()> {
    for spec in [NetworkSpec::mlp(1, 64, 4, 1), NetworkSpec::pi_ncp(1, 64, 4, 1, vec![1, 2, 3])] {
        let cfg = SinusoidConfig {
            frequencies: vec![2, 4, 6, 8],
            amplitudes: vec![1.0; 4],
            samples: 64,
            learning_rate: 1e-2,
            lr_multiplicative: 1e-3,
            iterations: 6000,
            stop_when_converged: Some(0.85),
            ..SinusoidConfig::new(spec.clone())
        };
        let run = run_sinusoids(&cfg)?;
        let table = run_robustness(
            &run.network,
            &run.target,
            &RobustnessConfig {
                deltas: vec![0.0, 0.5, 1.0, 2.0, 4.0],
                master_seed: 0,
                run_index: 0,
            },
        )?;
        println!("{} (converged after {} steps)", spec.kind.name(), run.trace.checkpoints().last().unwrap());
        for (delta, row) in table.deltas.iter().zip(&table.rows) {
            let r: Vec<String> = row.iter().map(|v| format!("{v:.2}")).collect();
            println!("  delta {delta:>4}: {}", r.join(" "));
        }
    }
    Ok(())
}
