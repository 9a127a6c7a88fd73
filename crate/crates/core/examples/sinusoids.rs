//! A deep MLP and a Π-Net (NCP) fitting a sum of ten sinusoids, with the
//! amplitude-ratio trace written as a heatmap.

use polyspec::cli::{render_heatmap, HeatmapData};
use polyspec::experiments::{run_sinusoids, SinusoidConfig};
use polyspec::networks::NetworkSpec;

fn main() -> polyspec::Result<()> {
    let out = std::env::temp_dir();
    for spec in [NetworkSpec::mlp(1, 64, 6, 1), NetworkSpec::pi_ncp(1, 64, 6, 1, vec![1, 2, 3, 4, 5])] {
        let cfg = SinusoidConfig {
            learning_rate: 3e-3,
            lr_multiplicative: 3e-4,
            iterations: 1500,
            ..SinusoidConfig::new(spec.clone())
        };
        let run = run_sinusoids(&cfg)?;
        let times: Vec<String> = (0..10)
            .map(|i| run.trace.time_to_threshold(i, 0.5).map_or("-".into(), |t| t.to_string()))
            .collect();
        println!("{:<7} time to half amplitude per frequency: {}", spec.kind.name(), times.join(" "));
        let path = out.join(format!("sinusoids_{}.svg", spec.kind.name()));
        render_heatmap(&HeatmapData::from_trace(&run.trace, "frequency")?, &path)?;
        println!("        heatmap: {}", path.display());
    }
    Ok(())
}
