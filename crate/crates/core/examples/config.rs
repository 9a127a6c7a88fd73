//! Parsing a run configuration the way the CLI does: file values, flag
//! overrides and defaults, each with its provenance.

use polyspec::cli::{parse_config, Command};

fn main() -> polyspec::Result<()> {
    let dir = std::env::temp_dir().join("polyspec-config-example");
    std::fs::create_dir_all(&dir).map_err(|e| polyspec::Error::Config(e.to_string()))?;
    let path = dir.join("run.ini");
    std::fs::write(&path, "master_seed = 4\n\n[sinusoids]\nlr = 0.01\ndepth = 9\narch = mlp\n")
        .map_err(|e| polyspec::Error::Config(e.to_string()))?;

    let overrides = vec![("lr".to_string(), "0.002".to_string())];
    let cfg = parse_config(Some(&path), Command::Sinusoids, &overrides, Some(dir.clone()))?;
    for (key, entry) in &cfg.params {
        println!("{key:>18} = {:<32} ({})", entry.value.to_string(), entry.provenance);
    }
    println!("config hash {}", cfg.hash());
    Ok(())
}
