//! The `polyspec` command line: configuration, subcommands and output files.
//!
//! Every text output starts with a `# ` comment header holding the version,
//! a config hash, the master seed and the full resolved config, which can be
//! passed back with `--config` to reproduce the file.

mod commands;
mod config;
mod heatmap;
mod viridis;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Arg, ArgAction, ArgMatches};

pub use commands::{dispatch, lambda0_growth_exponent, network_spec, Report};
pub use config::{parse_config, Command, Entry, KeySpec, Provenance, RunConfig, Value, ValueType, OUT_ENV};
pub use heatmap::{heatmap_svg, render_heatmap, HeatmapData, COLOR_MAX};

use crate::error::{Error, Result};

fn app() -> clap::Command {
    let mut app = clap::Command::new("polyspec")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Spectral analysis of polynomial neural networks")
        .subcommand_required(true)
        .arg_required_else_help(true);
    for cmd in Command::ALL {
        let mut sub = clap::Command::new(cmd.name())
            .about(cmd.about())
            .arg(
                Arg::new("config")
                    .long("config")
                    .value_name("FILE")
                    .help("config file, or an output file whose header to reuse"),
            )
            .arg(
                Arg::new("out")
                    .long("out")
                    .value_name("DIR")
                    .help(format!("output directory (default: ${OUT_ENV} or .)")),
            );
        for key in cmd.keys() {
            let flag = key.flag();
            sub = sub.arg(
                Arg::new(key.name)
                    .long(flag)
                    .value_name(key.ty.name())
                    .action(ArgAction::Set)
                    .allow_hyphen_values(true)
                    .help(format!("{} [default: {}]", key.help, key.default)),
            );
        }
        app = app.subcommand(sub);
    }
    app
}

fn overrides(cmd: Command, m: &ArgMatches) -> Vec<(String, String)> {
    cmd.keys()
        .iter()
        .filter_map(|k| m.get_one::<String>(k.name).map(|v| (k.name.to_string(), v.clone())))
        .collect()
}

/// Parses arguments and runs the chosen subcommand.
pub fn run_from<I, T>(args: I) -> std::result::Result<Report, CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let matches = app().try_get_matches_from(args).map_err(CliError::Usage)?;
    let (name, sub) = matches.subcommand().expect("subcommand required");
    let cmd = Command::parse(name).expect("registered subcommand");
    let run = || -> Result<Report> {
        let file = sub.get_one::<String>("config").map(PathBuf::from);
        let out = sub.get_one::<String>("out").map(PathBuf::from);
        let cfg = parse_config(file.as_deref(), cmd, &overrides(cmd, sub), out)?;
        dispatch(&cfg)
    };
    run().map_err(|e| CliError::Run(cmd, e))
}

#[derive(Debug)]
pub enum CliError {
    /// Bad arguments, or `--help` / `--version`.
    Usage(clap::Error),
    Run(Command, Error),
}

impl CliError {
    /// `error[<kind>] <command>: <message>` on one line.
    pub fn line(&self) -> String {
        match self {
            CliError::Usage(e) => {
                let msg = e.to_string();
                let first = msg.lines().next().unwrap_or("").trim_start_matches("error: ");
                format!("error[usage] polyspec: {first}")
            }
            CliError::Run(cmd, e) => {
                let msg = e.to_string().replace(['\n', '\r'], " ");
                format!("error[{}] {cmd}: {msg}", e.kind())
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn out(dir: &std::path::Path) -> String {
        dir.to_str().unwrap().to_string()
    }

    #[test]
    fn kernel_eval_prints_value() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_from(["polyspec", "kernel-eval", "--kernel", "standard", "--t", "1.0", "--out", &out(dir.path())]).unwrap();
        assert_eq!(r.stdout, "2.0\n");
        let text = std::fs::read_to_string(dir.path().join("kernel_eval.csv")).unwrap();
        assert!(text.starts_with("# polyspec "));
        assert!(text.contains("# master_seed = 0\n"));
    }

    #[test]
    fn negative_values_are_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let r = run_from(["polyspec", "kernel-eval", "--kernel", "pi", "--t", "-1", "--out", &out(dir.path())]).unwrap();
        assert_eq!(r.stdout, "0.0\n");
    }

    #[test]
    fn error_lines() {
        let e = run_from(["polyspec", "kernel-eval", "--t", "2"]).unwrap_err();
        let line = e.line();
        assert!(line.starts_with("error[domain] kernel-eval: "), "{line}");
        assert!(!line.contains('\n'));
        let e = run_from(["polyspec", "kernel-eval", "--widht", "2"]).unwrap_err();
        assert!(e.line().starts_with("error[usage]"));
    }
}
