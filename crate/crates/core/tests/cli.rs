use std::path::Path;
use std::process::Command;

use polyspec::cli::run_from;

fn run(args: &[&str], out: &Path) -> polyspec::cli::Report {
    let mut full = vec!["polyspec"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--out", out.to_str().unwrap()]);
    run_from(full).unwrap_or_else(|e| panic!("{}", e.line()))
}

fn read(p: impl AsRef<Path>) -> Vec<u8> {
    std::fs::read(p).unwrap()
}

fn data_rows(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).skip(1).collect()
}

#[test]
fn spectrum_then_decay_fit() {
    let dir = tempfile::tempdir().unwrap();
    let r = run(&["spectrum", "--kernel", "pi", "--d", "5", "--kmax", "40"], dir.path());
    assert!(r.stdout.contains("rows = 41"));
    let text = String::from_utf8(read(dir.path().join("spectrum.csv"))).unwrap();
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 41);
    assert!(rows[0].starts_with("0,"));

    let r = run(&["decay-fit", "--class", "odd", "--kmin", "11", "--kmax", "39"], dir.path());
    assert!(r.stdout.starts_with("slope = -"), "{}", r.stdout);
    let fit = String::from_utf8(read(dir.path().join("decay_fit.csv"))).unwrap();
    assert_eq!(data_rows(&fit).len(), 1);
}

#[test]
fn repeated_runs_are_byte_identical() {
    let sinusoid = [
        "sinusoids", "--width", "8", "--depth", "3", "--mult", "1,2", "--frequencies", "2,3", "--samples", "16",
        "--iterations", "30", "--record-every", "10", "--seeds", "2", "--master-seed", "5",
    ];
    let invocations: [&[&str]; 3] = [
        &["empirical-ntk", "--width", "64", "--draws", "4"],
        &["harmonics", "--arch", "two-layer-pi", "--width", "16", "--samples", "20", "--d", "3", "--iterations", "20", "--window", "3"],
        &sinusoid,
    ];
    for args in invocations {
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        let (ra, rb) = (run(args, a.path()), run(args, b.path()));
        assert_eq!(ra.stdout, rb.stdout);
        assert!(!ra.files.is_empty());
        for f in &ra.files {
            let name = f.file_name().unwrap();
            assert_eq!(read(f), read(b.path().join(name)), "{args:?}: {name:?}");
        }
    }
}

#[test]
fn embedded_header_reproduces_the_file() {
    let a = tempfile::tempdir().unwrap();
    run(&["harmonics", "--arch", "two-layer-relu", "--width", "12", "--samples", "15", "--d", "4", "--iterations", "10",
          "--degrees", "1,2", "--master-seed", "9"], a.path());
    for name in ["trace.csv", "heatmap.svg"] {
        let b = tempfile::tempdir().unwrap();
        let src = a.path().join(name);
        run(&["harmonics", "--config", src.to_str().unwrap()], b.path());
        assert_eq!(read(a.path().join("trace.csv")), read(b.path().join("trace.csv")), "{name}");
        assert_eq!(read(a.path().join("summary.csv")), read(b.path().join("summary.csv")), "{name}");
    }
}

#[test]
fn config_file_values_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.ini");
    std::fs::write(&cfg, "# comment\n[kernel-eval]\nkernel = kappa1\nt = 0.5\n").unwrap();
    let r = run(&["kernel-eval", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(r.stdout, format!("{:?}\n", polyspec::kernels::kappa1(0.5).unwrap()));
    let text = String::from_utf8(read(dir.path().join("kernel_eval.csv"))).unwrap();
    assert!(text.contains("# kernel = kappa1\n"));

    std::fs::write(&cfg, "[kernel-eval]\nkernal = pi\n").unwrap();
    let e = run_from(["polyspec", "kernel-eval", "--config", cfg.to_str().unwrap()]).unwrap_err();
    assert!(e.line().starts_with("error[unknown-key] kernel-eval: "), "{}", e.line());
}

#[test]
fn binary_streams_and_exit_codes() {
    let exe = env!("CARGO_BIN_EXE_polyspec");
    let dir = tempfile::tempdir().unwrap();

    let ok = Command::new(exe)
        .args(["kernel-eval", "--kernel", "pi", "--t", "1"])
        .env("POLYSPEC_OUT", dir.path())
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert_eq!(String::from_utf8_lossy(&ok.stdout), "1.5\n");
    assert!(ok.stderr.is_empty());
    assert!(dir.path().join("kernel_eval.csv").exists());

    let bad = Command::new(exe)
        .args(["spectrum", "--d", "1"])
        .env("POLYSPEC_OUT", dir.path())
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
    assert!(bad.stdout.is_empty());
    let err = String::from_utf8_lossy(&bad.stderr);
    assert!(err.starts_with("error[domain] spectrum: "), "{err}");
    assert_eq!(err.lines().count(), 1);
}
