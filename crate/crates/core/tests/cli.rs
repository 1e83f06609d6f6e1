use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_matterwave"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

/// Copies a shipped config (and its record files) into a scratch directory.
fn stage(dir: &Path, names: &[&str]) {
    for name in names {
        fs::copy(configs().join(name), dir.join(name)).unwrap();
    }
}

fn run(config: &Path) -> (i32, String) {
    let out = bin().arg("run").arg(config).output().unwrap();
    (out.status.code().unwrap_or(-1), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn slab_scan_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    stage(dir.path(), &["fig1_scan.conf"]);
    let (code, err) = run(&dir.path().join("fig1_scan.conf"));
    assert_eq!(code, 0, "{err}");
    let csv = fs::read_to_string(dir.path().join("out/fig1_scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("re_n,im_n,T,flag"));
    let rows: Vec<&str> = lines.collect();
    assert!(rows.len() >= 601);
    assert!(rows[0].starts_with("-3,"));
    let meta: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/fig1_scan.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["schema_version"], 1);
    assert_eq!(meta["result"]["c"], 1.94);
    assert_eq!(meta["result"]["k"], 1.94);
    assert_eq!(meta["result"]["grid"]["step"], 0.01);
}

#[test]
fn chain_check_reports_small_residuals() {
    let dir = tempfile::tempdir().unwrap();
    stage(dir.path(), &["chain_check.conf", "electron_chain.txt"]);
    let (code, err) = run(&dir.path().join("chain_check.conf"));
    assert_eq!(code, 0, "{err}");
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/chain_check.json")).unwrap()).unwrap();
    let r1 = v["result"]["residuals"]["first"].as_f64().unwrap();
    let r2 = v["result"]["residuals"]["second"].as_f64().unwrap();
    assert!((r1 - 7e-4).abs() < 2e-4 && (r2 - 7e-4).abs() < 2e-4, "{r1} {r2}");
    let k = v["result"]["k"].as_f64().unwrap();
    assert!((k / 8700.0 - 1.0).abs() < 0.01);
}

#[test]
fn malformed_config_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.conf");
    fs::write(&cfg, "[run]\ncommand = slab-scan\noutput = out.csv\n[params]\nsigma = 0.95\nwidth = 3\n").unwrap();
    let (code, err) = run(&cfg);
    assert_eq!(code, 2);
    assert!(err.contains("width"), "{err}");
    assert!(!dir.path().join("out.csv").exists());

    fs::write(&cfg, "[run]\ncommand = slab-scan\noutput = out.csv\n[params]\nc = one\n").unwrap();
    assert_eq!(run(&cfg).0, 2);
    assert_eq!(run(&dir.path().join("missing.conf")).0, 2);
    assert!(!dir.path().join("out.csv").exists());
}

#[test]
fn domain_error_exits_1_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("g.conf");
    fs::write(
        &cfg,
        "[run]\ncommand = greens-eval\noutput = g.json\n[params]\nkind = 3d-outgoing\nk = 1\nx = 0\n",
    )
    .unwrap();
    let (code, err) = run(&cfg);
    assert_eq!(code, 1);
    assert!(err.contains("singular"), "{err}");
    assert!(!dir.path().join("g.json").exists());
}

#[test]
fn design_output_is_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("d.conf");
    fs::write(
        &cfg,
        "[run]\ncommand = chain-design\noutput = d.json\nseed = 5\n[params]\nstarts = 16\n",
    )
    .unwrap();
    assert_eq!(run(&cfg).0, 0);
    let first = fs::read(dir.path().join("d.json")).unwrap();
    assert_eq!(run(&cfg).0, 0);
    let second = fs::read(dir.path().join("d.json")).unwrap();
    assert_eq!(first, second);
    let v: Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(v["seed"], 5);
    assert_eq!(v["result"]["report"]["status"], "solved");
}

#[test]
fn every_shipped_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    stage(
        dir.path(),
        &[
            "example1.conf",
            "foldy_pair.conf",
            "pair_1d.txt",
            "packet.conf",
            "chain_design.conf",
        ],
    );
    for (cfg, out) in [
        ("example1.conf", "out/example1.json"),
        ("foldy_pair.conf", "out/foldy_pair.json"),
        ("packet.conf", "out/packet.csv"),
        ("chain_design.conf", "out/chain_design.json"),
    ] {
        let (code, err) = run(&dir.path().join(cfg));
        assert_eq!(code, 0, "{cfg}: {err}");
        assert!(dir.path().join(out).exists(), "{out}");
    }
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("out/example1.json")).unwrap()).unwrap();
    assert!(v["result"]["report"]["max_residual"].as_f64().unwrap() < 1e-14);
    let packet = fs::read_to_string(dir.path().join("out/packet.csv")).unwrap();
    assert_eq!(packet.lines().count(), 402);
}

#[test]
fn remaining_commands_run() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (
            "g.conf",
            "[run]\ncommand = greens-eval\noutput = g.json\n[params]\nkind = 1d-e2\nk = 3\nx = 0.7\nh = 0.001\n",
        ),
        (
            "n3.conf",
            "[run]\ncommand = negref-check\noutput = n3.json\n[params]\nscenario = example3d\nk = 2\nf = 1+0.5i\n",
        ),
        (
            "ne.conf",
            "[run]\ncommand = negref-check\noutput = ne.json\n[params]\nscenario = extended\nk = 1\nsigma = 0.5\npoints = 10\n",
        ),
        (
            "p.conf",
            "[run]\ncommand = packet-synthesize\noutput = p.json\nformat = json\n[params]\nmode = inout\npoints = 5\n",
        ),
        (
            "s.conf",
            "[run]\ncommand = slab-scan\noutput = s.json\nformat = json\n[params]\nre_n_step = 0.5\n",
        ),
    ];
    for (name, text) in cases {
        let cfg = dir.path().join(name);
        fs::write(&cfg, text).unwrap();
        let (code, err) = run(&cfg);
        assert_eq!(code, 0, "{name}: {err}");
    }
    let v: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("ne.json")).unwrap()).unwrap();
    assert!(v["result"]["ratio_variation"].as_f64().unwrap() < 1e-6);
}

#[test]
fn usage_error_without_subcommand() {
    let out = bin().output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
