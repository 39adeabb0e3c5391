use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn qmix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qmix"))
        .args(args)
        .output()
        .expect("run qmix")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("qmix-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn chain12() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("data/chain12.txt")
        .display()
        .to_string()
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap_or(-1)
}

#[test]
fn qssamp_on_bundled_chain() {
    let dir = scratch("qssamp");
    let out = qmix(&[
        "qssamp", "--chain", &chain12(), "--j", "0", "--epsilon", "0.01", "--out",
        dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rec = json(&dir.join("result.json"));
    for key in ["chain_id", "n", "s_star", "success_prob", "fidelity", "total_time", "seed"] {
        assert!(rec.get(key).is_some(), "missing {key}");
    }
    assert_eq!(rec["chain_id"], "chain12");
    assert_eq!(rec["n"], 12);
    assert!(rec["fidelity"].as_f64().unwrap() >= 0.999);
    let manifest = json(&dir.join("manifest.json"));
    assert_eq!(manifest["command"], "qssamp");
    assert_eq!(manifest["config"]["epsilon"], "0.01");
    assert!(manifest["wall_time_s"].as_f64().is_some());
    assert!(dir.join("summary.txt").exists());
}

#[test]
fn search_reports_marked_hit() {
    let dir = scratch("search");
    let out = qmix(&["search", "--chain", &chain12(), "--marked", "3,7", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rec = json(&dir.join("result.json"));
    assert!(rec["success_prob"].as_f64().unwrap() >= 0.25 - 0.1);
    assert!(rec["fidelity"].is_null());
}

#[test]
fn verify_lemma1_passes() {
    let dir = scratch("verify");
    let out = qmix(&["verify", "--suite", "lemma1", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = fs::read_to_string(dir.join("lemma1.csv")).unwrap();
    assert_eq!(text.lines().count(), 1001);
}

#[test]
fn csv_dialect() {
    let dir = scratch("dialect");
    let out = qmix(&["hitting", "--chain", &chain12(), "--marked", "0", "--trials", "0", "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(dir.join("hitting.csv")).unwrap();
    assert!(!text.contains('\r'));
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("s,HT_s,HT_plus_estimate"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 3);
    // 17 significant digits: one leading digit and 16 after the point.
    let mantissa = row[1].split('e').next().unwrap();
    assert_eq!(mantissa.trim_start_matches('-').len(), 18);
    let trace = fs::read_to_string(dir.join("mixing.csv")).unwrap();
    assert!(trace.starts_with("t,tv_distance\n"));
}

#[test]
fn reruns_reproduce_csv_bodies() {
    let a = scratch("rerun-a");
    let b = scratch("rerun-b");
    for dir in [&a, &b] {
        let out = qmix(&[
            "gnp-mixing", "--sizes", "10:30:10", "--seeds", "2", "--t-max", "1e5", "--master-seed", "7",
            "--out", dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["table.csv", "medians.csv", "traces/n20_seed1.csv"] {
        let x = fs::read(a.join(name)).unwrap();
        let y = fs::read(b.join(name)).unwrap();
        assert_eq!(x, y, "{name} differs between runs");
    }
    let header = fs::read_to_string(a.join("table.csv")).unwrap();
    assert!(header.starts_with("n,seed,t_mix,sigma,sigma1,delta_min,deloc_max\n"));
    assert_eq!(header.lines().count(), 1 + 3 * 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = scratch("config");
    let cfg = dir.join("run.cfg");
    fs::write(&cfg, format!("# qlsamp on a small graph\nn = 20\np=0.5\nt-max=100\nepsilon=0.5\nout={}\n", dir.join("o").display())).unwrap();
    let out = qmix(&["qlsamp", "--config", cfg.to_str().unwrap(), "--epsilon", "0.2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = json(&dir.join("o/manifest.json"));
    assert_eq!(manifest["config"]["epsilon"], "0.2");
    assert_eq!(manifest["config"]["n"], "20");
    let limit = fs::read_to_string(dir.join("o/limit.csv")).unwrap();
    assert!(limit.starts_with("node,prob\n"));
    assert_eq!(limit.lines().count(), 21);
}

#[test]
fn input_errors_exit_1() {
    let dir = scratch("errors");
    let d = dir.to_str().unwrap();
    assert_eq!(code(&qmix(&["frobnicate"])), 1);
    assert_eq!(code(&qmix(&["search", "--chain", "/no/such/chain.txt", "--marked", "0", "--out", d])), 1);
    assert_eq!(code(&qmix(&["qssamp", "--chain", &chain12(), "--epsilon", "1.5", "--out", d])), 1);
    assert_eq!(code(&qmix(&["search", "--chain", &chain12(), "--out", d])), 1);
    assert_eq!(code(&qmix(&["verify", "--suite", "nonsense", "--out", d])), 1);

    let bad = dir.join("bad.txt");
    fs::write(&bad, "2\n0.5 0.6\n0.5 0.5\n").unwrap();
    assert_eq!(code(&qmix(&["chain-info", "--chain", bad.to_str().unwrap(), "--out", d])), 1);
    let cfg = dir.join("bad.cfg");
    fs::write(&cfg, "colour=blue\n").unwrap();
    assert_eq!(code(&qmix(&["verify", "--config", cfg.to_str().unwrap()])), 1);
}

#[test]
fn help_exits_cleanly() {
    let out = qmix(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("gnp-mixing"));
}
