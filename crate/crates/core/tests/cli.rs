use std::path::PathBuf;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_loopsoup"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("loopsoup-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn bad_domain_is_a_config_error() {
    let out = bin().args(["sample", "--domain", "ring:3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn odd_cutoff_is_a_config_error() {
    let path = scratch("odd.json");
    let out = bin().args(["sample", "--cutoff", "3", "--out", path.to_str().unwrap()]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn rerun_reproduces_outputs_under_other_worker_counts() {
    for (cmd, extra) in [("sample", vec![]), ("explore", vec![]), ("restriction-test", vec!["--replicas", "50", "--lambda", "5"])] {
        let first = scratch(&format!("{cmd}-1.json"));
        let second = scratch(&format!("{cmd}-2.json"));
        let status = bin()
            .env("LOOPSOUP_WORKERS", "1")
            .args([cmd, "--domain", "disk:16", "--seed", "9", "--out", first.to_str().unwrap()])
            .args(&extra)
            .status()
            .unwrap();
        assert!(status.success(), "{cmd}");
        let status = bin()
            .env("LOOPSOUP_WORKERS", "3")
            .args(["rerun", first.to_str().unwrap(), "--out", second.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success(), "{cmd} rerun");
        let a = std::fs::read_to_string(&first).unwrap();
        let b = std::fs::read_to_string(&second).unwrap();
        // the embedded manifest records its own output path
        assert_eq!(
            a.replace(first.to_str().unwrap(), "OUT"),
            b.replace(second.to_str().unwrap(), "OUT"),
            "{cmd}"
        );
    }
}

#[test]
fn render_reads_a_sample_file() {
    let sample = scratch("render-in.json");
    let svg = scratch("render-out.svg");
    assert!(bin().args(["sample", "--domain", "disk:12", "--out", sample.to_str().unwrap()]).status().unwrap().success());
    let status = bin()
        .args(["render", sample.to_str().unwrap(), "--layers", "fillings,all-loops,contours", "--out", svg.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") || text.starts_with("<?xml"));
    assert!(text.contains("<metadata>"));
}
