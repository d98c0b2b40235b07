use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const Z6_TURAN: &str = r#"
schema = 1
flavour = "turan"
[structure]
kind = "finite_abelian"
moduli = [6]
[region]
plus = [-1, 0, 1]
"#;

fn delsarte(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_delsarte")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn z6_turan_solves_with_zero_gap() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "z6.toml", Z6_TURAN);
    let out = dir.path().join("out");
    let o = delsarte(&["solve", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.contains(r#""gap": "0""#));
    assert!(report.contains(r#""a_value": "1/3""#));
    let csv = fs::read_to_string(out.join("report.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().ends_with(",2,2,0,1/3,1/3,true"));
    assert!(fs::read_to_string(out.join("summary.txt")).unwrap().contains("VALID"));
}

#[test]
fn solve_output_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "z6.toml", Z6_TURAN);
    let mut reports = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let o = delsarte(&["solve", "--config", &cfg, "--out-dir", out.to_str().unwrap(), "--epsilon", "1/2,1/4"]);
        assert_eq!(o.status.code(), Some(0));
        reports.push(
            ["report.json", "report.csv", "summary.txt", "certificate.txt"]
                .map(|f| fs::read(out.join(f)).unwrap()),
        );
    }
    assert_eq!(reports[0], reports[1]);
}

#[test]
fn asymmetric_region_exits_2_naming_the_element() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &Z6_TURAN.replace("[-1, 0, 1]", "[0, 1]"));
    let o = delsarte(&["solve", "--config", &cfg, "--out-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("contains 1 but not 5"), "{}", stderr(&o));
}

#[test]
fn missing_config_exits_1() {
    let o = delsarte(&["solve", "--config", "/nonexistent/config.toml"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_key_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.toml", &format!("{Z6_TURAN}colour = 1\n"));
    let o = delsarte(&["solve", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line"), "{}", stderr(&o));
}

#[test]
fn certificate_round_trip_and_tampering() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "z6.toml", Z6_TURAN);
    let out = dir.path().join("out");
    let o = delsarte(&["certify", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let cert = out.join("certificate.txt");
    let o = delsarte(&["verify", "--config", &cfg, "--certificate", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("VALID: 𝒜 ≤ α = 1/3"));

    let text = fs::read_to_string(&cert).unwrap();
    assert!(text.contains("atom 2 - -2\n"));
    let flipped = dir.path().join("flipped.txt");
    fs::write(&flipped, text.replace("atom 2 - -2", "atom 2 - 2")).unwrap();
    let o = delsarte(&["verify", "--config", &cfg, "--certificate", flipped.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stdout(&o).contains("M* sign violation at coset {2}"), "{}", stdout(&o));

    let truncated = dir.path().join("truncated.txt");
    fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    let o = delsarte(&["verify", "--config", &cfg, "--certificate", truncated.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn certificate_for_another_instance_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "z6.toml", Z6_TURAN);
    let other = write_config(dir.path(), "z6d.toml", &Z6_TURAN.replace("turan", "delsarte"));
    let out = dir.path().join("out");
    delsarte(&["certify", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    let cert = out.join("certificate.txt");
    let o = delsarte(&["verify", "--config", &other, "--certificate", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("region hash"));
}

const Z12_SWEEP: &str = r#"
schema = 1
flavour = "turan"
[structure]
kind = "finite_abelian"
moduli = [12]
[region]
plus = [0]
[sweep]
parameter = "turan_k"
values = [0, 1, 2, 3, 4, 5]
"#;

#[test]
fn turan_sweep_on_z12() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "z12.toml", Z12_SWEEP);
    let out = dir.path().join("out");
    let o = delsarte(&["sweep", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    // Larger Ω+ can only raise the extremal value.
    let values: Vec<f64> = fs::read_to_string(out.join("sweep_plot.dat"))
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split_whitespace().nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(values.len(), 6);
    assert!(values.windows(2).all(|w| w[0] <= w[1]));
    assert!(rows[1].starts_with("turan_k,1,5,5,0,1/6,1/6,true,ok"));
}

#[test]
fn repeated_sweep_hits_the_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "z12.toml", Z12_SWEEP);
    let out = dir.path().join("out");
    let cache = dir.path().join("cache");
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_delsarte"))
            .args(["sweep", "--config", &cfg, "--out-dir", out.to_str().unwrap()])
            .env("DELSARTE_CACHE_DIR", &cache)
            .output()
            .unwrap()
    };
    assert_eq!(run().status.code(), Some(0));
    let first = fs::read(out.join("sweep.csv")).unwrap();
    assert_eq!(fs::read_dir(&cache).unwrap().count(), 6);
    assert_eq!(run().status.code(), Some(0));
    assert_eq!(fs::read(out.join("sweep.csv")).unwrap(), first);
}

#[test]
fn sphere_cap_sweep_records_failed_rows() {
    let dir = tempfile::tempdir().unwrap();
    let text = r#"
schema = 1
flavour = "delsarte"
[structure]
kind = "sphere"
dimension = 2
grid = 40
truncation = 30
[region]
plus_cap = "60deg"
[sweep]
parameter = "cap"
values = ["10deg", "20deg", "30deg", "40deg", "50deg", "60deg", "70deg", "80deg", "90deg"]
"#;
    let cfg = write_config(dir.path(), "cap.toml", text);
    let out = dir.path().join("out");
    let o = delsarte(&["sweep", "--config", &cfg, "--out-dir", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let csv = fs::read_to_string(out.join("sweep.csv")).unwrap();
    let mut reader = csv::Reader::from_reader(csv.as_bytes());
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 9);
    for row in &rows {
        let status = &row[8];
        if status == "ok" {
            let gap: f64 = row[4].parse().unwrap();
            assert!(gap.abs() < 1e-6, "gap {gap} at {}", &row[1]);
        } else {
            assert!(status.starts_with("error"), "{status}");
        }
    }
    assert!(rows.iter().filter(|r| &r[8] == "ok").count() >= 7);
}

#[test]
fn fuzz_writes_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "z6.toml", Z6_TURAN);
    let out = dir.path().join("out");
    let o = delsarte(&["fuzz", "--config", &cfg, "--out-dir", out.to_str().unwrap(), "--exhaustive"]);
    assert_eq!(o.status.code(), Some(0));
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("fuzz.json")).unwrap()).unwrap();
    assert_eq!(summary["instances"], 128);
    assert_eq!(summary["zero_gap"], 128);
    assert_eq!(summary["violations"].as_array().unwrap().len(), 0);
}

#[test]
fn exact_arithmetic_on_a_sphere_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let text = "schema = 1\nflavour = \"delsarte\"\n[structure]\nkind = \"sphere\"\ndimension = 2\ngrid = 20\ntruncation = 10\n[region]\nplus_cap = \"60deg\"\n";
    let cfg = write_config(dir.path(), "s.toml", text);
    let o = delsarte(&["solve", "--config", &cfg, "--arith", "exact"]);
    assert_eq!(o.status.code(), Some(2));
}
