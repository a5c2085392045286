use std::path::Path;
use std::process::{Command, Output};

fn qgamma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgamma"))
        .args(args)
        .env_remove("QGAMMA_PRECISION")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn value_line(o: &Output) -> String {
    stdout(o).lines().find_map(|l| l.strip_prefix("value   = ")).unwrap().to_string()
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(Result::unwrap).collect()
}

#[test]
fn eval_trivial_and_classical_values() {
    let o = qgamma(&["eval", "gamma_q", "z=1", "q=0.5"]);
    assert_eq!(code(&o), 0);
    assert!(value_line(&o).starts_with("1.0000000000000000000000000000000"));

    let o = qgamma(&["eval", "gamma", "z=0.5"]);
    assert!(value_line(&o).starts_with("1.77245385090551602729816748334114"));
    // 128 bits earn 36 printed digits
    assert_eq!(value_line(&o).chars().filter(char::is_ascii_digit).count(), 36);
    assert!(stdout(&o).contains("(heuristic)"));
}

#[test]
fn fast_product_matches_routed_product() {
    let fast = value_line(&qgamma(&["eval", "qq_inf_fast", "q=0.999"]));
    let slow = value_line(&qgamma(&["eval", "qpoch_inf", "a=0.999", "q=0.999"]));
    assert_eq!(fast[..30], slow[..30]);
    assert!(fast.ends_with("e-713"));
}

#[test]
fn eval_json_and_precision_sources() {
    let o = qgamma(&["eval", "eta", "tau=i", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["bound_kind"], "rigorous");
    assert!(v["value"].as_str().unwrap().starts_with("7.682254223260566590025941"));

    let env = |bits: &str, extra: &[&str]| {
        let mut args = vec!["eval", "gamma", "z=0.5"];
        args.extend_from_slice(extra);
        let o = Command::new(env!("CARGO_BIN_EXE_qgamma")).args(&args).env("QGAMMA_PRECISION", bits).output().unwrap();
        value_line(&o)
    };
    assert_eq!(env("64", &[]), "1.7724538509055160");
    assert_eq!(env("64", &["--precision", "96"]).len(), "1.7724538509055160272981675".len());
}

#[test]
fn usage_and_domain_errors() {
    assert_eq!(code(&qgamma(&["eval", "zeta", "s=2"])), 64);
    assert_eq!(code(&qgamma(&["eval", "gamma_q", "z=1"])), 64);
    assert_eq!(code(&qgamma(&["eval", "gamma_q", "z=1", "q=0.5", "w=3"])), 64);
    assert_eq!(code(&qgamma(&["eval", "gamma", "z=abc"])), 64);
    assert_eq!(code(&qgamma(&["verify", "nonsense"])), 64);
    assert_eq!(code(&qgamma(&["--frobnicate"])), 64);
    assert_eq!(code(&qgamma(&["--help"])), 0);
    let pole = qgamma(&["eval", "gamma", "z=-2"]);
    assert_eq!(code(&pole), 1);
    assert!(String::from_utf8_lossy(&pole.stderr).contains("pole"));
}

#[test]
fn verify_writes_reports_and_sets_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("eta.csv");
    let o = qgamma(&["verify", "eta_transform", "--format", "csv", "--out", csv_path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert!(text.starts_with("suite,group,inputs,residual,bound,status,note\n"));
    assert!(csv_rows(&text).iter().all(|r| &r[5] == "PASS"));

    let json_path = dir.path().join("eta.json");
    qgamma(&["verify", "eta_transform", "--format", "json", "--out", json_path.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["suite"], "eta_transform");
    assert_eq!(v["precision_bits"], 128);
    assert_eq!(v["summary"]["fail_count"], 0);

    // a decay fit over a single u and too few points cannot conclude anything
    let grid = dir.path().join("thin.grid");
    std::fs::write(&grid, "a_exp = 0.25\nn = 16\ndecay_u = 0\nprobe_n = 16\nprobe_u = 0\n").unwrap();
    let o = qgamma(&["verify", "thm23", "--grid", grid.to_str().unwrap()]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
}

fn run_to(args: &[&str], path: &Path) -> Vec<u8> {
    let mut full = args.to_vec();
    full.extend(["--out", path.to_str().unwrap()]);
    qgamma(&full);
    std::fs::read(path).unwrap()
}

#[test]
fn reports_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    for fmt in ["csv", "json"] {
        let args = ["verify", "reflection", "--format", fmt];
        let a = run_to(&args, &dir.path().join(format!("a.{fmt}")));
        let b = run_to(&args, &dir.path().join(format!("b.{fmt}")));
        let c = run_to(&["--sequential", "verify", "reflection", "--format", fmt], &dir.path().join(format!("c.{fmt}")));
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
}

#[test]
fn tables() {
    let o = qgamma(&["table", "thm24", "x=0", "k=6..14"]);
    assert_eq!(code(&o), 0);
    let rows = csv_rows(&stdout(&o));
    // both the direct and the reciprocal form
    assert_eq!(rows.len(), 18);
    let ratios: Vec<f64> = rows.iter().map(|r| r[7].parse().unwrap()).collect();
    assert!(ratios.iter().all(|&r| r > 0.0 && r < 0.05));

    let o = qgamma(&["table", "lemma2", "n=4,8,16,32,64", "a_exp=0.5", "gamma=1"]);
    let errs: Vec<f64> = csv_rows(&stdout(&o)).iter().map(|r| r[5].parse().unwrap()).collect();
    assert_eq!(errs.len(), 5);
    assert!(errs.windows(2).all(|w| w[1] < w[0]));

    let o = qgamma(&["table", "thm23", "n=16", "u=0..5:0.25", "side=left"]);
    let rows = csv_rows(&stdout(&o));
    assert_eq!(rows.len(), 21);
    let skipped: Vec<&str> = rows.iter().filter(|r| &r[9] == "SKIPPED").map(|r| r.get(3).unwrap()).collect();
    assert!(skipped.contains(&"0.25"), "{skipped:?}");
    assert!(rows.iter().filter(|r| &r[9] != "SKIPPED").all(|r| &r[9] == "OK"));

    assert_eq!(code(&qgamma(&["table", "thm24", "x=1.1", "k=6"])), 64);
    assert_eq!(code(&qgamma(&["table", "thm25"])), 64);
}

#[test]
fn bench_records() {
    let o = qgamma(&["bench", "--q", "0.5,0.999999", "--budget", "100000", "--repeats", "1"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    let recs = v["records"].as_array().unwrap();
    assert_eq!(recs.len(), 4);
    let find = |m: &str, q: &str| recs.iter().find(|r| r["method"] == m && r["q"] == q).unwrap();
    assert!(find("direct", "0.5")["result_digits_agreed"].as_u64().unwrap() >= 32);
    assert!(find("modular", "0.5")["result_digits_agreed"].as_u64().unwrap() >= 32);
    assert_eq!(find("direct", "0.999999")["status"], "SKIPPED");
    let m = find("modular", "0.999999");
    assert_eq!(m["status"], "OK");
    assert!(m["result_digits_agreed"].as_u64().unwrap() >= 32);
}
