use std::fs;
use std::process::{Command, Output};

fn renvol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_renvol"))
        .args(args)
        .output()
        .expect("run renvol")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

/// Non-comment CSV lines.
fn csv_lines(text: &str) -> Vec<&str> {
    text.lines().filter(|l| !l.starts_with('#')).collect()
}

fn column(text: &str, name: &str) -> Vec<String> {
    let lines = csv_lines(text);
    let header: Vec<&str> = lines[0].split(',').collect();
    let i = header.iter().position(|h| *h == name).expect("column");
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    reader
        .records()
        .map(|r| r.unwrap().get(i).unwrap().to_string())
        .collect()
}

#[test]
fn volume_of_ads_model() {
    let out = renvol(&["volume", "--family", "ads", "--m", "2"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.starts_with("# renvol volume --family ads --m 2\n"));
    assert_eq!(csv_lines(&text)[0], "label,m,tau,lhs,rhs,rel_err,evals");
    assert_eq!(csv_lines(&text).len(), 2);
    let v: f64 = column(&text, "lhs")[0].parse().unwrap();
    assert!((v - 10.579_797_094_3).abs() < 1e-9, "{v}");
}

#[test]
fn compare_reports_curvature_witness() {
    let out = renvol(&["compare", "--family", "rn-ads", "--m", "4", "--c", "-1", "--model-m", "4"]);
    assert_eq!(code(&out), 1);
    let text = stdout(&out);
    assert_eq!(column(&text, "verdict"), ["hypothesis_failed"]);
    assert!(column(&text, "detail")[0].contains("scalar curvature below -6"));
    assert!(stderr(&out).contains("scalar curvature below -6"));
}

#[test]
fn compare_charged_profile_holds() {
    let out = renvol(&["compare", "--family", "rn-ads", "--m", "4", "--c", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = stdout(&out);
    assert_eq!(column(&text, "verdict"), ["holds"]);
    let margin: f64 = column(&text, "margin")[0].parse().unwrap();
    assert!(margin > 0.0);
}

#[test]
fn usage_errors_exit_2() {
    for args in [
        &["volume", "--m", "-1"][..],
        &["volume"],
        &["bogus"],
        &["sweep", "--m", "2,1"],
        &["sweep", "--m", "2:1:2"],
        &["ialpha", "--eps", "-1"],
        &["volume", "--profile", "1 + * s"],
        &["bounds", "--family", "hyperbolic"],
        &[],
    ] {
        let out = renvol(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
    }
}

#[test]
fn numerical_failure_exits_3() {
    let out = renvol(&["volume", "--profile", "1 + s^2 - s", "--delta", "0.1"]);
    assert_eq!(code(&out), 3);
    assert!(stderr(&out).contains("truncation radius"));
}

#[test]
fn rerun_is_byte_identical_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = ["sweep", "--m", "log:0.5:5:4", "--rel-tol", "1e-11"];
    for path in [&a, &b] {
        let mut full: Vec<&str> = args.to_vec();
        full.extend(["--output", path.to_str().unwrap()]);
        let out = renvol(&full);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    let first = fs::read(&a).unwrap();
    assert_eq!(first, fs::read(&b).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("# renvol sweep --m log:0.5:5:4 --rel-tol 1e-11\n"));
    assert_eq!(csv_lines(&text).len(), 5);

    let out = renvol(&["--from-csv", a.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));

    let tampered = text.replacen(",", ",9", 3);
    fs::write(&b, tampered).unwrap();
    let out = renvol(&["--from-csv", b.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(stderr(&out).contains("recorded"));
}

#[test]
fn single_sweep_row() {
    let out = renvol(&["sweep", "--m", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(csv_lines(&text), ["m,V,dV_prev", &format!("{},{},", "2.0000000000000000e0", column(&text, "V")[0])]);
}

#[test]
fn every_csv_subcommand_replays() {
    let dir = tempfile::tempdir().unwrap();
    let profile_file = dir.path().join("profiles.txt");
    fs::write(&profile_file, "# charged\nq = 1 + s^2 - m/s + k/s^2\nplain = 1 + s^2 - m/s\n").unwrap();
    let pf = profile_file.to_str().unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["volume", "--family", "rn-ads", "--m", "4", "--c", "1"],
        vec!["volume", "--family", "hyperbolic"],
        vec!["hawking", "--m", "2", "--s", "log:1:100:5"],
        vec!["bounds", "--family", "rn-ads", "--m", "4", "--c", "1", "--tau", "0:2:3"],
        vec!["iso-check", "--m", "1", "--tau", "0.5:4:3"],
        vec!["ialpha", "--alpha", "0:2:5"],
        vec!["ialpha", "--alpha", "1", "--eps", "1e-3", "--a-bar", "3.14"],
        vec!["lemma-aux", "--eps", "log:1e-4:1:5", "--threshold"],
        vec!["compare", "--m", "2", "--model-m", "1"],
        vec!["compare", "--profile-file", pf, "--profile-name", "q", "--param", "k=1", "--m", "4"],
        vec!["sweep", "--m", "1:4:4"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let path = dir.path().join(format!("{i}.csv"));
        let mut full = args.clone();
        full.extend(["--output", path.to_str().unwrap()]);
        let out = renvol(&full);
        assert_eq!(code(&out), 0, "{args:?}: {}", stderr(&out));
        let out = renvol(&["--from-csv", path.to_str().unwrap()]);
        assert_eq!(code(&out), 0, "{args:?} replay: {}", stderr(&out));
    }
}

#[test]
fn lemma_threshold_is_reported() {
    let out = renvol(&["lemma-aux", "--eps", "1", "--threshold"]);
    assert_eq!(code(&out), 0);
    let line = stderr(&out);
    let rho: f64 = line.trim().rsplit(' ').next().unwrap().parse().unwrap();
    assert!(rho > 1e-3 && rho < 1.0);
    let margin: f64 = column(&stdout(&out), "margin")[0].parse().unwrap();
    assert!(margin < 0.0);
}

#[test]
fn io_failure_exits_3() {
    let out = renvol(&["sweep", "--m", "1", "--output", "/nonexistent-dir/x.csv"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn verify_passes() {
    let out = renvol(&["verify"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 10);
    assert!(text.lines().all(|l| l.contains(" PASS ")));
}
