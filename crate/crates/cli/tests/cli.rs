use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn depth(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depth"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn artifacts(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv" || e == "json"))
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), fs::read(&p).unwrap()))
        .collect();
    files.sort();
    files
}

#[test]
fn analytic_inverse_k() {
    let tmp = tempfile::tempdir().unwrap();
    let o = depth(&["analytic", "--model", "gaussian_unit", "--point", "inverse-k"], tmp.path());
    assert!(o.status.success());
    let v = json(&tmp.path().join("analytic.json"));
    let value = v["report"]["value"].as_f64().unwrap();
    assert!((value - 0.0998).abs() < 1e-3, "{value}");
    assert!(tmp.path().join("resolved_config.toml").exists());
}

#[test]
fn empirical_rademacher_center_is_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["empirical", "--model", "rademacher", "--point", "zero", "--n", "3", "--K", "100", "--seeds", "200", "--seed", "1"];
    assert!(depth(&args, tmp.path()).status.success());
    let v = json(&tmp.path().join("empirical.json"));
    assert!(v["summary"]["fraction_zero"].as_f64().unwrap() >= 0.999);
    let csv = fs::read_to_string(tmp.path().join("empirical.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("seed,n,K,empirical_depth,zero_hit"));
    assert_eq!(csv.lines().count(), 201);
}

#[test]
fn config_errors_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let missing_seed = depth(&["empirical", "--model", "rademacher", "--point", "zero"], tmp.path());
    assert_eq!(missing_seed.status.code(), Some(2));
    assert_eq!(depth(&["simplicial"], tmp.path()).status.code(), Some(2));
    assert_eq!(depth(&["nonsense"], tmp.path()).status.code(), Some(2));
    assert_eq!(depth(&[], tmp.path()).status.code(), Some(2));
    assert_eq!(depth(&["analytic", "--model", "poisson"], tmp.path()).status.code(), Some(2));
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, "{\"kind\": \"bounds\"}").unwrap();
    assert_eq!(depth(&["plotdata", bad.to_str().unwrap()], tmp.path()).status.code(), Some(2));
}

#[test]
fn numeric_failures_exit_3() {
    let tmp = tempfile::tempdir().unwrap();
    // Cauchy coordinates have no variance, so no Markov witness exists.
    let o = depth(&["bounds", "--model", "cauchy", "--point", "ones"], tmp.path());
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn reruns_are_byte_identical() {
    let runs: [&[&str]; 3] = [
        &["empirical", "--model", "gaussian_unit", "--point", "inverse-k", "--n", "2", "--K", "200", "--seeds", "50", "--seed", "9", "--n-grid", "1,2"],
        &["simplicial", "--n", "4", "--kmax", "50", "--seeds", "30", "--mc-draws", "20000", "--seed", "4"],
        &["bounds", "--point", "ones", "--depths", "1,4,16"],
    ];
    for args in runs {
        let (x, y) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        assert!(depth(args, x.path()).status.success());
        let single = Command::new(env!("CARGO_BIN_EXE_depth"))
            .args(args)
            .arg("--out")
            .arg(y.path())
            .env("DEPTHLAB_THREADS", "1")
            .output()
            .unwrap();
        assert!(single.status.success());
        assert_eq!(artifacts(x.path()), artifacts(y.path()), "{args:?}");
    }
}

#[test]
fn resolved_config_reproduces_the_run() {
    let first = tempfile::tempdir().unwrap();
    let args = ["simplicial", "--n", "5", "--kmax", "20", "--seeds", "10", "--mc-draws", "5000", "--seed", "17"];
    assert!(depth(&args, first.path()).status.success());
    let resolved = first.path().join("resolved_config.toml");
    let text = fs::read_to_string(&resolved).unwrap();
    assert!(text.contains("budget = 10000000"), "{text}");

    let second = tempfile::tempdir().unwrap();
    let replay = depth(&["--config", resolved.to_str().unwrap()], second.path());
    assert!(replay.status.success(), "{}", String::from_utf8_lossy(&replay.stderr));
    assert_eq!(artifacts(first.path()), artifacts(second.path()));

    // Flags override file values.
    let third = tempfile::tempdir().unwrap();
    let o = depth(&["--config", resolved.to_str().unwrap(), "simplicial", "--seeds", "3"], third.path());
    assert!(o.status.success());
    let again = fs::read_to_string(third.path().join("resolved_config.toml")).unwrap();
    assert!(again.contains("seeds = 3") && again.contains("seed = 17"), "{again}");
}

#[test]
fn plotdata_collects_series() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(depth(&["bounds", "--point", "ones", "--depths", "1,2"], tmp.path()).status.success());
    let bounds = tmp.path().join("bounds.json");
    let out = tempfile::tempdir().unwrap();
    assert!(depth(&["plotdata", bounds.to_str().unwrap()], out.path()).status.success());
    let csv = fs::read_to_string(out.path().join("plotdata.csv")).unwrap();
    assert_eq!(csv, "series,x,y,stderr\nmarkov_bound,1,1,\nmarkov_bound,2,0.5,\n");
}
