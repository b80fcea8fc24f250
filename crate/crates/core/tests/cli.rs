use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ite"))
}

fn shipped(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(config: &Path, out: &Path, extra: &[&str]) -> Output {
    bin()
        .arg("run")
        .arg(config)
        .arg("--output-dir")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p
}

#[test]
fn shipped_config_writes_every_artifact() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let res = run(&shipped("disk_a05_n025.cfg"), &out, &["--lambda-max", "100", "--threads", "2"]);
    assert_eq!(res.status.code(), Some(0), "{}", String::from_utf8_lossy(&res.stderr));
    for f in ["spectra.csv", "ites.csv", "flow_events.csv", "bounds_report.csv", "summary.txt"] {
        let text = fs::read_to_string(out.join(f)).unwrap();
        assert!(text.starts_with("# ite "), "{f}");
        assert!(text.contains("# a = 0.5\n") && text.contains("# lambda_max = 100\n"), "{f}");
    }
    let ites = fs::read_to_string(out.join("ites.csv")).unwrap();
    let rows: Vec<&str> = ites.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "lambda,mode,multiplicity,source,n_t,n_t_positive");
    assert_eq!(rows[1], "0.00000000000000e0,0,1,both,1,0");
    assert!(rows[2].starts_with("2.34831056183"));
    // positive count below 100 from an independent scipy evaluation
    assert!(rows.last().unwrap().ends_with(",25,24"));
    let report = fs::read_to_string(out.join("bounds_report.csv")).unwrap();
    assert!(report.contains("main_inequality,holds,"));
    assert!(!report.contains("violated"));
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let cfg = shipped("annulus_a2_n3_r03.cfg");
    assert_eq!(run(&cfg, &a, &["--lambda-max", "50", "--threads", "1"]).status.code(), Some(0));
    assert_eq!(run(&cfg, &b, &["--lambda-max", "50", "--threads", "3"]).status.code(), Some(0));
    for f in ["spectra.csv", "ites.csv", "flow_events.csv", "bounds_report.csv", "summary.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn unit_anisotropy_fails_the_ellipticity_gate() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "a = 1\nn = 0.3\nlambda_max = 20\n");
    let res = run(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("Ellipticity"));
    let summary = fs::read_to_string(tmp.path().join("out/summary.txt")).unwrap();
    assert!(summary.contains("status: failed (exit 2)"));
}

#[test]
fn unit_product_fails_the_discreteness_gate() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "a = 2\nn = 0.5\nlambda_max = 20\n");
    let res = run(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("Discreteness"));
}

#[test]
fn malformed_config_reports_the_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "a = 0.5\n# fine\nn = zero\n");
    let res = run(&cfg, &tmp.path().join("out"), &[]);
    assert_eq!(res.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&res.stderr).contains("line 3"));
    let missing = bin().args(["run", "/nonexistent/x.cfg"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
    let three_d = write_config(tmp.path(), "a = 0.5\nn = 0.25\nd = 3\n");
    assert_eq!(run(&three_d, &tmp.path().join("out"), &[]).status.code(), Some(1));
}

#[test]
fn symbols_subcommand_rows() {
    let tmp = tempfile::tempdir().unwrap();
    let res = bin()
        .arg("symbols")
        .arg(shipped("boundary_samples.cfg"))
        .arg("--output-dir")
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(res.status.code(), Some(0));
    let text = fs::read_to_string(tmp.path().join("symbols.csv")).unwrap();
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[0].starts_with("1,") && rows[0].contains(",3,true,-1,-1,true,7.70000000000000e1"));
    assert!(rows[1].contains(",2,false,none,"));
    assert!(rows[2].contains(",2,true,+1,+1,"));
    assert!(rows[3].contains(",3,true,+1,+1,"));
    assert_eq!(String::from_utf8_lossy(&res.stdout).trim_end(), text.trim_end());
}
