use std::process::{Command, Output};

fn sfvem(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sfvem")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn run_prints_csv_with_expected_rows() {
    let o = sfvem(&["run", "--method", "sf", "--k", "2", "--mesh", "uniform", "--levels", "1..3", "--no-timing"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], sfvem::experiment::CSV_HEADER);
    assert_eq!(lines.len(), 4);
    let last: Vec<&str> = lines[3].split(',').collect();
    assert_eq!(last[0], "3");
    let l2_order: f64 = last[3].parse().unwrap();
    assert!(l2_order > 2.5, "{l2_order}");
    // timing disabled leaves the last column empty
    assert!(lines[3].ends_with(','));
}

#[test]
fn output_without_timing_is_reproducible() {
    let args = ["run", "--method", "classic", "--k", "3", "--mesh", "irregular8", "--levels", "1..2", "--no-timing", "--kappa"];
    let a = stdout(&sfvem(&args));
    let b = stdout(&sfvem(&args));
    assert_eq!(a, b);
    assert!(a.lines().nth(1).unwrap().split(',').nth(6).unwrap().parse::<f64>().unwrap() > 1.0);
}

#[test]
fn config_file_and_flag_override() {
    let dir = std::env::temp_dir().join(format!("sfvem-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.cfg");
    let out = dir.join("out.csv");
    std::fs::write(&cfg, "# k=1 study\nmethod = sf-hct\nk = 1\nmesh = irregular8\nlevels = 1..2\n").unwrap();
    let o = sfvem(&["run", "--config", cfg.to_str().unwrap(), "--levels", "2..3", "--no-timing", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let levels: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(levels, ["2", "3"]);
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn invalid_input_exits_with_error() {
    for args in [
        vec!["run", "--method", "bogus"],
        vec!["run", "--k", "9"],
        vec!["run", "--levels", "3..1"],
        vec!["run", "--method", "enriched", "--k", "2", "--harmonic-degrees", "2"],
    ] {
        let o = sfvem(&args);
        assert!(!o.status.success(), "{args:?} should fail");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn mesh_export_lists_vertices_and_triangles() {
    let o = sfvem(&["mesh", "--family", "irregular8", "--level", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.starts_with("vertices 9 triangles 8"));
    assert_eq!(text.lines().count(), 1 + 9 + 8);
}

#[test]
fn verify_reports_all_checks_passing() {
    let o = sfvem(&["verify"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let text = stdout(&o);
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 8, "{text}");
    assert!(!text.contains("FAIL"));
}
