use std::process::Command;

fn robustctl(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_robustctl")).args(args).output().unwrap();
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

#[test]
fn run_writes_the_trajectory() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, stdout, _) = robustctl(&["run", "sip_robust_riccati", "--out", out, "--format", "json"]);
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("success"));
    let text = std::fs::read_to_string(dir.path().join("sip_robust_riccati.json")).unwrap();
    assert!(text.contains("\"terminal_event\": \"success\""));
}

#[test]
fn run_with_overrides_skips_the_outcome_check() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let (code, _, _) = robustctl(&["run", "sip_robust_riccati", "--out", out, "--set", "t_end=0.5"]);
    assert_eq!(code, 0);
    assert!(dir.path().join("sip_robust_riccati.csv").exists());
}

#[test]
fn bad_input_exits_with_one() {
    assert_eq!(robustctl(&["run", "no_such_scenario"]).0, 1);
    assert_eq!(robustctl(&["run", "sip_cbf", "--set", "dt=-1"]).0, 1);
    assert_eq!(robustctl(&["run", "sip_cbf", "--format", "png"]).0, 1);
}

#[test]
fn table_command_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t2.csv");
    let (code, _, _) = robustctl(&["table", "2", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_to_string(path).unwrap().lines().count(), 146);
}

#[test]
fn design_commands() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sip.txt");
    std::fs::write(&path, "# A\n0 1 0\n10 0 0\n0 0 0\n\n# B\n0\n-1\n1\n").unwrap();
    let (code, stdout, _) =
        robustctl(&["design", "pole-place", "--matrices", path.to_str().unwrap(), "--poles", "-4,-4,-4"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("-58.0") && stdout.contains("-18.4") && stdout.contains("-6.4"), "{stdout}");

    let (code, stdout, _) = robustctl(&["design", "robust-riccati"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("-170.1"), "{stdout}");

    let (code, _, _) = robustctl(&["design", "region-check", "--gain", "-110,-50,-10"]);
    assert_eq!(code, 0);
    let (code, _, stderr) = robustctl(&["design", "region-check", "--gain", "-58,-18.4,-6.4"]);
    assert_eq!(code, 2, "{stderr}");
}

#[test]
fn complex_poles_parse() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sip4.txt");
    std::fs::write(&path, "0 1 0 0\n10 0 0 0\n0 0 0 1\n0 0 0 0\n\n0\n-1\n0\n1\n").unwrap();
    let (code, stdout, stderr) = robustctl(&[
        "design", "pole-place", "--matrices", path.to_str().unwrap(), "--poles", "-4,-4+2i,-4-2i,-4",
    ]);
    assert_eq!(code, 0, "{stderr}");
    assert!(stdout.contains("K = ["));
}
