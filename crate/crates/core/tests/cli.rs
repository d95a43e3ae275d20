use std::path::Path;
use std::process::{Command, Output};

fn dlpbound(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dlpbound")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn reps_lists_counts_and_norms() {
    let o = dlpbound(&["reps", "--d", "2", "--m", "4", "--format", "csv"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with("coords")).collect();
    assert_eq!(rows.len(), 6, "{text}");
    assert!(text.contains("normSq") && text.contains("orbitSize"), "{text}");
}

#[test]
fn solve_round_verify_chain() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("d3.sol");
    let cert = dir.path().join("d3.cert");
    let o = dlpbound(&["solve", "--d", "3", "--m", "6", "--r2", "9", "--out", path_str(&sol)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = dlpbound(&["round", "--in", path_str(&sol), "--scheme", "auto", "--out", path_str(&cert)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let o = dlpbound(&["verify", "--cert", path_str(&cert)]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("VERIFIED"));

    // A hand-broken certificate must exit non-zero.
    let text = std::fs::read_to_string(&cert).unwrap();
    let broken: String = text
        .lines()
        .map(|l| if l.starts_with("mu ") { format!("{} -1", l.rsplit_once(' ').unwrap().0) } else { l.to_string() })
        .collect::<Vec<_>>()
        .join("\n");
    std::fs::write(&cert, broken + "\n").unwrap();
    let o = dlpbound(&["verify", "--cert", path_str(&cert)]);
    assert!(!o.status.success());
}

#[test]
fn closed_form_d9() {
    let o = dlpbound(&["closed-form", "--d", "9"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn compare_reports_against_known_values() {
    let o = dlpbound(&["compare", "--d", "10", "--bound", "1/24"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("0.04166666"), "{}", stdout(&o));
}

#[test]
fn preset_explicit_passes_and_lists() {
    let o = dlpbound(&["preset", "d9-explicit"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = dlpbound(&["preset", "--list"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("d3-full"));
}

#[test]
fn long_presets_need_opt_in() {
    let o = dlpbound(&["preset", "d3-full"]);
    assert!(!o.status.success());
}

#[test]
fn bad_inputs_fail_cleanly() {
    let o = dlpbound(&["solve", "--d", "3", "--m", "6", "--r2", "2.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("positive integer"));
    let o = dlpbound(&["verify", "--cert", "/nonexistent/file.cert"]);
    assert!(!o.status.success());
    let o = dlpbound(&["preset", "no-such-preset"]);
    assert!(!o.status.success());
}
