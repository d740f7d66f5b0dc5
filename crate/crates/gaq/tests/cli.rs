//! Command-line surface: exit codes and report determinism.

use std::collections::BTreeMap;
use std::process::Command;

fn gaq() -> Command {
    Command::new(env!("CARGO_BIN_EXE_gaq"))
}

#[test]
fn verify_passes_on_registry_group() {
    let out = gaq()
        .args(["verify", "heisenberg-weyl", "--hbar", "1"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn unknown_spec_is_a_usage_error() {
    let out = gaq().args(["verify", "su3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown registry name"), "{err}");
}

#[test]
fn non_integral_spin_is_rejected_with_exit_2() {
    let out = gaq().args(["su2-matrices", "--j", "0.3"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("non-negative integer"), "{err}");
}

#[test]
fn failed_math_check_exits_1() {
    // j = 0.3 breaks the cocycle single-valuedness check.
    let out = gaq()
        .args(["verify", "su2", "--j", "3/10", "--trials", "30"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("FAIL"), "{text}");
}

#[test]
fn anomaly_scan_reports_the_quarter() {
    let dir = std::env::temp_dir().join("gaq-scan-test.json");
    let out = gaq()
        .args([
            "anomaly-scan",
            "schrodinger-algebra",
            "--param",
            "k",
            "--json",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&dir).unwrap()).unwrap();
    let details = &json["checks"][0]["details"];
    assert_eq!(details["root[0]"], "1/4");
    let _ = std::fs::remove_file(&dir);
}

/// Two replay runs are byte-identical after stripping the timing fields.
#[test]
fn replay_reports_are_deterministic() {
    let run = |path: &std::path::Path| -> serde_json::Value {
        let out = gaq()
            .args(["replay-paper", "--seed", "7", "--json"])
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success());
        serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
    };
    let p1 = std::env::temp_dir().join("gaq-replay-1.json");
    let p2 = std::env::temp_dir().join("gaq-replay-2.json");
    let mut a = run(&p1);
    let mut b = run(&p2);
    strip_timings(&mut a);
    strip_timings(&mut b);
    let sa = serde_json::to_string(&a).unwrap();
    let sb = serde_json::to_string(&b).unwrap();
    assert_eq!(sa, sb);
    let _ = std::fs::remove_file(&p1);
    let _ = std::fs::remove_file(&p2);
}

fn strip_timings(v: &mut serde_json::Value) {
    if let Some(checks) = v.get_mut("checks").and_then(|c| c.as_array_mut()) {
        for c in checks {
            if let Some(obj) = c.as_object_mut() {
                obj.remove("elapsed_ms");
            }
        }
    }
}

#[test]
fn represent_emits_reduced_actions() {
    let out = gaq()
        .args(["represent", "heisenberg-weyl", "--polarization", "Pq"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("X^R_q"), "{text}");
    assert!(text.contains("X^R_p"), "{text}");
}

#[test]
fn polarize_flags_match_expectations() {
    let cases: BTreeMap<&str, bool> = [("L_a, L_p", true), ("L_q, L_p", false)]
        .into_iter()
        .collect();
    for (set, expect) in cases {
        let out = gaq()
            .args(["polarize", "heisenberg-weyl", "--set", set])
            .output()
            .unwrap();
        assert_eq!(
            out.status.success(),
            expect,
            "set {set}: {}",
            String::from_utf8_lossy(&out.stdout)
        );
    }
}
