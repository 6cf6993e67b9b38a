//! End-to-end runs of the binary and the library entry points.

use std::process::Command as Proc;

use flab::{run, Command, KernelSource, RunConfig};

fn flab(args: &[&str]) -> std::process::Output {
    Proc::new(env!("CARGO_BIN_EXE_flab"))
        .args(args)
        .env_remove("FLAB_SEED")
        .output()
        .expect("binary runs")
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let cfg = RunConfig::with_command(Command::Verify {
        suites: vec!["relative-addition".into(), "step-bound".into(), "preimage".into()],
        inject_bug: false,
    });
    assert_eq!(run(&cfg).unwrap().to_json(), run(&cfg).unwrap().to_json());

    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for out in [&a, &b] {
        let o = flab(&["gen", "--k", "Z/3", "--out", out.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        assert!(o.stdout.is_empty());
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn seed_selects_the_random_instances() {
    let base = RunConfig::with_command(Command::Verify {
        suites: vec!["relative-addition".into()],
        inject_bug: false,
    });
    let other = RunConfig { seed: 7, ..base.clone() };
    let (x, y) = (run(&base).unwrap(), run(&other).unwrap());
    assert!(x.all_passed() && y.all_passed());
    assert_ne!(x.to_json(), y.to_json());

    let o = Proc::new(env!("CARGO_BIN_EXE_flab"))
        .args(["verify", "--suite", "relative-addition"])
        .env("FLAB_SEED", "7")
        .output()
        .unwrap();
    assert_eq!(String::from_utf8(o.stdout).unwrap(), y.to_json());
}

#[test]
fn injected_bug_fails_with_a_witness() {
    let o = flab(&["verify", "--suite", "cocycle", "--inject-bug"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    let identity = v["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "cocycle/Z/4 identity")
        .unwrap();
    assert_eq!(identity["verdict"], "FAIL");
    let w = &identity["detail"]["witnesses"][0]["witness"];
    assert_ne!(w["lhs"], w["rhs"]);
}

#[test]
fn empty_suite_selection_gives_an_empty_report() {
    let o = flab(&["verify"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["checks"].as_array().unwrap().len(), 0);
}

#[test]
fn non_abelian_coefficients_are_rejected() {
    let o = flab(&["gen", "--k", "D4"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8(o.stderr).unwrap().contains("not abelian"));
}

#[test]
fn kernel_spec_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("k.json");
    std::fs::write(&path, r#"{"p": 3, "rank": 2, "coeffs": {"e": [[1]], "a": [[2]]}}"#).unwrap();
    let o = flab(&["kernel", "--spec", path.to_str().unwrap(), "--nmax", "1", "--format", "table"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let table = String::from_utf8(o.stdout).unwrap();
    assert!(table.contains("PASS         surjectivity"));
    assert!(table.contains("0 failed"));

    let zero = dir.path().join("zero.json");
    std::fs::write(&zero, r#"{"p": 2, "rank": 2, "coeffs": {}}"#).unwrap();
    let o = flab(&["kernel", "--spec", zero.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn identity_kernel_has_a_one_point_fiber() {
    let cfg = RunConfig::with_command(Command::Kernel {
        source: KernelSource::Preset {
            name: "delta".into(),
            p: 2,
        },
    });
    let r = run(&cfg).unwrap();
    assert!(r.all_passed());
    let rows = r.data["report"]["rows"].as_array().unwrap();
    assert!(rows.iter().all(|row| row["F"]["terms"].as_object().unwrap().is_empty()));
}

#[test]
fn compute_f_on_each_process_kind() {
    for spec in ["bernoulli:3", "group:D4:1,2", "kernel:two-term:2"] {
        let o = flab(&["compute-f", "--process", spec]);
        assert_eq!(o.status.code(), Some(0), "{spec}");
        let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert!(v["data"]["report"]["f"].is_object(), "{spec}");
    }
    let o = flab(&["compute-f", "--process", "torus:3"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn exact_fields_carry_no_floats() {
    let r = run(&RunConfig::default()).unwrap();
    let v = serde_json::to_value(&r).unwrap();
    fn walk(v: &serde_json::Value, seen: &mut usize) {
        match v {
            serde_json::Value::Object(m) => {
                if let (Some(t), Some(f)) = (m.get("terms"), m.get("float")) {
                    *seen += 1;
                    assert!(f.is_f64());
                    for c in t.as_object().unwrap().values() {
                        assert!(c.is_string(), "exact coefficient {c} is not a rational string");
                    }
                }
                m.values().for_each(|x| walk(x, seen));
            }
            serde_json::Value::Array(a) => a.iter().for_each(|x| walk(x, seen)),
            _ => {}
        }
    }
    let mut seen = 0;
    walk(&v, &mut seen);
    assert!(seen > 10);
}
