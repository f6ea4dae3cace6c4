use std::process::Command;

use serde_json::Value;

fn schema() -> Value {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../../docs/report.schema.json");
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn report(args: &[&str]) -> Value {
    let out = Command::new(env!("CARGO_BIN_EXE_morpho")).arg("analyze").args(args).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn errors(validator: &jsonschema::Validator, instance: &Value) -> Vec<String> {
    validator.iter_errors(instance).map(|e| format!("{} at {}", e, e.instance_path)).collect()
}

#[test]
fn every_scenario_report_matches_the_schema() {
    let validator = jsonschema::validator_for(&schema()).unwrap();
    for s in ["A", "B", "C", "D", "E"] {
        let r = report(&["--scenario", s]);
        assert_eq!(errors(&validator, &r), Vec::<String>::new(), "scenario {s}");
        let r = report(&["--scenario", s, "--x1-range", "-0.5,0.5,2", "--t-steps", "9"]);
        assert!(r["full_body_conditions"].is_object());
        assert_eq!(errors(&validator, &r), Vec::<String>::new(), "scenario {s}, full body");
    }
}

#[test]
fn schema_rejects_altered_reports() {
    let validator = jsonschema::validator_for(&schema()).unwrap();
    let good = report(&["--scenario", "B", "--t-steps", "5"]);
    assert!(validator.is_valid(&good));

    let mut bad = good.clone();
    bad["verdicts"]["evolution"] = Value::from("aging");
    assert!(!validator.is_valid(&bad));

    let mut bad = good.clone();
    bad["nodes"][0]["flags"] = serde_json::json!(["unknown-flag"]);
    assert!(!validator.is_valid(&bad));

    let mut bad = good;
    bad.as_object_mut().unwrap().remove("provenance");
    assert!(!validator.is_valid(&bad));
}
