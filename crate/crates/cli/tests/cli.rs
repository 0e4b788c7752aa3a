use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mulhecke(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mulhecke"))
        .args(args)
        .env_remove("MULHECKE_CONFIG")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn strings(v: &Value) -> Vec<String> {
    v.as_array().unwrap().iter().map(|x| x.as_str().unwrap().to_string()).collect()
}

#[test]
fn pd_trivial_and_rational_function() {
    let v = json_of(&mulhecke(&["pd", "--D", "1", "--terms", "4", "--json"]));
    assert_eq!(v["schema"], "1");
    assert_eq!(v["series"]["offset"], "0");
    assert_eq!(strings(&v["series"]["coeffs"]), ["1", "-1", "0", "0"]);
    // (1 - sqrt2 t + t^2) / (1 + sqrt2 t + t^2) = 1 - 2 sqrt2 t + 4 t^2 - 2 sqrt2 t^3 + ...
    let v = json_of(&mulhecke(&["pd", "--D", "8", "--terms", "4", "--json"]));
    assert_eq!(strings(&v["series"]["coeffs"]), ["1", "-2*sqrt(2)", "4", "-2*sqrt(2)"]);
    assert_eq!(mulhecke(&["pd", "--D", "8", "--terms", "3"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_2() {
    let out = mulhecke(&["pd", "--D", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a fundamental discriminant"));
    assert_eq!(mulhecke(&["pd", "--D", "8", "--prec", "32"]).status.code(), Some(2));
    assert_eq!(mulhecke(&["pd"]).status.code(), Some(2));
    assert_eq!(mulhecke(&["verify-paper", "--only", "nothing"]).status.code(), Some(2));
}

#[test]
fn expand_named_forms() {
    let v = json_of(&mulhecke(&["expand", "--form", "level9", "--D", "1", "--terms", "6", "--json"]));
    assert_eq!(v["h"], -1);
    assert_eq!(
        strings(&v["c"])[..3],
        ["-3/2 - 3/2*sqrt(-3)", "-3/2 + 3*sqrt(-3)", "9/2 + 1/2*sqrt(-3)"]
    );

    let v = json_of(&mulhecke(&[
        "expand",
        "--borcherds",
        "--D",
        "8",
        "--d",
        "3",
        "--N",
        "1",
        "--terms",
        "4",
        "--json",
    ]));
    assert_eq!(strings(&v["c"]), ["1707264", "4125992712192", "13288900691444361984"]);

    let dir = tempfile::tempdir().unwrap();
    let one = dir.path().join("one.json");
    std::fs::write(&one, r#"{"type":"constant","value":"1"}"#).unwrap();
    let v = json_of(&mulhecke(&[
        "expand",
        "--form",
        one.to_str().unwrap(),
        "--D",
        "5",
        "--terms",
        "8",
        "--json",
    ]));
    assert_eq!(v["h"], 0);
    assert!(strings(&v["c"]).iter().all(|c| c == "0"));
}

#[test]
fn reconstruct_inverts_expand() {
    let dir = tempfile::tempdir().unwrap();
    let out = mulhecke(&["expand", "--form", "j", "--D", "8", "--terms", "10", "--json"]);
    let pe = dir.path().join("pe.json");
    std::fs::write(&pe, &out.stdout).unwrap();
    let v = json_of(&mulhecke(&["reconstruct", "--input", pe.to_str().unwrap(), "--json"]));
    assert_eq!(v["series"]["offset"], "-1");
    assert_eq!(strings(&v["series"]["coeffs"])[..4], ["1", "744", "196884", "21493760"]);
}

#[test]
fn hecke_routes_agree() {
    let v = json_of(&mulhecke(&[
        "hecke", "--form", "level11", "--D", "8", "--N", "11", "--n", "3", "--route", "both", "--terms", "28", "--json",
    ]));
    assert_eq!(v["agree"], true);
    assert_eq!(strings(&v["exponents"]["c"])[..3], ["-9*sqrt(2)", "-288*sqrt(2)", "11742*sqrt(2)"]);
}

#[test]
fn trace_values_and_exit_codes() {
    let v = json_of(&mulhecke(&[
        "trace", "--D", "13", "--d", "36", "--N", "7", "--fn", "faber:1", "--json",
    ]));
    assert_eq!(v["recognized"], "8238");
    assert_eq!(v["D"], 13);
    let v = json_of(&mulhecke(&[
        "trace",
        "--D",
        "13",
        "--d",
        "4",
        "--N",
        "7",
        "--check-p",
        "3",
        "--json",
    ]));
    assert_eq!(v["recognized"], "8244");
    assert!(v["verdicts"].as_array().unwrap().iter().all(|x| x["status"] == "pass"));
    // four terms per point cannot reach the requested precision
    let out = mulhecke(&["trace", "--D", "13", "--d", "4", "--N", "7", "--terms", "4"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_paper_default_and_subset() {
    let out = mulhecke(&["verify-paper"]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{text}");
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 29);
    assert!(!text.contains("FAIL"));

    let v = json_of(&mulhecke(&["verify-paper", "--only", "traces", "--json"]));
    let checks = v["checks"].as_array().unwrap();
    assert!(!checks.is_empty());
    assert!(checks
        .iter()
        .all(|c| c["id"].as_str().unwrap().starts_with("traces.") && c["pass"] == true));
    assert!(checks.iter().all(|c| c.get("runtime_ms").is_none()));
    assert_eq!(v["failed"], 0);
}

fn classes_json(cache: &Path) -> Vec<u8> {
    let out = mulhecke(&[
        "classes",
        "--d",
        "468",
        "--N",
        "7",
        "--D",
        "13",
        "--cache-dir",
        cache.to_str().unwrap(),
        "--json",
    ]);
    assert!(out.status.success());
    out.stdout
}

#[test]
fn cache_is_transparent() {
    let dir = tempfile::tempdir().unwrap();
    let uncached = mulhecke(&["classes", "--d", "468", "--N", "7", "--D", "13", "--no-cache", "--json"]).stdout;
    let cold = classes_json(dir.path());
    let warm = classes_json(dir.path());
    assert_eq!(cold, uncached);
    assert_eq!(cold, warm);
    let entries: Vec<_> = std::fs::read_dir(dir.path().join("classes")).unwrap().collect();
    assert!(!entries.is_empty());
    for e in entries {
        std::fs::write(e.unwrap().path(), "garbage").unwrap();
    }
    assert_eq!(classes_json(dir.path()), cold);
    let out = mulhecke(&[
        "verify-paper",
        "--only",
        "classes",
        "--cache-dir",
        dir.path().to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["passed"], 4);
}

#[test]
fn output_is_deterministic() {
    let a = mulhecke(&["verify-paper", "--only", "properties", "--json"]).stdout;
    let b = mulhecke(&["verify-paper", "--only", "properties", "--json"]).stdout;
    assert_eq!(a, b);
    let a = mulhecke(&["trace", "--D", "13", "--d", "4", "--N", "7", "--json"]).stdout;
    let b = mulhecke(&["trace", "--D", "13", "--d", "4", "--N", "7", "--json"]).stdout;
    assert_eq!(a, b);
}

#[test]
fn config_file_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("run.conf");
    std::fs::write(&conf, "format = json\nterms = 5\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_mulhecke"))
        .args(["pd", "--D", "5"])
        .env("MULHECKE_CONFIG", &conf)
        .output()
        .unwrap();
    let v = json_of(&out);
    assert_eq!(v["T"], 5);
    // flags override the file
    let v = json_of(&mulhecke(&["pd", "--D", "5", "--config", conf.to_str().unwrap(), "--terms", "7"]));
    assert_eq!(v["T"], 7);
    // discriminant and level defaults
    std::fs::write(&conf, "discriminants = 13, 5\nlevel = 7\nformat = json\n").unwrap();
    let v = json_of(&mulhecke(&["trace", "--d", "4", "--config", conf.to_str().unwrap()]));
    assert_eq!(v["recognized"], "-6");
    assert_eq!(mulhecke(&["trace", "--d", "4"]).status.code(), Some(2));
    std::fs::write(&conf, "terms = many\n").unwrap();
    assert_eq!(
        mulhecke(&["pd", "--D", "5", "--config", conf.to_str().unwrap()]).status.code(),
        Some(2)
    );
}
