use bergman::cli::{parse_config_text, run};
use std::path::PathBuf;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("bergman").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field(text: &str, key: &str) -> f64 {
    let line = text.lines().find(|l| l.starts_with(&format!("{key} ="))).unwrap();
    line.split('=').nth(1).unwrap().trim().parse().unwrap()
}

#[test]
fn orbifold_eval_matches_the_formula() {
    let (code, out, _) = call(&["orbifold-eval", "--weights", "1/3", "--z", "1.0"]);
    assert_eq!(code, 0);
    assert!((field(&out, "rho") - 0.983601465812842293).abs() < 1e-13);
}

#[test]
fn subunity_reports_the_k0_witness() {
    let (code, out, _) = call(&["subunity", "--weights", "1/3"]);
    assert_eq!(code, 0);
    assert!((field(&out, "t2") - 2.0 / 3f64.sqrt()).abs() < 1e-10);
    assert!((field(&out, "rho") - 0.991333158980033742).abs() < 1e-12);
    assert!(out.contains("k = 0"));
}

#[test]
fn exit_codes() {
    assert_eq!(call(&["resonance", "--weights", "2/4"]).0, 2);
    assert_eq!(call(&["resonance", "--weights", "1/2"]).0, 2);
    assert_eq!(call(&["revolution", "--m", "0"]).0, 2);
    assert_eq!(call(&["revolution", "--profile", "csv", "--m", "3"]).0, 2);
    assert_eq!(call(&["no-such-command"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn revolution_csv_has_header_and_rows() {
    let (code, out, _) = call(&["revolution", "--m", "4", "--grid", "9"]);
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert!(lines.next().unwrap().starts_with("# bergman "));
    assert!(lines.next().unwrap().starts_with("# config: {\"command\":\"revolution\""));
    let rows: Vec<&str> = out.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows[0], "r,rho");
    assert_eq!(rows.len(), 10);
    for row in &rows[1..] {
        let v: f64 = row.split(',').nth(1).unwrap().parse().unwrap();
        assert!((v - 5.0).abs() < 1e-9);
    }
}

#[test]
fn config_round_trip_equals_flags() {
    let from_flags = call(&["revolution", "--profile", "cone", "--k", "10", "--m", "6", "--grid", "5"]);
    let dir = std::env::temp_dir().join(format!("bergman-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cfg.json");
    std::fs::write(&path, r#"{"command": "revolution", "profile": "cone", "k": 10, "m": 6, "grid": 5}"#).unwrap();
    let from_config = call(&["config", path.to_str().unwrap()]);
    assert_eq!(from_flags, from_config);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn config_errors_are_validation_errors() {
    assert!(parse_config_text("[1, 2]").is_err());
    assert!(parse_config_text(r#"{"m": 3}"#).is_err());
    assert!(parse_config_text(r#"{"command": "revolution", "m": 3, "colour": "red"}"#).is_err());
    assert!(parse_config_text(r#"{"command": "config", "path": "x.json"}"#).is_err());
    let cli = parse_config_text(r#"{"command": "cone-sweep", "ks": [10, 20], "ms": [25]}"#).unwrap();
    assert!(format!("{:?}", cli.command).contains("[10, 20]"));
    assert_eq!(call(&["config", "/nonexistent/cfg.json"]).0, 2);
}

#[test]
fn shipped_configs_parse() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(parse_config_text(&text).is_ok(), "{}", path.display());
    }
}

#[test]
fn output_file_gets_the_csv() {
    let dir = std::env::temp_dir().join(format!("bergman-out-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("ray.csv");
    let (code, out, _) =
        call(&["orbifold-ray", "--weights", "1/3", "--nodes", "50", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("wrote "));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().filter(|l| !l.starts_with('#')).count(), 52, "header plus 51 nodes");
    std::fs::remove_dir_all(&dir).unwrap();
}
