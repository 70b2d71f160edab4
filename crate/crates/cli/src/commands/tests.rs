use crate::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["betamatch"];
    argv.extend_from_slice(args);
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn match_prints_index() {
    let (c, o, _) = call(&["match", "--field", "tribonacci.json", "--alpha", "1/20", "--bound", "30"]);
    assert_eq!(c, 0);
    assert_eq!(o, "matched at 3\n");
}

#[test]
fn alpha_out_of_range_is_usage() {
    let (c, _, e) = call(&["match", "--field", "golden", "--alpha", "5/4"]);
    assert_eq!(c, 2);
    assert!(e.contains("AlphaOutOfRange"), "{e}");
}

#[test]
fn domain_errors_exit_one() {
    let (c, _, e) = call(&["quadratic", "--field", "tribonacci", "--alpha", "1/2"]);
    assert_eq!(c, 1);
    assert!(e.contains("NotPisotQuadratic"), "{e}");
    let (c, _, e) = call(&["predict", "--field", "golden", "--alpha", "1/2"]);
    assert_eq!(c, 0, "{e}");
    let (c, _, e) = call(&["predict", "--field", "silver", "--alpha", "1/2"]);
    assert_eq!(c, 1);
    assert!(e.contains("NotMultinacci"), "{e}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["frobnicate"]).0, 2);
    assert_eq!(call(&["match", "--field", "golden"]).0, 2);
    assert_eq!(call(&["match", "--field", "nowhere", "--alpha", "0"]).0, 2);
    assert_eq!(call(&["verify", "--only", "12"]).0, 2);
    let (c, _, e) = call(&["sweep", "--field", "golden", "--depth", "999"]);
    assert_eq!(c, 2);
    assert!(e.contains("DepthTooLarge"), "{e}");
}

#[test]
fn help_exits_zero() {
    let (c, o, _) = call(&["--help"]);
    assert_eq!(c, 0);
    assert!(o.contains("sweep"));
}

#[test]
fn markov_golden_two_cycle() {
    let (c, o, _) = call(&["markov", "--field", "golden", "--alpha", "[-3,2]"]);
    assert_eq!(c, 0);
    assert!(o.starts_with("finite orbits"), "{o}");
    assert!(o.contains("shared cycle yes"), "{o}");
    let (_, o, _) = call(&["match", "--field", "golden", "--alpha", "[-3,2]"]);
    assert_eq!(o, "matched at 2\n");
}

#[test]
fn orbit_json_shape() {
    let (c, o, _) = call(&["orbit", "--field", "golden", "--alpha", "1/3", "--steps", "5", "--differences"]);
    assert_eq!(c, 0);
    let v: serde_json::Value = serde_json::from_str(&o).unwrap();
    assert_eq!(v["plus"].as_array().unwrap().len(), 6);
    let step = &v["minus"][1];
    for key in ["n", "value_coeffs", "value_decimal", "digit", "side"] {
        assert!(step.get(key).is_some(), "{key}");
    }
    assert!(v["differences"].is_array());
}

#[test]
fn density_cells_cover_unit_interval() {
    let (c, o, _) = call(&["density", "--field", "golden", "--alpha", "1/5", "--truncation", "10"]);
    assert_eq!(c, 0);
    let lines: Vec<&str> = o.lines().collect();
    assert!(lines[0].starts_with("lo\thi"));
    assert!(lines[1].starts_with("0\t") || lines[1].starts_with("0.0"), "{}", lines[1]);
    assert!(lines.last().unwrap().split('\t').nth(1).unwrap().starts_with('1'));
}

#[test]
fn quadratic_with_word() {
    let (c, o, e) = call(&["quadratic", "--field", "x2-5x+3", "--alpha", "1/10", "--word", "0,1"]);
    assert_eq!(c, 0, "{e}");
    let v: serde_json::Value = serde_json::from_str(&o).unwrap();
    assert!(v["cylinder"].as_array().is_some_and(|a| !a.is_empty()));
    let (c, _, e) = call(&["quadratic", "--field", "x2-5x+3", "--alpha", "1/10", "--word", "7"]);
    assert_eq!(c, 1);
    assert!(e.contains("EmptyCylinder"), "{e}");
}

#[test]
fn predict_with_trace() {
    let (c, o, _) = call(&["predict", "--field", "tribonacci", "--alpha", "1/20", "--trace-depth", "10"]);
    assert_eq!(c, 0);
    assert!(o.starts_with("predicted matching at 3\n"), "{o}");
    assert!(o.contains("\"state\""));
}

#[test]
fn verify_subset() {
    let (c, o, _) = call(&["verify", "--only", "1,4"]);
    assert_eq!(c, 0, "{o}");
    assert_eq!(o.lines().filter(|l| l.starts_with("PASS")).count(), 2);
    assert!(o.ends_with("2/2 passed\n"));
}
