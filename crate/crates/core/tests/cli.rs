use u3cert::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("u3cert").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn parse(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn unital_q8_has_513_points() {
    let (code, out, _) = call(&["unital", "--q", "8"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["n"], 513);
    assert_eq!(v["points"].as_array().unwrap().len(), 513);
}

#[test]
fn unital_emit_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u4.json");
    let (code, out, _) = call(&["unital", "--q", "4", "--emit", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    assert_eq!(parse(&std::fs::read_to_string(&path).unwrap())["n"], 65);
    assert!(dir.path().join("u4.json.meta.json").exists());
}

#[test]
fn certify_q4_prints_certificate() {
    let (code, out, _) = call(&["certify", "--q", "4"]);
    assert_eq!(code, 0);
    assert_eq!(parse(&out)["verdict"], "very-simple-certified");
}

#[test]
fn certify_stdout_is_deterministic() {
    let a = call(&["certify", "--q", "8", "--seed", "0"]);
    let b = call(&["certify", "--q", "8", "--seed", "0"]);
    assert_eq!(a.0, 0);
    assert_eq!(a, b);
}

#[test]
fn certify_out_writes_payload_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let (code, out, _) = call(&["certify", "--q", "4", "--out", path.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let (_, stdout_payload, _) = call(&["certify", "--q", "4"]);
    assert_eq!(std::fs::read_to_string(&path).unwrap(), stdout_payload);
    let meta = parse(&std::fs::read_to_string(dir.path().join("cert.json.meta.json")).unwrap());
    assert!(meta["elapsed_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn tampered_facts_exit_refuted() {
    let dir = tempfile::tempdir().unwrap();
    let facts = dir.path().join("facts.json");
    let text = include_str!("../data/facts_q4.json").replace("\"value\": 65", "\"value\": 64");
    std::fs::write(&facts, text).unwrap();
    let (code, out, _) = call(&["certify", "--q", "4", "--facts", facts.to_str().unwrap()]);
    assert_eq!(code, 1);
    let v = parse(&out);
    assert_eq!(v["verdict"], "refuted");
    assert_eq!(v["failed_check"], "check_very3_hyp1");
}

#[test]
fn malformed_facts_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let facts = dir.path().join("facts.json");
    std::fs::write(&facts, "{\"q\": 4}").unwrap();
    let (code, _, err) = call(&["certify", "--q", "4", "--facts", facts.to_str().unwrap()]);
    assert_eq!(code, 3);
    assert!(err.contains("facts"));
    let missing = dir.path().join("absent.json");
    assert_eq!(
        call(&["certify", "--q", "4", "--facts", missing.to_str().unwrap()]).0,
        3
    );
    // a q = 8 file for a q = 4 run
    let f8 = dir.path().join("f8.json");
    std::fs::write(&f8, include_str!("../data/facts_q8.json")).unwrap();
    assert_eq!(
        call(&["certify", "--q", "4", "--facts", f8.to_str().unwrap()]).0,
        3
    );
}

#[test]
fn input_errors_exit_3() {
    assert_eq!(call(&["certify", "--q", "5"]).0, 3);
    assert_eq!(call(&["certify", "--q", "16"]).0, 3);
    assert_eq!(call(&["meataxe", "--q", "16"]).0, 3);
    assert_eq!(call(&["unital", "--q", "32"]).0, 3);
    let (code, _, err) = call(&["certify", "--q", "4", "--frobnicate"]);
    assert_eq!(code, 3);
    assert!(err.contains("Usage"));
    assert_eq!(call(&[]).0, 3);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn group_and_traces_subcommands() {
    let (code, out, _) = call(&["group", "--q", "4", "--check-2transitive"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["order"]["computed_order"], 62400);
    assert_eq!(
        v["double_transitivity"]["stabilizer_orbit_sizes"],
        serde_json::json!([1, 64])
    );

    let (code, out, _) = call(&["traces", "--q", "8"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert_eq!(v["census"]["r"], 3);
    assert_eq!(v["escapes"].as_array().unwrap().len(), 6);
}

#[test]
fn meataxe_subcommand() {
    for module in ["qb", "st2"] {
        let (code, out, _) = call(&["meataxe", "--q", "4", "--module", module, "--seed", "2"]);
        assert_eq!(code, 0, "{module}");
        let v = parse(&out);
        assert_eq!(v["verdict"], "irreducible");
        assert_eq!(v["absolute"]["absolutely_irreducible"], true);
        assert_eq!(v["seed"], 2);
    }
}
