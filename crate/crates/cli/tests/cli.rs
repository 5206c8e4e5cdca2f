use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarphi"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

/// Value of `column` in the first data row of the first CSV table.
fn csv_field(text: &str, column: &str) -> String {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    row[header.iter().position(|h| *h == column).unwrap()].to_string()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

#[test]
fn exact_euclidean_value() {
    let o = run(&["phi", "exact", "--dim", "3", "--p", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let phi: f64 = csv_field(&stdout(&o), "phi").parse().unwrap();
    assert!((phi - 3.0 / 25.0).abs() <= 1e-12 * 0.12);
}

#[test]
fn csv_and_json_carry_identical_numbers() {
    for args in [
        vec!["phi", "exact", "--dim", "5", "--p", "1.5"],
        vec!["f-eval", "--y1", "1", "--y2", "3", "--p", "inf"],
        vec!["revolution", "--profile", "cone", "--dim", "3"],
        vec![
            "phi",
            "mc",
            "--body",
            r#"{"type":"simplex","dim":2}"#,
            "--samples",
            "2000",
            "--seed",
            "0x2a",
        ],
    ] {
        let csv = run(&args);
        let mut with_json = vec!["--format", "json"];
        with_json.extend(&args);
        let js = json(&run(&with_json));
        let row = &js["tables"][0]["rows"][0];
        for column in ["phi", "f", "estimate", "stderr"] {
            if let Some(v) = row.get(column) {
                let text = csv_field(&stdout(&csv), column);
                assert_eq!(
                    text.parse::<f64>().unwrap(),
                    v.as_f64().unwrap(),
                    "{args:?} {column}"
                );
            }
        }
    }
}

#[test]
fn monte_carlo_is_reproducible() {
    let args = [
        "phi",
        "mc",
        "--body",
        r#"{"type":"pball","dim":3,"p":1.5}"#,
        "--samples",
        "5000",
        "--seed",
        "7",
    ];
    let (a, b) = (run(&args), run(&args));
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(stdout(&a), stdout(&b));
    let hex = run(&[
        "phi",
        "mc",
        "--body",
        r#"{"type":"pball","dim":3,"p":1.5}"#,
        "--samples",
        "5000",
        "--seed",
        "0x7",
    ]);
    assert_eq!(stdout(&a), stdout(&hex));
}

#[test]
fn body_from_file() {
    let path = std::env::temp_dir().join(format!("polarphi-body-{}.json", std::process::id()));
    std::fs::write(
        &path,
        r#"{"type":"product","p":1,"left":{"type":"interval"},"right":{"type":"interval"}}"#,
    )
    .unwrap();
    let o = run(&[
        "phi",
        "eval",
        "--body",
        path.to_str().unwrap(),
        "--method",
        "f",
    ]);
    std::fs::remove_file(&path).ok();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let phi: f64 = csv_field(&stdout(&o), "phi").parse().unwrap();
    let square: f64 = csv_field(
        &stdout(&run(&["phi", "exact", "--dim", "2", "--p", "inf"])),
        "phi",
    )
    .parse()
    .unwrap();
    assert!((phi - square).abs() <= 1e-12 * square);
}

#[test]
fn verification_suites_pass() {
    for args in [
        vec!["verify", "theorem"],
        vec!["verify", "harness"],
        vec!["verify", "inequalities"],
        vec![
            "revolution",
            "--profile",
            "pball:3",
            "--dim",
            "4",
            "--diagnostics",
        ],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(0), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn scan_locates_the_maximum() {
    let js = json(&run(&[
        "--format",
        "json",
        "scan",
        "--dim",
        "4",
        "--grid",
        "geom:1:8:9",
    ]));
    let argmax = js["tables"]
        .as_array()
        .unwrap()
        .iter()
        .find(|t| t["name"] == "argmax")
        .unwrap();
    assert_eq!(argmax["rows"][0]["argmax"], "2");
    assert_eq!(argmax["rows"][0]["passed"], true);
}

#[test]
fn invalid_input_exits_two() {
    for args in [
        vec!["phi", "exact", "--dim", "3", "--p", "0.5"],
        vec!["phi", "exact", "--dim", "0", "--p", "2"],
        vec!["phi", "exact", "--dim", "201", "--p", "2"],
        vec!["phi", "mc", "--body", r#"{"type":"pball","dim":11,"p":2}"#],
        vec!["phi", "eval", "--body", "{bad"],
        vec!["phi", "eval", "--body", r#"{"type":"cube","dim":2}"#],
        vec![
            "phi",
            "mc",
            "--body",
            r#"{"type":"simplex","dim":2}"#,
            "--seed",
            "zz",
        ],
        vec![
            "revolution",
            "--profile",
            r#"{"grid":[[-1,0.5],[0,1.2],[1,0.5]]}"#,
            "--dim",
            "3",
        ],
        vec!["phi", "exact", "--dim", "3"],
        vec!["--tol-exact", "-1", "verify", "theorem"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(stdout(&o).is_empty(), "{args:?}");
    }
    let o = run(&[
        "revolution",
        "--profile",
        r#"{"grid":[[-1,0.5],[0,1.2],[1,0.5]]}"#,
        "--dim",
        "3",
    ]);
    assert!(stderr(&o).starts_with("error[profile]:"));
    assert!(stderr(&o).contains("dividing every r by 1.2"));
}

#[test]
fn failed_verification_exits_one() {
    let o = run(&["--tol-fd", "1e-12", "verify", "harness"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error[verification]:"));
}

#[test]
fn numerical_failures_exit_three() {
    let o = run(&[
        "--tol-quadrature",
        "1e-300",
        "revolution",
        "--profile",
        "pball:1.5",
        "--dim",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error[non-convergence]:"));

    let mut body = r#"{"type":"interval"}"#.to_string();
    for _ in 0..7 {
        body = format!(r#"{{"type":"product","p":1,"left":{body},"right":{{"type":"interval"}}}}"#);
    }
    let o = run(&["phi", "mc", "--body", &body, "--samples", "100"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("error[envelope]:"));
}

#[test]
fn methods_lists_the_registry() {
    let text = stdout(&run(&["methods"]));
    for name in ["f", "moments", "revolution", "mc"] {
        assert!(
            text.lines().any(|l| l.starts_with(&format!("{name},"))),
            "{name}"
        );
    }
}
