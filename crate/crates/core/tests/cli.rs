use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nonclassicality::cli::{
    distribution_json, parse_json_input, EXIT_ERROR, EXIT_NONCLASSICAL, EXIT_NO_VIOLATION,
};
use nonclassicality::generators::{
    cat_state, coherent, coherent_mixture, thermal, CatStateSpec, CoherentMixtureSpec,
};
use nonclassicality::{run_battery, TestConfig, WitnessReport};
use tempfile::TempDir;

fn ncheck(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncheck"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn schiller() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/schiller.json")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn schiller_fixture_is_flagged() {
    let out = ncheck(&["check", path_str(&schiller()), "--report", "json"]);
    assert_eq!(out.status.code(), Some(EXIT_NONCLASSICAL));
    let report: WitnessReport = serde_json::from_slice(&out.stdout).unwrap();
    let first = &report.test("first_order").unwrap().witnesses[0];
    assert_eq!(first.indices, vec![1, 2, 3]);
    assert!((first.lhs - 0.021).abs() < 1e-12);
    assert!((first.rhs - 0.0676).abs() < 1e-12);
}

#[test]
fn text_report_is_default() {
    let out = ncheck(&["check", path_str(&schiller())]);
    assert_eq!(out.status.code(), Some(EXIT_NONCLASSICAL));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("verdict: NONCLASSICAL"));
    assert!(text.contains("[1,2,3]"));
}

#[test]
fn json_report_round_trips_byte_identically() {
    let out = ncheck(&["check", path_str(&schiller()), "--report", "json"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let report: WitnessReport = serde_json::from_str(&text).unwrap();
    let again = serde_json::to_string_pretty(&report).unwrap() + "\n";
    assert_eq!(text, again);
}

#[test]
fn generated_thermal_is_quiet() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("thermal.json");
    let out = ncheck(&[
        "gen",
        "--state",
        "thermal",
        "--mean",
        "1.5",
        "--out",
        path_str(&file),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = ncheck(&["check", path_str(&file)]);
    assert_eq!(out.status.code(), Some(EXIT_NO_VIOLATION));
}

#[test]
fn malformed_inputs_exit_one() {
    let dir = TempDir::new().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{\"kind\": \"p\", \"values\": [0.5, 0.5,\n").unwrap();
    let out = ncheck(&["check", path_str(&bad)]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line"), "{err}");

    let negative = dir.path().join("neg.json");
    fs::write(&negative, r#"{"kind": "p", "values": [0.5, -0.5]}"#).unwrap();
    assert_eq!(
        ncheck(&["check", path_str(&negative)]).status.code(),
        Some(EXIT_ERROR)
    );

    assert_eq!(
        ncheck(&["check", "/nonexistent/file.json"]).status.code(),
        Some(EXIT_ERROR)
    );
    assert_eq!(ncheck(&["frobnicate"]).status.code(), Some(EXIT_ERROR));
    assert_eq!(
        ncheck(&["check", path_str(&schiller()), "--tests", "nope"])
            .status
            .code(),
        Some(EXIT_ERROR)
    );
    assert_eq!(
        ncheck(&["check", path_str(&schiller()), "--tol", "-1"])
            .status
            .code(),
        Some(EXIT_ERROR)
    );
}

#[test]
fn csv_input_needs_kind_and_reports_position() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("q.csv");
    fs::write(
        &csv,
        "n,q\n0,0.44\n1,0.07\n2,0.26\n3,0.30\n4,1.44\n5,3.60\n6,28.80\n",
    )
    .unwrap();
    assert_eq!(ncheck(&["check", path_str(&csv)]).status.code(), Some(EXIT_ERROR));
    assert_eq!(
        ncheck(&["check", path_str(&csv), "--kind", "q"]).status.code(),
        Some(EXIT_NONCLASSICAL)
    );

    let broken = dir.path().join("broken.csv");
    fs::write(&broken, "0,0.5\n1,x\n").unwrap();
    let out = ncheck(&["check", path_str(&broken), "--kind", "p"]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 2") && err.contains("field 2"), "{err}");
}

#[test]
fn gamma_input_uses_factorial_battery() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("g.json");
    fs::write(&file, r#"{"kind": "gamma", "values": [1, 1, 2, 3]}"#).unwrap();
    let out = ncheck(&["check", path_str(&file), "--report", "json"]);
    assert_eq!(out.status.code(), Some(EXIT_NONCLASSICAL));
    let report: WitnessReport = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = report.tests.iter().map(|t| t.name.as_str()).collect();
    assert_eq!(names, ["hankel_M", "hankel_M_shifted"]);
}

#[test]
fn test_selection_flag() {
    let out = ncheck(&[
        "check",
        path_str(&schiller()),
        "--tests",
        "zeros,oscillation-q",
        "--report",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(EXIT_NO_VIOLATION));
    let report: WitnessReport = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.tests.len(), 2);
}

#[test]
#[allow(clippy::approx_constant)]
fn gen_matches_library_windows() {
    let cases: Vec<(Vec<&str>, nonclassicality::PhotonDistribution)> = vec![
        (
            vec!["--state", "coherent", "--intensity", "10", "--nmax", "60"],
            coherent(10.0, 60).unwrap(),
        ),
        (
            vec!["--state", "mixture", "--spec", "fig1", "--nmax", "200"],
            coherent_mixture(&CoherentMixtureSpec::fig1(), 200).unwrap(),
        ),
        (
            vec![
                "--state",
                "cat",
                "--intensity",
                "4",
                "--theta",
                "1.0472",
                "--nmax",
                "40",
            ],
            cat_state(
                &CatStateSpec {
                    intensity: 4.0,
                    theta: 1.0472,
                },
                40,
            )
            .unwrap(),
        ),
        (
            vec!["--state", "thermal", "--mean", "0.7", "--nmax", "30"],
            thermal(0.7, 30).unwrap(),
        ),
    ];
    let dir = TempDir::new().unwrap();
    for (i, (flags, dist)) in cases.into_iter().enumerate() {
        let out = ncheck(&[&["gen"], flags.as_slice()].concat());
        assert_eq!(out.status.code(), Some(0));
        let text = String::from_utf8(out.stdout).unwrap();
        assert_eq!(text, distribution_json(&dist));
        let parsed = parse_json_input(&text).unwrap();
        assert_eq!(parsed.values, dist.values());

        // check(gen(X)) agrees with the in-library battery
        let file = dir.path().join(format!("{i}.json"));
        fs::write(&file, &text).unwrap();
        let out = ncheck(&["check", path_str(&file), "--report", "json"]);
        let report: WitnessReport = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(report, run_battery(&dist, &TestConfig::default()).unwrap());
    }
}

#[test]
fn gen_photon_added_and_fock() {
    let out = ncheck(&[
        "gen",
        "--state",
        "photon-added",
        "--base",
        "thermal",
        "--mean",
        "1",
        "--added",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let input = parse_json_input(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(&input.values[..2], &[0.0, 0.0]);

    let out = ncheck(&["gen", "--state", "fock", "--photons", "3", "--nmax", "5"]);
    let input = parse_json_input(std::str::from_utf8(&out.stdout).unwrap()).unwrap();
    assert_eq!(input.values, vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0]);

    let out = ncheck(&["gen", "--state", "cat", "--intensity", "4"]);
    assert_eq!(out.status.code(), Some(EXIT_ERROR));
}

#[test]
fn figure1_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(ncheck(&["figure1", path_str(&a)]).status.code(), Some(0));
    assert_eq!(ncheck(&["figure1", path_str(&b)]).status.code(), Some(0));
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());

    assert!(text.contains("lambda = [0.25, 0.25, 0.2, 0.18, 0.12]"));
    assert!(text.contains("|alpha|^2 = [10, 30, 60, 90, 130]"));
    let rows: Vec<(f64, f64)> = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[1].parse().unwrap(), f[2].parse().unwrap())
        })
        .collect();
    assert_eq!(rows.len(), 201);
    let maxima = |v: Vec<f64>| v.windows(3).filter(|w| w[1] > w[0] && w[1] > w[2]).count();
    assert!(maxima(rows.iter().map(|r| r.0).collect()) >= 2);
    assert_eq!(maxima(rows.iter().map(|r| r.1).collect()), 0);
}
