use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_anyangle"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn generate_then_solve_empty_map() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("empty.map");
    let out = run(&[
        "generate",
        "--kind",
        "empty",
        "--width",
        "50",
        "--height",
        "50",
        "-o",
        path(&map),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));

    let svg = dir.path().join("p.svg");
    let out = run(&[
        "solve",
        "--map",
        path(&map),
        "--start",
        "0,0",
        "--target",
        "50,50",
        "--svg",
        path(&svg),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["algorithm"], "fa_astar");
    assert_eq!(v["evaluated_nodes"], 2);
    assert_eq!(v["expansions"], 1);
    assert!(std::fs::read_to_string(&svg).unwrap().starts_with("<svg"));
}

#[test]
fn every_algorithm_solves_a_json_map() {
    let dir = tempfile::tempdir().unwrap();
    let map = dir.path().join("r.json");
    let out = run(&[
        "generate",
        "--kind",
        "random",
        "--width",
        "20",
        "--height",
        "20",
        "--density",
        "0.1",
        "--seed",
        "4",
        "-o",
        path(&map),
    ]);
    assert_eq!(code(&out), 0);
    for alg in ["astar_grid", "theta_star", "astar_visgraph", "fa_astar"] {
        let out = run(&[
            "solve",
            "--map",
            path(&map),
            "--start",
            "1,1",
            "--target",
            "18,17",
            "--algorithm",
            alg,
        ]);
        assert_eq!(
            code(&out),
            0,
            "{alg}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["algorithm"], alg);
    }
}

#[test]
fn bench_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        r#"{"maps":[{"kind":"random","width":20,"height":20,"densities":[0.1],"seeds":[1,2]}],
            "repetitions":1}"#,
    )
    .unwrap();
    let csv = dir.path().join("out.csv");
    let out = run(&["bench", path(&spec), "-o", path(&csv), "--threads", "2"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 2 * 4);
    let meta: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("out.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["preprocess_runs"], "2");

    let out = run(&["report", path(&csv)]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("best evaluations"));
    let out = run(&["report", path(&csv), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["maps"].as_array().unwrap().len(), 2);
}

#[test]
fn invalid_input_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.map");
    assert_eq!(
        code(&run(&[
            "solve",
            "--map",
            path(&missing),
            "--start",
            "0,0",
            "--target",
            "1,1"
        ])),
        1
    );
    assert_eq!(code(&run(&["solve", "--start", "zero"])), 1);
    assert_eq!(code(&run(&["frobnicate"])), 1);

    let map = dir.path().join("m.map");
    run(&[
        "generate",
        "--kind",
        "empty",
        "--width",
        "5",
        "--height",
        "5",
        "-o",
        path(&map),
    ]);
    assert_eq!(
        code(&run(&[
            "solve",
            "--map",
            path(&map),
            "--start",
            "0,0",
            "--target",
            "9,9"
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "solve",
            "--map",
            path(&map),
            "--start",
            "0,0",
            "--target",
            "5,5",
            "--w",
            "0.5"
        ])),
        1
    );

    let spec = dir.path().join("bad.json");
    std::fs::write(&spec, r#"{"maps":[],"repetitions":0}"#).unwrap();
    assert_eq!(
        code(&run(&[
            "bench",
            path(&spec),
            "-o",
            path(&dir.path().join("x.csv"))
        ])),
        1
    );
    assert_eq!(
        code(&run(&[
            "generate",
            "--kind",
            "random",
            "--width",
            "5",
            "--height",
            "5",
            "--density",
            "1.5",
            "-o",
            path(&map)
        ])),
        1
    );
}

#[test]
fn unwritable_output_is_internal_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "generate",
        "--kind",
        "empty",
        "--width",
        "5",
        "--height",
        "5",
        "-o",
        path(&dir.path().join("missing-dir").join("m.map")),
    ]);
    assert_eq!(code(&out), 2);
}

#[test]
fn help_exits_cleanly() {
    assert_eq!(code(&run(&["--help"])), 0);
}
