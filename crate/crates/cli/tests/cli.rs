//! End-to-end tests of the binary: exit-code contract, JSON documents,
//! determinism, and the DSL error surface.

use std::path::Path;
use std::process::{Command, Output};

fn charfol(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_charfol"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn exit_code_contract() {
    let dir = tempfile::tempdir().unwrap();
    // 0 = all checks pass
    let out = charfol(&["verify", "--n", "2", "--eps", "1/10"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(text.matches("[pass]").count(), 7, "7 ledger entries pass");

    // 2 = usage: the construction needs n > 1
    let out = charfol(&["verify", "--n", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("n > 1"), "message cites the hypothesis: {}", msg);

    // 2 = usage: decimal eps rejected
    let out = charfol(&["verify", "--eps", "0.1"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // 2 = usage: eps out of range
    let out = charfol(&["verify", "--eps", "1/2"], dir.path());
    assert_eq!(out.status.code(), Some(2));

    // 1 = mathematical failure via the mutation hook
    let out = charfol(&["verify", "--n", "2", "--mutate", "dtheta+1"], dir.path());
    assert_eq!(out.status.code(), Some(1));

    // 2 = clap-level usage error
    let out = charfol(&["no-such-command"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn ledger_json_is_deterministic_and_carries_the_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = charfol(
        &["verify", "--eps", "1/10", "--json", "ledger1.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let out = charfol(
        &["verify", "--eps", "1/10", "--json", "ledger2.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let a = std::fs::read(dir.path().join("ledger1.json")).unwrap();
    let b = std::fs::read(dir.path().join("ledger2.json")).unwrap();
    assert_eq!(a, b, "byte-identical ledgers across runs");

    let doc: serde_json::Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(doc["schema"], 1);
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 7);
    for e in entries {
        for key in ["name", "paper_anchor", "status", "residual_terms", "certificate"] {
            assert!(e.get(key).is_some(), "ledger entry key {}", key);
        }
        assert_eq!(e["status"], "pass");
    }
}

#[test]
fn singular_rows_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = charfol(
        &["singular", "--eps", "1/10", "--json", "sing.json"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    // deterministic across runs
    let out2 = charfol(
        &["singular", "--eps", "1/10", "--json", "sing2.json"],
        dir.path(),
    );
    assert_eq!(out2.status.code(), Some(0));
    assert_eq!(
        std::fs::read(dir.path().join("sing.json")).unwrap(),
        std::fs::read(dir.path().join("sing2.json")).unwrap()
    );
    let text = String::from_utf8_lossy(&out.stdout);
    // the hyperbolic row displays the separatrix parameter value
    assert!(text.contains("1.86332496"), "{}", text);
    assert!(text.contains("saddle"));
    assert!(text.contains("S+") && text.contains("S-"));

    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("sing.json")).unwrap()).unwrap();
    assert_eq!(doc["schema"], 1);
    let points = doc["points"].as_array().unwrap();
    assert_eq!(points.len(), 5);
    let kinds: Vec<&str> = points
        .iter()
        .map(|p| p["kind"].as_str().unwrap())
        .collect();
    assert_eq!(kinds, ["source", "sink", "saddle", "source", "sink"]);
    // sign tags sit on the tangency rows
    assert_eq!(points[0]["sign"], "S+");
    assert_eq!(points[4]["sign"], "S-");
    assert_eq!(points[2]["index"], -1);
}

#[test]
fn tb_model_mode_and_records_mode() {
    let dir = tempfile::tempdir().unwrap();
    let out = charfol(&["tb", "--eps", "1/10", "--json", "tb.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("VIOLATED: 1 > 0"), "{}", text);
    assert!(text.contains("-<e> = 0 > -chi = -2"));
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("tb.json")).unwrap()).unwrap();
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["sum_minus"], 1);
    assert_eq!(doc["sum_plus"], 1);
    assert_eq!(doc["euler_rel"], 0);
    assert_eq!(doc["chi"], 2);
    assert_eq!(doc["verdict"], "violated");

    // a single negative saddle keeps the inequality
    let out = charfol(
        &[
            "tb",
            "--records",
            r#"[{"sign":"-","index":-1,"kind":"saddle"}]"#,
            "--chi",
            "0",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("holds"));
}

#[test]
fn portrait_svg_contents() {
    let dir = tempfile::tempdir().unwrap();
    let out = charfol(
        &[
            "portrait",
            "--eps",
            "1/10",
            "--out",
            "p.svg",
            "--json",
            "p.json",
            "--leaves",
            "12",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let svg = std::fs::read_to_string(dir.path().join("p.svg")).unwrap();
    assert_eq!(svg.matches("class=\"singular\"").count(), 5);
    assert_eq!(svg.matches("class=\"separatrix\"").count(), 1);
    assert!(svg.matches("class=\"leaf\"").count() >= 12);
    assert!(svg.contains("class=\"boundary\""));
    assert!(svg.contains("class=\"inset\""));
    assert!(svg.starts_with("<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\""));

    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("p.json")).unwrap()).unwrap();
    assert_eq!(doc["schema"], 1);
    assert!(doc["max_leaf_residual"].as_f64().unwrap() < 1e-6);
    assert!((doc["c_sep"].as_f64().unwrap() - 1.86332495807108).abs() < 1e-12);

    // the separatrix self-intersects at (r0, 0) in this chart: its sampled
    // vertices come arbitrarily close to that point
    let r0 = 0.8765486415279303;
    let samples = doc["separatrix_samples"].as_array().unwrap();
    let min_dist = samples
        .iter()
        .map(|p| {
            let r = p[0].as_f64().unwrap();
            let z = p[1].as_f64().unwrap();
            ((r - r0).powi(2) + z * z).sqrt()
        })
        .fold(f64::INFINITY, f64::min);
    assert!(min_dist < 5e-3, "separatrix near (r0, 0): {}", min_dist);
}

#[test]
fn engine_mode_surface() {
    let dir = tempfile::tempdir().unwrap();
    // the hand-solved radial example
    let out = charfol(
        &[
            "engine",
            "--beta",
            "dz + x1*dy1 - y1*dx1",
            "--f",
            "z",
            "--coords",
            "z,x1,y1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("(1/2*x1)*d/dx1 + (1/2*y1)*d/dy1"), "{}", text);

    // malformed DSL reports line/column and exits 2
    let out = charfol(
        &[
            "engine",
            "--beta",
            "dz + ",
            "--f",
            "z",
            "--coords",
            "z,x1,y1",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("parse error at 1:"), "{}", msg);

    // non-contact input exits 1
    let out = charfol(
        &["engine", "--beta", "dz", "--f", "z", "--coords", "z,x1,y1"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));

    // the construction's own data through the engine: proportional field,
    // dynamics pipeline reports the violated count
    let out = charfol(
        &[
            "engine",
            "--beta",
            "(2*r^2-1)*dz + r^2*(r^2-1)*dth + x1*dy1 - y1*dx1",
            "--f",
            "r^2 + e^-2*(z^2 + x1^2 + y1^2) - 1 - e",
            "--eps",
            "1/10",
            "--dynamics",
            "--json",
            "engine.json",
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{:?}", out);
    let doc: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("engine.json")).unwrap()).unwrap();
    assert_eq!(doc["membership"]["beta_x_zero"], true);
    assert_eq!(doc["dynamics"]["verdict"], "violated");
    assert_eq!(doc["dynamics"]["points"].as_array().unwrap().len(), 5);
}

#[test]
fn precision_env_override() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_charfol"))
        .args(["verify", "--eps", "1/10"])
        .env("CHARFOL_PRECISION", "40")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("precision = 40 digits"), "{}", text);
}
