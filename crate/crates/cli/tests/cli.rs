use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const BALL: &str = r#"{"inner": {"kind": "ball", "radius": 1.0},
    "outer": {"kind": "ball", "radius": 3.0},
    "sampling": {"count": 6}, "config": {"samples_per_cone": 64}}"#;
const CUBE: &str = r#"{"inner": {"kind": "polytope", "vertices": [[-1,-1,-1],[1,-1,-1],[-1,1,-1],[1,1,-1],
    [-1,-1,1],[1,-1,1],[-1,1,1],[1,1,1]]},
    "outer": {"kind": "ball", "radius": 4.0}, "sampling": {"count": 8}}"#;
const MISFIT: &str = r#"{"inner": {"kind": "ball", "radius": 2.0},
    "outer": {"kind": "ball", "radius": 1.0}}"#;

fn supcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_supcone"))
        .args(args)
        .output()
        .unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn verify_ball_exits_zero_and_writes_report() {
    let dir = TempDir::new().unwrap();
    let scene = write(&dir, "ball.json", BALL);
    let report = dir.path().join("report.json");
    let out = supcone(&[
        "verify",
        "--scene",
        &scene,
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(r["verdict"], "consistent_with_ball");
    assert_eq!(r["eta_samples"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_cube_exits_with_witness_code() {
    let dir = TempDir::new().unwrap();
    let scene = write(&dir, "cube.json", CUBE);
    let out = supcone(&["verify", "--scene", &scene]);
    assert_eq!(out.status.code(), Some(2));
    let r = stdout_json(&out);
    assert_eq!(r["verdict"], "non_congruence_witness");
    assert!(r["witness_pair"].is_array());
}

#[test]
fn invalid_scene_exits_three() {
    let dir = TempDir::new().unwrap();
    let scene = write(&dir, "misfit.json", MISFIT);
    let out = supcone(&["verify", "--scene", &scene]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("offending sample"));
    let scene = write(
        &dir,
        "unknown.json",
        r#"{"inner": {"kind": "torus"}, "outer": {"kind": "ball", "radius": 1}}"#,
    );
    assert_eq!(
        supcone(&["cone", "--scene", &scene, "--apex", "0"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(supcone(&["bogus"]).status.code(), Some(1));
    assert_eq!(
        supcone(&["frame-field", "--phi1", "0"]).status.code(),
        Some(1)
    );
    assert_eq!(
        supcone(&["frame-field", "--phi1", "0", "--phi2", "1", "--steps", "3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(supcone(&["--help"]).status.code(), Some(0));
}

#[test]
fn cone_emits_unit_rays() {
    let dir = TempDir::new().unwrap();
    let scene = write(&dir, "cube.json", CUBE);
    let out = supcone(&["cone", "--scene", &scene, "--apex", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let c = stdout_json(&out);
    assert_eq!(c["is_sampled"], false);
    for r in c["rays"].as_array().unwrap() {
        let n: f64 = r
            .as_array()
            .unwrap()
            .iter()
            .map(|x| x.as_f64().unwrap().powi(2))
            .sum();
        assert!((n - 1.0).abs() < 1e-12);
    }
    let out = supcone(&["cone", "--scene", &scene, "--apex", "99"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn match_writes_matrix_csv_and_witnesses() {
    let dir = TempDir::new().unwrap();
    let scene = write(&dir, "ball.json", BALL);
    let witnesses = dir.path().join("w.json");
    let out = supcone(&[
        "match",
        "--scene",
        &scene,
        "--format",
        "csv",
        "--witnesses",
        witnesses.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0], ",0,1,2,3,4,5");
    let w: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&witnesses).unwrap()).unwrap();
    assert_eq!(w["witnesses"].as_array().unwrap().len(), 15);

    let out = supcone(&["match", "--scene", &scene, "--pairs", "1,4"]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    assert!(r["distance"].as_f64().unwrap() < 1e-3);
    assert_eq!(r["congruent"], true);
    assert_eq!(
        supcone(&["match", "--scene", &scene, "--pairs", "1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn symmetry_of_ball_cone_is_right_circular() {
    let dir = TempDir::new().unwrap();
    let scene = write(&dir, "ball.json", BALL);
    let r = stdout_json(&supcone(&["symmetry", "--scene", &scene, "--apex", "2"]));
    assert_eq!(r["class"], "right_circular");
    assert_eq!(r["report"]["group_order"], "infinite");
    let h = r["report"]["half_angle"].as_f64().unwrap();
    assert!((h - (1.0f64 / 3.0).asin()).abs() < 1e-3);
}

#[test]
fn hairy_ball_reports_index_sum_two() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("idx.json");
    let run = supcone(&[
        "hairy-ball",
        "--level",
        "3",
        "--field",
        "rotational",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(run.status.code(), Some(0));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r["sum"], 2);
    // a zero sitting on the coarse mesh's vertex loop has no index
    let run = supcone(&["hairy-ball", "--level", "0", "--field", "rotational"]);
    assert_eq!(run.status.code(), Some(4));
}

#[test]
fn hairy_ball_reads_off_meshes() {
    let dir = TempDir::new().unwrap();
    let off = dir.path().join("oct.off");
    std::fs::write(
        &off,
        "OFF\n6 8 0\n1 0 0\n-1 0 0\n0 1 0\n0 -1 0\n0 0 1\n0 0 -1\n\
         3 0 2 4\n3 2 1 4\n3 1 3 4\n3 3 0 4\n3 2 0 5\n3 1 2 5\n3 3 1 5\n3 0 3 5\n",
    )
    .unwrap();
    // the octahedron's dual cells are coarse enough to need segment refinement
    for seed in ["0", "1", "2"] {
        let run = supcone(&[
            "hairy-ball",
            "--mesh",
            off.to_str().unwrap(),
            "--field",
            "poly",
            "--seed",
            seed,
        ]);
        assert_eq!(run.status.code(), Some(0));
        assert_eq!(stdout_json(&run)["sum"], 2, "seed {seed}");
    }
    let missing = dir.path().join("none.off");
    let run = supcone(&[
        "hairy-ball",
        "--mesh",
        missing.to_str().unwrap(),
        "--field",
        "poly",
    ]);
    assert_eq!(run.status.code(), Some(1));
}

#[test]
fn frame_field_limits_differ() {
    let out = supcone(&[
        "frame-field",
        "--phi1",
        "0",
        "--phi2",
        "1.5707963267948966",
        "--steps",
        "32",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let r = stdout_json(&out);
    let d = r["relative_distance"].as_f64().unwrap();
    assert!((d - 8f64.sqrt()).abs() < 1e-6, "{d}");
    assert_eq!(r["first"]["converged"], true);
    assert_eq!(r["second"]["converged"], true);
}

#[test]
fn seed_and_jobs_do_not_change_fibonacci_reports() {
    let dir = TempDir::new().unwrap();
    let scene = write(&dir, "cube.json", CUBE);
    let a = supcone(&["match", "--scene", &scene, "--jobs", "1"]);
    let b = supcone(&["match", "--scene", &scene, "--jobs", "2", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
    assert!(Path::new(env!("CARGO_BIN_EXE_supcone")).exists());
}
