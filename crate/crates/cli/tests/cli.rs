use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn mct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mct")).args(args).env_remove("MCT_MAX_SEARCH").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn model_check_passes_on_trivial_structure() {
    let o = mct(&["model-check", path(&data("trivial_2x2.cat"))]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let s = stdout(&o);
    for ax in ["M1: ok", "M2: ok", "M3: ok", "M4: ok", "M5: ok"] {
        assert!(s.contains(ax), "{s}");
    }
    assert!(s.contains("0 violations"));
}

#[test]
fn model_check_reports_witness_with_exit_1() {
    let text = std::fs::read_to_string(data("trivial_2x2.cat")).unwrap();
    let broken = text.replace("class W = { id_bot,", "class W = { bot_a, id_bot,");
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("broken.cat");
    std::fs::write(&p, broken).unwrap();
    let o = mct(&["model-check", path(&p)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("M2: FAIL"), "{}", stdout(&o));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.cat");
    std::fs::write(&p, "category c\nobject x\nfrobnicate y\n").unwrap();
    let o = mct(&["validate", path(&p)]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
    assert_eq!(code(&mct(&["validate", "/nonexistent.cat"])), 2);
    assert_eq!(code(&mct(&["lift", path(&data("trivial_2x2.cat")), "bot_a", "nope"])), 2);
    assert_eq!(code(&mct(&["fixture", "nope"])), 2);
}

#[test]
fn non_category_is_a_math_failure_for_validate() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("nc.cat");
    // g . f is missing.
    std::fs::write(&p, "category c\nobject x\nobject y\nobject z\nmorphism f : x -> y\nmorphism g : y -> z\n").unwrap();
    let o = mct(&["validate", path(&p)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("violation"));
}

#[test]
fn lifting_and_obstruction() {
    let f = data("trivial_2x2.cat");
    assert_eq!(code(&mct(&["lift", path(&f), "bot_a", "a_top"])), 0);
    let p = data("chain2_mixed.cat");
    let o = mct(&["--out", "structured", "lift", path(&p), "0_1", "1_2"]);
    assert_eq!(code(&o), 0);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["lifts"], true);
    let o = mct(&["lift", path(&p), "1_2", "1_2"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("square u = id_1, v = id_2 has no diagonal"), "{}", stdout(&o));
}

#[test]
fn ho_cells_on_walking_homotopy() {
    let o = mct(&["ho", "cells", "f", "g", path(&data("wh.cat")), "--sigma", "Sigma"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.contains("1 class(es) of 2-cells f => g"), "{s}");
    assert!(s.contains("h=h"), "{s}");
}

#[test]
fn ho_model_mode_and_localization() {
    let f = data("trivial_2x2.cat");
    assert_eq!(code(&mct(&["ho", "build", path(&f)])), 0);
    let o = mct(&["ho", "check-localization", path(&f)]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert_eq!(code(&mct(&["ho", "check-localization", path(&f), "--target", "missing"])), 2);
    let o = mct(&["ho", "q", path(&f), "--show-equivalences"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("is an equivalence"));
    // WH fails M1, so model mode is refused while Sigma mode works.
    assert_eq!(code(&mct(&["ho", "build", path(&data("wh.cat"))])), 2);
}

#[test]
fn saved_presentation_round_trips_through_pi0() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("wh.2cat");
    let o = mct(&["ho", "build", path(&data("wh.cat")), "--sigma", "Sigma", "--save", path(&p)]);
    assert_eq!(code(&o), 0);
    let o = mct(&["pi0", path(&p), "--check"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let direct = mct(&["ho", "pi0", path(&data("wh.cat")), "--sigma", "Sigma"]);
    let body = |s: String| s.lines().skip(2).take(8).map(String::from).collect::<Vec<_>>();
    assert_eq!(body(stdout(&o)), body(stdout(&direct)));
}

#[test]
fn nerve_dot_is_the_one_skeleton_of_delta2() {
    let o = mct(&["sset", "nerve", path(&data("chain3.cat")), "--trunc", "2", "--out", "dot"]);
    assert_eq!(code(&o), 0);
    let s = stdout(&o);
    assert!(s.starts_with("// mct sset nerve"));
    assert!(s.contains("// seed 0"));
    for e in ["\"x\" -> \"y\"", "\"y\" -> \"z\"", "\"x\" -> \"z\""] {
        assert!(s.contains(e), "{s}");
    }
    assert_eq!(s.matches(" -> ").count(), 3);
}

#[test]
fn simplicial_commands() {
    let o = mct(&["sset", "sd", path(&data("boundary2.sset"))]);
    assert!(stdout(&o).contains("[6, 6]"));
    let o = mct(&["sset", "ex", path(&data("boundary2.sset")), "--n", "1"]);
    assert!(stdout(&o).contains("= 14"));
    assert_eq!(code(&mct(&["sset", "kan", path(&data("horn2_1.sset"))])), 1);
    assert_eq!(code(&mct(&["sset", "check", path(&data("boundary2.sset"))])), 0);
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("iso.cat");
    std::fs::write(&p, stdout(&mct(&["fixture", "walking_iso"]))).unwrap();
    // The nerve of a groupoid is Kan.
    let o = mct(&["sset", "kan", path(&p), "--nmax", "2"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
}

#[test]
fn chain_commands() {
    let o = mct(&["chain", "homology", path(&data("circle.chain"))]);
    assert!(stdout(&o).contains("H_1 = F_2^1"));
    let o = mct(&["--out", "structured", "chain", "classify", path(&data("disk_to_sphere.map"))]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["report"]["class"]["fibration"], true);
    assert_eq!(v["report"]["class"]["weak_equivalence"], false);
    assert_eq!(v["report"]["pullback"]["holds"], false);
    assert_eq!(code(&mct(&["chain", "factor", path(&data("disk_to_sphere.map"))])), 0);
}

#[test]
fn oracle_reports_are_reproducible() {
    let a = mct(&["chain", "oracle", "--samples", "50", "--seed", "11"]);
    let b = mct(&["chain", "oracle", "--samples", "50", "--seed", "11"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert!(stdout(&a).contains("# seed 11"));
    let c = mct(&["--out", "structured", "chain", "oracle", "--samples", "50", "--seed", "11"]);
    let v: serde_json::Value = serde_json::from_slice(&c.stdout).unwrap();
    assert_eq!(v["seed"], 11);
    assert_eq!(v["ok"], true);
}

#[test]
fn search_cap_from_environment() {
    let run = |cap: &str| {
        Command::new(env!("CARGO_BIN_EXE_mct"))
            .args(["sset", "ex", path(&data("boundary2.sset")), "--n", "2"])
            .env("MCT_MAX_SEARCH", cap)
            .output()
            .unwrap()
    };
    let o = run("10");
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("search limit"));
    assert_eq!(code(&run("lots")), 2);
}

#[test]
fn fixture_output_is_canonical() {
    for name in ["trivial_2x2", "wh", "chain3", "boundary2"] {
        let o = mct(&["fixture", name]);
        let body: String = stdout(&o).lines().skip(2).map(|l| format!("{l}\n")).collect();
        let ext = if name.starts_with("boundary") { "sset" } else { "cat" };
        let file = std::fs::read_to_string(data(&format!("{name}.{ext}"))).unwrap();
        assert_eq!(body, file, "{name}");
    }
}

#[test]
fn dot_unsupported_is_an_input_error() {
    assert_eq!(code(&mct(&["--out", "dot", "chain", "oracle", "--samples", "1"])), 2);
}
