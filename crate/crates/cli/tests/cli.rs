use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/fixtures").join(name)
}

fn mcr(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcr"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn path(p: &PathBuf) -> &str {
    p.to_str().unwrap()
}

#[test]
fn validate_accepts_fixtures() {
    for f in ["fig1.json", "fig2.json", "example2.json"] {
        let o = mcr(&["validate", path(&fixture(f))]);
        assert_eq!(code(&o), 0, "{f}: {}", stderr(&o));
    }
}

#[test]
fn validate_reports_violations_and_syntax_errors() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(fixture("fig2.json")).unwrap();

    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, text.replacen("\"to\": \"C\"", "\"to\": \"nowhere\"", 1)).unwrap();
    let o = mcr(&["validate", path(&broken)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("nowhere"), "{}", stderr(&o));

    let truncated = dir.path().join("truncated.json");
    std::fs::write(&truncated, &text[..text.len() / 2]).unwrap();
    let o = mcr(&["validate", path(&truncated)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("byte"), "{}", stderr(&o));
}

#[test]
fn solve_zerosum_exit_codes() {
    let o = mcr(&["solve-zerosum", path(&fixture("example2.json")), "--player", "1"]);
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    assert!(stdout(&o).contains("-inf"));

    let o = mcr(&["solve-zerosum", path(&fixture("fig1.json")), "--player", "P1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));

    let o = mcr(&["solve-zerosum", path(&fixture("fig1.json")), "--player", "P9"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn find_ne_on_fig2_reports_the_three_families() {
    let o = mcr(&["find-ne", path(&fixture("fig2.json"))]);
    assert_eq!(code(&o), 2);
    let err = stderr(&o);
    assert!(err.contains("(A B)^w"), "{err}");
    assert!(err.contains("play A B C"), "{err}");
    assert!(err.contains("play A B A C"), "{err}");
}

#[test]
fn find_ne_needs_turnify_for_concurrent_games() {
    let o = mcr(&["find-ne", path(&fixture("fig1.json"))]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("--turnify"));
    let o = mcr(&["find-ne", path(&fixture("fig1.json")), "--turnify"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("\"valid\": true"));
}

#[test]
fn check_ne_exit_codes() {
    let g = fixture("fig2.json");
    let o = mcr(&["check-ne", path(&g), "A,B,C"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("P2"));

    let dir = tempfile::tempdir().unwrap();
    let play = dir.path().join("play.json");
    std::fs::write(&play, r#"{"version": 1, "play": {"prefix": [], "cycle": ["A", "B"]}}"#).unwrap();
    let o = mcr(&["check-ne", path(&g), path(&play)]);
    assert_eq!(code(&o), 2, "{}", stderr(&o));

    let o = mcr(&["check-ne", path(&fixture("example2.json")), "v2"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn grid_schedule_ne_and_eval() {
    let inst = fixture("example31.json");
    let dir = tempfile::tempdir().unwrap();
    let sched = dir.path().join("schedule.json");

    let o = mcr(&["grid", "schedule", path(&inst), "--out", path(&sched)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stderr(&o).contains("E_min = 0"));
    assert!(stdout(&o).is_empty());
    assert!(std::fs::read_to_string(&sched).unwrap().contains("\"t2\""));

    let o = mcr(&["grid", "eval", path(&inst), path(&sched)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("imported_energy"));

    let o = mcr(&["grid", "ne", path(&inst)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(stdout(&o).contains("\"valid_without_penalty\": true"));
}

#[test]
fn grid_gen_is_seeded() {
    let a = mcr(&["grid", "gen", "--houses", "3", "--tasks", "2", "--seed", "5"]);
    let b = mcr(&["grid", "gen", "--houses", "3", "--tasks", "2", "--seed", "5"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("inst.json");
    std::fs::write(&f, &a.stdout).unwrap();
    let o = mcr(&["grid", "schedule", path(&f)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
}

#[test]
fn grid_bench_is_deterministic() {
    let args = ["grid", "bench", "--houses", "3", "--tasks", "3", "--cases", "6", "--seed", "11"];
    let run = |threads: &str| {
        let mut a = args.to_vec();
        a.extend(["--threads", threads]);
        let o = mcr(&a);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        o.stdout
    };
    let one = run("1");
    assert_eq!(one, run("8"));
    assert_eq!(run("8"), run("8"));
    let text = String::from_utf8(one).unwrap();
    assert!(text.starts_with("Houses,Tasks,Number of cases"), "{text}");
}

#[test]
fn missing_file_is_an_error() {
    let o = mcr(&["validate", "/nonexistent/game.json"]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).starts_with("error:"));
}
