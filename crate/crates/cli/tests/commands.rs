use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn ctxlab(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctxlab"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("LLM_API_KEY")
        .env_remove("EMBED_API_KEY")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn repo_file(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn prompt_file(dir: &Path) -> PathBuf {
    let p = dir.join("prompt.txt");
    let corpus = include_str!("data/prompts.txt");
    std::fs::write(&p, corpus.split("\n---\n").take(3).collect::<Vec<_>>().join("\n\n")).unwrap();
    p
}

fn boundaries(o: &Output) -> usize {
    let line = stdout(o).lines().find(|l| l.starts_with("boundaries: ")).unwrap().to_string();
    line.matches(',').count() + usize::from(line != "boundaries: []")
}

#[test]
fn analyze_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let prompt = prompt_file(dir.path());
    let out = dir.path().join("out");
    let o = ctxlab(&out, &["analyze", prompt.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["trace.csv", "segments.json", "candidates.json", "chart.svg"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
}

#[test]
fn higher_threshold_never_adds_boundaries() {
    let dir = tempfile::tempdir().unwrap();
    let prompt = prompt_file(dir.path());
    let out = dir.path().join("out");
    let low = ctxlab(&out, &["analyze", prompt.to_str().unwrap(), "--z", "2.0"]);
    let high = ctxlab(&out, &["analyze", prompt.to_str().unwrap(), "--z", "3.0"]);
    assert!(low.status.success() && high.status.success());
    assert!(boundaries(&high) <= boundaries(&low));
}

#[test]
fn remote_embedder_needs_its_key() {
    let dir = tempfile::tempdir().unwrap();
    let prompt = prompt_file(dir.path());
    let o = ctxlab(&dir.path().join("out"), &["analyze", prompt.to_str().unwrap(), "--embedder", "remote"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("EMBED_API_KEY"), "{}", stderr(&o));
}

#[test]
fn scripted_simulation_of_scene_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let script = repo_file("plans/scene1.jsonl");
    let o = ctxlab(&out, &["simulate", "1", "basic", "--script", script.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("result: success"), "{text}");
    assert!(text.contains("steps: 7"), "{text}");
    assert!(out.join("trial.json").is_file());
    assert_eq!(std::fs::read_dir(out.join("transcripts")).unwrap().count(), 1);
}

#[test]
fn unknown_scene_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = ctxlab(&dir.path().join("out"), &["simulate", "99", "basic"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown scene 99"));
}

#[test]
fn remote_session_needs_its_key() {
    let dir = tempfile::tempdir().unwrap();
    let o = ctxlab(&dir.path().join("out"), &["simulate", "1", "orn", "--session", "remote"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("LLM_API_KEY"), "{}", stderr(&o));
}

#[test]
fn bench_counts_trials_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = ctxlab(&out, &["bench", "--agents", "basic", "--scenes", "1-3", "--n", "5"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("trials: 15") && text.contains("rows: 3"), "{text}");
    for f in ["trials.csv", "results.csv", "tables.md"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
}

#[test]
fn same_seed_gives_identical_results() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str, extra: &[&str]| {
        let out = dir.path().join(name);
        let mut args = vec!["--seed", "9", "bench", "--agents", "basic,orn", "--scenes", "1,4", "--n", "3"];
        args.extend(extra);
        assert!(ctxlab(&out, &args).status.success());
        std::fs::read(out.join("results.csv")).unwrap()
    };
    let a = run("a", &[]);
    assert_eq!(a, run("b", &[]));
    assert_eq!(a, run("c", &["--sequential"]));
}

#[test]
fn published_ranking() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = repo_file("crates/bench/fixtures/published_tables.csv");
    let o = ctxlab(&dir.path().join("out"), &["bench", "--fixtures", fixture.to_str().unwrap(), "--rank-only"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("hardest five: 14, 3, 9, 12, 15"));
}

#[test]
fn export_writes_fifteen_scenes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = ctxlab(&out, &["export-scenes"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(std::fs::read_dir(out.join("scenes")).unwrap().count(), 15);
}

#[test]
fn bad_flag_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let o = ctxlab(&dir.path().join("out"), &["bench", "--nope"]);
    assert_eq!(o.status.code(), Some(1));
}
