//! `ctxlab` command surface: prompt analysis, single episodes, trial
//! matrices and scene export.

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use agents::{run_episode, AgentConfig, AgentKind, PlanFollower};
use bench::{
    aggregate_all, emit_tables, follower_factory, hardest, rank_difficulty, read_rows, run_matrix,
    write_records_csv, MatrixConfig, MetricsRow, SceneDifficulty, TerminalCause,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use context_core::{RemoteChatConfig, RemoteChatSession, ScriptedSession, SessionError, SessionFunction};
use embedding::{EmbedError, EmbedderConfig, EmbedderKind, DEFAULT_SEED};
use monkey_sim::{builtin_scene, builtin_scenes, export_scenes, Scene};
use semantic_dynamics::{
    emit_report, parameter_candidates, segment, tokenize, trace_with, CandidateThresholds, PeakPolicy, PrefixCache,
    SdaError, WordPunctTokenizer,
};

#[derive(Debug, Parser)]
#[command(name = "ctxlab", version, about = "Context-pattern workbench")]
pub struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Seed for simulation streams (and the offline embedder when given).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for trial matrices; 0 uses every core.
    #[arg(long, global = true, default_value_t = 0)]
    pub workers: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Trace, segment and report on a prompt file.
    Analyze(AnalyzeArgs),
    /// Run one episode of an agent on a scene.
    Simulate(SimulateArgs),
    /// Run a trial matrix, or rank published values.
    Bench(BenchArgs),
    /// Write the built-in scenes as JSON.
    ExportScenes,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmbedderChoice {
    Offline,
    Remote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SessionChoice {
    /// Replies from `--script`, or the scene's optimal plan without one.
    Scripted,
    Remote,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    pub prompt: PathBuf,
    #[arg(long, value_enum, default_value = "offline")]
    pub embedder: EmbedderChoice,
    #[arg(long, default_value_t = 2.0)]
    pub z: f64,
    #[arg(long, default_value_t = 5)]
    pub min_gap: usize,
    #[arg(long, default_value_t = 90.0)]
    pub semantics_percentile: f64,
    #[arg(long, default_value_t = 90.0)]
    pub drift_percentile: f64,
    /// Embed prefixes on the calling thread.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub scene: u32,
    pub agent: String,
    #[arg(long, value_enum, default_value = "scripted")]
    pub session: SessionChoice,
    /// JSON Lines file of `{"reply": ...}` objects.
    #[arg(long)]
    pub script: Option<PathBuf>,
    #[arg(long, default_value_t = agents::DEFAULT_MAX_REPROMPTS)]
    pub max_reprompts: u32,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Comma-separated agent kinds or `all`.
    #[arg(long, default_value = "all")]
    pub agents: String,
    /// Scene ids and ranges such as `1-3,7`, or `all`.
    #[arg(long, default_value = "all")]
    pub scenes: String,
    /// Trials per (agent, scene) cell.
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    #[arg(long, value_enum, default_value = "scripted")]
    pub session: SessionChoice,
    /// Per-cell rows to use instead of running trials.
    #[arg(long)]
    pub fixtures: Option<PathBuf>,
    /// Print the difficulty ranking only.
    #[arg(long)]
    pub rank_only: bool,
    /// Write one transcript per trial.
    #[arg(long)]
    pub transcripts: bool,
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

fn embed_error(e: EmbedError) -> CliError {
    match e {
        EmbedError::MissingEnv(_) | EmbedError::Config(_) => CliError::Config(e.to_string()),
        e => runtime(e),
    }
}

fn sda_error(e: SdaError) -> CliError {
    match e {
        SdaError::Embed(e) | SdaError::Embedding { source: e, .. } => embed_error(e),
        SdaError::InvalidParameter(_) => CliError::Config(e.to_string()),
        e => runtime(e),
    }
}

fn session_error(e: SessionError) -> CliError {
    match e {
        SessionError::Config(_) | SessionError::MissingEnv(_) => CliError::Config(e.to_string()),
        e => runtime(e),
    }
}

/// Parses `1-3,7`, `all` or a single id.
pub fn parse_scene_selector(s: &str) -> Result<Vec<u32>, CliError> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(builtin_scenes().iter().map(|s| s.id).collect());
    }
    let bad = || CliError::Config(format!("invalid scene selector `{s}`"));
    let mut ids = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        match part.split_once('-') {
            Some((a, b)) => {
                let (a, b): (u32, u32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
                if a > b {
                    return Err(bad());
                }
                ids.extend(a..=b);
            }
            None => ids.push(part.parse().map_err(|_| bad())?),
        }
    }
    if ids.is_empty() {
        return Err(bad());
    }
    ids.dedup();
    Ok(ids)
}

pub fn parse_agent_selector(s: &str) -> Result<Vec<AgentKind>, CliError> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(AgentKind::ALL.to_vec());
    }
    s.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| p.parse().map_err(|e: agents::UnknownKind| CliError::Config(e.to_string())))
        .collect()
}

fn load_scene(id: u32) -> Result<Scene, CliError> {
    builtin_scene(id).map_err(|_| CliError::Config(format!("unknown scene {id} (expected 1-15)")))
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Analyze(a) => analyze(cli, a),
        Command::Simulate(a) => simulate(cli, a),
        Command::Bench(a) => run_bench(cli, a),
        Command::ExportScenes => {
            let paths = export_scenes(&cli.out.join("scenes")).map_err(runtime)?;
            println!("wrote {} scenes to {}", paths.len(), cli.out.join("scenes").display());
            Ok(())
        }
    }
}

fn analyze(cli: &Cli, a: &AnalyzeArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&a.prompt).map_err(|e| CliError::Config(format!("{}: {e}", a.prompt.display())))?;
    let kind = match a.embedder {
        EmbedderChoice::Offline => EmbedderKind::Offline,
        EmbedderChoice::Remote => EmbedderKind::Remote,
    };
    let config = EmbedderConfig { kind, seed: cli.seed.unwrap_or(DEFAULT_SEED), ..EmbedderConfig::default() };
    let embedder = config.build().map_err(embed_error)?;
    let policy = PeakPolicy { z: a.z, min_gap: a.min_gap };
    let thresholds = CandidateThresholds { semantics_percentile: a.semantics_percentile, drift_percentile: a.drift_percentile };
    let exec = if a.sequential { semantic_dynamics::Execution::Sequential } else { semantic_dynamics::Execution::Parallel };
    let tokens = tokenize(&text, &WordPunctTokenizer).map_err(sda_error)?;
    let trace = trace_with(&tokens, &embedder, exec, &mut PrefixCache::new()).map_err(sda_error)?;
    let seg = segment(&trace, policy).map_err(sda_error)?;
    let candidates = parameter_candidates(&trace, &seg, thresholds).map_err(sda_error)?;
    let paths = emit_report(&tokens, &trace, &seg, &candidates, &cli.out).map_err(sda_error)?;
    println!("tokens: {}", trace.len());
    println!("segments: {}", seg.segments.len());
    println!("boundaries: {:?}", seg.boundaries);
    println!("candidates: {}", candidates.len());
    for p in [&paths.trace_csv, &paths.segments_json, &paths.candidates_json, &paths.chart_svg] {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<(), CliError> {
    let scene = load_scene(a.scene)?;
    let kind: AgentKind = a.agent.parse().map_err(|e: agents::UnknownKind| CliError::Config(e.to_string()))?;
    let seed = cli.seed.unwrap_or(0);
    let mut session: Box<dyn SessionFunction> = match (a.session, &a.script) {
        (SessionChoice::Scripted, Some(path)) => {
            let f = fs::File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Box::new(ScriptedSession::from_jsonl(BufReader::new(f)).map_err(session_error)?)
        }
        (SessionChoice::Scripted, None) => Box::new(PlanFollower::for_scene(&scene).map_err(session_error)?),
        (SessionChoice::Remote, _) => Box::new(remote_session()?),
    };
    let mut config = AgentConfig::new(kind);
    config.max_reprompts = a.max_reprompts;
    let mut outcome = run_episode(&config, &scene, seed, &mut session);
    outcome.write_transcript(&cli.out.join("transcripts")).map_err(runtime)?;
    let r = &outcome.record;
    fs::write(cli.out.join("trial.json"), serde_json::to_string_pretty(r).expect("record serializes")).map_err(runtime)?;
    println!("scene {} agent {} seed {}", r.scene, r.agent, r.seed);
    println!("result: {}", r.cause);
    println!("steps: {}", r.steps);
    println!("tokens: {} (prompt {}, completion {})", r.tokens, r.prompt_tokens, r.completion_tokens);
    if let Some(p) = &r.transcript_path {
        println!("transcript: {p}");
    }
    match (&r.error, r.cause) {
        (Some(e), TerminalCause::SessionError) => Err(runtime(format!("session failed: {e}"))),
        _ => Ok(()),
    }
}

fn remote_session() -> Result<RemoteChatSession, CliError> {
    RemoteChatSession::new(RemoteChatConfig::from_env().map_err(session_error)?).map_err(session_error)
}

fn ranking_text(ranking: &[SceneDifficulty]) -> String {
    let mut s = String::from("rank,scene,mean_success_rate,mean_steps\n");
    for (i, d) in ranking.iter().enumerate() {
        s.push_str(&format!("{},{},{:.4},{:.2}\n", i + 1, d.scene, d.mean_success_rate, d.mean_steps));
    }
    s
}

fn report_ranking(rows: &[MetricsRow], out: Option<&Path>) -> Result<(), CliError> {
    let ranking = rank_difficulty(rows).map_err(|e| CliError::Config(e.to_string()))?;
    print!("{}", ranking_text(&ranking));
    let five: Vec<String> = hardest(&ranking, 5).iter().map(u32::to_string).collect();
    println!("hardest five: {}", five.join(", "));
    if let Some(dir) = out {
        fs::write(dir.join("ranking.csv"), ranking_text(&ranking)).map_err(runtime)?;
    }
    Ok(())
}

fn run_bench(cli: &Cli, a: &BenchArgs) -> Result<(), CliError> {
    if let Some(path) = &a.fixtures {
        let text = fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let rows = read_rows(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if a.rank_only {
            return report_ranking(&rows, None);
        }
        let paths = emit_tables(&rows, &cli.out).map_err(runtime)?;
        println!("wrote {} and {}", paths.results_csv.display(), paths.tables_md.display());
        return report_ranking(&rows, Some(&cli.out));
    }
    if a.n == 0 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    let agents = parse_agent_selector(&a.agents)?;
    let scenes = parse_scene_selector(&a.scenes)?.into_iter().map(load_scene).collect::<Result<Vec<_>, _>>()?;
    let mut config = MatrixConfig::new(agents, scenes, a.n, cli.seed.unwrap_or(0));
    config.workers = cli.workers;
    if a.sequential {
        config.execution = bench::Execution::Sequential;
    }
    if a.transcripts {
        config.transcript_dir = Some(cli.out.join("transcripts"));
    }
    let records = match a.session {
        SessionChoice::Scripted => {
            let factory = follower_factory(&config.scenes).map_err(session_error)?;
            run_matrix(&config, &factory)
        }
        SessionChoice::Remote => {
            RemoteChatConfig::from_env().map_err(session_error)?;
            let factory = |_: AgentKind, _: &Scene, _: u64| -> Result<Box<dyn SessionFunction>, SessionError> {
                Ok(Box::new(RemoteChatSession::from_env()?))
            };
            run_matrix(&config, &factory)
        }
    };
    fs::create_dir_all(&cli.out).map_err(runtime)?;
    write_records_csv(&records, &cli.out.join("trials.csv")).map_err(runtime)?;
    let rows = aggregate_all(&records).map_err(runtime)?;
    let paths = emit_tables(&rows, &cli.out).map_err(runtime)?;
    println!("trials: {}", records.len());
    println!("rows: {}", rows.len());
    println!("wrote {} and {}", paths.results_csv.display(), paths.tables_md.display());
    report_ranking(&rows, Some(&cli.out))?;
    let failed = records.iter().filter(|r| r.cause == TerminalCause::SessionError).count();
    if failed > 0 {
        eprintln!("warning: {failed} trial(s) failed with session errors; see trials.csv");
    }
    Ok(())
}
