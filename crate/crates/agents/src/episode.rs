use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use context_core::{Activity, ContextItem, SessionFunction};
use monkey_sim::{observe, reset, Event, Scene, Terminal};
use serde::{Deserialize, Serialize};

use crate::agent::{decide, AgentConfig, AgentState, ToolEvent};
use crate::AgentKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TerminalCause {
    Success,
    StepLimit,
    Abandoned,
    /// Abandon forced after the reprompt budget ran out.
    ParseFailure,
    SessionError,
}

impl TerminalCause {
    pub fn as_str(self) -> &'static str {
        match self {
            TerminalCause::Success => "success",
            TerminalCause::StepLimit => "step_limit",
            TerminalCause::Abandoned => "abandoned",
            TerminalCause::ParseFailure => "parse_failure",
            TerminalCause::SessionError => "session_error",
        }
    }
}

impl std::fmt::Display for TerminalCause {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub agent: AgentKind,
    pub scene: u32,
    pub seed: u64,
    pub success: bool,
    pub steps: u32,
    /// Seconds spent inside the session function.
    pub wall_time: f64,
    pub tokens: u64,
    pub prompt_tokens: u64,
    pub completion_tokens: u64,
    pub cause: TerminalCause,
    pub transcript_path: Option<String>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepLog {
    pub step: u32,
    pub action: String,
    pub events: Vec<Event>,
    pub reasoning_calls: u32,
    pub plan_calls: u32,
    pub reprompts: u32,
    pub tool_events: Vec<ToolEvent>,
}

#[derive(Debug, Clone)]
pub struct EpisodeOutcome {
    pub record: TrialRecord,
    pub transcript: Activity,
    pub steps: Vec<StepLog>,
    pub state: AgentState,
}

impl EpisodeOutcome {
    /// Writes the transcript as JSON Lines into `dir` and records its path.
    pub fn write_transcript(&mut self, dir: &Path) -> io::Result<PathBuf> {
        fs::create_dir_all(dir)?;
        let r = &self.record;
        let path = dir.join(format!("{}_scene{:02}_seed{}.jsonl", r.agent.name().to_lowercase(), r.scene, r.seed));
        fs::write(&path, self.transcript.to_jsonl())?;
        self.record.transcript_path = Some(path.display().to_string());
        Ok(path)
    }
}

/// γ_i: the observation and the events produced by the previous action.
pub fn status_item(observation: &str, last_events: &[Event]) -> ContextItem {
    let last = if last_events.is_empty() {
        "none".to_string()
    } else {
        last_events.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
    };
    ContextItem::user(format!("Status:\n{}\nLast result: {last}", observation.trim_end()))
}

/// Observe, decide, step until the world is terminal or the session fails.
pub fn run_episode<S: SessionFunction + ?Sized>(config: &AgentConfig, scene: &Scene, seed: u64, session: &mut S) -> EpisodeOutcome {
    let mut world = reset(scene, seed);
    let mut state = AgentState::new();
    let mut last_events: Vec<Event> = Vec::new();
    let mut steps = Vec::new();
    let mut forced = false;
    let mut error = None;
    while world.is_running() {
        let status = status_item(&observe(&world).text, &last_events);
        let d = match decide(config, &mut state, &status, session) {
            Ok(d) => d,
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        };
        let (next, events) = match world.step(&d.action) {
            Ok(x) => x,
            Err(e) => {
                error = Some(e.to_string());
                break;
            }
        };
        forced = d.forced_abandon.is_some();
        steps.push(StepLog {
            step: next.step_count(),
            action: d.action.to_string(),
            events: events.clone(),
            reasoning_calls: d.reasoning_calls,
            plan_calls: d.plan_calls,
            reprompts: d.reprompts,
            tool_events: d.tool_events,
        });
        world = next;
        last_events = events;
    }
    let cause = match (world.terminal(), &error) {
        (_, Some(_)) => TerminalCause::SessionError,
        (Terminal::Success, _) => TerminalCause::Success,
        (Terminal::StepLimit, _) => TerminalCause::StepLimit,
        (Terminal::Abandoned, _) if forced => TerminalCause::ParseFailure,
        (Terminal::Abandoned, _) | (Terminal::Running, _) => TerminalCause::Abandoned,
    };
    let usage = state.transcript.total_usage();
    let record = TrialRecord {
        agent: config.kind,
        scene: scene.id,
        seed,
        success: cause == TerminalCause::Success,
        steps: world.step_count(),
        wall_time: state.transcript.total_wall_time(),
        tokens: usage.total(),
        prompt_tokens: usage.prompt,
        completion_tokens: usage.completion,
        cause,
        transcript_path: None,
        error,
    };
    EpisodeOutcome { record, transcript: state.transcript.clone(), steps, state }
}
