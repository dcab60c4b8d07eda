//! Agent designs built from context patterns.
//!
//! Each [`AgentKind`] assembles its action context from the rules α, the
//! action list β, the memory of earlier turns and the current status γ,
//! plus whatever its kind adds: a per-step analysis (ReAct), a static
//! decomposition (MLDT), an optional question and answer (OR), notes (ORN)
//! or a replaceable plan (PlanORN). Replies are parsed by a line-oriented
//! **R**: `action: <action>` or `tool: <name> <arguments>`.

mod agent;
mod episode;
mod follower;
mod kind;
pub mod prompts;
mod reply;

pub use agent::{
    assemble_context, decide, sub_session_input, turn_item, AgentConfig, AgentState, Decision, StepScratch, ToolEvent,
    DEFAULT_MAX_REPROMPTS, DEFAULT_MAX_TOOL_CALLS,
};
pub use episode::{run_episode, status_item, EpisodeOutcome, StepLog, TerminalCause, TrialRecord};
pub use follower::PlanFollower;
pub use kind::{AgentKind, AgentTool, UnknownKind};
pub use reply::{parse_reply, ParsedReply, ToolCall};
