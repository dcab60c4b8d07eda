use context_core::{concat, memory_pattern, run_session, Activity, ContextItem, Session, SessionError, SessionFunction, Usage};
use monkey_sim::Action;
use serde::{Deserialize, Serialize};

use crate::prompts::{
    action_list, correction, DECOMPOSE_INSTRUCTION, PERFORM_ACTION, PLAN_INSTRUCTION, QUESTION_INSTRUCTION, REACT_INSTRUCTION, RULES,
    TOOL_HINT,
};
use crate::{parse_reply, AgentKind, AgentTool, ParsedReply, ToolCall};

pub const DEFAULT_MAX_REPROMPTS: u32 = 2;
pub const DEFAULT_MAX_TOOL_CALLS: u32 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct AgentConfig {
    pub kind: AgentKind,
    /// α: problem description and rules.
    pub rules: ContextItem,
    /// β: action list and tool usage.
    pub actions: ContextItem,
    pub tools: Vec<AgentTool>,
    pub max_reprompts: u32,
    pub max_tool_calls: u32,
}

impl AgentConfig {
    pub fn new(kind: AgentKind) -> Self {
        Self {
            kind,
            rules: ContextItem::system(RULES),
            actions: ContextItem::system(action_list(kind)),
            tools: kind.tools(),
            max_reprompts: DEFAULT_MAX_REPROMPTS,
            max_tool_calls: DEFAULT_MAX_TOOL_CALLS,
        }
    }

    fn prelude(&self) -> ContextItem {
        self.rules.clone().then(&self.actions)
    }
}

/// Side effects of tool calls, kept for transcripts and tests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "tool", rename_all = "snake_case")]
pub enum ToolEvent {
    Reasoning { question: String, answer: String },
    Plan { goal: String, plan: String },
    NoteAdded { note: String },
    NoteAlreadyPresent { note: String },
    NoteRemoved { note: String },
    NoteAbsent { note: String },
    Abandon,
    Invalid { reply: String, reason: String },
}

/// Per-step inputs that exist only within the step being decided.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StepScratch {
    /// r_i from the mandatory reasoning sub-session (ReAct).
    pub analysis: Option<ContextItem>,
    /// (q_i, r_i) from the on-demand reasoning tool; k_i = 1 when present.
    pub exchange: Option<(ContextItem, ContextItem)>,
}

#[derive(Debug, Clone, Default)]
pub struct AgentState {
    /// M: per-step turn items and the replies that ended them.
    pub memory: Activity,
    /// Every call to **S**, with its full input, in order.
    pub transcript: Activity,
    pub notes: Vec<String>,
    /// 𝒫: the static plan (MLDT) or the latest tool plan (PlanORN).
    pub plan: Option<ContextItem>,
    pub plan_calls: u32,
    pub steps_decided: u32,
}

impl AgentState {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn notes_item(&self) -> ContextItem {
        self.notes.iter().map(|n| ContextItem::user(n.as_str())).collect()
    }

    /// Adds a note unless an identical one exists.
    pub fn add_note(&mut self, note: &str) -> ToolEvent {
        if self.notes.iter().any(|n| n == note) {
            return ToolEvent::NoteAlreadyPresent { note: note.into() };
        }
        self.notes.push(note.into());
        ToolEvent::NoteAdded { note: note.into() }
    }

    pub fn remove_note(&mut self, note: &str) -> ToolEvent {
        match self.notes.iter().position(|n| n == note) {
            Some(i) => {
                self.notes.remove(i);
                ToolEvent::NoteRemoved { note: note.into() }
            }
            None => ToolEvent::NoteAbsent { note: note.into() },
        }
    }
}

/// The part of the action context that enters memory: γ_i, the framing,
/// and ReAct's r_i or the OR family's q_i·r_i.
pub fn turn_item(config: &AgentConfig, status: &ContextItem, scratch: &StepScratch) -> ContextItem {
    let mut t = status.clone().then(&ContextItem::user(PERFORM_ACTION));
    if config.kind.on_demand() {
        t.append(&ContextItem::user(TOOL_HINT));
    }
    if let Some(r) = &scratch.analysis {
        t.append(r);
    }
    t
}

fn exchange_item(scratch: &StepScratch) -> ContextItem {
    match &scratch.exchange {
        Some((q, r)) => q.clone().then(r),
        None => ContextItem::empty(),
    }
}

/// The action context for the current step.
///
/// Basic, ReAct: α·β·M·γ_i·"Perform an action."[·r_i]
/// MLDT: α·β·M·𝒫₀·γ_i·"Perform an action."
/// OR: α·β·M·γ_i·framing·{q_i·r_i}^{k_i}
/// ORN: OR context ·∏n_j
/// PlanORN: α·β·M·γ_i·framing·𝒫_i·{q_i·r_i}^{k_i}·∏n_j
pub fn assemble_context(config: &AgentConfig, state: &AgentState, status: &ContextItem, scratch: &StepScratch) -> ContextItem {
    let memory = memory_pattern(&state.memory);
    let turn = turn_item(config, status, scratch);
    let plan = state.plan.clone().unwrap_or_default();
    let notes = if config.kind.has_notes() { state.notes_item() } else { ContextItem::empty() };
    let prelude = config.prelude();
    match config.kind {
        AgentKind::Basic | AgentKind::ReAct => concat([&prelude, &memory, &turn]),
        AgentKind::Mldt => concat([&prelude, &memory, &plan, &turn]),
        AgentKind::Or | AgentKind::Orn => concat([&prelude, &memory, &turn, &exchange_item(scratch), &notes]),
        AgentKind::PlanOrn => concat([&prelude, &memory, &turn, &plan, &exchange_item(scratch), &notes]),
    }
}

/// α·β·γ·instruction[·argument]: a context-isolated sub-session input.
pub fn sub_session_input(config: &AgentConfig, status: &ContextItem, instruction: &str, argument: Option<&str>) -> ContextItem {
    let mut c = config.prelude().then(status).then(&ContextItem::user(instruction));
    if let Some(a) = argument {
        c.append(&ContextItem::user(a));
    }
    c
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decision {
    pub action: Action,
    /// Set when the action is an Abandon forced by reprompt exhaustion.
    pub forced_abandon: Option<String>,
    pub tool_events: Vec<ToolEvent>,
    pub reasoning_calls: u32,
    pub plan_calls: u32,
    pub reprompts: u32,
    pub main_calls: u32,
}

/// Runs the kind's sub-sessions, calls **S** on the action context and
/// parses an action, reprompting on unusable replies.
pub fn decide<S: SessionFunction + ?Sized>(
    config: &AgentConfig,
    state: &mut AgentState,
    status: &ContextItem,
    session: &mut S,
) -> Result<Decision, SessionError> {
    let mut d = Decision {
        action: Action::Abandon,
        forced_abandon: None,
        tool_events: Vec::new(),
        reasoning_calls: 0,
        plan_calls: 0,
        reprompts: 0,
        main_calls: 0,
    };
    let mut scratch = StepScratch::default();
    if config.kind == AgentKind::Mldt && state.plan_calls == 0 {
        let input = sub_session_input(config, status, DECOMPOSE_INSTRUCTION, None);
        state.plan = Some(run_session(session, &input, &mut state.transcript)?);
        state.plan_calls += 1;
        d.plan_calls += 1;
    }
    if config.kind == AgentKind::ReAct {
        let input = sub_session_input(config, status, REACT_INSTRUCTION, None);
        scratch.analysis = Some(run_session(session, &input, &mut state.transcript)?);
        d.reasoning_calls += 1;
    }
    let mut tool_calls = 0;
    let mut pending: Option<(ContextItem, String)> = None;
    loop {
        let mut input = assemble_context(config, state, status, &scratch);
        if let Some((bad, reason)) = &pending {
            input = input.then(bad).then(&correction(reason));
        }
        let reply = run_session(session, &input, &mut state.transcript)?;
        d.main_calls += 1;
        let invalid = match parse_reply(&reply, &config.tools) {
            ParsedReply::Act(a) => {
                d.action = a;
                break finish(state, config, status, &scratch, reply, d);
            }
            ParsedReply::Tool(ToolCall::Abandon) => {
                d.tool_events.push(ToolEvent::Abandon);
                d.action = Action::Abandon;
                break finish(state, config, status, &scratch, reply, d);
            }
            ParsedReply::Tool(_) if tool_calls >= config.max_tool_calls => Some("too many tool calls in this step".to_string()),
            ParsedReply::Tool(ToolCall::Reasoning(_)) if scratch.exchange.is_some() => {
                Some("reasoning was already used in this step".to_string())
            }
            ParsedReply::Tool(call) => {
                tool_calls += 1;
                match call {
                    ToolCall::Reasoning(q) => {
                        let input = sub_session_input(config, status, QUESTION_INSTRUCTION, Some(&q));
                        let r = tool_sub_session(session, &input, &mut state.transcript);
                        d.reasoning_calls += 1;
                        d.tool_events.push(ToolEvent::Reasoning { question: q.clone(), answer: r.render() });
                        scratch.exchange = Some((ContextItem::agent(q), r));
                    }
                    ToolCall::Plan(g) => {
                        let input = sub_session_input(config, status, PLAN_INSTRUCTION, Some(&g));
                        let p = tool_sub_session(session, &input, &mut state.transcript);
                        d.plan_calls += 1;
                        state.plan_calls += 1;
                        d.tool_events.push(ToolEvent::Plan { goal: g, plan: p.render() });
                        state.plan = Some(p);
                    }
                    ToolCall::AddNote(n) => d.tool_events.push(state.add_note(&n)),
                    ToolCall::RemoveNote(n) => d.tool_events.push(state.remove_note(&n)),
                    ToolCall::Abandon => unreachable!("handled above"),
                }
                None
            }
            ParsedReply::Invalid(reason) => Some(reason),
        };
        match invalid {
            None => pending = None,
            Some(reason) => {
                d.tool_events.push(ToolEvent::Invalid { reply: reply.render(), reason: reason.clone() });
                if d.reprompts >= config.max_reprompts {
                    d.action = Action::Abandon;
                    d.forced_abandon = Some(reason);
                    break finish(state, config, status, &scratch, reply, d);
                }
                d.reprompts += 1;
                pending = Some((reply, reason));
            }
        }
    }
}

/// Tool sub-sessions report failure to the agent instead of aborting the step.
fn tool_sub_session<S: SessionFunction + ?Sized>(session: &mut S, input: &ContextItem, transcript: &mut Activity) -> ContextItem {
    run_session(session, input, transcript).unwrap_or_else(|e| ContextItem::tool(format!("error: {e}")))
}

fn finish(
    state: &mut AgentState,
    config: &AgentConfig,
    status: &ContextItem,
    scratch: &StepScratch,
    reply: ContextItem,
    d: Decision,
) -> Result<Decision, SessionError> {
    let turn = turn_item(config, status, scratch).then(&exchange_item(scratch));
    state.memory.push(Session { input: turn, output: reply, usage: Usage::default(), wall_time: 0.0 });
    state.steps_decided += 1;
    Ok(d)
}
