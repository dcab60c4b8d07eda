use context_core::{parse_result, ContextItem, Schema, SemType, Value};
use monkey_sim::Action;

use crate::AgentTool;

#[derive(Debug, Clone, PartialEq)]
pub enum ToolCall {
    Reasoning(String),
    Plan(String),
    AddNote(String),
    RemoveNote(String),
    Abandon,
}

impl ToolCall {
    pub fn tool(&self) -> AgentTool {
        match self {
            ToolCall::Reasoning(_) => AgentTool::Reasoning,
            ToolCall::Plan(_) => AgentTool::Plan,
            ToolCall::AddNote(_) => AgentTool::AddNote,
            ToolCall::RemoveNote(_) => AgentTool::RemoveNote,
            ToolCall::Abandon => AgentTool::Abandon,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedReply {
    Act(Action),
    Tool(ToolCall),
    Invalid(String),
}

fn text_arg(args: &str, tool: AgentTool) -> Result<String, String> {
    let bindings = parse_result(&ContextItem::agent(args), &tool.schema()).map_err(|e| format!("{}: {e}", tool.name()))?;
    match bindings.into_values().next() {
        Some(Value::Text(t)) if !t.trim().is_empty() => Ok(t.trim().to_string()),
        _ => Err(format!("{} needs a non-empty argument", tool.name())),
    }
}

/// **R** for agent replies: `action: ...`, a bare action, or `tool: <name> <args>`.
pub fn parse_reply(reply: &ContextItem, allowed: &[AgentTool]) -> ParsedReply {
    let text = match reply.text_content() {
        Ok(t) => t,
        Err(e) => return ParsedReply::Invalid(e.to_string()),
    };
    let tool_line = text.lines().map(str::trim).find_map(|l| {
        let (k, v) = l.split_once(':')?;
        k.trim().eq_ignore_ascii_case("tool").then(|| v.trim())
    });
    if let Some(call) = tool_line {
        let (name, args) = call.split_once(char::is_whitespace).unwrap_or((call, ""));
        let name = name.trim().trim_matches('`').to_ascii_lowercase();
        let Some(tool) = AgentTool::from_name(&name) else {
            return ParsedReply::Invalid(format!("unknown tool `{name}`"));
        };
        if !allowed.contains(&tool) {
            return ParsedReply::Invalid(format!("tool `{name}` is not available"));
        }
        let args = args.trim();
        let call = match tool {
            AgentTool::Abandon => Ok(ToolCall::Abandon),
            AgentTool::Reasoning => text_arg(args, tool).map(ToolCall::Reasoning),
            AgentTool::Plan => text_arg(args, tool).map(ToolCall::Plan),
            AgentTool::AddNote => text_arg(args, tool).map(ToolCall::AddNote),
            AgentTool::RemoveNote => text_arg(args, tool).map(ToolCall::RemoveNote),
        };
        return match call {
            Ok(c) => ParsedReply::Tool(c),
            Err(e) => ParsedReply::Invalid(e),
        };
    }
    let schema = Schema::new().field("action", SemType::Text, "one action");
    let raw = match parse_result(reply, &schema) {
        Ok(b) => b["action"].to_string(),
        Err(e) => return ParsedReply::Invalid(e.to_string()),
    };
    match raw.parse::<Action>() {
        Ok(Action::Abandon) if !allowed.contains(&AgentTool::Abandon) => ParsedReply::Invalid("abandon is not available".into()),
        Ok(Action::Abandon) => ParsedReply::Tool(ToolCall::Abandon),
        Ok(a) => ParsedReply::Act(a),
        Err(e) => ParsedReply::Invalid(e.to_string()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::AgentKind;
    use monkey_sim::Target;

    fn parse(s: &str, kind: AgentKind) -> ParsedReply {
        parse_reply(&ContextItem::agent(s), &kind.tools())
    }

    #[test]
    fn labelled_and_bare_actions() {
        assert_eq!(parse("action: move_right", AgentKind::Basic), ParsedReply::Act(Action::MoveRight));
        assert_eq!(parse("move_right", AgentKind::Basic), ParsedReply::Act(Action::MoveRight));
        assert_eq!(
            parse("Thought: the box is close.\naction: grab S0", AgentKind::Basic),
            ParsedReply::Act(Action::Grab("S0".into()))
        );
        assert_eq!(parse("action: place 6", AgentKind::Basic), ParsedReply::Act(Action::Place(Target::Cell(6))));
    }

    #[test]
    fn tool_calls_with_json_or_bare_arguments() {
        assert_eq!(
            parse(r#"tool: reasoning {"question": "which box?"}"#, AgentKind::Or),
            ParsedReply::Tool(ToolCall::Reasoning("which box?".into()))
        );
        assert_eq!(
            parse("tool: add_note large box crushed to 1.2", AgentKind::Orn),
            ParsedReply::Tool(ToolCall::AddNote("large box crushed to 1.2".into()))
        );
        assert_eq!(parse("tool: abandon", AgentKind::Basic), ParsedReply::Tool(ToolCall::Abandon));
        assert_eq!(parse("action: abandon", AgentKind::Basic), ParsedReply::Tool(ToolCall::Abandon));
    }

    #[test]
    fn unavailable_or_malformed_calls_are_invalid() {
        assert!(matches!(parse(r#"tool: reasoning {"question": "x"}"#, AgentKind::Basic), ParsedReply::Invalid(_)));
        assert!(matches!(parse("tool: plan {}", AgentKind::PlanOrn), ParsedReply::Invalid(_)));
        assert!(matches!(parse("tool: teleport", AgentKind::PlanOrn), ParsedReply::Invalid(_)));
        assert!(matches!(parse("I am not sure.\nMaybe left?", AgentKind::Basic), ParsedReply::Invalid(_)));
        assert!(matches!(parse("action: fly", AgentKind::Basic), ParsedReply::Invalid(_)));
    }
}
