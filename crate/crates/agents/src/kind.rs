use std::fmt;
use std::str::FromStr;

use context_core::{SemType, Schema};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AgentKind {
    Basic,
    ReAct,
    #[serde(rename = "MLDT")]
    Mldt,
    #[serde(rename = "OR")]
    Or,
    #[serde(rename = "ORN")]
    Orn,
    #[serde(rename = "PlanORN")]
    PlanOrn,
}

impl AgentKind {
    pub const ALL: [AgentKind; 6] =
        [AgentKind::Basic, AgentKind::ReAct, AgentKind::Mldt, AgentKind::Or, AgentKind::Orn, AgentKind::PlanOrn];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Basic => "Basic",
            AgentKind::ReAct => "ReAct",
            AgentKind::Mldt => "MLDT",
            AgentKind::Or => "OR",
            AgentKind::Orn => "ORN",
            AgentKind::PlanOrn => "PlanORN",
        }
    }

    /// Tools this kind may call, in listing order.
    pub fn tools(self) -> Vec<AgentTool> {
        use AgentTool::*;
        match self {
            AgentKind::Basic | AgentKind::ReAct | AgentKind::Mldt => vec![Abandon],
            AgentKind::Or => vec![Reasoning, Abandon],
            AgentKind::Orn => vec![Reasoning, AddNote, RemoveNote, Abandon],
            AgentKind::PlanOrn => vec![Reasoning, Plan, AddNote, RemoveNote, Abandon],
        }
    }

    /// Whether the kind belongs to the on-demand reasoning family.
    pub fn on_demand(self) -> bool {
        matches!(self, AgentKind::Or | AgentKind::Orn | AgentKind::PlanOrn)
    }

    pub fn has_notes(self) -> bool {
        matches!(self, AgentKind::Orn | AgentKind::PlanOrn)
    }
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown agent kind `{0}` (expected basic, react, mldt, or, orn or planorn)")]
pub struct UnknownKind(pub String);

impl FromStr for AgentKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, UnknownKind> {
        let key = s.trim().to_ascii_lowercase().replace(['-', '_', '+'], "");
        AgentKind::ALL
            .into_iter()
            .find(|k| k.name().to_ascii_lowercase() == key)
            .ok_or_else(|| UnknownKind(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentTool {
    Reasoning,
    Plan,
    AddNote,
    RemoveNote,
    Abandon,
}

impl AgentTool {
    pub fn name(self) -> &'static str {
        match self {
            AgentTool::Reasoning => "reasoning",
            AgentTool::Plan => "plan",
            AgentTool::AddNote => "add_note",
            AgentTool::RemoveNote => "remove_note",
            AgentTool::Abandon => "abandon",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        [AgentTool::Reasoning, AgentTool::Plan, AgentTool::AddNote, AgentTool::RemoveNote, AgentTool::Abandon]
            .into_iter()
            .find(|t| t.name() == name)
    }

    pub fn schema(self) -> Schema {
        match self {
            AgentTool::Reasoning => Schema::new().field("question", SemType::Text, "what the reasoning assistant should answer"),
            AgentTool::Plan => Schema::new().field("goal", SemType::Text, "feedback on the current plan or the new objective"),
            AgentTool::AddNote | AgentTool::RemoveNote => Schema::new().field("note", SemType::Text, "note text"),
            AgentTool::Abandon => Schema::new(),
        }
    }

    pub fn usage(self) -> &'static str {
        match self {
            AgentTool::Reasoning => {
                r#"tool: reasoning {"question": "..."} asks a reasoning assistant one question about the current situation; the question and its answer join this step's context. At most once per step."#
            }
            AgentTool::Plan => {
                r#"tool: plan {"goal": "..."} generates a new plan from the current status; the plan stays in context until replaced."#
            }
            AgentTool::AddNote => r#"tool: add_note {"note": "..."} keeps a note at the end of your context."#,
            AgentTool::RemoveNote => r#"tool: remove_note {"note": "..."} deletes a note."#,
            AgentTool::Abandon => "tool: abandon gives up the task.",
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for k in AgentKind::ALL {
            assert_eq!(k.name().parse::<AgentKind>().unwrap(), k);
            assert_eq!(k.name().to_lowercase().parse::<AgentKind>().unwrap(), k);
        }
        assert_eq!("plan-orn".parse::<AgentKind>().unwrap(), AgentKind::PlanOrn);
        assert!("reflexion".parse::<AgentKind>().is_err());
    }

    #[test]
    fn basic_family_has_only_abandon() {
        for k in [AgentKind::Basic, AgentKind::ReAct, AgentKind::Mldt] {
            assert_eq!(k.tools(), [AgentTool::Abandon]);
        }
        assert!(AgentKind::PlanOrn.tools().contains(&AgentTool::Plan));
        assert!(!AgentKind::Orn.tools().contains(&AgentTool::Plan));
    }
}
