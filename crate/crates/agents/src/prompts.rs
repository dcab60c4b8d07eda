use context_core::ContextItem;

use crate::AgentKind;

pub const PERFORM_ACTION: &str = "Perform an action.";
pub const TOOL_HINT: &str = "You may call one of your tools before choosing the action.";
pub const REACT_INSTRUCTION: &str =
    "Analyze the current situation: what has happened, what is blocking progress, and which single action helps most now.";
pub const DECOMPOSE_INSTRUCTION: &str =
    "Break down the task into three hierarchies: the overall goal, the sub-goals that lead to it, and the concrete actions for each sub-goal.";
pub const QUESTION_INSTRUCTION: &str = "Using the rules and the status above, answer the question:";
pub const PLAN_INSTRUCTION: &str = "Generate a plan: list the remaining actions, one per line, that take the monkey from the current status to a banana.";
pub const CORRECTION_PREFIX: &str = "Your previous reply could not be used";

pub const RULES: &str = "\
You control a monkey standing in a single row of numbered cells. Bananas lie on raised platforms; \
the task is complete once the monkey stands on the surface of a platform that holds a banana.
Rules:
- Moving left or right is only possible on the ground.
- The monkey can climb onto the top of a box or platform in its own or a neighbouring cell when that top is higher than the monkey by at most 1.5.
- Only small boxes can be carried, one at a time, and only when picked up from the ground while standing on the ground. Climbing while carrying is allowed.
- A carried box can be placed on a neighbouring ground cell, on top of whatever is stacked there, or onto a platform whose height is at most 1 above the monkey.
- Some boxes are fragile: the first climb onto one may crush it to a lower height.
- Boxes farther away than the sight range show their size and height as unknown.
- Every reply that requests an action costs one step, even when the action is rejected. There are at most 300 steps.
Context layout: earlier turns come first and notes, when present, come last.";

/// β: the action list plus the kind's tools.
pub fn action_list(kind: AgentKind) -> String {
    let mut s = String::from(
        "Actions (reply with one line `action: <action>`):
- move_left
- move_right
- climb_up <box or platform id>
- climb_down
- grab <box id>
- place <cell number or platform id>
Tools (reply with one line `tool: <name> <arguments>`):",
    );
    for t in kind.tools() {
        s.push_str("\n- ");
        s.push_str(t.usage());
    }
    s
}

pub fn correction(reason: &str) -> ContextItem {
    ContextItem::user(format!(
        "{CORRECTION_PREFIX} ({reason}). Reply with exactly one line `action: <action>` or `tool: <name> <arguments>`."
    ))
}
