use std::collections::VecDeque;

use context_core::{ContextItem, Reply, SessionError, SessionFunction};
use monkey_sim::{bfs_solve, Action, Realization, Scene, SolveOutcome};

use crate::prompts::{DECOMPOSE_INSTRUCTION, PLAN_INSTRUCTION, QUESTION_INSTRUCTION, REACT_INSTRUCTION};

/// Offline session that plays a fixed action list and answers every
/// sub-session with canned text derived from the remaining actions.
#[derive(Debug, Clone)]
pub struct PlanFollower {
    remaining: VecDeque<Action>,
}

impl PlanFollower {
    pub fn new(actions: impl IntoIterator<Item = Action>) -> Self {
        Self { remaining: actions.into_iter().collect() }
    }

    /// Follows the minimal plan under the zero-crush realization.
    pub fn for_scene(scene: &Scene) -> Result<Self, SessionError> {
        match bfs_solve(scene, &Realization::zero_crush(scene)) {
            Ok(SolveOutcome::Solved(plan)) => Ok(Self::new(plan.actions)),
            Ok(SolveOutcome::Unsolvable { .. }) => Err(SessionError::Config(format!("scene {} has no plan", scene.id))),
            Err(e) => Err(SessionError::Config(e.to_string())),
        }
    }

    pub fn remaining(&self) -> usize {
        self.remaining.len()
    }

    fn listing(&self) -> String {
        if self.remaining.is_empty() {
            return "No actions left.".into();
        }
        self.remaining.iter().enumerate().map(|(i, a)| format!("{}. {a}", i + 1)).collect::<Vec<_>>().join("\n")
    }
}

fn instruction(input: &ContextItem) -> Option<&'static str> {
    let known = [REACT_INSTRUCTION, DECOMPOSE_INSTRUCTION, PLAN_INSTRUCTION, QUESTION_INSTRUCTION];
    input.fragments().iter().rev().filter_map(|f| f.as_text()).find_map(|t| known.into_iter().find(|k| *k == t))
}

impl SessionFunction for PlanFollower {
    fn complete(&mut self, input: &ContextItem) -> Result<Reply, SessionError> {
        let text = match instruction(input) {
            Some(REACT_INSTRUCTION) => match self.remaining.front() {
                Some(a) => format!("The next useful action is `{a}`."),
                None => "Nothing useful is left to do.".into(),
            },
            Some(DECOMPOSE_INSTRUCTION) => format!("Goal: reach a banana.\nActions:\n{}", self.listing()),
            Some(PLAN_INSTRUCTION) => self.listing(),
            Some(_) => "Follow the plan.".into(),
            None => match self.remaining.pop_front() {
                Some(a) => format!("action: {a}"),
                None => "action: abandon".into(),
            },
        };
        Ok(Reply::text(text))
    }
}
