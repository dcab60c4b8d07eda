use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::SimError;

/// What a climb or place action points at.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Box(String),
    Platform(String),
    Cell(usize),
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Target::Box(id) | Target::Platform(id) => f.write_str(id),
            Target::Cell(c) => write!(f, "{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    MoveLeft,
    MoveRight,
    ClimbUp(Target),
    ClimbDown,
    Grab(String),
    Place(Target),
    Abandon,
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::MoveLeft => f.write_str("move_left"),
            Action::MoveRight => f.write_str("move_right"),
            Action::ClimbUp(t) => write!(f, "climb_up {t}"),
            Action::ClimbDown => f.write_str("climb_down"),
            Action::Grab(b) => write!(f, "grab {b}"),
            Action::Place(t) => write!(f, "place {t}"),
            Action::Abandon => f.write_str("abandon"),
        }
    }
}

fn target(arg: &str) -> Target {
    if let Ok(c) = arg.parse() {
        return Target::Cell(c);
    }
    if arg.starts_with(['P', 'p']) {
        Target::Platform(arg.to_ascii_uppercase())
    } else {
        Target::Box(arg.to_ascii_uppercase())
    }
}

/// Parses `move_left`, `climb_up S0`, `place 6`, `place P0`, ... Case and
/// separators (`_`, `-`, space) are forgiving.
impl FromStr for Action {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self, SimError> {
        let err = || SimError::ParseAction(s.trim().to_string());
        let norm = s.trim().trim_end_matches('.').to_ascii_lowercase();
        let mut words = norm.split_whitespace();
        let head = words.next().ok_or_else(err)?.replace(['-', '_'], " ");
        let mut parts = head.split_whitespace();
        let verb = parts.next().ok_or_else(err)?;
        let rest: Vec<&str> = parts.chain(words).collect();
        let (verb, rest) = match (verb, rest.as_slice()) {
            ("move" | "climb", [dir, tail @ ..]) => (format!("{verb} {dir}"), tail.to_vec()),
            _ => (verb.to_string(), rest),
        };
        fn arg<'a>(rest: &[&'a str]) -> Option<&'a str> {
            match rest {
                [a] => Some(a.trim_matches(|c: char| !c.is_alphanumeric())),
                _ => None,
            }
        }
        Ok(match verb.as_str() {
            "move left" | "left" if rest.is_empty() => Action::MoveLeft,
            "move right" | "right" if rest.is_empty() => Action::MoveRight,
            "climb down" if rest.is_empty() => Action::ClimbDown,
            "climb up" => match target(arg(&rest).ok_or_else(err)?) {
                Target::Cell(_) => return Err(err()),
                t => Action::ClimbUp(t),
            },
            "grab" => match target(arg(&rest).ok_or_else(err)?) {
                Target::Box(b) => Action::Grab(b),
                _ => return Err(err()),
            },
            "place" => match target(arg(&rest).ok_or_else(err)?) {
                Target::Box(_) => return Err(err()),
                t => Action::Place(t),
            },
            "abandon" if rest.is_empty() => Action::Abandon,
            _ => return Err(err()),
        })
    }
}
