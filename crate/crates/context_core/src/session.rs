use std::collections::{HashMap, VecDeque};
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::{ContextItem, Fragment, Role, SessionError};

/// Token usage of one session.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Usage {
    pub prompt: u64,
    pub completion: u64,
}

impl Usage {
    pub fn total(&self) -> u64 {
        self.prompt + self.completion
    }
}

impl std::ops::Add for Usage {
    type Output = Usage;

    fn add(self, rhs: Usage) -> Usage {
        Usage { prompt: self.prompt + rhs.prompt, completion: self.completion + rhs.completion }
    }
}

/// `ceil(chars / 4)`, the usage estimate for providers that report none.
pub fn estimate_tokens(text: &str) -> u64 {
    (text.chars().count() as u64).div_ceil(4)
}

/// One request/response exchange.
#[derive(Debug, Clone, PartialEq)]
pub struct Session {
    pub input: ContextItem,
    pub output: ContextItem,
    pub usage: Usage,
    pub wall_time: f64,
}

/// Append-only ordered list of sessions, indexed from 1.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Activity {
    sessions: Vec<Session>,
}

impl Activity {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, session: Session) {
        self.sessions.push(session);
    }

    pub fn len(&self) -> usize {
        self.sessions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sessions.is_empty()
    }

    /// Session `S_i`, 1-based.
    pub fn get(&self, index: usize) -> Option<&Session> {
        index.checked_sub(1).and_then(|i| self.sessions.get(i))
    }

    pub fn sessions(&self) -> &[Session] {
        &self.sessions
    }

    pub fn last(&self) -> Option<&Session> {
        self.sessions.last()
    }

    pub fn total_usage(&self) -> Usage {
        self.sessions.iter().fold(Usage::default(), |acc, s| acc + s.usage)
    }

    pub fn total_wall_time(&self) -> f64 {
        self.sessions.iter().map(|s| s.wall_time).sum()
    }

    /// Appends every session of `other`, preserving order.
    pub fn extend_from(&mut self, other: &Activity) {
        self.sessions.extend(other.sessions.iter().cloned());
    }

    pub fn to_records(&self) -> Vec<SessionRecord> {
        self.sessions
            .iter()
            .enumerate()
            .map(|(i, s)| SessionRecord {
                index: i + 1,
                input_fragments: s.input.fragments().iter().map(FragmentRecord::from).collect(),
                output_fragments: s.output.fragments().iter().map(FragmentRecord::from).collect(),
                usage: s.usage,
                wall_time_s: s.wall_time,
            })
            .collect()
    }

    /// JSON Lines transcript, one session per line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in self.to_records() {
            out.push_str(&serde_json::to_string(&r).expect("records serialize"));
            out.push('\n');
        }
        out
    }

    /// Parses a transcript written by [`Activity::to_jsonl`]. Blob fragments
    /// come back as their text placeholder.
    pub fn from_jsonl(text: &str) -> Result<Self, SessionError> {
        let mut sessions = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let r: SessionRecord =
                serde_json::from_str(line).map_err(|e| SessionError::Protocol(format!("line {}: {e}", n + 1)))?;
            sessions.push(Session {
                input: r.input_fragments.into_iter().map(FragmentRecord::into_item).collect(),
                output: r.output_fragments.into_iter().map(FragmentRecord::into_item).collect(),
                usage: r.usage,
                wall_time: r.wall_time_s,
            });
        }
        Ok(Self { sessions })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FragmentRecord {
    pub role: Role,
    pub text: String,
}

impl From<&Fragment> for FragmentRecord {
    fn from(f: &Fragment) -> Self {
        Self { role: f.role, text: f.content.display_text() }
    }
}

impl FragmentRecord {
    fn into_item(self) -> ContextItem {
        ContextItem::with_role(self.role, self.text)
    }
}

/// One transcript line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SessionRecord {
    pub index: usize,
    pub input_fragments: Vec<FragmentRecord>,
    pub output_fragments: Vec<FragmentRecord>,
    pub usage: Usage,
    pub wall_time_s: f64,
}

/// Raw provider reply before it becomes a [`Session`].
#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub text: String,
    /// Provider-reported usage; estimated from lengths when absent.
    pub usage: Option<Usage>,
    /// Seconds spent in the provider, as reported by the session function.
    pub wall_time: f64,
}

impl Reply {
    pub fn text(text: impl Into<String>) -> Self {
        Self { text: text.into(), usage: None, wall_time: 0.0 }
    }
}

/// The session function **S**: sends a context, returns the reply.
pub trait SessionFunction: Send {
    fn complete(&mut self, input: &ContextItem) -> Result<Reply, SessionError>;
}

impl<S: SessionFunction + ?Sized> SessionFunction for Box<S> {
    fn complete(&mut self, input: &ContextItem) -> Result<Reply, SessionError> {
        (**self).complete(input)
    }
}

impl<S: SessionFunction + ?Sized> SessionFunction for &mut S {
    fn complete(&mut self, input: &ContextItem) -> Result<Reply, SessionError> {
        (**self).complete(input)
    }
}

/// Runs **S** on `input`, appends the session to `activity`, and returns the
/// Agent-role output.
pub fn run_session<S: SessionFunction + ?Sized>(
    session: &mut S,
    input: &ContextItem,
    activity: &mut Activity,
) -> Result<ContextItem, SessionError> {
    let reply = session.complete(input)?;
    let usage = reply.usage.unwrap_or_else(|| Usage {
        prompt: estimate_tokens(&input.render()),
        completion: estimate_tokens(&reply.text),
    });
    let output = ContextItem::agent(reply.text);
    activity.push(Session { input: input.clone(), output: output.clone(), usage, wall_time: reply.wall_time.max(0.0) });
    Ok(output)
}

enum Script {
    Sequence { replies: VecDeque<String>, calls: usize },
    Table(HashMap<String, String>),
}

/// Deterministic session function for tests and replays.
pub struct ScriptedSession {
    script: Script,
}

impl ScriptedSession {
    /// Replies in order, one per call.
    pub fn sequence<I, S>(replies: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        Self { script: Script::Sequence { replies: replies.into_iter().map(Into::into).collect(), calls: 0 } }
    }

    /// Replies looked up by the rendered input.
    pub fn table<I, K, V>(pairs: I) -> Self
    where
        I: IntoIterator<Item = (K, V)>,
        K: Into<String>,
        V: Into<String>,
    {
        Self { script: Script::Table(pairs.into_iter().map(|(k, v)| (k.into(), v.into())).collect()) }
    }

    /// Reads a sequence script: one JSON object `{"reply": "..."}` per line.
    pub fn from_jsonl(reader: impl BufRead) -> Result<Self, SessionError> {
        #[derive(Deserialize)]
        struct Line {
            reply: String,
        }
        let mut replies = Vec::new();
        for (n, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| SessionError::Config(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let l: Line = serde_json::from_str(&line)
                .map_err(|e| SessionError::Config(format!("script line {}: {e}", n + 1)))?;
            replies.push(l.reply);
        }
        Ok(Self::sequence(replies))
    }

    /// Replies not yet consumed (sequence scripts only).
    pub fn remaining(&self) -> usize {
        match &self.script {
            Script::Sequence { replies, .. } => replies.len(),
            Script::Table(_) => usize::MAX,
        }
    }
}

impl SessionFunction for ScriptedSession {
    fn complete(&mut self, input: &ContextItem) -> Result<Reply, SessionError> {
        match &mut self.script {
            Script::Sequence { replies, calls } => {
                *calls += 1;
                replies.pop_front().map(Reply::text).ok_or(SessionError::ScriptExhausted { calls: *calls - 1 })
            }
            Script::Table(map) => {
                let key = input.render();
                map.get(&key).cloned().map(Reply::text).ok_or(SessionError::NoScriptEntry(key))
            }
        }
    }
}

/// Session function backed by a closure.
pub struct FnSession<F>(pub F);

impl<F> SessionFunction for FnSession<F>
where
    F: FnMut(&ContextItem) -> Result<Reply, SessionError> + Send,
{
    fn complete(&mut self, input: &ContextItem) -> Result<Reply, SessionError> {
        (self.0)(input)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scripted_table_maps_input_to_output() {
        let mut s = ScriptedSession::table([("alpha", "beta")]);
        let mut act = Activity::new();
        let out = run_session(&mut s, &ContextItem::text("alpha"), &mut act).unwrap();
        assert_eq!(out, ContextItem::agent("beta"));
        assert_eq!(act.len(), 1);
        assert!(matches!(
            run_session(&mut s, &ContextItem::text("gamma"), &mut act),
            Err(SessionError::NoScriptEntry(_))
        ));
        assert_eq!(act.len(), 1);
    }

    #[test]
    fn activity_indices_follow_call_order() {
        let mut s = ScriptedSession::sequence(["one", "two"]);
        let mut act = Activity::new();
        run_session(&mut s, &ContextItem::text("a"), &mut act).unwrap();
        run_session(&mut s, &ContextItem::text("b"), &mut act).unwrap();
        assert_eq!(act.get(1).unwrap().output.render(), "one");
        assert_eq!(act.get(2).unwrap().output.render(), "two");
        assert!(act.get(0).is_none());
        assert!(act.get(3).is_none());
    }

    #[test]
    fn scripted_usage_is_quarter_char_count() {
        let mut s = ScriptedSession::sequence(["abcde"]);
        let mut act = Activity::new();
        let input = ContextItem::text("123456789") * ContextItem::text("x");
        run_session(&mut s, &input, &mut act).unwrap();
        // rendered input "123456789\nx" has 11 chars
        assert_eq!(act.get(1).unwrap().usage, Usage { prompt: 3, completion: 2 });
    }

    #[test]
    fn exhausted_script_reports_calls() {
        let mut s = ScriptedSession::sequence(["only"]);
        let mut act = Activity::new();
        run_session(&mut s, &ContextItem::text("a"), &mut act).unwrap();
        let err = run_session(&mut s, &ContextItem::text("b"), &mut act).unwrap_err();
        assert_eq!(err, SessionError::ScriptExhausted { calls: 1 });
    }

    #[test]
    fn transcript_round_trips() {
        let mut s = ScriptedSession::sequence(["ok", "done"]);
        let mut act = Activity::new();
        run_session(&mut s, &(ContextItem::system("rules") * ContextItem::text("go")), &mut act).unwrap();
        run_session(&mut s, &ContextItem::tool("result"), &mut act).unwrap();
        let text = act.to_jsonl();
        assert_eq!(text.lines().count(), 2);
        let first: serde_json::Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
        assert_eq!(first["index"], 1);
        assert_eq!(first["input_fragments"][0]["role"], "system");
        assert_eq!(first["output_fragments"][0]["role"], "agent");
        assert!(first["usage"]["prompt"].is_u64());
        assert!(first["wall_time_s"].is_f64());
        assert_eq!(Activity::from_jsonl(&text).unwrap(), act);
    }

    #[test]
    fn script_file_parses_reply_lines() {
        let src = "{\"reply\": \"action: move_right\"}\n\n{\"reply\": \"action: grab box_0\"}\n";
        let s = ScriptedSession::from_jsonl(src.as_bytes()).unwrap();
        assert_eq!(s.remaining(), 2);
        assert!(ScriptedSession::from_jsonl("not json".as_bytes()).is_err());
    }

    #[test]
    fn provider_usage_overrides_estimate() {
        let mut s = FnSession(|_: &ContextItem| {
            Ok(Reply { text: "x".into(), usage: Some(Usage { prompt: 100, completion: 7 }), wall_time: 0.5 })
        });
        let mut act = Activity::new();
        run_session(&mut s, &ContextItem::text("q"), &mut act).unwrap();
        assert_eq!(act.total_usage().total(), 107);
        assert_eq!(act.total_wall_time(), 0.5);
    }
}
