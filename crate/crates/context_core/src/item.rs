use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::ContextError;

/// Speaker of a fragment. `User` is the default.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    #[default]
    User,
    Agent,
    System,
    Tool,
}

impl Role {
    pub const ALL: [Role; 4] = [Role::User, Role::Agent, Role::System, Role::Tool];

    pub fn as_str(self) -> &'static str {
        match self {
            Role::User => "user",
            Role::Agent => "agent",
            Role::System => "system",
            Role::Tool => "tool",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Fragment payload: text, or an opaque media blob that concatenates but
/// never embeds.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Content {
    Text(String),
    Blob { media_type: String, bytes: Vec<u8> },
}

impl Content {
    /// Text shown for this payload in renders and transcripts.
    pub fn display_text(&self) -> String {
        match self {
            Content::Text(t) => t.clone(),
            Content::Blob { media_type, bytes } => format!("[{media_type}; {} bytes]", bytes.len()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fragment {
    pub role: Role,
    pub content: Content,
}

impl Fragment {
    pub fn text(role: Role, text: impl Into<String>) -> Self {
        Self { role, content: Content::Text(text.into()) }
    }

    pub fn as_text(&self) -> Option<&str> {
        match &self.content {
            Content::Text(t) => Some(t),
            Content::Blob { .. } => None,
        }
    }
}

/// One rendered chat message: adjacent fragments of equal role merged.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

/// Element of the context monoid: an ordered list of role-tagged fragments.
///
/// `ContextItem::empty()` is the identity; `*` (or [`concat`]) appends
/// fragment lists.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ContextItem {
    fragments: Vec<Fragment>,
}

impl ContextItem {
    /// The empty item ε.
    pub fn empty() -> Self {
        Self::default()
    }

    /// A single User-role text fragment.
    pub fn text(text: impl Into<String>) -> Self {
        Self::with_role(Role::User, text)
    }

    pub fn with_role(role: Role, text: impl Into<String>) -> Self {
        Self { fragments: vec![Fragment::text(role, text)] }
    }

    pub fn user(text: impl Into<String>) -> Self {
        Self::with_role(Role::User, text)
    }

    pub fn agent(text: impl Into<String>) -> Self {
        Self::with_role(Role::Agent, text)
    }

    pub fn system(text: impl Into<String>) -> Self {
        Self::with_role(Role::System, text)
    }

    pub fn tool(text: impl Into<String>) -> Self {
        Self::with_role(Role::Tool, text)
    }

    pub fn blob(role: Role, media_type: impl Into<String>, bytes: Vec<u8>) -> Self {
        Self {
            fragments: vec![Fragment { role, content: Content::Blob { media_type: media_type.into(), bytes } }],
        }
    }

    pub fn from_fragments(fragments: Vec<Fragment>) -> Self {
        Self { fragments }
    }

    pub fn fragments(&self) -> &[Fragment] {
        &self.fragments
    }

    pub fn into_fragments(self) -> Vec<Fragment> {
        self.fragments
    }

    /// Number of fragments.
    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    /// In-place `self · other`.
    pub fn append(&mut self, other: &ContextItem) {
        self.fragments.extend_from_slice(&other.fragments);
    }

    /// `self · other`.
    pub fn then(mut self, other: &ContextItem) -> Self {
        self.append(other);
        self
    }

    /// `self^k`; `k = 0` gives ε.
    pub fn repeat(&self, k: usize) -> Self {
        let mut fragments = Vec::with_capacity(self.fragments.len() * k);
        for _ in 0..k {
            fragments.extend_from_slice(&self.fragments);
        }
        Self { fragments }
    }

    /// Same content with every fragment re-tagged to `role`.
    pub fn retagged(&self, role: Role) -> Self {
        Self {
            fragments: self.fragments.iter().map(|f| Fragment { role, content: f.content.clone() }).collect(),
        }
    }

    /// Fragment texts joined by newlines; ε renders to "".
    pub fn render(&self) -> String {
        self.fragments.iter().map(|f| f.content.display_text()).collect::<Vec<_>>().join("\n")
    }

    /// Text of a text-only item, joined by newlines. Fails on blobs.
    pub fn text_content(&self) -> Result<String, ContextError> {
        let mut parts = Vec::with_capacity(self.fragments.len());
        for f in &self.fragments {
            match &f.content {
                Content::Text(t) => parts.push(t.as_str()),
                Content::Blob { media_type, .. } => {
                    return Err(ContextError::Multimodal(media_type.clone()));
                }
            }
        }
        Ok(parts.join("\n"))
    }

    /// Flat chat transcript with adjacent equal-role fragments merged.
    pub fn to_messages(&self) -> Vec<Message> {
        let mut out: Vec<Message> = Vec::new();
        for f in &self.fragments {
            let text = f.content.display_text();
            match out.last_mut() {
                Some(m) if m.role == f.role => {
                    m.content.push('\n');
                    m.content.push_str(&text);
                }
                _ => out.push(Message { role: f.role, content: text }),
            }
        }
        out
    }
}

/// In-order concatenation of `items`.
pub fn concat<'a>(items: impl IntoIterator<Item = &'a ContextItem>) -> ContextItem {
    let mut out = ContextItem::empty();
    for item in items {
        out.append(item);
    }
    out
}

impl Mul<&ContextItem> for &ContextItem {
    type Output = ContextItem;

    fn mul(self, rhs: &ContextItem) -> ContextItem {
        self.clone().then(rhs)
    }
}

impl Mul<&ContextItem> for ContextItem {
    type Output = ContextItem;

    fn mul(self, rhs: &ContextItem) -> ContextItem {
        self.then(rhs)
    }
}

impl Mul for ContextItem {
    type Output = ContextItem;

    fn mul(self, rhs: ContextItem) -> ContextItem {
        self.then(&rhs)
    }
}

impl From<&str> for ContextItem {
    fn from(s: &str) -> Self {
        ContextItem::text(s)
    }
}

impl From<String> for ContextItem {
    fn from(s: String) -> Self {
        ContextItem::text(s)
    }
}

impl FromIterator<ContextItem> for ContextItem {
    fn from_iter<I: IntoIterator<Item = ContextItem>>(iter: I) -> Self {
        let mut out = ContextItem::empty();
        for item in iter {
            out.append(&item);
        }
        out
    }
}
