//! Memory, chatbot, retrieval and routing patterns.

use embedding::{cossim, Embedder, EmbeddingVector};

use crate::{
    parse_result, run_session, Activity, ContextItem, RagError, RouteError, Schema, SemType, SessionFunction, Value,
};

/// `I₁·O₁·I₂·O₂…Iₙ·Oₙ`.
pub fn memory_pattern(activity: &Activity) -> ContextItem {
    let mut out = ContextItem::empty();
    for s in activity.sessions() {
        out.append(&s.input);
        out.append(&s.output);
    }
    out
}

/// `memory_pattern(activity) · user_text`.
pub fn chatbot_pattern(activity: &Activity, user_text: &ContextItem) -> ContextItem {
    memory_pattern(activity).then(user_text)
}

pub const SUPPLEMENTARY_MARKER: &str = "Supplementary material:";

/// In-memory retrieval corpus with precomputed unit vectors.
#[derive(Debug, Clone, Default)]
pub struct KnowledgeBase {
    entries: Vec<(String, EmbeddingVector)>,
}

impl KnowledgeBase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Embeds every material with `embedder`.
    pub fn build<E, I, S>(embedder: &E, materials: I) -> Result<Self, RagError>
    where
        E: Embedder + ?Sized,
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let mut kb = Self::new();
        for m in materials {
            kb.insert(embedder, m)?;
        }
        Ok(kb)
    }

    pub fn insert<E: Embedder + ?Sized>(&mut self, embedder: &E, text: impl Into<String>) -> Result<(), RagError> {
        let text = text.into();
        let v = embedder.embed(&text)?;
        self.entries.push((text, v));
        Ok(())
    }

    /// Builds a knowledge base from caller-supplied vectors.
    pub fn from_parts(entries: Vec<(String, EmbeddingVector)>) -> Self {
        Self { entries }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, EmbeddingVector)] {
        &self.entries
    }

    /// Index of the most cosine-similar entry; ties go to the lowest index.
    pub fn nearest(&self, query: &EmbeddingVector) -> Result<usize, RagError> {
        let mut best: Option<(usize, f64)> = None;
        for (i, (_, v)) in self.entries.iter().enumerate() {
            let s = cossim(query, v)?;
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
        best.map(|(i, _)| i).ok_or(RagError::EmptyKnowledgeBase)
    }
}

/// `query · "Supplementary material:" · nearest(query)`.
pub fn rag_pattern<E: Embedder + ?Sized>(kb: &KnowledgeBase, query: &str, embedder: &E) -> Result<ContextItem, RagError> {
    if kb.is_empty() {
        return Err(RagError::EmptyKnowledgeBase);
    }
    let q = embedder.embed(query)?;
    let i = kb.nearest(&q)?;
    Ok(ContextItem::text(query) * ContextItem::text(SUPPLEMENTARY_MARKER) * ContextItem::text(kb.entries[i].0.clone()))
}

pub const ROUTE_CORRECTION: &str = "Your previous reply was not valid. Reply with a single digit: 0 or 1.";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RouteOutcome {
    pub branch: u8,
    pub reprompts: u32,
}

fn route_schema() -> Schema {
    Schema::new().field("answer", SemType::one_of([0, 1]), "selected branch")
}

/// Runs **S** on `router_prompt · query` and parses a branch in {0, 1},
/// reprompting once with [`ROUTE_CORRECTION`] on an invalid reply.
pub fn route<S: SessionFunction + ?Sized>(
    router_prompt: &ContextItem,
    query: &ContextItem,
    session: &mut S,
    activity: &mut Activity,
) -> Result<RouteOutcome, RouteError> {
    let base = router_prompt.clone().then(query);
    let schema = route_schema();
    let mut input = base.clone();
    let mut reprompts = 0;
    loop {
        let reply = run_session(session, &input, activity)?;
        if let Ok(b) = parse_result(&reply, &schema) {
            if let Some(Value::Int(v)) = b.get("answer") {
                return Ok(RouteOutcome { branch: *v as u8, reprompts });
            }
        }
        if reprompts == 1 {
            return Err(RouteError::InvalidReply { reply: reply.render(), reprompts });
        }
        reprompts += 1;
        input = base.clone().then(&ContextItem::text(ROUTE_CORRECTION));
    }
}
