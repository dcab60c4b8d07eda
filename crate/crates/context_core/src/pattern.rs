use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::{ContextError, ContextItem};

/// Named context slots, used for pattern arguments and pattern state.
pub type Slots = BTreeMap<String, ContextItem>;

type Body = Arc<dyn Fn(&Slots, &mut Slots) -> ContextItem + Send + Sync>;

/// A function from parameter bindings and private state to a context item.
///
/// State belongs to the instance: clones share the body but copy the state.
#[derive(Clone)]
pub struct ContextPattern {
    name: String,
    parameters: Vec<String>,
    state: Slots,
    body: Body,
}

impl fmt::Debug for ContextPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContextPattern")
            .field("name", &self.name)
            .field("parameters", &self.parameters)
            .field("state", &self.state)
            .finish_non_exhaustive()
    }
}

impl ContextPattern {
    pub fn new<F>(name: impl Into<String>, parameters: &[&str], body: F) -> Self
    where
        F: Fn(&Slots, &mut Slots) -> ContextItem + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            parameters: parameters.iter().map(|p| p.to_string()).collect(),
            state: Slots::new(),
            body: Arc::new(body),
        }
    }

    /// A parameterless pattern that always yields `item`.
    pub fn constant(name: impl Into<String>, item: ContextItem) -> Self {
        Self::new(name, &[], move |_, _| item.clone())
    }

    pub fn with_state(mut self, slot: impl Into<String>, value: ContextItem) -> Self {
        self.state.insert(slot.into(), value);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn parameters(&self) -> &[String] {
        &self.parameters
    }

    pub fn state(&self) -> &Slots {
        &self.state
    }

    /// Evaluates the body. Every declared parameter must be bound and no
    /// undeclared ones may be passed.
    pub fn instantiate(&mut self, args: &Slots) -> Result<ContextItem, ContextError> {
        for p in &self.parameters {
            if !args.contains_key(p) {
                return Err(ContextError::MissingParameter { pattern: self.name.clone(), parameter: p.clone() });
            }
        }
        if let Some(extra) = args.keys().find(|k| !self.parameters.contains(k)) {
            return Err(ContextError::UnknownParameter { pattern: self.name.clone(), parameter: extra.clone() });
        }
        Ok((self.body)(args, &mut self.state))
    }

    /// Sequential composition: instantiates `parts` left to right with the
    /// arguments each declares, concatenating their outputs.
    pub fn compose(name: impl Into<String>, parts: Vec<ContextPattern>) -> Self {
        let mut params: Vec<String> = Vec::new();
        for p in &parts {
            for q in &p.parameters {
                if !params.contains(q) {
                    params.push(q.clone());
                }
            }
        }
        let parts = std::sync::Mutex::new(parts);
        let refs: Vec<&str> = params.iter().map(String::as_str).collect();
        Self::new(name, &refs, move |args, _| {
            let mut parts = parts.lock().expect("pattern lock poisoned");
            let mut out = ContextItem::empty();
            for part in parts.iter_mut() {
                let own: Slots = part
                    .parameters
                    .iter()
                    .filter_map(|k| args.get(k).map(|v| (k.clone(), v.clone())))
                    .collect();
                let item = part.instantiate(&own).expect("composed arguments cover every part");
                out.append(&item);
            }
            out
        })
    }
}

/// Convenience for building argument maps.
pub fn slots<'a>(pairs: impl IntoIterator<Item = (&'a str, ContextItem)>) -> Slots {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

/// A pattern mapping an item sequence to an item sequence.
pub trait TransformPattern {
    fn transform(&self, items: &[ContextItem]) -> Vec<ContextItem>;
}

impl<F> TransformPattern for F
where
    F: Fn(&[ContextItem]) -> Vec<ContextItem>,
{
    fn transform(&self, items: &[ContextItem]) -> Vec<ContextItem> {
        self(items)
    }
}
