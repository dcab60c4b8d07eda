use rand::Rng;

use crate::{ContextItem, Role};

/// In-context-learning example store. Questions are kept as User items and
/// answers as Agent items; pairs are unique.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ExampleBuffer {
    examples: Vec<(ContextItem, ContextItem)>,
    capacity: Option<usize>,
}

/// What an [`icl_update`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IclOutcome {
    Replaced { index: usize },
    Inserted,
    /// The pair was already present.
    Unchanged,
}

impl ExampleBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    /// Bounded buffer; inserting at capacity evicts the oldest example.
    pub fn bounded(capacity: usize) -> Self {
        Self { examples: Vec::new(), capacity: Some(capacity.max(1)) }
    }

    pub fn len(&self) -> usize {
        self.examples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.examples.is_empty()
    }

    pub fn capacity(&self) -> Option<usize> {
        self.capacity
    }

    pub fn examples(&self) -> &[(ContextItem, ContextItem)] {
        &self.examples
    }

    pub fn contains(&self, question: &ContextItem, answer: &ContextItem) -> bool {
        let pair = normalize(question, answer);
        self.examples.contains(&pair)
    }

    /// Appends a pair unless it is already present.
    pub fn insert(&mut self, question: &ContextItem, answer: &ContextItem) -> bool {
        let pair = normalize(question, answer);
        if self.examples.contains(&pair) {
            return false;
        }
        if self.capacity.is_some_and(|c| self.examples.len() >= c) {
            self.examples.remove(0);
        }
        self.examples.push(pair);
        true
    }
}

fn normalize(question: &ContextItem, answer: &ContextItem) -> (ContextItem, ContextItem) {
    (question.retagged(Role::User), answer.retagged(Role::Agent))
}

/// `Q₁·A₁…Qₙ·Aₙ·query` in insertion order.
pub fn icl_pattern(buffer: &ExampleBuffer, query: &ContextItem) -> ContextItem {
    let mut out = ContextItem::empty();
    for (q, a) in &buffer.examples {
        out.append(q);
        out.append(a);
    }
    out.then(query)
}

/// Buffer update: a correct answer replaces a uniformly chosen example, a
/// wrong one inserts the corrected pair. Answers compare by trimmed text.
pub fn icl_update<F, R>(
    buffer: &mut ExampleBuffer,
    question: &ContextItem,
    answer: &ContextItem,
    correct_fn: F,
    rng: &mut R,
) -> IclOutcome
where
    F: Fn(&ContextItem) -> ContextItem,
    R: Rng + ?Sized,
{
    let expected = correct_fn(question);
    let is_correct = answer.render().trim() == expected.render().trim();
    if !is_correct {
        return if buffer.insert(question, &expected) { IclOutcome::Inserted } else { IclOutcome::Unchanged };
    }
    if buffer.is_empty() {
        return if buffer.insert(question, answer) { IclOutcome::Inserted } else { IclOutcome::Unchanged };
    }
    let pair = normalize(question, answer);
    if buffer.examples.contains(&pair) {
        return IclOutcome::Unchanged;
    }
    let index = rng.gen_range(0..buffer.examples.len());
    buffer.examples[index] = pair;
    IclOutcome::Replaced { index }
}
