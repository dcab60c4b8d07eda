use std::collections::BTreeMap;
use std::fmt;

use crate::{ContextItem, ParseError};

/// Semantic type of a result variable.
#[derive(Debug, Clone, PartialEq)]
pub enum SemType {
    /// Integer, optionally restricted to an allowed set.
    Integer { allowed: Option<Vec<i64>> },
    Real,
    Boolean,
    /// Single-line text.
    Text,
}

impl SemType {
    pub fn integer() -> Self {
        SemType::Integer { allowed: None }
    }

    pub fn one_of(values: impl IntoIterator<Item = i64>) -> Self {
        SemType::Integer { allowed: Some(values.into_iter().collect()) }
    }

    fn describe(&self) -> String {
        match self {
            SemType::Integer { allowed: None } => "integer".into(),
            SemType::Integer { allowed: Some(v) } => {
                let list: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("integer in {{{}}}", list.join(", "))
            }
            SemType::Real => "real number".into(),
            SemType::Boolean => "boolean".into(),
            SemType::Text => "single-line text".into(),
        }
    }

    fn parse(&self, raw: &str) -> Option<Value> {
        match self {
            SemType::Integer { allowed } => {
                let v: i64 = raw.parse().ok()?;
                match allowed {
                    Some(set) if !set.contains(&v) => None,
                    _ => Some(Value::Int(v)),
                }
            }
            SemType::Real => raw.parse::<f64>().ok().filter(|x| x.is_finite()).map(Value::Real),
            SemType::Boolean => match raw.to_ascii_lowercase().as_str() {
                "true" | "yes" => Some(Value::Bool(true)),
                "false" | "no" => Some(Value::Bool(false)),
                _ => None,
            },
            SemType::Text => (!raw.contains('\n')).then(|| Value::Text(raw.to_string())),
        }
    }

    fn from_json(&self, v: &serde_json::Value) -> Option<Value> {
        match (self, v) {
            (SemType::Text, serde_json::Value::String(s)) => self.parse(s),
            (SemType::Boolean, serde_json::Value::Bool(b)) => Some(Value::Bool(*b)),
            (SemType::Integer { .. }, serde_json::Value::Number(n)) => self.parse(&n.to_string()),
            (SemType::Real, serde_json::Value::Number(n)) => n.as_f64().map(Value::Real),
            (_, serde_json::Value::String(s)) => self.parse(s.trim()),
            _ => None,
        }
    }

    fn admits(&self, v: &Value) -> bool {
        match (self, v) {
            (SemType::Integer { allowed }, Value::Int(x)) => allowed.as_ref().is_none_or(|s| s.contains(x)),
            (SemType::Real, Value::Real(x)) => x.is_finite(),
            (SemType::Boolean, Value::Bool(_)) => true,
            (SemType::Text, Value::Text(t)) => !t.contains('\n') && t.trim() == t && !t.is_empty(),
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub name: String,
    pub ty: SemType,
    pub description: String,
}

/// Declared variables of a result or tool-parameter set.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Schema {
    fields: Vec<Field>,
}

impl Schema {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn field(mut self, name: impl Into<String>, ty: SemType, description: impl Into<String>) -> Self {
        self.fields.push(Field { name: name.into(), ty, description: description.into() });
        self
    }

    pub fn fields(&self) -> &[Field] {
        &self.fields
    }

    /// Whether `bindings` survives a serialize/parse round trip exactly.
    pub fn conforms(&self, bindings: &Bindings) -> bool {
        bindings.len() == self.fields.len()
            && self.fields.iter().all(|f| bindings.get(&f.name).is_some_and(|v| f.ty.admits(v)))
    }
}

/// A program-side value.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Int(v) => write!(f, "{v}"),
            Value::Real(v) => write!(f, "{v}"),
            Value::Bool(v) => write!(f, "{v}"),
            Value::Text(v) => f.write_str(v),
        }
    }
}

pub type Bindings = BTreeMap<String, Value>;

/// **R**: extracts the schema's variables from a reply.
///
/// Accepts either a JSON object or `name: value` lines. A single-variable
/// schema also accepts a bare value as the whole reply.
pub fn parse_result(item: &ContextItem, schema: &Schema) -> Result<Bindings, ParseError> {
    let text = item.text_content()?;
    let trimmed = text.trim();
    if trimmed.starts_with('{') {
        if let Ok(serde_json::Value::Object(map)) = serde_json::from_str::<serde_json::Value>(trimmed) {
            let mut out = Bindings::new();
            for f in schema.fields() {
                let raw = map.get(&f.name).ok_or_else(|| ParseError::MissingVariable(f.name.clone()))?;
                let v = f.ty.from_json(raw).ok_or_else(|| ParseError::TypeMismatch {
                    variable: f.name.clone(),
                    expected: f.ty.describe(),
                    fragment: raw.to_string(),
                })?;
                out.insert(f.name.clone(), v);
            }
            return Ok(out);
        }
    }
    let mut lines: BTreeMap<&str, &str> = BTreeMap::new();
    for line in trimmed.lines() {
        if let Some((k, v)) = line.split_once(':') {
            lines.entry(k.trim()).or_insert(v.trim());
        }
    }
    let mut out = Bindings::new();
    for f in schema.fields() {
        let raw = match lines.get(f.name.as_str()) {
            Some(v) => *v,
            None if schema.fields().len() == 1 && !trimmed.is_empty() => trimmed,
            None => return Err(ParseError::MissingVariable(f.name.clone())),
        };
        let v = f.ty.parse(raw).ok_or_else(|| ParseError::TypeMismatch {
            variable: f.name.clone(),
            expected: f.ty.describe(),
            fragment: raw.to_string(),
        })?;
        out.insert(f.name.clone(), v);
    }
    Ok(out)
}

/// **R⁻¹**: renders bindings as `name: value` lines in key order.
pub fn serialize(bindings: &Bindings) -> ContextItem {
    let lines: Vec<String> = bindings.iter().map(|(k, v)| format!("{k}: {v}")).collect();
    ContextItem::text(lines.join("\n"))
}
