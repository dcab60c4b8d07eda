use std::fmt;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use crate::{parse_result, Bindings, ContextItem, ParseError, Schema, Value};

pub type ToolHook = Arc<dyn Fn(&Bindings) -> Result<Value, String> + Send + Sync>;

/// Interface from the context space to a program function.
#[derive(Clone)]
pub struct ToolDescriptor {
    pub name: String,
    pub description: String,
    pub parameters: Schema,
    hook: ToolHook,
}

impl fmt::Debug for ToolDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ToolDescriptor")
            .field("name", &self.name)
            .field("parameters", &self.parameters)
            .finish_non_exhaustive()
    }
}

impl ToolDescriptor {
    pub fn new<F>(name: impl Into<String>, description: impl Into<String>, parameters: Schema, hook: F) -> Self
    where
        F: Fn(&Bindings) -> Result<Value, String> + Send + Sync + 'static,
    {
        Self { name: name.into(), description: description.into(), parameters, hook: Arc::new(hook) }
    }

    /// Runs the hook; failures and panics become `error: ...` text.
    pub fn call(&self, args: &Bindings) -> String {
        match catch_unwind(AssertUnwindSafe(|| (self.hook)(args))) {
            Ok(Ok(v)) => v.to_string(),
            Ok(Err(e)) => format!("error: {e}"),
            Err(panic) => {
                let msg = panic
                    .downcast_ref::<&str>()
                    .map(|s| s.to_string())
                    .or_else(|| panic.downcast_ref::<String>().cloned())
                    .unwrap_or_else(|| "tool panicked".into());
                format!("error: {msg}")
            }
        }
    }
}

/// Parses `call_item` against the tool's parameters, runs the hook, and
/// returns `context · result` with the result as a Tool-role fragment.
pub fn invoke_tool(
    descriptor: &ToolDescriptor,
    call_item: &ContextItem,
    context: &ContextItem,
) -> Result<ContextItem, ParseError> {
    let args = parse_result(call_item, &descriptor.parameters)?;
    let result = descriptor.call(&args);
    Ok(context.clone().then(&ContextItem::tool(result)))
}
