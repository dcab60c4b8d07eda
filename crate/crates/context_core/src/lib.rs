//! Structural context model: the context-item monoid, context patterns,
//! sessions and activities, the result function **R** and its inverse, and
//! the canonical patterns built on them (memory, chatbot, tool bridging,
//! in-context learning, retrieval, routing).

mod error;
mod icl;
mod item;
mod pattern;
mod patterns;
mod remote;
mod result;
mod session;
mod tool;

pub use error::{ContextError, ParseError, RagError, RouteError, SessionError};
pub use icl::{icl_pattern, icl_update, ExampleBuffer, IclOutcome};
pub use item::{concat, Content, ContextItem, Fragment, Message, Role};
pub use pattern::{slots, ContextPattern, Slots, TransformPattern};
pub use patterns::{
    chatbot_pattern, memory_pattern, rag_pattern, route, KnowledgeBase, RouteOutcome, ROUTE_CORRECTION,
    SUPPLEMENTARY_MARKER,
};
pub use remote::{RemoteChatConfig, RemoteChatSession, ENV_API_KEY, ENV_BASE_URL, ENV_MODEL};
pub use result::{parse_result, serialize, Bindings, Field, Schema, SemType, Value};
pub use session::{
    estimate_tokens, run_session, Activity, FnSession, FragmentRecord, Reply, ScriptedSession, Session,
    SessionFunction, SessionRecord, Usage,
};
pub use tool::{invoke_tool, ToolDescriptor, ToolHook};
