use embedding::EmbedError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ContextError {
    #[error("multimodal payload ({0}) has no text and cannot be embedded")]
    Multimodal(String),
    #[error("pattern `{pattern}` is missing parameter `{parameter}`")]
    MissingParameter { pattern: String, parameter: String },
    #[error("pattern `{pattern}` has no parameter `{parameter}`")]
    UnknownParameter { pattern: String, parameter: String },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SessionError {
    #[error("session transport failed after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("malformed provider reply: {0}")]
    Protocol(String),
    #[error("scripted session exhausted after {calls} call(s)")]
    ScriptExhausted { calls: usize },
    #[error("scripted session has no reply for input: {0}")]
    NoScriptEntry(String),
    #[error("missing environment variable {0}")]
    MissingEnv(&'static str),
    #[error("invalid session configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Context(#[from] ContextError),
}

impl SessionError {
    pub fn is_retryable(&self) -> bool {
        matches!(self, SessionError::Transport { .. })
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("missing variable `{0}`")]
    MissingVariable(String),
    #[error("variable `{variable}`: expected {expected}, got `{fragment}`")]
    TypeMismatch { variable: String, expected: String, fragment: String },
    #[error(transparent)]
    Context(#[from] ContextError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RagError {
    #[error("empty knowledge base")]
    EmptyKnowledgeBase,
    #[error(transparent)]
    Embed(#[from] EmbedError),
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RouteError {
    #[error("router reply `{reply}` is not 0 or 1 after {reprompts} reprompt(s)")]
    InvalidReply { reply: String, reprompts: u32 },
    #[error(transparent)]
    Session(#[from] SessionError),
}
