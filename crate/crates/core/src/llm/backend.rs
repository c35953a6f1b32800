//! Chat-completion backends.

use std::sync::atomic::{AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};

use crate::labels::Label;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Role {
    System,
    User,
    Assistant,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Message {
    pub role: Role,
    pub content: String,
}

impl Message {
    pub fn new(role: Role, content: impl Into<String>) -> Self {
        Message {
            role,
            content: content.into(),
        }
    }
}

/// One completion request. `sent_id` and `label` are bookkeeping for logs and
/// scripted backends; they are not sent over the wire.
#[derive(Debug, Clone, Copy)]
pub struct ChatRequest<'a> {
    pub model: &'a str,
    pub temperature: f64,
    pub messages: &'a [Message],
    pub sent_id: &'a str,
    pub label: Label,
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum BackendError {
    /// Worth retrying: timeouts, connection failures, 429 and 5xx replies.
    #[error("transient backend failure: {0}")]
    Transient(String),
    #[error("backend failure: {0}")]
    Fatal(String),
    #[error("credential environment variable `{0}` is not set")]
    MissingCredential(String),
}

impl BackendError {
    pub fn is_transient(&self) -> bool {
        matches!(self, BackendError::Transient(_))
    }
}

pub trait ChatBackend: Send + Sync {
    fn complete(&self, req: &ChatRequest<'_>) -> Result<String, BackendError>;
}

type Script = dyn Fn(&ChatRequest<'_>) -> Result<String, BackendError> + Send + Sync;

/// Backend answering from a closure; counts every call.
pub struct ScriptedBackend {
    script: Box<Script>,
    calls: AtomicUsize,
}

impl ScriptedBackend {
    pub fn new<F>(script: F) -> Self
    where
        F: Fn(&ChatRequest<'_>) -> Result<String, BackendError> + Send + Sync + 'static,
    {
        ScriptedBackend {
            script: Box::new(script),
            calls: AtomicUsize::new(0),
        }
    }

    /// Replies depend only on the sentence id and the label being asked.
    pub fn answers<F, S>(f: F) -> Self
    where
        F: Fn(&str, Label) -> S + Send + Sync + 'static,
        S: Into<String>,
    {
        Self::new(move |req| Ok(f(req.sent_id, req.label).into()))
    }

    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::SeqCst)
    }
}

impl ChatBackend for ScriptedBackend {
    fn complete(&self, req: &ChatRequest<'_>) -> Result<String, BackendError> {
        self.calls.fetch_add(1, Ordering::SeqCst);
        (self.script)(req)
    }
}

#[cfg(feature = "http")]
pub use http::HttpBackend;

#[cfg(feature = "http")]
mod http {
    use std::time::Duration;

    use serde::{Deserialize, Serialize};

    use super::{BackendError, ChatBackend, ChatRequest, Message};

    #[derive(Serialize)]
    struct Body<'a> {
        model: &'a str,
        temperature: f64,
        messages: &'a [Message],
    }

    #[derive(Deserialize)]
    struct Reply {
        choices: Vec<Choice>,
    }

    #[derive(Deserialize)]
    struct Choice {
        message: ReplyMessage,
    }

    #[derive(Deserialize)]
    struct ReplyMessage {
        content: Option<String>,
    }

    /// Blocking client for the generic chat-completion wire format:
    /// `POST {model, temperature, messages}` → `{choices: [{message: {content}}]}`.
    pub struct HttpBackend {
        agent: ureq::Agent,
        endpoint: String,
        token: String,
    }

    impl std::fmt::Debug for HttpBackend {
        fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
            f.debug_struct("HttpBackend").field("endpoint", &self.endpoint).finish_non_exhaustive()
        }
    }

    impl HttpBackend {
        /// Reads the bearer token from the environment variable `credential_env`.
        pub fn new(endpoint: &str, credential_env: &str, timeout: Duration) -> Result<Self, BackendError> {
            let token = std::env::var(credential_env)
                .ok()
                .filter(|t| !t.is_empty())
                .ok_or_else(|| BackendError::MissingCredential(credential_env.to_string()))?;
            let agent = ureq::Agent::config_builder()
                .timeout_global(Some(timeout))
                .http_status_as_error(false)
                .build()
                .into();
            Ok(HttpBackend {
                agent,
                endpoint: endpoint.to_string(),
                token,
            })
        }
    }

    impl ChatBackend for HttpBackend {
        fn complete(&self, req: &ChatRequest<'_>) -> Result<String, BackendError> {
            let body = Body {
                model: req.model,
                temperature: req.temperature,
                messages: req.messages,
            };
            let mut resp = self
                .agent
                .post(&self.endpoint)
                .header("Authorization", &format!("Bearer {}", self.token))
                .send_json(&body)
                .map_err(|e| BackendError::Transient(e.to_string()))?;
            let status = resp.status().as_u16();
            if status == 429 || status >= 500 {
                return Err(BackendError::Transient(format!("HTTP {status}")));
            }
            if status >= 400 {
                let detail = resp.body_mut().read_to_string().unwrap_or_default();
                return Err(BackendError::Fatal(format!("HTTP {status}: {detail}")));
            }
            let reply: Reply = resp
                .body_mut()
                .read_json()
                .map_err(|e| BackendError::Fatal(format!("malformed reply: {e}")))?;
            reply
                .choices
                .into_iter()
                .next()
                .and_then(|c| c.message.content)
                .ok_or_else(|| BackendError::Fatal("reply has no message content".into()))
        }
    }
}
