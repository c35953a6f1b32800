//! Conversational yes/no annotation through a chat-completion backend.
//!
//! Each sentence is annotated in one conversation of 19 questions, asked in
//! protocol order; every reply is appended before the next question. Replies
//! are cached by request content so reruns only contact the backend for
//! unanswered turns.

pub mod backend;
pub mod cache;
pub mod prompts;

use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use backend::{BackendError, ChatBackend, ChatRequest, Message, Role, ScriptedBackend};
pub use cache::{cache_key, ResponseCache};
pub use prompts::{build_conversation, Conversation, LabelPromptSpec, PromptError, PromptSet, Turn, Variant};

#[cfg(feature = "http")]
pub use backend::HttpBackend;

use crate::classifiers::{ClassifierError, PredictionSet};
use crate::corpus::ContextTriple;
use crate::labels::{Label, LabelVector, NUM_LABELS};

pub const ANNOTATOR_NAME: &str = "llm";

#[derive(Debug, thiserror::Error)]
pub enum LlmError {
    #[error(transparent)]
    Prompt(#[from] PromptError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("invalid annotator config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Predictions(#[from] ClassifierError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnnotatorConfig {
    pub endpoint: String,
    pub model: String,
    /// Name of the environment variable holding the API token.
    pub credential_env: String,
    pub temperature: f64,
    pub max_retries: u32,
    /// Initial retry delay; doubled after every failed attempt.
    pub backoff_ms: u64,
    pub timeout_secs: u64,
    pub cache_dir: Option<PathBuf>,
    pub max_in_flight: usize,
}

impl Default for AnnotatorConfig {
    fn default() -> Self {
        AnnotatorConfig {
            endpoint: "https://api.openai.com/v1/chat/completions".into(),
            model: "gpt-3.5-turbo".into(),
            credential_env: "OPENAI_API_KEY".into(),
            temperature: 0.0,
            max_retries: 3,
            backoff_ms: 1000,
            timeout_secs: 60,
            cache_dir: None,
            max_in_flight: 4,
        }
    }
}

impl AnnotatorConfig {
    pub fn check(&self) -> Result<(), LlmError> {
        if !(self.temperature.is_finite() && self.temperature >= 0.0) {
            return Err(LlmError::InvalidConfig(format!("temperature must be >= 0, got {}", self.temperature)));
        }
        if self.max_in_flight == 0 {
            return Err(LlmError::InvalidConfig("max_in_flight must be at least 1".into()));
        }
        if self.model.is_empty() {
            return Err(LlmError::InvalidConfig("model must not be empty".into()));
        }
        Ok(())
    }

    pub fn open_cache(&self) -> std::io::Result<ResponseCache> {
        match &self.cache_dir {
            Some(dir) => ResponseCache::open(dir),
            None => Ok(ResponseCache::disabled()),
        }
    }

    /// Hash of everything that changes the replies: model, temperature,
    /// variant and prompt texts.
    pub fn run_hash(&self, prompts: &PromptSet, variant: Variant) -> String {
        let material = serde_json::json!({
            "model": self.model,
            "temperature": self.temperature,
            "variant": variant,
            "prompts": prompts.fingerprint(),
        });
        hex::encode(Sha256::digest(material.to_string().as_bytes()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Answer {
    Yes,
    No,
    Abstain,
}

/// Leading `oui` / `non`, ignoring case, surrounding punctuation and markup.
pub fn parse_binary_response(text: &str) -> Answer {
    let word: String = text
        .trim_start_matches(|c: char| !c.is_alphanumeric())
        .chars()
        .take_while(|c| c.is_alphabetic())
        .flat_map(char::to_lowercase)
        .collect();
    match word.as_str() {
        "oui" => Answer::Yes,
        "non" => Answer::No,
        _ => Answer::Abstain,
    }
}

#[derive(Debug, Clone)]
pub struct SentenceAnnotation {
    pub sent_id: String,
    /// Canonical label order.
    pub answers: [Answer; NUM_LABELS],
    pub transcript: Conversation,
    pub network_calls: usize,
    pub cache_hits: usize,
}

impl SentenceAnnotation {
    /// Raw answers; abstentions are false. No derivation is applied.
    pub fn vector(&self) -> LabelVector {
        LabelVector::from_bools(&self.answers.map(|a| a == Answer::Yes)).expect("19 answers")
    }

    pub fn abstains(&self) -> usize {
        self.answers.iter().filter(|&&a| a == Answer::Abstain).count()
    }
}

#[derive(Debug, thiserror::Error)]
#[error("sentence `{sent_id}`, question `{label}`: {source}")]
pub struct AnnotateError {
    pub sent_id: String,
    pub label: Label,
    /// Transcript up to the failed question.
    pub partial: Box<Conversation>,
    /// Backend calls made before giving up, the failed one included.
    pub network_calls: usize,
    #[source]
    pub source: BackendError,
}

fn complete_with_retry(backend: &dyn ChatBackend, req: &ChatRequest<'_>, cfg: &AnnotatorConfig) -> Result<String, BackendError> {
    let mut delay = cfg.backoff_ms;
    let mut attempt = 0;
    loop {
        match backend.complete(req) {
            Err(e) if e.is_transient() && attempt < cfg.max_retries => {
                log::warn!("{} / {}: {e}; retrying in {delay} ms", req.sent_id, req.label);
                std::thread::sleep(Duration::from_millis(delay));
                delay = delay.saturating_mul(2);
                attempt += 1;
            }
            other => return other,
        }
    }
}

/// Runs the 19-question conversation for one sentence.
pub fn annotate_sentence(
    ctx: &ContextTriple,
    prompts: &PromptSet,
    variant: Variant,
    backend: &dyn ChatBackend,
    cfg: &AnnotatorConfig,
    cache: &ResponseCache,
) -> Result<SentenceAnnotation, AnnotateError> {
    let mut conv = build_conversation(ctx, prompts, variant).map_err(|e| AnnotateError {
        sent_id: ctx.target.sent_id.clone(),
        label: Label::Emotional,
        partial: Box::new(Conversation {
            variant,
            system: String::new(),
            turns: Vec::new(),
        }),
        network_calls: 0,
        source: BackendError::Fatal(e.to_string()),
    })?;
    let sent_id = ctx.target.sent_id.as_str();
    let mut answers = [Answer::Abstain; NUM_LABELS];
    let (mut network_calls, mut cache_hits) = (0, 0);

    for k in 0..conv.turns.len() {
        let label = conv.turns[k].label;
        let messages = conv.messages_for(k);
        let key = cache_key(&cfg.model, cfg.temperature, &messages);
        let reply = match cache.get(&key) {
            Some(r) => {
                cache_hits += 1;
                r
            }
            None => {
                network_calls += 1;
                let req = ChatRequest {
                    model: &cfg.model,
                    temperature: cfg.temperature,
                    messages: &messages,
                    sent_id,
                    label,
                };
                let r = complete_with_retry(backend, &req, cfg).map_err(|source| {
                    conv.turns.truncate(k + 1);
                    AnnotateError {
                        sent_id: sent_id.to_string(),
                        label,
                        partial: Box::new(conv.clone()),
                        network_calls,
                        source,
                    }
                })?;
                if let Err(e) = cache.put(&key, &r) {
                    log::warn!("could not cache reply for {sent_id} / {label}: {e}");
                }
                r
            }
        };
        let answer = parse_binary_response(&reply);
        if answer == Answer::Abstain {
            log::info!("{sent_id} / {label}: unparseable reply {reply:?} counted as abstention");
        }
        answers[label.index()] = answer;
        conv.turns[k].assistant = Some(reply);
    }

    Ok(SentenceAnnotation {
        sent_id: sent_id.to_string(),
        answers,
        transcript: conv,
        network_calls,
        cache_hits,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BatchFailure {
    pub sent_id: String,
    pub message: String,
}

#[derive(Debug)]
pub struct BatchOutcome {
    /// One row per successfully annotated sentence, input order, scores in {0, 1}.
    pub predictions: PredictionSet,
    pub failures: Vec<BatchFailure>,
    pub abstains: usize,
    pub network_calls: usize,
    pub cache_hits: usize,
    /// Conversations of the annotated sentences, input order.
    pub transcripts: Vec<Conversation>,
}

impl BatchOutcome {
    pub fn summary(&self) -> String {
        format!(
            "{} annotated, {} failed, {} abstentions, {} backend calls, {} cache hits",
            self.predictions.len(),
            self.failures.len(),
            self.abstains,
            self.network_calls,
            self.cache_hits
        )
    }
}

/// Annotates every context, at most `cfg.max_in_flight` sentences at a time.
/// Per-sentence failures are collected rather than aborting the batch.
pub fn run_batch(
    contexts: &[ContextTriple],
    prompts: &PromptSet,
    variant: Variant,
    backend: &dyn ChatBackend,
    cfg: &AnnotatorConfig,
    cache: &ResponseCache,
) -> Result<BatchOutcome, LlmError> {
    cfg.check()?;
    prompts.validate()?;
    let results: Vec<Mutex<Option<Result<SentenceAnnotation, AnnotateError>>>> =
        contexts.iter().map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = cfg.max_in_flight.min(contexts.len()).max(1);
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(ctx) = contexts.get(i) else { break };
                let r = annotate_sentence(ctx, prompts, variant, backend, cfg, cache);
                *results[i].lock().expect("result slot") = Some(r);
            });
        }
    });

    let mut out = BatchOutcome {
        predictions: PredictionSet::new(ANNOTATOR_NAME).with_config_hash(cfg.run_hash(prompts, variant)),
        failures: Vec::new(),
        abstains: 0,
        network_calls: 0,
        cache_hits: 0,
        transcripts: Vec::new(),
    };
    for slot in results {
        match slot.into_inner().expect("result slot").expect("every context processed") {
            Ok(a) => {
                out.abstains += a.abstains();
                out.network_calls += a.network_calls;
                out.cache_hits += a.cache_hits;
                out.predictions.push_vector(a.sent_id.clone(), a.vector())?;
                out.transcripts.push(a.transcript);
            }
            Err(e) => {
                log::error!("{e}");
                out.network_calls += e.network_calls;
                out.failures.push(BatchFailure {
                    sent_id: e.sent_id.clone(),
                    message: e.to_string(),
                });
            }
        }
    }
    Ok(out)
}
