//! Prompt specifications and conversation rendering.
//!
//! Label definitions, questions and examples are data, loaded from JSON (the
//! built-in set is compiled in from `data/label_prompts.json`).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use sha2::{Digest, Sha256};

use super::backend::{Message, Role};
use crate::corpus::ContextTriple;
use crate::labels::{Label, Task, NUM_LABELS};

const BUILTIN: &str = include_str!("../../data/label_prompts.json");

/// Question order of the protocol: presence, categories, types, modes.
pub const PROTOCOL_ORDER: [Label; NUM_LABELS] = [
    Label::Emotional,
    Label::Anger,
    Label::Disgust,
    Label::Joy,
    Label::Fear,
    Label::Surprise,
    Label::Sadness,
    Label::Admiration,
    Label::Guilt,
    Label::Embarrassment,
    Label::Pride,
    Label::Jealousy,
    Label::Other,
    Label::Basic,
    Label::Complex,
    Label::Labeled,
    Label::Behavioral,
    Label::Displayed,
    Label::Suggested,
];

/// Placeholder used for unanswered assistant turns in [`Conversation::render`].
pub const REPLY_PLACEHOLDER: &str = "<réponse du modèle>";

#[derive(Debug, thiserror::Error)]
pub enum PromptError {
    #[error("no prompt spec for label `{0}`")]
    MissingSpec(Label),
    #[error("label `{0}` has more than one prompt spec")]
    DuplicateSpec(Label),
    #[error("label `{label}`: bad counter-example reference `{reference}`")]
    BadReference { label: Label, reference: String },
    #[error("prompt file: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// Definitions with positive examples only (the presence question keeps
    /// its counter-examples).
    PositivesOnly,
    /// Definitions with interleaved positive and negative examples; the target
    /// is wrapped in `<annotate>` tags.
    WithCounterexamples,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::PositivesOnly, Variant::WithCounterexamples];

    pub fn name(self) -> &'static str {
        match self {
            Variant::PositivesOnly => "positives_only",
            Variant::WithCounterexamples => "with_counterexamples",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| format!("unknown prompt variant `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Example {
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gloss: Option<String>,
    /// Gloss wording for the counter-example variant when it differs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counter_gloss: Option<String>,
}

/// One entry of a counter-example listing, written `+i` / `-i` (positive or
/// negative example `i`), with a trailing `.` when the answer ends with a period.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CounterRef {
    pub positive: bool,
    pub index: usize,
    pub period: bool,
}

impl fmt::Display for CounterRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = if self.positive { '+' } else { '-' };
        let dot = if self.period { "." } else { "" };
        write!(f, "{sign}{}{dot}", self.index)
    }
}

impl FromStr for CounterRef {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("bad counter-example reference `{s}`");
        let (positive, rest) = match s.as_bytes().first() {
            Some(b'+') => (true, &s[1..]),
            Some(b'-') => (false, &s[1..]),
            _ => return Err(bad()),
        };
        let (digits, period) = match rest.strip_suffix('.') {
            Some(d) => (d, true),
            None => (rest, false),
        };
        let index = digits.parse().map_err(|_| bad())?;
        Ok(CounterRef { positive, index, period })
    }
}

impl Serialize for CounterRef {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for CounterRef {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelPromptSpec {
    pub label: Label,
    pub definition: String,
    /// Definition wording for the counter-example variant when it differs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counter_definition: Option<String>,
    pub question: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub example_intro: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub positive_prefix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub negative_prefix: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gloss_connector: Option<String>,
    #[serde(default)]
    pub positives: Vec<Example>,
    #[serde(default)]
    pub negatives: Vec<String>,
    /// Example listing of the counter-example variant, in display order.
    #[serde(default)]
    pub counter_sequence: Vec<CounterRef>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemPrompts {
    pub positives_only: String,
    pub with_counterexamples: String,
}

/// The system messages plus one spec per label, in question order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PromptSet {
    pub system: SystemPrompts,
    pub labels: Vec<LabelPromptSpec>,
}

impl PromptSet {
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("built-in prompt set is valid")
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, PromptError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn from_json(text: &str) -> Result<Self, PromptError> {
        let set: PromptSet = serde_json::from_str(text).map_err(|e| PromptError::Parse(e.to_string()))?;
        set.validate()?;
        Ok(set)
    }

    pub fn validate(&self) -> Result<(), PromptError> {
        let mut seen = [false; NUM_LABELS];
        for spec in &self.labels {
            let k = spec.label.index();
            if seen[k] {
                return Err(PromptError::DuplicateSpec(spec.label));
            }
            seen[k] = true;
            for r in &spec.counter_sequence {
                let len = if r.positive { spec.positives.len() } else { spec.negatives.len() };
                if r.index >= len {
                    return Err(PromptError::BadReference {
                        label: spec.label,
                        reference: r.to_string(),
                    });
                }
            }
        }
        match Label::ALL.iter().find(|l| !seen[l.index()]) {
            Some(&missing) => Err(PromptError::MissingSpec(missing)),
            None => Ok(()),
        }
    }

    pub fn spec(&self, label: Label) -> Option<&LabelPromptSpec> {
        self.labels.iter().find(|s| s.label == label)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("prompt set serializes");
        hex::encode(Sha256::digest(&json))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Turn {
    pub label: Label,
    pub user: String,
    pub assistant: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Conversation {
    pub variant: Variant,
    pub system: String,
    pub turns: Vec<Turn>,
}

impl Conversation {
    pub fn user_turns(&self) -> usize {
        self.turns.len()
    }

    /// Chat messages up to and including the user question of turn `k`.
    pub fn messages_for(&self, k: usize) -> Vec<Message> {
        let mut msgs = Vec::with_capacity(2 * k + 2);
        msgs.push(Message::new(Role::System, &self.system));
        for t in &self.turns[..k] {
            msgs.push(Message::new(Role::User, &t.user));
            msgs.push(Message::new(Role::Assistant, t.assistant.as_deref().unwrap_or_default()));
        }
        msgs.push(Message::new(Role::User, &self.turns[k].user));
        msgs
    }

    /// Plain-text transcript with `System:` / `User:` / `Assistant:` headers.
    pub fn render(&self) -> String {
        let mut out = format!("System:\n{}\n", self.system);
        for t in &self.turns {
            out.push_str("\nUser:\n");
            out.push_str(&t.user);
            out.push_str("\n\nAssistant:\n");
            out.push_str(t.assistant.as_deref().unwrap_or(REPLY_PLACEHOLDER));
            out.push('\n');
        }
        out
    }
}

pub fn build_conversation(ctx: &ContextTriple, prompts: &PromptSet, variant: Variant) -> Result<Conversation, PromptError> {
    prompts.validate()?;
    let system = match variant {
        Variant::PositivesOnly => {
            let mut lines = Vec::with_capacity(3);
            if let Some(p) = &ctx.previous {
                lines.push(format!("- Phrase précédente: {p}"));
            }
            lines.push(format!("- Phrase à annoter: {}", ctx.target.text));
            if let Some(n) = &ctx.next {
                lines.push(format!("- Phrase suivante: {n}"));
            }
            format!("{}\n\n{}", prompts.system.positives_only, lines.join("\n"))
        }
        Variant::WithCounterexamples => prompts.system.with_counterexamples.clone(),
    };
    let turns = prompts
        .labels
        .iter()
        .map(|spec| Turn {
            label: spec.label,
            user: match variant {
                Variant::PositivesOnly => positives_only_turn(spec),
                Variant::WithCounterexamples => counterexample_turn(spec, ctx),
            },
            assistant: None,
        })
        .collect();
    Ok(Conversation { variant, system, turns })
}

fn positives_only_turn(spec: &LabelPromptSpec) -> String {
    let connector = spec.gloss_connector.as_deref().unwrap_or("où");
    let pos_prefix = spec.positive_prefix.as_deref().unwrap_or_default();
    let neg_prefix = spec.negative_prefix.as_deref().unwrap_or_default();
    let mut lines: Vec<String> = spec
        .positives
        .iter()
        .map(|ex| match &ex.gloss {
            Some(g) => format!("- {pos_prefix}\"{}\", {connector} {g}.", ex.text),
            None => format!("- {pos_prefix}\"{}\"", ex.text),
        })
        .collect();
    if spec.label.task() == Task::A {
        lines.extend(spec.negatives.iter().map(|t| format!("- {neg_prefix}\"{t}\"")));
    }

    let mut out = format!("Définition: {}", spec.definition);
    if !lines.is_empty() {
        out.push(' ');
        out.push_str(spec.example_intro.as_deref().unwrap_or("Par exemple :"));
        out.push('\n');
        out.push_str(&lines.join("\n"));
    }
    out.push_str(&format!("\n\nQuestion: {}\n\nRéponse (oui/non):", spec.question));
    out
}

fn counterexample_turn(spec: &LabelPromptSpec, ctx: &ContextTriple) -> String {
    let definition = spec.counter_definition.as_ref().unwrap_or(&spec.definition);
    let mut out = format!("Définition : {definition}\n\nQuestion : {}", spec.question);
    if !spec.counter_sequence.is_empty() {
        out.push_str("\n\nExemples :");
        for r in &spec.counter_sequence {
            let (text, answer) = if r.positive {
                let ex = &spec.positives[r.index];
                let answer = match ex.counter_gloss.as_ref().or(ex.gloss.as_ref()) {
                    Some(g) => format!("oui (car {g})"),
                    None => "oui".to_string(),
                };
                (ex.text.as_str(), answer)
            } else {
                (spec.negatives[r.index].as_str(), "non".to_string())
            };
            let dot = if r.period { "." } else { "" };
            out.push_str(&format!("\n- <annotate>{text}</annotate> -> {answer}{dot}"));
        }
    }
    let target = format!("<annotate>{}</annotate>", ctx.target.text);
    let window: Vec<&str> = [ctx.previous.as_deref(), Some(target.as_str()), ctx.next.as_deref()]
        .into_iter()
        .flatten()
        .collect();
    out.push_str(&format!("\n\nAnnotation (oui/non) :\n- {} ->", window.join(" ")));
    out
}
