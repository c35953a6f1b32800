//! Label taxonomy for the four annotation tasks and the rules deriving the
//! presence (task A) and type (task C) labels from modes (task B) and
//! categories (task D).
//!
//! Every sentence is described by a [`LabelVector`] of 19 booleans laid out in
//! [`Label::ALL`] order: presence, the four modes, the two types, then the
//! twelve categories.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Number of labels in a sentence vector.
pub const NUM_LABELS: usize = 19;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LabelError {
    #[error("unknown label `{0}`")]
    UnknownLabel(String),
    #[error("expected {NUM_LABELS} entries, got {0}")]
    WrongArity(usize),
    #[error("label vector violates derivation rules: {0:?}")]
    InvalidVector(Vec<Violation>),
}

/// The four annotation tasks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Task {
    /// Presence of emotion.
    A,
    /// Mode of expression.
    B,
    /// Type of emotion.
    C,
    /// Emotional category.
    D,
}

impl Task {
    pub const ALL: [Task; 4] = [Task::A, Task::B, Task::C, Task::D];

    /// Labels belonging to this task, in canonical order.
    pub fn labels(self) -> &'static [Label] {
        match self {
            Task::A => &Label::ALL[0..1],
            Task::B => &Label::ALL[1..5],
            Task::C => &Label::ALL[5..7],
            Task::D => &Label::ALL[7..19],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Task::A => "A",
            Task::B => "B",
            Task::C => "C",
            Task::D => "D",
        }
    }
}

impl FromStr for Task {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "A" => Ok(Task::A),
            "B" => Ok(Task::B),
            "C" => Ok(Task::C),
            "D" => Ok(Task::D),
            _ => Err(LabelError::UnknownLabel(s.to_string())),
        }
    }
}

/// Mode of expression of an emotion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Labeled,
    Behavioral,
    Displayed,
    Suggested,
}

impl Mode {
    pub const ALL: [Mode; 4] = [Mode::Labeled, Mode::Behavioral, Mode::Displayed, Mode::Suggested];

    pub fn label(self) -> Label {
        match self {
            Mode::Labeled => Label::Labeled,
            Mode::Behavioral => Label::Behavioral,
            Mode::Displayed => Label::Displayed,
            Mode::Suggested => Label::Suggested,
        }
    }

    pub fn name(self) -> &'static str {
        self.label().name()
    }
}

/// Basic (Ekman) or complex (social-norm) emotion type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EmotionType {
    Basic,
    Complex,
}

impl EmotionType {
    pub const ALL: [EmotionType; 2] = [EmotionType::Basic, EmotionType::Complex];

    pub fn label(self) -> Label {
        match self {
            EmotionType::Basic => Label::Basic,
            EmotionType::Complex => Label::Complex,
        }
    }
}

/// Emotional category.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    Anger,
    Disgust,
    Fear,
    Joy,
    Sadness,
    Surprise,
    Admiration,
    Embarrassment,
    Guilt,
    Jealousy,
    Pride,
    Other,
}

impl Category {
    pub const ALL: [Category; 12] = [
        Category::Anger,
        Category::Disgust,
        Category::Fear,
        Category::Joy,
        Category::Sadness,
        Category::Surprise,
        Category::Admiration,
        Category::Embarrassment,
        Category::Guilt,
        Category::Jealousy,
        Category::Pride,
        Category::Other,
    ];

    pub const BASIC: [Category; 6] = [
        Category::Anger,
        Category::Disgust,
        Category::Fear,
        Category::Joy,
        Category::Sadness,
        Category::Surprise,
    ];

    pub const COMPLEX: [Category; 5] = [
        Category::Admiration,
        Category::Embarrassment,
        Category::Guilt,
        Category::Jealousy,
        Category::Pride,
    ];

    /// The type this category counts towards; `other` has none.
    pub fn emotion_type(self) -> Option<EmotionType> {
        match self {
            Category::Anger
            | Category::Disgust
            | Category::Fear
            | Category::Joy
            | Category::Sadness
            | Category::Surprise => Some(EmotionType::Basic),
            Category::Admiration
            | Category::Embarrassment
            | Category::Guilt
            | Category::Jealousy
            | Category::Pride => Some(EmotionType::Complex),
            Category::Other => None,
        }
    }

    pub fn label(self) -> Label {
        match self {
            Category::Anger => Label::Anger,
            Category::Disgust => Label::Disgust,
            Category::Fear => Label::Fear,
            Category::Joy => Label::Joy,
            Category::Sadness => Label::Sadness,
            Category::Surprise => Label::Surprise,
            Category::Admiration => Label::Admiration,
            Category::Embarrassment => Label::Embarrassment,
            Category::Guilt => Label::Guilt,
            Category::Jealousy => Label::Jealousy,
            Category::Pride => Label::Pride,
            Category::Other => Label::Other,
        }
    }

    pub fn name(self) -> &'static str {
        self.label().name()
    }
}

/// One of the 19 sentence labels. Discriminants are vector positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Emotional = 0,
    Behavioral,
    Labeled,
    Displayed,
    Suggested,
    Basic,
    Complex,
    Admiration,
    Other,
    Anger,
    Guilt,
    Disgust,
    Embarrassment,
    Pride,
    Jealousy,
    Joy,
    Fear,
    Surprise,
    Sadness,
}

impl Label {
    /// Canonical vector order.
    pub const ALL: [Label; NUM_LABELS] = [
        Label::Emotional,
        Label::Behavioral,
        Label::Labeled,
        Label::Displayed,
        Label::Suggested,
        Label::Basic,
        Label::Complex,
        Label::Admiration,
        Label::Other,
        Label::Anger,
        Label::Guilt,
        Label::Disgust,
        Label::Embarrassment,
        Label::Pride,
        Label::Jealousy,
        Label::Joy,
        Label::Fear,
        Label::Surprise,
        Label::Sadness,
    ];

    #[inline]
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Option<Label> {
        Label::ALL.get(i).copied()
    }

    /// Lowercase serialized identifier.
    pub fn name(self) -> &'static str {
        match self {
            Label::Emotional => "emotional",
            Label::Behavioral => "behavioral",
            Label::Labeled => "labeled",
            Label::Displayed => "displayed",
            Label::Suggested => "suggested",
            Label::Basic => "basic",
            Label::Complex => "complex",
            Label::Admiration => "admiration",
            Label::Other => "other",
            Label::Anger => "anger",
            Label::Guilt => "guilt",
            Label::Disgust => "disgust",
            Label::Embarrassment => "embarrassment",
            Label::Pride => "pride",
            Label::Jealousy => "jealousy",
            Label::Joy => "joy",
            Label::Fear => "fear",
            Label::Surprise => "surprise",
            Label::Sadness => "sadness",
        }
    }

    pub fn task(self) -> Task {
        match self.index() {
            0 => Task::A,
            1..=4 => Task::B,
            5..=6 => Task::C,
            _ => Task::D,
        }
    }

    pub fn as_mode(self) -> Option<Mode> {
        Mode::ALL.into_iter().find(|m| m.label() == self)
    }

    pub fn as_category(self) -> Option<Category> {
        Category::ALL.into_iter().find(|c| c.label() == self)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Label {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Label::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| LabelError::UnknownLabel(s.to_string()))
    }
}

impl FromStr for Mode {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<Label>()
            .ok()
            .and_then(Label::as_mode)
            .ok_or_else(|| LabelError::UnknownLabel(s.to_string()))
    }
}

impl FromStr for Category {
    type Err = LabelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.parse::<Label>()
            .ok()
            .and_then(Label::as_category)
            .ok_or_else(|| LabelError::UnknownLabel(s.to_string()))
    }
}

macro_rules! serde_by_name {
    ($ty:ty) => {
        impl Serialize for $ty {
            fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
                s.serialize_str(self.name())
            }
        }

        impl<'de> Deserialize<'de> for $ty {
            fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
                let s = String::deserialize(d)?;
                s.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

serde_by_name!(Label);
serde_by_name!(Mode);
serde_by_name!(Category);

/// A 19-bit sentence annotation in canonical order.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct LabelVector(u32);

impl LabelVector {
    pub const EMPTY: LabelVector = LabelVector(0);

    pub fn from_bools(bits: &[bool]) -> Result<Self, LabelError> {
        if bits.len() != NUM_LABELS {
            return Err(LabelError::WrongArity(bits.len()));
        }
        let mut v = LabelVector::EMPTY;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.0 |= 1 << i;
            }
        }
        Ok(v)
    }

    pub fn from_labels<I: IntoIterator<Item = Label>>(labels: I) -> Self {
        let mut v = LabelVector::EMPTY;
        for l in labels {
            v.set(l, true);
        }
        v
    }

    #[inline]
    pub fn get(&self, label: Label) -> bool {
        self.0 & (1 << label.index()) != 0
    }

    #[inline]
    pub fn set(&mut self, label: Label, on: bool) {
        if on {
            self.0 |= 1 << label.index();
        } else {
            self.0 &= !(1 << label.index());
        }
    }

    pub fn to_bools(&self) -> [bool; NUM_LABELS] {
        let mut out = [false; NUM_LABELS];
        for l in Label::ALL {
            out[l.index()] = self.get(l);
        }
        out
    }

    /// Labels set in this vector, in canonical order.
    pub fn labels(&self) -> impl Iterator<Item = Label> + '_ {
        Label::ALL.into_iter().filter(move |l| self.get(*l))
    }

    pub fn count(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn any_of(&self, labels: &[Label]) -> bool {
        labels.iter().any(|l| self.get(*l))
    }

    pub fn has_mode(&self) -> bool {
        Mode::ALL.iter().any(|m| self.get(m.label()))
    }

    pub fn has_category(&self) -> bool {
        Category::ALL.iter().any(|c| self.get(c.label()))
    }

    /// Copy of this vector restricted to the labels of one task.
    pub fn restrict(&self, task: Task) -> LabelVector {
        LabelVector::from_labels(task.labels().iter().copied().filter(|l| self.get(*l)))
    }
}

impl fmt::Debug for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.labels().map(Label::name)).finish()
    }
}

impl fmt::Display for LabelVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in Label::ALL {
            f.write_str(if self.get(l) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Serialized as a list of 19 integers (0/1).
impl Serialize for LabelVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let bits: Vec<u8> = self.to_bools().iter().map(|&b| b as u8).collect();
        bits.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LabelVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let bits = Vec::<u8>::deserialize(d)?;
        if let Some(bad) = bits.iter().find(|b| **b > 1) {
            return Err(serde::de::Error::custom(format!("label bit must be 0 or 1, got {bad}")));
        }
        let bools: Vec<bool> = bits.into_iter().map(|b| b == 1).collect();
        LabelVector::from_bools(&bools).map_err(serde::de::Error::custom)
    }
}

/// Build a vector from annotated modes and categories, deriving presence and
/// type bits.
pub fn compose_vector<M, C>(modes: M, categories: C) -> LabelVector
where
    M: IntoIterator<Item = Mode>,
    C: IntoIterator<Item = Category>,
{
    let mut v = LabelVector::EMPTY;
    for m in modes {
        v.set(m.label(), true);
    }
    for c in categories {
        v.set(c.label(), true);
        if let Some(t) = c.emotion_type() {
            v.set(t.label(), true);
        }
    }
    if v.has_mode() || v.has_category() {
        v.set(Label::Emotional, true);
    }
    v
}

/// Same as [`compose_vector`] but from serialized identifiers.
pub fn compose_vector_by_name<'a, M, C>(modes: M, categories: C) -> Result<LabelVector, LabelError>
where
    M: IntoIterator<Item = &'a str>,
    C: IntoIterator<Item = &'a str>,
{
    let modes = modes.into_iter().map(str::parse).collect::<Result<Vec<Mode>, _>>()?;
    let cats = categories.into_iter().map(str::parse).collect::<Result<Vec<Category>, _>>()?;
    Ok(compose_vector(modes, cats))
}

/// A broken derivation rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Violation {
    /// `emotional` set with no mode and no category.
    PresenceWithoutEvidence,
    /// A mode or category set while `emotional` is not.
    EvidenceWithoutPresence,
    /// `basic` disagrees with the presence of a basic category.
    BasicMismatch,
    /// `complex` disagrees with the presence of a complex category.
    ComplexMismatch,
}

/// Checks a raw vector against the derivation rules. Returns one entry per
/// violated rule; an empty list means the vector is consistent.
pub fn validate_vector(bits: &[bool]) -> Result<Vec<Violation>, LabelError> {
    Ok(violations(&LabelVector::from_bools(bits)?))
}

pub fn violations(v: &LabelVector) -> Vec<Violation> {
    let mut out = Vec::new();
    let evidence = v.has_mode() || v.has_category();
    match (v.get(Label::Emotional), evidence) {
        (true, false) => out.push(Violation::PresenceWithoutEvidence),
        (false, true) => out.push(Violation::EvidenceWithoutPresence),
        _ => {}
    }
    let has_basic = Category::BASIC.iter().any(|c| v.get(c.label()));
    if v.get(Label::Basic) != has_basic {
        out.push(Violation::BasicMismatch);
    }
    let has_complex = Category::COMPLEX.iter().any(|c| v.get(c.label()));
    if v.get(Label::Complex) != has_complex {
        out.push(Violation::ComplexMismatch);
    }
    out
}

/// Strict counterpart of [`validate_vector`]: any violation is an error.
pub fn validate_strict(v: &LabelVector) -> Result<(), LabelError> {
    let found = violations(v);
    if found.is_empty() {
        Ok(())
    } else {
        Err(LabelError::InvalidVector(found))
    }
}

/// Consistent but unusual patterns, reported without failing validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Anomaly {
    CategoryWithoutMode,
    ModeWithoutCategory,
}

pub fn anomalies(v: &LabelVector) -> Vec<Anomaly> {
    match (v.has_mode(), v.has_category()) {
        (false, true) => vec![Anomaly::CategoryWithoutMode],
        (true, false) => vec![Anomaly::ModeWithoutCategory],
        _ => Vec::new(),
    }
}
