//! Lexicon baselines: emotion-term matching and polarity scoring.
//!
//! Text and lexicon terms go through the same normalization (lowercase,
//! punctuation replaced by spaces, whitespace tokens). Terms match as exact
//! token sequences, scanning left to right and preferring the longest term at
//! each position; tokens consumed by a match cannot start another one.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::labels::{compose_vector, Category, LabelVector, Mode};

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("polarity map: {0}")]
    PolarityMap(String),
}

pub type Result<T, E = LexiconError> = std::result::Result<T, E>;

pub fn normalize(text: &str) -> Vec<String> {
    let cleaned: String = text
        .chars()
        .map(|c| if c.is_alphanumeric() { c } else { ' ' })
        .collect::<String>()
        .to_lowercase();
    cleaned.split_whitespace().map(str::to_string).collect()
}

/// Token-sequence dictionary with longest-match-first scanning.
#[derive(Debug, Clone)]
struct Matcher<V> {
    terms: HashMap<Vec<String>, V>,
    longest: usize,
}

impl<V> Default for Matcher<V> {
    fn default() -> Self {
        Matcher {
            terms: HashMap::new(),
            longest: 0,
        }
    }
}

impl<V> Matcher<V> {
    fn entry(&mut self, key: Vec<String>) -> std::collections::hash_map::Entry<'_, Vec<String>, V> {
        self.longest = self.longest.max(key.len());
        self.terms.entry(key)
    }

    fn matches<'a>(&'a self, text: &str) -> Vec<&'a V> {
        let tokens = normalize(text);
        let mut out = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let max = self.longest.min(tokens.len() - i);
            let hit = (1..=max).rev().find_map(|len| self.terms.get(&tokens[i..i + len]).map(|v| (len, v)));
            match hit {
                Some((len, v)) => {
                    out.push(v);
                    i += len;
                }
                None => i += 1,
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "category", rename_all = "lowercase")]
pub enum LexiconKind {
    Labeled(Category),
    Behavioral,
}

#[derive(Debug, Clone, Default)]
pub struct EmotionLexicon {
    matcher: Matcher<Vec<LexiconKind>>,
}

impl EmotionLexicon {
    pub fn insert(&mut self, term: &str, kind: LexiconKind) -> bool {
        let key = normalize(term);
        if key.is_empty() {
            return false;
        }
        let kinds = self.matcher.entry(key).or_default();
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
        true
    }

    pub fn len(&self) -> usize {
        self.matcher.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matcher.terms.is_empty()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// `term<TAB>kind<TAB>category`, kind `labeled` (category required) or
    /// `behavioral` (no category). Lines starting with `#` are comments.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lex = EmotionLexicon::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| LexiconError::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            let kind = match (fields.get(1).copied(), fields.get(2).copied().filter(|c| !c.is_empty())) {
                (Some("labeled"), Some(cat)) => {
                    LexiconKind::Labeled(cat.parse().map_err(|_| err(format!("unknown category `{cat}`")))?)
                }
                (Some("labeled"), None) => return Err(err("labeled entry without category".into())),
                (Some("behavioral"), None) => LexiconKind::Behavioral,
                (Some("behavioral"), Some(_)) => return Err(err("behavioral entry with a category".into())),
                (Some(other), _) => return Err(err(format!("unknown kind `{other}`"))),
                (None, _) => return Err(err("expected term<TAB>kind[<TAB>category]".into())),
            };
            if fields.len() > 3 {
                return Err(err("too many columns".into()));
            }
            if !lex.insert(fields[0], kind) {
                return Err(err("empty term".into()));
            }
        }
        Ok(lex)
    }

    /// Labeled and behavioral modes plus categories of labeled matches;
    /// presence and type bits are derived.
    pub fn annotate(&self, sentence: &str) -> LabelVector {
        let mut modes = Vec::new();
        let mut categories = Vec::new();
        for kinds in self.matcher.matches(sentence) {
            for kind in kinds {
                match *kind {
                    LexiconKind::Labeled(c) => {
                        modes.push(Mode::Labeled);
                        categories.push(c);
                    }
                    LexiconKind::Behavioral => modes.push(Mode::Behavioral),
                }
            }
        }
        compose_vector(modes, categories)
    }
}

pub fn lexicon_annotate(sentence: &str, lex: &EmotionLexicon) -> LabelVector {
    lex.annotate(sentence)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Positive,
    Negative,
    Neutral,
}

impl Polarity {
    pub fn name(self) -> &'static str {
        match self {
            Polarity::Positive => "positive",
            Polarity::Negative => "negative",
            Polarity::Neutral => "neutral",
        }
    }

    fn of_sign(x: f64) -> Self {
        if x > 0.0 {
            Polarity::Positive
        } else if x < 0.0 {
            Polarity::Negative
        } else {
            Polarity::Neutral
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct PolarityLexicon {
    matcher: Matcher<(f64, f64)>,
}

impl PolarityLexicon {
    pub fn len(&self) -> usize {
        self.matcher.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matcher.terms.is_empty()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    /// `term<TAB>neg<TAB>pos` with finite, non-negative weights.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lex = PolarityLexicon::default();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: String| LexiconError::Parse { line: line_no, message };
            let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(err("expected term<TAB>neg<TAB>pos".into()));
            }
            let weight = |s: &str| {
                s.parse::<f64>()
                    .ok()
                    .filter(|w| w.is_finite() && *w >= 0.0)
                    .ok_or_else(|| err(format!("invalid weight `{s}`")))
            };
            let (neg, pos) = (weight(fields[1])?, weight(fields[2])?);
            let key = normalize(fields[0]);
            if key.is_empty() {
                return Err(err("empty term".into()));
            }
            match lex.matcher.entry(key) {
                std::collections::hash_map::Entry::Occupied(_) => {
                    return Err(err(format!("duplicate term `{}`", fields[0])))
                }
                std::collections::hash_map::Entry::Vacant(v) => {
                    v.insert((neg, pos));
                }
            }
        }
        Ok(lex)
    }

    /// Sum of `pos - neg` over matched term occurrences.
    pub fn score(&self, sentence: &str) -> f64 {
        self.matcher.matches(sentence).iter().map(|(neg, pos)| pos - neg).sum()
    }
}

pub fn polarity_score(sentence: &str, lex: &PolarityLexicon) -> Polarity {
    Polarity::of_sign(lex.score(sentence))
}

/// Polarity of each of the 12 categories.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolarityMap {
    map: BTreeMap<Category, Polarity>,
}

impl Default for PolarityMap {
    fn default() -> Self {
        use Category::*;
        let mut map = BTreeMap::new();
        for c in [Joy, Pride, Admiration] {
            map.insert(c, Polarity::Positive);
        }
        for c in [Anger, Disgust, Fear, Sadness, Guilt, Embarrassment, Jealousy] {
            map.insert(c, Polarity::Negative);
        }
        for c in [Surprise, Other] {
            map.insert(c, Polarity::Neutral);
        }
        PolarityMap { map }
    }
}

impl PolarityMap {
    pub fn new(map: BTreeMap<Category, Polarity>) -> Result<Self> {
        if let Some(missing) = Category::ALL.iter().find(|c| !map.contains_key(c)) {
            return Err(LexiconError::PolarityMap(format!("no polarity for `{}`", missing.name())));
        }
        Ok(PolarityMap { map })
    }

    pub fn get(&self, c: Category) -> Polarity {
        self.map[&c]
    }

    /// JSON object from category name to `positive`, `negative` or `neutral`.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let map: BTreeMap<Category, Polarity> =
            serde_json::from_str(text).map_err(|e| LexiconError::PolarityMap(e.to_string()))?;
        Self::new(map)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.map).expect("map serializes")
    }
}

/// Positive if some set category is positive and none negative, negative in
/// the mirrored case, neutral otherwise.
pub fn project_polarity(v: &LabelVector, map: &PolarityMap) -> Polarity {
    let mut pos = false;
    let mut neg = false;
    for c in Category::ALL {
        if v.get(c.label()) {
            match map.get(c) {
                Polarity::Positive => pos = true,
                Polarity::Negative => neg = true,
                Polarity::Neutral => {}
            }
        }
    }
    match (pos, neg) {
        (true, false) => Polarity::Positive,
        (false, true) => Polarity::Negative,
        _ => Polarity::Neutral,
    }
}
