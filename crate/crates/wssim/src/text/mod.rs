//! Identifier tokenization, stopword filtering, and string similarity.

pub mod metrics;

use std::collections::BTreeSet;
use std::path::Path;

pub use metrics::{jaro, jaro_winkler, jaro_winkler_with};

/// Words every stopword list must carry for gloss filtering to behave as the
/// rest of the pipeline expects.
pub const REQUIRED_STOPWORDS: [&str; 18] = [
    "the", "of", "to", "and", "a", "in", "is", "it", "you", "that", "he", "was", "for", "on",
    "are", "with", "as", "i",
];

const EMBEDDED_STOPWORDS: &str = include_str!("../../data/stopwords.txt");

#[derive(Debug, thiserror::Error)]
pub enum StopwordError {
    #[error("failed to read stopword list: {0}")]
    Io(#[from] std::io::Error),
    #[error("stopword list is missing required word {word:?}")]
    MissingRequired { word: &'static str },
}

/// Lowercased word forms dropped from glosses and comparison contexts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StopwordList {
    words: BTreeSet<String>,
}

impl Default for StopwordList {
    fn default() -> Self {
        Self::parse(EMBEDDED_STOPWORDS).expect("embedded stopword list is valid")
    }
}

impl StopwordList {
    /// Loads a list from a text file: one word per line, `#` comments and
    /// blank lines ignored. Fails if any of [`REQUIRED_STOPWORDS`] is absent.
    pub fn from_file(path: &Path) -> Result<Self, StopwordError> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    fn parse(text: &str) -> Result<Self, StopwordError> {
        let words: BTreeSet<String> = text
            .lines()
            .map(str::trim)
            .filter(|line| !line.is_empty() && !line.starts_with('#'))
            .map(str::to_lowercase)
            .collect();
        for word in REQUIRED_STOPWORDS {
            if !words.contains(word) {
                return Err(StopwordError::MissingRequired { word });
            }
        }
        Ok(Self { words })
    }

    pub fn contains(&self, word: &str) -> bool {
        self.words.contains(word)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Drops stopwords from a token sequence, preserving order.
    pub fn remove_stopwords(&self, tokens: &[String]) -> Vec<String> {
        tokens
            .iter()
            .filter(|t| !self.contains(t))
            .cloned()
            .collect()
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum CharClass {
    Lower,
    Upper,
    Digit,
}

fn classify(c: char) -> Option<CharClass> {
    if c.is_numeric() {
        Some(CharClass::Digit)
    } else if c.is_uppercase() {
        Some(CharClass::Upper)
    } else if c.is_alphabetic() {
        Some(CharClass::Lower)
    } else {
        None
    }
}

/// Splits an identifier into lowercase word tokens.
///
/// Non-alphanumeric characters separate tokens; additional boundaries fall at
/// lower-to-upper transitions, between letters and digits, and before the last
/// capital of an uppercase run that is followed by a lowercase letter, so that
/// `"GetWeatherByZipCode"` becomes `["get", "weather", "by", "zip", "code"]`
/// and `"XMLHttpRequest"` becomes `["xml", "http", "request"]`.
pub fn tokenize_identifier(identifier: &str) -> Vec<String> {
    let chars: Vec<char> = identifier.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut prev_class: Option<CharClass> = None;

    for (i, &c) in chars.iter().enumerate() {
        let class = match classify(c) {
            Some(class) => class,
            None => {
                // Separator: close the current token.
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                prev_class = None;
                continue;
            }
        };
        let boundary = match (prev_class, class) {
            (None, _) => false,
            (Some(prev), cur) if prev != cur => {
                // Upper-to-lower only splits when it ends an acronym run:
                // the upper char that starts the new word was consumed already,
                // so the break belongs before it (handled below).
                !(prev == CharClass::Upper && cur == CharClass::Lower)
            }
            _ => false,
        };
        if boundary && !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
        // An uppercase run followed by lowercase keeps its last capital for
        // the next word: "XMLHttp" splits between "XML" and "Http".
        if prev_class == Some(CharClass::Upper)
            && class == CharClass::Upper
            && chars.get(i + 1).and_then(|&n| classify(n)) == Some(CharClass::Lower)
            && !current.is_empty()
        {
            tokens.push(std::mem::take(&mut current));
        }
        current.extend(c.to_lowercase());
        prev_class = Some(class);
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}
