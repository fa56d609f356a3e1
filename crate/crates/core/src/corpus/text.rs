use std::fmt;

use crate::error::{Error, Result};

/// Sentence terminators used by [`segment_and_tokenize`].
pub const SENTENCE_TERMINATORS: [char; 4] = ['.', '!', '?', '…'];

/// Modern Georgian script block, U+10D0..=U+10FF.
#[inline]
pub fn is_mkhedruli(c: char) -> bool {
    ('\u{10D0}'..='\u{10FF}').contains(&c)
}

#[inline]
fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

/// A normalized word: no surrounding punctuation, at least one Mkhedruli letter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Token(String);

impl Token {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() {
            return Err(Error::Format("empty token".into()));
        }
        if text.chars().any(char::is_whitespace) {
            return Err(Error::Format(format!("token {text:?} contains whitespace")));
        }
        if !text.chars().any(is_mkhedruli) {
            return Err(Error::Format(format!(
                "token {text:?} has no Georgian letter"
            )));
        }
        Ok(Token(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Token {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Keeps a line only if all of its words are written in Mkhedruli.
///
/// Each whitespace-separated word is stripped of leading and trailing
/// punctuation and digits; what remains must be Mkhedruli only. Words that
/// strip to nothing (bare numbers, dashes, quotes) are ignored, but at least
/// one Georgian word is required. Returns the trimmed line.
pub fn filter_georgian_line(line: &str) -> Option<&str> {
    let trimmed = line.trim();
    let mut georgian_words = 0usize;
    for word in trimmed.split_whitespace() {
        let core = word.trim_matches(|c: char| is_punct(c) || c.is_numeric());
        if core.is_empty() {
            continue;
        }
        if !core.chars().all(is_mkhedruli) {
            return None;
        }
        georgian_words += 1;
    }
    (georgian_words > 0).then_some(trimmed)
}

/// Splits cleaned text into sentences of tokens.
///
/// Sentences end at any of [`SENTENCE_TERMINATORS`]. Tokens are
/// whitespace-separated words with surrounding punctuation removed; words left
/// without a Georgian letter are dropped, as are empty sentences.
pub fn segment_and_tokenize(text: &str) -> Vec<Vec<Token>> {
    text.split(SENTENCE_TERMINATORS)
        .map(|sentence| {
            sentence
                .split_whitespace()
                .filter_map(|w| Token::new(w.trim_matches(is_punct)).ok())
                .collect::<Vec<_>>()
        })
        .filter(|s| !s.is_empty())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn words(sentences: &[Vec<Token>]) -> Vec<Vec<&str>> {
        sentences
            .iter()
            .map(|s| s.iter().map(Token::as_str).collect())
            .collect()
    }

    #[test]
    fn keeps_all_georgian_line() {
        assert_eq!(
            filter_georgian_line("ის ბარში წავიდა"),
            Some("ის ბარში წავიდა")
        );
        assert_eq!(
            filter_georgian_line("  ის ბარში, წავიდა!  "),
            Some("ის ბარში, წავიდა!")
        );
    }

    #[test]
    fn rejects_latin_inside_word() {
        assert_eq!(filter_georgian_line("ის bar-ში წავიდა"), None);
        assert_eq!(filter_georgian_line("hello"), None);
    }

    #[test]
    fn empty_and_punctuation_lines_are_dropped() {
        assert_eq!(filter_georgian_line(""), None);
        assert_eq!(filter_georgian_line("   "), None);
        assert_eq!(filter_georgian_line("— 2021 ..."), None);
    }

    #[test]
    fn digits_at_word_edges_are_stripped() {
        assert_eq!(filter_georgian_line("2021 წელს"), Some("2021 წელს"));
        assert_eq!(filter_georgian_line("ა1ბ"), None);
    }

    #[test]
    fn asomtavruli_is_not_mkhedruli() {
        assert_eq!(filter_georgian_line("\u{10A0}\u{10A1}"), None);
    }

    #[test]
    fn splits_on_terminators() {
        assert_eq!(
            words(&segment_and_tokenize("ა ბ. გ დ!")),
            vec![vec!["ა", "ბ"], vec!["გ", "დ"]]
        );
        assert_eq!(words(&segment_and_tokenize("ა,")), vec![vec!["ა"]]);
        assert_eq!(
            words(&segment_and_tokenize("ა… ბ? „გ“ ... ")),
            vec![vec!["ა"], vec!["ბ"], vec!["გ"]]
        );
    }

    #[test]
    fn token_invariants() {
        assert!(Token::new("ბარი").is_ok());
        assert!(Token::new("").is_err());
        assert!(Token::new("bar").is_err());
        assert!(Token::new("ბა რი").is_err());
    }
}
