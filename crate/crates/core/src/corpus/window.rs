use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::dataset::{write_dataset, LabeledExample, SenseLabel};
use super::homonym::HomonymSpec;
use super::text::{filter_georgian_line, segment_and_tokenize, Token};
use crate::error::{Error, Result};

/// Tokens of context kept on each side of the homonym.
pub const CONTEXT_RADIUS: usize = 6;
/// Longest window: the homonym plus a full context on both sides.
pub const MAX_WINDOW_LEN: usize = 2 * CONTEXT_RADIUS + 1;

/// Up to 13 tokens around one homonym occurrence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SentenceWindow {
    tokens: Vec<Token>,
    target_index: usize,
    source_id: String,
}

impl SentenceWindow {
    /// Checks length, target position and the centering rule (at most
    /// [`CONTEXT_RADIUS`] tokens on either side of the target).
    pub fn new(
        tokens: Vec<Token>,
        target_index: usize,
        source_id: impl Into<String>,
    ) -> Result<Self> {
        if tokens.is_empty() || tokens.len() > MAX_WINDOW_LEN {
            return Err(Error::Format(format!(
                "window length {} outside 1..={MAX_WINDOW_LEN}",
                tokens.len()
            )));
        }
        if target_index >= tokens.len() {
            return Err(Error::Format(format!(
                "target index {target_index} out of range for {} tokens",
                tokens.len()
            )));
        }
        if target_index > CONTEXT_RADIUS || tokens.len() - target_index - 1 > CONTEXT_RADIUS {
            return Err(Error::Format(format!(
                "target index {target_index} is not centred in a {}-token window",
                tokens.len()
            )));
        }
        Ok(SentenceWindow {
            tokens,
            target_index,
            source_id: source_id.into(),
        })
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn target_index(&self) -> usize {
        self.target_index
    }

    pub fn target(&self) -> &Token {
        &self.tokens[self.target_index]
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tokens joined by single spaces, as written to dataset files.
    pub fn text(&self) -> String {
        let words: Vec<&str> = self.tokens.iter().map(Token::as_str).collect();
        words.join(" ")
    }
}

/// One window per occurrence of any surface form, clipped at the sentence edges.
pub fn extract_windows(
    sentence: &[Token],
    spec: &HomonymSpec,
    source_id: &str,
) -> Vec<SentenceWindow> {
    sentence
        .iter()
        .enumerate()
        .filter(|(_, tok)| spec.matches(tok.as_str()))
        .map(|(p, _)| {
            let start = p.saturating_sub(CONTEXT_RADIUS);
            let end = (p + CONTEXT_RADIUS + 1).min(sentence.len());
            SentenceWindow {
                tokens: sentence[start..end].to_vec(),
                target_index: p - start,
                source_id: source_id.to_string(),
            }
        })
        .collect()
}

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::io(path, e))
}

/// Filters and windows one input stream. `name` prefixes each window's source id.
pub fn extract_from_reader(
    reader: impl BufRead,
    name: &str,
    spec: &HomonymSpec,
) -> Result<Vec<SentenceWindow>> {
    let mut windows = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| Error::io(name, e))?;
        let Some(clean) = filter_georgian_line(&line) else {
            continue;
        };
        let source = format!("{name}:{}", n + 1);
        for sentence in segment_and_tokenize(clean) {
            windows.extend(extract_windows(&sentence, spec, &source));
        }
    }
    Ok(windows)
}

fn extract_files(input_paths: &[PathBuf], spec: &HomonymSpec) -> Result<Vec<SentenceWindow>> {
    let per_file: Vec<Result<Vec<SentenceWindow>>> = input_paths
        .par_iter()
        .map(|path| extract_from_reader(open(path)?, &path.display().to_string(), spec))
        .collect();
    let mut all = Vec::new();
    for windows in per_file {
        all.extend(windows?);
    }
    Ok(all)
}

/// Filter, segment and window every input file, writing unlabeled records in
/// input order. Files are processed in parallel; output order is unaffected.
pub fn run_extraction_pipeline(
    input_paths: &[PathBuf],
    spec: &HomonymSpec,
    output_path: &Path,
) -> Result<usize> {
    let windows = extract_files(input_paths, spec)?;
    let file = File::create(output_path).map_err(|e| Error::io(output_path, e))?;
    let mut out = BufWriter::new(file);
    write_windows(&mut out, &windows).map_err(|e| Error::io(output_path, e))?;
    out.flush().map_err(|e| Error::io(output_path, e))?;
    Ok(windows.len())
}

/// Writes windows as unlabeled dataset records.
pub fn write_windows(out: &mut impl Write, windows: &[SentenceWindow]) -> std::io::Result<()> {
    let examples: Vec<LabeledExample> = windows
        .iter()
        .map(|w| LabeledExample {
            window: w.clone(),
            label: SenseLabel::Other,
        })
        .collect();
    write_dataset(out, &examples)
}

/// Filtering stage alone. With `tokenized`, each sentence is written as one
/// line of space-separated tokens (the embedding corpus format); otherwise
/// accepted lines are copied through trimmed. Returns the number of lines written.
pub fn run_filter_pipeline(
    readers: Vec<(String, Box<dyn BufRead + Send>)>,
    out: &mut dyn Write,
    tokenized: bool,
) -> Result<usize> {
    let mut written = 0;
    for (name, reader) in readers {
        for line in reader.lines() {
            let line = line.map_err(|e| Error::io(&name, e))?;
            let Some(clean) = filter_georgian_line(&line) else {
                continue;
            };
            let res = if tokenized {
                segment_and_tokenize(clean).iter().try_for_each(|sentence| {
                    let words: Vec<&str> = sentence.iter().map(Token::as_str).collect();
                    written += 1;
                    writeln!(out, "{}", words.join(" "))
                })
            } else {
                written += 1;
                writeln!(out, "{clean}")
            };
            res.map_err(|e| Error::io("<output>", e))?;
        }
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> HomonymSpec {
        HomonymSpec::parse("lemma ბარი\nform ბარი\nform ბარში\nsense 0 a ა\nsense 1 b ბ\n").unwrap()
    }

    fn sentence(len: usize, matches: &[usize]) -> Vec<Token> {
        (0..len)
            .map(|i| {
                if matches.contains(&i) {
                    Token::new("ბარი").unwrap()
                } else {
                    // distinct filler words: "სიტყვა" + Georgian letter offset
                    let c = char::from_u32(0x10D0 + i as u32).unwrap();
                    Token::new(format!("სი{c}")).unwrap()
                }
            })
            .collect()
    }

    #[test]
    fn window_in_long_sentence_is_thirteen_tokens() {
        let s = sentence(20, &[7]);
        let w = extract_windows(&s, &spec(), "t");
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].len(), 13);
        assert_eq!(w[0].target_index(), 6);
        assert_eq!(w[0].tokens(), &s[1..14]);
    }

    #[test]
    fn window_truncates_at_sentence_start() {
        let s = sentence(3, &[0]);
        let w = extract_windows(&s, &spec(), "t");
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].len(), 3);
        assert_eq!(w[0].target_index(), 0);
    }

    #[test]
    fn one_window_per_occurrence() {
        let s = sentence(12, &[2, 9]);
        let w = extract_windows(&s, &spec(), "t");
        assert_eq!(w.len(), 2);
        assert_eq!(w[0].target_index(), 2);
        assert_eq!(w[1].tokens()[w[1].target_index()].as_str(), "ბარი");
    }

    #[test]
    fn no_match_no_window() {
        assert!(extract_windows(&sentence(5, &[]), &spec(), "t").is_empty());
    }

    #[test]
    fn constructor_enforces_centering() {
        let s = sentence(13, &[]);
        assert!(SentenceWindow::new(s.clone(), 6, "x").is_ok());
        assert!(SentenceWindow::new(s[..8].to_vec(), 7, "x").is_err());
        assert!(SentenceWindow::new(sentence(14, &[]), 6, "x").is_err());
        assert!(SentenceWindow::new(Vec::new(), 0, "x").is_err());
    }

    #[test]
    fn filter_pipeline_tokenized_output() {
        let input = "ის ბარში წავიდა. კარგი!\nhello world\n";
        let mut out = Vec::new();
        let n = run_filter_pipeline(
            vec![(
                "mem".into(),
                Box::new(std::io::Cursor::new(input.to_string())),
            )],
            &mut out,
            true,
        )
        .unwrap();
        assert_eq!(n, 2);
        assert_eq!(String::from_utf8(out).unwrap(), "ის ბარში წავიდა\nკარგი\n");
    }
}
