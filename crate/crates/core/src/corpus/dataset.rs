use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use super::homonym::HomonymSpec;
use super::text::Token;
use super::window::{SentenceWindow, MAX_WINDOW_LEN};
use crate::error::{Error, Result};

/// First line of every window/dataset file.
pub const DATASET_HEADER: &str = "#wsd-v1";

/// A sense id from the inventory, or `Other` for unlabeled and
/// out-of-inventory examples (written as `-`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum SenseLabel {
    Sense(usize),
    Other,
}

impl SenseLabel {
    pub fn sense(self) -> Option<usize> {
        match self {
            SenseLabel::Sense(id) => Some(id),
            SenseLabel::Other => None,
        }
    }
}

impl fmt::Display for SenseLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SenseLabel::Sense(id) => write!(f, "{id}"),
            SenseLabel::Other => f.write_str("-"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledExample {
    pub window: SentenceWindow,
    pub label: SenseLabel,
}

impl LabeledExample {
    /// The sense id. Panics on `Other`; classifier inputs never carry it.
    pub fn class(&self) -> usize {
        self.label
            .sense()
            .expect("OTHER-labeled example passed to the classifier")
    }
}

/// Writes the header and one `label<TAB>target_index<TAB>tokens` line per example.
pub fn write_dataset(out: &mut impl Write, examples: &[LabeledExample]) -> std::io::Result<()> {
    writeln!(out, "{DATASET_HEADER}")?;
    for ex in examples {
        writeln!(
            out,
            "{}\t{}\t{}",
            ex.label,
            ex.window.target_index(),
            ex.window.text()
        )?;
    }
    Ok(())
}

/// Parses a dataset stream. `name` is used in error messages and source ids.
pub fn read_dataset(
    reader: impl BufRead,
    name: &Path,
    spec: &HomonymSpec,
) -> Result<Vec<LabeledExample>> {
    let record_err = |line: usize, field: &'static str, message: String| Error::Record {
        path: name.to_path_buf(),
        line,
        field,
        message,
    };
    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(first))) if first.trim_end() == DATASET_HEADER => {}
        Some((_, Err(e))) => return Err(Error::io(name, e)),
        _ => {
            return Err(record_err(
                1,
                "header",
                format!("expected {DATASET_HEADER}"),
            ))
        }
    }

    let mut examples = Vec::new();
    for (n, line) in lines {
        let lineno = n + 1;
        let line = line.map_err(|e| Error::io(name, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(record_err(
                lineno,
                "record",
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let label = match fields[0] {
            "-" => SenseLabel::Other,
            raw => {
                let id: usize = raw.parse().map_err(|_| {
                    record_err(lineno, "label", format!("{raw:?} is not a sense id or `-`"))
                })?;
                if id >= spec.num_senses() {
                    return Err(record_err(
                        lineno,
                        "label",
                        format!("{id} outside 0..{}", spec.num_senses()),
                    ));
                }
                SenseLabel::Sense(id)
            }
        };
        let target_index: usize = fields[1].parse().map_err(|_| {
            record_err(
                lineno,
                "target_index",
                format!("{:?} is not an integer", fields[1]),
            )
        })?;
        let tokens = fields[2]
            .split(' ')
            .map(Token::new)
            .collect::<Result<Vec<_>>>()
            .map_err(|e| record_err(lineno, "tokens", e.to_string()))?;
        if tokens.len() > MAX_WINDOW_LEN {
            return Err(record_err(
                lineno,
                "tokens",
                format!("{} tokens, at most {MAX_WINDOW_LEN} allowed", tokens.len()),
            ));
        }
        let source = format!("{}:{lineno}", name.display());
        let window = SentenceWindow::new(tokens, target_index, source)
            .map_err(|e| record_err(lineno, "target_index", e.to_string()))?;
        if !spec.matches(window.target().as_str()) {
            return Err(record_err(
                lineno,
                "target_index",
                format!(
                    "{:?} is not a surface form of {}",
                    window.target().as_str(),
                    spec.lemma()
                ),
            ));
        }
        examples.push(LabeledExample { window, label });
    }
    Ok(examples)
}

/// Loads a labeled dataset file, validating every record against `spec`.
pub fn load_labeled_dataset(
    path: impl AsRef<Path>,
    spec: &HomonymSpec,
) -> Result<Vec<LabeledExample>> {
    let path: PathBuf = path.as_ref().to_path_buf();
    let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
    read_dataset(BufReader::new(file), &path, spec)
}
