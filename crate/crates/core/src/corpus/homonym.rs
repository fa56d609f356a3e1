use std::collections::HashSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// One entry of a sense inventory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sense {
    pub id: usize,
    pub gloss: String,
    /// Base form of a synonym that names this sense unambiguously.
    pub synonym: String,
}

/// A homonym, the surface forms to match, and its senses.
///
/// Config files are line oriented:
///
/// ```text
/// # comment
/// lemma ბარი
/// form ბარი
/// form ბარში
/// sense 0 shovel ნიჩაბი
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomonymSpec {
    lemma: String,
    surface_forms: Vec<String>,
    senses: Vec<Sense>,
    form_set: HashSet<String>,
}

impl HomonymSpec {
    pub fn new(
        lemma: impl Into<String>,
        surface_forms: Vec<String>,
        mut senses: Vec<Sense>,
    ) -> Result<Self> {
        let lemma = lemma.into();
        if surface_forms.is_empty() {
            return Err(Error::Spec("no surface forms".into()));
        }
        if !surface_forms.contains(&lemma) {
            return Err(Error::Spec(format!(
                "lemma {lemma:?} is not listed as a form"
            )));
        }
        if senses.is_empty() {
            return Err(Error::Spec("empty sense inventory".into()));
        }
        senses.sort_by_key(|s| s.id);
        for (expected, sense) in senses.iter().enumerate() {
            if sense.id != expected {
                return Err(Error::Spec(format!(
                    "sense ids must be 0..{} without gaps, found {}",
                    senses.len(),
                    sense.id
                )));
            }
        }
        let mut synonyms = HashSet::new();
        for sense in &senses {
            if !synonyms.insert(sense.synonym.as_str()) {
                return Err(Error::Spec(format!(
                    "synonym {:?} assigned to more than one sense",
                    sense.synonym
                )));
            }
        }
        let form_set = surface_forms.iter().cloned().collect();
        Ok(HomonymSpec {
            lemma,
            surface_forms,
            senses,
            form_set,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lemma = None;
        let mut forms = Vec::new();
        let mut senses = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let bad = |what: &str| Error::Spec(format!("line {}: {what}: {line:?}", n + 1));
            match fields.as_slice() {
                ["lemma", value] => {
                    if lemma.replace(value.to_string()).is_some() {
                        return Err(bad("duplicate lemma"));
                    }
                }
                ["form", value] => {
                    if !forms.iter().any(|f| f == value) {
                        forms.push(value.to_string());
                    }
                }
                ["sense", id, gloss, synonym] => {
                    let id = id.parse().map_err(|_| bad("sense id is not an integer"))?;
                    if senses.iter().any(|s: &Sense| s.id == id) {
                        return Err(bad("duplicate sense id"));
                    }
                    senses.push(Sense {
                        id,
                        gloss: gloss.to_string(),
                        synonym: synonym.to_string(),
                    });
                }
                _ => {
                    return Err(bad(
                        "expected `lemma <w>`, `form <w>` or `sense <id> <gloss> <synonym>`",
                    ))
                }
            }
        }
        let lemma = lemma.ok_or_else(|| Error::Spec("missing lemma".into()))?;
        HomonymSpec::new(lemma, forms, senses)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        HomonymSpec::parse(&text)
    }

    pub fn to_config_string(&self) -> String {
        let mut out = format!("lemma {}\n", self.lemma);
        for form in &self.surface_forms {
            out.push_str(&format!("form {form}\n"));
        }
        for s in &self.senses {
            out.push_str(&format!("sense {} {} {}\n", s.id, s.gloss, s.synonym));
        }
        out
    }

    pub fn lemma(&self) -> &str {
        &self.lemma
    }

    pub fn surface_forms(&self) -> &[String] {
        &self.surface_forms
    }

    pub fn senses(&self) -> &[Sense] {
        &self.senses
    }

    pub fn num_senses(&self) -> usize {
        self.senses.len()
    }

    pub fn matches(&self, word: &str) -> bool {
        self.form_set.contains(word)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BARI: &str = "\
# test inventory
lemma ბარი
form ბარი
form ბარში
sense 0 shovel ნიჩაბი
sense 2 cafe კაფე
sense 1 lowland დაბლობი
";

    #[test]
    fn parses_and_orders_senses() {
        let spec = HomonymSpec::parse(BARI).unwrap();
        assert_eq!(spec.lemma(), "ბარი");
        assert_eq!(spec.surface_forms().len(), 2);
        let glosses: Vec<_> = spec.senses().iter().map(|s| s.gloss.as_str()).collect();
        assert_eq!(glosses, ["shovel", "lowland", "cafe"]);
        assert!(spec.matches("ბარში"));
        assert!(!spec.matches("ბარ"));
        assert_eq!(HomonymSpec::parse(&spec.to_config_string()).unwrap(), spec);
    }

    #[test]
    fn lemma_must_be_a_form() {
        let err = HomonymSpec::parse("lemma ბარი\nform ბარში\nsense 0 a ა\n").unwrap_err();
        assert!(err.to_string().contains("lemma"));
    }

    #[test]
    fn sense_ids_must_be_contiguous() {
        assert!(HomonymSpec::parse("lemma ა\nform ა\nsense 0 a ბ\nsense 2 b გ\n").is_err());
        assert!(HomonymSpec::parse("lemma ა\nform ა\nsense 1 a ბ\n").is_err());
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(HomonymSpec::parse("lemma ა\nform ა\nsense x a ბ\n").is_err());
        assert!(HomonymSpec::parse("lemma ა\nform ა\nbogus\nsense 0 a ბ\n").is_err());
        assert!(HomonymSpec::parse("form ა\nsense 0 a ბ\n").is_err());
        assert!(HomonymSpec::parse("lemma ა\nform ა\nsense 0 a ბ\nsense 1 b ბ\n").is_err());
    }
}
