use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::ablation::AblationCurve;
use super::metrics::Metrics;
use super::repeat::RepetitionSummary;
use crate::error::{Error, Result};

/// The JSON document every evaluator emits, discriminated by `kind`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MetricsDocument {
    Metrics {
        model: String,
        test_size: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        split_seed: Option<u64>,
        #[serde(flatten)]
        metrics: Metrics,
    },
    Repetition {
        model: String,
        test_size: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        split_seed: Option<u64>,
        #[serde(flatten)]
        summary: RepetitionSummary,
    },
    Ablation {
        model: String,
        test_size: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        split_seed: Option<u64>,
        #[serde(flatten)]
        curve: AblationCurve,
    },
}

impl MetricsDocument {
    pub fn kind(&self) -> &'static str {
        match self {
            MetricsDocument::Metrics { .. } => "metrics",
            MetricsDocument::Repetition { .. } => "repetition",
            MetricsDocument::Ablation { .. } => "ablation",
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("metrics documents always serialize");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Document(e.to_string()))
    }
}

pub fn write_document(doc: &MetricsDocument, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, doc.to_json()).map_err(|e| Error::io(path, e))
}

pub fn read_document(path: impl AsRef<Path>) -> Result<MetricsDocument> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    MetricsDocument::from_json(&text)
}
