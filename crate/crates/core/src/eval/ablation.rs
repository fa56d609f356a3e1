use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::corpus::{stratified_subset, write_dataset, LabeledExample};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationPoint {
    pub fraction: f64,
    pub train_size: usize,
    pub accuracy: f64,
    /// Digest of the test set this point was scored on.
    pub test_sha256: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AblationCurve {
    pub epochs_per_point: usize,
    pub points: Vec<AblationPoint>,
}

/// SHA-256 of the test set in dataset-file form.
pub fn test_set_digest(test: &[LabeledExample]) -> String {
    let mut buf = Vec::new();
    write_dataset(&mut buf, test).expect("writing to memory");
    hex::encode(Sha256::digest(&buf))
}

/// Scores `fit_and_score(subset, test)` on a stratified subset of the training
/// data for each fraction, in the order given. Fractions must lie in (0, 1]
/// and be strictly increasing; subsets are drawn with `subset_seed`.
pub fn ablate_training_size<F>(
    fractions: &[f64],
    epochs: usize,
    train: &[LabeledExample],
    test: &[LabeledExample],
    num_classes: usize,
    subset_seed: u64,
    mut fit_and_score: F,
) -> Result<AblationCurve>
where
    F: FnMut(&[LabeledExample], &[LabeledExample]) -> Result<f64>,
{
    if fractions.is_empty() {
        return Err(Error::Config("no fractions given".into()));
    }
    for pair in fractions.windows(2) {
        if pair[1] <= pair[0] {
            return Err(Error::Config(format!(
                "fractions must be strictly increasing, got {} then {}",
                pair[0], pair[1]
            )));
        }
    }
    let mut points = Vec::with_capacity(fractions.len());
    for &fraction in fractions {
        let subset = stratified_subset(train, fraction, subset_seed, num_classes)?;
        let accuracy = fit_and_score(&subset, test)?;
        points.push(AblationPoint {
            fraction,
            train_size: subset.len(),
            accuracy,
            test_sha256: test_set_digest(test),
        });
    }
    Ok(AblationCurve {
        epochs_per_point: epochs,
        points,
    })
}
