use serde::{Deserialize, Serialize};

use crate::corpus::{LabeledExample, SentenceWindow};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub support: u64,
}

/// Accuracy, per-class precision/recall and the confusion matrix
/// (`confusion[true][predicted]`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub per_class: Vec<ClassMetrics>,
    pub confusion: Vec<Vec<u64>>,
    pub n_examples: u64,
}

impl Metrics {
    /// Tabulates `(truth, prediction)` pairs. Precision or recall with a zero
    /// denominator is reported as 0.
    pub fn from_pairs(pairs: impl IntoIterator<Item = (usize, usize)>, num_classes: usize) -> Self {
        let mut confusion = vec![vec![0u64; num_classes]; num_classes];
        for (truth, pred) in pairs {
            confusion[truth][pred] += 1;
        }
        let n: u64 = confusion.iter().flatten().sum();
        let correct: u64 = (0..num_classes).map(|c| confusion[c][c]).sum();
        let ratio = |num: u64, den: u64| {
            if den == 0 {
                0.0
            } else {
                num as f64 / den as f64
            }
        };
        let per_class = (0..num_classes)
            .map(|c| {
                let support: u64 = confusion[c].iter().sum();
                let predicted: u64 = confusion.iter().map(|row| row[c]).sum();
                ClassMetrics {
                    precision: ratio(confusion[c][c], predicted),
                    recall: ratio(confusion[c][c], support),
                    support,
                }
            })
            .collect();
        Metrics {
            accuracy: ratio(correct, n),
            per_class,
            confusion,
            n_examples: n,
        }
    }

    pub fn num_classes(&self) -> usize {
        self.confusion.len()
    }
}

/// Applies `predict` to every test window and tabulates the results.
/// Labels must be sense ids below `num_classes`.
pub fn evaluate<F>(mut predict: F, test: &[LabeledExample], num_classes: usize) -> Metrics
where
    F: FnMut(&SentenceWindow) -> usize,
{
    Metrics::from_pairs(
        test.iter().map(|ex| (ex.class(), predict(&ex.window))),
        num_classes,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hand_tabulated_ten_examples() {
        // truth:      0 0 0 1 1 1 1 2 2 2
        // prediction: 0 1 0 1 1 2 1 2 0 2
        let truth = [0, 0, 0, 1, 1, 1, 1, 2, 2, 2];
        let pred = [0, 1, 0, 1, 1, 2, 1, 2, 0, 2];
        let m = Metrics::from_pairs(truth.into_iter().zip(pred), 3);
        assert_eq!(
            m.confusion,
            vec![vec![2, 1, 0], vec![0, 3, 1], vec![1, 0, 2]]
        );
        assert_eq!(m.n_examples, 10);
        assert!((m.accuracy - 0.7).abs() < 1e-15);
        assert!((m.per_class[0].precision - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.per_class[0].recall - 2.0 / 3.0).abs() < 1e-15);
        assert!((m.per_class[1].precision - 0.75).abs() < 1e-15);
        assert!((m.per_class[1].recall - 0.75).abs() < 1e-15);
        assert!((m.per_class[2].precision - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(m.per_class[2].support, 3);
    }

    #[test]
    fn unpredicted_class_has_zero_precision() {
        let m = Metrics::from_pairs([(0, 0), (1, 0)], 2);
        assert_eq!(m.per_class[1].precision, 0.0);
        assert_eq!(m.per_class[1].recall, 0.0);
        assert_eq!(m.accuracy, 0.5);
    }
}
