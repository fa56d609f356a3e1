use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::dataset::{LabeledExample, SenseLabel};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SplitSpec {
    pub seed: u64,
    pub test_fraction: f64,
    /// Share of the remaining training data held out for validation.
    pub validation_fraction: f64,
    pub stratified: bool,
}

impl Default for SplitSpec {
    fn default() -> Self {
        SplitSpec {
            seed: 42,
            test_fraction: 0.2,
            validation_fraction: 0.2,
            stratified: true,
        }
    }
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.test_fraction > 0.0 && self.test_fraction < 1.0) {
            return Err(Error::Config(format!(
                "test fraction {} not in (0, 1)",
                self.test_fraction
            )));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::Config(format!(
                "validation fraction {} not in [0, 1)",
                self.validation_fraction
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<LabeledExample>,
    pub validation: Vec<LabeledExample>,
    pub test: Vec<LabeledExample>,
}

/// `count * fraction` rounded to nearest, halves rounding up.
fn share(count: usize, fraction: f64) -> usize {
    let exact = count as f64 * fraction;
    ((exact + 0.5 + 1e-9).floor() as usize).min(count)
}

fn group_by_class(
    examples: &[LabeledExample],
    num_classes: usize,
    stratified: bool,
) -> Result<Vec<Vec<usize>>> {
    let groups = if stratified { num_classes } else { 1 };
    let mut by_class = vec![Vec::new(); groups];
    for (i, ex) in examples.iter().enumerate() {
        let class = match ex.label {
            SenseLabel::Sense(c) if c < num_classes => c,
            SenseLabel::Sense(c) => {
                return Err(Error::Config(format!("label {c} outside 0..{num_classes}")))
            }
            SenseLabel::Other => {
                return Err(Error::Config(
                    "OTHER-labeled examples must be removed before splitting".into(),
                ))
            }
        };
        by_class[if stratified { class } else { 0 }].push(i);
    }
    for (class, members) in by_class.iter().enumerate() {
        if members.is_empty() {
            return Err(Error::EmptyClass { class });
        }
    }
    Ok(by_class)
}

fn gather(examples: &[LabeledExample], mut idx: Vec<usize>) -> Vec<LabeledExample> {
    idx.sort_unstable();
    idx.into_iter().map(|i| examples[i].clone()).collect()
}

/// Partitions examples into train/validation/test, preserving class
/// proportions. Each class is shuffled with a generator seeded from
/// `spec.seed`; its test share is `round(count * test_fraction)` and the
/// validation share is taken from the remainder the same way. Each part keeps
/// the input order.
pub fn stratified_split(
    examples: &[LabeledExample],
    spec: &SplitSpec,
    num_classes: usize,
) -> Result<Split> {
    spec.validate()?;
    let by_class = group_by_class(examples, num_classes, spec.stratified)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let (mut train, mut validation, mut test) = (Vec::new(), Vec::new(), Vec::new());
    for mut members in by_class {
        members.shuffle(&mut rng);
        let n_test = share(members.len(), spec.test_fraction);
        let n_val = share(members.len() - n_test, spec.validation_fraction);
        test.extend_from_slice(&members[..n_test]);
        validation.extend_from_slice(&members[n_test..n_test + n_val]);
        train.extend_from_slice(&members[n_test + n_val..]);
    }
    Ok(Split {
        train: gather(examples, train),
        validation: gather(examples, validation),
        test: gather(examples, test),
    })
}

/// Seeded stratified subsample keeping `round(count * fraction)` of each class.
pub fn stratified_subset(
    examples: &[LabeledExample],
    fraction: f64,
    seed: u64,
    num_classes: usize,
) -> Result<Vec<LabeledExample>> {
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::Config(format!("fraction {fraction} not in (0, 1]")));
    }
    let by_class = group_by_class(examples, num_classes, true)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut keep = Vec::new();
    for (class, mut members) in by_class.into_iter().enumerate() {
        members.shuffle(&mut rng);
        let n = share(members.len(), fraction);
        if n == 0 {
            return Err(Error::EmptyClass { class });
        }
        keep.extend_from_slice(&members[..n]);
    }
    Ok(gather(examples, keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{SentenceWindow, Token};

    fn examples(counts: &[usize]) -> Vec<LabeledExample> {
        let window = SentenceWindow::new(vec![Token::new("ბარი").unwrap()], 0, "x").unwrap();
        let mut out = Vec::new();
        for (class, &n) in counts.iter().enumerate() {
            for _ in 0..n {
                out.push(LabeledExample {
                    window: window.clone(),
                    label: SenseLabel::Sense(class),
                });
            }
        }
        out
    }

    fn class_counts(part: &[LabeledExample], k: usize) -> Vec<usize> {
        let mut c = vec![0; k];
        for ex in part {
            c[ex.class()] += 1;
        }
        c
    }

    #[test]
    fn rounding_rule() {
        assert_eq!(share(763, 0.2), 153);
        assert_eq!(share(1846, 0.2), 369);
        assert_eq!(share(3320, 0.2), 664);
        assert_eq!(share(5, 0.1), 1);
        assert_eq!(share(10, 0.2), 2);
    }

    #[test]
    fn single_class_ten_examples() {
        let ex = examples(&[10]);
        let spec = SplitSpec {
            validation_fraction: 0.0,
            ..SplitSpec::default()
        };
        let split = stratified_split(&ex, &spec, 1).unwrap();
        assert_eq!(split.train.len(), 8);
        assert_eq!(split.test.len(), 2);
        assert!(split.validation.is_empty());
    }

    #[test]
    fn missing_class_is_reported() {
        let ex = examples(&[4, 0, 3]);
        let err = stratified_split(&ex, &SplitSpec::default(), 3).unwrap_err();
        assert!(matches!(err, Error::EmptyClass { class: 1 }));
    }

    #[test]
    fn other_label_is_rejected() {
        let mut ex = examples(&[3]);
        ex[0].label = SenseLabel::Other;
        assert!(stratified_split(&ex, &SplitSpec::default(), 1).is_err());
    }

    #[test]
    fn subset_keeps_proportions() {
        let ex = examples(&[40, 100, 60]);
        let sub = stratified_subset(&ex, 0.25, 3, 3).unwrap();
        assert_eq!(class_counts(&sub, 3), vec![10, 25, 15]);
        assert!(matches!(
            stratified_subset(&examples(&[1, 100]), 0.1, 3, 2),
            Err(Error::EmptyClass { class: 0 })
        ));
    }
}
