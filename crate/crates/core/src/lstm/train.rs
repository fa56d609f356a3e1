use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::backward::loss_and_gradients;
use super::embed::embed_window;
use super::forward::{forward, forward_batch};
use super::model::{Architecture, LstmModel};
use super::optim::{Optimizer, OptimizerKind};
use crate::corpus::{LabeledExample, SentenceWindow, MAX_WINDOW_LEN};
use crate::embeddings::Embeddings;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierTrainConfig {
    pub max_epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    /// Epochs without validation-loss improvement before stopping.
    pub patience: usize,
    /// When false, runs all `max_epochs` and returns the final weights.
    pub early_stopping: bool,
    pub gradient_clip_norm: Option<f64>,
    pub hidden: usize,
    pub seq_len: usize,
    pub seed: u64,
}

impl Default for ClassifierTrainConfig {
    fn default() -> Self {
        ClassifierTrainConfig {
            max_epochs: 40,
            batch_size: 16,
            learning_rate: 1e-3,
            optimizer: OptimizerKind::default(),
            patience: 5,
            early_stopping: true,
            gradient_clip_norm: Some(5.0),
            hidden: 64,
            seq_len: MAX_WINDOW_LEN,
            seed: 42,
        }
    }
}

impl ClassifierTrainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if self.max_epochs == 0 || self.batch_size == 0 || self.hidden == 0 || self.seq_len == 0 {
            return bad(
                "epochs, batch size, hidden size and sequence length must be positive".into(),
            );
        }
        if self.learning_rate <= 0.0 {
            return bad(format!(
                "learning rate {} must be positive",
                self.learning_rate
            ));
        }
        if self.early_stopping && self.patience == 0 {
            return bad("patience must be at least 1".into());
        }
        if matches!(self.gradient_clip_norm, Some(c) if c <= 0.0) {
            return bad("gradient clip norm must be positive".into());
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub validation_loss: f64,
    pub validation_accuracy: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TrainingHistory {
    pub epochs: Vec<EpochRecord>,
    /// Index into `epochs` of the lowest validation loss.
    pub best_epoch: usize,
    pub stopped_early: bool,
}

impl TrainingHistory {
    pub fn best(&self) -> Option<&EpochRecord> {
        self.epochs.get(self.best_epoch)
    }
}

/// Embeds each example's window; returns inputs and class ids.
pub fn embed_examples<T: Scalar>(
    examples: &[LabeledExample],
    matrix: &Embeddings<T>,
    seq_len: usize,
) -> (Vec<Vec<T>>, Vec<usize>) {
    examples
        .iter()
        .map(|ex| (embed_window(&ex.window, matrix, seq_len), ex.class()))
        .unzip()
}

const EVAL_CHUNK: usize = 64;

/// Mean cross-entropy and accuracy over a labeled set, evaluated in fixed
/// chunks so the result depends only on the model and data.
pub fn dataset_loss<T: Scalar>(
    model: &LstmModel<T>,
    inputs: &[Vec<T>],
    labels: &[usize],
) -> Result<(f64, f64)> {
    let classes = model.arch.classes;
    let mut loss = 0.0;
    let mut correct = 0usize;
    for (xs, ys) in inputs.chunks(EVAL_CHUNK).zip(labels.chunks(EVAL_CHUNK)) {
        let refs: Vec<&[T]> = xs.iter().map(Vec::as_slice).collect();
        let cache = forward_batch(model, &refs)?;
        for (b, &y) in ys.iter().enumerate() {
            let probs = &cache.probs()[b * classes..(b + 1) * classes];
            loss -= probs[y].as_f64().max(f64::MIN_POSITIVE).ln();
            if argmax_probs(probs) == y {
                correct += 1;
            }
        }
    }
    let n = labels.len().max(1) as f64;
    Ok((loss / n, correct as f64 / n))
}

/// Index of the largest value; ties go to the lowest index.
pub fn argmax_probs<T: Scalar>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Trains a fresh classifier.
///
/// Weights are drawn from `config.seed`; the same generator then shuffles the
/// training set each epoch. After every epoch the validation loss is
/// recorded. With early stopping, training halts once the loss has not
/// improved for `patience` epochs and the best epoch's weights are returned.
pub fn train<T: Scalar>(
    train_set: &[LabeledExample],
    validation: &[LabeledExample],
    matrix: &Embeddings<T>,
    num_classes: usize,
    config: &ClassifierTrainConfig,
) -> Result<(LstmModel<T>, TrainingHistory)> {
    config.validate()?;
    if train_set.is_empty() || validation.is_empty() {
        return Err(Error::Config(
            "training and validation sets must be non-empty".into(),
        ));
    }
    for ex in train_set.iter().chain(validation) {
        match ex.label.sense() {
            Some(c) if c < num_classes => {}
            _ => {
                return Err(Error::Config(format!(
                    "label {} outside 0..{num_classes}",
                    ex.label
                )))
            }
        }
    }
    let arch = Architecture {
        input_dim: matrix.dim(),
        hidden: config.hidden,
        classes: num_classes,
        seq_len: config.seq_len,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut model = LstmModel::<T>::glorot(arch, &mut rng);
    let mut optimizer = Optimizer::new(config.optimizer, config.learning_rate, &model);
    let clip = config.gradient_clip_norm.map(T::lit);

    let (train_x, train_y) = embed_examples(train_set, matrix, arch.seq_len);
    let (val_x, val_y) = embed_examples(validation, matrix, arch.seq_len);

    let mut order: Vec<usize> = (0..train_x.len()).collect();
    let mut history = TrainingHistory::default();
    let mut best: Option<(f64, LstmModel<T>)> = None;
    let mut since_best = 0usize;

    for epoch in 0..config.max_epochs {
        order.shuffle(&mut rng);
        let mut loss_sum = 0.0;
        for (batch_idx, chunk) in order.chunks(config.batch_size).enumerate() {
            let batch: Vec<(&[T], usize)> = chunk
                .iter()
                .map(|&i| (train_x[i].as_slice(), train_y[i]))
                .collect();
            let (loss, grad) = loss_and_gradients(&model, &batch, clip).map_err(|e| match e {
                Error::NonFiniteLoss { .. } => Error::NonFiniteLoss {
                    epoch,
                    batch: batch_idx,
                },
                other => other,
            })?;
            if !grad.is_finite() {
                return Err(Error::NonFiniteLoss {
                    epoch,
                    batch: batch_idx,
                });
            }
            optimizer.step(&mut model, &grad);
            loss_sum += loss.as_f64() * chunk.len() as f64;
        }
        let (val_loss, val_acc) = dataset_loss(&model, &val_x, &val_y)?;
        history.epochs.push(EpochRecord {
            epoch,
            train_loss: loss_sum / train_x.len() as f64,
            validation_loss: val_loss,
            validation_accuracy: val_acc,
        });
        let improved = best.as_ref().is_none_or(|(b, _)| val_loss < *b);
        if improved {
            best = Some((val_loss, model.clone()));
            history.best_epoch = epoch;
            since_best = 0;
        } else {
            since_best += 1;
            if config.early_stopping && since_best >= config.patience {
                history.stopped_early = epoch + 1 < config.max_epochs;
                break;
            }
        }
    }

    let model = match (config.early_stopping, best) {
        (true, Some((_, best_model))) => best_model,
        _ => model,
    };
    Ok((model, history))
}

/// Most probable sense of a window, with the full distribution.
pub fn predict<T: Scalar>(
    model: &LstmModel<T>,
    window: &SentenceWindow,
    matrix: &Embeddings<T>,
) -> Result<(usize, Vec<T>)> {
    let x = embed_window(window, matrix, model.arch.seq_len);
    let (probs, _) = forward(model, &x)?;
    Ok((argmax_probs(&probs), probs))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn argmax_ties_go_low() {
        assert_eq!(argmax_probs(&[0.2f32, 0.4, 0.4]), 1);
        assert_eq!(argmax_probs(&[1.0f32 / 3.0; 3]), 0);
    }

    #[test]
    fn config_validation() {
        assert!(ClassifierTrainConfig::default().validate().is_ok());
        let c = ClassifierTrainConfig {
            patience: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        let c = ClassifierTrainConfig {
            patience: 0,
            early_stopping: false,
            ..Default::default()
        };
        assert!(c.validate().is_ok());
        let c = ClassifierTrainConfig {
            batch_size: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }
}
