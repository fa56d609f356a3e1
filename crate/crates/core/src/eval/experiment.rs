use super::ablation::{ablate_training_size, AblationCurve};
use super::metrics::Metrics;
use super::repeat::{repeat_training, RepetitionSummary};
use crate::corpus::{LabeledExample, Split};
use crate::embeddings::Embeddings;
use crate::error::Result;
use crate::lstm::{
    embed_examples, forward_batch, train, ClassifierTrainConfig, LstmModel, TrainingHistory,
};
use crate::scalar::Scalar;

/// A fixed split and embedding table against which LSTM classifiers are
/// trained and scored. Only the training seed varies between runs.
pub struct LstmExperiment<'a, T> {
    pub split: &'a Split,
    pub embeddings: &'a Embeddings<T>,
    pub num_classes: usize,
    pub config: ClassifierTrainConfig,
}

impl<T: Scalar> LstmExperiment<'_, T> {
    /// Scores a model on a labeled set using batched forward passes.
    pub fn score(&self, model: &LstmModel<T>, examples: &[LabeledExample]) -> Result<Metrics> {
        let (inputs, labels) = embed_examples(examples, self.embeddings, model.arch.seq_len);
        let classes = model.arch.classes;
        let mut pairs = Vec::with_capacity(labels.len());
        for (xs, ys) in inputs.chunks(64).zip(labels.chunks(64)) {
            let refs: Vec<&[T]> = xs.iter().map(Vec::as_slice).collect();
            let cache = forward_batch(model, &refs)?;
            for (b, &y) in ys.iter().enumerate() {
                let probs = &cache.probs()[b * classes..(b + 1) * classes];
                pairs.push((y, crate::lstm::argmax_probs(probs)));
            }
        }
        Ok(Metrics::from_pairs(pairs, self.num_classes))
    }

    /// Trains with `seed` on the split's train/validation parts and scores
    /// the result on its test part.
    pub fn run(&self, seed: u64) -> Result<(LstmModel<T>, TrainingHistory, Metrics)> {
        self.run_on(&self.split.train, seed, &self.config)
    }

    fn run_on(
        &self,
        train_set: &[LabeledExample],
        seed: u64,
        config: &ClassifierTrainConfig,
    ) -> Result<(LstmModel<T>, TrainingHistory, Metrics)> {
        let config = ClassifierTrainConfig {
            seed,
            ..config.clone()
        };
        let (model, history) = train(
            train_set,
            &self.split.validation,
            self.embeddings,
            self.num_classes,
            &config,
        )?;
        let metrics = self.score(&model, &self.split.test)?;
        Ok((model, history, metrics))
    }

    /// `n` trainings with seeds `base_seed..base_seed+n` on the same split.
    pub fn repeat(
        &self,
        n: usize,
        base_seed: u64,
        threads: Option<usize>,
    ) -> Result<RepetitionSummary> {
        repeat_training(n, base_seed, threads, |seed| Ok(self.run(seed)?.2.accuracy))
    }

    /// Trains for exactly `epochs` epochs, without early stopping, on a
    /// stratified subset of the training part for each fraction.
    pub fn ablate(
        &self,
        fractions: &[f64],
        epochs: usize,
        subset_seed: u64,
    ) -> Result<AblationCurve> {
        let config = ClassifierTrainConfig {
            max_epochs: epochs,
            early_stopping: false,
            ..self.config.clone()
        };
        ablate_training_size(
            fractions,
            epochs,
            &self.split.train,
            &self.split.test,
            self.num_classes,
            subset_seed,
            |subset, _test| Ok(self.run_on(subset, config.seed, &config)?.2.accuracy),
        )
    }
}
