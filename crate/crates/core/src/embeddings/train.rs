use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::matrix::Embeddings;
use super::sgns::step_with_scratch;
use super::vocab::Vocabulary;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct EmbeddingConfig {
    pub dimension: usize,
    /// Maximum context radius; each centre word draws its radius from `1..=window`.
    pub window: usize,
    pub min_count: u64,
    pub epochs: usize,
    pub negative_samples: usize,
    pub learning_rate: f64,
    /// Learning rate reached at the end of training.
    pub min_learning_rate: f64,
    /// Frequent-word subsampling threshold; `None` disables subsampling.
    pub subsample: Option<f64>,
    pub table_size: usize,
    pub seed: u64,
}

impl Default for EmbeddingConfig {
    fn default() -> Self {
        EmbeddingConfig {
            dimension: 128,
            window: 10,
            min_count: 10,
            epochs: 20,
            negative_samples: 5,
            learning_rate: 0.025,
            min_learning_rate: 0.0001,
            subsample: None,
            table_size: 10_000_000,
            seed: 42,
        }
    }
}

impl EmbeddingConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        if self.dimension == 0 {
            return bad("dimension must be at least 1");
        }
        if self.window == 0 {
            return bad("window must be at least 1");
        }
        if self.negative_samples == 0 {
            return bad("negative samples must be at least 1");
        }
        if self.table_size == 0 {
            return bad("unigram table must not be empty");
        }
        if !(self.learning_rate > 0.0 && self.min_learning_rate >= 0.0) {
            return bad("learning rates must be positive");
        }
        Ok(())
    }
}

/// Mean pair loss per epoch.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct EmbeddingStats {
    pub epoch_loss: Vec<f64>,
    pub pairs: u64,
}

/// Negative-sampling table: word `i` fills a share of slots proportional to
/// `count_i ^ 0.75`.
#[derive(Clone, Debug)]
pub struct UnigramTable {
    slots: Vec<u32>,
}

impl UnigramTable {
    pub fn new(vocab: &Vocabulary, size: usize) -> Self {
        let weights: Vec<f64> = vocab
            .counts()
            .iter()
            .map(|&c| (c as f64).powf(0.75))
            .collect();
        let total: f64 = weights.iter().sum();
        let mut slots = Vec::with_capacity(size);
        let mut word = 0usize;
        let mut cumulative = weights[0] / total;
        for slot in 0..size {
            slots.push(word as u32);
            if (slot + 1) as f64 / size as f64 > cumulative && word + 1 < weights.len() {
                word += 1;
                cumulative += weights[word] / total;
            }
        }
        UnigramTable { slots }
    }

    #[inline]
    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        self.slots[rng.gen_range(0..self.slots.len())] as usize
    }

    pub fn slots(&self) -> &[u32] {
        &self.slots
    }
}

/// Reads a one-sentence-per-line corpus into word lists.
pub fn read_corpus(path: impl AsRef<Path>) -> Result<Vec<Vec<String>>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(file)
        .lines()
        .map(|line| {
            line.map(|l| l.split_whitespace().map(str::to_string).collect())
                .map_err(|e| Error::io(path, e))
        })
        .collect()
}

/// Trains `f32` embeddings from a one-sentence-per-line corpus file.
pub fn train_embeddings(
    corpus_path: impl AsRef<Path>,
    config: &EmbeddingConfig,
) -> Result<Embeddings<f32>> {
    let sentences = read_corpus(corpus_path)?;
    Ok(train_embeddings_on(&sentences, config)?.0)
}

/// Skip-gram negative-sampling training over in-memory sentences.
///
/// Single-threaded; one seeded generator drives initialization, window radii,
/// subsampling and negative draws, so the result is a function of
/// `(sentences, config)`. The learning rate decays linearly from
/// `learning_rate` to `min_learning_rate` over all centre words of all epochs.
pub fn train_embeddings_on<T: Scalar, S: AsRef<[String]>>(
    sentences: &[S],
    config: &EmbeddingConfig,
) -> Result<(Embeddings<T>, EmbeddingStats)> {
    config.validate()?;
    let vocab = Vocabulary::from_sentences(sentences.iter().map(|s| s.as_ref()), config.min_count)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut m = Embeddings::<T>::initialize(vocab, config.dimension, &mut rng);
    let table = UnigramTable::new(m.vocab(), config.table_size);

    let encoded: Vec<Vec<usize>> = sentences
        .iter()
        .map(|s| s.as_ref().iter().filter_map(|w| m.vocab().get(w)).collect())
        .collect();
    let words_per_epoch: usize = encoded.iter().map(Vec::len).sum();
    let total_words = (words_per_epoch * config.epochs).max(1) as f64;
    let keep_prob: Option<Vec<f64>> = config.subsample.map(|t| {
        let total = m.vocab().total_count() as f64;
        m.vocab()
            .counts()
            .iter()
            .map(|&c| {
                let f = c as f64 / total;
                ((f / t).sqrt() + 1.0) * t / f
            })
            .collect()
    });

    let mut stats = EmbeddingStats::default();
    let mut scratch = vec![T::zero(); config.dimension];
    let mut negatives = Vec::with_capacity(config.negative_samples);
    let mut kept = Vec::new();
    let mut processed = 0usize;
    for _ in 0..config.epochs {
        let mut epoch_loss = 0.0;
        let mut epoch_pairs = 0u64;
        for sentence in &encoded {
            kept.clear();
            match &keep_prob {
                Some(p) => kept.extend(
                    sentence
                        .iter()
                        .copied()
                        .filter(|&w| rng.gen::<f64>() < p[w]),
                ),
                None => kept.extend_from_slice(sentence),
            }
            for pos in 0..kept.len() {
                let progress = processed as f64 / total_words;
                let lr = config.learning_rate
                    + (config.min_learning_rate - config.learning_rate) * progress;
                processed += 1;
                let radius = rng.gen_range(1..=config.window);
                let lo = pos.saturating_sub(radius);
                let hi = (pos + radius + 1).min(kept.len());
                for ctx_pos in lo..hi {
                    if ctx_pos == pos {
                        continue;
                    }
                    let context = kept[ctx_pos];
                    negatives.clear();
                    for _ in 0..config.negative_samples {
                        let n = table.sample(&mut rng);
                        if n != context {
                            negatives.push(n);
                        }
                    }
                    let loss = step_with_scratch(
                        &mut m,
                        kept[pos],
                        context,
                        &negatives,
                        T::lit(lr),
                        &mut scratch,
                    );
                    epoch_loss += loss.as_f64();
                    epoch_pairs += 1;
                }
            }
        }
        stats.pairs += epoch_pairs;
        stats.epoch_loss.push(if epoch_pairs > 0 {
            epoch_loss / epoch_pairs as f64
        } else {
            0.0
        });
    }
    Ok((m, stats))
}
