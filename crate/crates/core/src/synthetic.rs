//! Generated Georgian-script sense-disambiguation tasks with known structure.
//!
//! Every class owns a pool of pseudo-words; a window's context tokens come
//! from its class pool with probability `indicative_prob`, from another
//! class's pool with probability `distractor_prob`, and otherwise from a
//! shared pool. Pseudo-words are three Mkhedruli syllables, so they pass the
//! same token validation as real corpus text and never collide with the
//! two-syllable homonym forms.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{
    HomonymSpec, LabeledExample, Sense, SenseLabel, SentenceWindow, Token, CONTEXT_RADIUS,
};
use crate::error::Result;

const CONSONANTS: [char; 27] = [
    'ბ', 'გ', 'დ', 'ვ', 'ზ', 'თ', 'კ', 'ლ', 'მ', 'ნ', 'პ', 'ჟ', 'რ', 'ს', 'ტ', 'ფ', 'ქ', 'ღ', 'ყ',
    'შ', 'ჩ', 'ც', 'ძ', 'წ', 'ჭ', 'ხ', 'ჯ',
];
const VOWELS: [char; 5] = ['ა', 'ე', 'ი', 'ო', 'უ'];

/// The `index`-th three-syllable pseudo-word (unique for index < 135^3).
pub fn pseudo_word(index: usize) -> String {
    let syllables = CONSONANTS.len() * VOWELS.len();
    let mut n = index;
    let mut word = String::new();
    for _ in 0..3 {
        let s = n % syllables;
        n /= syllables;
        word.push(CONSONANTS[s / VOWELS.len()]);
        word.push(VOWELS[s % VOWELS.len()]);
    }
    word
}

#[derive(Clone, Debug, PartialEq)]
pub struct SyntheticConfig {
    pub windows: usize,
    /// Relative class frequencies; also fixes the number of classes.
    pub class_weights: Vec<f64>,
    pub words_per_class: usize,
    pub shared_words: usize,
    pub indicative_prob: f64,
    pub distractor_prob: f64,
    /// Share of windows cut short by a sentence edge.
    pub truncated_share: f64,
    /// Sentences in the accompanying embedding corpus.
    pub corpus_sentences: usize,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    /// 5,000 windows with class frequencies 763 : 1,846 : 3,320.
    fn default() -> Self {
        SyntheticConfig {
            windows: 5000,
            class_weights: vec![763.0, 1846.0, 3320.0],
            words_per_class: 40,
            shared_words: 200,
            indicative_prob: 0.45,
            distractor_prob: 0.05,
            truncated_share: 0.2,
            corpus_sentences: 3000,
            seed: 7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SyntheticTask {
    pub spec: HomonymSpec,
    pub examples: Vec<LabeledExample>,
    /// Unlabeled sentences for training word vectors, one token list each.
    pub corpus: Vec<Vec<String>>,
}

/// The homonym used by generated tasks.
pub fn synthetic_spec(classes: usize) -> HomonymSpec {
    let forms = ["ბარი", "ბარში", "ბარს", "ბარის", "ბარზე"];
    let senses = (0..classes)
        .map(|id| Sense {
            id,
            gloss: format!("sense{id}"),
            synonym: pseudo_word(900_000 + id),
        })
        .collect();
    HomonymSpec::new(
        "ბარი",
        forms.iter().map(|s| s.to_string()).collect(),
        senses,
    )
    .expect("valid synthetic spec")
}

struct Sampler<'a> {
    cfg: &'a SyntheticConfig,
    spec: &'a HomonymSpec,
    cumulative: Vec<f64>,
}

impl Sampler<'_> {
    fn class(&self, rng: &mut impl Rng) -> usize {
        let u = rng.gen::<f64>() * self.cumulative.last().unwrap();
        self.cumulative
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cumulative.len() - 1)
    }

    fn context_word(&self, class: usize, rng: &mut impl Rng) -> String {
        let k = self.cfg.class_weights.len();
        let u = rng.gen::<f64>();
        let pool = if u < self.cfg.indicative_prob {
            Some(class)
        } else if u < self.cfg.indicative_prob + self.cfg.distractor_prob && k > 1 {
            let other = rng.gen_range(0..k - 1);
            Some(if other >= class { other + 1 } else { other })
        } else {
            None
        };
        match pool {
            Some(c) => pseudo_word(
                c * self.cfg.words_per_class + rng.gen_range(0..self.cfg.words_per_class),
            ),
            None => {
                pseudo_word(k * self.cfg.words_per_class + rng.gen_range(0..self.cfg.shared_words))
            }
        }
    }

    fn form(&self, rng: &mut impl Rng) -> String {
        self.spec.surface_forms().choose(rng).unwrap().clone()
    }
}

/// Generates windows labeled with their true class, plus an embedding corpus
/// drawn from the same distribution.
pub fn generate(cfg: &SyntheticConfig) -> Result<SyntheticTask> {
    let k = cfg.class_weights.len();
    let spec = synthetic_spec(k);
    let mut cumulative = Vec::with_capacity(k);
    let mut acc = 0.0;
    for w in &cfg.class_weights {
        acc += w;
        cumulative.push(acc);
    }
    let sampler = Sampler {
        cfg,
        spec: &spec,
        cumulative,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut examples = Vec::with_capacity(cfg.windows);
    for i in 0..cfg.windows {
        let class = sampler.class(&mut rng);
        let (left, right) = if rng.gen::<f64>() < cfg.truncated_share {
            (
                rng.gen_range(0..=CONTEXT_RADIUS),
                rng.gen_range(0..=CONTEXT_RADIUS),
            )
        } else {
            (CONTEXT_RADIUS, CONTEXT_RADIUS)
        };
        let mut words: Vec<String> = (0..left)
            .map(|_| sampler.context_word(class, &mut rng))
            .collect();
        words.push(sampler.form(&mut rng));
        words.extend((0..right).map(|_| sampler.context_word(class, &mut rng)));
        let tokens = words
            .into_iter()
            .map(Token::new)
            .collect::<Result<Vec<_>>>()?;
        examples.push(LabeledExample {
            window: SentenceWindow::new(tokens, left, format!("synthetic:{}", i + 1))?,
            label: SenseLabel::Sense(class),
        });
    }

    let mut corpus = Vec::with_capacity(cfg.corpus_sentences);
    for _ in 0..cfg.corpus_sentences {
        let class = sampler.class(&mut rng);
        let len = rng.gen_range(8..=20);
        let homonym_at = rng.gen_range(0..len);
        corpus.push(
            (0..len)
                .map(|p| {
                    if p == homonym_at {
                        sampler.form(&mut rng)
                    } else {
                        sampler.context_word(class, &mut rng)
                    }
                })
                .collect(),
        );
    }
    Ok(SyntheticTask {
        spec,
        examples,
        corpus,
    })
}

/// Replaces the label of each example, with probability `rate`, by a
/// uniformly chosen different class.
pub fn corrupt_labels(
    examples: &mut [LabeledExample],
    rate: f64,
    num_classes: usize,
    seed: u64,
) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut flipped = 0;
    for ex in examples {
        if rng.gen::<f64>() < rate {
            if let SenseLabel::Sense(c) = ex.label {
                let other = rng.gen_range(0..num_classes - 1);
                ex.label = SenseLabel::Sense(if other >= c { other + 1 } else { other });
                flipped += 1;
            }
        }
    }
    flipped
}
