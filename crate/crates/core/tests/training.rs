mod common;

use common::*;
use rand::seq::SliceRandom;
use rand::Rng;
use wsd_core::corpus::LabeledExample;
use wsd_core::embeddings::{
    load_embeddings, read_embeddings, save_embeddings, train_embeddings, train_embeddings_on,
    write_embeddings, EmbeddingConfig, Embeddings,
};
use wsd_core::lstm::{
    dataset_loss, embed_examples, read_model, train, write_model, ClassifierTrainConfig,
    OptimizerKind,
};

const CUES: [[&str; 3]; 3] = [
    ["ნიჩაბი", "თხრა", "მიწა"],
    ["დაბლობი", "მინდორი", "ველი"],
    ["კაფე", "ყავა", "ღვინო"],
];
const FILLER: [&str; 6] = ["და", "ის", "ერთი", "დიდი", "ახალი", "იქ"];

/// Windows whose class is given away by a cue word.
fn separable(n: usize, seed: u64) -> Vec<LabeledExample> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| {
            let class = r.gen_range(0..3);
            let left = r.gen_range(0..=3);
            let mut tokens: Vec<&str> =
                (0..left).map(|_| *FILLER.choose(&mut r).unwrap()).collect();
            tokens.push("ბარი");
            tokens.push(CUES[class].choose(&mut r).unwrap());
            tokens.push(FILLER.choose(&mut r).unwrap());
            example(&tokens, left, Some(class))
        })
        .collect()
}

/// Random 8-d vectors for every cue and filler word.
fn small_vectors() -> Embeddings<f32> {
    let words: Vec<&str> = CUES
        .iter()
        .flatten()
        .chain(FILLER.iter())
        .chain(["ბარი"].iter())
        .copied()
        .collect();
    let m = random_embeddings(&words, 8, &mut rng(77));
    let input = m.input_table().iter().map(|&v| v as f32 * 4.0).collect();
    Embeddings::from_tables(m.vocab().clone(), 8, input, vec![0.0; words.len() * 8]).unwrap()
}

fn small_config() -> ClassifierTrainConfig {
    ClassifierTrainConfig {
        hidden: 8,
        max_epochs: 30,
        batch_size: 16,
        learning_rate: 1e-2,
        seed: 3,
        ..ClassifierTrainConfig::default()
    }
}

#[test]
fn separable_task_reaches_perfect_validation_accuracy() {
    let (tr, val) = (separable(400, 1), separable(100, 2));
    let m = small_vectors();
    let (_, history) = train(&tr, &val, &m, 3, &small_config()).unwrap();
    assert_eq!(history.best().unwrap().validation_accuracy, 1.0);
}

#[test]
fn returned_model_is_the_best_epoch() {
    let (tr, val) = (separable(200, 3), separable(60, 4));
    let m = small_vectors();
    let cfg = ClassifierTrainConfig {
        learning_rate: 5e-2,
        patience: 2,
        ..small_config()
    };
    let (model, history) = train(&tr, &val, &m, 3, &cfg).unwrap();
    let (x, y) = embed_examples(&val, &m, model.arch.seq_len);
    let (loss, acc) = dataset_loss(&model, &x, &y).unwrap();
    let best = history.best().unwrap();
    assert_eq!(loss, best.validation_loss);
    assert_eq!(acc, best.validation_accuracy);
    let min = history
        .epochs
        .iter()
        .map(|e| e.validation_loss)
        .fold(f64::INFINITY, f64::min);
    assert_eq!(best.validation_loss, min);
}

#[test]
fn stops_after_patience_epochs_without_improvement() {
    let (tr, val) = (separable(200, 5), separable(60, 6));
    let m = small_vectors();
    for patience in [1, 3] {
        let cfg = ClassifierTrainConfig {
            learning_rate: 0.2,
            optimizer: OptimizerKind::Sgd,
            patience,
            max_epochs: 39,
            ..small_config()
        };
        let (_, h) = train(&tr, &val, &m, 3, &cfg).unwrap();
        let n = h.epochs.len();
        if h.stopped_early {
            assert_eq!(n, h.best_epoch + patience + 1);
        } else {
            assert_eq!(n, 39);
        }
        // no epoch after the best one improved on it within the patience window
        for e in &h.epochs[h.best_epoch + 1..] {
            assert!(e.validation_loss >= h.epochs[h.best_epoch].validation_loss);
        }
    }
}

#[test]
fn without_early_stopping_all_epochs_run_and_final_weights_return() {
    let (tr, val) = (separable(120, 7), separable(40, 8));
    let m = small_vectors();
    let cfg = ClassifierTrainConfig {
        max_epochs: 6,
        early_stopping: false,
        ..small_config()
    };
    let (model, h) = train(&tr, &val, &m, 3, &cfg).unwrap();
    assert_eq!(h.epochs.len(), 6);
    let (x, y) = embed_examples(&val, &m, model.arch.seq_len);
    assert_eq!(
        dataset_loss(&model, &x, &y).unwrap().0,
        h.epochs[5].validation_loss
    );
}

#[test]
fn classifier_training_is_deterministic() {
    let (tr, val) = (separable(150, 9), separable(50, 10));
    let m = small_vectors();
    let cfg = ClassifierTrainConfig {
        max_epochs: 5,
        ..small_config()
    };
    let (a, ha) = train(&tr, &val, &m, 3, &cfg).unwrap();
    let (b, hb) = train(&tr, &val, &m, 3, &cfg).unwrap();
    assert_eq!(write_model(&a), write_model(&b));
    assert_eq!(ha, hb);
    let (c, _) = train(&tr, &val, &m, 3, &ClassifierTrainConfig { seed: 4, ..cfg }).unwrap();
    assert_ne!(write_model(&a), write_model(&c));
    assert_eq!(read_model(&write_model(&a)).unwrap(), a);
}

#[test]
fn labels_outside_the_class_range_are_rejected() {
    let m = small_vectors();
    let tr = separable(20, 1);
    assert!(train(&tr, &tr, &m, 2, &small_config()).is_err());
}

/// Two topics that never share a sentence.
fn topic_corpus(n: usize, seed: u64) -> Vec<Vec<String>> {
    let mut r = rng(seed);
    let topics = [["ა", "ბ", "გ", "დ"], ["ე", "ვ", "ზ", "თ"]];
    (0..n)
        .map(|_| {
            let t = &topics[r.gen_range(0..2)];
            (0..8)
                .map(|_| t.choose(&mut r).unwrap().to_string())
                .collect()
        })
        .collect()
}

fn topic_config() -> EmbeddingConfig {
    EmbeddingConfig {
        dimension: 16,
        window: 3,
        min_count: 1,
        table_size: 10_000,
        ..EmbeddingConfig::default()
    }
}

#[test]
fn co_occurring_words_end_up_closer() {
    let (m, stats) = train_embeddings_on::<f64, _>(&topic_corpus(400, 1), &topic_config()).unwrap();
    assert!(m.cosine("ა", "ბ").unwrap() > m.cosine("ა", "ე").unwrap());
    assert!(m.cosine("ზ", "თ").unwrap() > m.cosine("ზ", "გ").unwrap());
    assert_eq!(stats.epoch_loss.len(), 20);
    assert!(stats.epoch_loss[19] < stats.epoch_loss[0]);
}

#[test]
fn embedding_training_is_bitwise_deterministic() {
    let corpus = topic_corpus(200, 2);
    let cfg = topic_config();
    let (a, sa) = train_embeddings_on::<f32, _>(&corpus, &cfg).unwrap();
    let (b, sb) = train_embeddings_on::<f32, _>(&corpus, &cfg).unwrap();
    assert_eq!(sa, sb);
    let (mut ba, mut bb) = (Vec::new(), Vec::new());
    write_embeddings(&mut ba, &a, true).unwrap();
    write_embeddings(&mut bb, &b, true).unwrap();
    assert_eq!(ba, bb);
    let (c, _) =
        train_embeddings_on::<f32, _>(&corpus, &EmbeddingConfig { seed: 43, ..cfg }).unwrap();
    assert_ne!(a.input_table(), c.input_table());
}

#[test]
fn embedding_files_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let corpus_path = dir.path().join("corpus.txt");
    let text: String = topic_corpus(100, 3)
        .iter()
        .map(|s| s.join(" ") + "\n")
        .collect();
    std::fs::write(&corpus_path, text).unwrap();
    let cfg = EmbeddingConfig {
        epochs: 2,
        ..topic_config()
    };
    let m = train_embeddings(&corpus_path, &cfg).unwrap();
    let path = dir.path().join("e.bin");
    save_embeddings(&m, &path, true).unwrap();
    let back = load_embeddings(&path).unwrap();
    assert_eq!(back.vocab(), m.vocab());
    assert_eq!(back.input_table(), m.input_table());
    assert_eq!(back.output_table(), m.output_table());

    let mut lean = Vec::new();
    write_embeddings(&mut lean, &m, false).unwrap();
    let lean = read_embeddings(&lean).unwrap();
    assert_eq!(lean.input_table(), m.input_table());
}

#[test]
fn zero_epochs_saves_the_initialization() {
    let cfg = EmbeddingConfig {
        epochs: 0,
        ..topic_config()
    };
    let (m, stats) = train_embeddings_on::<f32, _>(&topic_corpus(50, 4), &cfg).unwrap();
    assert!(stats.epoch_loss.is_empty());
    let bound = 0.5 / 16.0;
    assert!(m.input_table().iter().all(|v| v.abs() <= bound));
    assert!(m.output_table().iter().all(|&v| v == 0.0));
}

#[test]
fn neighbors_match_brute_force() {
    let words: Vec<String> = (0..40).map(wsd_core::synthetic::pseudo_word).collect();
    let refs: Vec<&str> = words.iter().map(String::as_str).collect();
    let m = random_embeddings(&refs, 6, &mut rng(8));
    for query in &refs[..5] {
        let got = m.nearest_neighbors(query, 7).unwrap();
        let q = m.lookup(query).unwrap();
        let mut brute: Vec<(String, f64)> = refs
            .iter()
            .filter(|w| *w != query)
            .map(|w| {
                let v = m.lookup(w).unwrap();
                let dotp: f64 = q.iter().zip(v).map(|(a, b)| a * b).sum();
                let nq: f64 = q.iter().map(|a| a * a).sum::<f64>().sqrt();
                let nv: f64 = v.iter().map(|a| a * a).sum::<f64>().sqrt();
                (w.to_string(), dotp / (nq * nv))
            })
            .collect();
        brute.sort_by(|a, b| b.1.total_cmp(&a.1));
        brute.truncate(7);
        for ((gw, gs), (bw, bs)) in got.iter().zip(&brute) {
            assert_eq!(gw, bw);
            assert!((gs - bs).abs() < 1e-12);
        }
    }
    assert!(m.nearest_neighbors("უცნობი", 3).is_err());
}
