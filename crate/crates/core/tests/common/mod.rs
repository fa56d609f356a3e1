#![allow(dead_code, clippy::needless_range_loop)]

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use wsd_core::corpus::{HomonymSpec, LabeledExample, SenseLabel, SentenceWindow, Token};
use wsd_core::embeddings::{sgns_pair_gradients, sgns_pair_loss, Embeddings, Vocabulary};
use wsd_core::lstm::{loss_and_gradients, Architecture, LstmModel};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn bari_spec() -> HomonymSpec {
    HomonymSpec::parse(
        "lemma ბარი\nform ბარი\nform ბარში\nform ბარს\nform ბარის\n\
         sense 0 shovel ნიჩაბი\nsense 1 lowland დაბლობი\nsense 2 cafe კაფე\n",
    )
    .unwrap()
}

/// Every parameter drawn from U(-scale, scale).
pub fn random_model(arch: Architecture, scale: f64, rng: &mut impl Rng) -> LstmModel<f64> {
    let mut m = LstmModel::<f64>::zeros(arch);
    for t in m.tensors_mut() {
        for v in t.iter_mut() {
            *v = rng.gen_range(-scale..scale);
        }
    }
    m
}

pub fn random_input(arch: Architecture, rng: &mut impl Rng) -> Vec<f64> {
    (0..arch.seq_len * arch.input_dim)
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Straightforward re-implementation of the two-layer forward pass, one
/// scalar at a time. Returns class probabilities.
pub fn naive_forward(m: &LstmModel<f64>, x: &[f64]) -> Vec<f64> {
    let a = m.arch;
    let h = a.hidden;
    let mut seq: Vec<Vec<f64>> = (0..a.seq_len)
        .map(|t| x[t * a.input_dim..(t + 1) * a.input_dim].to_vec())
        .collect();
    for layer in [&m.layer1, &m.layer2] {
        let d = layer.input_dim;
        let mut hs = vec![0.0; h];
        let mut cs = vec![0.0; h];
        let mut out = Vec::new();
        for xt in &seq {
            let mut z = [vec![0.0; h], vec![0.0; h], vec![0.0; h], vec![0.0; h]];
            for (k, zk) in z.iter_mut().enumerate() {
                for j in 0..h {
                    let col = k * h + j;
                    let mut s = layer.bias[col];
                    for i in 0..d {
                        s += xt[i] * layer.w_x[i * 4 * h + col];
                    }
                    for r in 0..h {
                        s += hs[r] * layer.w_h[r * 4 * h + col];
                    }
                    zk[j] = s;
                }
            }
            for j in 0..h {
                let i = sigmoid(z[0][j]);
                let f = sigmoid(z[1][j]);
                let g = z[2][j].tanh();
                let o = sigmoid(z[3][j]);
                cs[j] = f * cs[j] + i * g;
                hs[j] = o * cs[j].tanh();
            }
            out.push(hs.clone());
        }
        seq = out;
    }
    let last = seq.last().unwrap();
    let logits: Vec<f64> = (0..a.classes)
        .map(|c| {
            m.out_b[c]
                + (0..h)
                    .map(|r| last[r] * m.out_w[r * a.classes + c])
                    .sum::<f64>()
        })
        .collect();
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = logits.iter().map(|l| (l - max).exp()).collect();
    let z: f64 = exps.iter().sum();
    exps.iter().map(|e| e / z).collect()
}

pub fn naive_loss(m: &LstmModel<f64>, batch: &[(Vec<f64>, usize)]) -> f64 {
    batch
        .iter()
        .map(|(x, y)| -naive_forward(m, x)[*y].ln())
        .sum::<f64>()
        / batch.len() as f64
}

/// Vocabulary with the given words, all with count 1 and in the given order.
pub fn vocab_of(words: &[&str]) -> Vocabulary {
    let n = words.len() as u64;
    let counts: HashMap<String, u64> = words
        .iter()
        .enumerate()
        .map(|(i, w)| (w.to_string(), n - i as u64))
        .collect();
    Vocabulary::from_counts(counts, 1).unwrap()
}

pub fn random_embeddings(words: &[&str], dim: usize, rng: &mut impl Rng) -> Embeddings<f64> {
    let n = words.len();
    let input = (0..n * dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
    let output = (0..n * dim).map(|_| rng.gen_range(-0.5..0.5)).collect();
    Embeddings::from_tables(vocab_of(words), dim, input, output).unwrap()
}

pub fn example(tokens: &[&str], target: usize, label: Option<usize>) -> LabeledExample {
    let tokens = tokens.iter().map(|t| Token::new(*t).unwrap()).collect();
    LabeledExample {
        window: SentenceWindow::new(tokens, target, "fixture").unwrap(),
        label: label.map_or(SenseLabel::Other, SenseLabel::Sense),
    }
}

/// `counts[c]` examples of class `c`, each a one-token window.
pub fn class_examples(counts: &[usize]) -> Vec<LabeledExample> {
    let mut out = Vec::new();
    for (c, &n) in counts.iter().enumerate() {
        for _ in 0..n {
            out.push(example(&["ბარი"], 0, Some(c)));
        }
    }
    out
}

pub fn class_counts(examples: &[LabeledExample], k: usize) -> Vec<usize> {
    let mut counts = vec![0; k];
    for e in examples {
        counts[e.class()] += 1;
    }
    counts
}

pub const SMALL: Architecture = Architecture {
    input_dim: 4,
    hidden: 3,
    classes: 3,
    seq_len: 3,
};

pub fn rel_err(a: f64, b: f64) -> f64 {
    let denom = a.abs().max(b.abs());
    if denom == 0.0 {
        0.0
    } else {
        (a - b).abs() / denom
    }
}

/// Fourth-order central difference of `f` at step `eps`.
pub fn central_difference(eps: f64, f: impl Fn(f64) -> f64) -> f64 {
    (f(-2.0 * eps) - 8.0 * f(-eps) + 8.0 * f(eps) - f(2.0 * eps)) / (12.0 * eps)
}

/// Largest relative error between the BPTT gradient and central differences
/// (step 1e-3) of the naive loss, over every parameter of a random
/// two-example instance.
pub fn bptt_check(seed: u64) -> f64 {
    let mut r = rng(seed);
    let model = random_model(SMALL, 0.8, &mut r);
    let batch: Vec<(Vec<f64>, usize)> = (0..2)
        .map(|_| (random_input(SMALL, &mut r), r.gen_range(0..3)))
        .collect();
    let refs: Vec<(&[f64], usize)> = batch.iter().map(|(x, y)| (x.as_slice(), *y)).collect();
    let (_, grad) = loss_and_gradients(&model, &refs, None).unwrap();
    let mut worst = 0.0f64;
    for (ti, g) in grad.tensors().iter().enumerate() {
        for k in 0..g.len() {
            let numeric = central_difference(1e-3, |d| {
                let mut m = model.clone();
                m.tensors_mut()[ti][k] += d;
                naive_loss(&m, &batch)
            });
            worst = worst.max(rel_err(g[k], numeric));
        }
    }
    worst
}

/// Largest relative error of the SGNS pair gradients against central
/// differences (step 1e-4) on random 8-d vectors with five negatives.
pub fn sgns_check(seed: u64) -> f64 {
    let words = ["ა", "ბ", "გ", "დ", "ე", "ვ", "ზ"];
    let mut r = rng(seed);
    let m = random_embeddings(&words, 8, &mut r);
    let (center, context) = (0, 1);
    let negatives = [2, 3, 4, 5, 6];
    let grads = sgns_pair_gradients(&m, center, context, &negatives);
    let numeric = |row: usize, k: usize, input: bool| {
        central_difference(1e-4, |d| {
            let mut p = m.clone();
            if input {
                p.input_vector_mut(row)[k] += d;
            } else {
                p.output_vector_mut(row)[k] += d;
            }
            sgns_pair_loss(&p, center, context, &negatives)
        })
    };
    let mut worst = 0.0f64;
    for k in 0..8 {
        worst = worst.max(rel_err(grads.center[k], numeric(center, k, true)));
        worst = worst.max(rel_err(grads.context[k], numeric(context, k, false)));
        for (n, g) in negatives.iter().zip(&grads.negatives) {
            worst = worst.max(rel_err(g[k], numeric(*n, k, false)));
        }
    }
    worst
}
