use rand::Rng;

use super::vocab::Vocabulary;
use crate::error::{Error, Result};
use crate::scalar::{dot, Scalar};

/// Input (word) and output (context) vector tables, row-major `V x D`.
#[derive(Clone, Debug, PartialEq)]
pub struct Embeddings<T> {
    vocab: Vocabulary,
    dim: usize,
    input: Vec<T>,
    output: Vec<T>,
}

impl<T: Scalar> Embeddings<T> {
    pub fn from_tables(
        vocab: Vocabulary,
        dim: usize,
        input: Vec<T>,
        output: Vec<T>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Config("embedding dimension must be positive".into()));
        }
        let n = vocab.len() * dim;
        if input.len() != n || output.len() != n {
            return Err(Error::Format(format!(
                "tables must hold {} x {dim} values",
                vocab.len()
            )));
        }
        if input.iter().chain(&output).any(|x| !x.is_finite()) {
            return Err(Error::Format("non-finite embedding value".into()));
        }
        Ok(Embeddings {
            vocab,
            dim,
            input,
            output,
        })
    }

    pub fn zeros(vocab: Vocabulary, dim: usize) -> Self {
        let n = vocab.len() * dim;
        Embeddings {
            vocab,
            dim,
            input: vec![T::zero(); n],
            output: vec![T::zero(); n],
        }
    }

    /// Input vectors uniform in `[-0.5/D, 0.5/D)`, output vectors zero.
    pub fn initialize(vocab: Vocabulary, dim: usize, rng: &mut impl Rng) -> Self {
        let mut m = Self::zeros(vocab, dim);
        let scale = 1.0 / dim as f64;
        for x in &mut m.input {
            *x = T::lit((rng.gen::<f64>() - 0.5) * scale);
        }
        m
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn input_table(&self) -> &[T] {
        &self.input
    }

    pub fn output_table(&self) -> &[T] {
        &self.output
    }

    pub fn input_vector(&self, idx: usize) -> &[T] {
        &self.input[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn input_vector_mut(&mut self, idx: usize) -> &mut [T] {
        &mut self.input[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn output_vector(&self, idx: usize) -> &[T] {
        &self.output[idx * self.dim..(idx + 1) * self.dim]
    }

    pub fn output_vector_mut(&mut self, idx: usize) -> &mut [T] {
        &mut self.output[idx * self.dim..(idx + 1) * self.dim]
    }

    pub(crate) fn tables_mut(&mut self) -> (&mut [T], &mut [T]) {
        (&mut self.input, &mut self.output)
    }

    /// Input vector of `word`, if it is in the vocabulary.
    pub fn lookup(&self, word: &str) -> Option<&[T]> {
        self.vocab.get(word).map(|i| self.input_vector(i))
    }

    /// The `k` most cosine-similar words to `word`, excluding itself.
    /// Equal similarities keep vocabulary order.
    pub fn nearest_neighbors(&self, word: &str, k: usize) -> Result<Vec<(String, f64)>> {
        let query = self
            .vocab
            .get(word)
            .ok_or_else(|| Error::OutOfVocabulary(word.to_string()))?;
        let q = self.input_vector(query);
        let q_norm = dot(q, q).as_f64().sqrt();
        let mut scored: Vec<(usize, f64)> = (0..self.vocab.len())
            .filter(|&i| i != query)
            .map(|i| {
                let v = self.input_vector(i);
                let denom = q_norm * dot(v, v).as_f64().sqrt();
                let sim = if denom > 0.0 {
                    dot(q, v).as_f64() / denom
                } else {
                    0.0
                };
                (i, sim)
            })
            .collect();
        scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        scored.truncate(k);
        Ok(scored
            .into_iter()
            .map(|(i, s)| (self.vocab.word(i).to_string(), s))
            .collect())
    }

    pub fn cosine(&self, a: &str, b: &str) -> Result<f64> {
        let va = self
            .lookup(a)
            .ok_or_else(|| Error::OutOfVocabulary(a.to_string()))?;
        let vb = self
            .lookup(b)
            .ok_or_else(|| Error::OutOfVocabulary(b.to_string()))?;
        let denom = (dot(va, va).as_f64() * dot(vb, vb).as_f64()).sqrt();
        Ok(if denom > 0.0 {
            dot(va, vb).as_f64() / denom
        } else {
            0.0
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(n: usize) -> Vocabulary {
        let words = (0..n).map(|i| format!("w{i}")).collect();
        Vocabulary::from_parts(words, vec![10; n], 1)
    }

    #[test]
    fn self_is_never_a_neighbor() {
        let mut m: Embeddings<f32> = Embeddings::zeros(vocab(4), 2);
        for i in 0..4 {
            m.input_vector_mut(i).copy_from_slice(&[1.0, i as f32]);
        }
        let nn = m.nearest_neighbors("w2", 3).unwrap();
        assert_eq!(nn.len(), 3);
        assert!(nn.iter().all(|(w, _)| w != "w2"));
    }

    #[test]
    fn duplicate_vector_ranks_first() {
        let mut m: Embeddings<f32> = Embeddings::zeros(vocab(5), 3);
        let rows: [[f32; 3]; 5] = [
            [1.0, 0.0, 0.0],
            [0.3, 0.9, 0.1],
            [0.0, 0.0, 1.0],
            [0.2, 0.5, -0.4],
            [0.3, 0.9, 0.1],
        ];
        for (i, r) in rows.iter().enumerate() {
            m.input_vector_mut(i).copy_from_slice(r);
        }
        let nn = m.nearest_neighbors("w1", 1).unwrap();
        assert_eq!(nn[0].0, "w4");
        assert!((nn[0].1 - 1.0).abs() < 1e-6);
    }

    #[test]
    fn unknown_word_is_named() {
        let m: Embeddings<f32> = Embeddings::zeros(vocab(2), 2);
        let err = m.nearest_neighbors("nope", 1).unwrap_err();
        assert!(err.to_string().contains("nope"));
    }

    #[test]
    fn rejects_non_finite_tables() {
        let err = Embeddings::from_tables(vocab(1), 1, vec![f32::NAN], vec![0.0]);
        assert!(err.is_err());
    }
}
