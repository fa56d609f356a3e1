use crate::corpus::SentenceWindow;
use crate::embeddings::Embeddings;
use crate::scalar::Scalar;

/// Stacks the input vectors of a window into a `seq_len x D` matrix.
///
/// Out-of-vocabulary tokens get a zero row. Short windows are left-padded
/// with zero rows so the last token lands on the final step; a window longer
/// than `seq_len` keeps only its last `seq_len` tokens.
pub fn embed_window<T: Scalar>(
    window: &SentenceWindow,
    matrix: &Embeddings<T>,
    seq_len: usize,
) -> Vec<T> {
    let d = matrix.dim();
    let mut out = vec![T::zero(); seq_len * d];
    let tokens = window.tokens();
    let used = tokens.len().min(seq_len);
    let offset = seq_len - used;
    for (k, tok) in tokens[tokens.len() - used..].iter().enumerate() {
        if let Some(v) = matrix.lookup(tok.as_str()) {
            let row = offset + k;
            out[row * d..(row + 1) * d].copy_from_slice(v);
        }
    }
    out
}
