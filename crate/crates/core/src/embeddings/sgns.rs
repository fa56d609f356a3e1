//! The per-pair negative-sampling objective
//!
//! `L = -ln σ(u_ctx · v) - Σ_n ln σ(-u_n · v)`
//!
//! where `v` is the centre word's input vector and `u` are output vectors.

use super::matrix::Embeddings;
use crate::scalar::{axpy, dot, Scalar};

/// `ln(1 + e^x)` without overflow.
#[inline]
fn softplus<T: Scalar>(x: T) -> T {
    x.max(T::zero()) + (-x.abs()).exp().ln_1p()
}

/// Pair loss at the current parameters.
pub fn sgns_pair_loss<T: Scalar>(
    m: &Embeddings<T>,
    center: usize,
    context: usize,
    negatives: &[usize],
) -> T {
    let v = m.input_vector(center);
    let mut loss = softplus(-dot(m.output_vector(context), v));
    for &n in negatives {
        loss += softplus(dot(m.output_vector(n), v));
    }
    loss
}

/// Analytic gradients of [`sgns_pair_loss`].
#[derive(Clone, Debug, PartialEq)]
pub struct SgnsGradients<T> {
    pub center: Vec<T>,
    pub context: Vec<T>,
    pub negatives: Vec<Vec<T>>,
}

pub fn sgns_pair_gradients<T: Scalar>(
    m: &Embeddings<T>,
    center: usize,
    context: usize,
    negatives: &[usize],
) -> SgnsGradients<T> {
    let v = m.input_vector(center);
    let mut d_center = vec![T::zero(); m.dim()];
    let grad_for = |u: &[T], label: T, d_center: &mut Vec<T>| {
        // dL/ds = σ(s) - label
        let coeff = dot(u, v).sigmoid() - label;
        axpy(coeff, u, d_center);
        v.iter().map(|&x| coeff * x).collect::<Vec<T>>()
    };
    let context_grad = grad_for(m.output_vector(context), T::one(), &mut d_center);
    let negative_grads = negatives
        .iter()
        .map(|&n| grad_for(m.output_vector(n), T::zero(), &mut d_center))
        .collect();
    SgnsGradients {
        center: d_center,
        context: context_grad,
        negatives: negative_grads,
    }
}

/// One SGD step on a (centre, context) pair and its negatives. Output vectors
/// are updated in turn against the unchanged centre vector, whose
/// accumulated update is applied last. Returns the loss before the update.
pub fn sgns_pair_step<T: Scalar>(
    m: &mut Embeddings<T>,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: T,
) -> T {
    let mut scratch = vec![T::zero(); m.dim()];
    step_with_scratch(m, center, context, negatives, lr, &mut scratch)
}

pub(crate) fn step_with_scratch<T: Scalar>(
    m: &mut Embeddings<T>,
    center: usize,
    context: usize,
    negatives: &[usize],
    lr: T,
    center_delta: &mut [T],
) -> T {
    let dim = m.dim();
    center_delta.iter_mut().for_each(|x| *x = T::zero());
    let (input, output) = m.tables_mut();
    let v = &input[center * dim..(center + 1) * dim];
    let mut loss = T::zero();
    let targets =
        std::iter::once((context, T::one())).chain(negatives.iter().map(|&n| (n, T::zero())));
    for (target, label) in targets {
        let u = &mut output[target * dim..(target + 1) * dim];
        let score = dot(u, v);
        loss += if label > T::zero() {
            softplus(-score)
        } else {
            softplus(score)
        };
        let g = (label - score.sigmoid()) * lr;
        axpy(g, u, center_delta);
        axpy(g, v, u);
    }
    let v = &mut input[center * dim..(center + 1) * dim];
    axpy(T::one(), center_delta, v);
    loss
}
