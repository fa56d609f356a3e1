use super::cell::{accumulate_vec_mat, activate};
use super::model::{LstmLayer, LstmModel};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Per-step activations of one layer over a batch, time-major:
/// index `[t][b][j]`.
#[derive(Clone, Debug)]
pub(crate) struct LayerTrace<T> {
    /// Post-activation gates, `steps x batch x 4H`.
    pub gates: Vec<T>,
    pub c: Vec<T>,
    pub tanh_c: Vec<T>,
    /// Hidden outputs, `steps x batch x H`.
    pub h: Vec<T>,
}

/// Everything the backward pass needs.
#[derive(Clone, Debug)]
pub struct ForwardCache<T> {
    pub(crate) batch: usize,
    /// Time-major copy of the inputs, `steps x batch x input_dim`.
    pub(crate) x: Vec<T>,
    pub(crate) layer1: LayerTrace<T>,
    pub(crate) layer2: LayerTrace<T>,
    /// Softmax outputs, `batch x C`.
    pub(crate) probs: Vec<T>,
}

impl<T: Scalar> ForwardCache<T> {
    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn batch(&self) -> usize {
        self.batch
    }
}

fn layer_forward<T: Scalar>(
    layer: &LstmLayer<T>,
    x: &[T],
    steps: usize,
    batch: usize,
) -> LayerTrace<T> {
    let h = layer.hidden;
    let d = layer.input_dim;
    let g4 = 4 * h;
    let mut trace = LayerTrace {
        gates: vec![T::zero(); steps * batch * g4],
        c: vec![T::zero(); steps * batch * h],
        tanh_c: vec![T::zero(); steps * batch * h],
        h: vec![T::zero(); steps * batch * h],
    };
    let zeros = vec![T::zero(); h];
    for t in 0..steps {
        for b in 0..batch {
            let row = t * batch + b;
            let gates = &mut trace.gates[row * g4..(row + 1) * g4];
            gates.copy_from_slice(&layer.bias);
            accumulate_vec_mat(&x[row * d..(row + 1) * d], &layer.w_x, gates);
            if t > 0 {
                let prev = (t - 1) * batch + b;
                accumulate_vec_mat(&trace.h[prev * h..(prev + 1) * h], &layer.w_h, gates);
            }
            // rows of step t-1 precede rows of step t
            let (c_before, c_rest) = trace.c.split_at_mut(row * h);
            let c_prev = if t == 0 {
                zeros.as_slice()
            } else {
                let prev = (t - 1) * batch + b;
                &c_before[prev * h..(prev + 1) * h]
            };
            activate(
                gates,
                c_prev,
                &mut c_rest[..h],
                &mut trace.tanh_c[row * h..(row + 1) * h],
                &mut trace.h[row * h..(row + 1) * h],
            );
        }
    }
    trace
}

/// Numerically stable log-softmax.
pub fn log_softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let log_sum = logits.iter().map(|&z| (z - max).exp()).sum::<T>().ln();
    logits.iter().map(|&z| z - max - log_sum).collect()
}

/// Runs a batch of `seq_len x input_dim` inputs (row-major) through both
/// layers from zero initial states and returns class probabilities,
/// `batch x C`, along with the cache for [`super::loss_and_gradients`].
pub fn forward_batch<T: Scalar>(model: &LstmModel<T>, inputs: &[&[T]]) -> Result<ForwardCache<T>> {
    let arch = model.arch;
    let (steps, d, hid, classes) = (arch.seq_len, arch.input_dim, arch.hidden, arch.classes);
    let batch = inputs.len();
    let mut x = vec![T::zero(); steps * batch * d];
    for (b, input) in inputs.iter().enumerate() {
        if input.len() != steps * d {
            return Err(Error::Format(format!(
                "input has {} values, expected {steps} x {d}",
                input.len()
            )));
        }
        if input.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFiniteInput);
        }
        for t in 0..steps {
            let row = t * batch + b;
            x[row * d..(row + 1) * d].copy_from_slice(&input[t * d..(t + 1) * d]);
        }
    }
    let layer1 = layer_forward(&model.layer1, &x, steps, batch);
    let layer2 = layer_forward(&model.layer2, &layer1.h, steps, batch);

    let mut probs = vec![T::zero(); batch * classes];
    for b in 0..batch {
        let row = (steps - 1) * batch + b;
        let h_last = &layer2.h[row * hid..(row + 1) * hid];
        let mut logits = model.out_b.clone();
        accumulate_vec_mat(h_last, &model.out_w, &mut logits);
        for (p, lp) in probs[b * classes..(b + 1) * classes]
            .iter_mut()
            .zip(log_softmax(&logits))
        {
            *p = lp.exp();
        }
    }
    Ok(ForwardCache {
        batch,
        x,
        layer1,
        layer2,
        probs,
    })
}

/// Class probabilities for one `seq_len x input_dim` input.
pub fn forward<T: Scalar>(model: &LstmModel<T>, input: &[T]) -> Result<(Vec<T>, ForwardCache<T>)> {
    let cache = forward_batch(model, &[input])?;
    Ok((cache.probs.clone(), cache))
}
