use super::cell::accumulate_vec_mat;
use super::forward::{forward_batch, LayerTrace};
use super::model::{LstmLayer, LstmModel};
use crate::error::{Error, Result};
use crate::scalar::{axpy, dot, Scalar};

/// Backpropagates `dh_out` (gradient on each step's hidden output, time-major
/// `steps x batch x H`) through one layer. Accumulates parameter gradients into
/// `grad` and returns the gradient on the layer input when `want_dx` is set.
#[allow(clippy::too_many_arguments)]
fn layer_backward<T: Scalar>(
    layer: &LstmLayer<T>,
    grad: &mut LstmLayer<T>,
    x: &[T],
    trace: &LayerTrace<T>,
    dh_out: &[T],
    steps: usize,
    batch: usize,
    want_dx: bool,
) -> Vec<T> {
    let h = layer.hidden;
    let d = layer.input_dim;
    let g4 = 4 * h;
    let mut dx = if want_dx {
        vec![T::zero(); steps * batch * d]
    } else {
        Vec::new()
    };
    let mut dh_next = vec![T::zero(); batch * h];
    let mut dc_next = vec![T::zero(); batch * h];
    let mut dpre = vec![T::zero(); g4];
    let one = T::one();

    for t in (0..steps).rev() {
        for b in 0..batch {
            let row = t * batch + b;
            let gates = &trace.gates[row * g4..(row + 1) * g4];
            let tanh_c = &trace.tanh_c[row * h..(row + 1) * h];
            for j in 0..h {
                let (i, f, g, o) = (gates[j], gates[h + j], gates[2 * h + j], gates[3 * h + j]);
                let c_prev = if t == 0 {
                    T::zero()
                } else {
                    trace.c[((t - 1) * batch + b) * h + j]
                };
                let dh = dh_out[row * h + j] + dh_next[b * h + j];
                let tc = tanh_c[j];
                let dc = dc_next[b * h + j] + dh * o * (one - tc * tc);
                dpre[j] = dc * g * i * (one - i);
                dpre[h + j] = dc * c_prev * f * (one - f);
                dpre[2 * h + j] = dc * i * (one - g * g);
                dpre[3 * h + j] = dh * tc * o * (one - o);
                dc_next[b * h + j] = dc * f;
            }

            axpy(one, &dpre, &mut grad.bias);
            let x_row = &x[row * d..(row + 1) * d];
            for (r, &xr) in x_row.iter().enumerate() {
                if xr != T::zero() {
                    axpy(xr, &dpre, &mut grad.w_x[r * g4..(r + 1) * g4]);
                }
            }
            if want_dx {
                for r in 0..d {
                    dx[row * d + r] = dot(&layer.w_x[r * g4..(r + 1) * g4], &dpre);
                }
            }
            let dh_prev = &mut dh_next[b * h..(b + 1) * h];
            if t > 0 {
                let prev = (t - 1) * batch + b;
                let h_prev = &trace.h[prev * h..(prev + 1) * h];
                for r in 0..h {
                    axpy(h_prev[r], &dpre, &mut grad.w_h[r * g4..(r + 1) * g4]);
                    dh_prev[r] = dot(&layer.w_h[r * g4..(r + 1) * g4], &dpre);
                }
            } else {
                dh_prev.iter_mut().for_each(|v| *v = T::zero());
            }
        }
    }
    dx
}

/// Rescales `grad` so its global L2 norm is at most `max_norm`.
/// Returns the norm before clipping.
pub fn clip_global_norm<T: Scalar>(grad: &mut LstmModel<T>, max_norm: T) -> T {
    let norm = grad.global_norm();
    if norm > max_norm {
        grad.scale(max_norm / norm);
    }
    norm
}

/// Mean cross-entropy of a labeled batch and its gradient with respect to
/// every parameter, by backpropagation through time across both layers.
/// With `clip_norm`, the gradient is rescaled to that global norm if larger.
pub fn loss_and_gradients<T: Scalar>(
    model: &LstmModel<T>,
    batch: &[(&[T], usize)],
    clip_norm: Option<T>,
) -> Result<(T, LstmModel<T>)> {
    if batch.is_empty() {
        return Err(Error::Config("empty batch".into()));
    }
    let arch = model.arch;
    let (steps, hid, classes) = (arch.seq_len, arch.hidden, arch.classes);
    let n = batch.len();
    if let Some(&(_, label)) = batch.iter().find(|(_, l)| *l >= classes) {
        return Err(Error::Config(format!("label {label} outside 0..{classes}")));
    }
    let inputs: Vec<&[T]> = batch.iter().map(|(x, _)| *x).collect();
    let cache = forward_batch(model, &inputs)?;
    let scale = T::one() / T::from_usize(n).unwrap();

    let mut grad = model.zeros_like();
    let mut loss = T::zero();
    let mut dh2 = vec![T::zero(); steps * n * hid];
    for (b, &(_, label)) in batch.iter().enumerate() {
        let probs = &cache.probs[b * classes..(b + 1) * classes];
        // recompute log p from logits for accuracy at small probabilities
        let row = (steps - 1) * n + b;
        let h_last = &cache.layer2.h[row * hid..(row + 1) * hid];
        let mut logits = model.out_b.clone();
        accumulate_vec_mat(h_last, &model.out_w, &mut logits);
        loss -= super::forward::log_softmax(&logits)[label];

        let dlogits: Vec<T> = probs
            .iter()
            .enumerate()
            .map(|(c, &p)| (if c == label { p - T::one() } else { p }) * scale)
            .collect();
        axpy(T::one(), &dlogits, &mut grad.out_b);
        for r in 0..hid {
            axpy(
                h_last[r],
                &dlogits,
                &mut grad.out_w[r * classes..(r + 1) * classes],
            );
            dh2[row * hid + r] = dot(&model.out_w[r * classes..(r + 1) * classes], &dlogits);
        }
    }
    loss *= scale;
    if !loss.is_finite() {
        return Err(Error::NonFiniteLoss { epoch: 0, batch: 0 });
    }

    let dh1 = layer_backward(
        &model.layer2,
        &mut grad.layer2,
        &cache.layer1.h,
        &cache.layer2,
        &dh2,
        steps,
        n,
        true,
    );
    layer_backward(
        &model.layer1,
        &mut grad.layer1,
        &cache.x,
        &cache.layer1,
        &dh1,
        steps,
        n,
        false,
    );

    if let Some(max_norm) = clip_norm {
        clip_global_norm(&mut grad, max_norm);
    }
    Ok((loss, grad))
}
