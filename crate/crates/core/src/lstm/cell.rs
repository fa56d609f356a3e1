use super::model::LstmLayer;
use crate::scalar::{axpy, Scalar};

/// Gate activations and `tanh(c)` of one step, kept for backpropagation.
#[derive(Clone, Debug, PartialEq)]
pub struct CellCache<T> {
    pub input: Vec<T>,
    pub forget: Vec<T>,
    pub candidate: Vec<T>,
    pub output: Vec<T>,
    pub tanh_c: Vec<T>,
}

/// Turns fused pre-activations (`[i f g o]`, each `H` wide) into gate values in
/// place and advances the state: `c = f*c_prev + i*g`, `h = o*tanh(c)`.
#[inline]
pub(crate) fn activate<T: Scalar>(
    gates: &mut [T],
    c_prev: &[T],
    c: &mut [T],
    tanh_c: &mut [T],
    h: &mut [T],
) {
    let hidden = c.len();
    let (ifg, o) = gates.split_at_mut(3 * hidden);
    let (i, fg) = ifg.split_at_mut(hidden);
    let (f, g) = fg.split_at_mut(hidden);
    for j in 0..hidden {
        i[j] = i[j].sigmoid();
        f[j] = f[j].sigmoid();
        g[j] = g[j].tanh();
        o[j] = o[j].sigmoid();
        c[j] = f[j] * c_prev[j] + i[j] * g[j];
        tanh_c[j] = c[j].tanh();
        h[j] = o[j] * tanh_c[j];
    }
}

/// `out += x · W` for a row-major `W` with `x.len()` rows.
#[inline]
pub(crate) fn accumulate_vec_mat<T: Scalar>(x: &[T], w: &[T], out: &mut [T]) {
    let cols = out.len();
    for (r, &xr) in x.iter().enumerate() {
        if xr != T::zero() {
            axpy(xr, &w[r * cols..(r + 1) * cols], out);
        }
    }
}

/// A single LSTM step for one example.
pub fn lstm_cell_forward<T: Scalar>(
    x: &[T],
    h_prev: &[T],
    c_prev: &[T],
    layer: &LstmLayer<T>,
) -> (Vec<T>, Vec<T>, CellCache<T>) {
    let h = layer.hidden;
    assert_eq!(x.len(), layer.input_dim, "input width");
    assert_eq!(h_prev.len(), h, "hidden width");
    assert_eq!(c_prev.len(), h, "cell width");
    let mut gates = layer.bias.clone();
    accumulate_vec_mat(x, &layer.w_x, &mut gates);
    accumulate_vec_mat(h_prev, &layer.w_h, &mut gates);
    let mut c = vec![T::zero(); h];
    let mut tanh_c = vec![T::zero(); h];
    let mut h_out = vec![T::zero(); h];
    activate(&mut gates, c_prev, &mut c, &mut tanh_c, &mut h_out);
    let cache = CellCache {
        input: gates[..h].to_vec(),
        forget: gates[h..2 * h].to_vec(),
        candidate: gates[2 * h..3 * h].to_vec(),
        output: gates[3 * h..].to_vec(),
        tanh_c,
    };
    (h_out, c, cache)
}
