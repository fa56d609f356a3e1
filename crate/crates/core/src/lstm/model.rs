use rand::Rng;

use crate::scalar::Scalar;

/// Gate order used for parameter blocks and serialization.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Gate {
    Input = 0,
    Forget = 1,
    Cell = 2,
    Output = 3,
}

impl Gate {
    pub const ALL: [Gate; 4] = [Gate::Input, Gate::Forget, Gate::Cell, Gate::Output];
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Architecture {
    pub input_dim: usize,
    pub hidden: usize,
    pub classes: usize,
    pub seq_len: usize,
}

impl Default for Architecture {
    /// 128-dimensional inputs, two layers of 64 units, 3 senses, 13 steps.
    fn default() -> Self {
        Architecture {
            input_dim: 128,
            hidden: 64,
            classes: 3,
            seq_len: 13,
        }
    }
}

impl Architecture {
    /// Trainable scalars: two gated layers plus the softmax head.
    pub fn parameter_count(&self) -> usize {
        let (d, h, c) = (self.input_dim, self.hidden, self.classes);
        4 * (d * h + h * h + h) + 4 * (h * h + h * h + h) + h * c + c
    }
}

/// One LSTM layer. The four gates are fused column-wise:
/// `w_x` is `input_dim x 4H`, `w_h` is `H x 4H`, `bias` is `4H`, with gate `g`
/// occupying columns `g*H .. (g+1)*H`.
#[derive(Clone, Debug, PartialEq)]
pub struct LstmLayer<T> {
    pub input_dim: usize,
    pub hidden: usize,
    pub w_x: Vec<T>,
    pub w_h: Vec<T>,
    pub bias: Vec<T>,
}

impl<T: Scalar> LstmLayer<T> {
    pub fn zeros(input_dim: usize, hidden: usize) -> Self {
        LstmLayer {
            input_dim,
            hidden,
            w_x: vec![T::zero(); input_dim * 4 * hidden],
            w_h: vec![T::zero(); hidden * 4 * hidden],
            bias: vec![T::zero(); 4 * hidden],
        }
    }

    /// Glorot-uniform kernels over the fused shapes, forget bias 1, other biases 0.
    pub fn glorot(input_dim: usize, hidden: usize, rng: &mut impl Rng) -> Self {
        let mut layer = Self::zeros(input_dim, hidden);
        let gh = 4 * hidden;
        fill_uniform(&mut layer.w_x, glorot_limit(input_dim, gh), rng);
        fill_uniform(&mut layer.w_h, glorot_limit(hidden, gh), rng);
        for b in &mut layer.bias[hidden..2 * hidden] {
            *b = T::one();
        }
        layer
    }

    /// `W_x` of one gate, `input_dim x H` row-major.
    pub fn gate_input_weights(&self, gate: Gate) -> Vec<T> {
        gate_block(&self.w_x, self.input_dim, self.hidden, gate)
    }

    /// `W_h` of one gate, `H x H` row-major.
    pub fn gate_recurrent_weights(&self, gate: Gate) -> Vec<T> {
        gate_block(&self.w_h, self.hidden, self.hidden, gate)
    }

    pub fn gate_bias(&self, gate: Gate) -> &[T] {
        let h = self.hidden;
        &self.bias[gate as usize * h..(gate as usize + 1) * h]
    }

    pub(crate) fn set_gate_block(&mut self, which: GateTensor, gate: Gate, values: &[T]) {
        let h = self.hidden;
        let (table, rows) = match which {
            GateTensor::Input => (&mut self.w_x, self.input_dim),
            GateTensor::Recurrent => (&mut self.w_h, self.hidden),
            GateTensor::Bias => (&mut self.bias, 1),
        };
        for r in 0..rows {
            let dst = r * 4 * h + gate as usize * h;
            table[dst..dst + h].copy_from_slice(&values[r * h..(r + 1) * h]);
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum GateTensor {
    Input,
    Recurrent,
    Bias,
}

fn gate_block<T: Scalar>(fused: &[T], rows: usize, h: usize, gate: Gate) -> Vec<T> {
    let mut out = Vec::with_capacity(rows * h);
    for r in 0..rows {
        let start = r * 4 * h + gate as usize * h;
        out.extend_from_slice(&fused[start..start + h]);
    }
    out
}

fn glorot_limit(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

fn fill_uniform<T: Scalar>(values: &mut [T], limit: f64, rng: &mut impl Rng) {
    for v in values {
        *v = T::lit(rng.gen_range(-limit..limit));
    }
}

/// All trainable parameters. The same type also holds gradients and
/// optimizer moments, which share its layout.
#[derive(Clone, Debug, PartialEq)]
pub struct LstmModel<T> {
    pub arch: Architecture,
    pub layer1: LstmLayer<T>,
    pub layer2: LstmLayer<T>,
    /// `H x C` row-major.
    pub out_w: Vec<T>,
    pub out_b: Vec<T>,
}

impl<T: Scalar> LstmModel<T> {
    pub fn zeros(arch: Architecture) -> Self {
        LstmModel {
            arch,
            layer1: LstmLayer::zeros(arch.input_dim, arch.hidden),
            layer2: LstmLayer::zeros(arch.hidden, arch.hidden),
            out_w: vec![T::zero(); arch.hidden * arch.classes],
            out_b: vec![T::zero(); arch.classes],
        }
    }

    pub fn glorot(arch: Architecture, rng: &mut impl Rng) -> Self {
        let layer1 = LstmLayer::glorot(arch.input_dim, arch.hidden, rng);
        let layer2 = LstmLayer::glorot(arch.hidden, arch.hidden, rng);
        let mut out_w = vec![T::zero(); arch.hidden * arch.classes];
        fill_uniform(&mut out_w, glorot_limit(arch.hidden, arch.classes), rng);
        LstmModel {
            arch,
            layer1,
            layer2,
            out_w,
            out_b: vec![T::zero(); arch.classes],
        }
    }

    pub fn zeros_like(&self) -> Self {
        Self::zeros(self.arch)
    }

    pub fn tensors(&self) -> [&[T]; 8] {
        [
            &self.layer1.w_x,
            &self.layer1.w_h,
            &self.layer1.bias,
            &self.layer2.w_x,
            &self.layer2.w_h,
            &self.layer2.bias,
            &self.out_w,
            &self.out_b,
        ]
    }

    pub fn tensors_mut(&mut self) -> [&mut [T]; 8] {
        [
            &mut self.layer1.w_x,
            &mut self.layer1.w_h,
            &mut self.layer1.bias,
            &mut self.layer2.w_x,
            &mut self.layer2.w_h,
            &mut self.layer2.bias,
            &mut self.out_w,
            &mut self.out_b,
        ]
    }

    /// Exact number of trainable scalars.
    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    pub fn global_norm(&self) -> T {
        self.tensors()
            .iter()
            .flat_map(|t| t.iter())
            .map(|&x| x * x)
            .sum::<T>()
            .sqrt()
    }

    pub fn scale(&mut self, factor: T) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|x| *x *= factor);
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors()
            .iter()
            .all(|t| t.iter().all(|x| x.is_finite()))
    }

    /// Converts every parameter to another precision.
    pub fn cast<U: Scalar>(&self) -> LstmModel<U> {
        let conv = |v: &[T]| v.iter().map(|&x| U::lit(x.as_f64())).collect::<Vec<U>>();
        let layer = |l: &LstmLayer<T>| LstmLayer {
            input_dim: l.input_dim,
            hidden: l.hidden,
            w_x: conv(&l.w_x),
            w_h: conv(&l.w_h),
            bias: conv(&l.bias),
        };
        LstmModel {
            arch: self.arch,
            layer1: layer(&self.layer1),
            layer2: layer(&self.layer2),
            out_w: conv(&self.out_w),
            out_b: conv(&self.out_b),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_parameter_count() {
        let arch = Architecture::default();
        assert_eq!(arch.parameter_count(), 82_627);
        assert_eq!(LstmModel::<f32>::zeros(arch).parameter_count(), 82_627);
    }

    #[test]
    fn toy_parameter_count() {
        let arch = Architecture {
            input_dim: 1,
            hidden: 1,
            classes: 1,
            seq_len: 1,
        };
        assert_eq!(LstmModel::<f32>::zeros(arch).parameter_count(), 26);
    }

    #[test]
    fn one_more_class_adds_sixty_five() {
        let a = Architecture::default();
        let b = Architecture { classes: 4, ..a };
        assert_eq!(b.parameter_count() - a.parameter_count(), 65);
    }

    #[test]
    fn glorot_sets_forget_bias() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = LstmModel::<f32>::glorot(Architecture::default(), &mut rng);
        assert!(m.layer1.gate_bias(Gate::Forget).iter().all(|&b| b == 1.0));
        assert!(m.layer2.gate_bias(Gate::Input).iter().all(|&b| b == 0.0));
        let limit = (6.0f32 / (128.0 + 256.0)).sqrt();
        assert!(m.layer1.w_x.iter().all(|w| w.abs() <= limit));
        assert!(m.out_b.iter().all(|&b| b == 0.0));
    }

    #[test]
    fn gate_blocks_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let l = LstmLayer::<f64>::glorot(3, 2, &mut rng);
        let mut rebuilt = LstmLayer::<f64>::zeros(3, 2);
        for g in Gate::ALL {
            rebuilt.set_gate_block(GateTensor::Input, g, &l.gate_input_weights(g));
            rebuilt.set_gate_block(GateTensor::Recurrent, g, &l.gate_recurrent_weights(g));
            rebuilt.set_gate_block(GateTensor::Bias, g, l.gate_bias(g));
        }
        assert_eq!(rebuilt, l);
    }
}
