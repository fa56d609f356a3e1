use super::model::LstmModel;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum OptimizerKind {
    Adam {
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    },
    Sgd,
}

impl Default for OptimizerKind {
    fn default() -> Self {
        OptimizerKind::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Optimizer state; moments share the model's tensor layout.
#[derive(Clone, Debug)]
pub struct Optimizer<T> {
    kind: OptimizerKind,
    lr: f64,
    step: i32,
    first: Option<LstmModel<T>>,
    second: Option<LstmModel<T>>,
}

impl<T: Scalar> Optimizer<T> {
    pub fn new(kind: OptimizerKind, lr: f64, model: &LstmModel<T>) -> Self {
        let moments = matches!(kind, OptimizerKind::Adam { .. });
        Optimizer {
            kind,
            lr,
            step: 0,
            first: moments.then(|| model.zeros_like()),
            second: moments.then(|| model.zeros_like()),
        }
    }

    pub fn step(&mut self, model: &mut LstmModel<T>, grad: &LstmModel<T>) {
        self.step += 1;
        match self.kind {
            OptimizerKind::Sgd => {
                let lr = T::lit(self.lr);
                for (p, g) in model.tensors_mut().into_iter().zip(grad.tensors()) {
                    for (pi, gi) in p.iter_mut().zip(g) {
                        *pi -= lr * *gi;
                    }
                }
            }
            OptimizerKind::Adam {
                beta1,
                beta2,
                epsilon,
            } => {
                let (b1, b2, eps) = (T::lit(beta1), T::lit(beta2), T::lit(epsilon));
                let one = T::one();
                let c1 = one - T::lit(beta1.powi(self.step));
                let c2 = one - T::lit(beta2.powi(self.step));
                let lr = T::lit(self.lr);
                let first = self.first.as_mut().expect("adam moments");
                let second = self.second.as_mut().expect("adam moments");
                let params = model.tensors_mut();
                let (ms, vs) = (first.tensors_mut(), second.tensors_mut());
                for (((p, g), m), v) in params.into_iter().zip(grad.tensors()).zip(ms).zip(vs) {
                    for k in 0..p.len() {
                        m[k] = b1 * m[k] + (one - b1) * g[k];
                        v[k] = b2 * v[k] + (one - b2) * g[k] * g[k];
                        let m_hat = m[k] / c1;
                        let v_hat = v[k] / c2;
                        p[k] -= lr * m_hat / (v_hat.sqrt() + eps);
                    }
                }
            }
        }
    }
}
