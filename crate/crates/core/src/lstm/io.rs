//! Model file, little-endian:
//!
//! ```text
//! "WSDM" | version u32 | D_in u32 | H u32 | C u32 | T u32
//! layer 1, gates i f g o: W_x (D_in x H), W_h (H x H), b (H)
//! layer 2, gates i f g o: W_x (H x H),    W_h (H x H), b (H)
//! softmax W (H x C), softmax b (C)
//! ```
//!
//! Matrices are row-major `f32`.

use std::fs;
use std::path::Path;

use super::model::{Architecture, Gate, GateTensor, LstmLayer, LstmModel};
use crate::error::{Error, Result};

pub const MODEL_MAGIC: &[u8; 4] = b"WSDM";
pub const MODEL_VERSION: u32 = 1;
pub const MODEL_HEADER_LEN: usize = 4 + 4 + 4 * 4;

fn push_floats(out: &mut Vec<u8>, values: &[f32]) {
    for v in values {
        out.extend_from_slice(&v.to_le_bytes());
    }
}

fn push_layer(out: &mut Vec<u8>, layer: &LstmLayer<f32>) {
    for g in Gate::ALL {
        push_floats(out, &layer.gate_input_weights(g));
        push_floats(out, &layer.gate_recurrent_weights(g));
        push_floats(out, layer.gate_bias(g));
    }
}

/// Serializes a model to its file image.
pub fn write_model(model: &LstmModel<f32>) -> Vec<u8> {
    let arch = model.arch;
    let mut out = Vec::with_capacity(MODEL_HEADER_LEN + 4 * model.parameter_count());
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    for dim in [arch.input_dim, arch.hidden, arch.classes, arch.seq_len] {
        out.extend_from_slice(&(dim as u32).to_le_bytes());
    }
    push_layer(&mut out, &model.layer1);
    push_layer(&mut out, &model.layer2);
    push_floats(&mut out, &model.out_w);
    push_floats(&mut out, &model.out_b);
    out
}

pub fn save_model(model: &LstmModel<f32>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, write_model(model)).map_err(|e| Error::io(path, e))
}

struct Floats<'a> {
    data: &'a [u8],
}

impl Floats<'_> {
    fn take(&mut self, n: usize) -> Vec<f32> {
        let (head, rest) = self.data.split_at(4 * n);
        self.data = rest;
        head.chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect()
    }

    fn layer(&mut self, input_dim: usize, hidden: usize) -> LstmLayer<f32> {
        let mut layer = LstmLayer::zeros(input_dim, hidden);
        for g in Gate::ALL {
            let wx = self.take(input_dim * hidden);
            let wh = self.take(hidden * hidden);
            let b = self.take(hidden);
            layer.set_gate_block(GateTensor::Input, g, &wx);
            layer.set_gate_block(GateTensor::Recurrent, g, &wh);
            layer.set_gate_block(GateTensor::Bias, g, &b);
        }
        layer
    }
}

/// Parses a model file image, rejecting bad headers and wrong payload sizes.
pub fn read_model(data: &[u8]) -> Result<LstmModel<f32>> {
    if data.len() < MODEL_HEADER_LEN {
        return Err(Error::Format("model file shorter than its header".into()));
    }
    if &data[..4] != MODEL_MAGIC {
        return Err(Error::Format("not a model file (bad magic)".into()));
    }
    let word = |i: usize| u32::from_le_bytes(data[4 + 4 * i..8 + 4 * i].try_into().unwrap());
    if word(0) != MODEL_VERSION {
        return Err(Error::Format(format!(
            "unsupported model version {}",
            word(0)
        )));
    }
    let arch = Architecture {
        input_dim: word(1) as usize,
        hidden: word(2) as usize,
        classes: word(3) as usize,
        seq_len: word(4) as usize,
    };
    if arch.input_dim == 0 || arch.hidden == 0 || arch.classes == 0 || arch.seq_len == 0 {
        return Err(Error::Format(format!("degenerate architecture {arch:?}")));
    }
    let payload = &data[MODEL_HEADER_LEN..];
    let expected = arch
        .parameter_count()
        .checked_mul(4)
        .ok_or_else(|| Error::Format("architecture too large".into()))?;
    if payload.len() != expected {
        return Err(Error::Format(format!(
            "payload is {} bytes, architecture needs {expected}",
            payload.len()
        )));
    }
    let mut floats = Floats { data: payload };
    let layer1 = floats.layer(arch.input_dim, arch.hidden);
    let layer2 = floats.layer(arch.hidden, arch.hidden);
    let out_w = floats.take(arch.hidden * arch.classes);
    let out_b = floats.take(arch.classes);
    let model = LstmModel {
        arch,
        layer1,
        layer2,
        out_w,
        out_b,
    };
    if !model.is_finite() {
        return Err(Error::Format("non-finite parameter".into()));
    }
    Ok(model)
}

pub fn load_model(path: impl AsRef<Path>) -> Result<LstmModel<f32>> {
    let path = path.as_ref();
    let data = fs::read(path).map_err(|e| Error::io(path, e))?;
    read_model(&data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn default_payload_is_330508_bytes() {
        let m = LstmModel::<f32>::zeros(Architecture::default());
        let bytes = write_model(&m);
        assert_eq!(bytes.len() - MODEL_HEADER_LEN, 330_508);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = LstmModel::<f32>::glorot(Architecture::default(), &mut rng);
        let first = write_model(&m);
        let back = read_model(&first).unwrap();
        assert_eq!(back, m);
        assert_eq!(write_model(&back), first);
    }

    #[test]
    fn truncated_file_is_rejected() {
        let m = LstmModel::<f32>::zeros(Architecture::default());
        let bytes = write_model(&m);
        assert!(matches!(
            read_model(&bytes[..bytes.len() - 4]),
            Err(Error::Format(_))
        ));
        assert!(matches!(read_model(&bytes[..10]), Err(Error::Format(_))));
        let mut bad = bytes.clone();
        bad[3] = b'X';
        assert!(matches!(read_model(&bad), Err(Error::Format(_))));
    }

    #[test]
    fn layout_is_gate_major() {
        let arch = Architecture {
            input_dim: 1,
            hidden: 1,
            classes: 1,
            seq_len: 1,
        };
        let mut m = LstmModel::<f32>::zeros(arch);
        // forget gate input weight of layer 1 is the 4th value (after i: wx, wh, b)
        m.layer1.w_x[1] = 7.0;
        let bytes = write_model(&m);
        let fourth = f32::from_le_bytes(
            bytes[MODEL_HEADER_LEN + 12..MODEL_HEADER_LEN + 16]
                .try_into()
                .unwrap(),
        );
        assert_eq!(fourth, 7.0);
    }
}
