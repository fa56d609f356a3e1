//! Two-layer LSTM sense classifier.
//!
//! Layer 1 reads the embedded window one token per step, layer 2 reads the
//! per-step outputs of layer 1, and a softmax head reads layer 2's final
//! hidden state. Gradients are computed by backpropagation through time over
//! both layers.

mod backward;
mod cell;
mod embed;
mod forward;
mod io;
mod model;
mod optim;
mod train;

pub use backward::{clip_global_norm, loss_and_gradients};
pub use cell::{lstm_cell_forward, CellCache};
pub use embed::embed_window;
pub use forward::{forward, forward_batch, log_softmax, ForwardCache};
pub use io::{
    load_model, read_model, save_model, write_model, MODEL_HEADER_LEN, MODEL_MAGIC, MODEL_VERSION,
};
pub use model::{Architecture, Gate, LstmLayer, LstmModel};
pub use optim::{Optimizer, OptimizerKind};
pub use train::{
    argmax_probs, dataset_loss, embed_examples, predict, train, ClassifierTrainConfig, EpochRecord,
    TrainingHistory,
};
