//! Skip-gram word vectors trained with negative sampling.

mod io;
mod matrix;
mod sgns;
mod train;
mod vocab;

pub use io::{
    load_embeddings, read_embeddings, save_embeddings, write_embeddings, EMBEDDINGS_MAGIC,
    EMBEDDINGS_VERSION,
};
pub use matrix::Embeddings;
pub use sgns::{sgns_pair_gradients, sgns_pair_loss, sgns_pair_step, SgnsGradients};
pub use train::{
    read_corpus, train_embeddings, train_embeddings_on, EmbeddingConfig, EmbeddingStats,
    UnigramTable,
};
pub use vocab::{build_vocabulary, Vocabulary};
