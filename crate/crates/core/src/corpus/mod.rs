//! Corpus ingestion: Georgian-script filtering, sentence segmentation,
//! homonym-centred windows, labeled dataset files and stratified splits.

mod dataset;
mod homonym;
mod split;
mod text;
mod window;

pub use dataset::{
    load_labeled_dataset, read_dataset, write_dataset, LabeledExample, SenseLabel, DATASET_HEADER,
};
pub use homonym::{HomonymSpec, Sense};
pub use split::{stratified_split, stratified_subset, Split, SplitSpec};
pub use text::{
    filter_georgian_line, is_mkhedruli, segment_and_tokenize, Token, SENTENCE_TERMINATORS,
};
pub use window::{
    extract_from_reader, extract_windows, run_extraction_pipeline, run_filter_pipeline,
    write_windows, SentenceWindow, CONTEXT_RADIUS, MAX_WINDOW_LEN,
};
