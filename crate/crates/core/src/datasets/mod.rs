//! Corpus loading and model persistence.

mod corpus;
mod manifest;
mod model_file;

pub use corpus::{decode_image, load_corpus, load_corpus_with, LoadedCorpus};
pub use manifest::{class_counts, CorpusManifest, Layout, RecordSource, SampleRecord};
pub use model_file::{decode_model, encode_model, load_model, save_model, FORMAT_VERSION, MAGIC};
