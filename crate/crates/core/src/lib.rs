//! Evidence-minus-intuition scoring of political speech and the
//! time-series statistics run on the resulting session series.

pub mod corpus;
pub mod data;
pub mod embeddings;
pub mod par;
pub mod scoring;
pub mod stats;
pub mod synth;
