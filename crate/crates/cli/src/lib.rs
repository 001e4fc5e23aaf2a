//! File formats, benchmark generation, and the end-to-end pipeline for
//! the grammar augmentation toolkit.
//!
//! The algorithmic core lives in `gramaug-core`; this crate adds
//! everything that touches the filesystem — posteriorgram and score
//! matrix containers, corpus manifests, the dictionary TSV, candidate
//! JSON, the synthetic benchmark writer, and the staged `run` pipeline
//! with content-hash caching — plus the `gramaug` binary.

pub mod bench;
pub mod formats;
pub mod ops;
pub mod pipeline;
