//! Batch characterization of geotagged social-media corpora.
//!
//! The crate ingests line-delimited tweet archives and answers three kinds of
//! questions about them: who posted (gender from name lexica, location from a
//! template-expanded gazetteer, registration history, biography vocabulary),
//! what each region's content looks like (TF-IDF characteristic terms, binned
//! volume dynamics), and how information flows between regions (mention
//! origin-destination matrix, hexagonal spatial density).
//!
//! Everything downstream of [`corpus::ingest`] operates on an immutable
//! [`corpus::Corpus`], so analyses can run concurrently and rerunning the
//! pipeline on the same input produces byte-identical output.

pub mod content;
pub mod corpus;
pub mod demographics;
pub mod gazetteer;
pub mod geospatial;
pub mod interactions;
pub mod stats;
pub mod synth;
pub mod temporal;

/// Scalar type used for all floating-point results in the pipeline.
///
/// The numeric kernels in [`stats`], [`demographics`] and [`content`] are
/// generic over `num_traits::Float`; the pipeline instantiates them with this
/// alias.
pub type Scalar = f64;
