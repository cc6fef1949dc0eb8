//! Non-binary LDPC codes over the binary erasure channel.
//!
//! Symbols live in GF(2^p) and edges of the Tanner graph carry labels from a
//! group acting linearly on GF(2^p): field units or invertible binary
//! matrices. Over the erasure channel every decoder message is an affine
//! subspace of GF(2^p), so the decoders here pass cosets around and the
//! density evolution engine tracks distributions over the lattice of linear
//! subspaces.
//!
//! - [`gf`]: field arithmetic and label groups
//! - [`subspace`]: subspaces, cosets, Grassmannian enumeration, orbits
//! - [`ensemble`], [`code`], [`binary`]: ensembles, sampled codes, binary
//!   image and encoding
//! - [`channel`]: erasure channel observations
//! - [`decoder`]: batch iterative decoding on eligible sets
//! - [`onthefly`]: per-bit minimum-delay decoding and inefficiency
//! - [`sim`]: Monte-Carlo failure-rate and inefficiency estimates
//! - [`de`]: density evolution and thresholds

pub mod binary;
pub mod channel;
pub mod code;
pub mod de;
pub mod decoder;
pub mod ensemble;
pub mod error;
pub mod gf;
pub mod onthefly;
pub mod sim;
pub mod subspace;

pub use binary::{BinaryImage, Encoder};
pub use channel::{BitObservation, ChannelOutput};
pub use code::{sample_code, DegreeRounding, Edge, LdpcCode};
pub use decoder::{decode, BatchDecoder, DecodeOutcome, DecodeResult};
pub use ensemble::{DegreeDist, DegreeSpec, Ensemble, EnsembleConfig, LabelPdf};
pub use error::{Error, Result};
pub use gf::{BinMatrix, Field, FieldSpec, GroupKind, Label, Symbol};
pub use onthefly::{
    decode_stream, estimate_inefficiency, ArrivalStream, BitArrival, InefficiencyReport, OnTheFlyDecoder,
};
pub use subspace::{AffineSet, Coset, Grassmannian, Partition, Subspace};
