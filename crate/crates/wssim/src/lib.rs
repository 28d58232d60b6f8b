//! Similarity scoring between WSDL-described web services.
//!
//! The pipeline layers four ideas: Jaro-Winkler string distance for words
//! outside the lexicon, Wu-Palmer taxonomy similarity for words inside it,
//! Lesk-style sense disambiguation to pick which synset a word means in a
//! given comparison, and modified-Hausdorff set matching to lift word
//! scores through sentences, parameter sets and operations up to whole
//! services.
//!
//! All score-producing code is generic over the floating-point type via
//! [`scalar::Scalar`]; [`Score`] fixes the concrete type the pipeline and
//! CLI use.

pub mod eval;
pub mod hausdorff;
pub mod lexicon;
pub mod scalar;
pub mod similarity;
pub mod text;
pub mod wsd;
pub mod wsdl;

pub use scalar::Scalar;

/// The concrete scalar used by the shipped pipeline.
pub type Score = f64;

/// Single-precision variant for callers trading accuracy for footprint.
pub type Score32 = f32;

pub use lexicon::Lexicon;
pub use similarity::{Engine, Weights};
pub use text::StopwordList;
pub use wsdl::{parse_wsdl, parse_wsdl_file, ServiceDescription};
