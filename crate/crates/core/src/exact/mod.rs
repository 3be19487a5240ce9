//! Exact and robust numerics: quantization, perturbed sign predicates,
//! interpolation, and critical-point classification.

pub mod bary;
pub mod eigen;
pub mod quant;
pub mod sos;

pub use eigen::CriticalKind;
pub use quant::{Quantizer, DEFAULT_QUANT_BITS};
