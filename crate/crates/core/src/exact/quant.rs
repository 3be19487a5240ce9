//! Fixed-point quantization of field samples.
//!
//! All topological decisions (sign tests, containment tests) are made on
//! integer samples `round(x · 2^bits)`, so they are exact and reproducible;
//! floating point is only used afterwards for interpolation. Quantized
//! magnitudes must stay below 2^53 so the integers and their f64 images are
//! interchangeable.

use crate::error::{Error, Result};

pub const DEFAULT_QUANT_BITS: u32 = 32;

/// Exactness ceiling: quantized values must stay strictly below 2^53.
const LIMIT: f64 = 9_007_199_254_740_992.0;

#[derive(Clone, Copy, Debug)]
pub struct Quantizer {
    bits: u32,
    scale: f64,
}

impl Quantizer {
    pub fn new(bits: u32) -> Result<Self> {
        if !(1..=52).contains(&bits) {
            return Err(Error::Config(format!("quantization bits must be 1..=52, got {bits}")));
        }
        Ok(Quantizer { bits, scale: (1u64 << bits) as f64 })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    /// Rounds `x · 2^bits` to the nearest integer (ties away from zero).
    pub fn quantize(&self, x: f64) -> Result<i64> {
        let y = (x * self.scale).round();
        if !y.is_finite() || y.abs() >= LIMIT {
            return Err(Error::Numerical(format!(
                "sample {x} does not fit {} quantization bits; lower --quant-bits",
                self.bits
            )));
        }
        Ok(y as i64)
    }
}
