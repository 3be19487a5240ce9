//! Raw binary volume files.
//!
//! One file per time slice, little-endian, samples in row-major order with x
//! fastest and the components of one sample interleaved. File names come
//! from a printf-style pattern with a single `%d` / `%0Nd` placeholder for
//! the timestep index.

use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::TimeSeriesField;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Dtype {
    F32,
    F64,
}

impl Dtype {
    pub fn size(self) -> usize {
        match self {
            Dtype::F32 => 4,
            Dtype::F64 => 8,
        }
    }
}

impl FromStr for Dtype {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f32" | "float32" => Ok(Dtype::F32),
            "f64" | "float64" => Ok(Dtype::F64),
            other => Err(Error::Config(format!("unknown dtype {other:?}, expected f32 or f64"))),
        }
    }
}

/// Substitutes the single `%d` / `%0Nd` placeholder in `pattern` with
/// `index`. A pattern without a placeholder is returned as-is only when it
/// will be used for exactly one file (the caller checks that).
pub fn expand_pattern(pattern: &str, index: usize) -> Result<String> {
    let Some(pos) = pattern.find('%') else {
        return Ok(pattern.to_string());
    };
    let rest = &pattern[pos + 1..];
    let digits: String = rest.chars().take_while(|c| c.is_ascii_digit()).collect();
    let after = &rest[digits.len()..];
    if !after.starts_with('d') {
        return Err(Error::Config(format!(
            "bad placeholder in {pattern:?}: expected %d or %0Nd"
        )));
    }
    let tail = &after[1..];
    if tail.contains('%') {
        return Err(Error::Config(format!("multiple placeholders in {pattern:?}")));
    }
    let width = if digits.is_empty() { 0 } else { digits.parse::<usize>().unwrap_or(0) };
    Ok(format!("{}{:0width$}{}", &pattern[..pos], index, tail))
}

/// Reads `expected` samples from one raw file.
pub fn read_raw(path: &Path, dtype: Dtype, expected: usize) -> Result<Vec<f64>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let want = expected * dtype.size();
    if bytes.len() != want {
        return Err(Error::format(
            path,
            format!("{} bytes on disk, expected {} ({} values)", bytes.len(), want, expected),
        ));
    }
    let out = match dtype {
        Dtype::F32 => bytes
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()) as f64)
            .collect(),
        Dtype::F64 => bytes
            .chunks_exact(8)
            .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
            .collect(),
    };
    Ok(out)
}

/// Writes samples to one raw file.
pub fn write_raw(path: &Path, data: &[f64], dtype: Dtype) -> Result<()> {
    let mut bytes = Vec::with_capacity(data.len() * dtype.size());
    match dtype {
        Dtype::F32 => {
            for &x in data {
                bytes.extend_from_slice(&(x as f32).to_le_bytes());
            }
        }
        Dtype::F64 => {
            for &x in data {
                bytes.extend_from_slice(&x.to_le_bytes());
            }
        }
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

/// Reads a whole sequence into a field: `timesteps` files named after
/// `pattern`, each holding `samples × components` values.
pub fn read_sequence(
    pattern: &str,
    timesteps: usize,
    samples: usize,
    components: usize,
    dtype: Dtype,
) -> Result<TimeSeriesField> {
    if timesteps > 1 && !pattern.contains('%') {
        return Err(Error::Config(format!(
            "pattern {pattern:?} has no %d placeholder but {timesteps} timesteps were requested"
        )));
    }
    let mut field = TimeSeriesField::new(samples, components);
    for t in 0..timesteps {
        let path = expand_pattern(pattern, t)?;
        let data = read_raw(Path::new(&path), dtype, samples * components)?;
        field.push_layer(data)?;
    }
    Ok(field)
}

/// Writes every layer of a field, one raw file per timestep.
pub fn write_sequence(pattern: &str, field: &TimeSeriesField, dtype: Dtype) -> Result<Vec<String>> {
    if field.timesteps() > 1 && !pattern.contains('%') {
        return Err(Error::Config(format!(
            "pattern {pattern:?} has no %d placeholder but the field has {} timesteps",
            field.timesteps()
        )));
    }
    let mut paths = Vec::new();
    for t in 0..field.timesteps() {
        let path = expand_pattern(pattern, t)?;
        write_raw(Path::new(&path), field.layer(t), dtype)?;
        paths.push(path);
    }
    Ok(paths)
}
