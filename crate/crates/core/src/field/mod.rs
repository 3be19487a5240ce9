//! Time series of sampled fields.
//!
//! A field holds one flat array per time slice, `components` values per
//! sample, matching the vertex indexing of the mesh it lives on (row-major
//! with x fastest for grids, vertex id for unstructured meshes).

pub mod derive;
pub mod raw;

use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct TimeSeriesField {
    samples_per_layer: usize,
    components: usize,
    layers: Vec<Vec<f64>>,
}

impl TimeSeriesField {
    pub fn new(samples_per_layer: usize, components: usize) -> Self {
        assert!((1..=3).contains(&components), "fields carry 1..=3 components");
        TimeSeriesField { samples_per_layer, components, layers: Vec::new() }
    }

    pub fn push_layer(&mut self, data: Vec<f64>) -> Result<()> {
        if data.len() != self.samples_per_layer * self.components {
            return Err(Error::Field(format!(
                "layer has {} values, expected {} samples × {} components",
                data.len(),
                self.samples_per_layer,
                self.components
            )));
        }
        if let Some(bad) = data.iter().find(|x| !x.is_finite()) {
            return Err(Error::Field(format!("layer contains non-finite sample {bad}")));
        }
        self.layers.push(data);
        Ok(())
    }

    pub fn samples_per_layer(&self) -> usize {
        self.samples_per_layer
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn timesteps(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, layer: usize) -> &[f64] {
        &self.layers[layer]
    }

    /// Single-component sample.
    pub fn scalar(&self, layer: usize, idx: u64) -> f64 {
        debug_assert_eq!(self.components, 1);
        self.layers[layer][idx as usize]
    }

    /// Sample padded to three components.
    pub fn vector(&self, layer: usize, idx: u64) -> [f64; 3] {
        let base = idx as usize * self.components;
        let mut out = [0.0; 3];
        out[..self.components].copy_from_slice(&self.layers[layer][base..base + self.components]);
        out
    }

    /// Applies `f` to every sample of every layer in place.
    pub fn map_in_place(&mut self, mut f: impl FnMut(usize, &mut [f64])) {
        for (layer, data) in self.layers.iter_mut().enumerate() {
            for chunk in data.chunks_mut(self.components) {
                f(layer, chunk);
            }
        }
    }
}
