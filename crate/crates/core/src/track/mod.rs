//! Feature trackers: sweep the spacetime mesh once per sliding window,
//! claim intersected elements with exact perturbed predicates, and stitch
//! the claims into trajectories, curves, and surfaces.

pub mod chain;
pub mod critical;
pub mod isosurface;
pub mod vortex;

use crate::exact::eigen::CriticalKind;
use crate::handle::ElementHandle;

/// One located feature point: the interpolated zero inside its owning
/// spacetime element.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryPoint {
    /// Element that claimed the point.
    pub handle: ElementHandle,
    /// Spatial position in mesh coordinates (lattice units on grids).
    pub position: [f64; 3],
    /// Time in layer units; a time-step size is applied only on export.
    pub time: f64,
    /// Barycentric weights inside the owning element, vertex-id order.
    pub weights: Vec<f64>,
    pub kind: CriticalKind,
    /// Interpolated scalar value when tracking a scalar field, else 0.
    pub value: f64,
}

/// A maximal polyline of feature points.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// Token of the smallest element handle in the connected component;
    /// chains split off one component share it.
    pub id: String,
    pub points: Vec<TrajectoryPoint>,
    /// Loop in spacetime (last point links back to the first).
    pub closed: bool,
    pub starts_on_boundary: bool,
    pub ends_on_boundary: bool,
}

impl Trajectory {
    /// Time span covered, in layer units.
    pub fn duration(&self) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo = lo.min(p.time);
            hi = hi.max(p.time);
        }
        if self.points.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    /// Spread of the scalar attribute (0 for vector-field tracking).
    pub fn value_range(&self) -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in &self.points {
            lo = lo.min(p.value);
            hi = hi.max(p.value);
        }
        if self.points.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }
}

