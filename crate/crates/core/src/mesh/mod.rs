//! Spacetime meshes: simplicial triangulations of space × time.
//!
//! Two constructions are provided. [`regular`] triangulates a regular
//! n-dimensional grid swept through time (n ≤ 3) without storing any
//! connectivity, using the type catalog from [`cube`]. [`extruded`] sweeps an
//! arbitrary simplicial [`base`] mesh through time. Both expose the same
//! traversal interface, [`SpacetimeMesh`], so trackers are written once.

pub mod base;
pub mod cube;
pub mod extruded;
pub mod regular;
pub mod staircase;

use crate::error::Result;
use crate::handle::ElementHandle;

/// Which elements of a layer a traversal should visit.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ElementKind {
    /// Elements lying entirely inside one time slice.
    Ordinal,
    /// Elements spanning a slab between consecutive slices.
    Interval,
    /// Both.
    All,
}

/// A vertex of a spacetime mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshVertex {
    /// Index of the vertex within its time slice (row-major for grids).
    pub index: u64,
    /// Time slice the vertex lies on.
    pub layer: i32,
    /// Spatial position; trailing coordinates are 0 below 3 dimensions.
    pub position: [f64; 3],
}

impl MeshVertex {
    /// Identifier unique across the whole spacetime mesh, ordered first by
    /// layer then by in-slice index. Perturbation machinery relies on this
    /// order being total and stable.
    pub fn global_id(&self, verts_per_layer: u64) -> u64 {
        self.layer as u64 * verts_per_layer + self.index
    }
}

/// Uniform traversal interface over spacetime triangulations.
///
/// Elements are addressed by [`ElementHandle`]; per dimension and layer they
/// are also countable and indexable, which lets sweeps over a layer be
/// partitioned across threads without materializing element lists.
pub trait SpacetimeMesh: Sync {
    /// Number of spatial dimensions n (the mesh itself is (n+1)-dimensional).
    fn spatial_dim(&self) -> usize;

    /// Number of time slices (layers run 0..timesteps).
    fn timesteps(&self) -> usize;

    /// Vertices per time slice.
    fn verts_per_layer(&self) -> u64;

    /// Number of k-simplices of the given kind anchored at one layer.
    ///
    /// Interval elements of layer τ span [τ, τ+1], so they exist for
    /// τ < timesteps − 1; ordinal elements exist for every layer.
    fn element_count(&self, k: usize, kind: ElementKind, layer: i32) -> u64;

    /// The idx-th k-simplex of the given kind at a layer, 0 ≤ idx < count.
    fn element_at(&self, k: usize, kind: ElementKind, layer: i32, idx: u64) -> ElementHandle;

    /// Writes the element's vertices, sorted by global vertex id, into
    /// `out` (cleared first). The buffer form lets hot sweeps reuse one
    /// allocation per worker.
    fn vertices_into(&self, h: ElementHandle, out: &mut Vec<MeshVertex>) -> Result<()>;

    /// Vertices of an element, sorted by global vertex id.
    fn vertices(&self, h: ElementHandle) -> Result<Vec<MeshVertex>> {
        let mut out = Vec::new();
        self.vertices_into(h, &mut out)?;
        Ok(out)
    }

    /// Writes the (k−1)-faces of a k-element into `out` (cleared first).
    fn sides_into(&self, h: ElementHandle, out: &mut Vec<ElementHandle>) -> Result<()>;

    /// The (k−1)-faces of a k-element.
    fn sides(&self, h: ElementHandle) -> Result<Vec<ElementHandle>> {
        let mut out = Vec::new();
        self.sides_into(h, &mut out)?;
        Ok(out)
    }

    /// The (k+1)-elements incident on a k-element (its coboundary).
    fn side_of(&self, h: ElementHandle) -> Result<Vec<ElementHandle>>;
}
