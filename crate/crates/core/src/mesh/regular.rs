//! Spacetime triangulation of a regular grid, stored implicitly.
//!
//! The grid of `dims` vertices per spatial axis is swept through `timesteps`
//! slices; every unit (n+1)-cube of the resulting lattice is subdivided by
//! [`subdivide_unit_cube`](super::cube::subdivide_unit_cube). No element or
//! connectivity lists are stored: an element is identified by its anchor
//! (componentwise-minimum corner) plus a type id from the
//! [`CubeTypeTable`](super::cube::CubeTypeTable), and faces/cofaces are
//! resolved through the table's relative offset tables in constant time.
//! Per-layer element counts are closed-form products, so traversals can be
//! partitioned across threads by index arithmetic alone.

use super::cube::{mask_to_deltas, CubeType, CubeTypeTable};
use super::{ElementKind, MeshVertex, SpacetimeMesh};
use crate::error::{Error, Result};
use crate::handle::{Anchor, ElementHandle};

pub struct RegularSpacetimeMesh {
    n: usize,
    /// Vertices per spatial axis, padded with 1 above dimension n.
    dims: [usize; 3],
    timesteps: usize,
    table: CubeTypeTable,
    /// Per kind (0 = ordinal, 1 = interval) and dimension k: type ids.
    kind_types: [Vec<Vec<u16>>; 2],
    /// Cumulative per-layer block sizes aligned with `kind_types`.
    kind_prefix: [Vec<Vec<u64>>; 2],
}

impl RegularSpacetimeMesh {
    pub fn new(spatial_dims: &[usize], timesteps: usize) -> Result<Self> {
        let n = spatial_dims.len();
        if !(1..=3).contains(&n) {
            return Err(Error::DimensionRange(n, "spatial dimensions must be 1..=3"));
        }
        if timesteps < 1 {
            return Err(Error::Mesh("at least one time slice is required".into()));
        }
        let mut dims = [1usize; 3];
        for (d, &v) in dims.iter_mut().zip(spatial_dims) {
            if v < 2 {
                return Err(Error::Mesh(format!("grid needs at least 2 vertices per axis, got {v}")));
            }
            if v >= 1 << 20 {
                return Err(Error::Mesh(format!("grid axis of {v} vertices exceeds addressable range")));
            }
            *d = v;
        }

        let m = n + 1;
        let table = CubeTypeTable::new(m);
        let time_bit = 1u32 << n;
        let mut kind_types: [Vec<Vec<u16>>; 2] = [vec![Vec::new(); m + 1], vec![Vec::new(); m + 1]];
        let mut kind_prefix: [Vec<Vec<u64>>; 2] = [vec![Vec::new(); m + 1], vec![Vec::new(); m + 1]];
        for k in 0..=m {
            for side in 0..2 {
                let mut prefix = vec![0u64];
                let mut ids = Vec::new();
                for (tid, ty) in table.types[k].iter().enumerate() {
                    let spans_time = ty.extent & time_bit != 0;
                    if spans_time == (side == 1) {
                        ids.push(tid as u16);
                        let block: u64 =
                            (0..n).map(|c| (dims[c] - (ty.extent >> c & 1) as usize) as u64).product();
                        prefix.push(prefix.last().unwrap() + block);
                    }
                }
                kind_types[side][k] = ids;
                kind_prefix[side][k] = prefix;
            }
        }

        Ok(RegularSpacetimeMesh { n, dims, timesteps, table, kind_types, kind_prefix })
    }

    pub fn spatial_dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn type_table(&self) -> &CubeTypeTable {
        &self.table
    }

    /// Row-major in-slice vertex index (x fastest).
    pub fn vertex_index(&self, c: [i32; 3]) -> u64 {
        c[0] as u64 + self.dims[0] as u64 * (c[1] as u64 + self.dims[1] as u64 * c[2] as u64)
    }

    pub fn vertex_coords(&self, idx: u64) -> [i32; 3] {
        let x = idx % self.dims[0] as u64;
        let y = idx / self.dims[0] as u64 % self.dims[1] as u64;
        let z = idx / (self.dims[0] as u64 * self.dims[1] as u64);
        [x as i32, y as i32, z as i32]
    }

    fn ty(&self, k: usize, tid: u16) -> &CubeType {
        &self.table.types[k][tid as usize]
    }

    fn spans_time(&self, k: usize, tid: u16) -> bool {
        self.ty(k, tid).extent >> self.n & 1 == 1
    }

    /// Highest valid layer for an element type (inclusive).
    fn max_layer(&self, k: usize, tid: u16) -> i32 {
        self.timesteps as i32 - 1 - self.spans_time(k, tid) as i32
    }

    fn anchor_in_range(&self, k: usize, tid: u16, anchor: [i32; 3]) -> bool {
        let ty = self.ty(k, tid);
        (0..3).all(|c| {
            let ext = if c < self.n { (ty.extent >> c & 1) as i32 } else { 0 };
            anchor[c] >= 0 && anchor[c] <= self.dims[c] as i32 - 1 - ext
        })
    }

    fn check(&self, h: ElementHandle) -> Result<(usize, [i32; 3], u16, i32)> {
        let k = h.dim as usize;
        let bad = |why: &str| Err(Error::InvalidHandle(format!("{h}: {why}")));
        if k > self.n + 1 {
            return bad("dimension exceeds mesh");
        }
        let Anchor::Lattice(anchor) = h.anchor else {
            return bad("regular meshes use lattice anchors");
        };
        if h.type_id as usize >= self.table.types[k].len() {
            return bad("type id out of range");
        }
        if !self.anchor_in_range(k, h.type_id, anchor) {
            return bad("anchor outside grid");
        }
        if h.layer < 0 || h.layer > self.max_layer(k, h.type_id) {
            return bad("layer outside time range");
        }
        Ok((k, anchor, h.type_id, h.layer))
    }

    fn kind_count(&self, k: usize, side: usize, layer: i32) -> u64 {
        let hi = self.timesteps as i64 - side as i64;
        if k > self.n + 1 || (layer as i64) < 0 || (layer as i64) >= hi {
            return 0;
        }
        *self.kind_prefix[side][k].last().unwrap()
    }

    fn kind_at(&self, k: usize, side: usize, layer: i32, idx: u64) -> ElementHandle {
        let prefix = &self.kind_prefix[side][k];
        let slot = prefix.partition_point(|&p| p <= idx) - 1;
        let tid = self.kind_types[side][k][slot];
        let mut rem = idx - prefix[slot];
        let ty = self.ty(k, tid);
        let mut anchor = [0i32; 3];
        for c in 0..self.n {
            let size = (self.dims[c] - (ty.extent >> c & 1) as usize) as u64;
            anchor[c] = (rem % size) as i32;
            rem /= size;
        }
        debug_assert_eq!(rem, 0);
        ElementHandle::lattice(k as u8, anchor, tid, layer)
    }
}

impl SpacetimeMesh for RegularSpacetimeMesh {
    fn spatial_dim(&self) -> usize {
        self.n
    }

    fn timesteps(&self) -> usize {
        self.timesteps
    }

    fn verts_per_layer(&self) -> u64 {
        self.dims.iter().map(|&d| d as u64).product()
    }

    fn element_count(&self, k: usize, kind: ElementKind, layer: i32) -> u64 {
        match kind {
            ElementKind::Ordinal => self.kind_count(k, 0, layer),
            ElementKind::Interval => self.kind_count(k, 1, layer),
            ElementKind::All => self.kind_count(k, 0, layer) + self.kind_count(k, 1, layer),
        }
    }

    fn element_at(&self, k: usize, kind: ElementKind, layer: i32, idx: u64) -> ElementHandle {
        debug_assert!(idx < self.element_count(k, kind, layer), "element index out of range");
        match kind {
            ElementKind::Ordinal => self.kind_at(k, 0, layer, idx),
            ElementKind::Interval => self.kind_at(k, 1, layer, idx),
            ElementKind::All => {
                let ord = self.kind_count(k, 0, layer);
                if idx < ord {
                    self.kind_at(k, 0, layer, idx)
                } else {
                    self.kind_at(k, 1, layer, idx - ord)
                }
            }
        }
    }

    fn vertices_into(&self, h: ElementHandle, out: &mut Vec<MeshVertex>) -> Result<()> {
        let (k, anchor, tid, layer) = self.check(h)?;
        out.clear();
        for &mask in &self.ty(k, tid).corners {
            let mut c = anchor;
            for (axis, d) in mask_to_deltas(mask, self.n).into_iter().enumerate() {
                c[axis] += d;
            }
            out.push(MeshVertex {
                index: self.vertex_index(c),
                layer: layer + (mask >> self.n & 1) as i32,
                position: [c[0] as f64, c[1] as f64, c[2] as f64],
            });
        }
        Ok(())
    }

    fn sides_into(&self, h: ElementHandle, out: &mut Vec<ElementHandle>) -> Result<()> {
        let (k, anchor, tid, layer) = self.check(h)?;
        out.clear();
        if k == 0 {
            return Ok(());
        }
        for &(off, fid) in &self.table.faces[k][tid as usize] {
            let mut a = anchor;
            for (axis, d) in mask_to_deltas(off, self.n).into_iter().enumerate() {
                a[axis] += d;
            }
            out.push(ElementHandle::lattice(
                k as u8 - 1,
                a,
                fid,
                layer + (off >> self.n & 1) as i32,
            ));
        }
        Ok(())
    }

    fn side_of(&self, h: ElementHandle) -> Result<Vec<ElementHandle>> {
        let (k, anchor, tid, layer) = self.check(h)?;
        if k > self.n {
            return Ok(Vec::new());
        }
        Ok(self.table.cofaces[k][tid as usize]
            .iter()
            .filter_map(|&(off, pid)| {
                let mut a = anchor;
                for (axis, d) in mask_to_deltas(off, self.n).into_iter().enumerate() {
                    a[axis] -= d;
                }
                let pl = layer - (off >> self.n & 1) as i32;
                let ok = self.anchor_in_range(k + 1, pid, a)
                    && pl >= 0
                    && pl <= self.max_layer(k + 1, pid);
                ok.then(|| ElementHandle::lattice(k as u8 + 1, a, pid, pl))
            })
            .collect())
    }
}
