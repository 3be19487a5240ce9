//! Compact, totally ordered identifiers for mesh elements.
//!
//! Every simplex of a spacetime mesh is addressed by an [`ElementHandle`]:
//! its dimension, an anchor (a lattice corner for regular meshes, or an
//! original base-mesh element id for extruded unstructured meshes), a small
//! per-anchor type id, and the timestep layer. Handles order
//! lexicographically on those fields, which gives every algorithm in the
//! crate a deterministic tie-breaking rule (component representatives,
//! chain orientation, output ordering).

use crate::error::{Error, Result};

/// What an element is anchored to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Anchor {
    /// Spatial lattice corner of a regular grid (unused trailing coords are 0).
    Lattice([i32; 3]),
    /// Id of the base-mesh face (vertex/edge/triangle/…) the element extrudes.
    Face(u32),
}

/// Address of one simplex in a spacetime mesh.
///
/// Ordering is lexicographic on `(dim, anchor, type_id, layer)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElementHandle {
    /// Simplex dimension k.
    pub dim: u8,
    /// Owning anchor; see [`Anchor`].
    pub anchor: Anchor,
    /// Index into the mesh's canonical type table for dimension `dim`.
    pub type_id: u16,
    /// Timestep layer τ. Interval elements span `[τ, τ+1]`.
    pub layer: i32,
}

impl ElementHandle {
    pub fn lattice(dim: u8, anchor: [i32; 3], type_id: u16, layer: i32) -> Self {
        ElementHandle { dim, anchor: Anchor::Lattice(anchor), type_id, layer }
    }

    pub fn face(dim: u8, face: u32, type_id: u16, layer: i32) -> Self {
        ElementHandle { dim, anchor: Anchor::Face(face), type_id, layer }
    }

    /// Packs the handle into a single integer for compact storage.
    ///
    /// Layout (low → high): layer:32 | type_id:16 | dim:8 | tag:8 | anchor:64,
    /// where lattice anchors store three 21-bit biased coordinates.
    pub fn encode(&self) -> u128 {
        let (tag, payload): (u128, u128) = match self.anchor {
            Anchor::Lattice(c) => {
                let mut p: u128 = 0;
                for (i, &x) in c.iter().enumerate() {
                    debug_assert!((-(1 << 20)..(1 << 20)).contains(&x), "lattice coord out of encodable range");
                    let biased = (x + (1 << 20)) as u128 & ((1 << 21) - 1);
                    p |= biased << (21 * i);
                }
                (0, p)
            }
            Anchor::Face(id) => (1, id as u128),
        };
        (self.layer as u32 as u128)
            | ((self.type_id as u128) << 32)
            | ((self.dim as u128) << 48)
            | (tag << 56)
            | (payload << 64)
    }

    /// Inverse of [`encode`](Self::encode).
    pub fn decode(word: u128) -> Result<Self> {
        let layer = (word & 0xffff_ffff) as u32 as i32;
        let type_id = ((word >> 32) & 0xffff) as u16;
        let dim = ((word >> 48) & 0xff) as u8;
        let tag = (word >> 56) & 0xff;
        let payload = word >> 64;
        let anchor = match tag {
            0 => {
                let mut c = [0i32; 3];
                for (i, x) in c.iter_mut().enumerate() {
                    let biased = ((payload >> (21 * i)) & ((1 << 21) - 1)) as i64;
                    *x = (biased - (1 << 20)) as i32;
                }
                Anchor::Lattice(c)
            }
            1 => Anchor::Face(payload as u32),
            _ => return Err(Error::InvalidHandle(format!("bad anchor tag in {word:#x}"))),
        };
        if dim > 4 {
            return Err(Error::InvalidHandle(format!("dimension {dim} in {word:#x}")));
        }
        Ok(ElementHandle { dim, anchor, type_id, layer })
    }

    /// Stable text form used in JSON documents (hex of [`encode`](Self::encode)).
    pub fn to_token(&self) -> String {
        format!("{:032x}", self.encode())
    }

    pub fn from_token(tok: &str) -> Result<Self> {
        let word = u128::from_str_radix(tok, 16)
            .map_err(|_| Error::InvalidHandle(format!("unparseable token {tok:?}")))?;
        Self::decode(word)
    }
}

impl std::fmt::Display for ElementHandle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.anchor {
            Anchor::Lattice(c) => write!(
                f,
                "k{}@({},{},{})#{}t{}",
                self.dim, c[0], c[1], c[2], self.type_id, self.layer
            ),
            Anchor::Face(id) => write!(f, "k{}@f{}#{}t{}", self.dim, id, self.type_id, self.layer),
        }
    }
}
