//! Simplicial base meshes: the spatial complex that gets swept through time.
//!
//! A base mesh is given by vertex positions and top-dimensional cells.
//! Construction enumerates every face of every dimension, assigns ids by
//! lexicographic order of sorted vertex tuples (so ids are independent of
//! cell order), and records subface/coface incidences. Cells are stored with
//! vertices sorted by id; the extrusion relies on that order to choose
//! matching diagonals in adjacent prisms.

use std::collections::{BTreeSet, HashMap};

use crate::error::{Error, Result};

pub struct BaseMesh {
    n: usize,
    positions: Vec<[f64; 3]>,
    /// `faces[d][fid]` = sorted vertex ids of the fid-th d-face.
    faces: Vec<Vec<Vec<u32>>>,
    face_id: HashMap<Vec<u32>, u32>,
    /// `subfaces[d][fid][i]` = id of the face with sorted position i removed.
    subfaces: Vec<Vec<Vec<u32>>>,
    /// `cofaces[d][fid]` = (id of a (d+1)-face containing fid, sorted
    /// position of the vertex that face adds), ordered by id.
    cofaces: Vec<Vec<Vec<(u32, u8)>>>,
}

impl BaseMesh {
    /// Builds a mesh of `n`-dimensional cells over the given vertices.
    pub fn new(n: usize, positions: Vec<[f64; 3]>, cells: &[Vec<u32>]) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::DimensionRange(n, "base meshes must be 1..=3 dimensional"));
        }
        if cells.is_empty() {
            return Err(Error::Mesh("base mesh has no cells".into()));
        }
        let nv = positions.len() as u32;
        let mut sorted_cells: BTreeSet<Vec<u32>> = BTreeSet::new();
        for cell in cells {
            if cell.len() != n + 1 {
                return Err(Error::Mesh(format!(
                    "cell {cell:?} has {} vertices, expected {}",
                    cell.len(),
                    n + 1
                )));
            }
            let mut c = cell.clone();
            c.sort_unstable();
            if c.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Mesh(format!("cell {cell:?} repeats a vertex")));
            }
            if *c.last().unwrap() >= nv {
                return Err(Error::Mesh(format!("cell {cell:?} references a missing vertex")));
            }
            if !sorted_cells.insert(c) {
                return Err(Error::Mesh(format!("cell {cell:?} appears twice")));
            }
        }

        let mut face_sets: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); n + 1];
        for cell in &sorted_cells {
            for pick in 1u32..1 << (n + 1) {
                let sub: Vec<u32> =
                    (0..=n).filter(|i| pick >> i & 1 == 1).map(|i| cell[i]).collect();
                face_sets[sub.len() - 1].insert(sub);
            }
        }
        let faces: Vec<Vec<Vec<u32>>> = face_sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let mut face_id = HashMap::new();
        for list in &faces {
            for (id, f) in list.iter().enumerate() {
                face_id.insert(f.clone(), id as u32);
            }
        }

        let mut subfaces: Vec<Vec<Vec<u32>>> = vec![Vec::new(); n + 1];
        let mut cofaces: Vec<Vec<Vec<(u32, u8)>>> =
            faces.iter().map(|list| vec![Vec::new(); list.len()]).collect();
        for d in 1..=n {
            subfaces[d] = faces[d]
                .iter()
                .enumerate()
                .map(|(fid, f)| {
                    (0..=d)
                        .map(|drop| {
                            let sub: Vec<u32> = f
                                .iter()
                                .enumerate()
                                .filter(|&(i, _)| i != drop)
                                .map(|(_, &v)| v)
                                .collect();
                            let sid = face_id[&sub];
                            cofaces[d - 1][sid as usize].push((fid as u32, drop as u8));
                            sid
                        })
                        .collect()
                })
                .collect();
        }
        for lists in &mut cofaces {
            for list in lists {
                list.sort_unstable();
            }
        }

        Ok(BaseMesh { n, positions, faces, face_id, subfaces, cofaces })
    }

    /// Kuhn-triangulated regular grid with unit spacing, mainly for tests
    /// and synthetic inputs. `dims` are vertex counts per axis.
    pub fn triangulated_grid(dims: &[usize]) -> Result<Self> {
        use super::cube::subdivide_unit_cube;
        let n = dims.len();
        if !(1..=3).contains(&n) || dims.iter().any(|&d| d < 2) {
            return Err(Error::Mesh(format!("grid {dims:?} is not triangulatable")));
        }
        let mut padded = [1usize; 3];
        padded[..n].copy_from_slice(dims);
        let index = |c: [usize; 3]| (c[0] + padded[0] * (c[1] + padded[1] * c[2])) as u32;
        let count: usize = padded.iter().product();
        let mut positions = Vec::with_capacity(count);
        for z in 0..padded[2] {
            for y in 0..padded[1] {
                for x in 0..padded[0] {
                    positions.push([x as f64, y as f64, z as f64]);
                }
            }
        }
        let pieces = subdivide_unit_cube(n);
        let mut cells = Vec::new();
        let cell_dims: Vec<usize> = (0..3).map(|i| padded[i].saturating_sub(1).max(1)).collect();
        for z in 0..if n > 2 { cell_dims[2] } else { 1 } {
            for y in 0..if n > 1 { cell_dims[1] } else { 1 } {
                for x in 0..cell_dims[0] {
                    for piece in &pieces {
                        cells.push(
                            piece
                                .iter()
                                .map(|&mask| {
                                    index([
                                        x + (mask & 1) as usize,
                                        y + (mask >> 1 & 1) as usize,
                                        z + (mask >> 2 & 1) as usize,
                                    ])
                                })
                                .collect(),
                        );
                    }
                }
            }
        }
        BaseMesh::new(n, positions, &cells)
    }

    /// Applies a coordinate transform to every vertex position.
    pub fn map_positions(mut self, f: impl Fn([f64; 3]) -> [f64; 3]) -> Self {
        for p in &mut self.positions {
            *p = f(*p);
        }
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    pub fn position(&self, v: u32) -> [f64; 3] {
        self.positions[v as usize]
    }

    pub fn face_count(&self, d: usize) -> usize {
        self.faces.get(d).map_or(0, Vec::len)
    }

    /// Sorted vertex ids of a face.
    pub fn face(&self, d: usize, fid: u32) -> &[u32] {
        &self.faces[d][fid as usize]
    }

    pub fn find_face(&self, verts: &[u32]) -> Option<u32> {
        let mut key = verts.to_vec();
        key.sort_unstable();
        self.face_id.get(&key).copied()
    }

    /// Id of `fid` with sorted position `drop` removed (d ≥ 1).
    pub fn subface(&self, d: usize, fid: u32, drop: usize) -> u32 {
        self.subfaces[d][fid as usize][drop]
    }

    /// The (d+1)-faces containing `fid`, each with the sorted position at
    /// which the containing face inserts its extra vertex.
    pub fn cofaces(&self, d: usize, fid: u32) -> &[(u32, u8)] {
        &self.cofaces[d][fid as usize]
    }
}
