//! Simplicial subdivision of the unit cube and the catalog of simplex
//! shapes that the resulting lattice triangulation contains.
//!
//! Subdividing every cell of a regular grid with [`subdivide_unit_cube`]
//! yields a conforming triangulation of the whole lattice that is invariant
//! under integer translation. Consequently every k-simplex in it, shifted so
//! that its componentwise-minimum corner sits at the origin, matches one of
//! finitely many *types*; [`CubeTypeTable`] enumerates them and precomputes
//! face/coface relations between types, so meshes of any size can resolve
//! incidences in constant time without storing connectivity.
//!
//! Corners of the unit m-cube are encoded as bitmasks with bit i holding
//! coordinate i. The corners of any simplex in the subdivision form a chain
//! under the subset order, so sorting corners by mask agrees with sorting by
//! row-major vertex index for any grid shape.

use std::collections::{BTreeSet, HashMap};

/// Splits the unit n-cube into n! simplices, each listed as a chain of n+1
/// corner masks from the origin to the all-ones corner.
///
/// Built by induction on the dimension: the (n-1)-dimensional subdivision is
/// extruded along coordinate n-1 and each prism is split by
/// [`staircase_triangulate`](super::staircase::staircase_triangulate), taking
/// step-up positions in ascending order within each base simplex.
pub fn subdivide_unit_cube(n: usize) -> Vec<Vec<u32>> {
    assert!((1..=4).contains(&n), "cube subdivision supports 1..=4 dimensions");
    let mut simplices: Vec<Vec<u32>> = vec![vec![0, 1]];
    for dim in 2..=n {
        let lift = 1u32 << (dim - 1);
        let mut next = Vec::with_capacity(simplices.len() * dim);
        for base in &simplices {
            for j in 0..dim {
                let mut s = Vec::with_capacity(dim + 1);
                s.extend_from_slice(&base[..=j]);
                s.extend(base[j..].iter().map(|c| c | lift));
                next.push(s);
            }
        }
        simplices = next;
    }
    simplices
}

/// Renders a corner mask as its coordinate digits, coordinate 0 first.
pub fn corner_string(mask: u32, n: usize) -> String {
    (0..n).map(|i| if mask >> i & 1 == 1 { '1' } else { '0' }).collect()
}

/// One simplex shape of the lattice triangulation, anchored at the origin.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CubeType {
    /// Corner offsets as an ascending chain of masks; `corners[0] == 0`.
    pub corners: Vec<u32>,
    /// Bounding-box mask (`corners.last()`): coordinates the simplex spans.
    pub extent: u32,
}

/// Catalog of all simplex types of the m-dimensional lattice triangulation,
/// with face and coface relations expressed relative to element anchors.
pub struct CubeTypeTable {
    pub m: usize,
    /// `types[k]` lists the k-simplex types in a fixed canonical order.
    pub types: Vec<Vec<CubeType>>,
    /// `faces[k][t]` = the k+1 facets of type t (k ≥ 1), as
    /// (anchor offset mask, facet type id), ordered by dropped corner.
    pub faces: Vec<Vec<Vec<(u32, u16)>>>,
    /// `cofaces[k][t]` = the (k+1)-simplices containing a k-simplex of type
    /// t, as (anchor offset mask to subtract, parent type id), sorted.
    pub cofaces: Vec<Vec<Vec<(u32, u16)>>>,
    lookup: HashMap<Vec<u32>, (usize, u16)>,
}

impl CubeTypeTable {
    pub fn new(m: usize) -> Self {
        // Collect every subset of every top simplex's corner chain,
        // translated so its least corner is the origin. Subsets of chains
        // are chains, and every chain extends to some top simplex, so this
        // enumeration is exhaustive for the infinite lattice as well.
        let mut chains: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); m + 1];
        for top in subdivide_unit_cube(m) {
            for pick in 1u32..1 << (m + 1) {
                let sub: Vec<u32> = (0..=m).filter(|i| pick >> i & 1 == 1).map(|i| top[i]).collect();
                let base = sub[0];
                chains[sub.len() - 1].insert(sub.iter().map(|c| c & !base).collect());
            }
        }
        let types: Vec<Vec<CubeType>> = chains
            .into_iter()
            .map(|set| {
                set.into_iter()
                    .map(|corners| {
                        let extent = *corners.last().unwrap();
                        CubeType { corners, extent }
                    })
                    .collect()
            })
            .collect();

        let mut lookup = HashMap::new();
        for (k, list) in types.iter().enumerate() {
            for (id, ty) in list.iter().enumerate() {
                lookup.insert(ty.corners.clone(), (k, id as u16));
            }
        }

        let mut faces: Vec<Vec<Vec<(u32, u16)>>> = vec![Vec::new(); m + 1];
        for k in 1..=m {
            faces[k] = types[k]
                .iter()
                .map(|ty| {
                    (0..=k)
                        .map(|drop| {
                            let rest: Vec<u32> = ty
                                .corners
                                .iter()
                                .enumerate()
                                .filter(|&(i, _)| i != drop)
                                .map(|(_, &c)| c)
                                .collect();
                            let off = rest[0];
                            let chain: Vec<u32> = rest.iter().map(|c| c & !off).collect();
                            (off, lookup[&chain].1)
                        })
                        .collect()
                })
                .collect();
        }

        let mut cofaces: Vec<Vec<Vec<(u32, u16)>>> = vec![Vec::new(); m + 1];
        for k in 0..m {
            let mut lists = vec![Vec::new(); types[k].len()];
            for (pid, pfaces) in faces[k + 1].iter().enumerate() {
                for &(off, fid) in pfaces {
                    lists[fid as usize].push((off, pid as u16));
                }
            }
            for list in &mut lists {
                list.sort_unstable();
            }
            cofaces[k] = lists;
        }

        CubeTypeTable { m, types, faces, cofaces, lookup }
    }

    /// Number of k-simplex types.
    pub fn count(&self, k: usize) -> usize {
        self.types[k].len()
    }

    /// Translates arbitrary lattice corners to (anchor, type id).
    ///
    /// Returns `None` if the corners are not a simplex of the triangulation.
    pub fn classify(&self, corners: &[Vec<i32>]) -> Option<(Vec<i32>, u16)> {
        let k = corners.len() - 1;
        let mut anchor = corners[0].clone();
        for c in corners {
            for (a, &x) in anchor.iter_mut().zip(c) {
                *a = (*a).min(x);
            }
        }
        let mut masks: Vec<u32> = Vec::with_capacity(corners.len());
        for c in corners {
            let mut mask = 0u32;
            for (i, (&x, &a)) in c.iter().zip(&anchor).enumerate() {
                match x - a {
                    0 => {}
                    1 => mask |= 1 << i,
                    _ => return None,
                }
            }
            masks.push(mask);
        }
        masks.sort_unstable();
        masks.dedup();
        if masks.len() != corners.len() {
            return None;
        }
        match self.lookup.get(&masks) {
            Some(&(kk, id)) if kk == k => Some((anchor, id)),
            _ => None,
        }
    }
}

/// Unpacks an offset mask into per-coordinate deltas.
pub fn mask_to_deltas(mask: u32, m: usize) -> Vec<i32> {
    (0..m).map(|i| (mask >> i & 1) as i32).collect()
}
