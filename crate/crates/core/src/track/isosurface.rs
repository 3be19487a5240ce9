//! Tracking a level set of a scalar field through spacetime.
//!
//! Every vertex gets a binary side (above/below the level, ties broken
//! upward by the perturbation), every spacetime edge with differing ends
//! carries one interpolated surface vertex, and every 4-dimensional element
//! contributes either one tetrahedron (1-vs-4 split) or a prism cut into
//! three (2-vs-3 split). Cut diagonals depend only on global vertex ids,
//! so neighboring elements always agree and the result is watertight.
//! Slicing the swept volume at a fixed time yields a classic triangulated
//! isosurface.

use std::collections::{BTreeMap, HashMap};

use rayon::prelude::*;

use crate::components::Components;
use crate::error::{Error, Result};
use crate::exact::bary::crossing_fraction;
use crate::exact::quant::{Quantizer, DEFAULT_QUANT_BITS};
use crate::exact::sos::sign_scalar_sos;
use crate::field::TimeSeriesField;
use crate::mesh::{ElementKind, MeshVertex, SpacetimeMesh};

/// Key of a surface vertex: the global ids of the crossed edge's ends.
pub type EdgeKey = (u64, u64);

#[derive(Clone, Debug)]
pub struct IsoConfig {
    pub quant_bits: u32,
    /// Exact perturbed side assignment (on) or plain f64 signs (off); both
    /// are binary, so geometry stays consistent either way.
    pub use_sos: bool,
}

impl Default for IsoConfig {
    fn default() -> Self {
        IsoConfig { quant_bits: DEFAULT_QUANT_BITS, use_sos: true }
    }
}

/// One vertex of the swept surface, sitting on a spacetime edge.
#[derive(Clone, Debug, PartialEq)]
pub struct IsoVertex {
    pub edge: EdgeKey,
    pub position: [f64; 3],
    /// Time in layer units.
    pub time: f64,
}

/// The level set swept over all time: a tetrahedral hypersurface in
/// spacetime.
#[derive(Clone, Debug, PartialEq)]
pub struct Isovolume {
    pub vertices: Vec<IsoVertex>,
    pub tets: Vec<[u32; 4]>,
    /// Connected-component index per vertex, into `component_ids`.
    pub component_of: Vec<u32>,
    /// Stable component labels, derived from the smallest edge key.
    pub component_ids: Vec<String>,
    pub detections: u64,
    /// `edge_count_violations` stays 0 as long as sides are binary.
    pub diagnostics: BTreeMap<String, u64>,
}

/// A time slice of the swept volume: a triangulated surface.
#[derive(Clone, Debug, PartialEq)]
pub struct SliceMesh {
    /// Slice time in layer units.
    pub time: f64,
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
    /// Component index per vertex, into the volume's `component_ids`.
    pub component_of: Vec<u32>,
}

/// Everything one 4-element contributes, keyed combinatorially so the
/// parallel sweep can be merged deterministically.
struct CellCut {
    cell_order: u64,
    /// Crossed edges with their interpolated vertices.
    verts: Vec<(EdgeKey, IsoVertex)>,
    /// Tetrahedra as edge-key quadruples.
    tets: Vec<[EdgeKey; 4]>,
}

struct ScalarLayer {
    f: Vec<f64>,
    q: Vec<i64>,
}

/// Sweeps the whole series and extracts the level set `level` of the
/// scalar `field` as a tetrahedral volume in spacetime. The mesh must have
/// three spatial dimensions.
pub fn track_isosurface(
    mesh: &dyn SpacetimeMesh,
    field: &TimeSeriesField,
    level: f64,
    cfg: &IsoConfig,
) -> Result<Isovolume> {
    if mesh.spatial_dim() != 3 {
        return Err(Error::Config(format!(
            "level-set tracking needs a 3-dimensional domain, got {}",
            mesh.spatial_dim()
        )));
    }
    if field.components() != 1 {
        return Err(Error::Config(format!(
            "level-set tracking needs a scalar field, got {} components",
            field.components()
        )));
    }
    if field.samples_per_layer() as u64 != mesh.verts_per_layer() {
        return Err(Error::Config(format!(
            "field has {} samples per layer, mesh has {} vertices",
            field.samples_per_layer(),
            mesh.verts_per_layer()
        )));
    }
    if field.timesteps() != mesh.timesteps() {
        return Err(Error::Config(format!(
            "field has {} layers, mesh has {} time steps",
            field.timesteps(),
            mesh.timesteps()
        )));
    }
    if mesh.timesteps() < 2 {
        return Err(Error::Config(
            "level-set sweeps need at least two time layers".into(),
        ));
    }

    let quant = Quantizer::new(cfg.quant_bits)?;
    let q_level = quant.quantize(level)?;
    let load = |layer: usize| -> Result<ScalarLayer> {
        let f = field.layer(layer).to_vec();
        let mut q = vec![0i64; f.len()];
        for (i, (&x, slot)) in f.iter().zip(q.iter_mut()).enumerate() {
            *slot = quant.quantize(x).map_err(|e| {
                Error::Numerical(format!("layer {layer}, sample {i}: {e}"))
            })?;
        }
        Ok(ScalarLayer { f, q })
    };

    let mut index: HashMap<EdgeKey, u32> = HashMap::new();
    let mut vertices: Vec<IsoVertex> = Vec::new();
    let mut tets: Vec<[u32; 4]> = Vec::new();
    let mut uf: Components<EdgeKey> = Components::new();
    let mut violations = 0u64;

    let mut lower = load(0)?;
    for tau in 0..mesh.timesteps() as i32 - 1 {
        let upper = load(tau as usize + 1)?;
        let (cuts, bad) = cut_slab(mesh, tau, level, q_level, cfg, &lower, &upper)?;
        violations += bad;
        for cut in cuts {
            let mut group = Vec::with_capacity(cut.verts.len());
            for (key, v) in cut.verts {
                group.push(key);
                if let std::collections::hash_map::Entry::Vacant(e) = index.entry(key) {
                    e.insert(vertices.len() as u32);
                    vertices.push(v);
                }
            }
            uf.unite(group)?;
            for t in cut.tets {
                tets.push([index[&t[0]], index[&t[1]], index[&t[2]], index[&t[3]]]);
            }
        }
        lower = upper;
    }

    uf.finalize();
    let mut rep_index: BTreeMap<EdgeKey, u32> = BTreeMap::new();
    for v in &vertices {
        let rep = uf.find(v.edge).expect("vertex edge was united");
        let next = rep_index.len() as u32;
        rep_index.entry(rep).or_insert(next);
    }
    // stable labels ordered by smallest member edge
    let component_ids: Vec<String> = rep_index
        .keys()
        .map(|rep| format!("{}-{}", rep.0, rep.1))
        .collect();
    let component_of: Vec<u32> = vertices
        .iter()
        .map(|v| rep_index[&uf.find(v.edge).expect("vertex edge was united")])
        .collect();

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("edge_count_violations".to_string(), violations);
    Ok(Isovolume {
        detections: vertices.len() as u64,
        vertices,
        tets,
        component_of,
        component_ids,
        diagnostics,
    })
}

/// Cuts every 4-element of one slab. Returns the cuts sorted by cell and
/// the number of elements whose crossed-edge count was not 0, 4, or 6.
fn cut_slab(
    mesh: &dyn SpacetimeMesh,
    tau: i32,
    level: f64,
    q_level: i64,
    cfg: &IsoConfig,
    lower: &ScalarLayer,
    upper: &ScalarLayer,
) -> Result<(Vec<CellCut>, u64)> {
    let verts_per_layer = mesh.verts_per_layer();
    let count = mesh.element_count(4, ElementKind::Interval, tau) as usize;
    let (mut cuts, bad) = (0..count)
        .into_par_iter()
        .with_min_len(1024)
        .try_fold(
            || (Vec::new(), 0u64, Vec::new()),
            |(mut acc, mut bad, mut verts): (Vec<CellCut>, u64, Vec<MeshVertex>),
             idx|
             -> Result<(Vec<CellCut>, u64, Vec<MeshVertex>)> {
                let cell = mesh.element_at(4, ElementKind::Interval, tau, idx as u64);
                mesh.vertices_into(cell, &mut verts)?;
                debug_assert_eq!(verts.len(), 5);
                let mut corner: [(u64, f64, [f64; 3], f64, i8); 5] =
                    [(0, 0.0, [0.0; 3], 0.0, 0); 5];
                for (slot, v) in verts.iter().enumerate() {
                    let data = if v.layer == tau { lower } else { upper };
                    let i = v.index as usize;
                    let sign = if cfg.use_sos {
                        sign_scalar_sos(data.q[i] - q_level)
                    } else if data.f[i] - level >= 0.0 {
                        1
                    } else {
                        -1
                    };
                    corner[slot] =
                        (v.global_id(verts_per_layer), data.f[i], v.position, v.layer as f64, sign);
                }
                corner.sort_unstable_by_key(|c| c.0);
                if let Some(cut) = cut_cell(idx as u64, &corner, level, &mut bad) {
                    acc.push(cut);
                }
                Ok((acc, bad, verts))
            },
        )
        .map(|r| r.map(|(acc, bad, _)| (acc, bad)))
        .try_reduce(
            || (Vec::new(), 0),
            |(mut a, ba), (mut b, bb)| {
                a.append(&mut b);
                Ok((a, ba + bb))
            },
        )?;
    cuts.sort_by_key(|c| c.cell_order);
    Ok((cuts, bad))
}

/// Applies the 1-vs-4 or 2-vs-3 cut to one 4-element with sorted corners
/// `(global id, value, position, time, side)`.
fn cut_cell(
    cell_order: u64,
    corner: &[(u64, f64, [f64; 3], f64, i8); 5],
    level: f64,
    bad: &mut u64,
) -> Option<CellCut> {
    let minus: Vec<usize> = (0..5).filter(|&i| corner[i].4 < 0).collect();
    let m = minus.len();
    if m == 0 || m == 5 {
        return None;
    }
    let (few, many): (Vec<usize>, Vec<usize>) = if m <= 2 {
        (minus.clone(), (0..5).filter(|&i| corner[i].4 > 0).collect())
    } else {
        ((0..5).filter(|&i| corner[i].4 > 0).collect(), minus.clone())
    };

    let cross = |i: usize, j: usize| -> (EdgeKey, IsoVertex) {
        // lower global id first, so both sides of a shared edge agree bitwise
        let (a, b) = if corner[i].0 < corner[j].0 { (i, j) } else { (j, i) };
        let mu = crossing_fraction(corner[a].1, corner[b].1, level);
        let mut position = [0.0; 3];
        for (x, p) in position.iter_mut().enumerate() {
            *p = corner[a].2[x] + mu * (corner[b].2[x] - corner[a].2[x]);
        }
        let time = corner[a].3 + mu * (corner[b].3 - corner[a].3);
        let key = (corner[a].0, corner[b].0);
        (key, IsoVertex { edge: key, position, time })
    };

    let mut cut = CellCut { cell_order, verts: Vec::new(), tets: Vec::new() };
    match few.len() {
        1 => {
            // one corner against four: a single tetrahedron
            let apex = few[0];
            let mut keys = [(0u64, 0u64); 4];
            for (slot, &o) in many.iter().enumerate() {
                let (key, v) = cross(apex, o);
                keys[slot] = key;
                cut.verts.push((key, v));
            }
            cut.tets.push(keys);
        }
        2 => {
            // two against three: a triangular prism, cut into three along
            // the diagonals implied by the corner-id order
            let (p0, p1) = (few[0], few[1]);
            let mut a = [(0u64, 0u64); 3];
            let mut b = [(0u64, 0u64); 3];
            for (slot, &o) in many.iter().enumerate() {
                let (key, v) = cross(p0, o);
                a[slot] = key;
                cut.verts.push((key, v));
                let (key, v) = cross(p1, o);
                b[slot] = key;
                cut.verts.push((key, v));
            }
            cut.tets.push([a[0], a[1], a[2], b[2]]);
            cut.tets.push([a[0], a[1], b[1], b[2]]);
            cut.tets.push([a[0], b[0], b[1], b[2]]);
        }
        _ => {
            *bad += 1;
            return None;
        }
    }
    Some(cut)
}

/// Cuts a single 4-simplex by the level set of its linear interpolant and
/// returns the crossing points (as `[x, y, z, t]`) plus the tetrahedra
/// tiling the intersection solid, exactly as the full sweep would emit
/// them. Corner index doubles as the vertex id that picks cut diagonals;
/// values equal to `level` count as above. Exposed so the 1-vs-4 and
/// 2-vs-3 splits can be stress-tested cell by cell.
pub fn split_level_cell(
    corners: &[[f64; 4]; 5],
    values: &[f64; 5],
    level: f64,
) -> (Vec<[f64; 4]>, Vec<[u32; 4]>) {
    let mut cell: [(u64, f64, [f64; 3], f64, i8); 5] = [(0, 0.0, [0.0; 3], 0.0, 0); 5];
    for i in 0..5 {
        let side = if values[i] - level >= 0.0 { 1 } else { -1 };
        let p = corners[i];
        cell[i] = (i as u64, values[i], [p[0], p[1], p[2]], p[3], side);
    }
    let mut bad = 0;
    let Some(cut) = cut_cell(0, &cell, level, &mut bad) else {
        return (Vec::new(), Vec::new());
    };
    let mut order: Vec<EdgeKey> = cut.verts.iter().map(|(k, _)| *k).collect();
    order.sort_unstable();
    order.dedup();
    let index = |k: &EdgeKey| order.binary_search(k).expect("every key was collected") as u32;
    let mut points = vec![[0.0; 4]; order.len()];
    for (k, v) in &cut.verts {
        points[index(k) as usize] = [v.position[0], v.position[1], v.position[2], v.time];
    }
    let tets = cut.tets.iter().map(|t| [index(&t[0]), index(&t[1]), index(&t[2]), index(&t[3])]).collect();
    (points, tets)
}

/// Intersects the swept volume with the time plane `t = at` (layer units)
/// by marching its tetrahedra. Corners exactly on the plane count as
/// "above", so flat tetrahedra lying in the plane emit nothing and their
/// below-plane neighbors emit the shared facet exactly once. At the
/// earliest time of the volume there is no below-plane neighbor, so there
/// (and only there) ties count as "below" and the cap comes from above.
pub fn slice_isovolume(vol: &Isovolume, at: f64) -> SliceMesh {
    let mut index: HashMap<(u32, u32), u32> = HashMap::new();
    let mut vertices: Vec<[f64; 3]> = Vec::new();
    let mut component_of: Vec<u32> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();

    let t_min = vol.vertices.iter().map(|v| v.time).fold(f64::INFINITY, f64::min);
    let tie: i8 = if at <= t_min { -1 } else { 1 };
    for tet in &vol.tets {
        let side = |v: u32| -> i8 {
            let t = vol.vertices[v as usize].time;
            if t > at {
                1
            } else if t < at {
                -1
            } else {
                tie
            }
        };
        let above: Vec<u32> = tet.iter().copied().filter(|&v| side(v) > 0).collect();
        let below: Vec<u32> = tet.iter().copied().filter(|&v| side(v) < 0).collect();
        if above.is_empty() || below.is_empty() {
            continue;
        }
        let mut point = |a: u32, b: u32| -> u32 {
            let (va, vb) = (&vol.vertices[a as usize], &vol.vertices[b as usize]);
            let mu = (at - va.time) / (vb.time - va.time);
            // a crossing at an endpoint collapses onto that tet corner, so
            // every incident tetrahedron maps it to the same slice vertex
            let key = if mu <= 0.0 {
                (a, a)
            } else if mu >= 1.0 {
                (b, b)
            } else if a < b {
                (a, b)
            } else {
                (b, a)
            };
            *index.entry(key).or_insert_with(|| {
                let p = if key.0 == key.1 {
                    vol.vertices[key.0 as usize].position
                } else {
                    let mut p = [0.0; 3];
                    for (x, slot) in p.iter_mut().enumerate() {
                        *slot = va.position[x] + mu * (vb.position[x] - va.position[x]);
                    }
                    p
                };
                vertices.push(p);
                component_of.push(vol.component_of[a as usize]);
                (vertices.len() - 1) as u32
            })
        };
        match (above.len(), below.len()) {
            (1, 3) => {
                let t = [point(above[0], below[0]), point(above[0], below[1]), point(above[0], below[2])];
                push_triangle(&mut triangles, t);
            }
            (3, 1) => {
                let t = [point(above[0], below[0]), point(above[1], below[0]), point(above[2], below[0])];
                push_triangle(&mut triangles, t);
            }
            (2, 2) => {
                let q00 = point(above[0], below[0]);
                let q01 = point(above[0], below[1]);
                let q10 = point(above[1], below[0]);
                let q11 = point(above[1], below[1]);
                push_triangle(&mut triangles, [q00, q01, q11]);
                push_triangle(&mut triangles, [q00, q11, q10]);
            }
            _ => unreachable!("tetrahedron sides are binary"),
        }
    }
    SliceMesh { time: at, vertices, triangles, component_of }
}

/// Drops triangles that collapsed to fewer than 3 distinct vertices (the
/// slice plane passing exactly through shared corners).
fn push_triangle(out: &mut Vec<[u32; 3]>, t: [u32; 3]) {
    if t[0] != t[1] && t[1] != t[2] && t[0] != t[2] {
        out.push(t);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::regular::RegularSpacetimeMesh;
    use crate::synthetic::moving_plane;
    use std::collections::HashMap;

    fn scalar_field(
        dims: [usize; 3],
        timesteps: usize,
        f: impl Fn([f64; 3], f64) -> f64,
    ) -> TimeSeriesField {
        let total = dims.iter().product();
        let mut field = TimeSeriesField::new(total, 1);
        for layer in 0..timesteps {
            let mut data = Vec::with_capacity(total);
            for z in 0..dims[2] {
                for y in 0..dims[1] {
                    for x in 0..dims[0] {
                        data.push(f([x as f64, y as f64, z as f64], layer as f64));
                    }
                }
            }
            field.push_layer(data).unwrap();
        }
        field
    }

    /// Each interior triangle face of the volume must be shared by exactly
    /// two tetrahedra; boundary faces appear once.
    fn face_counts(vol: &Isovolume) -> HashMap<[u32; 3], u32> {
        let mut faces: HashMap<[u32; 3], u32> = HashMap::new();
        for t in &vol.tets {
            for drop in 0..4 {
                let mut f: Vec<u32> =
                    (0..4).filter(|&i| i != drop).map(|i| t[i]).collect();
                f.sort_unstable();
                *faces.entry([f[0], f[1], f[2]]).or_default() += 1;
            }
        }
        faces
    }

    #[test]
    fn moving_plane_sweeps_an_exact_hyperplane() {
        let dims = [8, 6, 4];
        let steps = 3;
        let alpha = 0.9;
        let mesh = RegularSpacetimeMesh::new(&dims, steps).unwrap();
        let field = moving_plane(dims, alpha, steps);
        let vol = track_isosurface(&mesh, &field, 0.0, &IsoConfig::default()).unwrap();
        assert_eq!(vol.diagnostics["edge_count_violations"], 0);
        assert!(!vol.tets.is_empty());
        assert_eq!(vol.component_ids.len(), 1);
        for v in &vol.vertices {
            assert!(
                (v.position[0] - alpha * v.time).abs() < 1e-9,
                "vertex off the plane: {:?} t={}",
                v.position,
                v.time
            );
        }
        // interior faces shared by two tets, single watertight sheet
        for (_, c) in face_counts(&vol) {
            assert!(c <= 2);
        }
        let slice = slice_isovolume(&vol, 1.0);
        assert!(!slice.triangles.is_empty());
        for p in &slice.vertices {
            assert!((p[0] - alpha).abs() < 1e-9, "slice not planar: {p:?}");
        }
    }

    #[test]
    fn slices_at_both_temporal_caps_are_emitted_once() {
        let dims = [8, 6, 4];
        let steps = 3;
        let mesh = RegularSpacetimeMesh::new(&dims, steps).unwrap();
        let field = moving_plane(dims, 0.9, steps);
        let vol = track_isosurface(&mesh, &field, 0.0, &IsoConfig::default()).unwrap();
        for at in [0.0, (steps - 1) as f64] {
            let slice = slice_isovolume(&vol, at);
            assert!(!slice.triangles.is_empty(), "cap at t={at} missing");
            for p in &slice.vertices {
                assert!((p[0] - 0.9 * at).abs() < 1e-9);
            }
            // manifold: each slice edge borders at most two triangles
            let mut edges: HashMap<(u32, u32), u32> = HashMap::new();
            for t in &slice.triangles {
                for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
                    let key = (a.min(b), a.max(b));
                    *edges.entry(key).or_default() += 1;
                }
            }
            for (_, c) in edges {
                assert!(c <= 2, "non-manifold slice edge");
            }
        }
    }

    #[test]
    fn sphere_slice_area_matches_the_analytic_value() {
        let dims = [24, 24, 24];
        let c = [11.3, 11.6, 11.4];
        let r = 8.2;
        let mesh = RegularSpacetimeMesh::new(&dims, 2).unwrap();
        let field = scalar_field(dims, 2, |p, _| {
            ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2)).sqrt()
        });
        let vol = track_isosurface(&mesh, &field, r, &IsoConfig::default()).unwrap();
        assert_eq!(vol.component_ids.len(), 1);
        let slice = slice_isovolume(&vol, 0.0);
        let mut area = 0.0;
        for t in &slice.triangles {
            let (a, b, c) =
                (slice.vertices[t[0] as usize], slice.vertices[t[1] as usize], slice.vertices[t[2] as usize]);
            let u = [b[0] - a[0], b[1] - a[1], b[2] - a[2]];
            let v = [c[0] - a[0], c[1] - a[1], c[2] - a[2]];
            let n = [
                u[1] * v[2] - u[2] * v[1],
                u[2] * v[0] - u[0] * v[2],
                u[0] * v[1] - u[1] * v[0],
            ];
            area += 0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        }
        let exact = 4.0 * std::f64::consts::PI * r * r;
        assert!(
            (area - exact).abs() / exact < 0.05,
            "sphere area {area} vs {exact}"
        );
    }

    #[test]
    fn disjoint_level_sets_get_distinct_components() {
        let dims = [16, 12, 12];
        let c1 = [3.4, 5.6, 5.5];
        let c2 = [11.6, 5.6, 5.5];
        let mesh = RegularSpacetimeMesh::new(&dims, 2).unwrap();
        let dist = |p: [f64; 3], c: [f64; 3]| {
            ((p[0] - c[0]).powi(2) + (p[1] - c[1]).powi(2) + (p[2] - c[2]).powi(2)).sqrt()
        };
        let field = scalar_field(dims, 2, |p, _| dist(p, c1).min(dist(p, c2)));
        let vol = track_isosurface(&mesh, &field, 2.3, &IsoConfig::default()).unwrap();
        assert_eq!(vol.component_ids.len(), 2);
        let slice = slice_isovolume(&vol, 0.5);
        let mut seen: Vec<u32> = slice.component_of.clone();
        seen.sort_unstable();
        seen.dedup();
        assert_eq!(seen.len(), 2, "slice must carry both component labels");
    }

    #[test]
    fn level_through_lattice_vertices_stays_watertight() {
        let dims = [7, 5, 4];
        let steps = 2;
        let mesh = RegularSpacetimeMesh::new(&dims, steps).unwrap();
        // the level set x = 3 passes exactly through a vertex plane
        let field = scalar_field(dims, steps, |p, _| p[0] - 3.0);
        let vol = track_isosurface(&mesh, &field, 0.0, &IsoConfig::default()).unwrap();
        assert_eq!(vol.diagnostics["edge_count_violations"], 0);
        assert!(!vol.tets.is_empty());
        for v in &vol.vertices {
            assert_eq!(v.position[0], 3.0, "crossing must sit on the vertex plane");
        }
        for (_, c) in face_counts(&vol) {
            assert!(c <= 2);
        }
    }

    #[test]
    fn constant_field_produces_nothing() {
        let dims = [5, 5, 5];
        let mesh = RegularSpacetimeMesh::new(&dims, 2).unwrap();
        let field = scalar_field(dims, 2, |_, _| 1.0);
        let vol = track_isosurface(&mesh, &field, 0.0, &IsoConfig::default()).unwrap();
        assert_eq!(vol.detections, 0);
        assert!(vol.tets.is_empty());
        let slice = slice_isovolume(&vol, 0.5);
        assert!(slice.triangles.is_empty());
    }

    #[test]
    fn repeated_runs_are_identical() {
        let dims = [10, 9, 8];
        let mesh = RegularSpacetimeMesh::new(&dims, 3).unwrap();
        let field = scalar_field(dims, 3, |p, t| {
            ((p[0] - 4.5 - 0.3 * t).powi(2) + (p[1] - 4.2).powi(2) + (p[2] - 3.8).powi(2)).sqrt()
                - 2.7
        });
        let a = track_isosurface(&mesh, &field, 0.0, &IsoConfig::default()).unwrap();
        let b = track_isosurface(&mesh, &field, 0.0, &IsoConfig::default()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn wrong_inputs_are_rejected() {
        let mesh = RegularSpacetimeMesh::new(&[4, 4, 4], 2).unwrap();
        let mut vector = TimeSeriesField::new(64, 2);
        vector.push_layer(vec![0.0; 128]).unwrap();
        vector.push_layer(vec![0.0; 128]).unwrap();
        assert!(track_isosurface(&mesh, &vector, 0.0, &IsoConfig::default()).is_err());

        let single = RegularSpacetimeMesh::new(&[4, 4, 4], 1).unwrap();
        let mut f = TimeSeriesField::new(64, 1);
        f.push_layer(vec![0.0; 64]).unwrap();
        assert!(track_isosurface(&single, &f, 0.0, &IsoConfig::default()).is_err());
    }
}
