//! Tracking phase vortices of a complex (or angle-valued) scalar field in
//! three spatial dimensions.
//!
//! The phase is quantized to integer turns at 30 fractional bits; the
//! winding of a triangle is then an exact integer in {-1, 0, +1}, computed
//! from wrapped phase differences in ascending-vertex-id order. Pierced
//! triangles are the vortex samples: per time layer they chain into curves
//! through tetrahedra, and across the whole spacetime mesh they join into
//! surface components through the section polygons of the 4-dimensional
//! elements.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;

use crate::components::Components;
use crate::error::{Error, Result};
use crate::exact::bary::zero_barycentric;
use crate::field::TimeSeriesField;
use crate::handle::ElementHandle;
use crate::mesh::{ElementKind, MeshVertex, SpacetimeMesh};
use crate::track::chain::{assemble, Link};

/// Fractional bits of a turn used for exact winding arithmetic.
pub const PHASE_BITS: u32 = 30;
const FULL_TURN: i64 = 1 << PHASE_BITS;
const HALF_TURN: i64 = FULL_TURN / 2;

/// Input samples: either the phase itself or the complex value it is the
/// argument of.
pub enum PhaseField<'a> {
    /// One component per sample: the phase in radians.
    Angle(&'a TimeSeriesField),
    /// Two components per sample: (re, im); the phase is their argument.
    Complex(&'a TimeSeriesField),
}

/// One pierced triangle: a point of the vortex structure.
#[derive(Clone, Debug, PartialEq)]
pub struct VortexPoint {
    pub handle: ElementHandle,
    /// Interpolated core position (mesh coordinates).
    pub position: [f64; 3],
    /// Time in layer units.
    pub time: f64,
    /// Exact winding in ascending-vertex-id orientation.
    pub winding: i8,
}

/// Polyline of vortex-core samples in a single time layer.
#[derive(Clone, Debug, PartialEq)]
pub struct VortexCurve {
    /// Token of the spacetime surface component the curve belongs to.
    pub surface_id: String,
    pub layer: i32,
    pub points: Vec<VortexPoint>,
    pub closed: bool,
}

/// Triangulated spacetime sheet swept by one vortex line.
#[derive(Clone, Debug, PartialEq)]
pub struct VortexSurface {
    pub id: String,
    /// Unique pierced triangles of the component, ascending handle.
    pub points: Vec<VortexPoint>,
    /// Fan triangles over the section polygons, indices into `points`.
    pub triangles: Vec<[u32; 3]>,
}

#[derive(Clone, Debug)]
pub struct VortexResult {
    pub surfaces: Vec<VortexSurface>,
    /// Per-layer core polylines, labeled by surface component.
    pub curves: Vec<VortexCurve>,
    pub detections: u64,
    /// `parity_violations`: elements whose boundary shows an odd number of
    /// pierced faces (impossible for exact windings, so always 0 unless the
    /// input is inconsistent). `crowded_cells`: tetrahedra crossed by more
    /// than one line. `barycenter_fallbacks`: degenerate core locations.
    pub diagnostics: BTreeMap<String, u64>,
}

/// Quantized phase and interpolation-ready 2-vectors for one layer.
struct PhaseLayer {
    q: Vec<i64>,
    /// (re, im) or (cos θ, sin θ) per sample.
    wave: Vec<[f64; 2]>,
}

#[derive(Clone, Debug)]
struct Piercing {
    handle: ElementHandle,
    position: [f64; 3],
    time: f64,
    winding: i8,
    ordinal_layer: Option<i32>,
    fallback: bool,
}

/// Tracks phase vortices over the whole series. The mesh must have three
/// spatial dimensions.
pub fn track_vortex(mesh: &dyn SpacetimeMesh, field: &PhaseField) -> Result<VortexResult> {
    if mesh.spatial_dim() != 3 {
        return Err(Error::Config(format!(
            "vortex tracking needs a 3-dimensional domain, got {}",
            mesh.spatial_dim()
        )));
    }
    let series = match field {
        PhaseField::Angle(f) => {
            if f.components() != 1 {
                return Err(Error::Config("phase input must have 1 component".into()));
            }
            *f
        }
        PhaseField::Complex(f) => {
            if f.components() != 2 {
                return Err(Error::Config("complex input must have 2 components".into()));
            }
            *f
        }
    };
    if series.samples_per_layer() as u64 != mesh.verts_per_layer() {
        return Err(Error::Config(format!(
            "field has {} samples per layer, mesh has {} vertices",
            series.samples_per_layer(),
            mesh.verts_per_layer()
        )));
    }
    if series.timesteps() != mesh.timesteps() {
        return Err(Error::Config(format!(
            "field has {} layers, mesh has {} time steps",
            series.timesteps(),
            mesh.timesteps()
        )));
    }

    let steps = mesh.timesteps();
    let mut detections: Vec<Piercing> = Vec::new();
    let mut claimed: HashSet<ElementHandle> = HashSet::new();
    let mut curve_links: Vec<(i32, Link)> = Vec::new();
    let mut surface_links: Vec<Link> = Vec::new();
    let mut polygons: Vec<Vec<ElementHandle>> = Vec::new();
    let mut parity = 0u64;
    let mut crowded = 0u64;

    let register = |batch: Vec<Piercing>,
                        detections: &mut Vec<Piercing>,
                        claimed: &mut HashSet<ElementHandle>| {
        claimed.extend(batch.iter().map(|p| p.handle));
        detections.extend(batch);
    };

    let mut lower = build_phase_layer(field, 0)?;
    let batch = pierce_sweep(mesh, ElementKind::Ordinal, 0, &lower, None)?;
    register(batch, &mut detections, &mut claimed);
    {
        let (links, odd) = pair_in_tets(mesh, ElementKind::Ordinal, 0, &claimed)?;
        parity += odd.0;
        crowded += odd.1;
        curve_links.extend(links.into_iter().map(|l| (0, l)));
    }

    for tau in 0..steps.saturating_sub(1) as i32 {
        let upper = build_phase_layer(field, tau as usize + 1)?;
        let batch = pierce_sweep(mesh, ElementKind::Interval, tau, &lower, Some(&upper))?;
        register(batch, &mut detections, &mut claimed);
        let batch = pierce_sweep(mesh, ElementKind::Ordinal, tau + 1, &upper, None)?;
        register(batch, &mut detections, &mut claimed);

        let (links, odd) = pair_in_tets(mesh, ElementKind::Ordinal, tau + 1, &claimed)?;
        parity += odd.0;
        crowded += odd.1;
        curve_links.extend(links.into_iter().map(|l| (tau + 1, l)));

        let sections = section_sweep(mesh, tau, &claimed)?;
        parity += sections.parity;
        crowded += sections.crowded;
        surface_links.extend(sections.links);
        polygons.extend(sections.polygons);

        lower = upper;
    }

    let fallbacks = detections.iter().filter(|d| d.fallback).count() as u64;
    detections.sort_by_key(|d| d.handle);
    let by_handle: HashMap<ElementHandle, usize> =
        detections.iter().enumerate().map(|(i, d)| (d.handle, i)).collect();

    // connected components over all pierced triangles
    let mut uf: Components<ElementHandle> = Components::new();
    for d in &detections {
        uf.insert(d.handle)?;
    }
    for l in &surface_links {
        uf.unite([l.a, l.b])?;
    }
    for (_, l) in &curve_links {
        uf.unite([l.a, l.b])?;
    }
    uf.finalize();

    let surfaces = build_surfaces(&detections, &mut uf, &polygons)?;
    let curves = build_curves(&detections, &by_handle, &mut uf, curve_links)?;

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("parity_violations".to_string(), parity);
    diagnostics.insert("crowded_cells".to_string(), crowded);
    diagnostics.insert("barycenter_fallbacks".to_string(), fallbacks);
    Ok(VortexResult {
        surfaces,
        curves,
        detections: detections.len() as u64,
        diagnostics,
    })
}

fn build_phase_layer(field: &PhaseField, layer: usize) -> Result<PhaseLayer> {
    let scale = FULL_TURN as f64;
    match field {
        PhaseField::Angle(f) => {
            let data = f.layer(layer);
            let mut q = Vec::with_capacity(data.len());
            let mut wave = Vec::with_capacity(data.len());
            for &theta in data {
                let turns = theta / std::f64::consts::TAU;
                if !turns.is_finite() {
                    return Err(Error::Numerical(format!(
                        "non-finite phase sample in layer {layer}"
                    )));
                }
                q.push((turns * scale).round() as i64);
                wave.push([theta.cos(), theta.sin()]);
            }
            Ok(PhaseLayer { q, wave })
        }
        PhaseField::Complex(f) => {
            let data = f.layer(layer);
            let samples = data.len() / 2;
            let mut q = Vec::with_capacity(samples);
            let mut wave = Vec::with_capacity(samples);
            for i in 0..samples {
                let (re, im) = (data[2 * i], data[2 * i + 1]);
                let turns = im.atan2(re) / std::f64::consts::TAU;
                if !turns.is_finite() {
                    return Err(Error::Numerical(format!(
                        "non-finite complex sample in layer {layer}"
                    )));
                }
                q.push((turns * scale).round() as i64);
                wave.push([re, im]);
            }
            Ok(PhaseLayer { q, wave })
        }
    }
}

/// Wrapped phase difference in quantized turns, in (-half, half].
fn phase_shift(from: i64, to: i64) -> i64 {
    let m = (to - from).rem_euclid(FULL_TURN);
    if m > HALF_TURN {
        m - FULL_TURN
    } else {
        m
    }
}

/// Tests every triangle of one kind in one layer for a threading vortex.
fn pierce_sweep(
    mesh: &dyn SpacetimeMesh,
    kind: ElementKind,
    layer: i32,
    lower: &PhaseLayer,
    upper: Option<&PhaseLayer>,
) -> Result<Vec<Piercing>> {
    let verts_per_layer = mesh.verts_per_layer();
    let count = mesh.element_count(2, kind, layer) as usize;
    let ordinal_layer = match kind {
        ElementKind::Ordinal => Some(layer),
        _ => None,
    };
    let mut found = (0..count)
        .into_par_iter()
        .with_min_len(2048)
        .try_fold(
            || (Vec::new(), Vec::new()),
            |(mut acc, mut verts): (Vec<Piercing>, Vec<MeshVertex>),
             idx|
             -> Result<(Vec<Piercing>, Vec<MeshVertex>)> {
                let h = mesh.element_at(2, kind, layer, idx as u64);
                mesh.vertices_into(h, &mut verts)?;
                let mut rows: [(u64, i64, [f64; 2], [f64; 3], f64); 3] =
                    [(0, 0, [0.0; 2], [0.0; 3], 0.0); 3];
                for (slot, v) in verts.iter().enumerate() {
                    let data = if v.layer == layer {
                        lower
                    } else {
                        upper.expect("vertex above an ordinal sweep layer")
                    };
                    let i = v.index as usize;
                    rows[slot] =
                        (v.global_id(verts_per_layer), data.q[i], data.wave[i], v.position, v.layer as f64);
                }
                rows.sort_unstable_by_key(|r| r.0);
                let sum = phase_shift(rows[0].1, rows[1].1)
                    + phase_shift(rows[1].1, rows[2].1)
                    + phase_shift(rows[2].1, rows[0].1);
                debug_assert_eq!(sum % FULL_TURN, 0);
                let winding = (sum / FULL_TURN) as i8;
                if winding != 0 {
                    let values: Vec<[f64; 3]> =
                        rows.iter().map(|r| [r.2[0], r.2[1], 0.0]).collect();
                    let (mu, fallback) = match zero_barycentric(&values, 2) {
                        Some(mu) => (mu, false),
                        None => (vec![1.0 / 3.0; 3], true),
                    };
                    let mut position = [0.0; 3];
                    let mut time = 0.0;
                    for (w, r) in mu.iter().zip(&rows) {
                        for a in 0..3 {
                            position[a] += w * r.3[a];
                        }
                        time += w * r.4;
                    }
                    acc.push(Piercing { handle: h, position, time, winding, ordinal_layer, fallback });
                }
                Ok((acc, verts))
            },
        )
        .map(|r| r.map(|(acc, _)| acc))
        .try_reduce(Vec::new, |mut a, mut b| {
            a.append(&mut b);
            Ok(a)
        })?;
    found.sort_by_key(|d| d.handle);
    Ok(found)
}

/// Pairs pierced faces through tetrahedra of one kind/layer: a line enters
/// and leaves each cell, so 0 or 2 pierced faces are expected. Returns the
/// links plus (parity violations, crowded cells).
fn pair_in_tets(
    mesh: &dyn SpacetimeMesh,
    kind: ElementKind,
    layer: i32,
    claimed: &HashSet<ElementHandle>,
) -> Result<(Vec<Link>, (u64, u64))> {
    let count = mesh.element_count(3, kind, layer) as usize;
    (0..count)
        .into_par_iter()
        .with_min_len(2048)
        .try_fold(
            || (Vec::new(), 0u64, 0u64, Vec::new()),
            |(mut links, mut parity, mut crowded, mut sides), idx| -> Result<(
                Vec<Link>,
                u64,
                u64,
                Vec<ElementHandle>,
            )> {
                let tet = mesh.element_at(3, kind, layer, idx as u64);
                mesh.sides_into(tet, &mut sides)?;
                let mut hit = [tet; 2];
                let mut hits = 0usize;
                for &s in sides.iter() {
                    if claimed.contains(&s) {
                        if hits < 2 {
                            hit[hits] = s;
                        }
                        hits += 1;
                    }
                }
                match hits {
                    0 => {}
                    2 => links.push(Link::new(hit[0], hit[1], tet)),
                    x if x % 2 == 1 => parity += 1,
                    _ => crowded += 1,
                }
                Ok((links, parity, crowded, sides))
            },
        )
        .map(|r| r.map(|(l, p, c, _)| (l, p, c)))
        .try_reduce(
            || (Vec::new(), 0, 0),
            |(mut la, pa, ca), (mut lb, pb, cb)| {
                la.append(&mut lb);
                Ok((la, pa + pb, ca + cb))
            },
        )
        .map(|(l, p, c)| (l, (p, c)))
}

struct Sections {
    links: Vec<Link>,
    polygons: Vec<Vec<ElementHandle>>,
    parity: u64,
    crowded: u64,
}

/// Intersects the vortex surface with every 4-dimensional element of one
/// slab: pierced triangles are the section-polygon vertices, boundary
/// tetrahedra with two pierced faces its edges.
fn section_sweep(
    mesh: &dyn SpacetimeMesh,
    tau: i32,
    claimed: &HashSet<ElementHandle>,
) -> Result<Sections> {
    let count = mesh.element_count(4, ElementKind::Interval, tau) as usize;
    let folded = (0..count)
        .into_par_iter()
        .with_min_len(512)
        .try_fold(
            || (Sections { links: Vec::new(), polygons: Vec::new(), parity: 0, crowded: 0 }, Vec::new(), Vec::new()),
            |(mut acc, mut tets, mut tris): (Sections, Vec<ElementHandle>, Vec<ElementHandle>),
             idx|
             -> Result<(Sections, Vec<ElementHandle>, Vec<ElementHandle>)> {
                let cell = mesh.element_at(4, ElementKind::Interval, tau, idx as u64);
                mesh.sides_into(cell, &mut tets)?;
                let mut edges: Vec<(ElementHandle, ElementHandle, ElementHandle)> = Vec::new();
                let mut pierced: Vec<ElementHandle> = Vec::new();
                for t in 0..tets.len() {
                    let tet = tets[t];
                    mesh.sides_into(tet, &mut tris)?;
                    let mut hit = [tet; 2];
                    let mut hits = 0usize;
                    for &s in tris.iter() {
                        if claimed.contains(&s) {
                            pierced.push(s);
                            if hits < 2 {
                                hit[hits] = s;
                            }
                            hits += 1;
                        }
                    }
                    match hits {
                        0 => {}
                        2 => edges.push((hit[0], hit[1], tet)),
                        x if x % 2 == 1 => acc.parity += 1,
                        _ => acc.crowded += 1,
                    }
                }
                if !pierced.is_empty() {
                    pierced.sort_unstable();
                    pierced.dedup();
                    for &(a, b, via) in &edges {
                        acc.links.push(Link::new(a, b, via));
                    }
                    walk_polygons(&pierced, &edges, &mut acc.polygons, &mut acc.parity);
                }
                Ok((acc, tets, tris))
            },
        )
        .map(|r| r.map(|(acc, _, _)| acc))
        .try_reduce(
            || Sections { links: Vec::new(), polygons: Vec::new(), parity: 0, crowded: 0 },
            |mut a, mut b| {
                a.links.append(&mut b.links);
                a.polygons.append(&mut b.polygons);
                a.parity += b.parity;
                a.crowded += b.crowded;
                Ok(a)
            },
        )?;
    let mut sections = folded;
    // deterministic order independent of the parallel split
    sections.links.sort_unstable();
    sections.links.dedup();
    sections.polygons.sort();
    Ok(sections)
}

/// Walks the section edges into closed polygons, lowest handle first.
/// Non-closing walks count as parity violations and are dropped.
fn walk_polygons(
    pierced: &[ElementHandle],
    edges: &[(ElementHandle, ElementHandle, ElementHandle)],
    out: &mut Vec<Vec<ElementHandle>>,
    parity: &mut u64,
) {
    let mut adjacency: HashMap<ElementHandle, Vec<usize>> = HashMap::new();
    for (i, &(a, b, _)) in edges.iter().enumerate() {
        adjacency.entry(a).or_default().push(i);
        adjacency.entry(b).or_default().push(i);
    }
    let mut used = vec![false; edges.len()];
    for &start in pierced {
        let Some(inc) = adjacency.get(&start) else { continue };
        for &first in inc {
            if used[first] {
                continue;
            }
            let mut cycle = vec![start];
            let mut at = start;
            let mut edge = first;
            let closed = loop {
                used[edge] = true;
                let (a, b, _) = edges[edge];
                at = if a == at { b } else { a };
                if at == start {
                    break true;
                }
                cycle.push(at);
                let Some(inc) = adjacency.get(&at) else { break false };
                if inc.len() != 2 {
                    break false;
                }
                let next = if inc[0] == edge { inc[1] } else { inc[0] };
                if used[next] {
                    break false;
                }
                edge = next;
            };
            if closed && cycle.len() >= 3 {
                // canonical direction: second node smaller than last
                if cycle[1] > cycle[cycle.len() - 1] {
                    cycle[1..].reverse();
                }
                out.push(cycle);
            } else {
                *parity += 1;
            }
        }
    }
}

fn build_surfaces(
    detections: &[Piercing],
    uf: &mut Components<ElementHandle>,
    polygons: &[Vec<ElementHandle>],
) -> Result<Vec<VortexSurface>> {
    let mut grouped: BTreeMap<ElementHandle, (Vec<u32>, Vec<[u32; 3]>)> = BTreeMap::new();
    let mut local: HashMap<ElementHandle, u32> = HashMap::new();

    // points per component, ascending handle (detections are sorted)
    for (i, d) in detections.iter().enumerate() {
        let rep = uf.find(d.handle).expect("detection was inserted");
        let entry = grouped.entry(rep).or_default();
        local.insert(d.handle, entry.0.len() as u32);
        entry.0.push(i as u32);
    }
    for poly in polygons {
        let rep = uf.find(poly[0]).expect("polygon vertex was inserted");
        let entry = grouped.entry(rep).or_default();
        let anchor = local[&poly[0]];
        for w in 1..poly.len() - 1 {
            entry.1.push([anchor, local[&poly[w]], local[&poly[w + 1]]]);
        }
    }

    let mut surfaces = Vec::with_capacity(grouped.len());
    for (rep, (point_ids, triangles)) in grouped {
        let points = point_ids
            .iter()
            .map(|&i| {
                let d = &detections[i as usize];
                VortexPoint {
                    handle: d.handle,
                    position: d.position,
                    time: d.time,
                    winding: d.winding,
                }
            })
            .collect();
        surfaces.push(VortexSurface { id: rep.to_token(), points, triangles });
    }
    Ok(surfaces)
}

fn build_curves(
    detections: &[Piercing],
    by_handle: &HashMap<ElementHandle, usize>,
    uf: &mut Components<ElementHandle>,
    curve_links: Vec<(i32, Link)>,
) -> Result<Vec<VortexCurve>> {
    let mut per_layer: BTreeMap<i32, Vec<Link>> = BTreeMap::new();
    for (layer, link) in curve_links {
        per_layer.entry(layer).or_default().push(link);
    }
    let mut nodes_per_layer: BTreeMap<i32, Vec<ElementHandle>> = BTreeMap::new();
    for d in detections {
        if let Some(layer) = d.ordinal_layer {
            nodes_per_layer.entry(layer).or_default().push(d.handle);
        }
    }

    let mut curves = Vec::new();
    for (layer, nodes) in nodes_per_layer {
        let links = per_layer.remove(&layer).unwrap_or_default();
        let set = assemble(&nodes, links)?;
        for chain in set.chains {
            let surface_id = uf
                .find(chain.nodes[0])
                .expect("curve node was inserted")
                .to_token();
            let points = chain
                .nodes
                .iter()
                .map(|h| {
                    let d = &detections[by_handle[h]];
                    VortexPoint {
                        handle: d.handle,
                        position: d.position,
                        time: d.time,
                        winding: d.winding,
                    }
                })
                .collect();
            curves.push(VortexCurve { surface_id, layer, points, closed: chain.closed });
        }
    }
    Ok(curves)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::regular::RegularSpacetimeMesh;
    use crate::synthetic::{line_vortex, line_vortex_center};

    /// Phase of a product of unit vortices: one angle per line, summed and
    /// wrapped back to (-pi, pi].
    fn multi_line_field(
        dims: [usize; 3],
        centers: &[[f64; 2]],
        timesteps: usize,
    ) -> TimeSeriesField {
        let total = dims.iter().product();
        let mut field = TimeSeriesField::new(total, 1);
        for _ in 0..timesteps {
            let mut data = Vec::with_capacity(total);
            for _z in 0..dims[2] {
                for y in 0..dims[1] {
                    for x in 0..dims[0] {
                        let theta: f64 = centers
                            .iter()
                            .map(|c| (y as f64 - c[1]).atan2(x as f64 - c[0]))
                            .sum();
                        let tau = std::f64::consts::TAU;
                        let wrapped = (theta + std::f64::consts::PI).rem_euclid(tau)
                            - std::f64::consts::PI;
                        data.push(wrapped);
                    }
                }
            }
            field.push_layer(data).unwrap();
        }
        field
    }

    fn clean(result: &VortexResult) {
        assert_eq!(result.diagnostics["parity_violations"], 0);
        assert_eq!(result.diagnostics["crowded_cells"], 0);
    }

    #[test]
    fn static_line_gives_one_surface_and_one_curve_per_layer() {
        let dims = [8, 8, 8];
        let steps = 3;
        let mesh = RegularSpacetimeMesh::new(&dims, steps).unwrap();
        let field = line_vortex(dims, [3.4, 4.2], [0.0, 0.0], steps);
        let out = track_vortex(&mesh, &PhaseField::Angle(&field)).unwrap();
        clean(&out);
        assert_eq!(out.surfaces.len(), 1, "one vortex line, one surface");
        assert!(!out.surfaces[0].triangles.is_empty());
        for layer in 0..steps as i32 {
            let at: Vec<_> = out.curves.iter().filter(|c| c.layer == layer).collect();
            assert_eq!(at.len(), 1, "layer {layer} must hold one curve");
            let curve = at[0];
            assert!(!curve.closed);
            assert!(curve.points.len() >= dims[2] - 1);
            for p in &curve.points {
                let dx = p.position[0] - 3.4;
                let dy = p.position[1] - 4.2;
                assert!(
                    (dx * dx + dy * dy).sqrt() <= f64::sqrt(2.0),
                    "core sample strayed: {:?}",
                    p.position
                );
                assert_eq!(p.winding.abs(), 1);
            }
        }
        let id = &out.curves[0].surface_id;
        assert!(out.curves.iter().all(|c| &c.surface_id == id));
        assert_eq!(&out.surfaces[0].id, id);
    }

    #[test]
    fn parallel_lines_stay_disjoint() {
        let dims = [12, 12, 4];
        let steps = 2;
        let mesh = RegularSpacetimeMesh::new(&dims, steps).unwrap();
        // line centers off every lattice line, so no phase difference ties
        let field = multi_line_field(dims, &[[3.5, 6.3], [7.5, 6.3]], steps);
        let out = track_vortex(&mesh, &PhaseField::Angle(&field)).unwrap();
        clean(&out);
        assert_eq!(out.surfaces.len(), 2, "lines four cells apart must not merge");
        for layer in 0..steps as i32 {
            let at: Vec<_> = out.curves.iter().filter(|c| c.layer == layer).collect();
            assert_eq!(at.len(), 2, "two disjoint polylines per layer");
            assert_ne!(at[0].surface_id, at[1].surface_id);
        }
    }

    #[test]
    fn complex_input_locates_an_affine_core_exactly() {
        let dims = [8, 8, 3];
        let steps = 2;
        let (cx, cy) = (3.3, 4.6);
        let mesh = RegularSpacetimeMesh::new(&dims, steps).unwrap();
        let total: usize = dims.iter().product();
        let mut field = TimeSeriesField::new(total, 2);
        for _ in 0..steps {
            let mut data = Vec::with_capacity(total * 2);
            for _z in 0..dims[2] {
                for y in 0..dims[1] {
                    for x in 0..dims[0] {
                        data.push(x as f64 - cx);
                        data.push(y as f64 - cy);
                    }
                }
            }
            field.push_layer(data).unwrap();
        }
        let out = track_vortex(&mesh, &PhaseField::Complex(&field)).unwrap();
        clean(&out);
        assert_eq!(out.surfaces.len(), 1);
        assert_eq!(out.diagnostics["barycenter_fallbacks"], 0);
        for s in &out.surfaces {
            for p in &s.points {
                assert!((p.position[0] - cx).abs() < 1e-9, "{:?}", p.position);
                assert!((p.position[1] - cy).abs() < 1e-9, "{:?}", p.position);
            }
        }
    }

    #[test]
    fn moving_line_tracks_its_center() {
        let dims = [10, 10, 5];
        let steps = 3;
        let center = [4.3, 4.6];
        let velocity = [0.5, 0.25];
        let mesh = RegularSpacetimeMesh::new(&dims, steps).unwrap();
        let field = line_vortex(dims, center, velocity, steps);
        let out = track_vortex(&mesh, &PhaseField::Angle(&field)).unwrap();
        clean(&out);
        assert_eq!(out.surfaces.len(), 1, "a smoothly moving line is one surface");
        for layer in 0..steps as i32 {
            let at: Vec<_> = out.curves.iter().filter(|c| c.layer == layer).collect();
            assert_eq!(at.len(), 1);
            let c = line_vortex_center(center, velocity, layer as f64);
            for p in &at[0].points {
                let dx = p.position[0] - c[0];
                let dy = p.position[1] - c[1];
                assert!((dx * dx + dy * dy).sqrt() <= f64::sqrt(2.0));
            }
        }
    }

    #[test]
    fn uniform_phase_has_no_vortices() {
        let dims = [6, 6, 3];
        let mesh = RegularSpacetimeMesh::new(&dims, 2).unwrap();
        let total = dims.iter().product();
        let mut field = TimeSeriesField::new(total, 1);
        for _ in 0..2 {
            field.push_layer(vec![0.3; total]).unwrap();
        }
        let out = track_vortex(&mesh, &PhaseField::Angle(&field)).unwrap();
        assert_eq!(out.detections, 0);
        assert!(out.surfaces.is_empty() && out.curves.is_empty());
    }

    #[test]
    fn repeated_runs_are_identical() {
        let dims = [10, 10, 5];
        let steps = 3;
        let mesh = RegularSpacetimeMesh::new(&dims, steps).unwrap();
        let field = line_vortex(dims, [4.3, 4.6], [0.5, 0.25], steps);
        let a = track_vortex(&mesh, &PhaseField::Angle(&field)).unwrap();
        let b = track_vortex(&mesh, &PhaseField::Angle(&field)).unwrap();
        assert_eq!(a.surfaces, b.surfaces);
        assert_eq!(a.curves, b.curves);
        assert_eq!(a.diagnostics, b.diagnostics);
    }

    #[test]
    fn wrong_shapes_are_rejected() {
        let mesh = RegularSpacetimeMesh::new(&[4, 4], 2).unwrap();
        let mut flat = TimeSeriesField::new(16, 1);
        flat.push_layer(vec![0.0; 16]).unwrap();
        flat.push_layer(vec![0.0; 16]).unwrap();
        assert!(track_vortex(&mesh, &PhaseField::Angle(&flat)).is_err());

        let mesh = RegularSpacetimeMesh::new(&[4, 4, 4], 2).unwrap();
        let mut two = TimeSeriesField::new(64, 2);
        two.push_layer(vec![0.0; 128]).unwrap();
        two.push_layer(vec![0.0; 128]).unwrap();
        assert!(track_vortex(&mesh, &PhaseField::Angle(&two)).is_err());
    }
}
