//! Tracking zeros of a piecewise-linear vector field over spacetime.
//!
//! The field is interpolated linearly over every spatial (ordinal) and
//! prism-spanning (interval) n-simplex of the spacetime mesh. A simplex
//! claims a zero when the perturbed interpolant vanishes inside it; the
//! perturbation makes every claim unambiguous, so each zero belongs to
//! exactly one simplex and the claimed simplices of one feature form a
//! path through shared (n+1)-element parents. Tracking a scalar field
//! means tracking the zeros of its derived gradient.
//!
//! The sweep is windowed: only two consecutive layers of samples (plus
//! their derived data) are resident at any time, whatever the length of
//! the series.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::bary::{det_f64, zero_barycentric};
use crate::exact::eigen::{classify_general, classify_symmetric, CriticalKind, DEFAULT_EIGEN_TOL};
use crate::exact::quant::{Quantizer, DEFAULT_QUANT_BITS};
use crate::exact::sos::origin_in_simplex_sos;
use crate::field::derive::{
    grid_gradient, grid_jacobian_at, spatial_jacobian_fit, vertex_gradient_average,
};
use crate::field::TimeSeriesField;
use crate::handle::ElementHandle;
use crate::mesh::extruded::ExtrudedMesh;
use crate::mesh::regular::RegularSpacetimeMesh;
use crate::mesh::{ElementKind, MeshVertex, SpacetimeMesh};
use crate::track::chain::{assemble, Link};
use crate::track::{Trajectory, TrajectoryPoint};

/// Relative residual below which a non-invertible sample matrix is taken
/// as "all samples equal up to noise" and the barycenter is reported.
const BARYCENTER_RESIDUAL: f64 = 1e-10;

/// Where the samples live.
pub enum CriticalDomain<'a> {
    Grid(&'a RegularSpacetimeMesh),
    Unstructured(&'a ExtrudedMesh),
}

impl<'a> CriticalDomain<'a> {
    fn mesh(&self) -> &dyn SpacetimeMesh {
        match self {
            CriticalDomain::Grid(m) => *m,
            CriticalDomain::Unstructured(m) => *m,
        }
    }
}

/// What is being tracked.
pub enum CriticalField<'a> {
    /// Samples of an n-component vector field; zeros are classified by the
    /// eigenvalues of the interpolated velocity gradient.
    Vector(&'a TimeSeriesField),
    /// Samples of a scalar field; the tracker follows the zeros of its
    /// derived gradient and classifies with the symmetric-Jacobian rules.
    Scalar(&'a TimeSeriesField),
}

#[derive(Clone, Debug)]
pub struct CriticalConfig {
    /// Fractional bits used to quantize samples for the exact predicates.
    pub quant_bits: u32,
    /// Exact perturbed predicates (on) or plain floating-point signs (off).
    pub use_sos: bool,
    /// Relative eigenvalue cutoff for type classification.
    pub eigen_tol: f64,
    /// Constant velocity subtracted from every vector sample before
    /// detection (tracking in a moving frame). Ignored for scalar input.
    pub frame_velocity: Option<[f64; 3]>,
}

impl Default for CriticalConfig {
    fn default() -> Self {
        CriticalConfig {
            quant_bits: DEFAULT_QUANT_BITS,
            use_sos: true,
            eigen_tol: DEFAULT_EIGEN_TOL,
            frame_velocity: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CriticalResult {
    pub trajectories: Vec<Trajectory>,
    /// Total number of claimed simplices.
    pub detections: u64,
    /// Counters for situations worth surfacing (all zero on clean runs
    /// with exact predicates): `branch_splits`, `ambiguous_pairings`,
    /// `barycenter_fallbacks`.
    pub diagnostics: BTreeMap<String, u64>,
}

/// Samples and derived data for one time layer.
struct LayerData {
    /// Tracked vector per mesh vertex (velocity, or scalar gradient).
    vec: Vec<[f64; 3]>,
    /// Quantized copy for the exact predicates.
    q: Vec<[i64; 3]>,
    /// Raw scalar samples (scalar tracking only).
    scalar: Vec<f64>,
}

/// One claimed simplex, located and classified.
#[derive(Clone, Debug)]
struct Detection {
    handle: ElementHandle,
    position: [f64; 3],
    time: f64,
    weights: Vec<f64>,
    kind: CriticalKind,
    value: f64,
    fallback: bool,
}

/// Tracks the zeros of a vector (or scalar-gradient) field across the whole
/// time series and assembles them into trajectories.
pub fn track_critical(
    domain: &CriticalDomain,
    field: &CriticalField,
    cfg: &CriticalConfig,
) -> Result<CriticalResult> {
    let mesh = domain.mesh();
    let n = mesh.spatial_dim();
    validate(domain, field, cfg)?;
    let quant = Quantizer::new(cfg.quant_bits)?;

    let mut detections: Vec<Detection> = Vec::new();
    let mut claimed: HashSet<ElementHandle> = HashSet::new();
    let mut links: Vec<Link> = Vec::new();
    let mut ambiguous = 0u64;
    let register = |batch: Vec<Detection>,
                        detections: &mut Vec<Detection>,
                        claimed: &mut HashSet<ElementHandle>| {
        claimed.extend(batch.iter().map(|d| d.handle));
        detections.extend(batch);
    };

    let mut lower = build_layer(domain, field, cfg, &quant, 0)?;
    let batch = detect_sweep(domain, field, cfg, ElementKind::Ordinal, 0, &lower, None)?;
    register(batch, &mut detections, &mut claimed);

    // Two-layer window: claims in the slab above `tau` only ever involve
    // layers `tau` and `tau + 1`, so everything older is dropped as the
    // window advances.
    for tau in 0..mesh.timesteps().saturating_sub(1) as i32 {
        let upper = build_layer(domain, field, cfg, &quant, tau as usize + 1)?;
        let batch =
            detect_sweep(domain, field, cfg, ElementKind::Interval, tau, &lower, Some(&upper))?;
        register(batch, &mut detections, &mut claimed);
        let batch =
            detect_sweep(domain, field, cfg, ElementKind::Ordinal, tau + 1, &upper, None)?;
        register(batch, &mut detections, &mut claimed);

        let (batch_links, batch_ambiguous) = unite_sweep(mesh, n, tau, &claimed)?;
        links.extend(batch_links);
        ambiguous += batch_ambiguous;

        lower = upper;
    }

    assemble_trajectories(mesh, detections, links, ambiguous)
}

fn validate(domain: &CriticalDomain, field: &CriticalField, cfg: &CriticalConfig) -> Result<()> {
    let mesh = domain.mesh();
    let n = mesh.spatial_dim();
    let (series, want_comps) = match field {
        CriticalField::Vector(f) => (*f, n),
        CriticalField::Scalar(f) => (*f, 1),
    };
    if series.components() != want_comps {
        return Err(Error::Config(format!(
            "field has {} components but this tracker needs {want_comps}",
            series.components()
        )));
    }
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
    if cfg.frame_velocity.is_some() && matches!(field, CriticalField::Scalar(_)) {
        return Err(Error::Config(
            "frame velocity applies to vector fields only".into(),
        ));
    }
    Ok(())
}

/// Assembles the tracked vector (and its quantization) for one layer.
fn build_layer(
    domain: &CriticalDomain,
    field: &CriticalField,
    cfg: &CriticalConfig,
    quant: &Quantizer,
    layer: usize,
) -> Result<LayerData> {
    let n = domain.mesh().spatial_dim();
    let samples = domain.mesh().verts_per_layer() as usize;
    let (vec, scalar) = match field {
        CriticalField::Vector(f) => {
            let data = f.layer(layer);
            let shift = cfg.frame_velocity.unwrap_or([0.0; 3]);
            let mut vec = vec![[0.0; 3]; samples];
            for (i, v) in vec.iter_mut().enumerate() {
                for c in 0..n {
                    v[c] = data[i * n + c] - shift[c];
                }
            }
            (vec, Vec::new())
        }
        CriticalField::Scalar(f) => {
            let data = f.layer(layer);
            let grad = match domain {
                CriticalDomain::Grid(m) => grid_gradient(data, m.spatial_dims(), n),
                CriticalDomain::Unstructured(m) => vertex_gradient_average(m.base(), data),
            };
            let mut vec = vec![[0.0; 3]; samples];
            for (i, v) in vec.iter_mut().enumerate() {
                for c in 0..n {
                    v[c] = grad[i * n + c];
                }
            }
            (vec, data.to_vec())
        }
    };
    let mut q = vec![[0i64; 3]; samples];
    for i in 0..samples {
        for c in 0..n {
            q[i][c] = quant.quantize(vec[i][c]).map_err(|e| {
                Error::Numerical(format!("layer {layer}, vertex {i}, component {c}: {e}"))
            })?;
        }
    }
    Ok(LayerData { vec, q, scalar })
}

/// Per-vertex data gathered for one candidate simplex, ascending global id.
#[derive(Clone, Copy)]
struct Row {
    id: u64,
    q: [i64; 3],
    v: [f64; 3],
    pos: [f64; 3],
    time: f64,
    scalar: f64,
}

struct Scratch {
    verts: Vec<MeshVertex>,
    rows: Vec<Row>,
}

/// Tests every n-simplex of one kind in one layer and returns the claims,
/// sorted by handle. `lower` holds samples for the sweep layer, `upper`
/// (interval sweeps) for the next one.
fn detect_sweep(
    domain: &CriticalDomain,
    field: &CriticalField,
    cfg: &CriticalConfig,
    kind: ElementKind,
    layer: i32,
    lower: &LayerData,
    upper: Option<&LayerData>,
) -> Result<Vec<Detection>> {
    let mesh = domain.mesh();
    let n = mesh.spatial_dim();
    let verts_per_layer = mesh.verts_per_layer();
    let count = mesh.element_count(n, kind, layer) as usize;
    let scalar_mode = matches!(field, CriticalField::Scalar(_));

    let mut found = (0..count)
        .into_par_iter()
        .with_min_len(2048)
        .try_fold(
            || (Vec::new(), Scratch { verts: Vec::new(), rows: Vec::new() }),
            |(mut acc, mut scratch), idx| -> Result<(Vec<Detection>, Scratch)> {
                let h = mesh.element_at(n, kind, layer, idx as u64);
                mesh.vertices_into(h, &mut scratch.verts)?;
                gather_rows(&scratch.verts, verts_per_layer, layer, lower, upper, &mut scratch.rows);
                if let Some(d) =
                    test_simplex(domain, cfg, scalar_mode, h, n, layer, lower, upper, &scratch.rows)?
                {
                    acc.push(d);
                }
                Ok((acc, scratch))
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

fn gather_rows(
    verts: &[MeshVertex],
    verts_per_layer: u64,
    layer: i32,
    lower: &LayerData,
    upper: Option<&LayerData>,
    rows: &mut Vec<Row>,
) {
    rows.clear();
    for v in verts {
        let data = if v.layer == layer {
            lower
        } else {
            upper.expect("vertex above an ordinal sweep layer")
        };
        let i = v.index as usize;
        rows.push(Row {
            id: v.global_id(verts_per_layer),
            q: data.q[i],
            v: data.vec[i],
            pos: v.position,
            time: v.layer as f64,
            scalar: data.scalar.get(i).copied().unwrap_or(0.0),
        });
    }
    rows.sort_unstable_by_key(|r| r.id);
}

/// Containment test, zero location, and classification for one simplex.
#[allow(clippy::too_many_arguments)]
fn test_simplex(
    domain: &CriticalDomain,
    cfg: &CriticalConfig,
    scalar_mode: bool,
    handle: ElementHandle,
    n: usize,
    layer: i32,
    lower: &LayerData,
    upper: Option<&LayerData>,
    rows: &[Row],
) -> Result<Option<Detection>> {
    // Cheap rejection: if some component has one strict sign over all
    // vertices, the (perturbed) interpolant cannot vanish inside.
    for c in 0..n {
        let (mut all_nonneg, mut all_neg, mut all_pos) = (true, true, true);
        for r in rows {
            all_nonneg &= r.q[c] >= 0;
            all_neg &= r.q[c] < 0;
            all_pos &= r.v[c] > 0.0;
        }
        if cfg.use_sos {
            // every perturbed entry with q >= 0 is positive, with q < 0 negative
            if all_nonneg || all_neg {
                return Ok(None);
            }
        } else if all_pos || rows.iter().all(|r| r.v[c] < 0.0) {
            return Ok(None);
        }
    }

    let contained = if cfg.use_sos {
        let mut q = [[0i64; 3]; 4];
        let mut ids = [0u64; 4];
        for (i, r) in rows.iter().enumerate() {
            q[i] = r.q;
            ids[i] = r.id;
        }
        origin_in_simplex_sos(&q[..rows.len()], &ids[..rows.len()], n)
    } else {
        origin_in_simplex_f64(rows, n)
    };
    if !contained {
        return Ok(None);
    }

    let values: Vec<[f64; 3]> = rows.iter().map(|r| r.v).collect();
    let (weights, fallback) = match zero_barycentric(&values, n) {
        Some(mu) => (mu, false),
        None => {
            // Samples too degenerate to invert: accept the barycenter when
            // they are all (nearly) zero, otherwise the quantization scale
            // does not match the data and the run must not silently drift.
            let mut residual = 0.0f64;
            let mut magnitude = 0.0f64;
            for c in 0..n {
                let mean: f64 =
                    rows.iter().map(|r| r.v[c]).sum::<f64>() / rows.len() as f64;
                residual = residual.max(mean.abs());
                for r in rows {
                    magnitude = magnitude.max(r.v[c].abs());
                }
            }
            if residual <= BARYCENTER_RESIDUAL * magnitude.max(f64::MIN_POSITIVE) {
                (vec![1.0 / rows.len() as f64; rows.len()], true)
            } else {
                return Err(Error::Numerical(format!(
                    "cannot locate the interpolated zero in {handle}: samples are \
                     degenerate but not uniformly small; raise the quantization \
                     precision or check the input scale"
                )));
            }
        }
    };

    let mut position = [0.0; 3];
    let mut time = 0.0;
    for (w, r) in weights.iter().zip(rows) {
        for a in 0..3 {
            position[a] += w * r.pos[a];
        }
        time += w * r.time;
    }

    let jac = jacobian_at(domain, n, layer, lower, upper, position, time, handle)?;
    let kind = match jac {
        None => CriticalKind::Degenerate,
        Some(j) if scalar_mode => {
            let mut s = [[0.0; 3]; 3];
            for r in 0..n {
                for c in 0..n {
                    s[r][c] = 0.5 * (j[r][c] + j[c][r]);
                }
            }
            classify_symmetric(&s, n, cfg.eigen_tol)
        }
        Some(j) => classify_general(&j, n, cfg.eigen_tol),
    };

    let value = if scalar_mode {
        weights.iter().zip(rows).map(|(w, r)| w * r.scalar).sum()
    } else {
        0.0
    };

    Ok(Some(Detection { handle, position, time, weights, kind, value, fallback }))
}

/// Interpolated velocity gradient at a located zero: evaluated per layer
/// (nearest-vertex differences on grids, enclosing-cell fit on simplicial
/// bases) and interpolated linearly in time across the window.
#[allow(clippy::too_many_arguments)]
fn jacobian_at(
    domain: &CriticalDomain,
    n: usize,
    layer: i32,
    lower: &LayerData,
    upper: Option<&LayerData>,
    position: [f64; 3],
    time: f64,
    handle: ElementHandle,
) -> Result<Option<[[f64; 3]; 3]>> {
    let spatial = |data: &LayerData| -> Result<Option<[[f64; 3]; 3]>> {
        match domain {
            CriticalDomain::Grid(m) => {
                let dims = m.spatial_dims();
                let mut at = [0usize; 3];
                for a in 0..n {
                    at[a] = (position[a].round().max(0.0) as usize).min(dims[a] - 1);
                }
                Ok(Some(grid_jacobian_at(&data.vec, dims, n, at)))
            }
            CriticalDomain::Unstructured(m) => {
                let cell = m.enclosing_cell(handle)?;
                let verts = m.base().face(n, cell);
                let mut pts = Vec::with_capacity(n + 1);
                let mut vals = Vec::with_capacity(n + 1);
                for &v in verts {
                    pts.push(m.base().position(v));
                    vals.push(data.vec[v as usize]);
                }
                Ok(spatial_jacobian_fit(&pts, &vals, n))
            }
        }
    };
    let s = (time - layer as f64).clamp(0.0, 1.0);
    let low = spatial(lower)?;
    let up = match upper {
        Some(u) if s > 0.0 => spatial(u)?,
        _ => return Ok(low),
    };
    match (low, up) {
        (Some(a), Some(b)) => {
            let mut j = [[0.0; 3]; 3];
            for r in 0..3 {
                for c in 0..3 {
                    j[r][c] = (1.0 - s) * a[r][c] + s * b[r][c];
                }
            }
            Ok(Some(j))
        }
        _ => Ok(None),
    }
}

/// Off-mode containment: the same barycentric sign test as the exact
/// predicate, on plain f64 determinants. Any vanishing determinant means
/// "no claim", so degeneracies fall through the cracks by design.
fn origin_in_simplex_f64(rows: &[Row], n: usize) -> bool {
    let mut first = 0i8;
    for i in 0..=n {
        let mut m = [[0.0; 4]; 4];
        for (j, src) in (0..=n).filter(|&j| j != i).enumerate() {
            m[j][..3].copy_from_slice(&rows[src].v);
        }
        let d = det_f64(&m, n);
        if d == 0.0 || !d.is_finite() {
            return false;
        }
        let mut s = if d > 0.0 { 1i8 } else { -1 };
        if (i + n) % 2 == 1 {
            s = -s;
        }
        if i == 0 {
            first = s;
        } else if s != first {
            return false;
        }
    }
    true
}

/// Finds, for every (n+1)-interval element of the window, which of its
/// sides were claimed; exactly two claims make a link, more are counted as
/// ambiguous (impossible under exact predicates).
fn unite_sweep(
    mesh: &dyn SpacetimeMesh,
    n: usize,
    tau: i32,
    claimed: &HashSet<ElementHandle>,
) -> Result<(Vec<Link>, u64)> {
    let count = mesh.element_count(n + 1, ElementKind::Interval, tau) as usize;
    (0..count)
        .into_par_iter()
        .with_min_len(2048)
        .try_fold(
            || (Vec::new(), 0u64, Vec::new()),
            |(mut links, mut ambiguous, mut sides), idx| -> Result<(Vec<Link>, u64, Vec<ElementHandle>)> {
                let top = mesh.element_at(n + 1, ElementKind::Interval, tau, idx as u64);
                mesh.sides_into(top, &mut sides)?;
                let mut hit = [ElementHandle::lattice(0, [0; 3], 0, 0); 2];
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
                    2 => links.push(Link::new(hit[0], hit[1], top)),
                    x if x > 2 => ambiguous += 1,
                    _ => {}
                }
                Ok((links, ambiguous, sides))
            },
        )
        .map(|r| r.map(|(l, a, _)| (l, a)))
        .try_reduce(
            || (Vec::new(), 0),
            |(mut la, aa), (mut lb, ab)| {
                la.append(&mut lb);
                Ok((la, aa + ab))
            },
        )
}

/// Stitches claims and links into canonical trajectories.
fn assemble_trajectories(
    mesh: &dyn SpacetimeMesh,
    detections: Vec<Detection>,
    links: Vec<Link>,
    ambiguous: u64,
) -> Result<CriticalResult> {
    let nodes: Vec<ElementHandle> = detections.iter().map(|d| d.handle).collect();
    let by_handle: HashMap<ElementHandle, usize> =
        detections.iter().enumerate().map(|(i, d)| (d.handle, i)).collect();
    let fallbacks = detections.iter().filter(|d| d.fallback).count() as u64;

    let set = assemble(&nodes, links)?;
    let mut trajectories = Vec::with_capacity(set.chains.len());
    for chain in &set.chains {
        let mut points: Vec<TrajectoryPoint> = chain
            .nodes
            .iter()
            .map(|h| {
                let d = &detections[by_handle[h]];
                TrajectoryPoint {
                    handle: d.handle,
                    position: d.position,
                    time: d.time,
                    weights: d.weights.clone(),
                    kind: d.kind,
                    value: d.value,
                }
            })
            .collect();
        if !chain.closed && points.len() > 1 && points.last().unwrap().time < points[0].time {
            points.reverse();
        }
        let boundary = |p: &TrajectoryPoint| -> Result<bool> {
            Ok(mesh.side_of(p.handle)?.len() == 1)
        };
        let (starts_on_boundary, ends_on_boundary) = if chain.closed {
            (false, false)
        } else {
            (boundary(&points[0])?, boundary(points.last().unwrap())?)
        };
        trajectories.push(Trajectory {
            id: chain.component.to_token(),
            points,
            closed: chain.closed,
            starts_on_boundary,
            ends_on_boundary,
        });
    }

    let mut diagnostics = BTreeMap::new();
    diagnostics.insert("ambiguous_pairings".to_string(), ambiguous);
    diagnostics.insert("branch_splits".to_string(), set.branch_nodes);
    diagnostics.insert("barycenter_fallbacks".to_string(), fallbacks);
    Ok(CriticalResult {
        trajectories,
        detections: detections.len() as u64,
        diagnostics,
    })
}
