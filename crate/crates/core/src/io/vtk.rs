//! Legacy ASCII VTK output.
//!
//! Two shapes are emitted: `POLYDATA` (polylines for chains and core
//! curves, polygons for swept sheets, vertex cells for sliced points) and
//! `UNSTRUCTURED_GRID` with tetrahedral cells for the swept level set.
//! Coordinates and scalars are written as VTK `float` (f32) using Rust's
//! shortest round-trip formatting; full-precision geometry lives in the
//! JSON documents. A structural validator is included so tests and
//! downstream tooling can verify files without a VTK installation.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::exact::eigen::CriticalKind;
use crate::post::SlicePoint;
use crate::track::isosurface::{Isovolume, SliceMesh};
use crate::track::vortex::{VortexCurve, VortexSurface};
use crate::track::Trajectory;

const HEADER: &str = "# vtk DataFile Version 3.0";

/// Point set plus the polyline/polygon/vertex cells over it, with the
/// per-point attributes every feature kind shares.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PolyData {
    pub points: Vec<[f64; 3]>,
    /// Isolated-point cells (each a list of point indices).
    pub vertices: Vec<Vec<u32>>,
    /// Open or closed polylines (closed ones repeat their first index).
    pub lines: Vec<Vec<u32>>,
    /// Filled polygons, usually triangles.
    pub polygons: Vec<Vec<u32>>,
    /// Per-point time (already scaled by the export Δt).
    pub time: Vec<f64>,
    /// Per-point type code: critical kind for chains, winding for cores.
    pub type_id: Vec<i32>,
    /// Per-point connected-component index.
    pub component: Vec<i32>,
}

/// Tetrahedral mesh (VTK cell type 10) with per-point attributes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct UnstructuredTets {
    pub points: Vec<[f64; 3]>,
    pub tets: Vec<[u32; 4]>,
    pub time: Vec<f64>,
    pub component: Vec<i32>,
}

/// Stable numeric code for a point type, exported as the `type` scalar.
pub fn kind_code(kind: CriticalKind) -> i32 {
    match kind {
        CriticalKind::Source => 0,
        CriticalKind::Sink => 1,
        CriticalKind::Saddle => 2,
        CriticalKind::Maximum => 3,
        CriticalKind::Minimum => 4,
        CriticalKind::ScalarSaddle => 5,
        CriticalKind::Degenerate => 6,
    }
}

/// VTK `float` formatting: shortest f32 round trip.
fn f32s(x: f64) -> String {
    format!("{}", x as f32)
}

fn check_attrs(pd_points: usize, attrs: &[(&str, usize)]) -> Result<()> {
    for (name, len) in attrs {
        if *len != pd_points {
            return Err(Error::Config(format!(
                "point attribute {name:?} has {len} values for {pd_points} points"
            )));
        }
    }
    Ok(())
}

fn push_cells(out: &mut String, keyword: &str, cells: &[Vec<u32>], points: usize) -> Result<()> {
    if cells.is_empty() {
        return Ok(());
    }
    let total: usize = cells.iter().map(|c| c.len() + 1).sum();
    let _ = writeln!(out, "{keyword} {} {total}", cells.len());
    for cell in cells {
        if cell.is_empty() {
            return Err(Error::Config(format!("{keyword} record with no points")));
        }
        let mut line = String::with_capacity(cell.len() * 4 + 4);
        let _ = write!(line, "{}", cell.len());
        for &i in cell {
            if i as usize >= points {
                return Err(Error::Config(format!(
                    "{keyword} index {i} out of range for {points} points"
                )));
            }
            let _ = write!(line, " {i}");
        }
        out.push_str(&line);
        out.push('\n');
    }
    Ok(())
}

fn push_point_data(out: &mut String, pd: &PolyData) {
    if pd.points.is_empty() {
        return;
    }
    let _ = writeln!(out, "POINT_DATA {}", pd.points.len());
    let _ = writeln!(out, "SCALARS time float 1\nLOOKUP_TABLE default");
    for &t in &pd.time {
        let _ = writeln!(out, "{}", f32s(t));
    }
    let _ = writeln!(out, "SCALARS type int 1\nLOOKUP_TABLE default");
    for &t in &pd.type_id {
        let _ = writeln!(out, "{t}");
    }
    let _ = writeln!(out, "SCALARS component int 1\nLOOKUP_TABLE default");
    for &c in &pd.component {
        let _ = writeln!(out, "{c}");
    }
}

/// Writes `pd` as a legacy ASCII `POLYDATA` file. Empty geometry is valid
/// and produces a loadable file with zero points.
pub fn write_vtk_polydata(pd: &PolyData, path: &Path) -> Result<()> {
    check_attrs(
        pd.points.len(),
        &[
            ("time", pd.time.len()),
            ("type", pd.type_id.len()),
            ("component", pd.component.len()),
        ],
    )?;
    let mut out = String::new();
    let _ = writeln!(out, "{HEADER}\nfeature geometry\nASCII\nDATASET POLYDATA");
    let _ = writeln!(out, "POINTS {} float", pd.points.len());
    for p in &pd.points {
        let _ = writeln!(out, "{} {} {}", f32s(p[0]), f32s(p[1]), f32s(p[2]));
    }
    push_cells(&mut out, "VERTICES", &pd.vertices, pd.points.len())?;
    push_cells(&mut out, "LINES", &pd.lines, pd.points.len())?;
    push_cells(&mut out, "POLYGONS", &pd.polygons, pd.points.len())?;
    push_point_data(&mut out, pd);
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Writes a tetrahedral mesh as `UNSTRUCTURED_GRID` with cell type 10.
pub fn write_vtk_unstructured(g: &UnstructuredTets, path: &Path) -> Result<()> {
    check_attrs(
        g.points.len(),
        &[("time", g.time.len()), ("component", g.component.len())],
    )?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{HEADER}\nswept level set\nASCII\nDATASET UNSTRUCTURED_GRID"
    );
    let _ = writeln!(out, "POINTS {} float", g.points.len());
    for p in &g.points {
        let _ = writeln!(out, "{} {} {}", f32s(p[0]), f32s(p[1]), f32s(p[2]));
    }
    let _ = writeln!(out, "CELLS {} {}", g.tets.len(), g.tets.len() * 5);
    for t in &g.tets {
        for &i in t {
            if i as usize >= g.points.len() {
                return Err(Error::Config(format!(
                    "tetrahedron index {i} out of range for {} points",
                    g.points.len()
                )));
            }
        }
        let _ = writeln!(out, "4 {} {} {} {}", t[0], t[1], t[2], t[3]);
    }
    let _ = writeln!(out, "CELL_TYPES {}", g.tets.len());
    for _ in &g.tets {
        let _ = writeln!(out, "10");
    }
    if !g.points.is_empty() {
        let _ = writeln!(out, "POINT_DATA {}", g.points.len());
        let _ = writeln!(out, "SCALARS time float 1\nLOOKUP_TABLE default");
        for &t in &g.time {
            let _ = writeln!(out, "{}", f32s(t));
        }
        let _ = writeln!(out, "SCALARS component int 1\nLOOKUP_TABLE default");
        for &c in &g.component {
            let _ = writeln!(out, "{c}");
        }
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

// ---------------------------------------------------------------------
// Converters from tracker outputs.

/// Deterministic component index per distinct label, in sorted order.
fn component_index<'a>(labels: impl Iterator<Item = &'a str>) -> Vec<(&'a str, i32)> {
    let mut distinct: Vec<&str> = labels.collect();
    distinct.sort_unstable();
    distinct.dedup();
    distinct
        .into_iter()
        .enumerate()
        .map(|(i, s)| (s, i as i32))
        .collect()
}

fn lookup(table: &[(&str, i32)], label: &str) -> i32 {
    table
        .iter()
        .find(|(s, _)| *s == label)
        .map(|&(_, i)| i)
        .unwrap_or(-1)
}

/// Chains become polylines; closed chains repeat their first point index.
/// `delta_t` scales the exported time attribute only.
pub fn trajectories_to_polydata(trajs: &[Trajectory], delta_t: f64) -> PolyData {
    let table = component_index(trajs.iter().map(|t| t.id.as_str()));
    let mut pd = PolyData::default();
    for traj in trajs {
        let comp = lookup(&table, &traj.id);
        let first = pd.points.len() as u32;
        let mut line: Vec<u32> = Vec::with_capacity(traj.points.len() + 1);
        for p in &traj.points {
            line.push(pd.points.len() as u32);
            pd.points.push(p.position);
            pd.time.push(p.time * delta_t);
            pd.type_id.push(kind_code(p.kind));
            pd.component.push(comp);
        }
        if traj.closed && line.len() > 1 {
            line.push(first);
        }
        if line.len() > 1 {
            pd.lines.push(line);
        } else {
            pd.vertices.push(line);
        }
    }
    pd
}

/// Sliced chain points become isolated vertex cells.
pub fn slice_points_to_polydata(points: &[SlicePoint], delta_t: f64) -> PolyData {
    let table = component_index(points.iter().map(|p| p.trajectory.as_str()));
    let mut pd = PolyData::default();
    for p in points {
        pd.vertices.push(vec![pd.points.len() as u32]);
        pd.points.push(p.position);
        pd.time.push(p.time * delta_t);
        pd.type_id.push(kind_code(p.kind));
        pd.component.push(lookup(&table, &p.trajectory));
    }
    pd
}

/// Core curves become per-layer polylines; the `type` scalar carries the
/// winding.
pub fn curves_to_polydata(curves: &[VortexCurve], delta_t: f64) -> PolyData {
    let table = component_index(curves.iter().map(|c| c.surface_id.as_str()));
    let mut pd = PolyData::default();
    for curve in curves {
        let comp = lookup(&table, &curve.surface_id);
        let first = pd.points.len() as u32;
        let mut line: Vec<u32> = Vec::with_capacity(curve.points.len() + 1);
        for p in &curve.points {
            line.push(pd.points.len() as u32);
            pd.points.push(p.position);
            pd.time.push(p.time * delta_t);
            pd.type_id.push(p.winding as i32);
            pd.component.push(comp);
        }
        if curve.closed && line.len() > 1 {
            line.push(first);
        }
        if line.len() > 1 {
            pd.lines.push(line);
        } else {
            pd.vertices.push(line);
        }
    }
    pd
}

/// Swept sheets become triangle soups; spatial coordinates only, time in
/// the point data.
pub fn surfaces_to_polydata(surfaces: &[VortexSurface], delta_t: f64) -> PolyData {
    let table = component_index(surfaces.iter().map(|s| s.id.as_str()));
    let mut pd = PolyData::default();
    for surface in surfaces {
        let comp = lookup(&table, &surface.id);
        let base = pd.points.len() as u32;
        for p in &surface.points {
            pd.points.push(p.position);
            pd.time.push(p.time * delta_t);
            pd.type_id.push(p.winding as i32);
            pd.component.push(comp);
        }
        for t in &surface.triangles {
            pd.polygons.push(vec![base + t[0], base + t[1], base + t[2]]);
        }
    }
    pd
}

/// The swept level set keeps its spatial coordinates; time goes to the
/// point data so the 4D object stays inspectable in 3D viewers.
pub fn isovolume_to_unstructured(vol: &Isovolume, delta_t: f64) -> UnstructuredTets {
    UnstructuredTets {
        points: vol.vertices.iter().map(|v| v.position).collect(),
        tets: vol.tets.clone(),
        time: vol.vertices.iter().map(|v| v.time * delta_t).collect(),
        component: vol.component_of.iter().map(|&c| c as i32).collect(),
    }
}

/// One time slice of the swept level set as a triangulated surface.
pub fn slice_mesh_to_polydata(slice: &SliceMesh, delta_t: f64) -> PolyData {
    PolyData {
        points: slice.vertices.clone(),
        polygons: slice
            .triangles
            .iter()
            .map(|t| vec![t[0], t[1], t[2]])
            .collect(),
        time: vec![slice.time * delta_t; slice.vertices.len()],
        type_id: vec![0; slice.vertices.len()],
        component: slice.component_of.iter().map(|&c| c as i32).collect(),
        ..PolyData::default()
    }
}

// ---------------------------------------------------------------------
// Structural validation (re-parse oracle).

/// Section counts recovered by re-parsing a written file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct VtkSummary {
    pub dataset: String,
    pub points: usize,
    pub vertices: usize,
    pub lines: usize,
    pub polygons: usize,
    pub cells: usize,
    /// Names of the POINT_DATA scalar fields, in file order.
    pub point_data: Vec<String>,
}

/// Re-parses a legacy ASCII file written by this module and checks its
/// structure: header lines, section counts, record arities, index bounds,
/// and attribute lengths. Returns the section summary.
pub fn validate_vtk(path: &Path) -> Result<VtkSummary> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let bad = |reason: &str| Error::format(path, reason);

    let mut lines = text.lines();
    if lines.next() != Some(HEADER) {
        return Err(bad("missing version header"));
    }
    if lines.next().is_none() {
        return Err(bad("missing title line"));
    }
    if lines.next() != Some("ASCII") {
        return Err(bad("expected ASCII encoding line"));
    }
    let dataset = match lines.next() {
        Some("DATASET POLYDATA") => "POLYDATA",
        Some("DATASET UNSTRUCTURED_GRID") => "UNSTRUCTURED_GRID",
        _ => return Err(bad("expected DATASET POLYDATA or UNSTRUCTURED_GRID")),
    };

    let mut tokens = lines.flat_map(str::split_whitespace).peekable();
    let mut summary = VtkSummary {
        dataset: dataset.to_string(),
        ..VtkSummary::default()
    };

    macro_rules! expect {
        ($word:expr) => {
            if tokens.next() != Some($word) {
                return Err(bad(concat!("expected token ", $word)));
            }
        };
    }
    macro_rules! number {
        ($ty:ty, $what:expr) => {
            tokens
                .next()
                .and_then(|t| t.parse::<$ty>().ok())
                .ok_or_else(|| bad(concat!("expected ", $what)))?
        };
    }

    expect!("POINTS");
    summary.points = number!(usize, "point count");
    expect!("float");
    for _ in 0..summary.points * 3 {
        number!(f32, "point coordinate");
    }

    fn parse_cells<'a>(
        tokens: &mut impl Iterator<Item = &'a str>,
        points: usize,
        path: &Path,
    ) -> Result<usize> {
        let mut number = |what: &str| -> Result<usize> {
            tokens
                .next()
                .and_then(|t| t.parse::<usize>().ok())
                .ok_or_else(|| Error::format(path, format!("expected {what}")))
        };
        let records = number("cell record count")?;
        let total = number("cell token count")?;
        let mut seen = 0usize;
        for _ in 0..records {
            let arity = number("record arity")?;
            if arity == 0 {
                return Err(Error::format(path, "empty connectivity record"));
            }
            for _ in 0..arity {
                if number("point index")? >= points {
                    return Err(Error::format(path, "connectivity index out of range"));
                }
            }
            seen += arity + 1;
        }
        if seen != total {
            return Err(Error::format(path, "connectivity token count mismatch"));
        }
        Ok(records)
    }

    if dataset == "POLYDATA" {
        while let Some(&section) = tokens.peek() {
            match section {
                "VERTICES" | "LINES" | "POLYGONS" => {
                    tokens.next();
                    let n = parse_cells(&mut tokens, summary.points, path)?;
                    match section {
                        "VERTICES" => summary.vertices = n,
                        "LINES" => summary.lines = n,
                        _ => summary.polygons = n,
                    }
                }
                _ => break,
            }
        }
    } else {
        expect!("CELLS");
        let records = number!(usize, "cell count");
        let total = number!(usize, "cell token count");
        if total != records * 5 {
            return Err(bad("tetrahedral cells must use 5 tokens each"));
        }
        for _ in 0..records {
            let arity = number!(usize, "record arity");
            if arity != 4 {
                return Err(bad("expected arity-4 cells"));
            }
            for _ in 0..4 {
                let idx = number!(usize, "point index");
                if idx >= summary.points {
                    return Err(bad("connectivity index out of range"));
                }
            }
        }
        expect!("CELL_TYPES");
        let n = number!(usize, "cell type count");
        if n != records {
            return Err(bad("CELL_TYPES count mismatch"));
        }
        for _ in 0..n {
            if tokens.next() != Some("10") {
                return Err(bad("expected cell type 10"));
            }
        }
        summary.cells = records;
    }

    if let Some(&"POINT_DATA") = tokens.peek() {
        tokens.next();
        let n = number!(usize, "POINT_DATA count");
        if n != summary.points {
            return Err(bad("POINT_DATA count must equal point count"));
        }
        while let Some(&"SCALARS") = tokens.peek() {
            tokens.next();
            let name = tokens.next().ok_or_else(|| bad("scalar name"))?;
            let ty = tokens.next().ok_or_else(|| bad("scalar type"))?;
            if !matches!(ty, "float" | "int") {
                return Err(bad("scalar type must be float or int"));
            }
            expect!("1");
            expect!("LOOKUP_TABLE");
            expect!("default");
            for _ in 0..n {
                number!(f64, "scalar value");
            }
            summary.point_data.push(name.to_string());
        }
    }

    if tokens.next().is_some() {
        return Err(bad("trailing tokens after the last section"));
    }
    Ok(summary)
}
