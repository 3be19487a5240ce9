//! Versioned JSON feature documents and the JSON mesh format.
//!
//! Documents serialize canonically: object keys sorted, floats in Rust's
//! shortest round-trip form, no trailing whitespace beyond one final
//! newline. Because parsing recovers every bit of every number, a
//! write → read → write cycle is byte-identical — the property the tests
//! and the cross-worker-count determinism checks rely on.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::eigen::CriticalKind;
use crate::handle::ElementHandle;
use crate::mesh::base::BaseMesh;
use crate::post::SlicePoint;
use crate::track::isosurface::{IsoVertex, Isovolume};
use crate::track::vortex::{VortexCurve, VortexPoint, VortexSurface};
use crate::track::{Trajectory, TrajectoryPoint};

/// Version written into, and required from, every document.
pub const SCHEMA_VERSION: u32 = 1;

/// Run parameters echoed into every output so results stay attributable.
/// Execution-only details (worker count, wall time, timestamps) are
/// deliberately excluded: output bytes must not depend on them.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    /// Producing tool and version, e.g. "chronomesh 0.1.0".
    pub tool: String,
    /// Subcommand or API entry point that produced the document.
    pub command: String,
    /// Semantic parameters of the run, flag name → rendered value.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub parameters: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainPointRecord {
    /// Token of the spacetime element that claimed the point.
    pub element: String,
    pub position: [f64; 3],
    /// Time in layer units (the export Δt lives in the provenance).
    pub time: f64,
    pub kind: String,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrajectoryRecord {
    pub id: String,
    pub closed: bool,
    pub starts_on_boundary: bool,
    pub ends_on_boundary: bool,
    pub points: Vec<ChainPointRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorePointRecord {
    pub element: String,
    pub position: [f64; 3],
    pub time: f64,
    pub winding: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceRecord {
    pub id: String,
    pub points: Vec<CorePointRecord>,
    pub triangles: Vec<[u32; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveRecord {
    pub surface: String,
    pub layer: i32,
    pub closed: bool,
    pub points: Vec<CorePointRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsoVertexRecord {
    /// Global ids of the spacetime edge carrying the vertex.
    pub edge: [u64; 2],
    pub position: [f64; 3],
    pub time: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IsovolumeRecord {
    pub vertices: Vec<IsoVertexRecord>,
    pub tets: Vec<[u32; 4]>,
    pub component_of: Vec<u32>,
    pub component_ids: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SlicePointRecord {
    pub trajectory: String,
    pub position: [f64; 3],
    pub time: f64,
    pub kind: String,
    pub value: f64,
}

/// One time slice of a swept level set: a triangulated surface.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SliceMeshRecord {
    pub time: f64,
    pub vertices: Vec<[f64; 3]>,
    pub triangles: Vec<[u32; 3]>,
    pub component_of: Vec<u32>,
}

/// The one on-disk JSON shape for every feature kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FeatureDocument {
    pub schema: u32,
    /// "critical-trajectories" | "vortex" | "isovolume" | "slice-points".
    pub kind: String,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub trajectories: Vec<TrajectoryRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub surfaces: Vec<SurfaceRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub curves: Vec<CurveRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub isovolume: Option<IsovolumeRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<SlicePointRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub slices: Vec<SliceMeshRecord>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, u64>,
}

impl FeatureDocument {
    pub fn new(kind: &str, provenance: Provenance) -> Self {
        FeatureDocument {
            schema: SCHEMA_VERSION,
            kind: kind.to_string(),
            provenance,
            trajectories: Vec::new(),
            surfaces: Vec::new(),
            curves: Vec::new(),
            isovolume: None,
            points: Vec::new(),
            slices: Vec::new(),
            diagnostics: BTreeMap::new(),
        }
    }
}

// ---------------------------------------------------------------------
// Record ↔ tracker-type conversions.

pub fn trajectory_to_record(t: &Trajectory) -> TrajectoryRecord {
    TrajectoryRecord {
        id: t.id.clone(),
        closed: t.closed,
        starts_on_boundary: t.starts_on_boundary,
        ends_on_boundary: t.ends_on_boundary,
        points: t
            .points
            .iter()
            .map(|p| ChainPointRecord {
                element: p.handle.to_token(),
                position: p.position,
                time: p.time,
                kind: p.kind.to_string(),
                value: p.value,
            })
            .collect(),
    }
}

/// Rebuilds a chain from its record; interpolation weights are not stored
/// and come back empty.
pub fn trajectory_from_record(r: &TrajectoryRecord) -> Result<Trajectory> {
    let mut points = Vec::with_capacity(r.points.len());
    for p in &r.points {
        points.push(TrajectoryPoint {
            handle: ElementHandle::from_token(&p.element)?,
            position: p.position,
            time: p.time,
            weights: Vec::new(),
            kind: CriticalKind::from_str(&p.kind).map_err(Error::Config)?,
            value: p.value,
        });
    }
    Ok(Trajectory {
        id: r.id.clone(),
        points,
        closed: r.closed,
        starts_on_boundary: r.starts_on_boundary,
        ends_on_boundary: r.ends_on_boundary,
    })
}

fn core_point_to_record(p: &VortexPoint) -> CorePointRecord {
    CorePointRecord {
        element: p.handle.to_token(),
        position: p.position,
        time: p.time,
        winding: p.winding,
    }
}

pub fn surface_to_record(s: &VortexSurface) -> SurfaceRecord {
    SurfaceRecord {
        id: s.id.clone(),
        points: s.points.iter().map(core_point_to_record).collect(),
        triangles: s.triangles.clone(),
    }
}

pub fn curve_to_record(c: &VortexCurve) -> CurveRecord {
    CurveRecord {
        surface: c.surface_id.clone(),
        layer: c.layer,
        closed: c.closed,
        points: c.points.iter().map(core_point_to_record).collect(),
    }
}

pub fn isovolume_to_record(v: &Isovolume) -> IsovolumeRecord {
    IsovolumeRecord {
        vertices: v
            .vertices
            .iter()
            .map(|x| IsoVertexRecord {
                edge: [x.edge.0, x.edge.1],
                position: x.position,
                time: x.time,
            })
            .collect(),
        tets: v.tets.clone(),
        component_of: v.component_of.clone(),
        component_ids: v.component_ids.clone(),
    }
}

/// Rebuilds the volume geometry; detection counters are not stored.
pub fn isovolume_from_record(r: &IsovolumeRecord) -> Isovolume {
    Isovolume {
        vertices: r
            .vertices
            .iter()
            .map(|x| IsoVertex {
                edge: (x.edge[0], x.edge[1]),
                position: x.position,
                time: x.time,
            })
            .collect(),
        tets: r.tets.clone(),
        component_of: r.component_of.clone(),
        component_ids: r.component_ids.clone(),
        detections: 0,
        diagnostics: BTreeMap::new(),
    }
}

pub fn slice_point_to_record(p: &SlicePoint) -> SlicePointRecord {
    SlicePointRecord {
        trajectory: p.trajectory.clone(),
        position: p.position,
        time: p.time,
        kind: p.kind.to_string(),
        value: p.value,
    }
}

pub fn slice_mesh_to_record(s: &crate::track::isosurface::SliceMesh) -> SliceMeshRecord {
    SliceMeshRecord {
        time: s.time,
        vertices: s.vertices.clone(),
        triangles: s.triangles.clone(),
        component_of: s.component_of.clone(),
    }
}

fn core_point_from_record(r: &CorePointRecord) -> Result<VortexPoint> {
    Ok(VortexPoint {
        handle: ElementHandle::from_token(&r.element)?,
        position: r.position,
        time: r.time,
        winding: r.winding,
    })
}

pub fn curve_from_record(r: &CurveRecord) -> Result<VortexCurve> {
    Ok(VortexCurve {
        surface_id: r.surface.clone(),
        layer: r.layer,
        points: r.points.iter().map(core_point_from_record).collect::<Result<_>>()?,
        closed: r.closed,
    })
}

// ---------------------------------------------------------------------
// Canonical serialization.

/// Renders a document with sorted keys and a trailing newline. The same
/// document always renders to the same bytes.
pub fn render_json(doc: &FeatureDocument) -> Result<String> {
    // Routing through `Value` sorts every object's keys.
    let value = serde_json::to_value(doc)
        .map_err(|e| Error::Config(format!("serializing document: {e}")))?;
    let mut text = serde_json::to_string_pretty(&value)
        .map_err(|e| Error::Config(format!("serializing document: {e}")))?;
    text.push('\n');
    Ok(text)
}

pub fn write_json(doc: &FeatureDocument, path: &Path) -> Result<()> {
    fs::write(path, render_json(doc)?).map_err(|e| Error::io(path, e))
}

/// Parses and schema-checks a document; any unknown field or unsupported
/// schema version is an error.
pub fn read_json(path: &Path) -> Result<FeatureDocument> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?;
    match value.get("schema").and_then(|v| v.as_u64()) {
        Some(v) if v == SCHEMA_VERSION as u64 => {}
        other => return Err(Error::Schema(format!("{other:?}"))),
    }
    serde_json::from_value(value).map_err(|e| Error::format(path, e.to_string()))
}

// ---------------------------------------------------------------------
// JSON mesh format: {"dim": n, "vertices": [x,y[,z],…], "cells": [i,…]}.

/// Reads a simplicial base mesh. `vertices` is a flat float array with
/// `dim` coordinates per vertex; `cells` is a flat 0-based index array
/// with `dim + 1` entries per cell. When `"dim"` is absent it is inferred
/// if exactly one of 2 or 3 fits both array lengths.
pub fn read_mesh_json(path: &Path) -> Result<BaseMesh> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct MeshFile {
        #[serde(default)]
        dim: Option<usize>,
        vertices: Vec<f64>,
        cells: Vec<u32>,
    }
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let file: MeshFile =
        serde_json::from_str(&text).map_err(|e| Error::format(path, e.to_string()))?;

    let fits = |n: usize| {
        !file.vertices.is_empty()
            && file.vertices.len() % n == 0
            && !file.cells.is_empty()
            && file.cells.len() % (n + 1) == 0
    };
    let dim = match file.dim {
        Some(n) => n,
        None => match (fits(2), fits(3)) {
            (true, false) => 2,
            (false, true) => 3,
            (true, true) => {
                return Err(Error::format(
                    path,
                    "array lengths fit both 2D and 3D; add an explicit \"dim\" key",
                ))
            }
            (false, false) => {
                return Err(Error::format(
                    path,
                    "array lengths fit neither a 2D nor a 3D mesh",
                ))
            }
        },
    };
    if !fits(dim) {
        return Err(Error::format(
            path,
            format!("array lengths do not fit dim = {dim}"),
        ));
    }
    let positions: Vec<[f64; 3]> = file
        .vertices
        .chunks_exact(dim)
        .map(|c| {
            let mut p = [0.0; 3];
            p[..dim].copy_from_slice(c);
            p
        })
        .collect();
    let cells: Vec<Vec<u32>> = file.cells.chunks_exact(dim + 1).map(<[u32]>::to_vec).collect();
    BaseMesh::new(dim, positions, &cells)
}

/// Writes a base mesh in the same flat format, always with `"dim"`.
pub fn write_mesh_json(mesh: &BaseMesh, path: &Path) -> Result<()> {
    let n = mesh.dim();
    let mut vertices = Vec::with_capacity(mesh.vertex_count() * n);
    for v in 0..mesh.vertex_count() as u32 {
        vertices.extend_from_slice(&mesh.position(v)[..n]);
    }
    let mut cells = Vec::new();
    for c in 0..mesh.face_count(n) as u32 {
        cells.extend_from_slice(mesh.face(n, c));
    }
    let value = serde_json::json!({ "dim": n, "vertices": vertices, "cells": cells });
    let mut text = serde_json::to_string(&value)
        .map_err(|e| Error::Config(format!("serializing mesh: {e}")))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::base::BaseMesh;
    use tempfile::tempdir;

    fn full_document() -> FeatureDocument {
        let mut doc = FeatureDocument::new(
            "critical-trajectories",
            Provenance {
                tool: "chronomesh 0.1.0".into(),
                command: "track-critical".into(),
                parameters: [("dims".to_string(), "21,21,21".to_string())]
                    .into_iter()
                    .collect(),
            },
        );
        let element = crate::handle::ElementHandle::lattice(2, [7, 2, 0], 1, 0).to_token();
        doc.trajectories.push(TrajectoryRecord {
            id: element.clone(),
            closed: false,
            starts_on_boundary: true,
            ends_on_boundary: false,
            points: vec![ChainPointRecord {
                element,
                position: [0.1 + 0.2, 1.0 / 3.0, f64::MIN_POSITIVE],
                time: 0.5,
                kind: "min".into(),
                value: -1.25e-17,
            }],
        });
        doc.isovolume = Some(IsovolumeRecord {
            vertices: vec![IsoVertexRecord {
                edge: [3, u64::MAX >> 1],
                position: [1.0, 2.0, 3.0],
                time: 0.125,
            }],
            tets: vec![[0, 0, 0, 0]],
            component_of: vec![0],
            component_ids: vec!["3-42".into()],
        });
        doc.diagnostics.insert("barycenter_fallbacks".into(), 0);
        doc
    }

    #[test]
    fn write_read_write_is_byte_identical() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("doc.json");
        let doc = full_document();
        write_json(&doc, &path).unwrap();
        let bytes1 = std::fs::read(&path).unwrap();
        let reread = read_json(&path).unwrap();
        assert_eq!(reread, doc);
        write_json(&reread, &path).unwrap();
        let bytes2 = std::fs::read(&path).unwrap();
        assert_eq!(bytes1, bytes2);
    }

    #[test]
    fn keys_are_sorted_and_empty_sections_are_omitted() {
        let doc = FeatureDocument::new("slice-points", Provenance::default());
        let text = render_json(&doc).unwrap();
        assert!(!text.contains("trajectories"), "empty sections are omitted");
        let kind = text.find("\"kind\"").unwrap();
        let prov = text.find("\"provenance\"").unwrap();
        let schema = text.find("\"schema\"").unwrap();
        assert!(kind < prov && prov < schema, "keys must be sorted");
    }

    #[test]
    fn unknown_schema_or_field_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("v2.json");
        let doc = full_document();
        let text = render_json(&doc).unwrap();
        std::fs::write(&path, text.replace("\"schema\": 1", "\"schema\": 2")).unwrap();
        assert!(matches!(read_json(&path), Err(Error::Schema(_))));

        let with_extra = dir.path().join("extra.json");
        std::fs::write(
            &with_extra,
            r#"{"schema": 1, "kind": "slice-points", "provenance": {"tool": "x", "command": "y"}, "surprise": 1}"#,
        )
        .unwrap();
        assert!(read_json(&with_extra).is_err());
    }

    #[test]
    fn chain_records_roundtrip_through_the_tracker_type() {
        let record = full_document().trajectories[0].clone();
        let chain = trajectory_from_record(&record).unwrap();
        assert_eq!(trajectory_to_record(&chain), record);
    }

    #[test]
    fn mesh_files_roundtrip_and_infer_dimension() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("mesh.json");
        let mesh = BaseMesh::triangulated_grid(&[4, 3]).unwrap();
        write_mesh_json(&mesh, &path).unwrap();
        let back = read_mesh_json(&path).unwrap();
        assert_eq!(back.dim(), 2);
        assert_eq!(back.vertex_count(), mesh.vertex_count());
        assert_eq!(back.face_count(2), mesh.face_count(2));
        for v in 0..mesh.vertex_count() as u32 {
            assert_eq!(back.position(v), mesh.position(v));
        }

        // without "dim", lengths divisible both ways must be refused
        let ambiguous = dir.path().join("ambiguous.json");
        std::fs::write(
            &ambiguous,
            r#"{"vertices": [0,0, 1,0, 0,1], "cells": [0,1,2, 0,1,2, 0,1,2, 0,1,2]}"#,
        )
        .unwrap();
        assert!(read_mesh_json(&ambiguous).is_err());

        // unambiguous 2D content infers dim = 2
        let flat = dir.path().join("flat.json");
        std::fs::write(&flat, r#"{"vertices": [0,0, 1,0, 0,1], "cells": [0,1,2]}"#).unwrap();
        assert_eq!(read_mesh_json(&flat).unwrap().dim(), 2);
    }
}
