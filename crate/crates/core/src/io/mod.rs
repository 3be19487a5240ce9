//! File formats: raw binary volumes in (see [`crate::field::raw`]),
//! versioned JSON feature documents and JSON meshes, legacy ASCII VTK out.

pub mod json;
pub mod vtk;
