//! Feature tracking in time-varying fields via spacetime meshing.
//!
//! Instead of detecting features per timestep and matching them afterwards,
//! this crate triangulates the space × time domain into simplices, finds
//! feature points inside individual spacetime simplices with exact
//! (symbolically perturbed) arithmetic, and connects them through shared
//! higher-dimensional simplices. Trajectories and surfaces then come out of
//! connected-component labeling; no heuristic association step is involved,
//! and results are deterministic and independent of thread count.

pub mod components;
pub mod error;
pub mod exact;
pub mod field;
pub mod handle;
pub mod io;
pub mod mesh;
pub mod pipeline;
pub mod post;
pub mod synthetic;
pub mod track;

pub use error::{Error, Result};
pub use handle::{Anchor, ElementHandle};
