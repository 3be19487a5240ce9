//! Synthetic time-varying fields with analytic ground truth.
//!
//! Every generator returns a [`TimeSeriesField`] sampled on a lattice (or,
//! for the gyre, on an unstructured triangle mesh) so that tests and demos
//! can compare tracked features against closed forms.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::field::TimeSeriesField;
use crate::mesh::base::BaseMesh;

/// `f(x,t) = ‖x − (x0 + d·t)‖²` on an integer lattice; the single minimum
/// moves along `x0 + d·t` (time in layer units).
pub fn moving_minimum(
    dims: [usize; 3],
    x0: [f64; 3],
    d: [f64; 3],
    timesteps: usize,
) -> TimeSeriesField {
    let total = dims.iter().product();
    let mut field = TimeSeriesField::new(total, 1);
    for layer in 0..timesteps {
        let t = layer as f64;
        let c = [x0[0] + d[0] * t, x0[1] + d[1] * t, x0[2] + d[2] * t];
        let mut data = Vec::with_capacity(total);
        for z in 0..dims[2] {
            for y in 0..dims[1] {
                for x in 0..dims[0] {
                    let dx = x as f64 - c[0];
                    let dy = y as f64 - c[1];
                    let dz = z as f64 - c[2];
                    data.push(dx * dx + dy * dy + dz * dz);
                }
            }
        }
        field.push_layer(data).expect("generated layer is well-formed");
    }
    field
}

/// Analytic minimum position of [`moving_minimum`] at time `t` (layer units).
pub fn moving_minimum_center(x0: [f64; 3], d: [f64; 3], t: f64) -> [f64; 3] {
    [x0[0] + d[0] * t, x0[1] + d[1] * t, x0[2] + d[2] * t]
}

/// `f(x,t) = x − α·t` on an integer lattice: a plane sweeping along x.
pub fn moving_plane(dims: [usize; 3], alpha: f64, timesteps: usize) -> TimeSeriesField {
    let total = dims.iter().product();
    let mut field = TimeSeriesField::new(total, 1);
    for layer in 0..timesteps {
        let t = layer as f64;
        let mut data = Vec::with_capacity(total);
        for _z in 0..dims[2] {
            for _y in 0..dims[1] {
                for x in 0..dims[0] {
                    data.push(x as f64 - alpha * t);
                }
            }
        }
        field.push_layer(data).expect("generated layer is well-formed");
    }
    field
}

/// Scalar whose extrema orbit the origin at unit angular speed:
/// `f = cos(x cos t − y sin t) · sin(x sin t + y cos t)`, sampled on a
/// `dims[0] × dims[1]` grid covering `[−halfwidth, halfwidth]²`; layer `l`
/// is evaluated at `t = l·delta_t`.
pub fn spiral_woven(
    dims: [usize; 2],
    halfwidth: f64,
    delta_t: f64,
    timesteps: usize,
) -> TimeSeriesField {
    let total = dims[0] * dims[1];
    let mut field = TimeSeriesField::new(total, 1);
    for layer in 0..timesteps {
        let t = layer as f64 * delta_t;
        let (st, ct) = t.sin_cos();
        let mut data = Vec::with_capacity(total);
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let x = lattice_to_domain(i, dims[0], halfwidth);
                let y = lattice_to_domain(j, dims[1], halfwidth);
                data.push((x * ct - y * st).cos() * (x * st + y * ct).sin());
            }
        }
        field.push_layer(data).expect("generated layer is well-formed");
    }
    field
}

fn lattice_to_domain(i: usize, n: usize, halfwidth: f64) -> f64 {
    -halfwidth + 2.0 * halfwidth * i as f64 / (n - 1) as f64
}

/// Triangle mesh of the unit-aspect gyre domain `[0,2]×[0,1]`:
/// 47×24 vertices, 2116 triangles.
pub fn double_gyre_mesh() -> BaseMesh {
    let mesh = BaseMesh::triangulated_grid(&[47, 24]).expect("static dims are valid");
    mesh.map_positions(|p| [p[0] / 23.0, p[1] / 23.0, 0.0])
}

/// Standard oscillating double-gyre velocity (A=0.1, ε=0.25, ω=2π/10),
/// sampled at the vertices of `mesh`; layer `l` is at `t = l·delta_t`.
pub fn double_gyre(mesh: &BaseMesh, delta_t: f64, timesteps: usize) -> TimeSeriesField {
    let (a, eps, omega) = (0.1, 0.25, 2.0 * PI / 10.0);
    let nv = mesh.vertex_count();
    let mut field = TimeSeriesField::new(nv, 2);
    for layer in 0..timesteps {
        let t = layer as f64 * delta_t;
        let s = eps * (omega * t).sin();
        let mut data = Vec::with_capacity(nv * 2);
        for v in 0..nv {
            let [x, y, _] = mesh.position(v as u32);
            let f = s * x * x + (1.0 - 2.0 * s) * x;
            let dfdx = 2.0 * s * x + (1.0 - 2.0 * s);
            // evaluate sin/cos(πy) by reflection so that sin is exactly 0 on
            // both walls y=0 and y=1 (no flow through the box)
            let (sy, cy) = if y > 0.5 {
                ((PI * (1.0 - y)).sin(), -(PI * (1.0 - y)).cos())
            } else {
                ((PI * y).sin(), (PI * y).cos())
            };
            data.push(-PI * a * (PI * f).sin() * cy);
            data.push(PI * a * (PI * f).cos() * sy * dfdx);
        }
        field.push_layer(data).expect("generated layer is well-formed");
    }
    field
}

/// Phase field of a straight vortex line parallel to z:
/// `θ = atan2(y − yc(t), x − xc(t))`, center drifting at `velocity` per layer.
pub fn line_vortex(
    dims: [usize; 3],
    center: [f64; 2],
    velocity: [f64; 2],
    timesteps: usize,
) -> TimeSeriesField {
    let total = dims.iter().product();
    let mut field = TimeSeriesField::new(total, 1);
    for layer in 0..timesteps {
        let t = layer as f64;
        let cx = center[0] + velocity[0] * t;
        let cy = center[1] + velocity[1] * t;
        let mut data = Vec::with_capacity(total);
        for _z in 0..dims[2] {
            for y in 0..dims[1] {
                for x in 0..dims[0] {
                    data.push((y as f64 - cy).atan2(x as f64 - cx));
                }
            }
        }
        field.push_layer(data).expect("generated layer is well-formed");
    }
    field
}

/// Analytic vortex center of [`line_vortex`] at time `t` (layer units).
pub fn line_vortex_center(center: [f64; 2], velocity: [f64; 2], t: f64) -> [f64; 2] {
    [center[0] + velocity[0] * t, center[1] + velocity[1] * t]
}

/// Two equal Gaussian bumps that orbit the origin while approaching it;
/// they coincide (one maximum) for `t ≥ t_half`. Domain `[−1,1]²`.
pub fn merger(dims: [usize; 2], timesteps: usize) -> TimeSeriesField {
    let total = dims[0] * dims[1];
    let t_half = (timesteps as f64 - 1.0) / 2.0;
    let (r0, width, omega) = (0.5, 0.25, 0.35);
    // keep the merged bump off the grid's symmetry point so it stays a
    // strict lattice maximum
    let mid = [0.02, 0.01];
    let mut field = TimeSeriesField::new(total, 1);
    for layer in 0..timesteps {
        let t = layer as f64;
        let r = (r0 * (1.0 - t / t_half)).max(0.0);
        let (s, c) = (omega * t).sin_cos();
        let centers = [[mid[0] + r * c, mid[1] + r * s], [mid[0] - r * c, mid[1] - r * s]];
        let mut data = Vec::with_capacity(total);
        for j in 0..dims[1] {
            for i in 0..dims[0] {
                let x = lattice_to_domain(i, dims[0], 1.0);
                let y = lattice_to_domain(j, dims[1], 1.0);
                let mut f = 0.0;
                for cc in centers {
                    let d2 = (x - cc[0]).powi(2) + (y - cc[1]).powi(2);
                    f += (-d2 / (2.0 * width * width)).exp();
                }
                data.push(f);
            }
        }
        field.push_layer(data).expect("generated layer is well-formed");
    }
    field
}

/// Smooth pseudo-turbulent 3-component velocity: a fixed sum of seeded
/// random-phase sine modes drifting linearly in time. Used for
/// benchmark-scale sweeps, not for ground-truth comparisons.
pub fn turbulent(dims: [usize; 3], seed: u64, timesteps: usize) -> TimeSeriesField {
    const MODES: usize = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // amplitude, wavevector (radians per lattice step), phase, drift
    let mut modes = [[0.0f64; 6]; MODES * 3];
    for m in modes.iter_mut() {
        let scale = 2.0 * PI / 32.0;
        *m = [
            rng.gen_range(0.2..1.0),
            rng.gen_range(-3.0..3.0) * scale,
            rng.gen_range(-3.0..3.0) * scale,
            rng.gen_range(-3.0..3.0) * scale,
            rng.gen_range(0.0..2.0 * PI),
            rng.gen_range(-0.5..0.5),
        ];
    }
    let total = dims.iter().product();
    let mut field = TimeSeriesField::new(total, 3);
    for layer in 0..timesteps {
        let t = layer as f64;
        let mut data = vec![0.0; total * 3];
        let mut idx = 0;
        for z in 0..dims[2] {
            for y in 0..dims[1] {
                for x in 0..dims[0] {
                    for comp in 0..3 {
                        let mut v = 0.0;
                        for m in &modes[comp * MODES..(comp + 1) * MODES] {
                            let arg = m[1] * x as f64 + m[2] * y as f64 + m[3] * z as f64
                                + m[4]
                                + m[5] * t;
                            v += m[0] * arg.sin();
                        }
                        data[idx] = v;
                        idx += 1;
                    }
                }
            }
        }
        field.push_layer(data).expect("generated layer is well-formed");
    }
    field
}

/// Adds seeded iid Gaussian noise (standard deviation `sigma`) to every
/// sample. Layer `l` uses an independent, reproducible stream, so
/// regeneration of any single layer gives identical values.
pub fn add_noise(field: &mut TimeSeriesField, sigma: f64, seed: u64) {
    if sigma == 0.0 {
        return;
    }
    let mut rngs: Vec<ChaCha8Rng> = (0..field.timesteps())
        .map(|layer| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(layer as u64 + 1);
            rng
        })
        .collect();
    field.map_in_place(|layer, sample| {
        for x in sample {
            *x += sigma * standard_normal(&mut rngs[layer]);
        }
    });
}

/// Box–Muller transform over the ChaCha stream.
fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = loop {
        let u = rng.gen::<f64>();
        if u > 0.0 {
            break u;
        }
    };
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Named generator selection for the command-line interface.
#[derive(Clone, Debug)]
pub struct SyntheticSpec {
    pub kind: String,
    pub dims: Vec<usize>,
    pub timesteps: usize,
    pub x0: [f64; 3],
    pub d: [f64; 3],
    pub alpha: f64,
    pub sigma: f64,
    pub seed: u64,
    pub delta_t: f64,
}

impl SyntheticSpec {
    pub fn defaults(kind: &str) -> Result<Self> {
        let (dims, timesteps, delta_t): (Vec<usize>, usize, f64) = match kind {
            "moving_minimum" => (vec![21, 21, 21], 6, 1.0),
            "double_gyre" => (vec![47, 24], 401, 0.1),
            "spiral_woven" => (vec![128, 128], 32, 0.01),
            "merger" => (vec![64, 64], 24, 1.0),
            "moving_plane" => (vec![21, 21, 21], 12, 1.0),
            "line_vortex" => (vec![16, 16, 16], 4, 1.0),
            other => return Err(Error::Config(format!("unknown synthetic kind {other:?}"))),
        };
        // A phase singularity sitting exactly on a lattice vertex samples
        // atan2(0, 0) there, so the vortex default keeps the core between
        // vertices.
        let (x0, d) = if kind == "line_vortex" {
            ([8.3, 7.6, 0.0], [0.5, 0.25, 0.0])
        } else {
            ([10.0, 10.0, 10.0], [0.5, 0.5, 0.5])
        };
        Ok(SyntheticSpec {
            kind: kind.to_string(),
            dims,
            timesteps,
            x0,
            d,
            alpha: 0.9,
            sigma: 0.0,
            seed: 42,
            delta_t,
        })
    }

    /// Generated samples plus, for mesh-based kinds, the spatial mesh.
    pub fn generate(&self) -> Result<(TimeSeriesField, Option<BaseMesh>)> {
        let d3 = |s: &Self| -> [usize; 3] {
            let mut d = [1, 1, 1];
            d[..s.dims.len().min(3)].copy_from_slice(&s.dims[..s.dims.len().min(3)]);
            d
        };
        let d2 = |s: &Self| [s.dims[0], s.dims.get(1).copied().unwrap_or(s.dims[0])];
        let (mut field, mesh) = match self.kind.as_str() {
            "moving_minimum" => (moving_minimum(d3(self), self.x0, self.d, self.timesteps), None),
            "double_gyre" => {
                let mesh = double_gyre_mesh();
                (double_gyre(&mesh, self.delta_t, self.timesteps), Some(mesh))
            }
            "spiral_woven" => {
                (spiral_woven(d2(self), 40.0, self.delta_t, self.timesteps), None)
            }
            "merger" => (merger(d2(self), self.timesteps), None),
            "moving_plane" => (moving_plane(d3(self), self.alpha, self.timesteps), None),
            "line_vortex" => {
                let c = [self.x0[0], self.x0[1]];
                let v = [self.d[0], self.d[1]];
                (line_vortex(d3(self), c, v, self.timesteps), None)
            }
            other => return Err(Error::Config(format!("unknown synthetic kind {other:?}"))),
        };
        add_noise(&mut field, self.sigma, self.seed);
        Ok((field, mesh))
    }
}
