//! Derived quantities: finite-difference gradients on grids and affine
//! velocity gradients on simplices.

use crate::exact::bary::det_f64;
use crate::mesh::base::BaseMesh;

/// Per-sample spatial gradient of a scalar grid layer, `n` interleaved
/// components per sample. Uses central differences in the interior and
/// one-sided differences on the boundary; grid spacing is 1.
pub fn grid_gradient(data: &[f64], dims: [usize; 3], n: usize) -> Vec<f64> {
    let total: usize = dims.iter().product();
    assert_eq!(data.len(), total, "sample count must match the grid");
    let strides = [1, dims[0], dims[0] * dims[1]];
    let mut out = vec![0.0; total * n];
    for z in 0..dims[2] {
        for y in 0..dims[1] {
            for x in 0..dims[0] {
                let i = x + strides[1] * y + strides[2] * z;
                let coord = [x, y, z];
                for axis in 0..n {
                    let (s, w, c) = (strides[axis], dims[axis], coord[axis]);
                    out[i * n + axis] = if w == 1 {
                        0.0
                    } else if c == 0 {
                        data[i + s] - data[i]
                    } else if c == w - 1 {
                        data[i] - data[i - s]
                    } else {
                        (data[i + s] - data[i - s]) / 2.0
                    };
                }
            }
        }
    }
    out
}

/// Spatial velocity gradient `J[c][a] = dv_c/dx_a` of the affine interpolant
/// through `m = points.len()` spacetime samples spanning an `(m-1)`-simplex.
/// `points` are `(x, y, z, t)` with the first `n` spatial coordinates in use.
/// Returns `None` when the simplex is degenerate.
pub fn jacobian_from_cell(
    points: &[[f64; 4]],
    values: &[[f64; 3]],
    n: usize,
) -> Option<[[f64; 3]; 3]> {
    let m = points.len();
    debug_assert_eq!(values.len(), m);
    debug_assert_eq!(m, n + 2, "expected a spacetime cell with n+2 vertices");
    // Unknowns per value component: the full spacetime gradient (n spatial
    // slots followed by time), solved from vertex differences by Cramer.
    let dim = n + 1;
    let col = |k: usize| if k < n { k } else { 3 };
    let mut mat = [[0.0; 4]; 4];
    for i in 0..dim {
        for k in 0..dim {
            mat[i][k] = points[i + 1][col(k)] - points[0][col(k)];
        }
    }
    let den = det_f64(&mat, dim);
    if den == 0.0 || !den.is_finite() {
        return None;
    }
    let mut jac = [[0.0; 3]; 3];
    for c in 0..n {
        for a in 0..n {
            let mut num = mat;
            for i in 0..dim {
                num[i][a] = values[i + 1][c] - values[0][c];
            }
            let g = det_f64(&num, dim) / den;
            if !g.is_finite() {
                return None;
            }
            jac[c][a] = g;
        }
    }
    Some(jac)
}

/// Velocity gradient `J[c][a] = dv_c/dx_a` at one lattice vertex of a grid
/// layer, by the same difference stencil as [`grid_gradient`]. `vec` holds
/// one velocity vector per grid sample, x-fastest.
pub fn grid_jacobian_at(
    vec: &[[f64; 3]],
    dims: [usize; 3],
    n: usize,
    at: [usize; 3],
) -> [[f64; 3]; 3] {
    let strides = [1, dims[0], dims[0] * dims[1]];
    let i = at[0] + strides[1] * at[1] + strides[2] * at[2];
    let mut jac = [[0.0; 3]; 3];
    for a in 0..n {
        let (s, w, c) = (strides[a], dims[a], at[a]);
        for comp in 0..n {
            jac[comp][a] = if w == 1 {
                0.0
            } else if c == 0 {
                vec[i + s][comp] - vec[i][comp]
            } else if c == w - 1 {
                vec[i][comp] - vec[i - s][comp]
            } else {
                (vec[i + s][comp] - vec[i - s][comp]) / 2.0
            };
        }
    }
    jac
}

/// Spatial velocity gradient of the affine interpolant through the `n + 1`
/// vertices of one spatial `n`-simplex. Returns `None` when degenerate.
pub fn spatial_jacobian_fit(
    points: &[[f64; 3]],
    values: &[[f64; 3]],
    n: usize,
) -> Option<[[f64; 3]; 3]> {
    debug_assert_eq!(points.len(), n + 1);
    debug_assert_eq!(values.len(), n + 1);
    let mut mat = [[0.0; 4]; 4];
    for i in 0..n {
        for k in 0..n {
            mat[i][k] = points[i + 1][k] - points[0][k];
        }
    }
    let den = det_f64(&mat, n);
    if den == 0.0 || !den.is_finite() {
        return None;
    }
    let mut jac = [[0.0; 3]; 3];
    for c in 0..n {
        for a in 0..n {
            let mut num = mat;
            for i in 0..n {
                num[i][a] = values[i + 1][c] - values[0][c];
            }
            let g = det_f64(&num, n) / den;
            if !g.is_finite() {
                return None;
            }
            jac[c][a] = g;
        }
    }
    Some(jac)
}

/// Per-vertex scalar gradient on a simplicial mesh: the average of the
/// linear-fit gradients of all top cells sharing each vertex, `mesh.dim()`
/// interleaved components per vertex. Degenerate cells are skipped.
pub fn vertex_gradient_average(mesh: &BaseMesh, scalar: &[f64]) -> Vec<f64> {
    let n = mesh.dim();
    assert_eq!(scalar.len(), mesh.vertex_count(), "one sample per vertex");
    let mut sums = vec![0.0; mesh.vertex_count() * n];
    let mut counts = vec![0u32; mesh.vertex_count()];
    let mut pts = Vec::with_capacity(n + 1);
    let mut vals = Vec::with_capacity(n + 1);
    for cell in 0..mesh.face_count(n) {
        let verts = mesh.face(n, cell as u32);
        pts.clear();
        vals.clear();
        for &v in verts {
            pts.push(mesh.position(v));
            vals.push([scalar[v as usize], 0.0, 0.0]);
        }
        if let Some(jac) = spatial_jacobian_fit(&pts, &vals, n) {
            for &v in verts {
                for a in 0..n {
                    sums[v as usize * n + a] += jac[0][a];
                }
                counts[v as usize] += 1;
            }
        }
    }
    for v in 0..mesh.vertex_count() {
        if counts[v] > 0 {
            for a in 0..n {
                sums[v * n + a] /= counts[v] as f64;
            }
        }
    }
    sums
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gradient_of_affine_field_is_exact_everywhere() {
        let dims = [5, 4, 3];
        let mut data = Vec::new();
        for z in 0..3 {
            for y in 0..4 {
                for x in 0..5 {
                    data.push(2.0 * x as f64 - 3.0 * y as f64 + 0.5 * z as f64 + 7.0);
                }
            }
        }
        let g = grid_gradient(&data, dims, 3);
        for i in 0..data.len() {
            assert_eq!(&g[3 * i..3 * i + 3], &[2.0, -3.0, 0.5]);
        }
    }

    #[test]
    fn gradient_of_quadratic_is_exact_in_the_interior() {
        let dims = [6, 1, 1];
        let data: Vec<f64> = (0..6).map(|x| (x * x) as f64).collect();
        let g = grid_gradient(&data, dims, 1);
        assert_eq!(g, vec![1.0, 2.0, 4.0, 6.0, 8.0, 9.0]);
    }

    #[test]
    fn planar_gradient_ignores_missing_axes() {
        let dims = [3, 3, 1];
        let data: Vec<f64> = (0..9).map(|i| (i % 3 + i / 3) as f64).collect();
        let g = grid_gradient(&data, dims, 2);
        for i in 0..9 {
            assert_eq!(&g[2 * i..2 * i + 2], &[1.0, 1.0]);
        }
    }

    #[test]
    fn affine_velocity_gradient_is_recovered() {
        let a = [[1.5, -0.25, 0.0], [2.0, 0.75, -1.0], [0.5, 0.0, 3.0]];
        let b = [0.3, -0.7, 0.1];
        let pts: [[f64; 4]; 5] = [
            [0.0, 0.0, 0.0, 0.0],
            [1.0, 0.2, -0.1, 0.0],
            [0.1, 1.3, 0.4, 0.5],
            [-0.3, 0.1, 1.1, 0.0],
            [0.2, -0.2, 0.3, 1.0],
        ];
        let vals: Vec<[f64; 3]> = pts
            .iter()
            .map(|p| {
                let mut v = [0.0; 3];
                for c in 0..3 {
                    v[c] = (0..3).map(|k| a[c][k] * p[k]).sum::<f64>() + b[c] * p[3] + 0.9;
                }
                v
            })
            .collect();
        let jac = jacobian_from_cell(&pts, &vals, 3).unwrap();
        for c in 0..3 {
            for k in 0..3 {
                assert!((jac[c][k] - a[c][k]).abs() < 1e-12, "J[{c}][{k}] = {}", jac[c][k]);
            }
        }
    }

    #[test]
    fn planar_cell_recovers_2x2_gradient() {
        let pts: [[f64; 4]; 4] = [
            [0.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 1.0],
            [0.4, 0.6, 0.0, 2.0],
        ];
        let f = |p: &[f64; 4]| [3.0 * p[0] - p[1] + 2.0 * p[3], p[0] + 5.0 * p[1], 0.0];
        let vals: Vec<[f64; 3]> = pts.iter().map(f).collect();
        let jac = jacobian_from_cell(&pts, &vals, 2).unwrap();
        assert!((jac[0][0] - 3.0).abs() < 1e-12);
        assert!((jac[0][1] + 1.0).abs() < 1e-12);
        assert!((jac[1][0] - 1.0).abs() < 1e-12);
        assert!((jac[1][1] - 5.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_cell_is_refused() {
        let pts: [[f64; 4]; 4] = [
            [0.0, 0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0, 0.0],
            [2.0, 0.0, 0.0, 0.0],
            [3.0, 0.0, 0.0, 0.0],
        ];
        let vals = vec![[0.0; 3]; 4];
        assert!(jacobian_from_cell(&pts, &vals, 2).is_none());
    }

    #[test]
    fn vertex_jacobian_matches_affine_field() {
        let dims = [4, 3, 2];
        let a = [[1.0, -2.0, 0.5], [0.0, 3.0, 1.0], [-1.0, 0.25, 2.0]];
        let mut vec = Vec::new();
        for z in 0..2 {
            for y in 0..3 {
                for x in 0..4 {
                    let p = [x as f64, y as f64, z as f64];
                    let mut v = [0.0; 3];
                    for c in 0..3 {
                        v[c] = (0..3).map(|k| a[c][k] * p[k]).sum();
                    }
                    vec.push(v);
                }
            }
        }
        for &at in &[[0, 0, 0], [3, 2, 1], [2, 1, 0]] {
            let jac = grid_jacobian_at(&vec, dims, 3, at);
            for c in 0..3 {
                for k in 0..3 {
                    assert!((jac[c][k] - a[c][k]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn spatial_fit_recovers_gradient_on_triangle() {
        let pts = [[0.0, 0.0, 0.0], [2.0, 0.0, 0.0], [0.5, 1.5, 0.0]];
        let f = |p: &[f64; 3]| [4.0 * p[0] - p[1] + 3.0, -2.0 * p[0] + 0.5 * p[1], 0.0];
        let vals: Vec<[f64; 3]> = pts.iter().map(f).collect();
        let jac = spatial_jacobian_fit(&pts, &vals, 2).unwrap();
        assert!((jac[0][0] - 4.0).abs() < 1e-12);
        assert!((jac[0][1] + 1.0).abs() < 1e-12);
        assert!((jac[1][0] + 2.0).abs() < 1e-12);
        assert!((jac[1][1] - 0.5).abs() < 1e-12);
        let degenerate = [[0.0; 3], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]];
        assert!(spatial_jacobian_fit(&degenerate, &vals, 2).is_none());
    }

    #[test]
    fn averaged_vertex_gradient_is_exact_for_affine_scalars() {
        let mesh = BaseMesh::triangulated_grid(&[4, 4]).unwrap();
        let scalar: Vec<f64> = (0..mesh.vertex_count())
            .map(|v| {
                let p = mesh.position(v as u32);
                2.5 * p[0] - 1.5 * p[1] + 4.0
            })
            .collect();
        let g = vertex_gradient_average(&mesh, &scalar);
        for v in 0..mesh.vertex_count() {
            assert!((g[2 * v] - 2.5).abs() < 1e-12);
            assert!((g[2 * v + 1] + 1.5).abs() < 1e-12);
        }
    }
}
