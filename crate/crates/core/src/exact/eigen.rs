//! Classification of critical points by the local Jacobian.
//!
//! A zero of a vector field is typed by the real parts of the Jacobian's
//! eigenvalues; a critical point of a scalar field by the (real) spectrum of
//! its Hessian. Anything with an eigenvalue real part within a relative
//! tolerance of zero is reported as degenerate rather than guessed.

pub const DEFAULT_EIGEN_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CriticalKind {
    /// All eigenvalue real parts positive (flow leaves the point).
    Source,
    /// All negative.
    Sink,
    /// Mixed signs (vector field).
    Saddle,
    /// Hessian negative definite: local maximum of the scalar field.
    Maximum,
    /// Hessian positive definite: local minimum.
    Minimum,
    /// Indefinite Hessian.
    ScalarSaddle,
    /// Some real part indistinguishable from zero at the given tolerance.
    Degenerate,
}

impl std::fmt::Display for CriticalKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CriticalKind::Source => "source",
            CriticalKind::Sink => "sink",
            CriticalKind::Saddle => "saddle",
            CriticalKind::Maximum => "max",
            CriticalKind::Minimum => "min",
            CriticalKind::ScalarSaddle => "saddle-scalar",
            CriticalKind::Degenerate => "degenerate",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for CriticalKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "source" => CriticalKind::Source,
            "sink" => CriticalKind::Sink,
            "saddle" => CriticalKind::Saddle,
            "max" => CriticalKind::Maximum,
            "min" => CriticalKind::Minimum,
            "saddle-scalar" => CriticalKind::ScalarSaddle,
            "degenerate" => CriticalKind::Degenerate,
            _ => return Err(format!("unknown critical point kind {s:?}")),
        })
    }
}

/// Types a vector-field zero from its Jacobian (row-major, n ≤ 3).
pub fn classify_general(j: &[[f64; 3]; 3], n: usize, tol_rel: f64) -> CriticalKind {
    classify(&real_parts(j, n), n, tol(j, n, tol_rel), false)
}

/// Types a scalar-field critical point from its (symmetric) Hessian.
pub fn classify_symmetric(j: &[[f64; 3]; 3], n: usize, tol_rel: f64) -> CriticalKind {
    classify(&real_parts(j, n), n, tol(j, n, tol_rel), true)
}

fn tol(j: &[[f64; 3]; 3], n: usize, tol_rel: f64) -> f64 {
    let norm = j
        .iter()
        .take(n)
        .map(|row| row.iter().take(n).map(|x| x.abs()).sum::<f64>())
        .fold(0.0f64, f64::max);
    tol_rel * norm
}

fn classify(re: &[f64], n: usize, tol: f64, symmetric: bool) -> CriticalKind {
    let re = &re[..n];
    if re.iter().any(|x| !x.is_finite() || x.abs() <= tol) {
        return CriticalKind::Degenerate;
    }
    let pos = re.iter().filter(|&&x| x > 0.0).count();
    match (pos == n, pos == 0, symmetric) {
        (true, _, false) => CriticalKind::Source,
        (_, true, false) => CriticalKind::Sink,
        (_, _, false) => CriticalKind::Saddle,
        (true, _, true) => CriticalKind::Minimum,
        (_, true, true) => CriticalKind::Maximum,
        (_, _, true) => CriticalKind::ScalarSaddle,
    }
}

/// Real parts of the eigenvalues, in no particular order.
fn real_parts(j: &[[f64; 3]; 3], n: usize) -> [f64; 3] {
    match n {
        1 => [j[0][0], 0.0, 0.0],
        2 => {
            let tr = j[0][0] + j[1][1];
            let disc = (j[0][0] - j[1][1]).powi(2) + 4.0 * j[0][1] * j[1][0];
            if disc >= 0.0 {
                let s = disc.sqrt();
                [(tr + s) / 2.0, (tr - s) / 2.0, 0.0]
            } else {
                [tr / 2.0, tr / 2.0, 0.0]
            }
        }
        3 => {
            // characteristic polynomial λ³ + a λ² + b λ + c
            let tr = j[0][0] + j[1][1] + j[2][2];
            let minors = j[0][0] * j[1][1] - j[0][1] * j[1][0] + j[0][0] * j[2][2]
                - j[0][2] * j[2][0]
                + j[1][1] * j[2][2]
                - j[1][2] * j[2][1];
            let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
                - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
                + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
            let (a, b, c) = (-tr, minors, -det);
            // depressed cubic x³ + px + q with λ = x − a/3
            let p = b - a * a / 3.0;
            let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
            let shift = -a / 3.0;
            let disc = -4.0 * p * p * p - 27.0 * q * q;
            if p == 0.0 && q == 0.0 {
                return [shift; 3];
            }
            if disc >= 0.0 {
                // three real roots (p < 0 here), by the trigonometric form
                let r = 2.0 * (-p / 3.0).sqrt();
                let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
                let theta = arg.acos();
                let mut out = [0.0; 3];
                for (k, o) in out.iter_mut().enumerate() {
                    *o = r * ((theta - 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos() + shift;
                }
                out
            } else {
                // one real root and a conjugate pair; roots of the depressed
                // cubic sum to zero, so the pair has real part -x1/2
                let x1 = if p == 0.0 {
                    -q.cbrt()
                } else {
                    let u = (-q / 2.0 + (q * q / 4.0 + p * p * p / 27.0).sqrt()).cbrt();
                    if u == 0.0 {
                        0.0
                    } else {
                        u - p / (3.0 * u)
                    }
                };
                [x1 + shift, -x1 / 2.0 + shift, -x1 / 2.0 + shift]
            }
        }
        _ => unreachable!("jacobians are at most 3×3"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn diag(d: &[f64]) -> [[f64; 3]; 3] {
        let mut j = [[0.0; 3]; 3];
        for (i, &x) in d.iter().enumerate() {
            j[i][i] = x;
        }
        j
    }

    #[test]
    fn definite_and_mixed_spectra_are_typed() {
        let t = DEFAULT_EIGEN_TOL;
        assert_eq!(classify_general(&diag(&[2., 3.]), 2, t), CriticalKind::Source);
        assert_eq!(classify_symmetric(&diag(&[2., 3.]), 2, t), CriticalKind::Minimum);
        assert_eq!(classify_general(&diag(&[-1., -2., -3.]), 3, t), CriticalKind::Sink);
        assert_eq!(classify_symmetric(&diag(&[-1., -2., -3.]), 3, t), CriticalKind::Maximum);
        assert_eq!(classify_general(&diag(&[2., -1.]), 2, t), CriticalKind::Saddle);
        assert_eq!(classify_symmetric(&diag(&[2., -1., 5.]), 3, t), CriticalKind::ScalarSaddle);
    }

    #[test]
    fn rotations_and_centers_are_degenerate() {
        let t = DEFAULT_EIGEN_TOL;
        let rot = [[0., -1., 0.], [1., 0., 0.], [0., 0., 0.]];
        assert_eq!(classify_general(&rot, 2, t), CriticalKind::Degenerate);
        // pure rotation around one axis in 3d: eigenvalues -2, ±3i
        let mixed = [[-2., 0., 0.], [0., 0., -3.], [0., 3., 0.]];
        assert_eq!(classify_general(&mixed, 3, t), CriticalKind::Degenerate);
        assert_eq!(classify_general(&diag(&[0., 0.]), 2, t), CriticalKind::Degenerate);
    }

    #[test]
    fn spirals_use_the_real_part() {
        let t = DEFAULT_EIGEN_TOL;
        let spiral_in = [[-1., -5., 0.], [5., -1., 0.], [0., 0., 0.]];
        assert_eq!(classify_general(&spiral_in, 2, t), CriticalKind::Sink);
        let spiral_out3 = [[0.5, -4., 0.], [4., 0.5, 0.], [0., 0., 2.]];
        assert_eq!(classify_general(&spiral_out3, 3, t), CriticalKind::Source);
    }

    #[test]
    fn tolerance_is_relative_to_the_matrix_scale() {
        let t = DEFAULT_EIGEN_TOL;
        assert_eq!(classify_general(&diag(&[1e-20, 2e-20]), 2, t), CriticalKind::Source);
        assert_eq!(
            classify_general(&diag(&[1.0, 1e-15]), 2, t),
            CriticalKind::Degenerate,
            "an eigenvalue twelve orders below the norm is noise"
        );
    }

    #[test]
    fn random_symmetric_matrices_recover_their_spectrum() {
        let mut rng = StdRng::seed_from_u64(2024);
        for _ in 0..300 {
            // build Q Λ Qᵀ from three rotations and a known spectrum
            let mut lam = [0.0f64; 3];
            for l in &mut lam {
                *l = rng.gen_range(0.5..3.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            }
            let mut m = diag(&lam);
            for axis in 0..3 {
                let ang = rng.gen_range(0.0..std::f64::consts::TAU);
                let (s, c) = ang.sin_cos();
                let (i, j) = ((axis + 1) % 3, (axis + 2) % 3);
                // rotate rows then columns
                let mut r = m;
                for k in 0..3 {
                    r[i][k] = c * m[i][k] - s * m[j][k];
                    r[j][k] = s * m[i][k] + c * m[j][k];
                }
                m = r;
                let mut r = m;
                for k in 0..3 {
                    r[k][i] = c * m[k][i] - s * m[k][j];
                    r[k][j] = s * m[k][i] + c * m[k][j];
                }
                m = r;
            }
            let mut got = real_parts(&m, 3);
            got.sort_by(f64::total_cmp);
            lam.sort_by(f64::total_cmp);
            for (g, l) in got.iter().zip(&lam) {
                assert!((g - l).abs() < 1e-6, "got {got:?} want {lam:?}");
            }
            let expect = match (lam.iter().all(|&x| x > 0.0), lam.iter().all(|&x| x < 0.0)) {
                (true, _) => CriticalKind::Minimum,
                (_, true) => CriticalKind::Maximum,
                _ => CriticalKind::ScalarSaddle,
            };
            assert_eq!(classify_symmetric(&m, 3, DEFAULT_EIGEN_TOL), expect);
        }
    }
}
