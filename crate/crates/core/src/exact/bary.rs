//! Locating the zero of a linear interpolant inside a simplex.
//!
//! Detection decides *whether* a simplex contains a zero using exact
//! perturbed arithmetic; this module then computes *where*, in plain f64.
//! The zero's barycentric weights solve Σ μ_i v_i = 0 with Σ μ_i = 1, an
//! (n+1)×(n+1) linear system solved by Cramer's rule.

/// Slightly negative weights (from roundoff when the zero sits on a face)
/// are clamped to zero; anything worse is treated as failure.
const SLACK: f64 = 1e-12;

/// Barycentric coordinates of the interpolated zero of `values` (n+1
/// samples of n components). Returns `None` when the samples are too
/// degenerate to invert; callers fall back to the simplex barycenter.
pub fn zero_barycentric(values: &[[f64; 3]], n: usize) -> Option<Vec<f64>> {
    debug_assert!((1..=3).contains(&n) && values.len() == n + 1);
    let dim = n + 1;
    let mut m = [[0f64; 4]; 4];
    for (i, v) in values.iter().enumerate() {
        for (c, row) in m.iter_mut().enumerate().take(n) {
            row[i] = v[c];
        }
        m[n][i] = 1.0;
    }
    let det = det_f64(&m, dim);
    if det == 0.0 || !det.is_finite() {
        return None;
    }
    let mut mu = vec![0f64; dim];
    for (i, out) in mu.iter_mut().enumerate() {
        let mut mi = m;
        for (r, row) in mi.iter_mut().enumerate().take(dim) {
            row[i] = if r == n { 1.0 } else { 0.0 };
        }
        *out = det_f64(&mi, dim) / det;
    }
    for x in &mut mu {
        if *x < 0.0 {
            if *x < -SLACK {
                return None;
            }
            *x = 0.0;
        }
    }
    let sum: f64 = mu.iter().sum();
    if !sum.is_finite() || sum <= 0.0 {
        return None;
    }
    for x in &mut mu {
        *x /= sum;
    }
    Some(mu)
}

/// Fraction along the edge (i → j) where a linear scalar crosses `level`,
/// clamped to [0, 1]. Callers only invoke this when the perturbed signs of
/// `fi - level` and `fj - level` differ, which implies `fi != fj`.
pub fn crossing_fraction(fi: f64, fj: f64, level: f64) -> f64 {
    let denom = fj - fi;
    if denom == 0.0 || !denom.is_finite() {
        return 0.5;
    }
    ((level - fi) / denom).clamp(0.0, 1.0)
}

pub(crate) fn det_f64(m: &[[f64; 4]; 4], n: usize) -> f64 {
    let d3 = |r: [usize; 3], c: [usize; 3]| {
        m[r[0]][c[0]] * (m[r[1]][c[1]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[1]])
            - m[r[0]][c[1]] * (m[r[1]][c[0]] * m[r[2]][c[2]] - m[r[1]][c[2]] * m[r[2]][c[0]])
            + m[r[0]][c[2]] * (m[r[1]][c[0]] * m[r[2]][c[1]] - m[r[1]][c[1]] * m[r[2]][c[0]])
    };
    match n {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => d3([0, 1, 2], [0, 1, 2]),
        4 => {
            m[0][0] * d3([1, 2, 3], [1, 2, 3]) - m[0][1] * d3([1, 2, 3], [0, 2, 3])
                + m[0][2] * d3([1, 2, 3], [0, 1, 3])
                - m[0][3] * d3([1, 2, 3], [0, 1, 2])
        }
        _ => unreachable!("systems are at most 4×4"),
    }
}
