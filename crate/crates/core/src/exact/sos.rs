//! Symbolically perturbed sign predicates.
//!
//! The sign of a determinant of quantized samples decides every topological
//! question in this crate. To make those decisions total (never zero) and
//! globally consistent, sample (vertex, component) is treated as carrying an
//! infinitesimal perturbation ε^(2^slot), where slots number the pairs
//! (global vertex id, component) in ascending order — earlier pairs perturb
//! more strongly. Expanding the perturbed determinant orders its terms by
//! the bitmask of slots they use; the sign of the first term with a nonzero
//! coefficient is the answer. The term using every row and column has
//! coefficient ±1, so the walk always terminates, and because equal samples
//! receive equal perturbations wherever they appear, adjacent simplices
//! always make complementary decisions about shared degeneracies.

use num_bigint::{BigInt, Sign};

/// Sign of `det(rows)` where entry (r, c) is perturbed according to the
/// global pair (ids[r], c). Rows are quantized samples, k ≤ 3 of them, using
/// the first k components of each row. Ids must be distinct.
pub fn sign_det_sos(rows: &[[i64; 3]], ids: &[u64]) -> i8 {
    let k = rows.len();
    debug_assert!((1..=3).contains(&k) && ids.len() == k);
    debug_assert!((0..k).all(|i| (0..i).all(|j| ids[i] != ids[j])), "vertex ids must differ");

    // Leading term: the unperturbed determinant.
    let s = exact_det_sign(rows, k);
    if s != 0 {
        return s;
    }

    // Cells ordered by perturbation strength (strongest first).
    let mut cells: Vec<(u64, usize, usize)> = Vec::with_capacity(k * k);
    for r in 0..k {
        for c in 0..k {
            cells.push((ids[r], c, r));
        }
    }
    cells.sort_unstable();
    let cells: Vec<(usize, usize)> = cells.into_iter().map(|(_, c, r)| (r, c)).collect();

    // Remaining terms in descending magnitude = ascending slot bitmask.
    for mask in 1u32..1 << (k * k) {
        let mut rows_used = 0u32;
        let mut cols_used = 0u32;
        let mut ok = true;
        for (slot, &(r, c)) in cells.iter().enumerate() {
            if mask >> slot & 1 == 1 {
                if rows_used >> r & 1 == 1 || cols_used >> c & 1 == 1 {
                    ok = false;
                    break;
                }
                rows_used |= 1 << r;
                cols_used |= 1 << c;
            }
        }
        if !ok {
            continue;
        }

        // Sign of this partial permutation: delete its cells one by one
        // (highest row first), accumulating cofactor parities at the
        // positions the cells occupy in the shrinking matrix.
        let mut alive_rows: Vec<usize> = (0..k).collect();
        let mut alive_cols: Vec<usize> = (0..k).collect();
        let mut sign = 1i8;
        let mut chosen: Vec<(usize, usize)> = cells
            .iter()
            .enumerate()
            .filter(|&(slot, _)| mask >> slot & 1 == 1)
            .map(|(_, &cell)| cell)
            .collect();
        chosen.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        for (r, c) in chosen {
            let pr = alive_rows.iter().position(|&x| x == r).unwrap();
            let pc = alive_cols.iter().position(|&x| x == c).unwrap();
            if (pr + pc) % 2 == 1 {
                sign = -sign;
            }
            alive_rows.remove(pr);
            alive_cols.remove(pc);
        }

        let minor = minor_sign(rows, &alive_rows, &alive_cols);
        if minor != 0 {
            return sign * minor;
        }
    }
    unreachable!("the full-permutation term has coefficient ±1")
}

/// Sign of a det over the listed rows/cols (size ≤ 2, exact in i128).
fn minor_sign(rows: &[[i64; 3]], alive_rows: &[usize], alive_cols: &[usize]) -> i8 {
    let v = match alive_rows.len() {
        0 => return 1,
        1 => rows[alive_rows[0]][alive_cols[0]] as i128,
        2 => {
            let e = |i: usize, j: usize| rows[alive_rows[i]][alive_cols[j]] as i128;
            e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0)
        }
        _ => unreachable!("minors in the perturbation walk have size ≤ 2"),
    };
    sign_i128(v)
}

fn sign_i128(v: i128) -> i8 {
    match v.cmp(&0) {
        std::cmp::Ordering::Less => -1,
        std::cmp::Ordering::Equal => 0,
        std::cmp::Ordering::Greater => 1,
    }
}

/// Exact sign of an unperturbed k×k determinant of i64 entries.
fn exact_det_sign(rows: &[[i64; 3]], k: usize) -> i8 {
    match k {
        1 => sign_i128(rows[0][0] as i128),
        2 => sign_i128(
            rows[0][0] as i128 * rows[1][1] as i128 - rows[0][1] as i128 * rows[1][0] as i128,
        ),
        3 => {
            // Fast path: f64 evaluation with a conservative roundoff bound.
            // Quantized entries convert to f64 exactly (|q| < 2^53).
            let a: Vec<[f64; 3]> =
                rows.iter().map(|r| [r[0] as f64, r[1] as f64, r[2] as f64]).collect();
            let det = a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
            let mag = a.iter().flatten().fold(0.0f64, |m, &x| m.max(x.abs()));
            let bound = 4096.0 * mag * mag * mag * f64::EPSILON;
            if det.abs() > bound {
                return if det > 0.0 { 1 } else { -1 };
            }
            // Uncertain: exact big-integer evaluation.
            let b = |i: usize, j: usize| BigInt::from(rows[i][j]);
            let det = b(0, 0) * (b(1, 1) * b(2, 2) - b(1, 2) * b(2, 1))
                - b(0, 1) * (b(1, 0) * b(2, 2) - b(1, 2) * b(2, 0))
                + b(0, 2) * (b(1, 0) * b(2, 1) - b(1, 1) * b(2, 0));
            match det.sign() {
                Sign::Plus => 1,
                Sign::Minus => -1,
                Sign::NoSign => 0,
            }
        }
        _ => unreachable!("determinants are at most 3×3"),
    }
}

/// Perturbed sign of a single quantized sample: zero counts as positive
/// (the 1×1 case of [`sign_det_sos`], where the perturbation alone remains).
pub fn sign_scalar_sos(q: i64) -> i8 {
    if q < 0 {
        -1
    } else {
        1
    }
}

/// Does the perturbed linear interpolant of the given vector samples vanish
/// inside the simplex? `values[i]` are the n quantized components at vertex
/// i; `ids[i]` its global id; vertices in ascending id order.
///
/// The zero lies inside iff all n+1 barycentric numerators share one sign.
/// Numerator i is the determinant of the augmented sample matrix (samples
/// plus a ones column) with row i replaced by (0,…,0,1), which expands to
/// (−1)^(i+n) times the plain n×n sample determinant without row i.
pub fn origin_in_simplex_sos(values: &[[i64; 3]], ids: &[u64], n: usize) -> bool {
    debug_assert!((1..=3).contains(&n) && values.len() == n + 1 && ids.len() == n + 1);
    let mut first = 0i8;
    for i in 0..=n {
        let mut rows = [[0i64; 3]; 3];
        let mut rid = [0u64; 3];
        for (j, src) in (0..=n).filter(|&j| j != i).enumerate() {
            rows[j] = values[src];
            rid[j] = ids[src];
        }
        let mut s = sign_det_sos(&rows[..n], &rid[..n]);
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

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Independent oracle: evaluate the perturbed determinant literally,
    /// with ε = 2^-256, as one huge exact integer determinant. Entry (r, c)
    /// becomes a·2^E + 2^(E − 256·2^slot) with E = 256·2^(k²), which equals
    /// the perturbed matrix scaled by 2^E > 0.
    fn oracle(rows: &[[i64; 3]], ids: &[u64]) -> i8 {
        let k = rows.len();
        let mut keyed: Vec<(u64, usize, usize, usize)> = Vec::new();
        for r in 0..k {
            for c in 0..k {
                keyed.push((ids[r], c, r, c));
            }
        }
        keyed.sort_unstable();
        let mut slot_of = vec![vec![0usize; k]; k];
        for (slot, &(_, _, r, c)) in keyed.iter().enumerate() {
            slot_of[r][c] = slot;
        }
        let e_top = 256usize << (k * k);
        let entry = |r: usize, c: usize| {
            (BigInt::from(rows[r][c]) << e_top)
                + (BigInt::from(1) << (e_top - (256usize << slot_of[r][c])))
        };
        let det = match k {
            1 => entry(0, 0),
            2 => entry(0, 0) * entry(1, 1) - entry(0, 1) * entry(1, 0),
            3 => {
                entry(0, 0) * (entry(1, 1) * entry(2, 2) - entry(1, 2) * entry(2, 1))
                    - entry(0, 1) * (entry(1, 0) * entry(2, 2) - entry(1, 2) * entry(2, 0))
                    + entry(0, 2) * (entry(1, 0) * entry(2, 1) - entry(1, 1) * entry(2, 0))
            }
            _ => unreachable!(),
        };
        match det.sign() {
            Sign::Plus => 1,
            Sign::Minus => -1,
            Sign::NoSign => panic!("perturbed determinant can never vanish"),
        }
    }

    #[test]
    fn matches_literal_perturbation_on_random_and_degenerate_inputs() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for case in 0..600 {
            let k = if case % 3 == 0 { 3 } else { 2 };
            let mut rows = vec![[0i64; 3]; k];
            let styles = case % 6;
            for r in 0..k {
                for c in 0..k {
                    rows[r][c] = match styles {
                        0 => 0,                                   // fully degenerate
                        1 => rng.gen_range(-2..=2),               // heavy collisions
                        2 => rng.gen_range(-1_000..=1_000),
                        _ => rng.gen_range(-(1 << 40)..(1 << 40)),
                    };
                }
            }
            if styles == 4 && k >= 2 {
                rows[1] = rows[0]; // duplicated sample row
            }
            if styles == 5 && k == 3 {
                for c in 0..3 {
                    rows[2][c] = rows[0][c] + rows[1][c]; // exact linear dependence
                }
            }
            let mut ids = [0u64; 3];
            for (i, id) in ids.iter_mut().enumerate().take(k) {
                *id = rng.gen_range(0..1_000_000) * 4 + i as u64; // distinct
            }
            let got = sign_det_sos(&rows, &ids[..k]);
            let want = oracle(&rows, &ids[..k]);
            assert_eq!(got, want, "case {case}: rows {rows:?} ids {ids:?}");
        }
    }

    #[test]
    fn agrees_with_exact_determinant_when_nondegenerate() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..500 {
            let rows = [
                [rng.gen_range(-99..99), rng.gen_range(-99..99), 0],
                [rng.gen_range(-99..99), rng.gen_range(-99..99), 0],
                [0; 3],
            ];
            let det =
                rows[0][0] as i128 * rows[1][1] as i128 - rows[0][1] as i128 * rows[1][0] as i128;
            if det == 0 {
                continue;
            }
            let s = sign_det_sos(&rows[..2], &[3, 8]);
            assert_eq!(s as i128, det.signum());
        }
    }

    #[test]
    fn swapping_rows_flips_the_sign_even_for_ties() {
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..200 {
            let k = rng.gen_range(2..=3);
            let mut rows = vec![[0i64; 3]; k];
            for r in &mut rows {
                for c in 0..k {
                    r[c] = rng.gen_range(-3..=3);
                }
            }
            let ids: Vec<u64> = (0..k as u64).map(|i| 10 + 7 * i).collect();
            let s = sign_det_sos(&rows, &ids);
            let mut swapped = rows.clone();
            swapped.swap(0, 1);
            let mut sids = ids.clone();
            sids.swap(0, 1);
            assert_eq!(sign_det_sos(&swapped, &sids), -s);
        }
    }

    #[test]
    fn scalar_shortcut_matches_one_by_one_determinant() {
        for q in [-5i64, -1, 0, 1, 5] {
            assert_eq!(sign_scalar_sos(q), sign_det_sos(&[[q, 0, 0]], &[42]));
        }
        assert_eq!(sign_scalar_sos(0), 1);
    }

    #[test]
    fn rescaling_by_powers_of_two_preserves_every_sign() {
        let mut rng = StdRng::seed_from_u64(1234);
        for _ in 0..300 {
            let k = rng.gen_range(1..=3);
            let mut rows = vec![[0i64; 3]; k];
            for r in &mut rows {
                for c in 0..k {
                    r[c] = rng.gen_range(-50..=50);
                }
            }
            let ids: Vec<u64> = (0..k as u64).map(|i| 1 + 3 * i).collect();
            let s = sign_det_sos(&rows, &ids);
            for shift in [1, 4, 9] {
                let scaled: Vec<[i64; 3]> =
                    rows.iter().map(|r| [r[0] << shift, r[1] << shift, r[2] << shift]).collect();
                assert_eq!(sign_det_sos(&scaled, &ids), s, "shift {shift} rows {rows:?}");
            }
        }
    }

    #[test]
    fn float_filter_and_big_integer_paths_agree() {
        let mut rng = StdRng::seed_from_u64(5);
        for _ in 0..300 {
            // nearly singular on purpose: third row = sum of first two ± δ
            let mut rows = [[0i64; 3]; 3];
            for r in 0..2 {
                for c in 0..3 {
                    rows[r][c] = rng.gen_range(-(1 << 50)..(1 << 50));
                }
            }
            let delta = rng.gen_range(-1..=1);
            for c in 0..3 {
                rows[2][c] = rows[0][c] + rows[1][c];
            }
            rows[2][2] += delta;
            // true det = ±delta · (2×2 minor); compare against the oracle
            assert_eq!(
                sign_det_sos(&rows, &[2, 5, 11]),
                oracle(&rows, &[2, 5, 11]),
                "rows {rows:?}"
            );
        }
    }

    #[test]
    fn containment_handles_clear_cases() {
        // triangle of values surrounding the origin
        let inside = [[10, 0, 0], [-5, 8, 0], [-5, -8, 0]];
        assert!(origin_in_simplex_sos(&inside[..], &[1, 2, 3], 2));
        // all values in one half-plane
        let outside = [[10, 1, 0], [3, 8, 0], [5, 5, 0]];
        assert!(!origin_in_simplex_sos(&outside[..], &[1, 2, 3], 2));
        // 3d: simplex of values around the origin
        let vals = [[9, 0, 0], [-3, 9, 0], [-3, -9, 9], [-3, -9, -9]];
        assert!(origin_in_simplex_sos(&vals, &[1, 2, 3, 4], 3));
        let mut shifted = vals;
        for v in &mut shifted {
            v[0] += 100;
        }
        assert!(!origin_in_simplex_sos(&shifted, &[1, 2, 3, 4], 3));
    }

    /// A zero landing exactly on a shared face (or vertex) is claimed by
    /// exactly one of the simplices around it.
    #[test]
    fn boundary_zeroes_are_claimed_exactly_once() {
        let mut rng = StdRng::seed_from_u64(77);
        for _ in 0..200 {
            // Two triangles sharing the value-edge (a, b) with the origin on
            // that edge: a = -b. Third samples strictly on opposite sides of
            // that edge, so the union contains a neighborhood of the origin.
            let a = [rng.gen_range(1..50), rng.gen_range(-50..50), 0];
            let b = [-a[0], -a[1], 0];
            let cross = |p: [i64; 3]| a[0] * p[1] - a[1] * p[0];
            let mut sample = || [rng.gen_range(-30..=30), rng.gen_range(-30..=30), 0];
            let mut c = sample();
            while cross(c) <= 0 {
                c = sample();
            }
            let mut d = sample();
            while cross(d) >= 0 {
                d = sample();
            }
            // shared vertices keep their global ids in both triangles
            let t1 = [a, b, c];
            let t2 = [a, b, d];
            let claimed = origin_in_simplex_sos(&t1[..], &[4, 9, 12], 2) as u8
                + origin_in_simplex_sos(&t2[..], &[4, 9, 13], 2) as u8;
            assert_eq!(claimed, 1, "a={a:?} b={b:?} c={c:?} d={d:?}");
        }

        // Zero exactly at a shared vertex of a fan of triangles.
        for seed in 0..100u64 {
            let mut rng = StdRng::seed_from_u64(seed);
            let hub = [0i64, 0, 0];
            let spokes: Vec<[i64; 3]> = (0..5)
                .map(|i| {
                    let ang = i as f64 / 5.0 * std::f64::consts::TAU;
                    let r = rng.gen_range(10..100) as f64;
                    [(r * ang.cos()).round() as i64, (r * ang.sin()).round() as i64, 0]
                })
                .collect();
            let mut claims = 0;
            for i in 0..5 {
                let tri = [hub, spokes[i], spokes[(i + 1) % 5]];
                let ids = [100, 200 + i as u64, 200 + ((i + 1) % 5) as u64];
                // order rows by id as the mesh would
                let mut ord: Vec<usize> = (0..3).collect();
                ord.sort_by_key(|&j| ids[j]);
                let rows: Vec<[i64; 3]> = ord.iter().map(|&j| tri[j]).collect();
                let sid: Vec<u64> = ord.iter().map(|&j| ids[j]).collect();
                claims += origin_in_simplex_sos(&rows, &sid, 2) as u32;
            }
            assert_eq!(claims, 1, "seed {seed}");
        }
    }
}
