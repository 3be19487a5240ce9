//! Trajectory post-processing: threshold filters, type-label cleanup, and
//! time-slicing of chains into per-instant point sets.
//!
//! All operations here are pure transformations of already-extracted
//! chains. None of them moves a point: filters drop whole chains,
//! `simplify`/`smooth_types` rewrite type labels only, and slicing emits
//! new points interpolated along segments without touching the input.

use crate::exact::eigen::CriticalKind;
use crate::track::{Trajectory, TrajectoryPoint};

/// Thresholds applied by [`filter`]. The default keeps everything.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FilterSpec {
    /// Minimum inclusive layer extent: a chain spanning layers `[a, b]`
    /// counts as `b − a + 1`, so a chain pinned to one layer counts 1
    /// and a threshold of 0 keeps everything.
    pub min_duration: f64,
    /// Remove closed chains regardless of the other thresholds.
    pub drop_loops: bool,
    /// Minimum spread (max − min) of the sampled scalar along the chain.
    pub min_persistence: Option<f64>,
    /// When non-empty, a chain survives only if its dominant point type
    /// (most frequent; ties broken by the type's display name) is listed.
    pub kinds: Vec<CriticalKind>,
}

/// One chain/time-plane intersection produced by [`slice_trajectories`].
#[derive(Clone, Debug, PartialEq)]
pub struct SlicePoint {
    /// Component token of the chain that produced the point.
    pub trajectory: String,
    pub position: [f64; 3],
    /// Always the requested slicing time.
    pub time: f64,
    /// Type of the nearer chain endpoint of the crossed segment.
    pub kind: CriticalKind,
    /// Scalar value interpolated along the crossed segment.
    pub value: f64,
}

/// Keeps the chains that clear every threshold in `spec`. Pure predicate,
/// hence idempotent; chain contents are never modified.
pub fn filter(trajectories: Vec<Trajectory>, spec: &FilterSpec) -> Vec<Trajectory> {
    trajectories
        .into_iter()
        .filter(|t| {
            if spec.drop_loops && t.closed {
                return false;
            }
            if !t.points.is_empty() && t.duration() + 1.0 < spec.min_duration {
                return false;
            }
            if let Some(p) = spec.min_persistence {
                if t.value_range() < p {
                    return false;
                }
            }
            if !spec.kinds.is_empty() {
                match dominant_kind(&t.points) {
                    Some(k) if spec.kinds.contains(&k) => {}
                    _ => return false,
                }
            }
            true
        })
        .collect()
}

/// Most frequent point type; ties broken by the display name.
fn dominant_kind(points: &[TrajectoryPoint]) -> Option<CriticalKind> {
    let mut counts: Vec<(CriticalKind, usize)> = Vec::new();
    for p in points {
        match counts.iter_mut().find(|(k, _)| *k == p.kind) {
            Some((_, c)) => *c += 1,
            None => counts.push((p.kind, 1)),
        }
    }
    counts
        .into_iter()
        .max_by(|a, b| {
            a.1.cmp(&b.1)
                .then_with(|| b.0.to_string().cmp(&a.0.to_string()))
        })
        .map(|(k, _)| k)
}

/// Relabels type runs whose time extent is below `min_run`: the shortest
/// offending run is absorbed into its longer neighbor (ties go to the
/// earlier one) until every run clears the threshold. Coordinates, values
/// and weights are untouched. A run's extent is max − min time within the
/// run, so single-point runs have extent 0 and `min_run = 0` is the
/// identity. On closed chains the run decomposition wraps: labels are
/// rotated so a genuine run boundary sits at index 0 before processing.
pub fn simplify(traj: &mut Trajectory, min_run: f64) {
    let n = traj.points.len();
    if n < 2 || min_run <= 0.0 {
        return;
    }
    let kinds: Vec<CriticalKind> = traj.points.iter().map(|p| p.kind).collect();
    let times: Vec<f64> = traj.points.iter().map(|p| p.time).collect();

    // Rotate closed chains so index 0 starts a run.
    let rot = if traj.closed && kinds[0] == kinds[n - 1] {
        match kinds.iter().position(|k| *k != kinds[0]) {
            Some(b) => b,
            None => return, // uniform loop
        }
    } else {
        0
    };
    let at = |i: usize| (i + rot) % n;

    #[derive(Clone, Copy)]
    struct Run {
        kind: CriticalKind,
        start: usize, // rotated index
        len: usize,
    }
    let mut runs: Vec<Run> = Vec::new();
    for i in 0..n {
        match runs.last_mut() {
            Some(r) if r.kind == kinds[at(i)] => r.len += 1,
            _ => runs.push(Run { kind: kinds[at(i)], start: i, len: 1 }),
        }
    }

    let extent = |r: &Run| -> f64 {
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in r.start..r.start + r.len {
            lo = lo.min(times[at(i)]);
            hi = hi.max(times[at(i)]);
        }
        hi - lo
    };

    while runs.len() > 1 {
        // Shortest run below the threshold, earliest on ties.
        let mut pick: Option<(usize, f64)> = None;
        for (i, r) in runs.iter().enumerate() {
            let e = extent(r);
            if e < min_run && pick.map_or(true, |(_, best)| e < best) {
                pick = Some((i, e));
            }
        }
        let Some((i, _)) = pick else { break };
        let into = if i == 0 {
            1
        } else if i == runs.len() - 1 {
            i - 1
        } else if extent(&runs[i + 1]) > extent(&runs[i - 1]) {
            i + 1
        } else {
            i - 1
        };
        let (lo, hi) = (into.min(i), into.max(i));
        runs[lo] = Run {
            kind: runs[into].kind,
            start: runs[lo].start,
            len: runs[lo].len + runs[hi].len,
        };
        runs.remove(hi);
        // Absorbing can make the merged run adjacent to an equal-typed one.
        let mut j = 1;
        while j < runs.len() {
            if runs[j].kind == runs[j - 1].kind {
                runs[j - 1].len += runs[j].len;
                runs.remove(j);
            } else {
                j += 1;
            }
        }
    }

    for r in &runs {
        for i in r.start..r.start + r.len {
            traj.points[at(i)].kind = r.kind;
        }
    }
}

/// Replaces a point's type with the majority over a ±`half_window` range
/// when the point disagrees with **both** of its neighbors. Two passes:
/// all marks are decided on the original labels, then all replacements
/// applied. Open-chain endpoints have one neighbor and are never marked;
/// closed chains wrap both the neighbor test and the window. Majority
/// ties prefer the point's current type, then the smallest display name.
/// `half_window = 0` is the identity. Only labels change.
pub fn smooth_types(traj: &mut Trajectory, half_window: usize) {
    let n = traj.points.len();
    if half_window == 0 || n < 3 {
        return;
    }
    let kinds: Vec<CriticalKind> = traj.points.iter().map(|p| p.kind).collect();

    let mut marked = Vec::new();
    for i in 0..n {
        let (prev, next) = if traj.closed {
            (Some(kinds[(i + n - 1) % n]), Some(kinds[(i + 1) % n]))
        } else {
            (
                (i > 0).then(|| kinds[i - 1]),
                (i + 1 < n).then(|| kinds[i + 1]),
            )
        };
        if prev.is_some_and(|k| k != kinds[i]) && next.is_some_and(|k| k != kinds[i]) {
            marked.push(i);
        }
    }

    for i in marked {
        let mut counts: Vec<(CriticalKind, usize)> = Vec::new();
        let mut tally = |k: CriticalKind| match counts.iter_mut().find(|(c, _)| *c == k) {
            Some((_, c)) => *c += 1,
            None => counts.push((k, 1)),
        };
        if traj.closed {
            if 2 * half_window + 1 >= n {
                kinds.iter().for_each(|&k| tally(k));
            } else {
                for d in 0..=2 * half_window {
                    tally(kinds[(i + n + d - half_window) % n]);
                }
            }
        } else {
            for k in &kinds[i.saturating_sub(half_window)..(i + half_window + 1).min(n)] {
                tally(*k);
            }
        }
        let best = counts
            .iter()
            .map(|&(_, c)| c)
            .max()
            .expect("window is never empty");
        let winner = if counts.iter().any(|&(k, c)| c == best && k == kinds[i]) {
            kinds[i]
        } else {
            counts
                .iter()
                .filter(|&&(_, c)| c == best)
                .map(|&(k, _)| k)
                .min_by_key(|k| k.to_string())
                .expect("some type reached the maximum")
        };
        traj.points[i].kind = winner;
    }
}

/// Intersects every chain with the time plane `t = t0` and returns the
/// crossing points in chain order. Segment crossings are detected on the
/// signs of `t − t0` with ties resolved upward (the same convention the
/// perturbed scalar predicate uses), so a chain point lying exactly on
/// the plane between two opposite-side neighbors is emitted exactly once
/// and a tangential touch from above emits nothing. Endpoints of open
/// chains that lie exactly on the plane are emitted directly — a chain
/// that terminates on the plane still contributes its terminus.
pub fn slice_trajectories(trajectories: &[Trajectory], t0: f64) -> Vec<SlicePoint> {
    let mut out = Vec::new();
    for traj in trajectories {
        let pts = &traj.points;
        let n = pts.len();
        let first = out.len();
        let side = |t: f64| if t >= t0 { 1i8 } else { -1 };
        let mut segments: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
        if traj.closed && n >= 2 {
            segments.push((n - 1, 0));
        }
        for (a, b) in segments {
            if side(pts[a].time) != side(pts[b].time) {
                out.push(cross_segment(&pts[a], &pts[b], t0, &traj.id));
            }
        }
        if !traj.closed {
            for idx in [0, n.saturating_sub(1)] {
                if idx >= n || pts[idx].time != t0 {
                    continue;
                }
                let p = &pts[idx];
                let dup = out[first..]
                    .iter()
                    .any(|s| s.position == p.position && s.value == p.value);
                if !dup {
                    out.push(SlicePoint {
                        trajectory: traj.id.clone(),
                        position: p.position,
                        time: t0,
                        kind: p.kind,
                        value: p.value,
                    });
                }
                if n == 1 {
                    break; // single point: don't visit the same index twice
                }
            }
        }
    }
    out
}

/// Interpolated crossing of one segment; exact hits return the chain
/// point itself (bitwise) rather than a round-tripped interpolation.
fn cross_segment(a: &TrajectoryPoint, b: &TrajectoryPoint, t0: f64, id: &str) -> SlicePoint {
    let mu = (t0 - a.time) / (b.time - a.time);
    let (position, value, kind) = if mu <= 0.0 {
        (a.position, a.value, a.kind)
    } else if mu >= 1.0 {
        (b.position, b.value, b.kind)
    } else {
        let mut p = [0.0; 3];
        for (k, slot) in p.iter_mut().enumerate() {
            *slot = a.position[k] + mu * (b.position[k] - a.position[k]);
        }
        let kind = if (t0 - a.time).abs() <= (b.time - t0).abs() {
            a.kind
        } else {
            b.kind
        };
        (p, a.value + mu * (b.value - a.value), kind)
    };
    SlicePoint {
        trajectory: id.to_string(),
        position,
        time: t0,
        kind,
        value,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::handle::ElementHandle;

    fn point(time: f64, x: f64, kind: CriticalKind, value: f64) -> TrajectoryPoint {
        TrajectoryPoint {
            handle: ElementHandle::lattice(2, [time as i32, 0, 0], 0, time.floor() as i32),
            position: [x, 0.0, 0.0],
            time,
            weights: vec![1.0],
            kind,
            value,
        }
    }

    fn chain(id: &str, times: &[f64], kinds: &[CriticalKind], closed: bool) -> Trajectory {
        Trajectory {
            id: id.to_string(),
            points: times
                .iter()
                .zip(kinds)
                .map(|(&t, &k)| point(t, 2.0 * t, k, t))
                .collect(),
            closed,
            starts_on_boundary: false,
            ends_on_boundary: false,
        }
    }

    use CriticalKind::{Maximum, Minimum, Saddle, Sink};

    #[test]
    fn default_spec_is_the_identity_and_filtering_is_idempotent() {
        let trajs = vec![
            chain("a", &[0.0, 1.0, 2.0], &[Sink; 3], false),
            chain("b", &[0.0, 1.0, 0.5], &[Saddle; 3], true),
        ];
        let once = filter(trajs.clone(), &FilterSpec::default());
        assert_eq!(once, trajs);
        let spec = FilterSpec {
            min_duration: 2.0,
            drop_loops: true,
            ..FilterSpec::default()
        };
        let first = filter(trajs, &spec);
        let second = filter(first.clone(), &spec);
        assert_eq!(first, second);
    }

    #[test]
    fn duration_counts_layers_inclusively() {
        // spans layers [0,4] → counts 5
        let t = chain("a", &[0.0, 1.0, 2.0, 3.0, 4.0], &[Sink; 5], false);
        let keep = |d: f64| {
            !filter(
                vec![t.clone()],
                &FilterSpec {
                    min_duration: d,
                    ..FilterSpec::default()
                },
            )
            .is_empty()
        };
        assert!(keep(5.0));
        assert!(!keep(5.1));
        // full-span threshold "span + 1" keeps exactly the full-span chain
        let short = chain("b", &[1.0, 2.0], &[Sink; 2], false);
        let spec = FilterSpec {
            min_duration: 5.0,
            ..FilterSpec::default()
        };
        assert_eq!(filter(vec![t.clone(), short], &spec), vec![t]);
    }

    #[test]
    fn loops_and_persistence_filter_independently() {
        let open = chain("a", &[0.0, 1.0, 2.0], &[Minimum; 3], false);
        let looped = chain("b", &[0.0, 1.0, 0.5], &[Minimum; 3], true);
        let spec = FilterSpec {
            drop_loops: true,
            ..FilterSpec::default()
        };
        assert_eq!(
            filter(vec![open.clone(), looped.clone()], &spec),
            vec![open.clone()]
        );
        // value spread: open spans 0..2, looped 0..1
        let spec = FilterSpec {
            min_persistence: Some(1.5),
            ..FilterSpec::default()
        };
        assert_eq!(filter(vec![open.clone(), looped], &spec), vec![open]);
    }

    #[test]
    fn type_whitelist_keeps_the_dominant_kind() {
        let mostly_min = chain(
            "a",
            &[0.0, 1.0, 2.0, 3.0],
            &[Minimum, Minimum, Saddle, Minimum],
            false,
        );
        let spec = |k: Vec<CriticalKind>| FilterSpec {
            kinds: k,
            ..FilterSpec::default()
        };
        assert_eq!(
            filter(vec![mostly_min.clone()], &spec(vec![Minimum])).len(),
            1
        );
        assert!(filter(vec![mostly_min], &spec(vec![Saddle])).is_empty());
    }

    #[test]
    fn short_type_runs_are_absorbed_without_moving_points() {
        let mut t = chain(
            "a",
            &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0],
            &[Sink, Sink, Sink, Saddle, Sink, Sink, Sink],
            false,
        );
        let before: Vec<_> = t.points.iter().map(|p| (p.position, p.time, p.value)).collect();
        simplify(&mut t, 1.5);
        assert!(t.points.iter().all(|p| p.kind == Sink));
        let after: Vec<_> = t.points.iter().map(|p| (p.position, p.time, p.value)).collect();
        assert_eq!(before, after);
    }

    #[test]
    fn threshold_zero_and_uniform_chains_are_untouched() {
        let mut alternating = chain(
            "a",
            &[0.0, 1.0, 2.0, 3.0],
            &[Sink, Saddle, Sink, Saddle],
            false,
        );
        let orig = alternating.clone();
        simplify(&mut alternating, 0.0);
        assert_eq!(alternating, orig);
        let mut uniform = chain("b", &[0.0, 1.0, 2.0], &[Maximum; 3], false);
        let orig = uniform.clone();
        simplify(&mut uniform, 10.0);
        assert_eq!(uniform, orig);
    }

    #[test]
    fn simplify_wraps_runs_on_closed_chains() {
        // run of Sink straddles the wrap: indices 3,0 are Sink, 1,2 Saddle.
        let mut t = chain(
            "a",
            &[0.0, 1.0, 2.0, 1.5],
            &[Sink, Saddle, Saddle, Sink],
            true,
        );
        simplify(&mut t, 1.2);
        // the wrapped Sink run has extent |1.5−0| = 1.5 ≥ 1.2; the Saddle
        // run extent 1.0 < 1.2 is absorbed into it.
        assert!(t.points.iter().all(|p| p.kind == Sink));
    }

    #[test]
    fn window_majority_fixes_isolated_blips_only() {
        let mut t = chain(
            "a",
            &[0.0, 1.0, 2.0, 3.0, 4.0],
            &[Maximum, Maximum, Saddle, Maximum, Maximum],
            false,
        );
        smooth_types(&mut t, 2);
        assert!(t.points.iter().all(|p| p.kind == Maximum));

        let mut consistent = chain("b", &[0.0, 1.0, 2.0], &[Sink; 3], false);
        let orig = consistent.clone();
        smooth_types(&mut consistent, 2);
        assert_eq!(consistent, orig);

        let mut t = chain(
            "c",
            &[0.0, 1.0, 2.0],
            &[Maximum, Saddle, Maximum],
            false,
        );
        let orig = t.clone();
        smooth_types(&mut t, 0);
        assert_eq!(t, orig, "window 0 must be the identity");
    }

    #[test]
    fn smoothing_marks_before_modifying() {
        // marks and majorities are all evaluated on the ORIGINAL labels:
        // index 2 keeps its Saddle majority even though the sequential
        // in-place variant would have flipped it after fixing index 1.
        let mut t = chain(
            "a",
            &[0.0, 1.0, 2.0, 3.0, 4.0],
            &[Maximum, Saddle, Maximum, Saddle, Maximum],
            false,
        );
        smooth_types(&mut t, 1);
        let kinds: Vec<_> = t.points.iter().map(|p| p.kind).collect();
        assert_eq!(kinds, vec![Maximum, Maximum, Saddle, Maximum, Maximum]);
    }

    #[test]
    fn smoothing_wraps_on_closed_chains_and_skips_open_endpoints() {
        let mut lone_blip = chain(
            "a",
            &[0.0, 1.0, 2.0, 3.0],
            &[Saddle, Maximum, Maximum, Maximum],
            true,
        );
        smooth_types(&mut lone_blip, 1);
        assert!(lone_blip.points.iter().all(|p| p.kind == Maximum));

        let mut open = chain(
            "b",
            &[0.0, 1.0, 2.0, 3.0],
            &[Saddle, Maximum, Maximum, Maximum],
            false,
        );
        smooth_types(&mut open, 1);
        assert_eq!(open.points[0].kind, Saddle, "endpoints are never marked");
    }

    #[test]
    fn slicing_interpolates_and_hits_vertices_exactly() {
        // straight chain x = 2t over t ∈ [0, 4]
        let t = chain("a", &[0.0, 1.0, 2.0, 3.0, 4.0], &[Minimum; 5], false);
        let mid = slice_trajectories(&[t.clone()], 2.5);
        assert_eq!(mid.len(), 1);
        assert!((mid[0].position[0] - 5.0).abs() < 1e-12);
        assert_eq!(mid[0].time, 2.5);
        assert_eq!(mid[0].kind, Minimum);

        // exact interior layer hit: emitted once, bitwise the chain point
        let hit = slice_trajectories(&[t.clone()], 2.0);
        assert_eq!(hit.len(), 1);
        assert_eq!(hit[0].position, [4.0, 0.0, 0.0]);

        // exact endpoint hits at both temporal caps
        for (t0, x) in [(0.0, 0.0), (4.0, 8.0)] {
            let cap = slice_trajectories(&[t.clone()], t0);
            assert_eq!(cap.len(), 1, "cap at t={t0}");
            assert_eq!(cap[0].position, [x, 0.0, 0.0]);
        }

        assert!(slice_trajectories(&[t], -1.0).is_empty());
    }

    #[test]
    fn loops_cross_an_even_number_of_times() {
        // time runs 0 → 2 → 0 around the loop
        let looped = chain("a", &[0.0, 1.0, 2.0, 1.0], &[Saddle; 4], true);
        let pts = slice_trajectories(&[looped.clone()], 1.5);
        assert_eq!(pts.len(), 2);
        for p in &pts {
            assert_eq!(p.time, 1.5);
        }
        // tangential touch from above: the minimum of the loop sits at
        // t=0 twice (vertex 0 and the wrap); slicing there is even too
        let pts = slice_trajectories(&[looped], 0.0);
        assert_eq!(pts.len() % 2, 0);
    }

    #[test]
    fn tangential_touches_resolve_consistently() {
        // open chain dips to t=1 and returns: touch from above → nothing
        let above = chain("a", &[2.0, 1.0, 2.0], &[Sink; 3], false);
        assert!(slice_trajectories(&[above], 1.0).is_empty());
        // touch from below → perturbed chain crosses twice
        let below = chain("b", &[0.0, 1.0, 0.0], &[Sink; 3], false);
        assert_eq!(slice_trajectories(&[below], 1.0).len(), 2);
    }
}
