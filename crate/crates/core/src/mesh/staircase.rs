//! Triangulation of a prism over a simplex into simplices.
//!
//! The prism over an n-simplex (bottom copy `a_0 … a_n`, top copy
//! `b_0 … b_n`) splits into exactly n+1 simplices, one per monotone path
//! from `a_0` to `b_n` that walks right along the bottom, steps up once,
//! and walks right along the top. Enumerating the step-up position from
//! column 0 upward gives a fixed order that the cube subdivision below
//! builds on. When both prisms sharing a quadrilateral wall order their
//! base vertices the same way (e.g. by global vertex id), the walls
//! receive the same diagonal from either side, so meshes assembled from
//! these pieces are conforming.

/// One vertex of the prism over an n-simplex.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PrismVertex {
    /// `a_i`: vertex i of the bottom copy of the base simplex.
    Bottom(usize),
    /// `b_i`: vertex i of the top copy.
    Top(usize),
}

impl std::fmt::Display for PrismVertex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PrismVertex::Bottom(i) => write!(f, "a{i}"),
            PrismVertex::Top(i) => write!(f, "b{i}"),
        }
    }
}

/// Splits the prism over an n-simplex into n+1 simplices of n+2 vertices.
///
/// Simplex j is the path `a_0 … a_j b_j … b_n`; simplices are returned for
/// j = 0, 1, …, n in that order.
pub fn staircase_triangulate(n: usize) -> Vec<Vec<PrismVertex>> {
    (0..=n)
        .map(|j| {
            let mut path = Vec::with_capacity(n + 2);
            path.extend((0..=j).map(PrismVertex::Bottom));
            path.extend((j..=n).map(PrismVertex::Top));
            path
        })
        .collect()
}

/// Substitutes concrete values for the abstract prism vertices of one path.
pub fn apply_path<T: Copy>(path: &[PrismVertex], bottom: &[T], top: &[T]) -> Vec<T> {
    path.iter()
        .map(|v| match *v {
            PrismVertex::Bottom(i) => bottom[i],
            PrismVertex::Top(i) => top[i],
        })
        .collect()
}
