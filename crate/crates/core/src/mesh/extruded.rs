//! Spacetime triangulation of an arbitrary simplicial base mesh.
//!
//! Each base cell spans a prism between consecutive time slices; prisms are
//! split by the staircase rule over the cell's id-sorted vertices, which
//! makes neighboring prisms agree on shared walls. As in the regular case
//! nothing per-element is stored. A spacetime simplex is identified by the
//! base face it projects onto (its *support*) plus a small pattern saying
//! which copies of each support vertex it uses: the bottom one (A), the top
//! one (B), or both (AB). Realizable patterns read A… maybe-one-AB …B along
//! the sorted support, a short catalog per dimension; face and coface moves
//! are precomputed per pattern and composed with the base mesh's own
//! subface/coface tables at query time.
//!
//! An all-B pattern is the same element as all-A one layer up; patterns are
//! normalized so the bottom mask is never empty, making handles unique.

use std::collections::{BTreeSet, HashMap};

use super::base::BaseMesh;
use super::staircase::{staircase_triangulate, PrismVertex};
use super::{ElementKind, MeshVertex, SpacetimeMesh};
use crate::error::{Error, Result};
use crate::handle::{Anchor, ElementHandle};

/// One simplex shape over a support of dimension `support_dim`: bit p of
/// `bottom`/`top` says whether sorted support position p contributes its
/// copy at layer τ / τ+1.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtrudedType {
    pub support_dim: usize,
    pub bottom: u32,
    pub top: u32,
}

impl ExtrudedType {
    fn spans_time(&self) -> bool {
        self.top != 0
    }
}

/// How dropping one vertex of a pattern changes the element.
#[derive(Clone, Copy, Debug)]
struct SideRule {
    /// Support position removed entirely, if the support shrinks.
    drop_pos: Option<u8>,
    /// Layer shift (+1 when the remainder was all-B and got renormalized).
    delta: i8,
    tid: u16,
}

pub struct ExtrudedMesh {
    base: BaseMesh,
    timesteps: usize,
    types: Vec<Vec<ExtrudedType>>,
    /// Per dimension k ≤ base dim: id of the all-A (within-slice) type.
    ordinal_tid: Vec<u16>,
    /// Per dimension k: time-spanning type ids with cumulative block sizes
    /// (block of a type = number of base faces of its support dimension).
    interval_ids: Vec<Vec<u16>>,
    interval_prefix: Vec<Vec<u64>>,
    side_rules: Vec<Vec<Vec<SideRule>>>,
    /// Cofaces with the same support: (layer delta, parent type).
    coface_same: Vec<Vec<Vec<(i8, u16)>>>,
    /// Cofaces whose support gains one vertex at sorted position q:
    /// indexed `[k][tid][q]`.
    coface_grow: Vec<Vec<Vec<Vec<(i8, u16)>>>>,
}

/// Keeps the bits of `mask` at positions where `support` has a bit, packed.
fn compress(mask: u32, support: u32) -> u32 {
    let mut out = 0;
    let mut src = support;
    let mut dst = 0;
    while src != 0 {
        let p = src.trailing_zeros();
        out |= (mask >> p & 1) << dst;
        src &= src - 1;
        dst += 1;
    }
    out
}

/// Reindexes a mask over d+1 positions to d+2 positions with a new position
/// inserted at q.
fn embed(mask: u32, q: usize) -> u32 {
    (mask & ((1 << q) - 1)) | (mask >> q) << (q + 1)
}

/// Vertices of a pattern in global order: bottom copies by position, then
/// top copies by position.
fn pattern_vertices(bottom: u32, top: u32) -> Vec<(u8, u8)> {
    let mut v: Vec<(u8, u8)> = (0..32).filter(|p| bottom >> p & 1 == 1).map(|p| (p as u8, 0)).collect();
    v.extend((0..32).filter(|p| top >> p & 1 == 1).map(|p| (p as u8, 1)));
    v
}

impl ExtrudedMesh {
    pub fn new(base: BaseMesh, timesteps: usize) -> Result<Self> {
        if timesteps < 1 {
            return Err(Error::Mesh("at least one time slice is required".into()));
        }
        if base.vertex_count() >= 1 << 20 {
            return Err(Error::Mesh("base mesh exceeds addressable vertex range".into()));
        }
        let n = base.dim();

        // Catalog: faces of the staircase tops over the standard cell,
        // de-duplicated after compressing away unused support positions.
        // The triangulation induced on a face prism is the staircase of the
        // face, so the catalog is exhaustive for every support dimension.
        let mut sets: Vec<BTreeSet<(usize, u32, u32)>> = vec![BTreeSet::new(); n + 2];
        for path in staircase_triangulate(n) {
            let verts: Vec<(u8, u8)> = path
                .iter()
                .map(|v| match *v {
                    PrismVertex::Bottom(i) => (i as u8, 0),
                    PrismVertex::Top(i) => (i as u8, 1),
                })
                .collect();
            for pick in 1u32..1 << verts.len() {
                let (mut b, mut t) = (0u32, 0u32);
                for (i, &(p, side)) in verts.iter().enumerate() {
                    if pick >> i & 1 == 1 {
                        if side == 0 {
                            b |= 1 << p;
                        } else {
                            t |= 1 << p;
                        }
                    }
                }
                let support = b | t;
                let (mut cb, mut ct) = (compress(b, support), compress(t, support));
                if cb == 0 {
                    (cb, ct) = (ct, 0);
                }
                let k = (b.count_ones() + t.count_ones()) as usize - 1;
                sets[k].insert((support.count_ones() as usize - 1, cb, ct));
            }
        }
        let types: Vec<Vec<ExtrudedType>> = sets
            .into_iter()
            .map(|s| {
                s.into_iter()
                    .map(|(support_dim, bottom, top)| ExtrudedType { support_dim, bottom, top })
                    .collect()
            })
            .collect();
        let mut lookup: HashMap<(u32, u32), (usize, u16)> = HashMap::new();
        for (k, list) in types.iter().enumerate() {
            for (id, ty) in list.iter().enumerate() {
                lookup.insert((ty.bottom, ty.top), (k, id as u16));
            }
        }

        let mut ordinal_tid = Vec::new();
        for k in 0..=n {
            ordinal_tid.push(lookup[&((1 << (k + 1)) - 1, 0)].1);
        }
        let mut interval_ids = Vec::new();
        let mut interval_prefix = Vec::new();
        for list in &types {
            let mut ids = Vec::new();
            let mut prefix = vec![0u64];
            for (id, ty) in list.iter().enumerate() {
                if ty.spans_time() {
                    ids.push(id as u16);
                    prefix.push(prefix.last().unwrap() + base.face_count(ty.support_dim) as u64);
                }
            }
            interval_ids.push(ids);
            interval_prefix.push(prefix);
        }

        let side_rules: Vec<Vec<Vec<SideRule>>> = types
            .iter()
            .enumerate()
            .map(|(k, list)| {
                if k == 0 {
                    return Vec::new();
                }
                list.iter()
                    .map(|ty| {
                        pattern_vertices(ty.bottom, ty.top)
                            .iter()
                            .enumerate()
                            .map(|(i, &(p, side))| {
                                let (mut b, mut t) = (ty.bottom, ty.top);
                                if side == 0 {
                                    b &= !(1 << p);
                                } else {
                                    t &= !(1 << p);
                                }
                                let support = b | t;
                                let drop_pos =
                                    (support >> p & 1 == 0).then_some(p);
                                let (mut cb, mut ct) = (compress(b, support), compress(t, support));
                                let mut delta = 0i8;
                                if cb == 0 {
                                    (cb, ct) = (ct, 0);
                                    delta = 1;
                                }
                                let (kk, tid) = lookup[&(cb, ct)];
                                debug_assert_eq!(kk, k - 1, "face must drop one dimension at vertex {i}");
                                SideRule { drop_pos, delta, tid }
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();

        let mut coface_same: Vec<Vec<Vec<(i8, u16)>>> = vec![Vec::new(); n + 2];
        let mut coface_grow: Vec<Vec<Vec<Vec<(i8, u16)>>>> = vec![Vec::new(); n + 2];
        for k in 0..=n {
            coface_same[k] = types[k]
                .iter()
                .map(|ty| {
                    let mut out = Vec::new();
                    for (pid, pa) in types[k + 1].iter().enumerate() {
                        if pa.support_dim != ty.support_dim {
                            continue;
                        }
                        if ty.bottom & !pa.bottom == 0 && ty.top & !pa.top == 0 {
                            out.push((0i8, pid as u16));
                        }
                        if ty.top == 0 && ty.bottom & !pa.top == 0 {
                            out.push((-1i8, pid as u16));
                        }
                    }
                    out
                })
                .collect();
            coface_grow[k] = types[k]
                .iter()
                .map(|ty| {
                    (0..=ty.support_dim + 1)
                        .map(|q| {
                            let (eb, et) = (embed(ty.bottom, q), embed(ty.top, q));
                            let mut out = Vec::new();
                            for (pid, pa) in types[k + 1].iter().enumerate() {
                                if pa.support_dim != ty.support_dim + 1 {
                                    continue;
                                }
                                if eb & !pa.bottom == 0 && et & !pa.top == 0 {
                                    out.push((0i8, pid as u16));
                                }
                                if et == 0 && eb & !pa.top == 0 {
                                    out.push((-1i8, pid as u16));
                                }
                            }
                            out
                        })
                        .collect()
                })
                .collect();
        }

        Ok(ExtrudedMesh {
            base,
            timesteps,
            types,
            ordinal_tid,
            interval_ids,
            interval_prefix,
            side_rules,
            coface_same,
            coface_grow,
        })
    }

    pub fn base(&self) -> &BaseMesh {
        &self.base
    }

    /// Base face an element projects onto: `(dimension, face id)`.
    pub fn support_of(&self, h: ElementHandle) -> Result<(usize, u32)> {
        let (k, fid, tid, _) = self.check(h)?;
        Ok((self.ty(k, tid).support_dim, fid))
    }

    /// A full-dimensional base cell containing the element's support — the
    /// lowest-id one, found by climbing the (sorted) coface lists.
    pub fn enclosing_cell(&self, h: ElementHandle) -> Result<u32> {
        let (mut d, mut fid) = self.support_of(h)?;
        while d < self.base.dim() {
            let up = self.base.cofaces(d, fid);
            if up.is_empty() {
                return Err(Error::Mesh(format!("face {fid} of dim {d} has no coface")));
            }
            fid = up[0].0;
            d += 1;
        }
        Ok(fid)
    }

    fn ty(&self, k: usize, tid: u16) -> &ExtrudedType {
        &self.types[k][tid as usize]
    }

    fn max_layer(&self, k: usize, tid: u16) -> i32 {
        self.timesteps as i32 - 1 - self.ty(k, tid).spans_time() as i32
    }

    fn check(&self, h: ElementHandle) -> Result<(usize, u32, u16, i32)> {
        let k = h.dim as usize;
        let bad = |why: &str| Err(Error::InvalidHandle(format!("{h}: {why}")));
        if k > self.base.dim() + 1 {
            return bad("dimension exceeds mesh");
        }
        let Anchor::Face(fid) = h.anchor else {
            return bad("extruded meshes use base-face anchors");
        };
        if h.type_id as usize >= self.types[k].len() {
            return bad("type id out of range");
        }
        if fid as usize >= self.base.face_count(self.ty(k, h.type_id).support_dim) {
            return bad("support face out of range");
        }
        if h.layer < 0 || h.layer > self.max_layer(k, h.type_id) {
            return bad("layer outside time range");
        }
        Ok((k, fid, h.type_id, h.layer))
    }
}

impl SpacetimeMesh for ExtrudedMesh {
    fn spatial_dim(&self) -> usize {
        self.base.dim()
    }

    fn timesteps(&self) -> usize {
        self.timesteps
    }

    fn verts_per_layer(&self) -> u64 {
        self.base.vertex_count() as u64
    }

    fn element_count(&self, k: usize, kind: ElementKind, layer: i32) -> u64 {
        if k > self.base.dim() + 1 || layer < 0 {
            return 0;
        }
        let ordinal = if layer < self.timesteps as i32 && k <= self.base.dim() {
            self.base.face_count(k) as u64
        } else {
            0
        };
        let interval = if layer < self.timesteps as i32 - 1 {
            *self.interval_prefix[k].last().unwrap()
        } else {
            0
        };
        match kind {
            ElementKind::Ordinal => ordinal,
            ElementKind::Interval => interval,
            ElementKind::All => ordinal + interval,
        }
    }

    fn element_at(&self, k: usize, kind: ElementKind, layer: i32, idx: u64) -> ElementHandle {
        debug_assert!(idx < self.element_count(k, kind, layer), "element index out of range");
        match kind {
            ElementKind::Ordinal => {
                ElementHandle::face(k as u8, idx as u32, self.ordinal_tid[k], layer)
            }
            ElementKind::Interval => {
                let prefix = &self.interval_prefix[k];
                let slot = prefix.partition_point(|&p| p <= idx) - 1;
                let tid = self.interval_ids[k][slot];
                ElementHandle::face(k as u8, (idx - prefix[slot]) as u32, tid, layer)
            }
            ElementKind::All => {
                let ordinal = self.element_count(k, ElementKind::Ordinal, layer);
                if idx < ordinal {
                    self.element_at(k, ElementKind::Ordinal, layer, idx)
                } else {
                    self.element_at(k, ElementKind::Interval, layer, idx - ordinal)
                }
            }
        }
    }

    fn vertices_into(&self, h: ElementHandle, out: &mut Vec<MeshVertex>) -> Result<()> {
        let (k, fid, tid, layer) = self.check(h)?;
        let ty = self.ty(k, tid);
        let support = self.base.face(ty.support_dim, fid);
        out.clear();
        for (mask, side) in [(ty.bottom, 0), (ty.top, 1)] {
            let mut bits = mask;
            while bits != 0 {
                let p = bits.trailing_zeros();
                bits &= bits - 1;
                let v = support[p as usize];
                out.push(MeshVertex {
                    index: v as u64,
                    layer: layer + side,
                    position: self.base.position(v),
                });
            }
        }
        Ok(())
    }

    fn sides_into(&self, h: ElementHandle, out: &mut Vec<ElementHandle>) -> Result<()> {
        let (k, fid, tid, layer) = self.check(h)?;
        out.clear();
        if k == 0 {
            return Ok(());
        }
        let d = self.ty(k, tid).support_dim;
        for rule in &self.side_rules[k][tid as usize] {
            let anchor = match rule.drop_pos {
                Some(p) => self.base.subface(d, fid, p as usize),
                None => fid,
            };
            out.push(ElementHandle::face(k as u8 - 1, anchor, rule.tid, layer + rule.delta as i32));
        }
        Ok(())
    }

    fn side_of(&self, h: ElementHandle) -> Result<Vec<ElementHandle>> {
        let (k, fid, tid, layer) = self.check(h)?;
        if k > self.base.dim() {
            return Ok(Vec::new());
        }
        let d = self.ty(k, tid).support_dim;
        let mut out = Vec::new();
        let mut push = |anchor: u32, delta: i8, pid: u16| {
            let pl = layer + delta as i32;
            if pl >= 0 && pl <= self.max_layer(k + 1, pid) {
                out.push(ElementHandle::face(k as u8 + 1, anchor, pid, pl));
            }
        };
        for &(delta, pid) in &self.coface_same[k][tid as usize] {
            push(fid, delta, pid);
        }
        let grow = &self.coface_grow[k][tid as usize];
        for &(rid, q) in self.base.cofaces(d, fid) {
            for &(delta, pid) in &grow[q as usize] {
                push(rid, delta, pid);
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn two_triangles() -> BaseMesh {
        let positions = vec![[0., 0., 0.], [1., 0., 0.], [1., 1., 0.], [0., 1., 0.]];
        BaseMesh::new(2, positions, &[vec![0, 1, 3], vec![2, 1, 3]]).unwrap()
    }

    fn pattern_string(ty: &ExtrudedType) -> String {
        (0..=ty.support_dim)
            .map(|p| match (ty.bottom >> p & 1, ty.top >> p & 1) {
                (1, 0) => "A",
                (0, 1) => "B",
                (1, 1) => "X",
                _ => unreachable!("support position without copies"),
            })
            .collect::<Vec<_>>()
            .join(",")
    }

    #[test]
    fn triangle_extrusion_catalog_is_pinned() {
        let mesh = ExtrudedMesh::new(two_triangles(), 2).unwrap();
        let per_k: Vec<BTreeSet<String>> = mesh
            .types
            .iter()
            .map(|l| l.iter().map(pattern_string).collect())
            .collect();
        assert_eq!(per_k[0], BTreeSet::from(["A".to_string()]));
        assert_eq!(per_k[1], ["A,A", "A,B", "X"].map(String::from).into());
        assert_eq!(per_k[2], ["A,A,A", "A,A,B", "A,B,B", "A,X", "X,B"].map(String::from).into());
        assert_eq!(per_k[3], ["A,A,X", "A,X,B", "X,B,B"].map(String::from).into());
    }

    /// Brute-force census of the extruded complex: all faces of all prism
    /// staircases, as sorted (vertex id, layer) tuples split by time extent.
    fn census(base: &BaseMesh, timesteps: usize) -> Vec<[BTreeSet<Vec<(u32, i32)>>; 2]> {
        let n = base.dim();
        let paths = staircase_triangulate(n);
        let mut seen: Vec<[BTreeSet<Vec<(u32, i32)>>; 2]> =
            (0..n + 2).map(|_| [BTreeSet::new(), BTreeSet::new()]).collect();
        for cell in 0..base.face_count(n) as u32 {
            let verts = base.face(n, cell);
            for tau in 0..timesteps as i32 - 1 {
                for path in &paths {
                    let corners: Vec<(u32, i32)> = path
                        .iter()
                        .map(|v| match *v {
                            PrismVertex::Bottom(i) => (verts[i], tau),
                            PrismVertex::Top(i) => (verts[i], tau + 1),
                        })
                        .collect();
                    for pick in 1u32..1 << corners.len() {
                        let sub: Vec<(u32, i32)> = (0..corners.len())
                            .filter(|i| pick >> i & 1 == 1)
                            .map(|i| corners[i])
                            .collect();
                        let spans = sub.iter().any(|c| c.1 != sub[0].1);
                        seen[sub.len() - 1][spans as usize].insert(sub);
                    }
                }
            }
        }
        seen
    }

    fn all_handles(mesh: &ExtrudedMesh, k: usize, kind: ElementKind) -> Vec<ElementHandle> {
        let mut out = Vec::new();
        for layer in 0..mesh.timesteps() as i32 {
            for idx in 0..mesh.element_count(k, kind, layer) {
                out.push(mesh.element_at(k, kind, layer, idx));
            }
        }
        out
    }

    fn corner_tuples(mesh: &ExtrudedMesh, h: ElementHandle) -> Vec<(u32, i32)> {
        mesh.vertices(h).unwrap().iter().map(|v| (v.index as u32, v.layer)).collect()
    }

    #[test]
    fn traversal_reproduces_brute_force_census() {
        for (base, t) in [
            (two_triangles(), 4usize),
            (BaseMesh::triangulated_grid(&[3, 3]).unwrap(), 3),
            (BaseMesh::triangulated_grid(&[2, 2, 2]).unwrap(), 3),
        ] {
            let n = base.dim();
            let truth = census(&base, t);
            let mesh = ExtrudedMesh::new(base, t).unwrap();
            for k in 0..=n + 1 {
                for (side, kind) in [(0, ElementKind::Ordinal), (1, ElementKind::Interval)] {
                    let handles = all_handles(&mesh, k, kind);
                    let got: BTreeSet<Vec<(u32, i32)>> =
                        handles.iter().map(|&h| corner_tuples(&mesh, h)).collect();
                    assert_eq!(got.len(), handles.len(), "handles must be injective");
                    assert_eq!(got, truth[k][side], "n={n} k={k} side={side}");
                }
            }
        }
    }

    #[test]
    fn faces_and_cofaces_are_dual_on_the_whole_mesh() {
        let mesh = ExtrudedMesh::new(two_triangles(), 3).unwrap();
        for k in 0..=3 {
            for h in all_handles(&mesh, k, ElementKind::All) {
                let sides = mesh.sides(h).unwrap();
                if k > 0 {
                    assert_eq!(sides.len(), k + 1);
                }
                for s in &sides {
                    assert!(
                        mesh.side_of(*s).unwrap().contains(&h),
                        "{s} missing coface {h}"
                    );
                }
                for p in mesh.side_of(h).unwrap() {
                    assert!(mesh.sides(p).unwrap().contains(&h), "{p} missing face {h}");
                }
            }
        }
    }

    #[test]
    fn walls_bound_two_cells_except_on_the_boundary() {
        let base = BaseMesh::triangulated_grid(&[3, 3]).unwrap();
        let truth = census(&base, 3);
        let mesh = ExtrudedMesh::new(base, 3).unwrap();
        let mut bound: BTreeMap<Vec<(u32, i32)>, usize> = BTreeMap::new();
        for top in truth[3][0].iter().chain(truth[3][1].iter()) {
            for drop in 0..top.len() {
                let mut f = top.clone();
                f.remove(drop);
                *bound.entry(f).or_default() += 1;
            }
        }
        for h in all_handles(&mesh, 2, ElementKind::All) {
            let got = mesh.side_of(h).unwrap().len();
            assert_eq!(got, bound[&corner_tuples(&mesh, h)], "{h}");
            assert!(got == 1 || got == 2);
        }
    }

    /// Extruding a Kuhn-triangulated grid gives exactly the same spacetime
    /// complex as the implicit regular construction.
    #[test]
    fn grid_extrusion_matches_regular_mesh() {
        use super::super::regular::RegularSpacetimeMesh;
        let dims = [3usize, 3];
        let t = 3;
        let reg = RegularSpacetimeMesh::new(&dims, t).unwrap();
        let base = BaseMesh::triangulated_grid(&dims).unwrap();
        let ext = ExtrudedMesh::new(base, t).unwrap();
        for k in 0..=3 {
            for kind in [ElementKind::Ordinal, ElementKind::Interval] {
                let from_ext: BTreeSet<Vec<(u64, i32)>> = all_handles(&ext, k, kind)
                    .iter()
                    .map(|&h| corner_tuples(&ext, h).iter().map(|&(v, l)| (v as u64, l)).collect())
                    .collect();
                let mut from_reg = BTreeSet::new();
                for layer in 0..t as i32 {
                    for idx in 0..reg.element_count(k, kind, layer) {
                        let h = reg.element_at(k, kind, layer, idx);
                        let tuple: Vec<(u64, i32)> = reg
                            .vertices(h)
                            .unwrap()
                            .iter()
                            .map(|v| (v.index, v.layer))
                            .collect();
                        from_reg.insert(tuple);
                    }
                }
                assert_eq!(from_ext, from_reg, "k={k} {kind:?}");
            }
        }
    }

    #[test]
    fn vertices_come_out_sorted_by_global_id() {
        let mesh = ExtrudedMesh::new(two_triangles(), 3).unwrap();
        let v = mesh.verts_per_layer();
        for k in 0..=3 {
            for h in all_handles(&mesh, k, ElementKind::All) {
                let ids: Vec<u64> =
                    mesh.vertices(h).unwrap().iter().map(|x| x.global_id(v)).collect();
                assert!(ids.windows(2).all(|w| w[0] < w[1]), "{h}: {ids:?}");
            }
        }
    }

    #[test]
    fn invalid_handles_are_rejected() {
        let mesh = ExtrudedMesh::new(two_triangles(), 3).unwrap();
        let bad = [
            ElementHandle::face(3, 2, 0, 0),  // only 2 cells
            ElementHandle::face(2, 0, 99, 0), // no such type
            ElementHandle::face(3, 0, 0, 2),  // spanning element at last layer
            ElementHandle::lattice(2, [0, 0, 0], 0, 0),
            ElementHandle::face(4, 0, 0, 0),
        ];
        for h in bad {
            assert!(mesh.vertices(h).is_err(), "{h} should be rejected");
        }
    }
}
