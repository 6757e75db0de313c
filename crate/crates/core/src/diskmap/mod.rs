//! Combinatorial maps of arc arrangements on a punctured disk.
//!
//! An [`ArrangementMap`] stores a finite family of pairwise transverse arcs
//! with endpoints on the boundary circle of a disk carrying `n` labelled
//! punctures. Only the combinatorics are kept: half-edges, their twins and
//! face successors. Punctures never touch arcs, so they are recorded as
//! living inside faces.
//!
//! Conventions used throughout the crate:
//!
//! * the face of a half-edge is the face on its left, and `next` walks that
//!   face counterclockwise;
//! * the outgoing half-edges around a vertex are visited counterclockwise by
//!   `twin ∘ prev`, clockwise by `next ∘ twin`;
//! * the boundary circle is traversed counterclockwise by the *interior*
//!   boundary half-edges (interior on their left); `boundary_root` is one of
//!   them.

mod canon;
pub(crate) mod edit;
mod validate;

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use canon::canonical_code;
pub use validate::{validate_map, MapError, TopologyViolation};

/// Identifier of an arc inside an arrangement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ArcId(pub u32);

impl fmt::Display for ArcId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "a{}", self.0)
    }
}

/// Puncture labels run over `1..=n`.
pub type Puncture = u32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeKind {
    Boundary,
    Arc,
}

/// The punctured disk `D_n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SurfaceSpec {
    n_punctures: usize,
}

/// Largest puncture count supported by the bitmask encodings used for
/// bipartitions and homology vectors.
pub const MAX_PUNCTURES: usize = 62;

impl SurfaceSpec {
    pub fn new(n_punctures: usize) -> Result<Self, MapError> {
        if !(2..=MAX_PUNCTURES).contains(&n_punctures) {
            return Err(MapError::PunctureCount(n_punctures));
        }
        Ok(Self { n_punctures })
    }

    pub fn n(&self) -> usize {
        self.n_punctures
    }

    pub fn labels(&self) -> impl Iterator<Item = Puncture> {
        1..=self.n_punctures as Puncture
    }
}

/// Half-edge representation of an arrangement of arcs on `D_n`.
///
/// Values are immutable once built; all editing goes through the crate
/// internal editor, which produces fresh compacted maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArrangementMap {
    twin: Vec<usize>,
    next: Vec<usize>,
    kind: Vec<EdgeKind>,
    arc: Vec<Option<ArcId>>,
    /// `anchor[p - 1]` is a half-edge whose face holds puncture `p`.
    anchor: Vec<usize>,
    root: usize,
    // derived
    prev: Vec<usize>,
    face_of: Vec<usize>,
    face_count: usize,
}

impl ArrangementMap {
    /// Assembles a map from raw arrays. Only the permutation structure is
    /// checked here (it is needed to compute faces); topological checks live
    /// in [`validate_map`].
    pub fn from_parts(
        twin: Vec<usize>,
        next: Vec<usize>,
        kind: Vec<EdgeKind>,
        arc: Vec<Option<ArcId>>,
        anchor: Vec<usize>,
        root: usize,
    ) -> Result<Self, MapError> {
        let h = twin.len();
        if next.len() != h || kind.len() != h || arc.len() != h {
            return Err(MapError::Malformed(format!(
                "array lengths differ: twin {}, next {}, edge_kind {}, arc_id {}",
                h,
                next.len(),
                kind.len(),
                arc.len()
            )));
        }
        if h == 0 {
            return Err(MapError::Malformed("no half-edges".into()));
        }
        for (i, &t) in twin.iter().enumerate() {
            if t >= h {
                return Err(MapError::Malformed(format!("twin[{i}] = {t} out of range")));
            }
            if t == i {
                return Err(MapError::Malformed(format!("twin has a fixed point at {i}")));
            }
            if twin[t] != i {
                return Err(MapError::Malformed(format!("twin is not an involution at {i}")));
            }
        }
        let mut prev = vec![usize::MAX; h];
        for (i, &nx) in next.iter().enumerate() {
            if nx >= h {
                return Err(MapError::Malformed(format!("next[{i}] = {nx} out of range")));
            }
            if prev[nx] != usize::MAX {
                return Err(MapError::Malformed(format!("next is not a bijection: {nx} hit twice")));
            }
            prev[nx] = i;
        }
        if root >= h {
            return Err(MapError::Malformed(format!("boundary_root {root} out of range")));
        }
        if let Some(&bad) = anchor.iter().find(|&&a| a >= h) {
            return Err(MapError::Malformed(format!("puncture anchor {bad} out of range")));
        }
        let mut face_of = vec![usize::MAX; h];
        let mut face_count = 0;
        for start in 0..h {
            if face_of[start] != usize::MAX {
                continue;
            }
            let mut e = start;
            loop {
                face_of[e] = face_count;
                e = next[e];
                if e == start {
                    break;
                }
            }
            face_count += 1;
        }
        Ok(Self { twin, next, kind, arc, anchor, root, prev, face_of, face_count })
    }

    pub fn half_edge_count(&self) -> usize {
        self.twin.len()
    }

    pub fn n(&self) -> usize {
        self.anchor.len()
    }

    pub fn twin(&self, h: usize) -> usize {
        self.twin[h]
    }

    pub fn next(&self, h: usize) -> usize {
        self.next[h]
    }

    pub fn prev(&self, h: usize) -> usize {
        self.prev[h]
    }

    pub fn kind(&self, h: usize) -> EdgeKind {
        self.kind[h]
    }

    pub fn arc_id(&self, h: usize) -> Option<ArcId> {
        self.arc[h]
    }

    pub fn boundary_root(&self) -> usize {
        self.root
    }

    /// Next outgoing half-edge counterclockwise around the origin of `h`.
    pub fn ccw(&self, h: usize) -> usize {
        self.twin[self.prev[h]]
    }

    /// Next outgoing half-edge clockwise around the origin of `h`.
    pub fn cw(&self, h: usize) -> usize {
        self.next[self.twin[h]]
    }

    /// Outgoing half-edges around the origin of `h`, counterclockwise,
    /// starting with `h`.
    pub fn rotation(&self, h: usize) -> Vec<usize> {
        let mut out = vec![h];
        let mut e = self.ccw(h);
        while e != h && out.len() <= self.twin.len() {
            out.push(e);
            e = self.ccw(e);
        }
        out
    }

    pub fn degree(&self, h: usize) -> usize {
        self.rotation(h).len()
    }

    /// Canonical name of the origin vertex of `h`: its smallest outgoing
    /// half-edge.
    pub fn vertex_of(&self, h: usize) -> usize {
        *self.rotation(h).iter().min().expect("rotation is never empty")
    }

    pub fn face_of(&self, h: usize) -> usize {
        self.face_of[h]
    }

    pub fn face_count(&self) -> usize {
        self.face_count
    }

    /// Half-edges of the face of `h`, counterclockwise starting at `h`.
    pub fn face_cycle(&self, h: usize) -> Vec<usize> {
        let mut out = vec![h];
        let mut e = self.next[h];
        while e != h {
            out.push(e);
            e = self.next[e];
        }
        out
    }

    /// Smallest half-edge of every face, indexed by face.
    pub fn face_representatives(&self) -> Vec<usize> {
        let mut rep = vec![usize::MAX; self.face_count];
        for (h, &f) in self.face_of.iter().enumerate() {
            rep[f] = rep[f].min(h);
        }
        rep
    }

    pub fn outer_face(&self) -> usize {
        self.face_of[self.twin[self.root]]
    }

    pub fn puncture_face(&self, p: Puncture) -> usize {
        self.face_of[self.anchor[(p - 1) as usize]]
    }

    pub fn puncture_anchor(&self, p: Puncture) -> usize {
        self.anchor[(p - 1) as usize]
    }

    /// Sorted puncture labels per face.
    pub fn face_punctures(&self) -> Vec<Vec<Puncture>> {
        let mut out = vec![Vec::new(); self.face_count];
        for p in 1..=self.n() as Puncture {
            out[self.puncture_face(p)].push(p);
        }
        out
    }

    /// Bitmask of punctures per face (bit `p` for label `p`).
    pub fn face_puncture_masks(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.face_count];
        for p in 1..=self.n() as Puncture {
            out[self.puncture_face(p)] |= 1 << p;
        }
        out
    }

    /// Interior boundary half-edges in counterclockwise order, starting at
    /// the root. Each of them is a "slot" where new arc endpoints may go.
    pub fn boundary_cycle(&self) -> Vec<usize> {
        let mut out = vec![self.root];
        let mut e = self.boundary_succ(self.root);
        while e != self.root && out.len() <= self.twin.len() {
            out.push(e);
            e = self.boundary_succ(e);
        }
        out
    }

    /// The interior boundary half-edge following `h` counterclockwise.
    pub fn boundary_succ(&self, h: usize) -> usize {
        // Around the destination: (forward boundary, arc?, backward boundary)
        // counterclockwise; the forward one is ccw of the backward one.
        self.ccw(self.twin[h])
    }

    /// The arc half-edge leaving the boundary vertex at the head of the
    /// interior boundary half-edge `h`, if that vertex is an arc endpoint.
    pub fn endpoint_arc_half_edge(&self, h: usize) -> Option<usize> {
        let out = self.next[h];
        (self.kind[out] == EdgeKind::Arc).then_some(out)
    }

    /// Sorted list of arc ids present in the map.
    pub fn arc_ids(&self) -> Vec<ArcId> {
        let mut ids: Vec<ArcId> = self.arc.iter().flatten().copied().collect();
        ids.sort();
        ids.dedup();
        ids
    }

    /// Half-edges of `arc` traced from one boundary endpoint to the other.
    /// The trace starts at the endpoint whose leaving half-edge has the
    /// smaller index, so the result depends only on the map.
    pub fn arc_path(&self, arc: ArcId) -> Option<Vec<usize>> {
        let starts: Vec<usize> = self
            .boundary_cycle()
            .into_iter()
            .filter_map(|b| self.endpoint_arc_half_edge(b))
            .filter(|&h| self.arc[h] == Some(arc))
            .collect();
        let start = *starts.iter().min()?;
        self.trace_from(start)
    }

    /// Walks straight through crossings from the arc half-edge `start`
    /// (which must leave the boundary) until the boundary is reached again.
    pub fn trace_from(&self, start: usize) -> Option<Vec<usize>> {
        let mut path = vec![start];
        let mut h = start;
        loop {
            let t = self.twin[h];
            match self.degree(t) {
                4 => {
                    let straight = self.ccw(self.ccw(t));
                    path.push(straight);
                    h = straight;
                    if path.len() > self.twin.len() {
                        return None;
                    }
                }
                3 => return Some(path),
                _ => return None,
            }
        }
    }

    /// Interior vertices (crossings) met along a traced arc path, in order.
    pub fn crossings_along(&self, path: &[usize]) -> Vec<usize> {
        path.iter().skip(1).map(|&h| self.vertex_of(h)).collect()
    }

    /// Mirror image: every face is traversed in the opposite direction.
    pub fn mirror(&self) -> ArrangementMap {
        let next = self.twin.iter().map(|&t| self.twin[self.prev[t]]).collect();
        let anchor = self.anchor.iter().map(|&a| self.twin[a]).collect();
        ArrangementMap::from_parts(
            self.twin.clone(),
            next,
            self.kind.clone(),
            self.arc.clone(),
            anchor,
            // the old root has the interior on its left; after mirroring its
            // twin does
            self.twin[self.root],
        )
        .expect("mirror of a well-formed map is well-formed")
    }

    /// Two-colouring of faces by side of `arc` (see [`SideMask`]).
    pub fn side_mask(&self, arc: ArcId) -> Result<SideMask, MapError> {
        if !self.arc.contains(&Some(arc)) {
            return Err(MapError::UnknownArc(arc));
        }
        let outer = self.outer_face();
        let mut bit = vec![None; self.face_count];
        let start = self.face_of[self.root];
        bit[start] = Some(false);
        let mut queue = VecDeque::from([start]);
        let cycles = self.face_cycles();
        while let Some(f) = queue.pop_front() {
            let b = bit[f].expect("queued faces are coloured");
            for &h in &cycles[f] {
                if self.kind[h] != EdgeKind::Arc {
                    continue;
                }
                let g = self.face_of[self.twin[h]];
                let nb = if self.arc[h] == Some(arc) { !b } else { b };
                match bit[g] {
                    None => {
                        bit[g] = Some(nb);
                        queue.push_back(g);
                    }
                    Some(old) if old != nb => {
                        return Err(MapError::Topology(TopologyViolation::InconsistentSides { arc, face: g }))
                    }
                    _ => {}
                }
            }
        }
        let bits = bit.iter().enumerate().map(|(f, b)| if f == outer { false } else { b.unwrap_or(false) }).collect();
        Ok(SideMask { bits, outer })
    }

    /// Face cycles indexed by face.
    pub fn face_cycles(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.face_count];
        let mut seen = vec![false; self.face_count];
        for h in 0..self.twin.len() {
            let f = self.face_of[h];
            if !seen[f] {
                seen[f] = true;
                out[f] = self.face_cycle(h);
            }
        }
        out
    }

    pub(crate) fn raw_anchor(&self) -> &[usize] {
        &self.anchor
    }

    pub(crate) fn raw_twin(&self) -> &[usize] {
        &self.twin
    }

    pub(crate) fn raw_next(&self) -> &[usize] {
        &self.next
    }

    pub(crate) fn raw_kind(&self) -> &[EdgeKind] {
        &self.kind
    }

    pub(crate) fn raw_arc(&self) -> &[Option<ArcId>] {
        &self.arc
    }

    /// Renumbers half-edges through `perm` (old index → new index).
    pub fn relabel_half_edges(&self, perm: &[usize]) -> ArrangementMap {
        let h = self.twin.len();
        let mut twin = vec![0; h];
        let mut next = vec![0; h];
        let mut kind = vec![EdgeKind::Boundary; h];
        let mut arc = vec![None; h];
        for e in 0..h {
            twin[perm[e]] = perm[self.twin[e]];
            next[perm[e]] = perm[self.next[e]];
            kind[perm[e]] = self.kind[e];
            arc[perm[e]] = self.arc[e];
        }
        let anchor = self.anchor.iter().map(|&a| perm[a]).collect();
        ArrangementMap::from_parts(twin, next, kind, arc, anchor, perm[self.root])
            .expect("relabelling preserves well-formedness")
    }

    /// Re-anchors every puncture on the smallest half-edge of its face.
    /// Two maps that differ only in anchor choice normalise to the same value.
    pub fn normalized_anchors(mut self) -> Self {
        let rep = self.face_representatives();
        for a in self.anchor.iter_mut() {
            *a = rep[self.face_of[*a]];
        }
        self
    }

    /// Renames arcs through `f`.
    pub fn rename_arcs(&self, f: impl Fn(ArcId) -> ArcId) -> ArrangementMap {
        let mut m = self.clone();
        for a in m.arc.iter_mut().flatten() {
            *a = f(*a);
        }
        m
    }
}

/// Per-face side of one arc. Faces on the same side as the root's face get
/// `false`; the outer face is reported as `false` and carries no meaning.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SideMask {
    bits: Vec<bool>,
    outer: usize,
}

impl SideMask {
    pub fn bit(&self, face: usize) -> bool {
        self.bits[face]
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn outer_face(&self) -> usize {
        self.outer
    }

    /// Puncture bitmask (bit `p` for label `p`) of the `true` side.
    pub fn true_side_punctures(&self, m: &ArrangementMap) -> u64 {
        let mut mask = 0;
        for p in 1..=m.n() as Puncture {
            if self.bits[m.puncture_face(p)] {
                mask |= 1 << p;
            }
        }
        mask
    }
}

/// Builds the empty arrangement (no arcs) on `D_n`: one boundary vertex and
/// one boundary loop edge.
pub fn empty_map(spec: SurfaceSpec) -> ArrangementMap {
    ArrangementMap::from_parts(
        vec![1, 0],
        vec![0, 1],
        vec![EdgeKind::Boundary, EdgeKind::Boundary],
        vec![None, None],
        vec![0; spec.n()],
        0,
    )
    .expect("empty map is well-formed")
}
