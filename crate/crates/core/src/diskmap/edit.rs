//! Local surgery on arrangement maps.
//!
//! [`MapEditor`] keeps mutable copies of the permutations and applies
//! elementary operations (edge subdivision, edge insertion and removal,
//! vertex dissolution, crossing smoothing). Dead half-edges are dropped and
//! the survivors renumbered in their original order by [`MapEditor::finish`].

use super::{ArcId, ArrangementMap, EdgeKind, Puncture};

#[derive(Debug, Clone)]
pub(crate) struct MapEditor {
    twin: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    kind: Vec<EdgeKind>,
    arc: Vec<Option<ArcId>>,
    alive: Vec<bool>,
    anchor: Vec<usize>,
    root: usize,
}

impl MapEditor {
    pub fn new(m: &ArrangementMap) -> Self {
        let h = m.half_edge_count();
        MapEditor {
            twin: m.raw_twin().to_vec(),
            next: m.raw_next().to_vec(),
            prev: (0..h).map(|e| m.prev(e)).collect(),
            kind: m.raw_kind().to_vec(),
            arc: m.raw_arc().to_vec(),
            alive: vec![true; h],
            anchor: m.raw_anchor().to_vec(),
            root: m.boundary_root(),
        }
    }

    pub fn twin(&self, h: usize) -> usize {
        self.twin[h]
    }

    pub fn ccw(&self, h: usize) -> usize {
        self.twin[self.prev[h]]
    }

    #[cfg(test)]
    pub fn set_arc(&mut self, h: usize, arc: Option<ArcId>) {
        self.arc[h] = arc;
    }

    pub fn set_anchor(&mut self, p: Puncture, h: usize) {
        self.anchor[p as usize - 1] = h;
    }

    fn link(&mut self, a: usize, b: usize) {
        self.next[a] = b;
        self.prev[b] = a;
    }

    fn new_pair(&mut self, kind: EdgeKind, arc: Option<ArcId>) -> (usize, usize) {
        let a = self.twin.len();
        let b = a + 1;
        self.twin.extend([b, a]);
        self.next.extend([a, b]);
        self.prev.extend([a, b]);
        self.kind.extend([kind, kind]);
        self.arc.extend([arc, arc]);
        self.alive.extend([true, true]);
        (a, b)
    }

    /// Subdivides the edge of `h` (u→v) at a new vertex c. Afterwards `h` is
    /// u→c and the returned half-edge is c→v; the old twin becomes c→u.
    pub fn split_edge(&mut self, h: usize) -> usize {
        let t = self.twin[h];
        let (hn, tn) = self.new_pair(self.kind[h], self.arc[h]);
        let nh = self.next[h];
        let pt = self.prev[t];
        self.link(h, hn);
        self.link(hn, nh);
        self.link(pt, tn);
        self.link(tn, t);
        hn
    }

    /// Joins the heads of `a1` and `a2`, which must lie on the same face, by
    /// a new arc edge. Returns the half-edge from head(a1) to head(a2); its
    /// left face is the part of the old face following `a2`.
    pub fn add_edge(&mut self, a1: usize, a2: usize, arc: ArcId) -> usize {
        let (e, et) = self.new_pair(EdgeKind::Arc, Some(arc));
        let b1 = self.next[a1];
        let b2 = self.next[a2];
        self.link(a1, e);
        self.link(e, b2);
        self.link(a2, et);
        self.link(et, b1);
        e
    }

    /// Deletes the edge of `h`, merging its two faces.
    pub fn remove_edge(&mut self, h: usize) {
        let t = self.twin[h];
        let (ph, nh, pt, nt) = (self.prev[h], self.next[h], self.prev[t], self.next[t]);
        self.link(ph, nt);
        self.link(pt, nh);
        let survivor = [ph, nh, pt, nt].into_iter().find(|&x| x != h && x != t).expect("removed edge is not isolated");
        for a in self.anchor.iter_mut() {
            if *a == h || *a == t {
                *a = survivor;
            }
        }
        self.alive[h] = false;
        self.alive[t] = false;
    }

    /// Removes the degree-2 vertex at the tail of `o0`, fusing its two edges.
    pub fn dissolve_degree2(&mut self, o0: usize) {
        let o1 = self.ccw(o0);
        debug_assert_eq!(self.ccw(o1), o0, "vertex must have degree 2");
        let (i0, i1) = (self.twin[o0], self.twin[o1]);
        let (n0, n1) = (self.next[o0], self.next[o1]);
        self.link(i0, n1);
        self.link(i1, n0);
        self.twin[i0] = i1;
        self.twin[i1] = i0;
        self.retarget(o0, i1);
        self.retarget(o1, i0);
        self.alive[o0] = false;
        self.alive[o1] = false;
    }

    /// Resolves the crossing at the tail of `o0`. With arms `o0..o3` taken
    /// counterclockwise, `pair_first` joins arms (0,1) and (2,3); otherwise
    /// (1,2) and (3,0). Arc ids of the fused edges are left as they were.
    pub fn smooth_crossing(&mut self, o0: usize, pair_first: bool) {
        let mut o = [o0; 4];
        for k in 1..4 {
            o[k] = self.ccw(o[k - 1]);
        }
        debug_assert_eq!(self.ccw(o[3]), o0, "vertex must have degree 4");
        let i: Vec<usize> = o.iter().map(|&x| self.twin[x]).collect();
        let nexts: Vec<usize> = o.iter().map(|&x| self.next[x]).collect();
        let pairs = if pair_first { [(0, 1), (2, 3)] } else { [(1, 2), (3, 0)] };
        for (p, q) in pairs {
            self.link(i[p], nexts[q]);
            self.link(i[q], nexts[p]);
            self.twin[i[p]] = i[q];
            self.twin[i[q]] = i[p];
        }
        for k in 0..4 {
            self.retarget(o[k], i[(k + 1) % 4]);
            self.alive[o[k]] = false;
        }
    }

    /// Smooths the crossing at the tail of `a` so that the arms `a` and `b`
    /// (adjacent around the crossing) join into one strand.
    pub fn smooth_joining(&mut self, a: usize, b: usize) {
        if self.ccw(a) == b {
            self.smooth_crossing(a, true);
        } else {
            debug_assert_eq!(self.ccw(b), a, "arms must be adjacent");
            self.smooth_crossing(a, false);
        }
    }

    fn degree(&self, o: usize) -> usize {
        let mut d = 1;
        let mut x = self.ccw(o);
        while x != o {
            d += 1;
            x = self.ccw(x);
        }
        d
    }

    /// Follows an arc from the half-edge `start` straight through crossings
    /// to the boundary and gives every traversed edge the id `arc`.
    pub fn retrace(&mut self, start: usize, arc: ArcId) {
        let mut h = start;
        loop {
            let t = self.twin[h];
            self.arc[h] = Some(arc);
            self.arc[t] = Some(arc);
            if self.degree(t) != 4 {
                return;
            }
            h = self.ccw(self.ccw(t));
        }
    }

    fn retarget(&mut self, from: usize, to: usize) {
        for a in self.anchor.iter_mut() {
            if *a == from {
                *a = to;
            }
        }
        if self.root == from {
            self.root = to;
        }
    }

    /// Compacts the surviving half-edges and builds the resulting map.
    pub fn finish(self) -> ArrangementMap {
        let mut new_index = vec![usize::MAX; self.twin.len()];
        let mut count = 0;
        for (e, &alive) in self.alive.iter().enumerate() {
            if alive {
                new_index[e] = count;
                count += 1;
            }
        }
        let mut twin = Vec::with_capacity(count);
        let mut next = Vec::with_capacity(count);
        let mut kind = Vec::with_capacity(count);
        let mut arc = Vec::with_capacity(count);
        for e in (0..self.twin.len()).filter(|&e| self.alive[e]) {
            twin.push(new_index[self.twin[e]]);
            next.push(new_index[self.next[e]]);
            kind.push(self.kind[e]);
            arc.push(self.arc[e]);
        }
        let anchor = self.anchor.iter().map(|&a| new_index[a]).collect();
        ArrangementMap::from_parts(twin, next, kind, arc, anchor, new_index[self.root])
            .expect("editor keeps permutations consistent")
    }
}

/// A new arc described against an existing map: it leaves the boundary
/// inside slot `start` (an interior boundary half-edge), crosses the edges
/// of `crossings` in order (each half-edge lies on the face currently being
/// traversed), and reaches the boundary inside slot `end`. When both slots
/// coincide the arc starts before it ends along that slot.
///
/// Punctures sitting in a face the arc passes through go to its left when
/// their bit is set in `left` (bit `p` for label `p`); all others keep their
/// face.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Route {
    pub start: usize,
    pub crossings: Vec<usize>,
    pub end: usize,
    pub left: u64,
}

/// Inserts the arc described by `route` with id `arc`.
pub(crate) fn insert_route(m: &ArrangementMap, route: &Route, arc: ArcId) -> ArrangementMap {
    let mut visited = vec![m.face_of(route.start)];
    visited.extend(route.crossings.iter().map(|&h| m.face_of(m.twin(h))));
    let face_punctures = m.face_punctures();

    let mut ed = MapEditor::new(m);
    let first_half = ed.split_edge(route.start);
    let mut arrive = route.start;
    let end_arrive = if route.end == route.start {
        ed.split_edge(first_half);
        first_half
    } else {
        ed.split_edge(route.end);
        route.end
    };

    let mut segments = Vec::with_capacity(route.crossings.len() + 1);
    for &h in &route.crossings {
        let hn = ed.split_edge(h);
        let e = ed.add_edge(arrive, h, arc);
        segments.push(e);
        // tn arrives at the new crossing from the far side
        arrive = ed.twin(hn);
    }
    segments.push(ed.add_edge(arrive, end_arrive, arc));

    for (face, &e) in visited.iter().zip(&segments) {
        for &p in &face_punctures[*face] {
            let side = if route.left >> p & 1 == 1 { e } else { ed.twin(e) };
            ed.set_anchor(p, side);
        }
    }
    ed.finish()
}

/// Deletes `arc`, dissolving the crossings and boundary endpoints it leaves
/// behind.
pub(crate) fn remove_arc(m: &ArrangementMap, arc: ArcId) -> ArrangementMap {
    let path = m.arc_path(arc).expect("arc exists");
    let on_arc = |h: usize| m.arc_id(h) == Some(arc);
    let mut ed = MapEditor::new(m);
    for &e in &path {
        ed.remove_edge(e);
    }
    for &e in &path[1..] {
        let o = m.rotation(e).into_iter().find(|&o| !on_arc(o)).expect("crossing arm");
        ed.dissolve_degree2(o);
    }
    drop_bare_vertices(&ed.finish())
}

/// Dissolves boundary vertices that carry no arc endpoint. A map without
/// arcs keeps exactly one boundary vertex.
pub(crate) fn drop_bare_vertices(m: &ArrangementMap) -> ArrangementMap {
    let slots = m.boundary_cycle();
    let bare: Vec<usize> = slots.iter().map(|&s| m.next(s)).filter(|&o| m.kind(o) == EdgeKind::Boundary).collect();
    let skip = usize::from(bare.len() == slots.len());
    if bare.len() <= skip {
        return m.clone();
    }
    let mut ed = MapEditor::new(m);
    for &o in &bare[skip..] {
        ed.dissolve_degree2(o);
    }
    ed.finish()
}
