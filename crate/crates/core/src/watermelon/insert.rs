//! Enumeration of the arcs that can be added to a watermelon.
//!
//! A new arc with endpoints in boundary slots `s ≤ t` must cross exactly the
//! arcs with one endpoint strictly between its own, each once, so it passes
//! through a sequence of distinct faces. For every such face path the faces
//! it does not enter fall on a fixed side of the new arc, while punctures in
//! the faces it enters may go either way. Each resulting choice of slots and
//! left-side punctures is screened with the partition rules and then
//! realized; results are deduplicated by their labelled equivalence code.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;

use super::{equivalence_code, full_mask, validate_watermelon, Watermelon};
use crate::diskmap::edit::{drop_bare_vertices, insert_route, Route};
use crate::diskmap::{ArcId, ArrangementMap, EdgeKind};

/// Every watermelon obtained from `w` by adding one arc, up to labelled
/// equivalence, sorted by equivalence code.
pub fn enumerate_insertions(w: &Watermelon) -> Vec<Watermelon> {
    let ctx = Context::new(w);
    let slot_count = ctx.slots.len();
    let pairs: Vec<(usize, usize)> = (0..slot_count).flat_map(|s| (s..slot_count).map(move |t| (s, t))).collect();
    let candidates: BTreeMap<(usize, usize, u64), Route> =
        pairs.par_iter().map(|&(s, t)| ctx.candidates(s, t)).collect::<Vec<_>>().into_iter().flatten().collect();

    let id = w.next_arc_id();
    let labels = w.labels();
    let mut found: Vec<(String, Watermelon)> = candidates
        .into_par_iter()
        .map(|(_, route)| {
            let map = drop_bare_vertices(&insert_route(w.map(), &route, id));
            let grown = Watermelon::from_map(map, &labels).expect("insertion keeps the map well-formed");
            debug_assert!(validate_watermelon(&grown).is_valid(), "screened insertion must be valid");
            (equivalence_code(&grown, true, false), grown)
        })
        .collect();
    found.sort_by(|a, b| a.0.cmp(&b.0));
    found.dedup_by(|a, b| a.0 == b.0);
    found.into_iter().map(|(_, w)| w).collect()
}

/// A screened route for a new arc between slots `s ≤ t` with exactly the
/// punctures `left` on its left, if one exists.
pub(crate) fn route_with_side(w: &Watermelon, s: usize, t: usize, left: u64) -> Option<Route> {
    Context::new(w).candidates(s, t).into_iter().find(|((_, _, l), _)| *l == left).map(|(_, r)| r)
}

/// True iff no arc can be added.
pub fn is_saturated(w: &Watermelon) -> bool {
    enumerate_insertions(w).is_empty()
}

struct Context<'a> {
    map: &'a ArrangementMap,
    n: usize,
    slots: Vec<usize>,
    /// Slot indices whose head is an endpoint of each arc.
    ends: HashMap<ArcId, (usize, usize)>,
    /// Puncture side mask of every arc.
    sides: HashMap<ArcId, u64>,
    face_punctures: Vec<u64>,
}

impl<'a> Context<'a> {
    fn new(w: &'a Watermelon) -> Self {
        let map = w.map();
        let slots = map.boundary_cycle();
        let mut ends: HashMap<ArcId, (usize, usize)> = HashMap::new();
        for (i, &s) in slots.iter().enumerate() {
            if let Some(h) = map.endpoint_arc_half_edge(s) {
                let a = map.arc_id(h).expect("arc half-edge");
                ends.entry(a).and_modify(|e| e.1 = i).or_insert((i, i));
            }
        }
        let sides = w.arcs().iter().map(|a| (a.id, w.side_punctures(a.id))).collect();
        Context { map, n: w.n(), slots, ends, sides, face_punctures: map.face_puncture_masks() }
    }

    /// Screened insertions with endpoints in slots `s ≤ t`, keyed by
    /// `(s, t, left punctures)`.
    fn candidates(&self, s: usize, t: usize) -> Vec<((usize, usize, u64), Route)> {
        let between = |k: usize| s <= k && k < t;
        let must_cross: Vec<ArcId> =
            self.ends.iter().filter(|(_, &(a, b))| between(a) != between(b)).map(|(&id, _)| id).collect();
        let mut out: BTreeMap<u64, Route> = BTreeMap::new();
        let mut search = PathSearch {
            ctx: self,
            end: self.slots[t],
            must_cross: &must_cross,
            crossed: Vec::new(),
            visited: vec![self.map.face_of(self.slots[s])],
        };
        search.extend(self.slots[s], &mut |ctx, crossings| {
            let route = Route { start: ctx.slots[s], crossings: crossings.to_vec(), end: ctx.slots[t], left: 0 };
            let Some((forced_left, free)) = ctx.forced_sides(&route) else { return };
            let mut subset = free;
            loop {
                let left = forced_left | subset;
                if !out.contains_key(&left) && ctx.admissible(left, &must_cross) {
                    out.insert(left, Route { left, ..route.clone() });
                }
                if subset == 0 {
                    break;
                }
                subset = (subset - 1) & free;
            }
        });
        out.into_iter().map(|(left, r)| ((s, t, left), r)).collect()
    }

    /// Partition rules for a new arc with left side `left`.
    fn admissible(&self, left: u64, must_cross: &[ArcId]) -> bool {
        let all = full_mask(self.n);
        if left == 0 || left == all {
            return false;
        }
        self.sides.iter().all(|(id, &b)| {
            if must_cross.contains(id) {
                [left & b, left & !b & all, !left & b & all, !left & !b & all].iter().all(|&r| r != 0)
            } else {
                left != b && left != all & !b
            }
        })
    }

    /// Punctures forced to the left of `route`, and punctures free to go
    /// either way. `None` if the sides are inconsistent.
    fn forced_sides(&self, route: &Route) -> Option<(u64, u64)> {
        let m = self.map;
        let mut entries = vec![route.start];
        entries.extend(route.crossings.iter().map(|&h| m.twin(h)));
        let mut exits = route.crossings.clone();
        exits.push(route.end);

        let face_count = m.face_count();
        let mut visited = vec![false; face_count];
        for &a in &entries {
            visited[m.face_of(a)] = true;
        }
        let mut side: Vec<Option<bool>> = vec![None; face_count];
        let mut queue = VecDeque::new();
        let mut free = 0;
        for (&a, &b) in entries.iter().zip(&exits) {
            free |= self.face_punctures[m.face_of(a)];
            // left: strictly after the exit up to strictly before the entry
            // with both endpoints in one slot the right side is a sliver of it
            let chains: &[(usize, usize, bool)] = if a == b { &[(b, a, true)] } else { &[(b, a, true), (a, b, false)] };
            for &(from, to, is_left) in chains {
                let mut e = m.next(from);
                while e != to && e != from {
                    if m.kind(e) == EdgeKind::Arc {
                        let f = m.face_of(m.twin(e));
                        if !visited[f] {
                            match side[f] {
                                Some(v) if v != is_left => return None,
                                Some(_) => {}
                                None => {
                                    side[f] = Some(is_left);
                                    queue.push_back(f);
                                }
                            }
                        }
                    }
                    e = m.next(e);
                }
            }
        }
        let reps = m.face_representatives();
        while let Some(f) = queue.pop_front() {
            let here = side[f];
            for e in m.face_cycle(reps[f]) {
                if m.kind(e) != EdgeKind::Arc {
                    continue;
                }
                let g = m.face_of(m.twin(e));
                if visited[g] {
                    continue;
                }
                match side[g] {
                    None => {
                        side[g] = here;
                        queue.push_back(g);
                    }
                    Some(v) if Some(v) != here => return None,
                    Some(_) => {}
                }
            }
        }
        let left = side
            .iter()
            .zip(&self.face_punctures)
            .filter(|(s, _)| **s == Some(true))
            .fold(0, |acc, (_, &mask)| acc | mask);
        Some((left, free))
    }
}

struct PathSearch<'c, 'a> {
    ctx: &'c Context<'a>,
    end: usize,
    must_cross: &'c [ArcId],
    crossed: Vec<usize>,
    visited: Vec<usize>,
}

impl PathSearch<'_, '_> {
    /// Depth-first search over face paths from the face of `at` to the face
    /// of the end slot, crossing every required arc exactly once.
    fn extend(&mut self, at: usize, emit: &mut dyn FnMut(&Context, &[usize])) {
        let m = self.ctx.map;
        let face = m.face_of(at);
        if face == m.face_of(self.end) {
            if self.crossed.len() == self.must_cross.len() {
                emit(self.ctx, &self.crossed);
            }
            return;
        }
        for h in m.face_cycle(at) {
            let Some(a) = m.arc_id(h) else { continue };
            if !self.must_cross.contains(&a) || self.crossed.iter().any(|&c| m.arc_id(c) == Some(a)) {
                continue;
            }
            let next_face = m.face_of(m.twin(h));
            if self.visited.contains(&next_face) {
                continue;
            }
            self.crossed.push(h);
            self.visited.push(next_face);
            self.extend(m.twin(h), emit);
            self.crossed.pop();
            self.visited.pop();
        }
    }
}
