//! Filling a puncture: P-parallel classes and P-reduction.
//!
//! After a puncture is filled some crossings stop being essential. They are
//! removed by rewiring: an empty half-bigon (cut off by two arcs and the
//! boundary) is resolved by smoothing its corner crossing, which slides one
//! endpoint of each arc past the other; an empty bigon is resolved by
//! smoothing both of its corners, exchanging the two sides. Each step removes
//! a crossing, so the process terminates.

use std::collections::{BTreeMap, HashSet, VecDeque};

use super::{Bipartition, Watermelon, WatermelonError};
use crate::diskmap::edit::{remove_arc, MapEditor};
use crate::diskmap::{ArcId, ArrangementMap, EdgeKind, Puncture};

/// Arcs of a watermelon grouped by what they become once a puncture is
/// filled.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PParallelClasses {
    /// Arcs isolating the filled puncture; they become inessential.
    pub discarded: Vec<ArcId>,
    /// Groups of arcs that become isotopic, each sorted, ordered by their
    /// smallest id.
    pub classes: Vec<Vec<ArcId>>,
}

fn check_puncture(w: &Watermelon, p: Puncture) -> Result<(), WatermelonError> {
    if w.n() < 3 {
        return Err(WatermelonError::TooFewPunctures { needed: 3, got: w.n() });
    }
    if p == 0 || p as usize > w.n() {
        return Err(WatermelonError::UnknownPuncture(p));
    }
    Ok(())
}

/// Drops bit `p` from a puncture mask and shifts higher labels down.
fn remove_bit(mask: u64, p: Puncture) -> u64 {
    let low = mask & ((1u64 << p) - 1);
    let high = (mask >> (p + 1)) << p;
    low | high
}

pub fn p_parallel_classes(w: &Watermelon, p: Puncture) -> Result<PParallelClasses, WatermelonError> {
    check_puncture(w, p)?;
    let mut discarded = Vec::new();
    let mut groups: BTreeMap<Bipartition, Vec<ArcId>> = BTreeMap::new();
    for a in w.arcs() {
        let reduced = remove_bit(w.side_punctures(a.id), p);
        match Bipartition::from_side(reduced, w.n() - 1) {
            None => discarded.push(a.id),
            Some(b) => groups.entry(b).or_default().push(a.id),
        }
    }
    let mut classes: Vec<Vec<ArcId>> = groups.into_values().collect();
    classes.sort();
    Ok(PParallelClasses { discarded, classes })
}

/// Fills puncture `p`, removes the arcs that become inessential, tightens
/// the remaining arcs into minimal position and keeps the lowest-id arc of
/// each P-parallel class. Punctures above `p` are renumbered down by one.
pub fn p_reduce(w: &Watermelon, p: Puncture) -> Result<Watermelon, WatermelonError> {
    let classes = p_parallel_classes(w, p)?;
    let m = w.map();
    let anchors: Vec<usize> =
        m.raw_anchor().iter().enumerate().filter(|&(i, _)| i + 1 != p as usize).map(|(_, &a)| a).collect();
    let mut map = ArrangementMap::from_parts(
        m.raw_twin().to_vec(),
        m.raw_next().to_vec(),
        m.raw_kind().to_vec(),
        m.raw_arc().to_vec(),
        anchors,
        m.boundary_root(),
    )?;
    for &a in &classes.discarded {
        map = remove_arc(&map, a);
    }
    while let Some(next) = resolve_half_bigon(&map).or_else(|| resolve_bigon(&map)) {
        map = next;
    }
    for class in &classes.classes {
        for &a in &class[1..] {
            map = remove_arc(&map, a);
        }
    }
    Watermelon::from_map(map, &w.labels())
}

/// Arc half-edges traced from the endpoint that `start` leaves.
fn trace(m: &ArrangementMap, start: usize) -> Vec<usize> {
    m.trace_from(start).expect("arc traces to the boundary")
}

fn end_half_edges(m: &ArrangementMap, arc: ArcId) -> [usize; 2] {
    let path = m.arc_path(arc).expect("arc exists");
    [path[0], m.twin(*path.last().expect("nonempty"))]
}

/// Index along `trace` of the first crossing with `other`.
fn first_crossing(m: &ArrangementMap, trace: &[usize], other: ArcId) -> Option<usize> {
    (1..trace.len()).find(|&i| m.arc_id(m.ccw(trace[i])) == Some(other))
}

/// Punctures in the region reached from `seed` without crossing `walls`,
/// and whether that region touches the boundary.
fn region(m: &ArrangementMap, seed: usize, walls: &HashSet<usize>) -> (u64, bool) {
    let masks = m.face_puncture_masks();
    let reps = m.face_representatives();
    let mut seen = vec![false; m.face_count()];
    let mut queue = VecDeque::from([m.face_of(seed)]);
    seen[m.face_of(seed)] = true;
    let (mut punctures, mut touches_boundary) = (0, false);
    while let Some(f) = queue.pop_front() {
        punctures |= masks[f];
        for e in m.face_cycle(reps[f]) {
            if m.kind(e) == EdgeKind::Boundary {
                touches_boundary = true;
                continue;
            }
            if walls.contains(&e) {
                continue;
            }
            let g = m.face_of(m.twin(e));
            if !seen[g] {
                seen[g] = true;
                queue.push_back(g);
            }
        }
    }
    (punctures, touches_boundary)
}

fn walls_of(m: &ArrangementMap, segments: &[&[usize]]) -> HashSet<usize> {
    segments.iter().flat_map(|s| s.iter().flat_map(|&h| [h, m.twin(h)])).collect()
}

/// Finds a crossing `x` of arcs `a`, `b` that is the first crossing of each
/// seen from one of its endpoints, such that the region between the two
/// pieces and the boundary holds no puncture, and slides the endpoints past
/// each other by smoothing `x`.
fn resolve_half_bigon(m: &ArrangementMap) -> Option<ArrangementMap> {
    let ids = m.arc_ids();
    for &a in &ids {
        for &b in &ids {
            if a == b {
                continue;
            }
            for ea in end_half_edges(m, a) {
                let ta = trace(m, ea);
                let Some(i) = first_crossing(m, &ta, b) else { continue };
                for eb in end_half_edges(m, b) {
                    let tb = trace(m, eb);
                    let Some(j) = first_crossing(m, &tb, a) else { continue };
                    if m.vertex_of(ta[i]) != m.vertex_of(tb[j]) {
                        continue;
                    }
                    let arm_a = m.twin(ta[i - 1]);
                    let arm_b = m.twin(tb[j - 1]);
                    // the corner between the two arms must lie on the left of a
                    if m.next(ta[i - 1]) != arm_b {
                        continue;
                    }
                    let walls = walls_of(m, &[&ta[..i], &tb[..j]]);
                    let (punctures, _) = region(m, ta[i - 1], &walls);
                    if punctures != 0 {
                        continue;
                    }
                    let mut ed = MapEditor::new(m);
                    // join a's piece towards its endpoint with b's far side
                    let b_far = m.ccw(arm_a);
                    ed.smooth_joining(arm_a, b_far);
                    ed.retrace(ea, b);
                    ed.retrace(eb, a);
                    return Some(ed.finish());
                }
            }
        }
    }
    None
}

/// Finds two crossings of arcs `a`, `b` consecutive along both arcs whose
/// bigon holds no puncture, and exchanges the bigon's two sides.
fn resolve_bigon(m: &ArrangementMap) -> Option<ArrangementMap> {
    let ids = m.arc_ids();
    for (k, &a) in ids.iter().enumerate() {
        for &b in &ids[k + 1..] {
            let ta = trace(m, end_half_edges(m, a)[0]);
            let tb = trace(m, end_half_edges(m, b)[0]);
            let on_a: Vec<usize> = (1..ta.len()).filter(|&i| m.arc_id(m.ccw(ta[i])) == Some(b)).collect();
            if on_a.len() < 2 {
                continue;
            }
            let on_b: Vec<usize> = (1..tb.len()).filter(|&j| m.arc_id(m.ccw(tb[j])) == Some(a)).collect();
            let position_on_b = |i: usize| {
                let v = m.vertex_of(ta[i]);
                on_b.iter().position(|&j| m.vertex_of(tb[j]) == v).expect("shared crossing")
            };
            for pair in on_a.windows(2) {
                let (i1, i2) = (pair[0], pair[1]);
                let (q1, q2) = (position_on_b(i1), position_on_b(i2));
                if q1.abs_diff(q2) != 1 {
                    continue;
                }
                let (j1, j2) = (on_b[q1], on_b[q2]);
                let b_piece = if j1 < j2 { &tb[j1..j2] } else { &tb[j2..j1] };
                let walls = walls_of(m, &[&ta[i1..i2], b_piece]);
                let inside = [ta[i1], m.twin(ta[i1])]
                    .into_iter()
                    .map(|seed| region(m, seed, &walls))
                    .find(|&(_, touches)| !touches);
                match inside {
                    Some((0, _)) => {}
                    _ => continue,
                }
                // arms of b pointing along the bigon side
                let (b_at_1, b_at_2) =
                    if j1 < j2 { (tb[j1], m.twin(tb[j2 - 1])) } else { (m.twin(tb[j1 - 1]), tb[j2]) };
                let mut ed = MapEditor::new(m);
                ed.smooth_joining(m.twin(ta[i1 - 1]), b_at_1);
                ed.smooth_joining(ta[i2], b_at_2);
                ed.retrace(ta[0], a);
                ed.retrace(tb[0], b);
                return Some(ed.finish());
            }
        }
    }
    None
}
