use std::collections::{HashMap, VecDeque};
use std::fmt::Write;

use super::{ArcId, ArrangementMap, EdgeKind};

/// Isomorphism-invariant code of an arrangement.
///
/// Every interior boundary half-edge is tried as a root (and every root of
/// the mirror image when `allow_reflection` is set); from each root a
/// breadth-first walk following `next` then `twin` numbers the half-edges,
/// and the resulting trace is compared lexicographically. Per half-edge the
/// trace records the numbers of its successor and twin, its kind, the
/// first-occurrence rank of its arc, and, on the first half-edge seen in each
/// face, either the face's label set (`labeled`) or its puncture count.
pub fn canonical_code(m: &ArrangementMap, labeled: bool, allow_reflection: bool) -> String {
    let mut best = min_trace(m, labeled);
    if allow_reflection {
        let mirrored = min_trace(&m.mirror(), labeled);
        best = best.min(mirrored);
    }
    let mut out = String::with_capacity(best.len() * 3);
    out.push_str(if labeled { "L" } else { "U" });
    for t in best {
        write!(out, ".{t:x}").expect("writing to a String");
    }
    out
}

fn min_trace(m: &ArrangementMap, labeled: bool) -> Vec<u64> {
    let masks = m.face_puncture_masks();
    m.boundary_cycle()
        .into_iter()
        .map(|root| trace(m, root, labeled, &masks))
        .min()
        .expect("boundary cycle is never empty")
}

fn trace(m: &ArrangementMap, root: usize, labeled: bool, masks: &[u64]) -> Vec<u64> {
    let h = m.half_edge_count();
    let mut num = vec![usize::MAX; h];
    let mut order = Vec::with_capacity(h);
    let mut queue = VecDeque::from([root]);
    num[root] = 0;
    order.push(root);
    while let Some(e) = queue.pop_front() {
        for f in [m.next(e), m.twin(e)] {
            if num[f] == usize::MAX {
                num[f] = order.len();
                order.push(f);
                queue.push_back(f);
            }
        }
    }

    let mut arc_rank: HashMap<ArcId, u64> = HashMap::new();
    let mut face_seen = vec![false; m.face_count()];
    let mut out = Vec::with_capacity(5 * h);
    for &e in &order {
        out.push(num[m.next(e)] as u64);
        out.push(num[m.twin(e)] as u64);
        match (m.kind(e), m.arc_id(e)) {
            (EdgeKind::Arc, Some(a)) => {
                let next_rank = arc_rank.len() as u64 + 1;
                out.push(1);
                out.push(*arc_rank.entry(a).or_insert(next_rank));
            }
            _ => {
                out.push(0);
                out.push(0);
            }
        }
        let f = m.face_of(e);
        if face_seen[f] {
            out.push(u64::MAX);
        } else {
            face_seen[f] = true;
            out.push(if labeled { masks[f] } else { masks[f].count_ones() as u64 });
        }
    }
    out
}
