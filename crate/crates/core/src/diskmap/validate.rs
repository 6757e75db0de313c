use std::collections::BTreeMap;

use thiserror::Error;

use super::{ArcId, ArrangementMap, EdgeKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MapError {
    /// The permutations themselves are broken (twin not a fixed-point-free
    /// involution, next not a bijection, indices out of range).
    #[error("malformed map: {0}")]
    Malformed(String),
    #[error("topology violation: {0}")]
    Topology(TopologyViolation),
    #[error("unknown arc {0}")]
    UnknownArc(ArcId),
    #[error("unsupported puncture count {0} (need 2..=62)")]
    PunctureCount(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TopologyViolation {
    #[error("half-edge {half_edge} and its twin disagree on edge kind or arc id")]
    TwinMismatch { half_edge: usize },
    #[error("half-edge {half_edge}: arc edges need an arc id, boundary edges must not have one")]
    KindArcMismatch { half_edge: usize },
    #[error("boundary root {half_edge} is not an interior boundary half-edge")]
    BadRoot { half_edge: usize },
    #[error("outer face contains non-boundary half-edge {half_edge}")]
    OuterFaceNotBoundary { half_edge: usize },
    #[error("boundary edge at half-edge {half_edge} is not on the outer face")]
    BoundaryNotOuter { half_edge: usize },
    #[error("map is disconnected: half-edge {half_edge} unreachable")]
    Disconnected { half_edge: usize },
    #[error("Euler characteristic V - E + F = {value}, expected 2")]
    Euler { value: i64 },
    #[error("vertex at half-edge {half_edge} has invalid degree {degree} or edge pattern")]
    BadVertex { half_edge: usize, degree: usize },
    #[error("crossing at half-edge {half_edge} does not alternate between two distinct arcs")]
    BadCrossing { half_edge: usize },
    #[error("arc {arc} is not a single simple boundary-to-boundary path")]
    BadArc { arc: ArcId },
    #[error("puncture {puncture} lies in the outer face")]
    PunctureOutside { puncture: u32 },
    #[error("fewer than two punctures")]
    TooFewPunctures,
    #[error("arc {arc} does not split face {face} consistently")]
    InconsistentSides { arc: ArcId, face: usize },
}

fn topo(v: TopologyViolation) -> MapError {
    MapError::Topology(v)
}

/// Checks every structural invariant of an arrangement map. Permutation
/// defects are already rejected by [`ArrangementMap::from_parts`]; this
/// function reports the first topological violation found.
pub fn validate_map(m: &ArrangementMap) -> Result<(), MapError> {
    let h = m.half_edge_count();
    if m.n() < 2 {
        return Err(topo(TopologyViolation::TooFewPunctures));
    }
    for e in 0..h {
        let t = m.twin(e);
        if m.kind(e) != m.kind(t) || m.arc_id(e) != m.arc_id(t) {
            return Err(topo(TopologyViolation::TwinMismatch { half_edge: e }));
        }
        if (m.kind(e) == EdgeKind::Arc) != m.arc_id(e).is_some() {
            return Err(topo(TopologyViolation::KindArcMismatch { half_edge: e }));
        }
    }

    let root = m.boundary_root();
    if m.kind(root) != EdgeKind::Boundary {
        return Err(topo(TopologyViolation::BadRoot { half_edge: root }));
    }
    let outer = m.outer_face();
    if m.face_of(root) == outer {
        return Err(topo(TopologyViolation::BadRoot { half_edge: root }));
    }
    for e in m.face_cycle(m.twin(root)) {
        if m.kind(e) != EdgeKind::Boundary {
            return Err(topo(TopologyViolation::OuterFaceNotBoundary { half_edge: e }));
        }
    }
    for e in 0..h {
        if m.kind(e) == EdgeKind::Boundary && m.face_of(e) != outer && m.face_of(m.twin(e)) != outer {
            return Err(topo(TopologyViolation::BoundaryNotOuter { half_edge: e }));
        }
    }

    // connectivity through next and twin
    let mut seen = vec![false; h];
    let mut stack = vec![root];
    seen[root] = true;
    while let Some(e) = stack.pop() {
        for f in [m.next(e), m.twin(e)] {
            if !seen[f] {
                seen[f] = true;
                stack.push(f);
            }
        }
    }
    if let Some(e) = seen.iter().position(|s| !s) {
        return Err(topo(TopologyViolation::Disconnected { half_edge: e }));
    }

    // vertices
    let mut vertex_seen = vec![false; h];
    let mut vertices = 0i64;
    for e in 0..h {
        if vertex_seen[e] {
            continue;
        }
        let rot = m.rotation(e);
        for &o in &rot {
            vertex_seen[o] = true;
        }
        vertices += 1;
        check_vertex(m, &rot)?;
    }
    let edges = (h / 2) as i64;
    let euler = vertices - edges + m.face_count() as i64;
    if euler != 2 {
        return Err(topo(TopologyViolation::Euler { value: euler }));
    }

    // arcs: each id is one simple boundary-to-boundary path covering all its edges
    let mut edge_count: BTreeMap<ArcId, usize> = BTreeMap::new();
    for e in 0..h {
        if let Some(a) = m.arc_id(e) {
            *edge_count.entry(a).or_default() += 1;
        }
    }
    for (&arc, &count) in &edge_count {
        let path = m.arc_path(arc).ok_or(topo(TopologyViolation::BadArc { arc }))?;
        if path.iter().any(|&e| m.arc_id(e) != Some(arc)) || 2 * path.len() != count {
            return Err(topo(TopologyViolation::BadArc { arc }));
        }
    }

    for p in 1..=m.n() as u32 {
        if m.puncture_face(p) == outer {
            return Err(topo(TopologyViolation::PunctureOutside { puncture: p }));
        }
    }
    Ok(())
}

fn check_vertex(m: &ArrangementMap, rot: &[usize]) -> Result<(), MapError> {
    let first = rot[0];
    let bad = || topo(TopologyViolation::BadVertex { half_edge: first, degree: rot.len() });
    let boundary: Vec<usize> = rot.iter().copied().filter(|&o| m.kind(o) == EdgeKind::Boundary).collect();
    match (rot.len(), boundary.len()) {
        (2, 2) => Ok(()),
        (3, 2) => {
            // counterclockwise: forward boundary, arc, backward boundary; the
            // arc must point into the interior.
            let arc_pos = rot.iter().position(|&o| m.kind(o) == EdgeKind::Arc).ok_or_else(bad)?;
            let forward = rot[(arc_pos + 2) % 3];
            if m.face_of(forward) == m.outer_face() {
                return Err(bad());
            }
            Ok(())
        }
        (4, 0) => {
            let ids: Vec<ArcId> = rot.iter().map(|&o| m.arc_id(o).expect("arc edge")).collect();
            if ids[0] == ids[1] || ids[0] != ids[2] || ids[1] != ids[3] {
                return Err(topo(TopologyViolation::BadCrossing { half_edge: first }));
            }
            Ok(())
        }
        _ => Err(bad()),
    }
}
