//! Equivalence code of a watermelon.
//!
//! A watermelon is determined up to equivalence by the cyclic order of arc
//! endpoints along the boundary together with, for each puncture, the side
//! of every arc it lies on. The code reads that data from every starting
//! endpoint (and in both directions when reflections are allowed) and keeps
//! the lexicographically smallest reading. Unlike the map-level canonical
//! code it does not see how crossings are ordered along arcs, so it is
//! unchanged by sliding an arc across a crossing of two others through a
//! puncture-free triangle.

use std::collections::HashMap;
use std::fmt::Write;

use super::Watermelon;
use crate::diskmap::ArcId;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Reading {
    word: Vec<u32>,
    punctures: Vec<Vec<u64>>,
}

/// Code equal for two watermelons iff an orientation-preserving
/// homeomorphism of the disk (orientation-reversing too when
/// `allow_reflection`) carries one system to the other, respecting puncture
/// labels when `labeled`.
pub fn equivalence_code(w: &Watermelon, labeled: bool, allow_reflection: bool) -> String {
    let m = w.map();
    let slots = m.boundary_cycle();
    let len = slots.len();
    // (slot index, arc) for every endpoint, in counterclockwise order
    let ends: Vec<(usize, ArcId)> = slots
        .iter()
        .enumerate()
        .filter_map(|(i, &s)| m.endpoint_arc_half_edge(s).map(|h| (i, m.arc_id(h).expect("arc half-edge"))))
        .collect();
    let n = w.n();
    let sides: HashMap<ArcId, Vec<bool>> =
        w.arcs().iter().map(|a| (a.id, m.side_mask(a.id).expect("own arc").bits().to_vec())).collect();
    let puncture_faces: Vec<usize> = (1..=n as u32).map(|p| m.puncture_face(p)).collect();

    let k = ends.len();
    let mut best: Option<Reading> = None;
    let directions: &[bool] = if allow_reflection { &[false, true] } else { &[false] };
    for &reversed in directions {
        for r in 0..k.max(1) {
            let order: Vec<usize> = (0..k).map(|j| if reversed { (r + k - j) % k } else { (r + j) % k }).collect();
            let mut rank: HashMap<ArcId, u32> = HashMap::new();
            let mut stretch_bit: Vec<bool> = Vec::new();
            let mut word = Vec::with_capacity(k);
            for &e in &order {
                let (slot, arc) = ends[e];
                let next_rank = rank.len() as u32;
                let rk = *rank.entry(arc).or_insert_with(|| {
                    // the boundary stretch right after the first endpoint
                    let face = if reversed { m.face_of(slots[slot]) } else { m.face_of(slots[(slot + 1) % len]) };
                    stretch_bit.push(sides[&arc][face]);
                    next_rank
                });
                word.push(rk);
            }
            let mut by_rank: Vec<ArcId> = vec![ArcId(0); rank.len()];
            for (&a, &rk) in &rank {
                by_rank[rk as usize] = a;
            }
            let mut punctures: Vec<Vec<u64>> = puncture_faces
                .iter()
                .map(|&f| {
                    let mut words = vec![0u64; by_rank.len().div_ceil(64)];
                    for (rk, a) in by_rank.iter().enumerate() {
                        if sides[a][f] == stretch_bit[rk] {
                            words[rk / 64] |= 1 << (rk % 64);
                        }
                    }
                    words
                })
                .collect();
            if !labeled {
                punctures.sort();
            }
            let reading = Reading { word, punctures };
            if best.as_ref().is_none_or(|b| reading < *b) {
                best = Some(reading);
            }
        }
    }
    let best = best.expect("at least one reading");
    let mut out = format!("{}{}:", if labeled { "L" } else { "U" }, n);
    for (i, x) in best.word.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{x}").expect("writing to a String");
    }
    out.push(':');
    for (i, v) in best.punctures.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        for word in v.iter().rev() {
            write!(out, "{word:016x}").expect("writing to a String");
        }
    }
    out
}
