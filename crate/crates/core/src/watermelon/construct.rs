//! The two explicit maximal watermelons.
//!
//! Both are described by punctures and straight chords on a circle, with
//! every position an integer multiple of a fixed angle. The circle is cut
//! open at angle 0⁻ and the chords are realized as half-circles over a line,
//! which have the same endpoint interleavings and so the same crossing
//! pairs. Crossings are located with exact integer arithmetic, chords are
//! threaded through the growing map one at a time, and punctures go into the
//! faces touching the boundary at their angles.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use super::{insert, Watermelon, WatermelonError};
use crate::diskmap::edit::{drop_bare_vertices, insert_route, MapEditor, Route};
use crate::diskmap::{empty_map, ArcId, ArrangementMap, SurfaceSpec};

struct Layout {
    period: i64,
    /// Angles of punctures 1..=n.
    punctures: Vec<i64>,
    /// Endpoint angles and label of every chord, in arc-id order.
    chords: Vec<(i64, i64, String)>,
}

/// Arc pairs `(i, j)` in the column order of the standard homology table:
/// consecutive pairs, then `(1, n)`, then the rest lexicographically.
pub(crate) fn standard_order(n: usize) -> Vec<(usize, usize)> {
    let mut order: Vec<(usize, usize)> = (1..n).map(|i| (i, i + 1)).collect();
    if n > 2 {
        order.push((1, n));
    }
    for i in 1..=n {
        for j in i + 2..=n {
            if (i, j) != (1, n) {
                order.push((i, j));
            }
        }
    }
    order
}

/// Standard chord endpoints on `D_n` in units of `1/n²` of a turn.
fn standard_endpoints(n: i64, i: i64, j: i64) -> (i64, i64) {
    let period = n * n;
    let z = (j - 2) * n + (j - i);
    let w = (i - 2) * n + n - (j - i);
    (z.rem_euclid(period), w.rem_euclid(period))
}

pub fn standard_watermelon(n: usize) -> Result<Watermelon, WatermelonError> {
    if n < 2 {
        return Err(WatermelonError::TooFewPunctures { needed: 2, got: n });
    }
    let spec = SurfaceSpec::new(n)?;
    let ni = n as i64;
    let layout = Layout {
        period: ni * ni,
        punctures: (0..ni).map(|k| k * ni).collect(),
        chords: standard_order(n)
            .into_iter()
            .map(|(i, j)| {
                let (z, w) = standard_endpoints(ni, i as i64, j as i64);
                (z, w, format!("alpha_{i}_{j}"))
            })
            .collect(),
    };
    let (map, labels) = realize(spec, &layout);
    Watermelon::from_map(drop_bare_vertices(&map), &labels)
}

/// The maximal watermelon with `n - 1` short arcs: the standard system on
/// the first `n - 1` punctures, one extra puncture next to puncture 1, the
/// arcs `alpha'_2_j` and the arc `alpha'_1_3`.
pub fn alt_watermelon(n: usize) -> Result<Watermelon, WatermelonError> {
    if n < 4 {
        return Err(WatermelonError::TooFewPunctures { needed: 4, got: n });
    }
    let spec = SurfaceSpec::new(n)?;
    let ni = n as i64;
    let m = ni - 1;
    // unit angle: 1 / ((n + 1)(n - 1)²) of a turn
    let scale = ni + 1;
    let period = scale * m * m;
    let mut punctures: Vec<i64> = (0..m).map(|k| k * m * scale).collect();
    punctures.push(ni);
    let mut chords: Vec<(i64, i64, String)> = standard_order(n - 1)
        .into_iter()
        .map(|(i, j)| {
            let (z, w) = standard_endpoints(m, i as i64, j as i64);
            (z * scale, w * scale, format!("alpha_{i}_{j}"))
        })
        .collect();
    for j in 3..=ni {
        let z = (j - 2) * m * scale + (j - 2) * scale + 1;
        let w = ni + 2 - j;
        chords.push((z.rem_euclid(period), w, format!("alpha'_2_{j}")));
    }
    let layout = Layout { period, punctures, chords };
    let (map, labels) = realize(spec, &layout);
    let base = Watermelon::from_map(map, &labels)?;

    // alpha'_1_3 cuts off punctures 1 and 2. Its endpoints sit just outside
    // the caps of the short arcs around them: between alpha_2_3 and
    // alpha'_2_3 after puncture 2, and between alpha_1_2 and alpha'_2_n
    // before puncture 1.
    let endpoints: Vec<i64> = layout.chords.iter().flat_map(|c| [c.0, c.1]).collect();
    let slot_after = |angle: i64| endpoints.iter().filter(|&&a| a <= angle).count();
    let (s, t) = (slot_after((m + 1) * scale), slot_after(period - scale));
    let route = insert::route_with_side(&base, s, t, 0b110).expect("alpha'_1_3 fits between the caps");
    let id = ArcId(layout.chords.len() as u32);
    let mut labels = base.labels();
    labels.insert(id, "alpha'_1_3".to_string());
    let map = insert_route(base.map(), &route, id);
    Watermelon::from_map(drop_bare_vertices(&map), &labels)
}

/// Exact rational `num / den` with `den > 0`.
#[derive(Debug, Clone, Copy)]
struct Ratio {
    num: i128,
    den: i128,
}

impl Ratio {
    fn new(num: i128, den: i128) -> Self {
        if den < 0 {
            Ratio { num: -num, den: -den }
        } else {
            Ratio { num, den }
        }
    }

    fn cmp(&self, other: &Ratio) -> Ordering {
        (self.num * other.den).cmp(&(other.num * self.den))
    }
}

/// Builds the chord arrangement with the cut vertex still in place. The
/// root leaves the cut vertex, so slot `k` of the boundary cycle is the
/// stretch just before the `k`-th endpoint along the line.
fn realize(spec: SurfaceSpec, layout: &Layout) -> (ArrangementMap, BTreeMap<ArcId, String>) {
    let mut angles: Vec<i64> = layout.punctures.clone();
    angles.extend(layout.chords.iter().flat_map(|c| [c.0, c.1]));
    angles.sort();
    let distinct = angles.windows(2).all(|w| w[0] != w[1]);
    assert!(distinct, "layout positions must be distinct");
    assert!(angles.iter().all(|&a| (0..layout.period).contains(&a)));

    for attempt in 0..64u64 {
        let x = positions(&angles, attempt);
        let pos = |angle: i64| x[angles.binary_search(&angle).expect("known angle")];
        let spans: Vec<(i128, i128)> = layout
            .chords
            .iter()
            .map(|&(a, b, _)| {
                let (p, q) = (pos(a), pos(b));
                (p.min(q), p.max(q))
            })
            .collect();
        let Some(orders) = crossing_orders(&spans) else { continue };

        let mut map = empty_map(spec);
        let mut placed: Vec<i128> = Vec::new();
        for (k, &(a, b)) in spans.iter().enumerate() {
            let slots = map.boundary_cycle();
            let start = slots[placed.partition_point(|&p| p < a)];
            let end = slots[placed.partition_point(|&p| p < b)];
            let mut face_edge = start;
            let mut crossings = Vec::new();
            for &other in &orders[k] {
                let id = ArcId(other as u32);
                let h = map
                    .face_cycle(face_edge)
                    .into_iter()
                    .find(|&h| map.arc_id(h) == Some(id))
                    .expect("chord crosses a side of the current face");
                crossings.push(h);
                face_edge = map.twin(h);
            }
            map = insert_route(&map, &Route { start, crossings, end, left: 0 }, ArcId(k as u32));
            let at = placed.partition_point(|&p| p < a);
            placed.insert(at, a);
            let at = placed.partition_point(|&p| p < b);
            placed.insert(at, b);
        }

        let slots = map.boundary_cycle();
        let mut ed = MapEditor::new(&map);
        for (p, &angle) in layout.punctures.iter().enumerate() {
            let slot = slots[placed.partition_point(|&q| q < pos(angle))];
            ed.set_anchor(p as u32 + 1, slot);
        }
        let labels = layout.chords.iter().enumerate().map(|(k, c)| (ArcId(k as u32), c.2.clone())).collect();
        return (ed.finish(), labels);
    }
    panic!("no generic chord positions found");
}

/// Strictly increasing integer positions, one per sorted angle; the gaps
/// vary with `attempt` so that coincident crossings can be avoided.
fn positions(angles: &[i64], attempt: u64) -> Vec<i128> {
    let mut state = 0x9e37_79b9_7f4a_7c15u64 ^ attempt.wrapping_mul(0xbf58_476d_1ce4_e5b9);
    let mut x = 0i128;
    angles
        .iter()
        .map(|_| {
            state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
            x += 1 + (state >> 33) as i128 % 1000;
            x
        })
        .collect()
}

/// For each chord, the earlier chords it crosses, ordered along it. Returns
/// `None` when two crossings on one chord coincide.
fn crossing_orders(spans: &[(i128, i128)]) -> Option<Vec<Vec<usize>>> {
    let mut orders = Vec::with_capacity(spans.len());
    for (k, &(a, b)) in spans.iter().enumerate() {
        let mut hits: Vec<(Ratio, usize)> = Vec::new();
        for (j, &(c, d)) in spans.iter().enumerate() {
            let interleave = (a < c && c < b && b < d) || (c < a && a < d && d < b);
            if j != k && interleave {
                // half-circles over [a, b] and [c, d] meet above this abscissa
                hits.push((Ratio::new(c * d - a * b, c + d - a - b), j));
            }
        }
        hits.sort_by(|p, q| p.0.cmp(&q.0));
        if hits.windows(2).any(|w| w[0].0.cmp(&w[1].0) == Ordering::Equal) {
            return None;
        }
        orders.push(hits.into_iter().filter(|&(_, j)| j < k).map(|(_, j)| j).collect());
    }
    Some(orders)
}
