//! SVG drawings of watermelons.
//!
//! Layout is integer-only so output is byte-identical everywhere: boundary
//! vertices sit evenly on the disk's circle, crossings are placed by
//! repeated neighbour averaging (a Tutte embedding with the boundary
//! pinned), and each puncture goes to the centroid of its face, spread on a
//! small circle when a face holds several. Arcs are straight polylines
//! through their crossings.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::diskmap::EdgeKind;
use crate::watermelon::Watermelon;

/// Internal fixed-point radius of the disk.
const RADIUS: i64 = 1 << 20;
/// Radius of the disk in the emitted drawing.
const SVG_RADIUS: i64 = 1000;
const RELAXATION_ROUNDS: usize = 400;
const PALETTE: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf", "#8c564b", "#e377c2"];

type Point = (i64, i64);

/// `(cos, sin)` of `2π · num / den`, scaled by `RADIUS`.
fn unit_point(num: i64, den: i64) -> Point {
    const SCALE: i128 = 1 << 40;
    // π · 2^40, rounded
    const PI: i128 = 3_454_217_652_358;
    // reduce to [-π, π]
    let num = num.rem_euclid(den) as i128;
    let den = den as i128;
    let x = (2 * PI * num + den / 2) / den - if 2 * num > den { 2 * PI } else { 0 };
    let (mut sin, mut cos) = (0i128, 0i128);
    let mut term = SCALE;
    for k in 0..40 {
        match k % 4 {
            0 => cos += term,
            1 => sin += term,
            2 => cos -= term,
            _ => sin -= term,
        }
        term = term * x / SCALE / (k + 1);
        if term == 0 {
            break;
        }
    }
    let r = RADIUS as i128;
    ((cos * r / SCALE) as i64, (sin * r / SCALE) as i64)
}

struct Layout {
    /// Position per vertex, keyed by the vertex's smallest half-edge.
    vertex: BTreeMap<usize, Point>,
    puncture: Vec<Point>,
}

fn layout(w: &Watermelon) -> Layout {
    let m = w.map();
    let ring = m.boundary_cycle();
    let count = ring.len() as i64;
    let mut vertex = BTreeMap::new();
    let mut angle_index = BTreeMap::new();
    for (i, &h) in ring.iter().enumerate() {
        let v = m.vertex_of(h);
        vertex.insert(v, unit_point(i as i64, count));
        angle_index.insert(v, i as i64);
    }

    // Interior vertices and their arc neighbours.
    let mut neighbours: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for h in 0..m.half_edge_count() {
        if m.kind(h) != EdgeKind::Arc {
            continue;
        }
        let (a, b) = (m.vertex_of(h), m.vertex_of(m.twin(h)));
        if !angle_index.contains_key(&a) {
            neighbours.entry(a).or_default().push(b);
        }
    }
    for &v in neighbours.keys() {
        vertex.insert(v, (0, 0));
    }
    for _ in 0..RELAXATION_ROUNDS {
        for (v, ns) in &neighbours {
            let k = ns.len() as i64;
            let (sx, sy) = ns.iter().fold((0, 0), |(x, y), u| (x + vertex[u].0, y + vertex[u].1));
            vertex.insert(*v, (sx.div_euclid(k), sy.div_euclid(k)));
        }
    }

    // Face centroids, with boundary stretches represented by their
    // midpoints on the circle.
    let mut centroid = vec![(0i64, 0i64); m.face_count()];
    for (f, rep) in m.face_representatives().into_iter().enumerate() {
        if f == m.outer_face() {
            continue;
        }
        let mut points = Vec::new();
        for h in m.face_cycle(rep) {
            let v = m.vertex_of(h);
            points.push(vertex[&v]);
            if m.kind(h) == EdgeKind::Boundary {
                let a = angle_index[&v];
                let b = angle_index[&m.vertex_of(m.twin(h))];
                let span = if b > a { b - a } else { b - a + count };
                points.push(unit_point(2 * a + span, 2 * count));
            }
        }
        let k = points.len() as i64;
        let (sx, sy) = points.iter().fold((0, 0), |(x, y), p| (x + p.0, y + p.1));
        centroid[f] = (sx.div_euclid(k), sy.div_euclid(k));
    }

    let mut puncture = vec![(0, 0); m.n()];
    for (f, ps) in m.face_punctures().into_iter().enumerate() {
        let k = ps.len() as i64;
        for (i, &p) in ps.iter().enumerate() {
            let c = centroid[f];
            puncture[p as usize - 1] = if k == 1 {
                c
            } else {
                let (x, y) = unit_point(i as i64, k);
                let spread = 3 + k;
                (c.0 + x / spread, c.1 + y / spread)
            };
        }
    }
    Layout { vertex, puncture }
}

fn to_svg(p: Point) -> (i64, i64) {
    let scale = |c: i64| (c * SVG_RADIUS).div_euclid(RADIUS);
    (scale(p.0), -scale(p.1))
}

/// Deterministic SVG picture of `w`.
pub fn render_svg(w: &Watermelon) -> String {
    let m = w.map();
    let lay = layout(w);
    let margin = SVG_RADIUS / 10;
    let side = 2 * (SVG_RADIUS + margin);
    let mut out = String::new();
    let corner = -SVG_RADIUS - margin;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{corner} {corner} {side} {side}" width="600" height="600">"#
    )
    .unwrap();
    writeln!(out, r##"<circle cx="0" cy="0" r="{SVG_RADIUS}" fill="#fafafa" stroke="#333" stroke-width="4"/>"##)
        .unwrap();
    for (k, arc) in w.arcs().iter().enumerate() {
        let mut points: Vec<(i64, i64)> = arc.half_edges.iter().map(|&h| to_svg(lay.vertex[&m.vertex_of(h)])).collect();
        if let Some(&last) = arc.half_edges.last() {
            points.push(to_svg(lay.vertex[&m.vertex_of(m.twin(last))]));
        }
        let path: Vec<String> = points.iter().map(|(x, y)| format!("{x},{y}")).collect();
        writeln!(
            out,
            r#"<polyline points="{}" fill="none" stroke="{}" stroke-width="5"><title>{}</title></polyline>"#,
            path.join(" "),
            PALETTE[k % PALETTE.len()],
            arc.label
        )
        .unwrap();
    }
    for (i, &p) in lay.puncture.iter().enumerate() {
        let (x, y) = to_svg(p);
        writeln!(out, r##"<circle cx="{x}" cy="{y}" r="14" fill="#000"/>"##).unwrap();
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-size="44" font-family="sans-serif">{}</text>"#,
            x + 18,
            y - 18,
            i + 1
        )
        .unwrap();
    }
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::watermelon::{alt_watermelon, standard_watermelon};

    #[test]
    fn unit_points_on_the_axes() {
        assert_eq!(unit_point(0, 4), (RADIUS, 0));
        let (x, y) = unit_point(1, 4);
        assert!(x.abs() <= 1 && y == RADIUS, "{x} {y}");
        let (x, y) = unit_point(2, 4);
        assert!((x + RADIUS).abs() <= 1 && y.abs() <= 1, "{x} {y}");
    }

    #[test]
    fn points_lie_on_the_circle() {
        for den in [3, 7, 29] {
            for num in 0..den {
                let (x, y) = unit_point(num, den);
                let r2 = (x as i128).pow(2) + (y as i128).pow(2);
                let err = (r2 - (RADIUS as i128).pow(2)).abs();
                assert!(err < 4 * RADIUS as i128, "{num}/{den}");
            }
        }
    }

    #[test]
    fn drawing_lists_every_arc_and_puncture() {
        let w = alt_watermelon(5).unwrap();
        let svg = render_svg(&w);
        assert_eq!(svg.matches("<polyline").count(), w.len());
        assert_eq!(svg.matches("<text").count(), 5);
        assert_eq!(svg, render_svg(&w));
    }

    #[test]
    fn empty_disk_draws() {
        let svg = render_svg(&Watermelon::empty(3).unwrap());
        assert!(!svg.contains("<polyline"));
        assert_eq!(svg.matches("<text").count(), 3);
    }

    #[test]
    fn crossings_stay_inside_the_disk() {
        let w = standard_watermelon(6).unwrap();
        let lay = layout(&w);
        for &(x, y) in lay.vertex.values() {
            assert!((x as i128).pow(2) + (y as i128).pow(2) <= (RADIUS as i128 + 4).pow(2));
        }
    }
}
