//! Watermelons: systems of essential arcs on a punctured disk, pairwise in
//! minimal position and crossing at most once.
//!
//! Validity is decided combinatorially. For arcs meeting at most once,
//! minimal position reduces to two rules: a crossing pair must leave a
//! puncture in each of the four regions it cuts out, and a disjoint pair must
//! induce different bipartitions of the punctures.

mod code;
mod construct;
mod insert;
mod reduce;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diskmap::{self, empty_map, validate_map, ArcId, ArrangementMap, MapError, Puncture, SurfaceSpec};

pub use code::equivalence_code;
pub use construct::{alt_watermelon, standard_watermelon};
pub use insert::{enumerate_insertions, is_saturated};
pub use reduce::{p_parallel_classes, p_reduce, PParallelClasses};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WatermelonError {
    #[error(transparent)]
    Map(#[from] MapError),
    #[error("unknown arc {0}")]
    UnknownArc(ArcId),
    #[error("unknown puncture {0}")]
    UnknownPuncture(Puncture),
    #[error("operation needs at least {needed} punctures, got {got}")]
    TooFewPunctures { needed: usize, got: usize },
}

/// One arc of a watermelon with the half-edges it runs along, in order from
/// one boundary endpoint to the other.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Arc {
    pub id: ArcId,
    pub label: String,
    pub half_edges: Vec<usize>,
}

/// An unordered split of the puncture labels into two nonempty parts,
/// stored as bitmasks (bit `p` for label `p`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bipartition {
    /// The part holding puncture 1.
    first: u64,
    second: u64,
}

impl Bipartition {
    /// Builds the bipartition `{side, complement}` of `1..=n`. Returns
    /// `None` if either part would be empty.
    pub fn from_side(side: u64, n: usize) -> Option<Self> {
        let all = full_mask(n);
        let side = side & all;
        let other = all & !side;
        if side == 0 || other == 0 {
            return None;
        }
        let (first, second) = if side & 0b10 != 0 { (side, other) } else { (other, side) };
        Some(Bipartition { first, second })
    }

    pub fn sides(&self) -> (u64, u64) {
        (self.first, self.second)
    }

    /// The smaller part when it is a single puncture (the smaller label
    /// when both are).
    pub fn singleton(&self) -> Option<Puncture> {
        [self.first, self.second].into_iter().filter(|s| s.count_ones() == 1).map(|s| s.trailing_zeros()).min()
    }

    /// Part not containing puncture `p`.
    pub fn side_without(&self, p: Puncture) -> u64 {
        if self.first >> p & 1 == 1 {
            self.second
        } else {
            self.first
        }
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let part =
            |mask: u64| (1..64).filter(|p| mask >> p & 1 == 1).map(|p| p.to_string()).collect::<Vec<_>>().join(",");
        write!(f, "{{{}}}|{{{}}}", part(self.first), part(self.second))
    }
}

pub(crate) fn full_mask(n: usize) -> u64 {
    ((1u64 << n) - 1) << 1
}

/// A system of arcs on `D_n` backed by an arrangement map. The map is
/// checked structurally on construction; watermelon validity is reported by
/// [`validate_watermelon`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Watermelon {
    spec: SurfaceSpec,
    map: ArrangementMap,
    arcs: Vec<Arc>,
}

impl Watermelon {
    /// Wraps a map. Arcs without an entry in `labels` are labelled by id.
    pub fn from_map(map: ArrangementMap, labels: &BTreeMap<ArcId, String>) -> Result<Self, WatermelonError> {
        let spec = SurfaceSpec::new(map.n())?;
        validate_map(&map)?;
        let arcs = map
            .arc_ids()
            .into_iter()
            .map(|id| Arc {
                id,
                label: labels.get(&id).cloned().unwrap_or_else(|| id.to_string()),
                half_edges: map.arc_path(id).expect("validated map has simple arcs"),
            })
            .collect();
        Ok(Watermelon { spec, map, arcs })
    }

    /// The watermelon with no arcs.
    pub fn empty(n: usize) -> Result<Self, WatermelonError> {
        let spec = SurfaceSpec::new(n)?;
        Self::from_map(empty_map(spec), &BTreeMap::new())
    }

    pub fn n(&self) -> usize {
        self.spec.n()
    }

    pub fn spec(&self) -> SurfaceSpec {
        self.spec
    }

    pub fn map(&self) -> &ArrangementMap {
        &self.map
    }

    /// Arcs sorted by id.
    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn len(&self) -> usize {
        self.arcs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn arc(&self, id: ArcId) -> Result<&Arc, WatermelonError> {
        self.arcs
            .binary_search_by_key(&id, |a| a.id)
            .map(|i| &self.arcs[i])
            .map_err(|_| WatermelonError::UnknownArc(id))
    }

    pub fn labels(&self) -> BTreeMap<ArcId, String> {
        self.arcs.iter().map(|a| (a.id, a.label.clone())).collect()
    }

    fn next_arc_id(&self) -> ArcId {
        ArcId(self.arcs.last().map_or(0, |a| a.id.0 + 1))
    }

    /// Puncture mask of one side of `arc` (the side away from the boundary
    /// root's face).
    pub(crate) fn side_punctures(&self, arc: ArcId) -> u64 {
        self.map.side_mask(arc).expect("arc of a validated map").true_side_punctures(&self.map)
    }

    /// For every arc, the arcs it crosses (with multiplicity) in order along
    /// its traced path.
    pub fn crossing_sequence(&self, arc: ArcId) -> Result<Vec<ArcId>, WatermelonError> {
        let a = self.arc(arc)?;
        Ok(a.half_edges[1..]
            .iter()
            .map(|&h| self.map.arc_id(self.map.ccw(h)).expect("crossing arm is an arc"))
            .collect())
    }

    /// Number of crossings between every pair of arcs that meet.
    pub fn crossing_counts(&self) -> BTreeMap<(ArcId, ArcId), usize> {
        let mut counts = BTreeMap::new();
        for a in &self.arcs {
            for other in self.crossing_sequence(a.id).expect("own arc") {
                if a.id < other {
                    *counts.entry((a.id, other)).or_insert(0) += 1;
                }
            }
        }
        counts
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    InessentialArc,
    ExcessCrossing,
    HalfBigon,
    IsotopicPair,
    MapDefect,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Rule::InessentialArc => "inessential-arc",
            Rule::ExcessCrossing => "excess-crossing",
            Rule::HalfBigon => "half-bigon",
            Rule::IsotopicPair => "isotopic-pair",
            Rule::MapDefect => "map-defect",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub rule: Rule,
    pub arcs: Vec<ArcId>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the watermelon rules and reports every violation found.
pub fn validate_watermelon(w: &Watermelon) -> ValidationReport {
    let mut violations = Vec::new();
    if let Err(e) = validate_map(&w.map) {
        violations.push(Violation { rule: Rule::MapDefect, arcs: vec![], detail: Some(e.to_string()) });
        return ValidationReport { violations };
    }
    let n = w.n();
    let all = full_mask(n);
    let sides: BTreeMap<ArcId, u64> = w.arcs.iter().map(|a| (a.id, w.side_punctures(a.id))).collect();
    for (&id, &side) in &sides {
        if Bipartition::from_side(side, n).is_none() {
            violations.push(Violation { rule: Rule::InessentialArc, arcs: vec![id], detail: None });
        }
    }
    let counts = w.crossing_counts();
    let ids: Vec<ArcId> = sides.keys().copied().collect();
    for (i, &a) in ids.iter().enumerate() {
        for &b in &ids[i + 1..] {
            let (sa, sb) = (sides[&a], sides[&b]);
            match counts.get(&(a, b)).copied().unwrap_or(0) {
                0 => {
                    if sa == sb || sa == all & !sb {
                        violations.push(Violation { rule: Rule::IsotopicPair, arcs: vec![a, b], detail: None });
                    }
                }
                1 => {
                    let regions = [sa & sb, sa & !sb & all, !sa & sb & all, !sa & !sb & all];
                    if regions.contains(&0) {
                        violations.push(Violation { rule: Rule::HalfBigon, arcs: vec![a, b], detail: None });
                    }
                }
                k => violations.push(Violation {
                    rule: Rule::ExcessCrossing,
                    arcs: vec![a, b],
                    detail: Some(format!("{k} crossings")),
                }),
            }
        }
    }
    ValidationReport { violations }
}

/// The bipartition of punctures cut out by `arc`.
pub fn par(w: &Watermelon, arc: ArcId) -> Result<Bipartition, WatermelonError> {
    w.arc(arc)?;
    Bipartition::from_side(w.side_punctures(arc), w.n()).ok_or(WatermelonError::Map(MapError::Topology(
        diskmap::TopologyViolation::InconsistentSides { arc, face: w.map.puncture_face(1) },
    )))
}

/// Arcs with a single puncture on one side, with that puncture. For `n = 2`
/// the smaller label is reported.
pub fn short_arcs(w: &Watermelon) -> Vec<(ArcId, Puncture)> {
    w.arcs
        .iter()
        .filter_map(|a| {
            let b = Bipartition::from_side(w.side_punctures(a.id), w.n())?;
            b.singleton().map(|p| (a.id, p))
        })
        .collect()
}

/// Largest possible number of arcs in a watermelon on `D_n`.
pub fn max_arc_count(n: usize) -> usize {
    n * (n - 1) / 2
}

pub fn is_maximal(w: &Watermelon) -> bool {
    w.len() == max_arc_count(w.n()) && validate_watermelon(w).is_valid()
}

/// The watermelon with `arc` deleted.
pub fn remove_arc(w: &Watermelon, arc: ArcId) -> Result<Watermelon, WatermelonError> {
    w.arc(arc)?;
    let map = diskmap::edit::remove_arc(&w.map, arc);
    Watermelon::from_map(map, &w.labels())
}
