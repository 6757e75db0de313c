//! JSON encodings of maps and watermelons.
//!
//! A map is written as its raw permutations plus, per face, the sorted
//! puncture labels it holds; faces are numbered by their smallest half-edge,
//! so the encoding is a function of the permutations alone and round-trips
//! byte for byte.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diskmap::{ArcId, ArrangementMap, EdgeKind, MapError, Puncture};
use crate::watermelon::{Arc, Watermelon, WatermelonError};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Watermelon(#[from] WatermelonError),
    #[error("inconsistent document: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub twin: Vec<usize>,
    pub next: Vec<usize>,
    pub edge_kind: Vec<EdgeKind>,
    pub arc_id: Vec<Option<ArcId>>,
    /// Face index → sorted puncture labels; empty faces are omitted.
    pub faces: BTreeMap<usize, Vec<Puncture>>,
    pub boundary_root: usize,
}

/// Map fields plus `n` and the arc list. Written out rather than
/// flattened: flattening loses the integer face keys.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WatermelonJson {
    pub n: usize,
    pub twin: Vec<usize>,
    pub next: Vec<usize>,
    pub edge_kind: Vec<EdgeKind>,
    pub arc_id: Vec<Option<ArcId>>,
    pub faces: BTreeMap<usize, Vec<Puncture>>,
    pub boundary_root: usize,
    pub arcs: Vec<Arc>,
}

impl WatermelonJson {
    fn split(self) -> (usize, MapJson, Vec<Arc>) {
        let map = MapJson {
            twin: self.twin,
            next: self.next,
            edge_kind: self.edge_kind,
            arc_id: self.arc_id,
            faces: self.faces,
            boundary_root: self.boundary_root,
        };
        (self.n, map, self.arcs)
    }
}

impl From<&ArrangementMap> for MapJson {
    fn from(m: &ArrangementMap) -> Self {
        let faces = m.face_punctures().into_iter().enumerate().filter(|(_, ps)| !ps.is_empty()).collect();
        MapJson {
            twin: m.raw_twin().to_vec(),
            next: m.raw_next().to_vec(),
            edge_kind: m.raw_kind().to_vec(),
            arc_id: m.raw_arc().to_vec(),
            faces,
            boundary_root: m.boundary_root(),
        }
    }
}

impl TryFrom<MapJson> for ArrangementMap {
    type Error = IoError;

    fn try_from(j: MapJson) -> Result<Self, IoError> {
        let n: usize = j.faces.values().map(Vec::len).sum();
        let bare = ArrangementMap::from_parts(
            j.twin.clone(),
            j.next.clone(),
            j.edge_kind.clone(),
            j.arc_id.clone(),
            vec![],
            j.boundary_root,
        )?;
        let reps = bare.face_representatives();
        let mut anchor = vec![usize::MAX; n];
        for (&face, punctures) in &j.faces {
            let &rep = reps.get(face).ok_or_else(|| IoError::Inconsistent(format!("no face {face}")))?;
            for &p in punctures {
                let slot = (p as usize)
                    .checked_sub(1)
                    .and_then(|i| anchor.get_mut(i))
                    .ok_or_else(|| IoError::Inconsistent(format!("puncture label {p} out of 1..={n}")))?;
                if *slot != usize::MAX {
                    return Err(IoError::Inconsistent(format!("puncture {p} listed twice")));
                }
                *slot = rep;
            }
        }
        Ok(ArrangementMap::from_parts(j.twin, j.next, j.edge_kind, j.arc_id, anchor, j.boundary_root)?)
    }
}

impl From<&Watermelon> for WatermelonJson {
    fn from(w: &Watermelon) -> Self {
        let m = MapJson::from(w.map());
        WatermelonJson {
            n: w.n(),
            twin: m.twin,
            next: m.next,
            edge_kind: m.edge_kind,
            arc_id: m.arc_id,
            faces: m.faces,
            boundary_root: m.boundary_root,
            arcs: w.arcs().to_vec(),
        }
    }
}

impl TryFrom<WatermelonJson> for Watermelon {
    type Error = IoError;

    fn try_from(j: WatermelonJson) -> Result<Self, IoError> {
        let (n, map, arcs) = j.split();
        let map = ArrangementMap::try_from(map)?;
        if map.n() != n {
            return Err(IoError::Inconsistent(format!("n = {n} but the faces hold {} punctures", map.n())));
        }
        let labels = arcs.iter().map(|a| (a.id, a.label.clone())).collect();
        let w = Watermelon::from_map(map, &labels)?;
        if w.arcs().len() != arcs.len() {
            return Err(IoError::Inconsistent("arc list does not match the map".into()));
        }
        for listed in &arcs {
            let actual = w.arc(listed.id)?;
            if actual.half_edges != listed.half_edges {
                return Err(IoError::Inconsistent(format!("half-edges of arc {} do not match the map", listed.id)));
            }
        }
        Ok(w)
    }
}

pub fn map_to_json(m: &ArrangementMap) -> String {
    serde_json::to_string_pretty(&MapJson::from(m)).expect("maps serialize")
}

pub fn map_from_json(text: &str) -> Result<ArrangementMap, IoError> {
    ArrangementMap::try_from(serde_json::from_str::<MapJson>(text)?)
}

pub fn watermelon_to_json(w: &Watermelon) -> String {
    serde_json::to_string_pretty(&WatermelonJson::from(w)).expect("watermelons serialize")
}

pub fn watermelon_from_json(text: &str) -> Result<Watermelon, IoError> {
    Watermelon::try_from(serde_json::from_str::<WatermelonJson>(text)?)
}
