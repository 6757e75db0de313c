//! Exhaustive generation of maximal watermelons up to equivalence.
//!
//! The search grows systems one arc at a time, level by level. Each level
//! holds one representative per unlabelled equivalence class; every class
//! one arc larger arises by inserting an arc into some representative, so
//! deduplicating children by class code loses nothing. Representatives
//! that admit no insertion below the maximal size are kept aside: they
//! settle whether saturated implies maximal.

use std::collections::BTreeMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::homology::{
    certify_inequivalent, homology_table, s_profile, tables_orbit_equivalent, HomologyError, InequivalenceCertificate,
    OrbitWitness,
};
use crate::io::{IoError, WatermelonJson};
use crate::watermelon::{
    alt_watermelon, enumerate_insertions, equivalence_code, max_arc_count, short_arcs, standard_watermelon, Watermelon,
    WatermelonError,
};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchLimits {
    pub max_n: usize,
    /// Cap on generated child systems.
    pub node_budget: u64,
    pub time_budget: Duration,
    /// The `n = 5` search is large and runs only when asked for.
    pub allow_n5: bool,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits { max_n: 5, node_budget: 100_000_000, time_budget: Duration::from_secs(2 * 3600), allow_n5: false }
    }
}

/// One equivalence class of maximal watermelons.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassRecord {
    /// Unlabelled, reflections not allowed.
    pub code: String,
    pub representative: Watermelon,
    pub short_arc_count: usize,
    pub s_profile: BTreeMap<usize, usize>,
    /// Sorted column representatives of the homology table; equal for
    /// tables that agree up to column order and mode.
    pub table_digest: String,
}

impl ClassRecord {
    pub fn new(w: Watermelon) -> Self {
        let table = homology_table(&w);
        let mut keys: Vec<String> = table.vectors().map(|v| v.orbit_representative().to_bit_string()).collect();
        keys.sort();
        ClassRecord {
            code: class_code(&w),
            short_arc_count: short_arcs(&w).len(),
            s_profile: s_profile(&table),
            table_digest: keys.join("."),
            representative: w,
        }
    }

    pub fn summary(&self) -> ClassSummary {
        ClassSummary {
            code: self.code.clone(),
            arc_count: self.representative.len(),
            short_arc_count: self.short_arc_count,
            s_profile: self.s_profile.clone(),
            table_digest: self.table_digest.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassSummary {
    pub code: String,
    pub arc_count: usize,
    pub short_arc_count: usize,
    pub s_profile: BTreeMap<usize, usize>,
    pub table_digest: String,
}

pub fn class_code(w: &Watermelon) -> String {
    equivalence_code(w, false, false)
}

/// Search state between levels; serializable so a long run can resume.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub n: usize,
    /// Arc count of the frontier systems.
    pub level: usize,
    pub frontier: Vec<WatermelonJson>,
    /// Class codes of every system generated so far.
    pub visited: Vec<String>,
    /// Saturated systems below the maximal size met so far.
    pub saturated_non_maximal: Vec<WatermelonJson>,
    pub nodes: u64,
}

impl Checkpoint {
    /// The empty system on `D_n`.
    pub fn start(n: usize) -> Result<Self, EnumerateError> {
        let empty = Watermelon::empty(n)?;
        Ok(Checkpoint {
            n,
            level: 0,
            visited: vec![class_code(&empty)],
            frontier: vec![WatermelonJson::from(&empty)],
            saturated_non_maximal: vec![],
            nodes: 1,
        })
    }
}

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error("n = {n} is outside 2..={max}")]
    OutOfRange { n: usize, max: usize },
    #[error("the n = 5 search must be enabled explicitly")]
    N5NotAllowed,
    #[error("{reason} budget exhausted at level {} after {} nodes", checkpoint.level, checkpoint.nodes)]
    BudgetExhausted { reason: &'static str, checkpoint: Box<Checkpoint> },
    #[error(transparent)]
    Watermelon(#[from] WatermelonError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("bad checkpoint: {0}")]
    Checkpoint(#[from] IoError),
}

#[derive(Debug, Clone)]
pub struct Enumeration {
    pub n: usize,
    /// Classes of maximal watermelons, sorted by code.
    pub classes: Vec<ClassRecord>,
    /// Number of classes at each arc count `0..=max`.
    pub level_sizes: Vec<usize>,
    /// Classes that admit no further arc yet are not maximal.
    pub saturated_non_maximal: Vec<ClassRecord>,
    pub nodes: u64,
}

pub fn enumerate_maximal(n: usize, limits: &SearchLimits) -> Result<Enumeration, EnumerateError> {
    check_n(n, limits)?;
    resume(Checkpoint::start(n)?, limits, &mut |_| {})
}

fn check_n(n: usize, limits: &SearchLimits) -> Result<(), EnumerateError> {
    if n < 2 || n > limits.max_n {
        return Err(EnumerateError::OutOfRange { n, max: limits.max_n });
    }
    if n >= 5 && !limits.allow_n5 {
        return Err(EnumerateError::N5NotAllowed);
    }
    Ok(())
}

/// Continues a search from `checkpoint`, calling `on_level` with the state
/// after every completed level.
pub fn resume(
    checkpoint: Checkpoint,
    limits: &SearchLimits,
    on_level: &mut dyn FnMut(&Checkpoint),
) -> Result<Enumeration, EnumerateError> {
    let n = checkpoint.n;
    check_n(n, limits)?;
    let started = Instant::now();
    let target = max_arc_count(n);
    let parse = |list: &[WatermelonJson]| -> Result<Vec<Watermelon>, EnumerateError> {
        Ok(list.iter().cloned().map(Watermelon::try_from).collect::<Result<_, IoError>>()?)
    };
    let mut frontier = parse(&checkpoint.frontier)?;
    let mut saturated = parse(&checkpoint.saturated_non_maximal)?;
    let mut visited: std::collections::BTreeSet<String> = checkpoint.visited.iter().cloned().collect();
    let mut level = checkpoint.level;
    let mut level_sizes = vec![0; level];
    level_sizes.push(frontier.len());
    let nodes = AtomicU64::new(checkpoint.nodes);

    let snapshot = |level: usize,
                    frontier: &[Watermelon],
                    visited: &std::collections::BTreeSet<String>,
                    saturated: &[Watermelon],
                    nodes: u64| {
        Checkpoint {
            n,
            level,
            frontier: frontier.iter().map(WatermelonJson::from).collect(),
            visited: visited.iter().cloned().collect(),
            saturated_non_maximal: saturated.iter().map(WatermelonJson::from).collect(),
            nodes,
        }
    };

    while level < target {
        let over_time = || started.elapsed() > limits.time_budget;
        let over_nodes = || nodes.load(Ordering::Relaxed) > limits.node_budget;
        // children of every representative, in frontier order
        let grown: Vec<Option<Vec<(String, Watermelon)>>> = frontier
            .par_iter()
            .map(|w| {
                if over_time() || over_nodes() {
                    return None;
                }
                let children = enumerate_insertions(w);
                nodes.fetch_add(children.len() as u64, Ordering::Relaxed);
                Some(children.into_iter().map(|c| (class_code(&c), c)).collect())
            })
            .collect();
        if grown.iter().any(Option::is_none) || over_nodes() {
            let reason = if over_time() { "time" } else { "node" };
            let checkpoint = snapshot(level, &frontier, &visited, &saturated, nodes.load(Ordering::Relaxed));
            return Err(EnumerateError::BudgetExhausted { reason, checkpoint: Box::new(checkpoint) });
        }
        let mut next: BTreeMap<String, Watermelon> = BTreeMap::new();
        for (parent, children) in frontier.iter().zip(grown) {
            let children = children.expect("checked above");
            if children.is_empty() {
                saturated.push(parent.clone());
            }
            for (code, child) in children {
                next.entry(code).or_insert(child);
            }
        }
        visited.extend(next.keys().cloned());
        frontier = next.into_values().collect();
        level += 1;
        level_sizes.push(frontier.len());
        on_level(&snapshot(level, &frontier, &visited, &saturated, nodes.load(Ordering::Relaxed)));
    }

    let mut classes: Vec<ClassRecord> = frontier.into_iter().map(ClassRecord::new).collect();
    classes.sort_by(|a, b| a.code.cmp(&b.code));
    let mut saturated_non_maximal: Vec<ClassRecord> = saturated.into_iter().map(ClassRecord::new).collect();
    saturated_non_maximal.sort_by(|a, b| a.code.cmp(&b.code));
    Ok(Enumeration { n, classes, level_sizes, saturated_non_maximal, nodes: nodes.into_inner() })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub first: usize,
    pub second: usize,
    pub profiles_equal: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<OrbitWitness>,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportMethod {
    /// Every pair of enumerated classes is homology-indistinguishable.
    Enumeration,
    /// The standard and alternative systems are certified inequivalent.
    Certificate,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub n: usize,
    pub method: ReportMethod,
    pub classes: Vec<ClassSummary>,
    pub pairs: Vec<PairVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<InequivalenceCertificate>,
    pub saturated_non_maximal: usize,
    pub pass: bool,
    pub note: String,
}

/// For `n ≤ 5` enumerates the maximal classes and checks every pair has the
/// same S-profile and table orbit; for `n ≥ 6` certifies the standard and
/// alternative systems inequivalent.
pub fn uniqueness_report(n: usize, limits: &SearchLimits) -> Result<UniquenessReport, EnumerateError> {
    if n >= 6 {
        let cert = certify_inequivalent(&standard_watermelon(n)?, &alt_watermelon(n)?, true)?;
        return Ok(UniquenessReport {
            n,
            method: ReportMethod::Certificate,
            classes: vec![],
            pairs: vec![],
            pass: cert.is_some(),
            certificate: cert,
            saturated_non_maximal: 0,
            note: "complete proof of non-uniqueness: the homology invariants separate the two systems".into(),
        });
    }
    let e = enumerate_maximal(n, limits)?;
    let tables: Vec<_> = e.classes.iter().map(|c| homology_table(&c.representative)).collect();
    let mut pairs = Vec::new();
    for i in 0..tables.len() {
        for j in i + 1..tables.len() {
            let profiles_equal = e.classes[i].s_profile == e.classes[j].s_profile;
            let witness =
                if profiles_equal { tables_orbit_equivalent(&tables[i], &tables[j], false)?.witness } else { None };
            let pass = witness.as_ref().is_some_and(|w| w.verify(&tables[i], &tables[j]));
            pairs.push(PairVerdict { first: i, second: j, profiles_equal, witness, pass });
        }
    }
    Ok(UniquenessReport {
        n,
        method: ReportMethod::Enumeration,
        pass: pairs.iter().all(|p| p.pass),
        classes: e.classes.iter().map(ClassRecord::summary).collect(),
        pairs,
        certificate: None,
        saturated_non_maximal: e.saturated_non_maximal.len(),
        note: "necessary-condition check: all maximal classes share one homology-table orbit".into(),
    })
}
