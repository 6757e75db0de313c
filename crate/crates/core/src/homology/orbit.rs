//! Exhaustive search of the row-operation group and inequivalence
//! certificates.
//!
//! Every composition of half twists and puncture slides acts on rows as a
//! permutation of `g₁..gₙ` followed by adding `g₀` to a subset of rows, so
//! the group is searched as `n! · 2ⁿ` pairs. Columns are compared as a
//! multiset after reducing each to its representative modulo the relation.

use std::collections::BTreeMap;

use itertools::Itertools;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{
    apply_row_op, homology_table, s_profile, Column, HomologyError, HomologyTable, HomologyVector, Mode, RowOp,
};
use crate::watermelon::Watermelon;

/// Largest `n` searched without an explicit override.
const DEFAULT_SEARCH_LIMIT: usize = 7;

/// A row transform carrying one table onto another: first rows are
/// permuted (new row `gᵢ` is old row `g_{permutation[i-1]}`), then row `g₀`
/// is added to each row in `slides`. Column `k` of the first table then
/// matches column `column_map[k]` of the second.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitWitness {
    pub permutation: Vec<usize>,
    pub slides: Vec<usize>,
    pub column_map: Vec<usize>,
}

impl OrbitWitness {
    /// The transform as a sequence of swaps then slides.
    pub fn row_ops(&self) -> Vec<RowOp> {
        let n = self.permutation.len();
        // cur[i] is the original row now at position i
        let mut cur: Vec<usize> = (0..=n).collect();
        let mut ops = Vec::new();
        for i in 1..=n {
            let j = cur.iter().position(|&r| r == self.permutation[i - 1]).expect("permutation of rows");
            if j != i {
                ops.push(RowOp::Swap(i, j));
                cur.swap(i, j);
            }
        }
        ops.extend(self.slides.iter().map(|&i| RowOp::Slide(i)));
        ops
    }

    /// Replays the transform with [`apply_row_op`] and checks every column
    /// lands on its partner.
    pub fn verify(&self, t1: &HomologyTable, t2: &HomologyTable) -> bool {
        if t1.len() != t2.len() || self.column_map.len() != t1.len() {
            return false;
        }
        let Ok(moved) = self.row_ops().into_iter().try_fold(t1.clone(), |t, op| apply_row_op(&t, op)) else {
            return false;
        };
        let mut hit = vec![false; t2.len()];
        for (k, &target) in self.column_map.iter().enumerate() {
            if target >= t2.len() || std::mem::replace(&mut hit[target], true) {
                return false;
            }
            let a = moved.columns[k].vector.orbit_representative();
            if a != t2.columns[target].vector.orbit_representative() {
                return false;
            }
        }
        true
    }
}

/// Applies a permutation-then-slides transform to every column, leaving
/// columns in canonical mode.
pub fn apply_transform(t: &HomologyTable, permutation: &[usize], slides: &[usize]) -> HomologyTable {
    let mask = slides.iter().fold(0u64, |m, &i| m | 1 << i);
    let columns = t
        .columns
        .iter()
        .map(|c| Column {
            label: c.label.clone(),
            vector: transform(c.vector, permutation, mask).in_mode(Mode::Canonical),
        })
        .collect();
    HomologyTable { n: t.n, columns }
}

fn transform(v: HomologyVector, permutation: &[usize], slide_mask: u64) -> HomologyVector {
    let mut bits = v.bits & 1;
    for (i, &src) in permutation.iter().enumerate() {
        bits |= (v.bits >> src & 1) << (i + 1);
    }
    if bits & 1 == 1 {
        bits ^= slide_mask;
    }
    HomologyVector { n: v.n, bits }
}

/// Outcome of an orbit search: the witness for the lexicographically least
/// permutation that has one, and how many transforms were examined up to
/// and including it (all `n! · 2ⁿ` when there is none).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrbitSearch {
    pub witness: Option<OrbitWitness>,
    pub transforms_tried: u64,
}

fn sorted_keys(vectors: impl Iterator<Item = HomologyVector>) -> Vec<(u64, usize)> {
    let mut keys: Vec<(u64, usize)> = vectors.map(|v| v.orbit_representative().lex_key()).zip(0..).collect();
    keys.sort_unstable();
    keys
}

/// Searches all row permutations and slide subsets for a transform taking
/// the columns of `t1` onto those of `t2`. Searching `n ≥ 8` requires
/// `allow_large`.
pub fn tables_orbit_equivalent(
    t1: &HomologyTable,
    t2: &HomologyTable,
    allow_large: bool,
) -> Result<OrbitSearch, HomologyError> {
    if t1.n != t2.n {
        return Err(HomologyError::NMismatch(t1.n, t2.n));
    }
    if t1.len() != t2.len() {
        return Err(HomologyError::ShapeMismatch);
    }
    let n = t1.n;
    if n > DEFAULT_SEARCH_LIMIT && !allow_large {
        return Err(HomologyError::SearchTooLarge(n));
    }
    let target = sorted_keys(t2.vectors());
    let target_keys: Vec<u64> = target.iter().map(|k| k.0).collect();
    let subsets = 1u64 << n;
    let permutations: Vec<Vec<usize>> = (1..=n).permutations(n).collect();
    let found = permutations.par_iter().enumerate().find_map_first(|(rank, perm)| {
        let permuted: Vec<HomologyVector> = t1.vectors().map(|v| transform(v, perm, 0)).collect();
        let mut keys: Vec<(u64, usize)> = Vec::with_capacity(permuted.len());
        for s in 0..subsets {
            let mask = s << 1;
            keys.clear();
            keys.extend(permuted.iter().enumerate().map(|(k, v)| {
                let bits = if v.bits & 1 == 1 { v.bits ^ mask } else { v.bits };
                (HomologyVector { n, bits }.orbit_representative().lex_key(), k)
            }));
            keys.sort_unstable();
            if keys.iter().map(|k| k.0).eq(target_keys.iter().copied()) {
                let mut column_map = vec![0; keys.len()];
                for (mine, theirs) in keys.iter().zip(&target) {
                    column_map[mine.1] = theirs.1;
                }
                let slides = (1..=n).filter(|&i| mask >> i & 1 == 1).collect();
                let witness = OrbitWitness { permutation: perm.clone(), slides, column_map };
                return Some((rank as u64 * subsets + s + 1, witness));
            }
        }
        None
    });
    Ok(match found {
        Some((tried, witness)) => OrbitSearch { witness: Some(witness), transforms_tried: tried },
        None => OrbitSearch { witness: None, transforms_tried: permutations.len() as u64 * subsets },
    })
}

/// Evidence that two loop systems are not related by any mapping class.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InequivalenceCertificate {
    pub n: usize,
    pub profile_first: BTreeMap<usize, usize>,
    pub profile_second: BTreeMap<usize, usize>,
    /// A `#S` value occurring in one profile only (when the profiles differ).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub distinguishing_value: Option<usize>,
    /// Transforms examined by an exhaustive orbit search that found nothing.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transforms_tried: Option<u64>,
}

/// Picks the value separating two profiles: the largest value of the second
/// missing from the first, else the largest of the first missing from the
/// second, else the largest value whose multiplicities differ.
fn distinguishing_value(a: &BTreeMap<usize, usize>, b: &BTreeMap<usize, usize>) -> Option<usize> {
    let missing = |from: &BTreeMap<usize, usize>, other: &BTreeMap<usize, usize>| {
        from.keys().rev().find(|k| !other.contains_key(k)).copied()
    };
    missing(b, a)
        .or_else(|| missing(a, b))
        .or_else(|| a.keys().chain(b.keys()).filter(|k| a.get(k) != b.get(k)).max().copied())
}

/// Certificate that the tables are not in one orbit, or `None` when the
/// homology data cannot tell them apart (which proves nothing).
pub fn certify_tables(
    t1: &HomologyTable,
    t2: &HomologyTable,
    allow_large: bool,
) -> Result<Option<InequivalenceCertificate>, HomologyError> {
    if t1.n != t2.n {
        return Err(HomologyError::NMismatch(t1.n, t2.n));
    }
    let (p1, p2) = (s_profile(t1), s_profile(t2));
    let mut cert = InequivalenceCertificate {
        n: t1.n,
        distinguishing_value: None,
        transforms_tried: None,
        profile_first: p1,
        profile_second: p2,
    };
    if cert.profile_first != cert.profile_second {
        cert.distinguishing_value = distinguishing_value(&cert.profile_first, &cert.profile_second);
        return Ok(Some(cert));
    }
    if t1.len() != t2.len() {
        return Err(HomologyError::ShapeMismatch);
    }
    let search = tables_orbit_equivalent(t1, t2, allow_large)?;
    if search.witness.is_some() {
        return Ok(None);
    }
    cert.transforms_tried = Some(search.transforms_tried);
    Ok(Some(cert))
}

pub fn certify_inequivalent(
    w1: &Watermelon,
    w2: &Watermelon,
    allow_large: bool,
) -> Result<Option<InequivalenceCertificate>, HomologyError> {
    if w1.n() != w2.n() {
        return Err(HomologyError::NMismatch(w1.n(), w2.n()));
    }
    certify_tables(&homology_table(w1), &homology_table(w2), allow_large)
}
