//! Z₂-homology tables of maximal complete 1-systems of loops.
//!
//! Cutting the punctured projective plane along the mark γ₀ turns the other
//! loops into the arcs of a watermelon, and the class of the loop through an
//! arc is `g₀` plus the sum of `gᵢ` over the punctures on one side of the arc.
//! With the relation `g₁ + ⋯ + gₙ = 0` each class has two coefficient
//! vectors, told apart by `εₙ`. Half twists act on tables by swapping rows
//! among `g₁..gₙ`, puncture slides by adding row `g₀` to a row `gᵢ`; the
//! difference δ₂ between two loops is unchanged by both.

mod orbit;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diskmap::ArcId;
use crate::watermelon::{Watermelon, WatermelonError};

pub use orbit::{
    apply_transform, certify_inequivalent, certify_tables, tables_orbit_equivalent, InequivalenceCertificate,
    OrbitSearch, OrbitWitness,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error(transparent)]
    Watermelon(#[from] WatermelonError),
    #[error("puncture counts differ: {0} vs {1}")]
    NMismatch(usize, usize),
    #[error("tables have different shapes")]
    ShapeMismatch,
    #[error("column {index} out of range for a table with {len} columns")]
    BadColumn { index: usize, len: usize },
    #[error("row operation {op} out of range for n = {n}")]
    BadRowOp { op: RowOp, n: usize },
    #[error("malformed coefficient string {0:?}")]
    BadBits(String),
    #[error("orbit search over n = {0} needs an explicit override")]
    SearchTooLarge(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// `εₙ = 0`.
    Canonical,
    /// `εₙ = 1`.
    AntiCanonical,
}

/// Coefficients `(ε₀, …, εₙ)`; bit `i` holds `εᵢ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomologyVector {
    n: usize,
    bits: u64,
}

impl HomologyVector {
    pub fn new(n: usize, bits: u64) -> Self {
        debug_assert!(n < 63);
        HomologyVector { n, bits: bits & ((1u64 << (n + 1)) - 1) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn coefficient(&self, i: usize) -> bool {
        self.bits >> i & 1 == 1
    }

    pub fn mode(&self) -> Mode {
        if self.coefficient(self.n) {
            Mode::AntiCanonical
        } else {
            Mode::Canonical
        }
    }

    /// The other representative: `ε₁..εₙ` flipped.
    pub fn flipped(&self) -> Self {
        HomologyVector { n: self.n, bits: self.bits ^ puncture_rows(self.n) }
    }

    pub fn in_mode(&self, mode: Mode) -> Self {
        if self.mode() == mode {
            *self
        } else {
            self.flipped()
        }
    }

    /// Rows `g₀..gₙ` as a string of `0`/`1`.
    pub fn to_bit_string(&self) -> String {
        (0..=self.n).map(|i| if self.coefficient(i) { '1' } else { '0' }).collect()
    }

    pub fn from_bit_string(s: &str) -> Result<Self, HomologyError> {
        if s.len() < 3 || s.len() > 63 || !s.bytes().all(|b| b == b'0' || b == b'1') {
            return Err(HomologyError::BadBits(s.to_string()));
        }
        let bits = s.bytes().enumerate().filter(|&(_, b)| b == b'1').fold(0, |acc, (i, _)| acc | 1 << i);
        Ok(HomologyVector::new(s.len() - 1, bits))
    }

    /// Row order `g₀..gₙ` read as a binary number, `g₀` most significant.
    pub(crate) fn lex_key(&self) -> u64 {
        (0..=self.n).fold(0, |acc, i| acc << 1 | (self.bits >> i & 1))
    }

    /// The representative of `{v, flip v}` that comes first in row order.
    pub fn orbit_representative(&self) -> Self {
        let f = self.flipped();
        if f.lex_key() < self.lex_key() {
            f
        } else {
            *self
        }
    }
}

impl fmt::Display for HomologyVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// Bits `1..=n`.
pub(crate) fn puncture_rows(n: usize) -> u64 {
    ((1u64 << n) - 1) << 1
}

/// Class of the mark γ₀: `(1, 0, …, 0)`.
pub fn mark_vector(n: usize) -> HomologyVector {
    HomologyVector::new(n, 1)
}

pub fn homology_vector(w: &Watermelon, arc: ArcId, mode: Mode) -> Result<HomologyVector, HomologyError> {
    w.arc(arc)?;
    let v = HomologyVector::new(w.n(), 1 | w.side_punctures(arc));
    Ok(v.in_mode(mode))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Column {
    pub label: String,
    pub vector: HomologyVector,
}

/// Column 0 is the mark; the rest follow arc ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomologyTable {
    n: usize,
    columns: Vec<Column>,
}

impl HomologyTable {
    pub fn new(n: usize, columns: Vec<Column>) -> Result<Self, HomologyError> {
        if let Some(c) = columns.iter().find(|c| c.vector.n() != n) {
            return Err(HomologyError::NMismatch(n, c.vector.n()));
        }
        Ok(HomologyTable { n, columns })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn vectors(&self) -> impl Iterator<Item = HomologyVector> + '_ {
        self.columns.iter().map(|c| c.vector)
    }

    fn column(&self, index: usize) -> Result<&Column, HomologyError> {
        self.columns.get(index).ok_or(HomologyError::BadColumn { index, len: self.columns.len() })
    }

    /// CSV in the row-per-generator layout: a header of column labels, then
    /// rows `g0..gn`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("row");
        for c in &self.columns {
            out.push(',');
            out.push_str(&c.label);
        }
        out.push('\n');
        for i in 0..=self.n {
            out.push_str(&format!("g{i}"));
            for c in &self.columns {
                out.push_str(if c.vector.coefficient(i) { ",1" } else { ",0" });
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct ColumnJson {
    label: String,
    bits: String,
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    n: usize,
    columns: Vec<ColumnJson>,
}

impl Serialize for HomologyTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TableJson {
            n: self.n,
            columns: self
                .columns
                .iter()
                .map(|c| ColumnJson { label: c.label.clone(), bits: c.vector.to_bit_string() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for HomologyTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = TableJson::deserialize(d)?;
        let columns = raw
            .columns
            .into_iter()
            .map(|c| {
                let vector = HomologyVector::from_bit_string(&c.bits).map_err(serde::de::Error::custom)?;
                Ok(Column { label: c.label, vector })
            })
            .collect::<Result<Vec<_>, D::Error>>()?;
        HomologyTable::new(raw.n, columns).map_err(serde::de::Error::custom)
    }
}

/// Table column label for an arc: `alpha…` becomes `gamma…`.
fn loop_label(arc_label: &str) -> String {
    match arc_label.strip_prefix("alpha") {
        Some(rest) => format!("gamma{rest}"),
        None => format!("gamma({arc_label})"),
    }
}

pub fn homology_table(w: &Watermelon) -> HomologyTable {
    let mut columns = vec![Column { label: "gamma_0".to_string(), vector: mark_vector(w.n()) }];
    for a in w.arcs() {
        let vector = homology_vector(w, a.id, Mode::Canonical).expect("own arc");
        columns.push(Column { label: loop_label(&a.label), vector });
    }
    HomologyTable { n: w.n(), columns }
}

/// `min(δ'₂, n − δ'₂)` where δ'₂ counts differing coefficients among
/// `ε₁..εₙ`.
pub fn delta2(u: &HomologyVector, v: &HomologyVector) -> Result<usize, HomologyError> {
    if u.n != v.n {
        return Err(HomologyError::NMismatch(u.n, v.n));
    }
    let d = ((u.bits ^ v.bits) & puncture_rows(u.n)).count_ones() as usize;
    Ok(d.min(u.n - d))
}

/// Columns at δ₂-distance exactly 1 from column `col`.
pub fn relative_short_set(t: &HomologyTable, col: usize) -> Result<Vec<usize>, HomologyError> {
    let v = t.column(col)?.vector;
    Ok((0..t.len()).filter(|&k| k != col && delta2(&v, &t.columns[k].vector).expect("one table") == 1).collect())
}

/// Multiset of `#S(γ)` over all columns, as value → multiplicity.
pub fn s_profile(t: &HomologyTable) -> BTreeMap<usize, usize> {
    let mut profile = BTreeMap::new();
    for col in 0..t.len() {
        *profile.entry(relative_short_set(t, col).expect("in range").len()).or_insert(0) += 1;
    }
    profile
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowOp {
    /// Exchange rows `gᵢ` and `gⱼ` (a half twist), `1 ≤ i < j ≤ n`.
    Swap(usize, usize),
    /// Add row `g₀` to row `gᵢ` (a puncture slide), `1 ≤ i ≤ n`.
    Slide(usize),
}

impl fmt::Display for RowOp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RowOp::Swap(i, j) => write!(f, "swap({i},{j})"),
            RowOp::Slide(i) => write!(f, "slide({i})"),
        }
    }
}

impl RowOp {
    fn check(&self, n: usize) -> Result<(), HomologyError> {
        let ok = match *self {
            RowOp::Swap(i, j) => 1 <= i && i < j && j <= n,
            RowOp::Slide(i) => 1 <= i && i <= n,
        };
        if ok {
            Ok(())
        } else {
            Err(HomologyError::BadRowOp { op: *self, n })
        }
    }

    fn apply(&self, v: HomologyVector) -> HomologyVector {
        let b = v.bits;
        let bits = match *self {
            RowOp::Swap(i, j) => {
                let differ = (b >> i ^ b >> j) & 1;
                b ^ (differ << i | differ << j)
            }
            RowOp::Slide(i) => b ^ ((b & 1) << i),
        };
        HomologyVector { n: v.n, bits }
    }
}

/// Applies `op` to every column and renormalizes each to canonical mode.
pub fn apply_row_op(t: &HomologyTable, op: RowOp) -> Result<HomologyTable, HomologyError> {
    op.check(t.n)?;
    let columns = t
        .columns
        .iter()
        .map(|c| Column { label: c.label.clone(), vector: op.apply(c.vector).in_mode(Mode::Canonical) })
        .collect();
    Ok(HomologyTable { n: t.n, columns })
}
