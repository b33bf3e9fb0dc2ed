//! The design database: externally supplied ingredients for parameters that
//! no built-in construction reaches (for instance four MOLS of order 12).
//!
//! ```json
//! { "entries": [
//!     { "name": "mols-12", "kind": "mols", "squares": [[[0, 1, ...], ...], ...] },
//!     { "name": "ls6", "kind": "latin+transversals",
//!       "squares": [ ... ], "transversals": [[[0, 0], [1, 3], ...], ...] },
//!     { "name": "z30", "kind": "difference_family",
//!       "family": { "modulus": 30, "base_blocks": [[0, 1, 8, 12, 14]], "step": 5, "class_count": 5 } },
//!     { "name": "gdd", "kind": "gdd", "design": { "group_size": 3, "classes": [ ... ] } },
//!     { "name": "x", "kind": "explicit_pdp", "schedule": { "k": 3, "v": 9, "classes": [ ... ] } }
//! ] }
//! ```
//!
//! Every entry is re-verified when the file is loaded.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::Schedule;
use crate::hosts::assign_hosts;
use crate::latin::{pdp_from_family, pdp_from_transversals, LatinSquare, MolsFamily, Transversal};
use crate::special::{develop_difference_family, DifferenceFamily, GroupDivisibleDesign};
use crate::verify::verify;

#[derive(Debug, Error)]
pub enum DatabaseError {
    #[error("cannot read design database: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot parse design database: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("entry `{name}` failed verification: {reason}")]
    InvalidEntry { name: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum EntryData {
    #[serde(rename = "mols")]
    Mols { squares: MolsFamily },
    #[serde(rename = "latin+transversals")]
    LatinTransversals {
        squares: Vec<LatinSquare>,
        transversals: Vec<Transversal>,
    },
    #[serde(rename = "difference_family")]
    DifferenceFamily { family: DifferenceFamily },
    #[serde(rename = "gdd")]
    Gdd { design: GroupDivisibleDesign },
    #[serde(rename = "explicit_pdp")]
    ExplicitPdp { schedule: Schedule },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatabaseEntry {
    pub name: String,
    #[serde(flatten)]
    pub data: EntryData,
}

impl DatabaseEntry {
    /// A verified design with block size `k` on `v` points, if this entry yields one.
    pub fn construct(&self, k: usize, v: usize) -> Option<Schedule> {
        if k < 3 || !v.is_multiple_of(k) {
            return None;
        }
        let w = v / k;
        let schedule = match &self.data {
            EntryData::Mols { squares } => {
                if squares.order() != w || squares.len() < k - 1 {
                    return None;
                }
                pdp_from_family(k, squares).ok()?
            }
            EntryData::LatinTransversals {
                squares,
                transversals,
            } => {
                if squares.len() != k - 2 || squares[0].order() != w || transversals.len() < k {
                    return None;
                }
                pdp_from_transversals(squares, &transversals[..k]).ok()?
            }
            EntryData::DifferenceFamily { family } => {
                if family.modulus as usize != v
                    || family.class_count != k
                    || family.base_blocks.iter().any(|b| b.len() != k)
                {
                    return None;
                }
                let classes = develop_difference_family(family).ok()?;
                if family.base_hosts.is_some() {
                    Schedule::new(k, v, classes)
                } else {
                    assign_hosts(&classes).ok()?
                }
            }
            EntryData::Gdd { design } => {
                if design.v() != v || design.block_size() != Some(k) || design.classes.len() < k {
                    return None;
                }
                assign_hosts(&design.classes[..k]).ok()?
            }
            EntryData::ExplicitPdp { schedule } => {
                if schedule.k != k || schedule.v != v {
                    return None;
                }
                schedule.clone()
            }
        };
        verify(&schedule).ok()?.is_valid().then_some(schedule)
    }

    fn validate(&self) -> Result<(), String> {
        match &self.data {
            EntryData::Mols { squares } => {
                if squares.is_empty() {
                    return Err("empty MOLS family".into());
                }
            }
            EntryData::LatinTransversals {
                squares,
                transversals,
            } => {
                let k = squares.len() + 2;
                if transversals.len() < k {
                    return Err(format!(
                        "{} squares need at least {k} transversals, got {}",
                        squares.len(),
                        transversals.len()
                    ));
                }
                let s = pdp_from_transversals(squares, &transversals[..k]).map_err(|e| e.to_string())?;
                check_schedule(&s)?;
                // remaining transversals must also be common and disjoint
                for (i, t) in transversals.iter().enumerate() {
                    if !squares.iter().all(|sq| t.is_transversal_of(sq)) {
                        return Err(format!("transversal {i} is not common to all squares"));
                    }
                    if transversals[i + 1..].iter().any(|u| !t.is_disjoint_from(u)) {
                        return Err(format!("transversal {i} overlaps a later one"));
                    }
                }
            }
            EntryData::DifferenceFamily { family } => {
                let classes = develop_difference_family(family).map_err(|e| e.to_string())?;
                let k = family.base_blocks.first().map_or(0, Vec::len);
                let s = match family.base_hosts {
                    Some(_) => Schedule::new(k, family.modulus as usize, classes),
                    None => assign_hosts(&classes).map_err(|e| e.to_string())?,
                };
                check_schedule(&s)?;
            }
            EntryData::Gdd { design } => design.check(false).map_err(|e| e.to_string())?,
            EntryData::ExplicitPdp { schedule } => check_schedule(schedule)?,
        }
        Ok(())
    }
}

fn check_schedule(s: &Schedule) -> Result<(), String> {
    let report = verify(s).map_err(|e| e.to_string())?;
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(v.to_string()),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignDatabase {
    pub entries: Vec<DatabaseEntry>,
}

impl DesignDatabase {
    pub fn from_json(text: &str) -> Result<Self, DatabaseError> {
        let db: DesignDatabase = serde_json::from_str(text)?;
        for e in &db.entries {
            e.validate().map_err(|reason| DatabaseError::InvalidEntry {
                name: e.name.clone(),
                reason,
            })?;
        }
        Ok(db)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, DatabaseError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// First entry, in file order, that yields a verified `(k, v)` design.
    pub fn construct(&self, k: usize, v: usize) -> Option<(&str, Schedule)> {
        self.entries
            .iter()
            .find_map(|e| e.construct(k, v).map(|s| (e.name.as_str(), s)))
    }
}
