//! Direct constructions over `Z_w x {0, ..., k-1}` by developing base blocks.
//!
//! Class `i` is generated by the base block `{(j*i mod w, j) : j < k}`; adding
//! `t` to every first coordinate for `t = 0..w` gives its `w` blocks. Each
//! block of class `l` is hosted by its point in group `l`.
//!
//! Between groups `c` and `c + d` the blocks realise the differences
//! `0, d, 2d, ..., (k-1)d mod w`, one per class. No pair repeats exactly
//! when those are distinct for every gap `d < k`, which happens exactly when
//! `w` has no factorization `s * t` with `2 <= s, t <= k-1`.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::design::{Block, ParallelClass, Point, Schedule};

/// A point of `Z_w x {0..k}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct CyclicPoint {
    pub residue: u32,
    pub group: u32,
}

impl CyclicPoint {
    pub fn new(residue: u32, group: u32) -> Self {
        CyclicPoint { residue, group }
    }

    /// Canonical index `group * w + residue`.
    pub fn index(self, w: usize) -> Point {
        self.group * w as Point + self.residue
    }

    pub fn from_index(p: Point, w: usize) -> Self {
        CyclicPoint {
            residue: p % w as Point,
            group: p / w as Point,
        }
    }
}

/// The base block of slope `i`: `{(j*i mod w, j) : j < k}`.
pub fn base_block(k: usize, w: usize, slope: usize) -> Vec<CyclicPoint> {
    (0..k)
        .map(|j| CyclicPoint::new(((j * slope) % w) as u32, j as u32))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Factorization {
    Holds,
    /// `w = s * t` with `2 <= s, t <= k-1`.
    Fails {
        s: usize,
        t: usize,
    },
}

impl Factorization {
    pub fn holds(self) -> bool {
        matches!(self, Factorization::Holds)
    }
}

/// Looks for `w = s * t` with both factors in `2..=k-1`, smallest `s` first.
pub fn factorization_condition(k: usize, w: usize) -> Factorization {
    (2..k)
        .find(|&s| w.is_multiple_of(s) && (2..k).contains(&(w / s)))
        .map_or(Factorization::Holds, |s| Factorization::Fails { s, t: w / s })
}

/// For each group `c` and gap `d` with `c + d < k`, the differences
/// `j*d mod w` for `j = 0..k`, i.e. the residue offsets between groups `c`
/// and `c + d` over the `k` classes.
pub fn difference_table(k: usize, w: usize) -> BTreeMap<(usize, usize), Vec<usize>> {
    let mut table = BTreeMap::new();
    for c in 0..k.saturating_sub(1) {
        for d in 1..k - c {
            table.insert((c, d), (0..k).map(|j| (j * d) % w).collect());
        }
    }
    table
}

/// `true` iff every row of [`difference_table`] has `k` distinct entries.
pub fn differences_distinct(k: usize, w: usize) -> bool {
    difference_table(k, w).values().all(|row| {
        let mut seen = vec![false; w];
        row.iter().all(|&x| !std::mem::replace(&mut seen[x], true))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CyclicError {
    #[error("need w >= k >= 3, got k = {k}, w = {w}")]
    BadParameters { k: usize, w: usize },
    #[error("w = {w} factors as {s} * {t} with both factors at most k - 1 = {}", .k - 1)]
    Factorizable { k: usize, w: usize, s: usize, t: usize },
}

/// Develops all `k` base blocks mod `w` without checking the pair condition.
/// When the factorization condition fails the result repeats pairs; that is
/// useful as a negative fixture.
pub fn develop(k: usize, w: usize) -> Schedule {
    let classes = (0..k)
        .map(|slope| {
            let base = base_block(k, w, slope);
            let blocks = (0..w as u32)
                .map(|t| {
                    let shifted: Vec<CyclicPoint> = base
                        .iter()
                        .map(|p| CyclicPoint::new((p.residue + t) % w as u32, p.group))
                        .collect();
                    let host = shifted[slope].index(w);
                    Block::new(shifted.iter().map(|p| p.index(w)).collect(), Some(host))
                })
                .collect();
            ParallelClass::new(blocks)
        })
        .collect();
    Schedule::new(k, k * w, classes)
}

/// The cyclic design on `k*w` points; rejected with the witness factorization
/// when the pair condition would fail.
pub fn cyclic_pdp(k: usize, w: usize) -> Result<Schedule, CyclicError> {
    if k < 3 || w < k {
        return Err(CyclicError::BadParameters { k, w });
    }
    match factorization_condition(k, w) {
        Factorization::Holds => Ok(develop(k, w)),
        Factorization::Fails { s, t } => Err(CyclicError::Factorizable { k, w, s, t }),
    }
}
