//! The construction-independent checker for the three design axioms, plus the
//! counting necessary conditions on `(k, v)`.

use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::design::{BlockRef, MalformedSchedule, Point, Schedule};

/// A single axiom failure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Axiom 1: the schedule does not have exactly `k` classes.
    ClassCount { expected: usize, found: usize },
    /// Axiom 1: `v` is not divisible by `k`, so no class can partition the points.
    Indivisible { k: usize, v: usize },
    /// Axiom 1: a class misses some points or covers some twice.
    NotPartition {
        class: usize,
        missing: Vec<Point>,
        repeated: Vec<Point>,
    },
    /// Axiom 2: `pair` lies in both blocks.
    RepeatedPair {
        pair: (Point, Point),
        first: BlockRef,
        second: BlockRef,
    },
    /// Axiom 3: a block has no host.
    MissingHost { block: BlockRef },
    /// Axiom 3: a block is hosted by a point that does not attend it.
    HostOutsideBlock { block: BlockRef, host: Point },
    /// Axiom 3: `point` hosts `count` times instead of once.
    HostCount { point: Point, count: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ClassCount { expected, found } => {
                write!(f, "expected {expected} parallel classes, found {found}")
            }
            Violation::Indivisible { k, v } => write!(f, "k = {k} does not divide v = {v}"),
            Violation::NotPartition {
                class,
                missing,
                repeated,
            } => write!(
                f,
                "class {class} is not a partition (missing {missing:?}, repeated {repeated:?})"
            ),
            Violation::RepeatedPair { pair, first, second } => write!(
                f,
                "pair {{{}, {}}} occurs in class {} block {} and class {} block {}",
                pair.0, pair.1, first.class, first.block, second.class, second.block
            ),
            Violation::MissingHost { block } => {
                write!(f, "class {} block {} has no host", block.class, block.block)
            }
            Violation::HostOutsideBlock { block, host } => write!(
                f,
                "class {} block {} is hosted by {host}, who is not seated there",
                block.class, block.block
            ),
            Violation::HostCount { point, count } => {
                write!(f, "point {point} hosts {count} times")
            }
        }
    }
}

/// Outcome of [`verify`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub axiom1_ok: bool,
    pub axiom2_ok: bool,
    pub axiom3_ok: bool,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    pub fn is_valid(&self) -> bool {
        self.axiom1_ok && self.axiom2_ok && self.axiom3_ok && self.violations.is_empty()
    }

    pub fn repeated_pairs(&self) -> impl Iterator<Item = &Violation> {
        self.violations
            .iter()
            .filter(|v| matches!(v, Violation::RepeatedPair { .. }))
    }
}

/// Checks the schedule against the three axioms:
///
/// 1. exactly `k` classes, each partitioning `0..v`;
/// 2. no unordered pair of points in more than one block;
/// 3. hosts form a bijection from blocks onto points, each host inside its block.
///
/// Structural defects (wrong block size, duplicated member, out-of-range point)
/// are returned as `Err` and no axiom is evaluated.
pub fn verify(s: &Schedule) -> Result<VerificationReport, MalformedSchedule> {
    s.check_structure()?;
    let v = s.v;
    let mut violations = Vec::new();

    let mut axiom1_ok = true;
    if s.classes.len() != s.k {
        axiom1_ok = false;
        violations.push(Violation::ClassCount {
            expected: s.k,
            found: s.classes.len(),
        });
    }
    if !v.is_multiple_of(s.k) {
        axiom1_ok = false;
        violations.push(Violation::Indivisible { k: s.k, v });
    }
    let mut seen = vec![0usize; v];
    for (ci, class) in s.classes.iter().enumerate() {
        seen.iter_mut().for_each(|c| *c = 0);
        for b in &class.blocks {
            for &p in &b.members {
                seen[p as usize] += 1;
            }
        }
        let missing: Vec<Point> = (0..v as Point).filter(|&p| seen[p as usize] == 0).collect();
        let repeated: Vec<Point> = (0..v as Point).filter(|&p| seen[p as usize] > 1).collect();
        if !missing.is_empty() || !repeated.is_empty() {
            axiom1_ok = false;
            violations.push(Violation::NotPartition {
                class: ci,
                missing,
                repeated,
            });
        }
    }

    let mut axiom2_ok = true;
    let mut first_seen: Vec<Option<BlockRef>> = vec![None; v * v];
    for (at, b) in s.blocks() {
        for (x, y) in b.pairs() {
            let slot = &mut first_seen[x as usize * v + y as usize];
            match slot {
                None => *slot = Some(at),
                Some(first) => {
                    axiom2_ok = false;
                    violations.push(Violation::RepeatedPair {
                        pair: (x, y),
                        first: *first,
                        second: at,
                    });
                }
            }
        }
    }

    let mut axiom3_ok = true;
    let mut host_count = vec![0usize; v];
    for (at, b) in s.blocks() {
        match b.host {
            Some(h) => {
                host_count[h as usize] += 1;
                if !b.contains(h) {
                    axiom3_ok = false;
                    violations.push(Violation::HostOutsideBlock { block: at, host: h });
                }
            }
            None => {
                axiom3_ok = false;
                violations.push(Violation::MissingHost { block: at });
            }
        }
    }
    for (p, &count) in host_count.iter().enumerate() {
        if count != 1 {
            axiom3_ok = false;
            violations.push(Violation::HostCount {
                point: p as Point,
                count,
            });
        }
    }

    Ok(VerificationReport {
        axiom1_ok,
        axiom2_ok,
        axiom3_ok,
        violations,
    })
}

/// Convenience: `true` iff the schedule is well formed and passes all axioms.
pub fn is_valid(s: &Schedule) -> bool {
    verify(s).map(|r| r.is_valid()).unwrap_or(false)
}

/// Occurrence count of every unordered pair covered by some block.
pub fn pair_multiset(s: &Schedule) -> BTreeMap<(Point, Point), usize> {
    let mut counts = BTreeMap::new();
    for (_, b) in s.blocks() {
        for pair in b.pairs() {
            *counts.entry(pair).or_insert(0) += 1;
        }
    }
    counts
}

/// Result of the necessary-condition check on `(k, v)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Feasibility {
    Feasible,
    Infeasible(String),
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible)
    }
}

/// Necessary conditions for a design with block size `k` on `v` points.
///
/// A point meets `k(k-1)` distinct others, so `v >= k(k-1) + 1`; with `k | v`
/// that becomes `v >= k^2`. This already rules out `(3, 3)` and `(3, 6)`, which
/// the exhaustive search also certifies independently. Passing is not a
/// guarantee that a construction exists.
pub fn feasibility_check(k: usize, v: usize) -> Feasibility {
    if k == 0 || !v.is_multiple_of(k) {
        return Feasibility::Infeasible(format!("k does not divide v ({k} does not divide {v})"));
    }
    if v < k * k {
        return Feasibility::Infeasible(format!("v < k² ({v} < {})", k * k));
    }
    Feasibility::Feasible
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::{Block, ParallelClass};

    fn hosted(lists: &[(&[Point], Point)]) -> ParallelClass {
        ParallelClass::new(
            lists
                .iter()
                .map(|(m, h)| Block::new(m.to_vec(), Some(*h)))
                .collect(),
        )
    }

    #[test]
    fn feasibility_examples() {
        assert_eq!(
            feasibility_check(3, 6),
            Feasibility::Infeasible("v < k² (6 < 9)".into())
        );
        assert_eq!(
            feasibility_check(4, 12),
            Feasibility::Infeasible("v < k² (12 < 16)".into())
        );
        assert_eq!(feasibility_check(3, 9), Feasibility::Feasible);
        assert!(!feasibility_check(3, 3).is_feasible());
        assert!(!feasibility_check(4, 18).is_feasible());
    }

    #[test]
    fn trivial_partition_pairs() {
        let s = Schedule::new(
            3,
            6,
            vec![ParallelClass::from_member_lists([vec![0, 1, 2], vec![3, 4, 5]])],
        );
        let pm = pair_multiset(&s);
        assert_eq!(pm.len(), 6);
        assert!(pm.values().all(|&c| c == 1));
    }

    #[test]
    fn reports_each_axiom_separately() {
        // three classes of the 3x3 grid rows/cols/diagonal on 9 points
        let good = Schedule::new(
            3,
            9,
            vec![
                hosted(&[(&[0, 1, 2], 1), (&[3, 4, 5], 3), (&[6, 7, 8], 6)]),
                hosted(&[(&[0, 3, 6], 0), (&[1, 4, 7], 7), (&[2, 5, 8], 8)]),
                hosted(&[(&[0, 4, 8], 4), (&[1, 5, 6], 5), (&[2, 3, 7], 2)]),
            ],
        );
        let r = verify(&good).unwrap();
        assert!(r.is_valid(), "{:?}", r.violations);

        let mut bad = good.clone();
        bad.classes[2].blocks[0] = Block::new(vec![0, 1, 8], Some(0));
        let r = verify(&bad).unwrap();
        assert!(!r.axiom1_ok && !r.axiom2_ok);
        assert!(r.violations.contains(&Violation::RepeatedPair {
            pair: (0, 1),
            first: BlockRef { class: 0, block: 0 },
            second: BlockRef { class: 2, block: 0 },
        }));

        let mut hostless = good.clone();
        hostless.classes[1].blocks[0].host = None;
        let r = verify(&hostless).unwrap();
        assert!(r.axiom1_ok && r.axiom2_ok && !r.axiom3_ok);
        assert!(r
            .violations
            .contains(&Violation::HostCount { point: 0, count: 0 }));

        let mut short = good;
        short.classes.pop();
        let r = verify(&short).unwrap();
        assert!(!r.axiom1_ok);
    }

    #[test]
    fn malformed_is_not_an_axiom_violation() {
        let s = Schedule::new(
            3,
            6,
            vec![ParallelClass::new(vec![Block {
                members: vec![0, 0, 1],
                host: None,
            }])],
        );
        assert!(matches!(
            verify(&s),
            Err(MalformedSchedule::DuplicateMember { .. })
        ));
        assert!(!is_valid(&s));
    }
}
