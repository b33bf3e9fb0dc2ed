//! Explicit designs for the parameters the general constructions miss.
//!
//! * `(5, 30)`: the base block `{0, 1, 8, 12, 14}` developed mod 30.
//! * `(4, 24)`: four classes of an embedded resolvable 4-GDD of type 3^8.
//! * `(3, 12)`: the classic 12-couple schedule, kept verbatim as a fixture.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::{Block, ParallelClass, Point, Schedule};
use crate::hosts::{assign_hosts, MatchingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecialError {
    #[error("development of the difference family does not partition Z_{modulus} in class {class}")]
    NotPartition { modulus: u32, class: usize },
    #[error("difference family is inconsistent: {0}")]
    BadFamily(String),
    #[error("group divisible design check failed: {0}")]
    BadGdd(String),
    #[error("embedded data is corrupt: {0}")]
    CorruptEmbedded(String),
    #[error(transparent)]
    Hosts(#[from] MatchingError),
}

/// Base blocks in `Z_m` together with a rule for cutting the development into
/// parallel classes.
///
/// Class `i` (for `i < class_count`) is
/// `{ B + i*class_shift + step*j : B in base_blocks, j < m/step }`.
/// When `base_hosts` is given, the translate `B + t` of base block `B` is
/// hosted by `base_hosts[B] + t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DifferenceFamily {
    pub modulus: u32,
    pub base_blocks: Vec<Vec<u32>>,
    pub step: u32,
    pub class_count: usize,
    #[serde(default = "one")]
    pub class_shift: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base_hosts: Option<Vec<u32>>,
}

fn one() -> u32 {
    1
}

impl DifferenceFamily {
    /// All nonzero differences `x - y mod m` over pairs inside one base block.
    pub fn internal_differences(block: &[u32], modulus: u32) -> BTreeSet<u32> {
        let mut out = BTreeSet::new();
        for &x in block {
            for &y in block {
                if x != y {
                    out.insert((x + modulus - y) % modulus);
                }
            }
        }
        out
    }

    /// `true` when no difference is produced twice across all base blocks.
    /// Developing the full orbit then repeats no pair.
    pub fn differences_distinct(&self) -> bool {
        let m = self.modulus;
        let mut seen = vec![false; m as usize];
        self.base_blocks.iter().all(|b| {
            b.iter().all(|&x| {
                b.iter().filter(|&&y| y != x).all(|&y| {
                    let d = ((x + m - y) % m) as usize;
                    !std::mem::replace(&mut seen[d], true)
                })
            })
        })
    }
}

/// Cuts the development of `df` into its parallel classes.
pub fn develop_difference_family(df: &DifferenceFamily) -> Result<Vec<ParallelClass>, SpecialError> {
    let m = df.modulus;
    if m == 0 || df.step == 0 || !m.is_multiple_of(df.step) {
        return Err(SpecialError::BadFamily(format!(
            "step {} must divide modulus {m}",
            df.step
        )));
    }
    if let Some(h) = &df.base_hosts {
        if h.len() != df.base_blocks.len() {
            return Err(SpecialError::BadFamily("one host per base block required".into()));
        }
        if df.base_blocks.iter().zip(h).any(|(b, x)| !b.contains(x)) {
            return Err(SpecialError::BadFamily("base host outside its block".into()));
        }
    }
    if df.base_blocks.iter().flatten().any(|&x| x >= m) {
        return Err(SpecialError::BadFamily(format!(
            "base block element outside Z_{m}"
        )));
    }
    let mut classes = Vec::with_capacity(df.class_count);
    for i in 0..df.class_count {
        let mut covered = vec![false; m as usize];
        let mut blocks = Vec::new();
        for j in 0..m / df.step {
            let t = (i as u32 * df.class_shift + df.step * j) % m;
            for (bi, base) in df.base_blocks.iter().enumerate() {
                let members: Vec<Point> = base.iter().map(|&x| (x + t) % m).collect();
                for &p in &members {
                    if std::mem::replace(&mut covered[p as usize], true) {
                        return Err(SpecialError::NotPartition { modulus: m, class: i });
                    }
                }
                let host = df.base_hosts.as_ref().map(|h| (h[bi] + t) % m);
                blocks.push(Block::new(members, host));
            }
        }
        if covered.iter().any(|&c| !c) {
            return Err(SpecialError::NotPartition { modulus: m, class: i });
        }
        classes.push(ParallelClass::new(blocks));
    }
    Ok(classes)
}

pub fn buratti_family() -> DifferenceFamily {
    DifferenceFamily {
        modulus: 30,
        base_blocks: vec![vec![0, 1, 8, 12, 14]],
        step: 5,
        class_count: 5,
        class_shift: 1,
        base_hosts: Some(vec![0]),
    }
}

/// The 30-point, five-course design with `h(B_0 + t) = t`.
pub fn buratti_pdp_5_30() -> Schedule {
    let classes = develop_difference_family(&buratti_family()).expect("Buratti family partitions Z_30");
    Schedule::new(5, 30, classes)
}

/// Points split into groups with blocks resolved into parallel classes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GddRepr")]
pub struct GroupDivisibleDesign {
    pub group_size: usize,
    pub groups: Vec<Vec<Point>>,
    pub classes: Vec<ParallelClass>,
}

#[derive(Deserialize)]
struct GddRepr {
    group_size: usize,
    #[serde(default)]
    groups: Option<Vec<Vec<Point>>>,
    classes: Vec<ParallelClass>,
}

impl TryFrom<GddRepr> for GroupDivisibleDesign {
    type Error = SpecialError;

    fn try_from(r: GddRepr) -> Result<Self, Self::Error> {
        let v = r
            .classes
            .first()
            .map_or(0, |c| c.blocks.iter().map(Block::len).sum::<usize>());
        let groups = match r.groups {
            Some(g) => g,
            None if r.group_size > 0 => consecutive_groups(v, r.group_size),
            None => return Err(SpecialError::BadGdd("group size must be positive".into())),
        };
        let gdd = GroupDivisibleDesign {
            group_size: r.group_size,
            groups,
            classes: r.classes,
        };
        gdd.check(false)?;
        Ok(gdd)
    }
}

/// Groups `{g*i, ..., g*i + g - 1}`.
pub fn consecutive_groups(v: usize, group_size: usize) -> Vec<Vec<Point>> {
    (0..v / group_size)
        .map(|i| ((i * group_size) as Point..((i + 1) * group_size) as Point).collect())
        .collect()
}

impl GroupDivisibleDesign {
    pub fn v(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    pub fn block_size(&self) -> Option<usize> {
        self.classes.first()?.blocks.first().map(Block::len)
    }

    /// Groups partition the points into equal groups; every class partitions the
    /// points; no block meets a group twice; no pair occurs twice. With
    /// `complete`, every pair from distinct groups must occur exactly once.
    pub fn check(&self, complete: bool) -> Result<(), SpecialError> {
        let bad = |m: String| Err(SpecialError::BadGdd(m));
        let v = self.v();
        let mut group_of = vec![usize::MAX; v];
        for (gi, g) in self.groups.iter().enumerate() {
            if g.len() != self.group_size {
                return bad(format!("group {gi} has size {}", g.len()));
            }
            for &p in g {
                if p as usize >= v || group_of[p as usize] != usize::MAX {
                    return bad(format!("groups do not partition 0..{v}"));
                }
                group_of[p as usize] = gi;
            }
        }
        let mut pair_seen = vec![false; v * v];
        for (ci, class) in self.classes.iter().enumerate() {
            let mut covered = vec![false; v];
            for b in &class.blocks {
                if Some(b.len()) != self.block_size() {
                    return bad(format!("class {ci} mixes block sizes"));
                }
                for &p in &b.members {
                    if p as usize >= v || std::mem::replace(&mut covered[p as usize], true) {
                        return bad(format!("class {ci} is not a partition"));
                    }
                }
                for (x, y) in b.pairs() {
                    if group_of[x as usize] == group_of[y as usize] {
                        return bad(format!("block {:?} meets a group twice", b.members));
                    }
                    if std::mem::replace(&mut pair_seen[x as usize * v + y as usize], true) {
                        return bad(format!("pair {{{x}, {y}}} repeated"));
                    }
                }
            }
            if covered.iter().any(|&c| !c) {
                return bad(format!("class {ci} is not a partition"));
            }
        }
        if complete {
            for x in 0..v {
                for y in x + 1..v {
                    if group_of[x] != group_of[y] && !pair_seen[x * v + y] {
                        return bad(format!("cross-group pair {{{x}, {y}}} never covered"));
                    }
                }
            }
        }
        Ok(())
    }
}

const RGDD_3_8: &str = include_str!("../data/rgdd_4_type_3_8.json");

/// The embedded resolvable 4-GDD of type 3^8 (seven classes), re-verified
/// as complete on every load.
pub fn resolvable_gdd_3_8() -> Result<GroupDivisibleDesign, SpecialError> {
    let gdd: GroupDivisibleDesign =
        serde_json::from_str(RGDD_3_8).map_err(|e| SpecialError::CorruptEmbedded(e.to_string()))?;
    gdd.check(true)
        .map_err(|e| SpecialError::CorruptEmbedded(e.to_string()))?;
    if gdd.groups != consecutive_groups(24, 3) || gdd.classes.len() != 7 {
        return Err(SpecialError::CorruptEmbedded("unexpected RGDD shape".into()));
    }
    Ok(gdd)
}

/// Four classes of the type-3^8 RGDD, hosted through a perfect matching.
pub fn pdp_4_24() -> Result<Schedule, SpecialError> {
    let gdd = resolvable_gdd_3_8()?;
    Ok(assign_hosts(&gdd.classes[..4])?)
}

/// The 12-couple schedule exactly as classically printed, relabeled to `0..12`
/// (rows `0..4`, columns `4..8`, symbols `8..12`).
pub fn classic_pdp_12() -> Schedule {
    // (members, host), 1-based as printed
    const PRINTED: [[([Point; 3], Point); 4]; 3] = [
        [([1, 5, 9], 1), ([2, 8, 11], 2), ([3, 6, 12], 3), ([4, 7, 10], 4)],
        [([1, 7, 12], 7), ([2, 6, 10], 6), ([3, 8, 9], 8), ([4, 5, 11], 5)],
        [
            ([1, 8, 10], 10),
            ([2, 5, 12], 12),
            ([3, 7, 11], 11),
            ([4, 6, 9], 9),
        ],
    ];
    let classes = PRINTED
        .iter()
        .map(|class| {
            ParallelClass::new(
                class
                    .iter()
                    .map(|(m, h)| Block::new(m.iter().map(|p| p - 1).collect(), Some(h - 1)))
                    .collect(),
            )
        })
        .collect();
    Schedule::new(3, 12, classes)
}
