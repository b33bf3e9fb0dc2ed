//! Domain types shared by every construction.
//!
//! A [`Schedule`] is `k` parallel classes of `k`-subsets ("blocks") over the
//! points `0..v`. Each block may carry the point that hosts it. Points are
//! always canonical integers; constructions that work over structured labels
//! (row/column/symbol, `Z_w x {0..k}`) map them to integers before building
//! blocks.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// A participant, canonically an integer in `0..v`.
pub type Point = u32;

/// One course sitting: `k` distinct points, optionally with a host among them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "BlockRepr")]
pub struct Block {
    pub members: Vec<Point>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub host: Option<Point>,
}

#[derive(Deserialize)]
struct BlockRepr {
    members: Vec<Point>,
    #[serde(default)]
    host: Option<Point>,
}

impl From<BlockRepr> for Block {
    fn from(r: BlockRepr) -> Self {
        Block::new(r.members, r.host)
    }
}

impl Block {
    /// Builds a block, sorting the members.
    pub fn new(mut members: Vec<Point>, host: Option<Point>) -> Self {
        members.sort_unstable();
        Block { members, host }
    }

    pub fn unhosted(members: Vec<Point>) -> Self {
        Block::new(members, None)
    }

    pub fn contains(&self, p: Point) -> bool {
        self.members.binary_search(&p).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Unordered member pairs, each as `(smaller, larger)`.
    pub fn pairs(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        self.members
            .iter()
            .enumerate()
            .flat_map(move |(i, &a)| self.members[i + 1..].iter().map(move |&b| (a, b)))
    }
}

/// The blocks of one course. The course index is the class position in its schedule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ParallelClass {
    pub blocks: Vec<Block>,
}

impl ParallelClass {
    pub fn new(blocks: Vec<Block>) -> Self {
        ParallelClass { blocks }
    }

    pub fn from_member_lists<I>(lists: I) -> Self
    where
        I: IntoIterator<Item = Vec<Point>>,
    {
        ParallelClass::new(lists.into_iter().map(Block::unhosted).collect())
    }
}

/// Position of a block inside a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BlockRef {
    pub class: usize,
    pub block: usize,
}

/// A progressive dinner party design candidate. Whether it actually satisfies
/// the three axioms is decided by [`crate::verify::verify`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Schedule {
    pub k: usize,
    pub v: usize,
    pub classes: Vec<ParallelClass>,
}

/// Structural defects that make a schedule unfit for axiom checking.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MalformedSchedule {
    #[error("block size k must be at least 1")]
    ZeroBlockSize,
    #[error("block {at:?} has {len} members, expected {k}")]
    WrongBlockSize { at: BlockRef, len: usize, k: usize },
    #[error("block {at:?} lists point {point} more than once")]
    DuplicateMember { at: BlockRef, point: Point },
    #[error("block {at:?} contains point {point}, outside 0..{v}")]
    PointOutOfRange { at: BlockRef, point: Point, v: usize },
}

impl Schedule {
    pub fn new(k: usize, v: usize, classes: Vec<ParallelClass>) -> Self {
        Schedule { k, v, classes }
    }

    /// Checks the field-level invariants: block size, distinct in-range
    /// members, in-range hosts. The design axioms (including whether a host
    /// sits in its own block) are not checked here.
    pub fn check_structure(&self) -> Result<(), MalformedSchedule> {
        if self.k == 0 {
            return Err(MalformedSchedule::ZeroBlockSize);
        }
        for (at, block) in self.blocks() {
            if block.members.len() != self.k {
                return Err(MalformedSchedule::WrongBlockSize {
                    at,
                    len: block.members.len(),
                    k: self.k,
                });
            }
            let mut sorted = block.members.clone();
            sorted.sort_unstable();
            if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
                return Err(MalformedSchedule::DuplicateMember { at, point: w[0] });
            }
            if let Some(&point) = sorted.iter().find(|&&p| p as usize >= self.v) {
                return Err(MalformedSchedule::PointOutOfRange { at, point, v: self.v });
            }
            if let Some(host) = block.host.filter(|&h| h as usize >= self.v) {
                return Err(MalformedSchedule::PointOutOfRange {
                    at,
                    point: host,
                    v: self.v,
                });
            }
        }
        Ok(())
    }

    /// All blocks in class order, then block order.
    pub fn blocks(&self) -> impl Iterator<Item = (BlockRef, &Block)> + '_ {
        self.classes.iter().enumerate().flat_map(|(class, pc)| {
            pc.blocks
                .iter()
                .enumerate()
                .map(move |(block, b)| (BlockRef { class, block }, b))
        })
    }

    pub fn block(&self, at: BlockRef) -> Option<&Block> {
        self.classes.get(at.class)?.blocks.get(at.block)
    }

    pub fn num_blocks(&self) -> usize {
        self.classes.iter().map(|c| c.blocks.len()).sum()
    }

    /// Copy with every host removed.
    pub fn without_hosts(&self) -> Schedule {
        let mut s = self.clone();
        for class in &mut s.classes {
            for b in &mut class.blocks {
                b.host = None;
            }
        }
        s
    }

    /// Copy with each class's blocks sorted, for comparisons that ignore
    /// within-class block order.
    pub fn canonical(&self) -> Schedule {
        let mut s = self.clone();
        for class in &mut s.classes {
            for b in &mut class.blocks {
                b.members.sort_unstable();
            }
            class.blocks.sort();
        }
        s
    }

    /// Equality up to the order of blocks inside each class.
    pub fn same_design(&self, other: &Schedule) -> bool {
        self.k == other.k && self.v == other.v && self.canonical() == other.canonical()
    }

    /// Applies `perm` (old point -> new point) to every member and host.
    ///
    /// Panics if `perm` is shorter than `v`.
    pub fn relabel(&self, perm: &[Point]) -> Schedule {
        assert!(perm.len() >= self.v, "permutation shorter than point set");
        let mut s = self.clone();
        for class in &mut s.classes {
            for b in &mut class.blocks {
                *b = Block::new(
                    b.members.iter().map(|&p| perm[p as usize]).collect(),
                    b.host.map(|h| perm[h as usize]),
                );
            }
        }
        s
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("schedule serialization cannot fail")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("schedule serialization cannot fail")
    }

    pub fn from_json(text: &str) -> Result<Schedule, serde_json::Error> {
        serde_json::from_str(text)
    }
}
