//! Host assignment through a perfect matching of the point-block incidence graph.
//!
//! `k` parallel classes of `k`-subsets give a `k`-regular bipartite graph, and
//! every regular bipartite graph has a perfect matching, so hosts can always be
//! chosen whatever the pair structure of the classes is.

use serde::Serialize;
use thiserror::Error;

use crate::design::{BlockRef, ParallelClass, Point, Schedule};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatchingError {
    #[error("no classes given")]
    Empty,
    #[error("blocks have mixed sizes ({0} and {1})")]
    MixedBlockSizes(usize, usize),
    #[error("class {class} does not partition the {v} points")]
    NotPartition { class: usize, v: usize },
    #[error("{left} left nodes cannot be perfectly matched with {right} right nodes")]
    SizeMismatch { left: usize, right: usize },
    #[error("Hall's condition fails: {} left nodes have only {} neighbours", .witness.len(), .neighbours.len())]
    HallViolation {
        witness: Vec<usize>,
        neighbours: Vec<usize>,
    },
}

/// Bipartite graph with points on the left and blocks on the right.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceGraph {
    adjacency: Vec<Vec<usize>>,
    right: usize,
    blocks: Vec<BlockRef>,
}

impl IncidenceGraph {
    /// A graph from an explicit edge list; neighbour lists are kept sorted so
    /// the matcher scans them in index order.
    pub fn from_edges(left: usize, right: usize, edges: &[(usize, usize)]) -> Self {
        let mut adjacency = vec![Vec::new(); left];
        for &(l, r) in edges {
            assert!(l < left && r < right, "edge ({l}, {r}) out of range");
            adjacency[l].push(r);
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
            adj.dedup();
        }
        let blocks = (0..right).map(|block| BlockRef { class: 0, block }).collect();
        IncidenceGraph {
            adjacency,
            right,
            blocks,
        }
    }

    pub fn left_len(&self) -> usize {
        self.adjacency.len()
    }

    pub fn right_len(&self) -> usize {
        self.right
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum()
    }

    pub fn neighbours(&self, left: usize) -> &[usize] {
        &self.adjacency[left]
    }

    /// Schedule position of right node `r`.
    pub fn block_ref(&self, r: usize) -> BlockRef {
        self.blocks[r]
    }

    /// The common degree if every node on both sides has the same degree.
    pub fn regular_degree(&self) -> Option<usize> {
        let mut right_deg = vec![0usize; self.right];
        for adj in &self.adjacency {
            for &r in adj {
                right_deg[r] += 1;
            }
        }
        let d = self.adjacency.first().map(Vec::len)?;
        (self.adjacency.iter().all(|a| a.len() == d) && right_deg.iter().all(|&x| x == d)).then_some(d)
    }
}

/// Point-block incidence of the given classes. Blocks are numbered in class
/// order, then block order; points are `0..v` where `v` is one more than the
/// largest point.
pub fn build_incidence(classes: &[ParallelClass]) -> Result<IncidenceGraph, MatchingError> {
    let v = classes
        .iter()
        .flat_map(|c| c.blocks.iter())
        .flat_map(|b| b.members.iter())
        .max()
        .map_or(0, |&m| m as usize + 1);
    let mut adjacency = vec![Vec::new(); v];
    let mut blocks = Vec::new();
    for (ci, class) in classes.iter().enumerate() {
        let mut covered = vec![false; v];
        for (bi, b) in class.blocks.iter().enumerate() {
            let r = blocks.len();
            blocks.push(BlockRef { class: ci, block: bi });
            for &p in &b.members {
                if std::mem::replace(&mut covered[p as usize], true) {
                    return Err(MatchingError::NotPartition { class: ci, v });
                }
                adjacency[p as usize].push(r);
            }
        }
        if covered.iter().any(|&c| !c) {
            return Err(MatchingError::NotPartition { class: ci, v });
        }
    }
    Ok(IncidenceGraph {
        adjacency,
        right: blocks.len(),
        blocks,
    })
}

/// Matched `(left, right)` pairs, sorted by left node.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Matching {
    pub pairs: Vec<(usize, usize)>,
}

impl Matching {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Left node matched with right node `r`.
    pub fn left_of(&self, r: usize) -> Option<usize> {
        self.pairs.iter().find(|&&(_, x)| x == r).map(|&(l, _)| l)
    }
}

struct Augmenter<'a> {
    g: &'a IncidenceGraph,
    match_right: Vec<Option<usize>>,
    seen_right: Vec<usize>,
    seen_left: Vec<usize>,
    stamp: usize,
}

impl Augmenter<'_> {
    fn augment(&mut self, l: usize) -> bool {
        self.seen_left[l] = self.stamp;
        for &r in &self.g.adjacency[l] {
            if self.seen_right[r] == self.stamp {
                continue;
            }
            self.seen_right[r] = self.stamp;
            let free = match self.match_right[r] {
                None => true,
                Some(other) => self.augment(other),
            };
            if free {
                self.match_right[r] = Some(l);
                return true;
            }
        }
        false
    }
}

/// Augmenting-path matching scanning left nodes, then their neighbours, in
/// index order. On failure the error carries a left set `S` whose
/// neighbourhood is smaller than `S`.
pub fn perfect_matching(g: &IncidenceGraph) -> Result<Matching, MatchingError> {
    let (left, right) = (g.left_len(), g.right_len());
    let mut aug = Augmenter {
        g,
        match_right: vec![None; right],
        seen_right: vec![0; right],
        seen_left: vec![0; left],
        stamp: 0,
    };
    for l in 0..left {
        aug.stamp += 1;
        if !aug.augment(l) {
            let stamp = aug.stamp;
            let witness = (0..left).filter(|&x| aug.seen_left[x] == stamp).collect();
            let neighbours = (0..right).filter(|&r| aug.seen_right[r] == stamp).collect();
            return Err(MatchingError::HallViolation { witness, neighbours });
        }
    }
    if left != right {
        return Err(MatchingError::SizeMismatch { left, right });
    }
    let mut pairs: Vec<(usize, usize)> = aug
        .match_right
        .iter()
        .enumerate()
        .filter_map(|(r, l)| l.map(|l| (l, r)))
        .collect();
    pairs.sort_unstable();
    Ok(Matching { pairs })
}

/// Hosts for arbitrary parallel classes of equal-size blocks: block `B` is
/// hosted by the point matched with it. Block structure is left untouched and
/// the pair condition is not required.
pub fn assign_hosts(classes: &[ParallelClass]) -> Result<Schedule, MatchingError> {
    let mut sizes = classes.iter().flat_map(|c| c.blocks.iter()).map(|b| b.len());
    let k = sizes.next().ok_or(MatchingError::Empty)?;
    if let Some(other) = sizes.find(|&s| s != k) {
        return Err(MatchingError::MixedBlockSizes(k, other));
    }
    let g = build_incidence(classes)?;
    let matching = perfect_matching(&g)?;
    let mut out = classes.to_vec();
    for &(point, r) in &matching.pairs {
        let at = g.block_ref(r);
        out[at.class].blocks[at.block].host = Some(point as Point);
    }
    Ok(Schedule::new(k, g.left_len(), out))
}
