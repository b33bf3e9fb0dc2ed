//! Backtracking search for resolvable block sets with no repeated pair.
//!
//! Classes are filled one at a time. Inside a class the next block always
//! contains a chosen anchor point that the class has not covered yet, so each
//! class is enumerated exactly once as a set of blocks. The first class is
//! fixed up front: for [`search_pdp`] it is the lexicographic partition
//! `{0..k}, {k..2k}, ...`, which loses no generality since any design can be
//! relabeled to start that way. Exhaustion is therefore a certificate of
//! nonexistence relative to this canonical form.
//!
//! Hosts are never searched over; once the blocks are found they come from
//! a perfect matching.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::design::{ParallelClass, Point, Schedule};
use crate::hosts::assign_hosts;
use crate::latin::{LatinSquare, Transversal};
use crate::special::{consecutive_groups, GroupDivisibleDesign};
use crate::verify::verify;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("block size must be at least 2, got {0}")]
    BlockSizeTooSmall(usize),
    #[error("k = {k} does not divide v = {v}")]
    Indivisible { k: usize, v: usize },
    #[error("v = {v} exceeds the exhaustive-search bound {max}")]
    TooLarge { v: usize, max: usize },
    #[error("search budget of {0} nodes exhausted")]
    BudgetExceeded(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    /// Deterministic full-tree search; exhaustion certifies nonexistence.
    Exhaust,
    /// Seeded candidate shuffling with restarts; only `Found` is meaningful.
    Find,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    pub mode: SearchMode,
    /// Maximum number of block placements, summed over restarts.
    pub budget: u64,
    /// Only used in [`SearchMode::Find`].
    pub seed: u64,
    pub max_exhaust_v: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            mode: SearchMode::Exhaust,
            budget: 10_000_000,
            seed: 0,
            max_exhaust_v: 30,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    pub nodes: u64,
    pub backtracks: u64,
    pub restarts: u64,
    /// `depth_histogram[d]` counts placements of the `d`-th searched block.
    pub depth_histogram: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "outcome", content = "schedule", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found(Schedule),
    Exhausted,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SearchResult {
    #[serde(flatten)]
    pub outcome: SearchOutcome,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn found(&self) -> Option<&Schedule> {
        match &self.outcome {
            SearchOutcome::Found(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_exhausted(&self) -> bool {
        matches!(self.outcome, SearchOutcome::Exhausted)
    }

    /// Statistics as the JSON document printed by the CLI.
    pub fn stats_json(&self) -> serde_json::Value {
        let outcome = match self.outcome {
            SearchOutcome::Found(_) => "found",
            SearchOutcome::Exhausted => "exhausted",
            SearchOutcome::BudgetExceeded => "budget_exceeded",
        };
        serde_json::json!({
            "outcome": outcome,
            "nodes": self.stats.nodes,
            "backtracks": self.stats.backtracks,
            "restarts": self.stats.restarts,
            "depth_histogram": self.stats.depth_histogram,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Anchor {
    /// Smallest uncovered point.
    Smallest,
    /// Uncovered point with the fewest compatible uncovered partners.
    MostConstrained,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Step {
    Found,
    Dead,
    OutOfBudget,
}

/// Symmetric pair-usage matrix as one bitset row per point.
#[derive(Debug, Clone)]
struct PairSet {
    words: usize,
    rows: Vec<u64>,
}

impl PairSet {
    fn new(v: usize) -> Self {
        let words = v.div_ceil(64);
        PairSet {
            words,
            rows: vec![0; v * words],
        }
    }

    fn row(&self, p: usize) -> &[u64] {
        &self.rows[p * self.words..(p + 1) * self.words]
    }

    fn contains(&self, x: usize, y: usize) -> bool {
        self.rows[x * self.words + y / 64] >> (y % 64) & 1 == 1
    }

    fn toggle(&mut self, x: usize, y: usize) {
        self.rows[x * self.words + y / 64] ^= 1 << (y % 64);
        self.rows[y * self.words + x / 64] ^= 1 << (x % 64);
    }

    fn toggle_block(&mut self, block: &[Point]) {
        for (i, &x) in block.iter().enumerate() {
            for &y in &block[i + 1..] {
                self.toggle(x as usize, y as usize);
            }
        }
    }
}

struct Engine {
    v: usize,
    k: usize,
    target_classes: usize,
    anchor: Anchor,
    node_limit: u64,
    rng: Option<ChaCha8Rng>,
    /// Pairs that may never be placed (e.g. inside a GDD group).
    forbidden: PairSet,
    used: PairSet,
    classes: Vec<Vec<Vec<Point>>>,
    uncovered: Vec<bool>,
    fixed_blocks: usize,
    stats: SearchStats,
}

impl Engine {
    fn new(v: usize, k: usize, target_classes: usize, anchor: Anchor) -> Self {
        Engine {
            v,
            k,
            target_classes,
            anchor,
            node_limit: u64::MAX,
            rng: None,
            forbidden: PairSet::new(v),
            used: PairSet::new(v),
            classes: Vec::new(),
            uncovered: vec![true; v],
            fixed_blocks: 0,
            stats: SearchStats::default(),
        }
    }

    fn forbid(&mut self, block: &[Point]) {
        self.forbidden.toggle_block(block);
        self.used.toggle_block(block);
    }

    fn fix_class(&mut self, blocks: Vec<Vec<Point>>) {
        for b in &blocks {
            self.used.toggle_block(b);
        }
        self.fixed_blocks += blocks.len();
        self.classes.push(blocks);
    }

    fn reset(&mut self) {
        self.used = self.forbidden.clone();
        for class in &self.classes {
            for b in class {
                self.used.toggle_block(b);
            }
        }
    }

    fn compatible(&self, x: usize, y: usize) -> bool {
        !self.used.contains(x, y)
    }

    fn candidates(&self, anchor: usize) -> Vec<Point> {
        let row = self.used.row(anchor);
        (0..self.v)
            .filter(|&p| p != anchor && self.uncovered[p] && row[p / 64] >> (p % 64) & 1 == 0)
            .map(|p| p as Point)
            .collect()
    }

    fn choose_anchor(&self) -> Option<usize> {
        let mut open = (0..self.v).filter(|&p| self.uncovered[p]);
        match self.anchor {
            Anchor::Smallest => open.next(),
            Anchor::MostConstrained => open.min_by_key(|&p| self.candidates(p).len()),
        }
    }

    #[cfg(debug_assertions)]
    fn assert_consistent(&self) {
        let mut expect = self.forbidden.clone();
        for class in &self.classes {
            for b in class {
                expect.toggle_block(b);
            }
        }
        debug_assert_eq!(expect.rows, self.used.rows, "pair bitset out of sync");
    }

    #[cfg(not(debug_assertions))]
    fn assert_consistent(&self) {}

    fn place(&mut self) -> Step {
        if self.uncovered.iter().all(|&u| !u) {
            if self.classes.len() == self.target_classes {
                return Step::Found;
            }
            self.classes.push(Vec::new());
            self.uncovered.iter_mut().for_each(|u| *u = true);
            let step = self.place();
            if step != Step::Found {
                self.classes.pop();
                self.uncovered.iter_mut().for_each(|u| *u = false);
            }
            return step;
        }
        let Some(anchor) = self.choose_anchor() else {
            return Step::Dead;
        };
        let mut cands = self.candidates(anchor);
        if let Some(rng) = self.rng.as_mut() {
            cands.shuffle(rng);
        }
        let mut block = vec![anchor as Point];
        self.extend(&mut block, &cands)
    }

    fn extend(&mut self, block: &mut Vec<Point>, cands: &[Point]) -> Step {
        if block.len() == self.k {
            return self.commit(block);
        }
        let need = self.k - block.len();
        for (i, &c) in cands.iter().enumerate() {
            if cands.len() - i < need {
                break;
            }
            let rest: Vec<Point> = cands[i + 1..]
                .iter()
                .copied()
                .filter(|&x| self.compatible(c as usize, x as usize))
                .collect();
            if rest.len() + 1 < need {
                continue;
            }
            block.push(c);
            let step = self.extend(block, &rest);
            block.pop();
            if step != Step::Dead {
                return step;
            }
        }
        Step::Dead
    }

    fn commit(&mut self, block: &[Point]) -> Step {
        if self.stats.nodes >= self.node_limit {
            return Step::OutOfBudget;
        }
        self.stats.nodes += 1;
        let depth = self.classes.iter().map(Vec::len).sum::<usize>() - self.fixed_blocks;
        if self.stats.depth_histogram.len() <= depth {
            self.stats.depth_histogram.resize(depth + 1, 0);
        }
        self.stats.depth_histogram[depth] += 1;

        let mut sorted = block.to_vec();
        sorted.sort_unstable();
        self.used.toggle_block(&sorted);
        for &p in &sorted {
            self.uncovered[p as usize] = false;
        }
        self.classes.last_mut().expect("a class is open").push(sorted);
        self.assert_consistent();

        let step = self.place();
        if step == Step::Found {
            return step;
        }
        let sorted = self
            .classes
            .last_mut()
            .expect("a class is open")
            .pop()
            .expect("block placed");
        self.used.toggle_block(&sorted);
        for &p in &sorted {
            self.uncovered[p as usize] = true;
        }
        self.stats.backtracks += 1;
        self.assert_consistent();
        step
    }

    /// Runs the search, restarting with fresh shuffles in find mode.
    fn run(&mut self, config: &SearchConfig) -> Step {
        self.uncovered.iter_mut().for_each(|u| *u = false);
        match config.mode {
            SearchMode::Exhaust => {
                self.rng = None;
                self.node_limit = config.budget;
                self.place()
            }
            SearchMode::Find => {
                let mut slice = 1_000u64;
                loop {
                    let remaining = config.budget - self.stats.nodes;
                    if remaining == 0 {
                        return Step::OutOfBudget;
                    }
                    self.rng = Some(ChaCha8Rng::seed_from_u64(
                        config.seed.wrapping_add(self.stats.restarts),
                    ));
                    self.node_limit = self.stats.nodes + slice.min(remaining);
                    // a shuffle only reorders the tree, so a dead end is still exhaustive
                    match self.place() {
                        Step::OutOfBudget => {}
                        step => return step,
                    }
                    self.reset();
                    self.stats.restarts += 1;
                    slice = slice.saturating_mul(2);
                }
            }
        }
    }

    fn take_classes(&self) -> Vec<ParallelClass> {
        self.classes
            .iter()
            .map(|c| ParallelClass::from_member_lists(c.iter().cloned()))
            .collect()
    }
}

/// Searches for `k` parallel classes of `k`-blocks on `v` points with no
/// repeated pair, then hosts them by matching.
pub fn search_pdp(k: usize, v: usize, config: &SearchConfig) -> Result<SearchResult, SearchError> {
    if k < 2 {
        return Err(SearchError::BlockSizeTooSmall(k));
    }
    if !v.is_multiple_of(k) || v == 0 {
        return Err(SearchError::Indivisible { k, v });
    }
    if config.mode == SearchMode::Exhaust && v > config.max_exhaust_v {
        return Err(SearchError::TooLarge {
            v,
            max: config.max_exhaust_v,
        });
    }
    let mut engine = Engine::new(v, k, k, Anchor::Smallest);
    engine.fix_class(
        (0..v / k)
            .map(|i| ((i * k) as Point..((i + 1) * k) as Point).collect())
            .collect(),
    );
    let step = engine.run(config);
    let outcome = match step {
        Step::Found => {
            let schedule =
                assign_hosts(&engine.take_classes()).expect("k regular classes always admit hosts");
            debug_assert!(verify(&schedule).map(|r| r.is_valid()).unwrap_or(false));
            SearchOutcome::Found(schedule)
        }
        Step::Dead => SearchOutcome::Exhausted,
        Step::OutOfBudget => SearchOutcome::BudgetExceeded,
    };
    Ok(SearchResult {
        outcome,
        stats: engine.stats,
    })
}

/// Four parallel classes of 4-blocks on 24 points, groups `{3i, 3i+1, 3i+2}`,
/// with no block meeting a group twice and no repeated pair. Uses
/// most-constrained-anchor selection with within-group pairs pre-excluded.
pub fn search_resolvable_gdd_3_8(budget: u64, seed: u64) -> Result<GroupDivisibleDesign, SearchError> {
    let groups = consecutive_groups(24, 3);
    let mut engine = Engine::new(24, 4, 4, Anchor::MostConstrained);
    for g in &groups {
        engine.forbid(g);
    }
    // one point from each of four groups, groups 0-3 then 4-7
    engine.fix_class(
        (0..6u32)
            .map(|b| {
                let (half, offset) = (b / 3, b % 3);
                (0..4).map(|g| 12 * half + 3 * g + offset).collect()
            })
            .collect(),
    );
    let config = SearchConfig {
        mode: SearchMode::Find,
        budget,
        seed,
        ..SearchConfig::default()
    };
    match engine.run(&config) {
        Step::Found => Ok(GroupDivisibleDesign {
            group_size: 3,
            groups,
            classes: engine.take_classes(),
        }),
        _ => Err(SearchError::BudgetExceeded(budget)),
    }
}

/// Every transversal of `sq`, each as the column chosen in row order.
pub fn all_transversals(sq: &LatinSquare) -> Vec<Transversal> {
    fn go(
        sq: &LatinSquare,
        row: usize,
        cols: &mut Vec<u32>,
        used_col: &mut [bool],
        used_sym: &mut [bool],
        out: &mut Vec<Transversal>,
    ) {
        let w = sq.order();
        if row == w {
            out.push(Transversal::new(
                cols.iter().enumerate().map(|(r, &c)| (r as u32, c)).collect(),
            ));
            return;
        }
        for c in 0..w {
            let s = sq.get(row, c) as usize;
            if used_col[c] || used_sym[s] {
                continue;
            }
            used_col[c] = true;
            used_sym[s] = true;
            cols.push(c as u32);
            go(sq, row + 1, cols, used_col, used_sym, out);
            cols.pop();
            used_col[c] = false;
            used_sym[s] = false;
        }
    }
    let w = sq.order();
    let mut out = Vec::new();
    go(
        sq,
        0,
        &mut Vec::new(),
        &mut vec![false; w],
        &mut vec![false; w],
        &mut out,
    );
    out
}

/// `count` pairwise disjoint transversals of `sq`, if they exist.
pub fn find_disjoint_transversals(sq: &LatinSquare, count: usize) -> Option<Vec<Transversal>> {
    fn go(all: &[Transversal], start: usize, count: usize, chosen: &mut Vec<Transversal>) -> bool {
        if chosen.len() == count {
            return true;
        }
        for i in start..all.len() {
            if chosen.iter().all(|t| t.is_disjoint_from(&all[i])) {
                chosen.push(all[i].clone());
                if go(all, i + 1, count, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let all = all_transversals(sq);
    let mut chosen = Vec::new();
    go(&all, 0, count, &mut chosen).then_some(chosen)
}
