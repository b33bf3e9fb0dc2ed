//! Latin squares, finite-field MOLS and the transversal construction.
//!
//! With `k - 2` mutually orthogonal squares sharing `k` disjoint common
//! transversals, the cell `(r, c)` of transversal `T_i` becomes the block
//! `{r, c, L_1(r,c), ..., L_{k-2}(r,c)}` of class `i`, hosted by its `i`-th
//! coordinate. Coordinates are relabeled to canonical points by role: rows
//! `0..w`, columns `w..2w`, symbols of square `j` at `(j+2)w..(j+3)w`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::{Block, ParallelClass, Point, Schedule};
use crate::gf::{FieldElement, FieldError, GaloisField};

/// `(row, column)`.
pub type Cell = (u32, u32);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatinError {
    #[error("order must be at least 2, got {0}")]
    OrderTooSmall(usize),
    #[error("expected {expected} cells, got {found}")]
    CellCount { expected: usize, found: usize },
    #[error("not a latin square: symbol {symbol} at ({row}, {col})")]
    NotLatin { row: usize, col: usize, symbol: u32 },
    #[error("squares have different orders ({0} and {1})")]
    OrderMismatch(usize, usize),
    #[error("squares are not orthogonal: cells {first:?} and {second:?} carry the same symbol pair")]
    NotOrthogonal { first: (u32, u32), second: (u32, u32) },
    #[error("requested {requested} items, at most {max} available")]
    CountOutOfRange { requested: usize, max: usize },
    #[error("cell set {index} is not a transversal of square {square}")]
    NotTransversal { index: usize, square: usize },
    #[error("transversals {0} and {1} share a cell")]
    NotDisjoint(usize, usize),
    #[error("need {expected} transversals for k = {k}, got {found}")]
    WrongTransversalCount { k: usize, expected: usize, found: usize },
    #[error("no {needed} mutually orthogonal latin squares of order {order} are available")]
    InsufficientMols { needed: usize, order: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A `w x w` array over the symbols `0..w`, each symbol once per row and column.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Vec<u32>>", into = "Vec<Vec<u32>>")]
pub struct LatinSquare {
    order: usize,
    cells: Vec<u32>,
}

impl LatinSquare {
    /// Row-major cells; fails unless the latin property holds.
    pub fn new(order: usize, cells: Vec<u32>) -> Result<Self, LatinError> {
        if order < 2 {
            return Err(LatinError::OrderTooSmall(order));
        }
        if cells.len() != order * order {
            return Err(LatinError::CellCount {
                expected: order * order,
                found: cells.len(),
            });
        }
        let mut row_seen = vec![false; order * order];
        let mut col_seen = vec![false; order * order];
        for (i, &s) in cells.iter().enumerate() {
            let (r, c) = (i / order, i % order);
            let bad = LatinError::NotLatin {
                row: r,
                col: c,
                symbol: s,
            };
            if s as usize >= order {
                return Err(bad);
            }
            let (ri, ci) = (r * order + s as usize, c * order + s as usize);
            if row_seen[ri] || col_seen[ci] {
                return Err(bad);
            }
            row_seen[ri] = true;
            col_seen[ci] = true;
        }
        Ok(LatinSquare { order, cells })
    }

    pub fn from_rows(rows: Vec<Vec<u32>>) -> Result<Self, LatinError> {
        let order = rows.len();
        if let Some(r) = rows.iter().find(|r| r.len() != order) {
            return Err(LatinError::CellCount {
                expected: order,
                found: r.len(),
            });
        }
        Self::new(order, rows.into_iter().flatten().collect())
    }

    /// `L(r, c) = r + c mod w`.
    pub fn cyclic(order: usize) -> Self {
        let cells = (0..order * order)
            .map(|i| ((i / order + i % order) % order) as u32)
            .collect();
        LatinSquare::new(order, cells).expect("cyclic square is latin")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, row: usize, col: usize) -> u32 {
        self.cells[row * self.order + col]
    }

    pub fn rows(&self) -> Vec<Vec<u32>> {
        self.cells.chunks(self.order).map(<[u32]>::to_vec).collect()
    }

    /// First pair of cells whose superposed symbol pairs coincide, if any.
    pub fn orthogonality_collision(&self, other: &LatinSquare) -> Result<Option<(Cell, Cell)>, LatinError> {
        if self.order != other.order {
            return Err(LatinError::OrderMismatch(self.order, other.order));
        }
        let w = self.order;
        let mut seen: Vec<Option<(u32, u32)>> = vec![None; w * w];
        for r in 0..w {
            for c in 0..w {
                let key = self.get(r, c) as usize * w + other.get(r, c) as usize;
                if let Some(first) = seen[key] {
                    return Ok(Some((first, (r as u32, c as u32))));
                }
                seen[key] = Some((r as u32, c as u32));
            }
        }
        Ok(None)
    }

    pub fn is_orthogonal_to(&self, other: &LatinSquare) -> bool {
        matches!(self.orthogonality_collision(other), Ok(None))
    }
}

impl TryFrom<Vec<Vec<u32>>> for LatinSquare {
    type Error = LatinError;

    fn try_from(rows: Vec<Vec<u32>>) -> Result<Self, Self::Error> {
        LatinSquare::from_rows(rows)
    }
}

impl From<LatinSquare> for Vec<Vec<u32>> {
    fn from(sq: LatinSquare) -> Self {
        sq.rows()
    }
}

/// `w` cells `(row, column)`, kept sorted by row.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(from = "Vec<(u32, u32)>", into = "Vec<(u32, u32)>")]
pub struct Transversal {
    cells: Vec<(u32, u32)>,
}

impl Transversal {
    pub fn new(mut cells: Vec<(u32, u32)>) -> Self {
        cells.sort_unstable();
        Transversal { cells }
    }

    pub fn cells(&self) -> &[(u32, u32)] {
        &self.cells
    }

    /// One cell per row and column, all symbols distinct.
    pub fn is_transversal_of(&self, sq: &LatinSquare) -> bool {
        let w = sq.order();
        if self.cells.len() != w {
            return false;
        }
        let mut rows = vec![false; w];
        let mut cols = vec![false; w];
        let mut syms = vec![false; w];
        self.cells.iter().all(|&(r, c)| {
            let (r, c) = (r as usize, c as usize);
            if r >= w || c >= w {
                return false;
            }
            let s = sq.get(r, c) as usize;
            let fresh = !rows[r] && !cols[c] && !syms[s];
            rows[r] = true;
            cols[c] = true;
            syms[s] = true;
            fresh
        })
    }

    pub fn is_disjoint_from(&self, other: &Transversal) -> bool {
        self.cells.iter().all(|c| other.cells.binary_search(c).is_err())
    }
}

impl From<Vec<(u32, u32)>> for Transversal {
    fn from(cells: Vec<(u32, u32)>) -> Self {
        Transversal::new(cells)
    }
}

impl From<Transversal> for Vec<(u32, u32)> {
    fn from(t: Transversal) -> Self {
        t.cells
    }
}

/// Pairwise-orthogonal latin squares of a common order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "Vec<LatinSquare>", into = "Vec<LatinSquare>")]
pub struct MolsFamily {
    order: usize,
    squares: Vec<LatinSquare>,
}

impl MolsFamily {
    pub fn new(squares: Vec<LatinSquare>) -> Result<Self, LatinError> {
        let order = squares.first().map_or(0, LatinSquare::order);
        for (i, a) in squares.iter().enumerate() {
            for b in &squares[i + 1..] {
                if let Some((first, second)) = a.orthogonality_collision(b)? {
                    return Err(LatinError::NotOrthogonal { first, second });
                }
            }
        }
        Ok(MolsFamily { order, squares })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn squares(&self) -> &[LatinSquare] {
        &self.squares
    }

    pub fn len(&self) -> usize {
        self.squares.len()
    }

    pub fn is_empty(&self) -> bool {
        self.squares.is_empty()
    }
}

impl TryFrom<Vec<LatinSquare>> for MolsFamily {
    type Error = LatinError;

    fn try_from(squares: Vec<LatinSquare>) -> Result<Self, Self::Error> {
        MolsFamily::new(squares)
    }
}

impl From<MolsFamily> for Vec<LatinSquare> {
    fn from(f: MolsFamily) -> Self {
        f.squares
    }
}

/// The `m` squares `L_a(x, y) = a*x + y` over GF(q), for the nonzero `a` in
/// encoding order `1, 2, ..., m`. Rows, columns and symbols are the field
/// elements in base-`p` encoding.
pub fn gf_mols(q: usize, m: usize) -> Result<MolsFamily, LatinError> {
    let field = GaloisField::new(q as u32)?;
    if m == 0 || m >= q {
        return Err(LatinError::CountOutOfRange {
            requested: m,
            max: q.saturating_sub(1),
        });
    }
    let squares = (1..=m as u32)
        .map(|a| {
            let cells = (0..q * q)
                .map(|i| {
                    let (x, y) = (FieldElement((i / q) as u32), FieldElement((i % q) as u32));
                    field.add(field.mul(FieldElement(a), x), y).0
                })
                .collect();
            LatinSquare::new(q, cells).expect("a*x + y is latin for a != 0")
        })
        .collect();
    // Orthogonality follows from (a - b) being invertible; MolsFamily::new re-checks it.
    MolsFamily::new(squares)
}

/// The `count` disjoint transversals of `square` read off an orthogonal mate:
/// transversal `i` is the set of cells where `mate` holds symbol `i`.
pub fn transversals_from_mate(
    square: &LatinSquare,
    mate: &LatinSquare,
    count: usize,
) -> Result<Vec<Transversal>, LatinError> {
    if let Some((first, second)) = square.orthogonality_collision(mate)? {
        return Err(LatinError::NotOrthogonal { first, second });
    }
    let w = square.order();
    if count > w {
        return Err(LatinError::CountOutOfRange {
            requested: count,
            max: w,
        });
    }
    let mut cells: Vec<Vec<(u32, u32)>> = vec![Vec::with_capacity(w); count];
    for r in 0..w {
        for c in 0..w {
            let s = mate.get(r, c) as usize;
            if s < count {
                cells[s].push((r as u32, c as u32));
            }
        }
    }
    Ok(cells.into_iter().map(Transversal::new).collect())
}

/// Builds a design with `k = squares.len() + 2` from `k` disjoint common
/// transversals of the given mutually orthogonal squares.
pub fn pdp_from_transversals(
    squares: &[LatinSquare],
    transversals: &[Transversal],
) -> Result<Schedule, LatinError> {
    let k = squares.len() + 2;
    if squares.is_empty() || transversals.len() != k {
        return Err(LatinError::WrongTransversalCount {
            k,
            expected: k,
            found: transversals.len(),
        });
    }
    let w = squares[0].order();
    MolsFamily::new(squares.to_vec())?;
    for (ti, t) in transversals.iter().enumerate() {
        if let Some(si) = squares.iter().position(|sq| !t.is_transversal_of(sq)) {
            return Err(LatinError::NotTransversal {
                index: ti,
                square: si,
            });
        }
        for (tj, u) in transversals.iter().enumerate().skip(ti + 1) {
            if !t.is_disjoint_from(u) {
                return Err(LatinError::NotDisjoint(ti, tj));
            }
        }
    }

    let classes = transversals
        .iter()
        .enumerate()
        .map(|(i, t)| {
            let blocks = t
                .cells()
                .iter()
                .map(|&(r, c)| {
                    let coords: Vec<Point> = [r, c]
                        .into_iter()
                        .chain(squares.iter().map(|sq| sq.get(r as usize, c as usize)))
                        .enumerate()
                        .map(|(role, x)| (role * w) as Point + x)
                        .collect();
                    let host = coords[i];
                    Block::new(coords, Some(host))
                })
                .collect();
            ParallelClass::new(blocks)
        })
        .collect();
    Ok(Schedule::new(k, k * w, classes))
}

/// Uses the first `k - 2` squares of `family` as block builders and square
/// `k - 1` as the source of `k` common transversals.
pub fn pdp_from_family(k: usize, family: &MolsFamily) -> Result<Schedule, LatinError> {
    let w = family.order();
    if k < 3 || family.len() < k - 1 || k > w {
        return Err(LatinError::InsufficientMols {
            needed: k.saturating_sub(1),
            order: w,
        });
    }
    let builders = &family.squares()[..k - 2];
    let supplier = &family.squares()[k - 2];
    let transversals = transversals_from_mate(&builders[0], supplier, k)?;
    pdp_from_transversals(builders, &transversals)
}

/// `count` MOLS of order `w` from built-in sources: the classic pair for
/// order 4, otherwise the finite-field family when `w` is a prime power.
pub fn builtin_mols(count: usize, w: usize) -> Option<MolsFamily> {
    if w == 4 && count <= 2 {
        let (a, b) = classic_order4_pair();
        return MolsFamily::new(vec![a, b].into_iter().take(count).collect()).ok();
    }
    gf_mols(w, count).ok()
}

/// A design on `k*w` points from `k - 1` built-in MOLS of order `w`.
pub fn pdp_via_mols(k: usize, w: usize) -> Result<Schedule, LatinError> {
    let family = builtin_mols(k.saturating_sub(1), w).ok_or(LatinError::InsufficientMols {
        needed: k.saturating_sub(1),
        order: w,
    })?;
    pdp_from_family(k, &family)
}

/// The orthogonal pair of order 4 behind the classic 12-couple schedule,
/// symbols shifted to `0..4`.
pub fn classic_order4_pair() -> (LatinSquare, LatinSquare) {
    let shift = |rows: [[u32; 4]; 4]| {
        LatinSquare::from_rows(rows.iter().map(|r| r.iter().map(|s| s - 1).collect()).collect())
            .expect("embedded square is latin")
    };
    (
        shift([[1, 3, 4, 2], [4, 2, 1, 3], [2, 4, 3, 1], [3, 1, 2, 4]]),
        shift([[1, 4, 2, 3], [3, 2, 4, 1], [4, 1, 3, 2], [2, 3, 1, 4]]),
    )
}

/// A latin square of order 6 with four disjoint transversals. Order 6 has no
/// orthogonal mate, so this is the only latin route to 18 points.
pub fn order6_with_four_transversals() -> (LatinSquare, Vec<Transversal>) {
    let square = LatinSquare::from_rows(vec![
        vec![3, 5, 1, 0, 2, 4],
        vec![2, 1, 3, 5, 4, 0],
        vec![5, 0, 4, 2, 1, 3],
        vec![0, 3, 2, 4, 5, 1],
        vec![4, 2, 0, 1, 3, 5],
        vec![1, 4, 5, 3, 0, 2],
    ])
    .expect("embedded square is latin");
    let columns: [[u32; 6]; 4] = [
        [0, 3, 2, 5, 1, 4],
        [1, 5, 4, 2, 0, 3],
        [4, 2, 1, 3, 5, 0],
        [5, 1, 3, 0, 4, 2],
    ];
    let transversals: Vec<Transversal> = columns
        .iter()
        .map(|cols| Transversal::new((0..6).map(|r| (r, cols[r as usize])).collect()))
        .collect();
    for (i, t) in transversals.iter().enumerate() {
        assert!(
            t.is_transversal_of(&square),
            "embedded transversal {i} is invalid"
        );
        for u in &transversals[i + 1..] {
            assert!(t.is_disjoint_from(u), "embedded transversals overlap");
        }
    }
    (square, transversals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::verify;

    fn brute_force_orthogonal(a: &LatinSquare, b: &LatinSquare) -> bool {
        let w = a.order();
        let mut pairs = Vec::new();
        for r in 0..w {
            for c in 0..w {
                pairs.push((a.get(r, c), b.get(r, c)));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        pairs.len() == w * w
    }

    #[test]
    fn rejects_non_latin() {
        assert!(matches!(
            LatinSquare::from_rows(vec![vec![0, 1], vec![0, 1]]),
            Err(LatinError::NotLatin { row: 1, col: 0, .. })
        ));
        assert!(LatinSquare::from_rows(vec![vec![0, 2], vec![2, 0]]).is_err());
    }

    #[test]
    fn gf4_three_mols() {
        let fam = gf_mols(4, 3).unwrap();
        assert_eq!(fam.len(), 3);
        for (i, a) in fam.squares().iter().enumerate() {
            for b in &fam.squares()[i + 1..] {
                assert!(brute_force_orthogonal(a, b));
            }
        }
    }

    #[test]
    fn gf5_single_square_is_cyclic() {
        let fam = gf_mols(5, 1).unwrap();
        assert_eq!(fam.squares()[0], LatinSquare::cyclic(5));
    }

    #[test]
    fn gf9_four_mols() {
        let fam = gf_mols(9, 4).unwrap();
        assert_eq!(fam.len(), 4);
        assert!(fam.squares()[0].is_orthogonal_to(&fam.squares()[3]));
    }

    #[test]
    fn gf_mols_argument_errors() {
        assert!(matches!(gf_mols(6, 2), Err(LatinError::Field(_))));
        assert!(matches!(gf_mols(5, 5), Err(LatinError::CountOutOfRange { .. })));
        assert!(matches!(gf_mols(5, 0), Err(LatinError::CountOutOfRange { .. })));
    }

    #[test]
    fn classic_pair_transversals() {
        let (l1, l2) = classic_order4_pair();
        assert!(brute_force_orthogonal(&l1, &l2));
        let ts = transversals_from_mate(&l1, &l2, 3).unwrap();
        // printed 1-based: T1 = (1,1),(2,4),(3,2),(4,3) etc.
        let printed: [[(u32, u32); 4]; 3] = [
            [(1, 1), (2, 4), (3, 2), (4, 3)],
            [(1, 3), (2, 2), (3, 4), (4, 1)],
            [(1, 4), (2, 1), (3, 3), (4, 2)],
        ];
        for (t, p) in ts.iter().zip(printed) {
            let zero: Vec<_> = p.iter().map(|&(r, c)| (r - 1, c - 1)).collect();
            assert_eq!(t.cells(), &zero[..]);
        }
    }

    #[test]
    fn self_mate_rejected() {
        let (l1, _) = classic_order4_pair();
        assert!(matches!(
            transversals_from_mate(&l1, &l1, 3),
            Err(LatinError::NotOrthogonal { .. })
        ));
    }

    #[test]
    fn cyclic_order3_diagonals_give_pdp9() {
        let sq = LatinSquare::cyclic(3);
        // broken diagonals c = r + j: symbols 2r + j, distinct mod 3
        let ts: Vec<_> = (0..3u32)
            .map(|j| Transversal::new((0..3).map(|r| (r, (r + j) % 3)).collect()))
            .collect();
        let s = pdp_from_transversals(&[sq], &ts).unwrap();
        assert_eq!((s.k, s.v), (3, 9));
        assert!(verify(&s).unwrap().is_valid());
    }

    #[test]
    fn order6_embedded_square_gives_pdp18() {
        let (sq, ts) = order6_with_four_transversals();
        assert_eq!(ts.len(), 4);
        let s = pdp_from_transversals(std::slice::from_ref(&sq), &ts[..3]).unwrap();
        assert_eq!(s.v, 18);
        assert!(verify(&s).unwrap().is_valid());
        // any three of the four work
        let s = pdp_from_transversals(&[sq], &ts[1..]).unwrap();
        assert!(verify(&s).unwrap().is_valid());
    }

    #[test]
    fn transversal_errors() {
        let (sq, ts) = order6_with_four_transversals();
        assert!(matches!(
            pdp_from_transversals(std::slice::from_ref(&sq), &ts[..2]),
            Err(LatinError::WrongTransversalCount { found: 2, .. })
        ));
        let dup = [ts[0].clone(), ts[0].clone(), ts[1].clone()];
        assert!(matches!(
            pdp_from_transversals(std::slice::from_ref(&sq), &dup),
            Err(LatinError::NotDisjoint(0, 1))
        ));
        let rowline = Transversal::new((0..6).map(|c| (0, c)).collect());
        let bad = [rowline, ts[1].clone(), ts[2].clone()];
        assert!(matches!(
            pdp_from_transversals(&[sq], &bad),
            Err(LatinError::NotTransversal { index: 0, .. })
        ));
    }

    #[test]
    fn via_mols_examples() {
        for (k, w) in [(4, 4), (4, 9), (5, 8), (3, 4), (5, 9), (5, 16), (3, 7)] {
            let s = pdp_via_mols(k, w).unwrap();
            assert_eq!((s.k, s.v), (k, k * w));
            let r = verify(&s).unwrap();
            assert!(r.is_valid(), "({k},{w}): {:?}", r.violations);
        }
        assert!(matches!(
            pdp_via_mols(5, 12),
            Err(LatinError::InsufficientMols { .. })
        ));
        assert!(pdp_via_mols(5, 4).is_err());
    }

    #[test]
    fn serde_round_trip_rechecks_latin_property() {
        let fam = gf_mols(5, 2).unwrap();
        let text = serde_json::to_string(&fam).unwrap();
        let back: MolsFamily = serde_json::from_str(&text).unwrap();
        assert_eq!(back, fam);
        assert!(serde_json::from_str::<LatinSquare>("[[0,1],[0,1]]").is_err());
    }
}
