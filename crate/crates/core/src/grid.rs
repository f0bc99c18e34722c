//! Subsets of the `[m] x [n]` integer grid, stored one bit-vector per row,
//! together with the checks that drive everything else: rectangle detection,
//! Gram-matrix column tests, the row-pair counting bound, and a verifier for
//! monochromatic rectangles in grid colorings.
//!
//! A *rectangle* is four points `(x, y)`, `(x+d1, y)`, `(x, y+d2)`,
//! `(x+d1, y+d2)` with `d1, d2 > 0`. Coordinates are 1-based in the public
//! API and in witnesses; internally everything is 0-based.

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GridError {
    #[error("grid dimensions must be at least 1 x 1")]
    ZeroDimension,
    #[error("point ({x},{y}) outside the {m} x {n} grid")]
    PointOutOfRange { x: usize, y: usize, m: usize, n: usize },
    #[error("malformed header: expected \"m n\" with decimal m, n")]
    MalformedHeader,
    #[error("expected {expected} rows, found {found}")]
    RowCountMismatch { expected: usize, found: usize },
    #[error("row {row} has length {found}, expected {expected}")]
    RowLengthMismatch { row: usize, expected: usize, found: usize },
    #[error("illegal character {ch:?} at row {row}, column {col}")]
    IllegalCharacter { row: usize, col: usize, ch: char },
    #[error("missing trailing newline")]
    MissingTrailingNewline,
    #[error("coloring has {found} cells, expected {expected}")]
    CellCountMismatch { expected: usize, found: usize },
    #[error("color {color} at ({x},{y}) outside 1..={color_count}")]
    ColorOutOfRange { x: usize, y: usize, color: u32, color_count: u32 },
    #[error("color {0} is never used (colorings must be surjective)")]
    ColorUnused(u32),
}

/// A witness that a set contains a rectangle: the four points
/// `(x, y)`, `(x+d1, y)`, `(x, y+d2)`, `(x+d1, y+d2)` are all in the set.
/// `x`, `y` are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct RectangleWitness {
    pub x: usize,
    pub y: usize,
    pub d1: usize,
    pub d2: usize,
}

impl RectangleWitness {
    /// The four corners, 1-based.
    pub fn corners(&self) -> [(usize, usize); 4] {
        [
            (self.x, self.y),
            (self.x + self.d1, self.y),
            (self.x, self.y + self.d2),
            (self.x + self.d1, self.y + self.d2),
        ]
    }
}

/// An immutable subset of `[m] x [n]`, one bit per cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridSet {
    m: usize,
    n: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

#[derive(Serialize)]
pub(crate) struct GridJson {
    m: usize,
    n: usize,
    points: Vec<[usize; 2]>,
}

impl GridSet {
    pub fn empty(m: usize, n: usize) -> Result<GridSet, GridError> {
        if m == 0 || n == 0 {
            return Err(GridError::ZeroDimension);
        }
        let words_per_row = n.div_ceil(64);
        Ok(GridSet {
            m,
            n,
            words_per_row,
            bits: vec![0; m * words_per_row],
        })
    }

    pub fn full(m: usize, n: usize) -> Result<GridSet, GridError> {
        let mut g = GridSet::empty(m, n)?;
        for i in 0..m {
            for j in 0..n {
                g.set_raw(i, j);
            }
        }
        Ok(g)
    }

    /// Builds a set from 1-based points.
    pub fn from_points(m: usize, n: usize, points: &[(usize, usize)]) -> Result<GridSet, GridError> {
        let mut g = GridSet::empty(m, n)?;
        for &(x, y) in points {
            if x < 1 || x > m || y < 1 || y > n {
                return Err(GridError::PointOutOfRange { x, y, m, n });
            }
            g.set_raw(x - 1, y - 1);
        }
        Ok(g)
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    /// Membership test with 1-based coordinates.
    ///
    /// # Panics
    /// Panics if the point is outside the grid.
    pub fn contains(&self, x: usize, y: usize) -> bool {
        assert!(x >= 1 && x <= self.m && y >= 1 && y <= self.n);
        self.get_raw(x - 1, y - 1)
    }

    /// A copy with the 1-based point added.
    pub fn with_point(&self, x: usize, y: usize) -> Result<GridSet, GridError> {
        if x < 1 || x > self.m || y < 1 || y > self.n {
            return Err(GridError::PointOutOfRange { x, y, m: self.m, n: self.n });
        }
        let mut g = self.clone();
        g.set_raw(x - 1, y - 1);
        Ok(g)
    }

    /// A copy with the 1-based point removed.
    pub fn without_point(&self, x: usize, y: usize) -> Result<GridSet, GridError> {
        if x < 1 || x > self.m || y < 1 || y > self.n {
            return Err(GridError::PointOutOfRange { x, y, m: self.m, n: self.n });
        }
        let mut g = self.clone();
        let w = (x - 1) * g.words_per_row + (y - 1) / 64;
        g.bits[w] &= !(1u64 << ((y - 1) % 64));
        Ok(g)
    }

    /// Number of points in the set (the trace of the Gram matrix).
    pub fn popcount(&self) -> u64 {
        self.bits.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// All points, 1-based, sorted lexicographically.
    pub fn points(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::with_capacity(self.popcount() as usize);
        for i in 0..self.m {
            for j in 0..self.n {
                if self.get_raw(i, j) {
                    out.push((i + 1, j + 1));
                }
            }
        }
        out
    }

    /// The transposed grid (rows and columns exchanged).
    pub fn transposed(&self) -> GridSet {
        let mut g = GridSet::empty(self.n, self.m).expect("dimensions stay positive");
        for i in 0..self.m {
            for j in 0..self.n {
                if self.get_raw(i, j) {
                    g.set_raw(j, i);
                }
            }
        }
        g
    }

    /// Finds the lexicographically least rectangle witness, ordered by
    /// `(x, y, d1, d2)`, or `None` if the set is rectangle-free.
    ///
    /// Pairwise row conjunction: rows `x` and `x + d1` span a rectangle
    /// exactly when they share at least two columns.
    pub fn find_rectangle(&self) -> Option<RectangleWitness> {
        for x in 0..self.m {
            // (y, d1, d2), 0-based y; tuple order is the witness order
            let mut best: Option<(usize, usize, usize)> = None;
            for d1 in 1..self.m - x {
                if let Some((c1, c2)) = first_two_common(self.row_words(x), self.row_words(x + d1))
                {
                    let cand = (c1, d1, c2 - c1);
                    if best.is_none_or(|b| cand < b) {
                        best = Some(cand);
                    }
                }
            }
            if let Some((y, d1, d2)) = best {
                return Some(RectangleWitness { x: x + 1, y: y + 1, d1, d2 });
            }
        }
        None
    }

    pub fn is_rectangle_free(&self) -> bool {
        self.find_rectangle().is_none()
    }

    /// Largest off-diagonal entry of the Gram matrix: the maximum number of
    /// rows shared by two distinct columns. At most 1 exactly when the set is
    /// rectangle-free.
    pub fn gram_offdiag_max(&self) -> u64 {
        if self.n < 2 {
            return 0;
        }
        let cols = self.transposed();
        let mut max = 0u64;
        for j in 0..self.n {
            for j2 in j + 1..self.n {
                let common: u64 = cols
                    .row_words(j)
                    .iter()
                    .zip(cols.row_words(j2))
                    .map(|(&a, &b)| (a & b).count_ones() as u64)
                    .sum();
                max = max.max(common);
            }
        }
        max
    }

    /// The counting bound behind the pigeonhole argument: a rectangle-free
    /// set satisfies `sum_i C(a_i, 2) <= C(n, 2)` where `a_i` is the number
    /// of points in row `i`.
    pub fn pair_count_bound(&self) -> PairCountBound {
        let row_pair_total: u64 = (0..self.m)
            .map(|i| {
                let a: u64 = self.row_words(i).iter().map(|w| w.count_ones() as u64).sum();
                a * a.saturating_sub(1) / 2
            })
            .sum();
        let n = self.n as u64;
        let column_pair_count = n * (n - 1) / 2;
        PairCountBound {
            holds: row_pair_total <= column_pair_count,
            row_pair_total,
            column_pair_count,
        }
    }

    /// JSON export: `{"m":…,"n":…,"points":[[x,y],…]}` with 1-based points
    /// sorted lexicographically.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.json_dto()).expect("grid JSON serialization")
    }

    pub(crate) fn json_dto(&self) -> GridJson {
        GridJson {
            m: self.m,
            n: self.n,
            points: self.points().iter().map(|&(x, y)| [x, y]).collect(),
        }
    }

    pub(crate) fn get_raw(&self, i: usize, j: usize) -> bool {
        self.bits[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    pub(crate) fn set_raw(&mut self, i: usize, j: usize) {
        self.bits[i * self.words_per_row + j / 64] |= 1u64 << (j % 64);
    }

    pub(crate) fn toggle_raw(&mut self, i: usize, j: usize) {
        self.bits[i * self.words_per_row + j / 64] ^= 1u64 << (j % 64);
    }

    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row]
    }
}

/// First two set bits of `a AND b`, if there are at least two.
fn first_two_common(a: &[u64], b: &[u64]) -> Option<(usize, usize)> {
    let mut first = None;
    for (w, (&x, &y)) in a.iter().zip(b).enumerate() {
        let mut word = x & y;
        while word != 0 {
            let bit = w * 64 + word.trailing_zeros() as usize;
            match first {
                None => first = Some(bit),
                Some(f) => return Some((f, bit)),
            }
            word &= word - 1;
        }
    }
    None
}

/// Result of the row-pair counting check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCountBound {
    pub holds: bool,
    pub row_pair_total: u64,
    pub column_pair_count: u64,
}

/// Reads a grid from the text format: header line `"m n"`, then `m` rows of
/// exactly `n` characters from `{'0','1'}`, each line LF-terminated.
pub fn read_gridset(bytes: &[u8]) -> Result<GridSet, GridError> {
    let mut segments = bytes.split(|&b| b == b'\n');
    let header = segments.next().unwrap_or_default();
    let header = std::str::from_utf8(header).map_err(|_| GridError::MalformedHeader)?;
    let (ms, ns) = header.split_once(' ').ok_or(GridError::MalformedHeader)?;
    let decimal =
        |s: &str| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit());
    if !decimal(ms) || !decimal(ns) {
        return Err(GridError::MalformedHeader);
    }
    let m: usize = ms.parse().map_err(|_| GridError::MalformedHeader)?;
    let n: usize = ns.parse().map_err(|_| GridError::MalformedHeader)?;
    if m == 0 || n == 0 {
        return Err(GridError::ZeroDimension);
    }

    let rest: Vec<&[u8]> = segments.collect();
    match rest.last() {
        Some(&[]) => {}
        _ => return Err(GridError::MissingTrailingNewline),
    }
    let rows = &rest[..rest.len() - 1];
    if rows.len() != m {
        return Err(GridError::RowCountMismatch { expected: m, found: rows.len() });
    }

    for (i, row) in rows.iter().enumerate() {
        if row.len() != n {
            return Err(GridError::RowLengthMismatch {
                row: i + 1,
                expected: n,
                found: row.len(),
            });
        }
    }

    let mut g = GridSet::empty(m, n)?;
    for (i, row) in rows.iter().enumerate() {
        for (j, &b) in row.iter().enumerate() {
            match b {
                b'0' => {}
                b'1' => g.set_raw(i, j),
                other => {
                    return Err(GridError::IllegalCharacter {
                        row: i + 1,
                        col: j + 1,
                        ch: other as char,
                    })
                }
            }
        }
    }
    Ok(g)
}

/// Writes the text format read by [`read_gridset`]. Round-trips exactly.
pub fn write_gridset(g: &GridSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(g.m * (g.n + 1) + 16);
    out.extend_from_slice(format!("{} {}\n", g.m, g.n).as_bytes());
    for i in 0..g.m {
        for j in 0..g.n {
            out.push(if g.get_raw(i, j) { b'1' } else { b'0' });
        }
        out.push(b'\n');
    }
    out
}

/// A surjective coloring of `[m] x [n]` with colors `1..=c`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Coloring {
    m: usize,
    n: usize,
    color_count: u32,
    cells: Vec<u32>,
}

impl Coloring {
    /// `cells` is row-major, length `m * n`, values in `1..=color_count`,
    /// with every color used at least once.
    pub fn new(m: usize, n: usize, color_count: u32, cells: Vec<u32>) -> Result<Coloring, GridError> {
        if m == 0 || n == 0 {
            return Err(GridError::ZeroDimension);
        }
        if cells.len() != m * n {
            return Err(GridError::CellCountMismatch { expected: m * n, found: cells.len() });
        }
        let mut used = vec![false; color_count as usize];
        for (idx, &c) in cells.iter().enumerate() {
            if c < 1 || c > color_count {
                return Err(GridError::ColorOutOfRange {
                    x: idx / n + 1,
                    y: idx % n + 1,
                    color: c,
                    color_count,
                });
            }
            used[(c - 1) as usize] = true;
        }
        if let Some(missing) = used.iter().position(|&u| !u) {
            return Err(GridError::ColorUnused(missing as u32 + 1));
        }
        Ok(Coloring { m, n, color_count, cells })
    }

    pub fn rows(&self) -> usize {
        self.m
    }

    pub fn cols(&self) -> usize {
        self.n
    }

    pub fn color_count(&self) -> u32 {
        self.color_count
    }

    /// Color of the 1-based cell.
    pub fn color_at(&self, x: usize, y: usize) -> u32 {
        assert!(x >= 1 && x <= self.m && y >= 1 && y <= self.n);
        self.cells[(x - 1) * self.n + (y - 1)]
    }

    /// The cells of one color as a grid set.
    pub fn color_class(&self, color: u32) -> GridSet {
        let mut g = GridSet::empty(self.m, self.n).expect("coloring dimensions are positive");
        for (idx, &c) in self.cells.iter().enumerate() {
            if c == color {
                g.set_raw(idx / self.n, idx % self.n);
            }
        }
        g
    }

    /// First monochromatic rectangle: scans color classes in increasing
    /// color order, taking the lexicographically least witness within each.
    pub fn monochromatic_rectangle(&self) -> Option<(u32, RectangleWitness)> {
        (1..=self.color_count)
            .find_map(|c| self.color_class(c).find_rectangle().map(|w| (c, w)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_two_by_two_has_unit_witness() {
        let g = GridSet::full(2, 2).unwrap();
        assert_eq!(
            g.find_rectangle(),
            Some(RectangleWitness { x: 1, y: 1, d1: 1, d2: 1 })
        );
        assert_eq!(g.gram_offdiag_max(), 2);
    }

    #[test]
    fn three_points_no_rectangle() {
        let g = GridSet::from_points(2, 2, &[(1, 1), (1, 2), (2, 1)]).unwrap();
        assert_eq!(g.find_rectangle(), None);
        assert!(g.is_rectangle_free());
    }

    #[test]
    fn degenerate_grids_are_rectangle_free() {
        assert!(GridSet::full(1, 5).unwrap().is_rectangle_free());
        assert!(GridSet::full(7, 1).unwrap().is_rectangle_free());
        assert_eq!(GridSet::full(1, 5).unwrap().gram_offdiag_max(), 1);
    }

    #[test]
    fn witness_is_lexicographically_least() {
        // rows 1 and 3 share columns {1,2}; rows 1 and 2 share columns {4,5}.
        // y is compared before d1, so (1,1,2,1) beats (1,4,1,1).
        let g = GridSet::from_points(
            3,
            5,
            &[(1, 1), (1, 2), (1, 4), (1, 5), (2, 4), (2, 5), (3, 1), (3, 2)],
        )
        .unwrap();
        assert_eq!(
            g.find_rectangle(),
            Some(RectangleWitness { x: 1, y: 1, d1: 2, d2: 1 })
        );

        // same x and y: smaller d1 wins
        let g = GridSet::from_points(3, 2, &[(1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2)])
            .unwrap();
        assert_eq!(
            g.find_rectangle(),
            Some(RectangleWitness { x: 1, y: 1, d1: 1, d2: 1 })
        );
    }

    #[test]
    fn witness_corners_are_members() {
        let g = GridSet::from_points(4, 4, &[(2, 2), (2, 4), (4, 2), (4, 4), (1, 1)]).unwrap();
        let w = g.find_rectangle().unwrap();
        assert_eq!(w, RectangleWitness { x: 2, y: 2, d1: 2, d2: 2 });
        for (x, y) in w.corners() {
            assert!(g.contains(x, y));
        }
    }

    #[test]
    fn gram_trivia() {
        assert_eq!(GridSet::empty(3, 3).unwrap().gram_offdiag_max(), 0);
        assert_eq!(GridSet::full(2, 2).unwrap().gram_offdiag_max(), 2);
    }

    #[test]
    fn pair_count_bound_cases() {
        let full = GridSet::full(3, 3).unwrap();
        let b = full.pair_count_bound();
        assert!(!b.holds);
        assert_eq!(b.row_pair_total, 9);
        assert_eq!(b.column_pair_count, 3);

        let empty = GridSet::empty(4, 4).unwrap();
        let b = empty.pair_count_bound();
        assert!(b.holds);
        assert_eq!(b.row_pair_total, 0);
    }

    #[test]
    fn popcount_matches_points() {
        let g = GridSet::from_points(3, 4, &[(1, 1), (2, 3), (3, 4), (1, 4)]).unwrap();
        assert_eq!(g.popcount(), 4);
        assert_eq!(g.points(), vec![(1, 1), (1, 4), (2, 3), (3, 4)]);
    }

    #[test]
    fn out_of_range_points_rejected() {
        let err = GridSet::from_points(2, 2, &[(3, 1)]).unwrap_err();
        assert_eq!(err, GridError::PointOutOfRange { x: 3, y: 1, m: 2, n: 2 });
        assert_eq!(GridSet::empty(0, 4).unwrap_err(), GridError::ZeroDimension);
    }

    #[test]
    fn file_roundtrip() {
        let g = GridSet::from_points(2, 3, &[(1, 2), (2, 1), (2, 3)]).unwrap();
        let bytes = write_gridset(&g);
        assert_eq!(bytes, b"2 3\n010\n101\n");
        assert_eq!(read_gridset(&bytes).unwrap(), g);
    }

    #[test]
    fn file_format_errors() {
        assert_eq!(read_gridset(b"2\n00\n00\n").unwrap_err(), GridError::MalformedHeader);
        assert_eq!(read_gridset(b"a b\n").unwrap_err(), GridError::MalformedHeader);
        assert_eq!(read_gridset(b"2  3\n").unwrap_err(), GridError::MalformedHeader);
        assert_eq!(read_gridset(b"0 3\nx\n").unwrap_err(), GridError::ZeroDimension);
        assert_eq!(
            read_gridset(b"2 3\n01\n000\n").unwrap_err(),
            GridError::RowLengthMismatch { row: 1, expected: 3, found: 2 }
        );
        assert_eq!(
            read_gridset(b"2 3\n012\n000\n").unwrap_err(),
            GridError::IllegalCharacter { row: 1, col: 3, ch: '2' }
        );
        assert_eq!(
            read_gridset(b"2 2\n00\n00\n11\n").unwrap_err(),
            GridError::RowCountMismatch { expected: 2, found: 3 }
        );
        assert_eq!(
            read_gridset(b"2 2\n00\n00").unwrap_err(),
            GridError::MissingTrailingNewline
        );
    }

    #[test]
    fn json_export() {
        let g = GridSet::from_points(2, 3, &[(2, 1), (1, 2)]).unwrap();
        assert_eq!(g.to_json(), r#"{"m":2,"n":3,"points":[[1,2],[2,1]]}"#);
    }

    #[test]
    fn single_color_coloring_finds_rectangle() {
        let c = Coloring::new(2, 2, 1, vec![1, 1, 1, 1]).unwrap();
        assert_eq!(
            c.monochromatic_rectangle(),
            Some((1, RectangleWitness { x: 1, y: 1, d1: 1, d2: 1 }))
        );
    }

    #[test]
    fn checkerboard_two_by_three_is_clean() {
        // parity coloring of [2] x [3]
        let mut cells = Vec::new();
        for x in 0..2 {
            for y in 0..3 {
                cells.push(if (x + y) % 2 == 0 { 1 } else { 2 });
            }
        }
        let c = Coloring::new(2, 3, 2, cells).unwrap();
        assert_eq!(c.monochromatic_rectangle(), None);

        // brute-force confirmation over both classes
        for color in 1..=2 {
            assert!(c.color_class(color).is_rectangle_free());
        }
    }

    #[test]
    fn coloring_validation() {
        assert_eq!(
            Coloring::new(2, 2, 2, vec![1, 1, 1]).unwrap_err(),
            GridError::CellCountMismatch { expected: 4, found: 3 }
        );
        assert_eq!(
            Coloring::new(2, 2, 2, vec![1, 3, 1, 2]).unwrap_err(),
            GridError::ColorOutOfRange { x: 1, y: 2, color: 3, color_count: 2 }
        );
        assert_eq!(
            Coloring::new(2, 2, 3, vec![1, 2, 1, 2]).unwrap_err(),
            GridError::ColorUnused(3)
        );
    }

    #[test]
    fn with_and_without_point() {
        let g = GridSet::empty(2, 2).unwrap();
        let g2 = g.with_point(1, 2).unwrap();
        assert!(g2.contains(1, 2));
        assert_eq!(g2.without_point(1, 2).unwrap(), g);
        assert!(g.with_point(5, 1).is_err());
    }

    #[test]
    fn transpose_involution() {
        let g = GridSet::from_points(2, 4, &[(1, 4), (2, 2)]).unwrap();
        let t = g.transposed();
        assert_eq!(t.rows(), 4);
        assert!(t.contains(4, 1));
        assert_eq!(t.transposed(), g);
    }
}
