//! Exact computation of the maximum rectangle-free subset of `[m] x [n]` by
//! branch and bound, plus a brute-force oracle for cross-validation.
//! `f(m, n)` is the maximum plus one.
//!
//! The search walks the grid row by row, choosing a column subset per row.
//! Rectangle-freeness is equivalent to no column pair being used by two
//! rows, so the search state is a per-column bitmask of already-paired
//! columns; a candidate column conflicts exactly when its mask intersects
//! the columns already chosen in the current row. Committing a row XORs its
//! pair contributions in, and backtracking XORs them out again.
//!
//! Pruning uses the counting relaxation: a row with `a` points consumes
//! `C(a, 2)` of the `C(n, 2)` column pairs, the pair sets are disjoint
//! across rows, and for a fixed pair budget the total point count is
//! maximized by spreading row sizes evenly. When that optimum cannot beat
//! the incumbent the node dies.

use std::sync::atomic::{AtomicBool, AtomicU64, AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::grid::{GridJson, GridSet, RectangleWitness};

/// Default cap on `m * n` for [`max_rectfree`].
pub const DEFAULT_CELL_CEILING: usize = 400;

/// Cap on `m * n` for [`brute_force_oracle`].
pub const ORACLE_CELL_CEILING: usize = 25;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolveError {
    #[error("grid dimensions must be positive")]
    NonPositiveDimension,
    #[error("{cells} cells exceed the ceiling of {ceiling}")]
    CeilingExceeded { cells: usize, ceiling: usize },
    #[error("a side of {side} columns exceeds the implementation limit of {max}")]
    SideTooLarge { side: usize, max: usize },
    #[error("worker_count must be at least 1")]
    ZeroWorkers,
}

/// Knobs for [`max_rectfree`].
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Wall-clock budget. `None` runs to optimality.
    pub time_limit: Option<Duration>,
    /// Restrict to non-increasing row sizes with the first row a column
    /// prefix. Valid because row and column permutations preserve
    /// rectangle-freeness; toggleable so tests can check invariance.
    pub symmetry_breaking: bool,
    /// Worker threads. The maximum is identical for every worker count; the
    /// witness is canonical only for a single worker.
    pub worker_count: usize,
    /// Attach a witness grid to the result.
    pub report_witness: bool,
    /// Cap on `m * n`.
    pub cell_ceiling: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            time_limit: None,
            symmetry_breaking: true,
            worker_count: 1,
            report_witness: true,
            cell_ceiling: DEFAULT_CELL_CEILING,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    /// `max_size` is exactly the maximum rectangle-free size.
    Optimal,
    /// The time limit struck; `max_size` is only a lower bound.
    TimedOut,
}

#[derive(Debug, Clone)]
pub struct SolveResult {
    pub m: usize,
    pub n: usize,
    /// Largest rectangle-free subset size found (exact when `Optimal`).
    pub max_size: u64,
    /// `max_size + 1`.
    pub f_value: u64,
    /// A rectangle-free set achieving `max_size`, when requested.
    pub witness: Option<GridSet>,
    pub nodes_expanded: u64,
    pub status: SolveStatus,
}

#[derive(Serialize)]
struct SolveJson {
    m: usize,
    n: usize,
    max_size: u64,
    f: u64,
    status: &'static str,
    nodes: u64,
    witness: Option<GridJson>,
}

impl SolveResult {
    /// JSON: `{"m","n","max_size","f","status","nodes","witness":grid|null}`.
    pub fn to_json(&self) -> String {
        let dto = SolveJson {
            m: self.m,
            n: self.n,
            max_size: self.max_size,
            f: self.f_value,
            status: match self.status {
                SolveStatus::Optimal => "optimal",
                SolveStatus::TimedOut => "timed-out",
            },
            nodes: self.nodes_expanded,
            witness: self.witness.as_ref().map(|g| g.json_dto()),
        };
        serde_json::to_string(&dto).expect("solve result serialization")
    }
}

const fn choose2(a: usize) -> usize {
    a * a.saturating_sub(1) / 2
}

/// Largest achievable point total over `rows_left` more rows of at most
/// `cap` points each, given `budget` unused column pairs. Convexity of
/// C(a, 2) makes the even spread optimal.
fn optimistic(rows_left: usize, cap: usize, budget: usize) -> usize {
    if rows_left == 0 || cap == 0 {
        return 0;
    }
    let mut h = 0;
    while h < cap && rows_left * choose2(h + 1) <= budget {
        h += 1;
    }
    if h == cap {
        return rows_left * cap;
    }
    // raise some rows from h to h + 1; each costs h pairs
    let leftover = budget - rows_left * choose2(h);
    let extra = (leftover / h).min(rows_left);
    rows_left * h + extra
}

struct Best {
    size: usize,
    masks: Vec<u64>,
}

struct Shared {
    incumbent: AtomicUsize,
    best: Mutex<Best>,
    nodes: AtomicU64,
    stop: AtomicBool,
    next_task: AtomicUsize,
    deadline: Option<Instant>,
}

struct Worker<'s> {
    rows: usize,
    cols: usize,
    symmetry: bool,
    shared: &'s Shared,
    /// `adj[c]` = columns already paired with `c` by committed rows.
    adj: Vec<u64>,
    row_masks: Vec<u64>,
    free_pairs: usize,
    local_nodes: u64,
    ticks: u32,
}

impl<'s> Worker<'s> {
    fn new(rows: usize, cols: usize, symmetry: bool, shared: &'s Shared) -> Self {
        Worker {
            rows,
            cols,
            symmetry,
            shared,
            adj: vec![0; cols],
            row_masks: vec![0; rows],
            free_pairs: choose2(cols),
            local_nodes: 0,
            ticks: 0,
        }
    }

    fn run(&mut self, tasks: &[u64]) {
        loop {
            if self.deadline_hit() {
                break;
            }
            let t = self.shared.next_task.fetch_add(1, Ordering::Relaxed);
            if t >= tasks.len() {
                break;
            }
            let mask = tasks[t];
            let a = mask.count_ones() as usize;
            let cap_after = if self.symmetry { a } else { self.cols };
            let bound = a + optimistic(self.rows - 1, cap_after, self.free_pairs - choose2(a));
            if bound <= self.shared.incumbent.load(Ordering::Relaxed) {
                continue;
            }
            self.commit_and_descend(0, 0, mask);
        }
        self.shared
            .nodes
            .fetch_add(self.local_nodes, Ordering::Relaxed);
    }

    fn deadline_hit(&self) -> bool {
        if self.shared.stop.load(Ordering::Relaxed) {
            return true;
        }
        if let Some(deadline) = self.shared.deadline {
            if Instant::now() >= deadline {
                self.shared.stop.store(true, Ordering::Relaxed);
                return true;
            }
        }
        false
    }

    fn should_stop(&mut self) -> bool {
        self.ticks = self.ticks.wrapping_add(1);
        if self.ticks & 0x3ff == 0 && self.shared.deadline.is_some() {
            return self.deadline_hit();
        }
        self.shared.stop.load(Ordering::Relaxed)
    }

    fn descend(&mut self, row: usize, size: usize, prev_card: usize) {
        if row == self.rows || self.should_stop() {
            return;
        }
        let cap = if self.symmetry { prev_card } else { self.cols };
        let incumbent = self.shared.incumbent.load(Ordering::Relaxed);
        if size + optimistic(self.rows - row, cap, self.free_pairs) <= incumbent {
            return;
        }
        for a in (0..=cap).rev() {
            if choose2(a) > self.free_pairs {
                continue;
            }
            let cap_after = if self.symmetry { a } else { self.cols };
            let bound = size
                + a
                + optimistic(self.rows - row - 1, cap_after, self.free_pairs - choose2(a));
            if bound <= self.shared.incumbent.load(Ordering::Relaxed) {
                continue;
            }
            if a == 0 {
                self.commit_and_descend(row, size, 0);
            } else {
                self.pick_columns(row, size, a, 0, 0);
            }
        }
    }

    /// Enumerates conflict-free column subsets of the given cardinality in
    /// combination order, committing each.
    fn pick_columns(&mut self, row: usize, size: usize, left: usize, start: usize, mask: u64) {
        if left == 0 {
            self.commit_and_descend(row, size, mask);
            return;
        }
        if self.shared.stop.load(Ordering::Relaxed) {
            return;
        }
        for c in start..=self.cols - left {
            if self.adj[c] & mask != 0 {
                continue;
            }
            self.pick_columns(row, size, left - 1, c + 1, mask | 1 << c);
        }
    }

    fn commit_and_descend(&mut self, row: usize, size: usize, mask: u64) {
        let a = mask.count_ones() as usize;
        self.apply(mask);
        self.row_masks[row] = mask;
        self.local_nodes += 1;
        let new_size = size + a;
        self.maybe_record(row, new_size);
        self.descend(row + 1, new_size, a);
        self.row_masks[row] = 0;
        self.unapply(mask);
    }

    fn apply(&mut self, mask: u64) {
        let mut rest = mask;
        while rest != 0 {
            let c = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.adj[c] ^= mask & !(1u64 << c);
        }
        self.free_pairs -= choose2(mask.count_ones() as usize);
    }

    fn unapply(&mut self, mask: u64) {
        let mut rest = mask;
        while rest != 0 {
            let c = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            self.adj[c] ^= mask & !(1u64 << c);
        }
        self.free_pairs += choose2(mask.count_ones() as usize);
    }

    /// Any committed prefix is a complete rectangle-free set (remaining rows
    /// empty), so improvements are recorded immediately.
    fn maybe_record(&mut self, row: usize, size: usize) {
        if size <= self.shared.incumbent.load(Ordering::Relaxed) {
            return;
        }
        let mut best = self.shared.best.lock().expect("incumbent lock");
        if size > best.size {
            best.size = size;
            best.masks.clear();
            best.masks.extend_from_slice(&self.row_masks[..=row]);
            best.masks.resize(self.rows, 0);
            self.shared.incumbent.store(size, Ordering::Relaxed);
        }
    }
}

fn row0_tasks(cols: usize, symmetry: bool) -> Vec<u64> {
    if symmetry {
        // first row is a column prefix
        (0..=cols).rev().map(|a| (1u64 << a) - 1).collect()
    } else {
        let mut out = Vec::new();
        for a in (0..=cols).rev() {
            combinations(cols, a, 0, 0, &mut out);
        }
        out
    }
}

fn combinations(cols: usize, left: usize, start: usize, mask: u64, out: &mut Vec<u64>) {
    if left == 0 {
        out.push(mask);
        return;
    }
    for c in start..=cols - left {
        combinations(cols, left - 1, c + 1, mask | 1 << c, out);
    }
}

fn grid_from_masks(rows: usize, cols: usize, masks: &[u64]) -> GridSet {
    let mut g = GridSet::empty(rows, cols).expect("solver dimensions are positive");
    for (i, &mask) in masks.iter().enumerate() {
        let mut rest = mask;
        while rest != 0 {
            let c = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            g.set_raw(i, c);
        }
    }
    g
}

/// Exact maximum rectangle-free subset size of `[m] x [n]`, with
/// `f(m, n) = max_size + 1`. Internally the smaller side becomes the column
/// axis (f is symmetric); witnesses are reported in the requested
/// orientation.
pub fn max_rectfree(m: usize, n: usize, cfg: &SearchConfig) -> Result<SolveResult, SolveError> {
    if m == 0 || n == 0 {
        return Err(SolveError::NonPositiveDimension);
    }
    if cfg.worker_count == 0 {
        return Err(SolveError::ZeroWorkers);
    }
    let cells = m.saturating_mul(n);
    if cells > cfg.cell_ceiling {
        return Err(SolveError::CeilingExceeded { cells, ceiling: cfg.cell_ceiling });
    }
    let transposed = n > m;
    let (rows, cols) = if transposed { (n, m) } else { (m, n) };
    if cols > 63 {
        return Err(SolveError::SideTooLarge { side: cols, max: 63 });
    }

    // warm start: a full first row plus one point per later row is always
    // rectangle-free
    let seed_size = cols + rows - 1;
    let mut seed_masks = vec![1u64; rows];
    seed_masks[0] = (1u64 << cols) - 1;

    let shared = Shared {
        incumbent: AtomicUsize::new(seed_size),
        best: Mutex::new(Best { size: seed_size, masks: seed_masks }),
        nodes: AtomicU64::new(0),
        stop: AtomicBool::new(false),
        next_task: AtomicUsize::new(0),
        deadline: cfg.time_limit.map(|limit| Instant::now() + limit),
    };
    let tasks = row0_tasks(cols, cfg.symmetry_breaking);

    let workers = cfg.worker_count.min(tasks.len()).max(1);
    if workers == 1 {
        Worker::new(rows, cols, cfg.symmetry_breaking, &shared).run(&tasks);
    } else {
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| {
                    Worker::new(rows, cols, cfg.symmetry_breaking, &shared).run(&tasks);
                });
            }
        });
    }

    let timed_out = shared.stop.load(Ordering::Relaxed);
    let nodes_expanded = shared.nodes.load(Ordering::Relaxed);
    let best = shared.best.into_inner().expect("search threads joined");
    let max_size = best.size as u64;

    let witness = cfg.report_witness.then(|| {
        let internal = grid_from_masks(rows, cols, &best.masks);
        let g = if transposed { internal.transposed() } else { internal };
        debug_assert!(g.is_rectangle_free());
        debug_assert_eq!(g.popcount(), max_size);
        g
    });

    Ok(SolveResult {
        m,
        n,
        max_size,
        f_value: max_size + 1,
        witness,
        nodes_expanded,
        status: if timed_out { SolveStatus::TimedOut } else { SolveStatus::Optimal },
    })
}

/// Maximum rectangle-free subset size by brute force, for cross-validating
/// the solver. Grids with a side of length 1 are closed-form; up to 20 cells
/// every subset is enumerated; beyond that a row DFS with only the pair-use
/// check runs to exhaustion.
pub fn brute_force_oracle(m: usize, n: usize) -> Result<u64, SolveError> {
    if m == 0 || n == 0 {
        return Err(SolveError::NonPositiveDimension);
    }
    let cells = m.saturating_mul(n);
    if cells > ORACLE_CELL_CEILING {
        return Err(SolveError::CeilingExceeded { cells, ceiling: ORACLE_CELL_CEILING });
    }
    if m == 1 || n == 1 {
        // a rectangle needs two distinct rows and two distinct columns
        return Ok(cells as u64);
    }
    let (rows, cols) = if m <= n { (m, n) } else { (n, m) };

    if cells <= 20 {
        let col_mask = (1u32 << cols) - 1;
        let mut best = 0u32;
        'subsets: for s in 0u32..1 << cells {
            if s.count_ones() <= best {
                continue;
            }
            for i in 0..rows {
                let ri = s >> (i * cols) & col_mask;
                for j in i + 1..rows {
                    let rj = s >> (j * cols) & col_mask;
                    if (ri & rj).count_ones() >= 2 {
                        continue 'subsets;
                    }
                }
            }
            best = s.count_ones();
        }
        return Ok(best as u64);
    }

    // row DFS; cols <= 12 here, so pair sets fit in u128
    let pair_index = |i: usize, j: usize| i * (2 * cols - i - 1) / 2 + (j - i - 1);
    let masks = 1usize << cols;
    let mut pairs_of = vec![0u128; masks];
    for (mask, slot) in pairs_of.iter_mut().enumerate() {
        let mut a = mask;
        while a != 0 {
            let i = a.trailing_zeros() as usize;
            a &= a - 1;
            let mut b = a;
            while b != 0 {
                let j = b.trailing_zeros() as usize;
                b &= b - 1;
                *slot |= 1u128 << pair_index(i, j);
            }
        }
    }

    struct Dfs<'a> {
        rows: usize,
        pairs_of: &'a [u128],
        best: u64,
    }
    impl Dfs<'_> {
        fn go(&mut self, row: usize, used: u128, count: u64) {
            if row == self.rows {
                self.best = self.best.max(count);
                return;
            }
            for (mask, &pairs) in self.pairs_of.iter().enumerate() {
                if pairs & used == 0 {
                    self.go(row + 1, used | pairs, count + mask.count_ones() as u64);
                }
            }
        }
    }
    let mut dfs = Dfs { rows, pairs_of: &pairs_of, best: 0 };
    dfs.go(0, 0, 0);
    Ok(dfs.best)
}

/// Report of the checks behind "this grid witnesses f >= claimed_f":
/// rectangle-freeness and the point count `claimed_f - 1`. Maximality is the
/// solver's job, not this function's.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtremalCheck {
    pub claimed_f: u64,
    pub actual_size: u64,
    pub size_matches: bool,
    /// A rectangle in the grid, if any; `None` means rectangle-free.
    pub rectangle: Option<RectangleWitness>,
}

impl ExtremalCheck {
    pub fn rectangle_free(&self) -> bool {
        self.rectangle.is_none()
    }

    pub fn passes(&self) -> bool {
        self.size_matches && self.rectangle.is_none()
    }
}

pub fn verify_extremal(g: &GridSet, claimed_f: u64) -> ExtremalCheck {
    let actual_size = g.popcount();
    ExtremalCheck {
        claimed_f,
        actual_size,
        size_matches: actual_size + 1 == claimed_f,
        rectangle: g.find_rectangle(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn solve(m: usize, n: usize) -> SolveResult {
        max_rectfree(m, n, &SearchConfig::default()).unwrap()
    }

    #[test]
    fn oracle_small_values() {
        assert_eq!(brute_force_oracle(2, 2).unwrap(), 3);
        assert_eq!(brute_force_oracle(2, 3).unwrap(), 4);
        assert_eq!(brute_force_oracle(3, 3).unwrap(), 6);
        assert_eq!(brute_force_oracle(1, 5).unwrap(), 5);
        assert_eq!(brute_force_oracle(5, 1).unwrap(), 5);
    }

    #[test]
    fn oracle_ceiling() {
        assert!(matches!(
            brute_force_oracle(6, 6).unwrap_err(),
            SolveError::CeilingExceeded { .. }
        ));
        assert_eq!(
            brute_force_oracle(0, 3).unwrap_err(),
            SolveError::NonPositiveDimension
        );
    }

    #[test]
    fn solver_tiny_grids() {
        let r = solve(2, 2);
        assert_eq!(r.max_size, 3);
        assert_eq!(r.f_value, 4);
        assert_eq!(r.status, SolveStatus::Optimal);
        let w = r.witness.unwrap();
        assert_eq!(w.popcount(), 3);
        assert!(w.is_rectangle_free());

        assert_eq!(solve(1, 1).max_size, 1);
        assert_eq!(solve(3, 3).max_size, 6);
        assert_eq!(solve(1, 9).max_size, 9);
    }

    #[test]
    fn solver_matches_oracle_on_small_sweep() {
        for m in 1..=3 {
            for n in m..=4 {
                let r = solve(m, n);
                let oracle = brute_force_oracle(m, n).unwrap();
                assert_eq!(r.max_size, oracle, "disagreement at ({m},{n})");
            }
        }
    }

    #[test]
    fn solver_symmetry_and_worker_invariance() {
        let expect = solve(4, 6).max_size;
        assert_eq!(expect, 12);
        for symmetry in [true, false] {
            for workers in [1, 2, 4] {
                let cfg = SearchConfig {
                    symmetry_breaking: symmetry,
                    worker_count: workers,
                    ..SearchConfig::default()
                };
                let r = max_rectfree(4, 6, &cfg).unwrap();
                assert_eq!(r.max_size, expect, "symmetry={symmetry} workers={workers}");
                assert_eq!(r.status, SolveStatus::Optimal);
            }
        }
        assert_eq!(solve(6, 4).max_size, expect);
    }

    #[test]
    fn solver_is_deterministic_single_threaded() {
        let a = solve(3, 5);
        let b = solve(3, 5);
        assert_eq!(a.max_size, b.max_size);
        assert_eq!(a.nodes_expanded, b.nodes_expanded);
        assert_eq!(a.witness, b.witness);
    }

    #[test]
    fn solver_ceiling_and_validation() {
        assert!(matches!(
            max_rectfree(30, 30, &SearchConfig::default()).unwrap_err(),
            SolveError::CeilingExceeded { .. }
        ));
        assert_eq!(
            max_rectfree(0, 3, &SearchConfig::default()).unwrap_err(),
            SolveError::NonPositiveDimension
        );
        let cfg = SearchConfig { worker_count: 0, ..SearchConfig::default() };
        assert_eq!(max_rectfree(2, 2, &cfg).unwrap_err(), SolveError::ZeroWorkers);
    }

    #[test]
    fn zero_time_limit_times_out_with_the_seed() {
        let cfg = SearchConfig {
            time_limit: Some(Duration::ZERO),
            ..SearchConfig::default()
        };
        let r = max_rectfree(6, 6, &cfg).unwrap();
        assert_eq!(r.status, SolveStatus::TimedOut);
        assert_eq!(r.max_size, 11); // the warm-start construction
        let w = r.witness.unwrap();
        assert!(w.is_rectangle_free());
        assert_eq!(w.popcount(), 11);
    }

    #[test]
    fn witness_orientation_matches_request() {
        let r = solve(2, 5);
        let w = r.witness.unwrap();
        assert_eq!((w.rows(), w.cols()), (2, 5));
        assert_eq!(w.popcount(), r.max_size);
    }

    #[test]
    fn verify_extremal_checks() {
        let good = GridSet::from_points(2, 2, &[(1, 1), (1, 2), (2, 1)]).unwrap();
        let check = verify_extremal(&good, 4);
        assert!(check.passes());
        assert!(check.rectangle_free());

        let full = GridSet::full(2, 2).unwrap();
        let check = verify_extremal(&full, 5);
        assert!(!check.passes());
        assert!(!check.rectangle_free());
        assert!(check.size_matches);

        let check = verify_extremal(&good, 7);
        assert!(!check.size_matches);
        assert!(!check.passes());
    }

    #[test]
    fn solve_json_shape() {
        let r = solve(2, 2);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["m"], 2);
        assert_eq!(v["f"], 4);
        assert_eq!(v["status"], "optimal");
        assert_eq!(v["max_size"], 3);
        assert!(v["nodes"].is_u64());
        assert_eq!(v["witness"]["points"].as_array().unwrap().len(), 3);

        let cfg = SearchConfig { report_witness: false, ..SearchConfig::default() };
        let r = max_rectfree(2, 2, &cfg).unwrap();
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        assert!(v["witness"].is_null());
    }

    #[test]
    fn optimistic_relaxation_cases() {
        // six spare rows and no pair budget: one point per row
        assert_eq!(optimistic(6, 7, 0), 6);
        // seven rows sharing 21 pairs evenly: three points each
        assert_eq!(optimistic(7, 7, 21), 21);
        // two rows, one spare pair: heights 2 and 1
        assert_eq!(optimistic(2, 5, 1), 3);
        assert_eq!(optimistic(0, 3, 10), 0);
        assert_eq!(optimistic(3, 0, 10), 0);
    }
}
