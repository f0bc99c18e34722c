//! Shared fixtures for the benchmark targets.

use zarank::grid::GridSet;
use zarank::plane::ProjectivePlane;

/// Incidence matrix of PG(2, q).
pub fn incidence(q: u64) -> GridSet {
    ProjectivePlane::of_order(q)
        .expect("benchmark orders are prime powers")
        .incidence_matrix()
}

/// A dense grid that contains rectangles, for detector benchmarks.
pub fn dense_grid(m: usize, n: usize) -> GridSet {
    let points: Vec<(usize, usize)> = (1..=m)
        .flat_map(|x| (1..=n).filter(move |y| (x * 7 + y * 3) % 5 != 0).map(move |y| (x, y)))
        .collect();
    GridSet::from_points(m, n, &points).expect("fixture dimensions are valid")
}
