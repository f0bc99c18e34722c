//! Rectangle-free subsets of integer grids.
//!
//! `f(m, n)` is the least size that forces a subset of the `[m] x [n]` grid
//! to contain an axis-aligned combinatorial rectangle; equivalently,
//! `f(m, n) - 1` is the Zarankiewicz number z(m, n; 2, 2), the most ones an
//! `m x n` 0/1 matrix can carry with no 2 x 2 all-ones submatrix.
//!
//! This crate provides:
//!
//! * [`field`]: exact, reproducible arithmetic in GF(p^k);
//! * [`plane`]: coordinate construction of PG(2, q), axiom verification,
//!   incidence matrices, and the affine line-deletion construction;
//! * [`grid`]: grid subsets as bit rows, rectangle detection, Gram-matrix
//!   checks, colorings, and the grid file format;
//! * [`bounds`]: closed-form bounds and exact values of f in exact integer
//!   arithmetic, plus a plane-order existence oracle;
//! * [`solver`]: exact `f(m, n)` on small grids by branch and bound,
//!   cross-validated by a brute-force oracle.
//!
//! ```
//! use zarank::plane::ProjectivePlane;
//! use zarank::bounds::bound_report;
//!
//! let incidence = ProjectivePlane::of_order(2).unwrap().incidence_matrix();
//! assert_eq!(incidence.popcount(), 21);
//! assert!(incidence.is_rectangle_free());
//! assert_eq!(bound_report(7, 7, false).unwrap().exact.unwrap().value, 22);
//! ```

pub mod bounds;
pub mod field;
pub mod grid;
pub mod plane;
pub mod solver;

pub use bounds::{
    affine_exact, bound_report, h_asymptotic, kst_lower, plane_order_status, projective_exact,
    reiman_upper, Bound, BoundReport, BoundSource, BoundsError, HEval, PlaneOrderStatus,
};
pub use field::{FieldElement, FieldError, FieldSpec};
pub use grid::{
    read_gridset, write_gridset, Coloring, GridError, GridSet, PairCountBound, RectangleWitness,
};
pub use plane::{
    affine_from_projective, grid_axiom_report, verify_plane_axioms, AxiomReport,
    HomogeneousTriple, PlaneError, ProjectivePlane,
};
pub use solver::{
    brute_force_oracle, max_rectfree, verify_extremal, ExtremalCheck, SearchConfig, SolveError,
    SolveResult, SolveStatus,
};
