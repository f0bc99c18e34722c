//! Coordinate construction of the projective plane PG(2, q) over GF(q),
//! axiom verification by brute force, incidence matrices, and the
//! line-deletion that turns a projective incidence matrix into the affine
//! extremal matrix.
//!
//! Points and lines are homogeneous coordinate triples over GF(q),
//! normalized so that the last nonzero coordinate is 1 and listed in
//! lexicographic order of the normalized triples. This makes the incidence
//! matrix of each order canonical: every run produces the identical matrix.

use serde::Serialize;
use thiserror::Error;

use crate::field::{FieldElement, FieldError, FieldSpec};
use crate::grid::GridSet;

/// Largest plane order accepted by [`ProjectivePlane::of_order`]. An order-q
/// plane has (q^2+q+1)^2 incidence bits; this cap keeps construction at desk
/// scale.
pub const ORDER_CEILING: u64 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaneError {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("plane order {order} exceeds the ceiling {ceiling}")]
    OrderTooLarge { order: u64, ceiling: u64 },
    #[error("not a projective incidence matrix: {0}")]
    NotIncidenceShaped(String),
    #[error("line index {index} out of range (matrix has {lines} columns)")]
    LineIndexOutOfRange { index: usize, lines: usize },
    #[error("homogeneous triples must have a nonzero coordinate")]
    ZeroTriple,
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// A projective point or line: three coordinates over GF(q), not all zero,
/// with the last nonzero coordinate scaled to 1. Exactly one representative
/// per projective equivalance class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomogeneousTriple {
    coords: [FieldElement; 3],
}

impl HomogeneousTriple {
    /// Scales an arbitrary nonzero triple to its canonical representative.
    pub fn normalized(coords: [FieldElement; 3]) -> Result<HomogeneousTriple, PlaneError> {
        let last_nonzero = coords
            .iter()
            .rposition(|c| !c.is_zero())
            .ok_or(PlaneError::ZeroTriple)?;
        let scale = coords[last_nonzero].inv()?;
        let scaled = [
            coords[0].mul(&scale)?,
            coords[1].mul(&scale)?,
            coords[2].mul(&scale)?,
        ];
        Ok(HomogeneousTriple { coords: scaled })
    }

    pub fn coords(&self) -> &[FieldElement; 3] {
        &self.coords
    }

    /// Dot product over GF(q). Zero means point and line are incident.
    pub fn dot(&self, other: &HomogeneousTriple) -> Result<FieldElement, FieldError> {
        let mut acc = self.coords[0].mul(&other.coords[0])?;
        for i in 1..3 {
            acc = acc.add(&self.coords[i].mul(&other.coords[i])?)?;
        }
        Ok(acc)
    }

    /// Label of the form `(a:b:c)` using canonical element indices.
    pub fn label(&self) -> String {
        format!(
            "({}:{}:{})",
            self.coords[0].index(),
            self.coords[1].index(),
            self.coords[2].index()
        )
    }
}

/// PG(2, q): `q^2 + q + 1` points and as many lines, with a point on a line
/// exactly when the coordinate dot product vanishes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProjectivePlane {
    order: usize,
    points: Vec<HomogeneousTriple>,
    lines: Vec<HomogeneousTriple>,
    incidence: GridSet,
}

#[derive(Serialize)]
struct PlaneDescriptor {
    order: usize,
    #[serde(rename = "N")]
    n: usize,
    point_labels: Vec<String>,
    line_labels: Vec<String>,
}

impl ProjectivePlane {
    /// Constructs PG(2, q) for a prime power `q`. Deterministic: the same
    /// order always yields the identical point order and incidence matrix.
    pub fn of_order(q: u64) -> Result<ProjectivePlane, PlaneError> {
        let (p, k) = prime_power_split(q).ok_or(PlaneError::NotPrimePower(q))?;
        if q > ORDER_CEILING {
            return Err(PlaneError::OrderTooLarge { order: q, ceiling: ORDER_CEILING });
        }
        let spec = FieldSpec::new(p, k)?;
        let tables = spec.op_tables();
        let qq = q as usize;

        // Normalized triples in lexicographic order of element indices:
        // last nonzero coordinate is the element 1 (index 1).
        let mut triples: Vec<[usize; 3]> = Vec::with_capacity(qq * qq + qq + 1);
        for a in 0..qq {
            for b in 0..qq {
                for c in 0..qq {
                    let normalized = if c != 0 {
                        c == 1
                    } else if b != 0 {
                        b == 1
                    } else {
                        a == 1
                    };
                    if normalized {
                        triples.push([a, b, c]);
                    }
                }
            }
        }
        let n_points = triples.len();
        debug_assert_eq!(n_points, qq * qq + qq + 1);

        let mut incidence = GridSet::empty(n_points, n_points).expect("plane is nonempty");
        for (i, pt) in triples.iter().enumerate() {
            for (j, ln) in triples.iter().enumerate() {
                let dot = tables.add(
                    tables.mul(pt[0], ln[0]),
                    tables.add(tables.mul(pt[1], ln[1]), tables.mul(pt[2], ln[2])),
                );
                if dot == 0 {
                    incidence.set_raw(i, j);
                }
            }
        }

        let as_triple = |idx: &[usize; 3]| HomogeneousTriple {
            coords: [
                spec.element_from_index(idx[0] as u64),
                spec.element_from_index(idx[1] as u64),
                spec.element_from_index(idx[2] as u64),
            ],
        };
        let points: Vec<HomogeneousTriple> = triples.iter().map(as_triple).collect();
        let lines = points.clone();

        Ok(ProjectivePlane { order: qq, points, lines, incidence })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `q^2 + q + 1`.
    pub fn point_count(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[HomogeneousTriple] {
        &self.points
    }

    pub fn lines(&self) -> &[HomogeneousTriple] {
        &self.lines
    }

    /// Incidence of point `i` and line `j` (0-based indices into
    /// [`ProjectivePlane::points`] and [`ProjectivePlane::lines`]).
    pub fn is_incident(&self, point: usize, line: usize) -> bool {
        self.incidence.contains(point + 1, line + 1)
    }

    /// The `N x N` incidence matrix as a grid set: rows are points, columns
    /// are lines. Rectangle-free with exactly `(q+1)(q^2+q+1)` points.
    pub fn incidence_matrix(&self) -> GridSet {
        self.incidence.clone()
    }

    /// A copy with one incidence bit flipped; for perturbation testing the
    /// axiom checker.
    pub fn with_incidence_toggled(&self, point: usize, line: usize) -> ProjectivePlane {
        let mut plane = self.clone();
        plane.incidence.toggle_raw(point, line);
        plane
    }

    /// Brute-force verification of the four plane axioms.
    pub fn verify_axioms(&self) -> AxiomReport {
        check_axioms(&self.incidence, self.order)
    }

    /// JSON descriptor: `{"order","N","point_labels","line_labels"}`.
    pub fn descriptor_json(&self) -> String {
        let descriptor = PlaneDescriptor {
            order: self.order,
            n: self.point_count(),
            point_labels: self.points.iter().map(|t| t.label()).collect(),
            line_labels: self.lines.iter().map(|t| t.label()).collect(),
        };
        serde_json::to_string(&descriptor).expect("descriptor serialization")
    }
}

/// Brute-force check of the four projective-plane axioms.
pub fn verify_plane_axioms(plane: &ProjectivePlane) -> AxiomReport {
    plane.verify_axioms()
}

/// Axiom check for a raw incidence matrix (rows = points, columns = lines).
/// The matrix must be `N x N` with `N = s^2 + s + 1`; the order is derived.
pub fn grid_axiom_report(g: &GridSet) -> Result<AxiomReport, PlaneError> {
    if g.rows() != g.cols() {
        return Err(PlaneError::NotIncidenceShaped(format!(
            "matrix is {} x {}, expected square",
            g.rows(),
            g.cols()
        )));
    }
    let order = order_for_point_count(g.rows()).ok_or_else(|| {
        PlaneError::NotIncidenceShaped(format!(
            "{} is not of the form s^2 + s + 1",
            g.rows()
        ))
    })?;
    Ok(check_axioms(g, order))
}

/// One entry per axiom; `None` means the axiom holds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub order: usize,
    /// Axiom 1 violation: a point pair on != 1 common lines.
    pub point_pair: Option<PairViolation>,
    /// Axiom 2 violation: a line pair meeting in != 1 points.
    pub line_pair: Option<PairViolation>,
    /// Axiom 3 violation: a line with != order + 1 points.
    pub line_size: Option<SizeViolation>,
    /// Axiom 4 witness: four points, no three collinear. `None` means the
    /// axiom fails.
    pub quadrangle: Option<[usize; 4]>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairViolation {
    pub a: usize,
    pub b: usize,
    pub count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SizeViolation {
    pub index: usize,
    pub count: usize,
}

impl AxiomReport {
    /// Whether axiom `i` (1-based, 1..=4) holds.
    pub fn axiom_holds(&self, i: usize) -> bool {
        match i {
            1 => self.point_pair.is_none(),
            2 => self.line_pair.is_none(),
            3 => self.line_size.is_none(),
            4 => self.quadrangle.is_some(),
            _ => panic!("axioms are numbered 1..=4"),
        }
    }

    pub fn all_hold(&self) -> bool {
        (1..=4).all(|i| self.axiom_holds(i))
    }
}

fn check_axioms(g: &GridSet, order: usize) -> AxiomReport {
    let n_points = g.rows();
    let transposed = g.transposed();

    let pair_failure = |rows: &GridSet| -> Option<PairViolation> {
        for a in 0..rows.rows() {
            for b in a + 1..rows.rows() {
                let common: usize = rows
                    .row_words(a)
                    .iter()
                    .zip(rows.row_words(b))
                    .map(|(&x, &y)| (x & y).count_ones() as usize)
                    .sum();
                if common != 1 {
                    return Some(PairViolation { a, b, count: common });
                }
            }
        }
        None
    };

    let point_pair = pair_failure(g);
    let line_pair = pair_failure(&transposed);

    let mut line_size = None;
    for j in 0..n_points {
        let count: usize = transposed
            .row_words(j)
            .iter()
            .map(|w| w.count_ones() as usize)
            .sum();
        if count != order + 1 {
            line_size = Some(SizeViolation { index: j, count });
            break;
        }
    }

    let quadrangle = find_quadrangle(g);

    AxiomReport { order, point_pair, line_pair, line_size, quadrangle }
}

/// First 4-subset of points (in lexicographic order) with no 3 on a line.
/// Three points are collinear exactly when some line passes through all of
/// them, i.e. the AND of their line sets is nonzero.
fn find_quadrangle(g: &GridSet) -> Option<[usize; 4]> {
    let n = g.rows();
    let collinear3 = |a: usize, b: usize, c: usize| -> bool {
        g.row_words(a)
            .iter()
            .zip(g.row_words(b))
            .zip(g.row_words(c))
            .any(|((&x, &y), &z)| x & y & z != 0)
    };
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                if collinear3(a, b, c) {
                    continue;
                }
                for d in c + 1..n {
                    if !collinear3(a, b, d) && !collinear3(a, c, d) && !collinear3(b, c, d) {
                        return Some([a, b, c, d]);
                    }
                }
            }
        }
    }
    None
}

/// The line-deletion construction: drops column `line_index` and every row
/// incident with it. An `N x N` projective incidence matrix with
/// `N = s^2 + s + 1` becomes the `s^2 x (s^2 + s)` affine extremal matrix
/// with `s^2 (s + 1)` points, still rectangle-free.
pub fn affine_from_projective(g: &GridSet, line_index: usize) -> Result<GridSet, PlaneError> {
    if g.rows() != g.cols() {
        return Err(PlaneError::NotIncidenceShaped(format!(
            "matrix is {} x {}, expected square",
            g.rows(),
            g.cols()
        )));
    }
    let n_points = g.rows();
    let order = order_for_point_count(n_points).ok_or_else(|| {
        PlaneError::NotIncidenceShaped(format!("{n_points} is not of the form s^2 + s + 1"))
    })?;
    if line_index >= n_points {
        return Err(PlaneError::LineIndexOutOfRange { index: line_index, lines: n_points });
    }
    let on_line: Vec<usize> = (0..n_points)
        .filter(|&i| g.get_raw(i, line_index))
        .collect();
    if on_line.len() != order + 1 {
        return Err(PlaneError::NotIncidenceShaped(format!(
            "column {} has {} ones, expected {}",
            line_index,
            on_line.len(),
            order + 1
        )));
    }

    let keep_rows: Vec<usize> = (0..n_points)
        .filter(|i| !on_line.contains(i))
        .collect();
    let mut out = GridSet::empty(n_points - order - 1, n_points - 1)
        .expect("affine dimensions are positive");
    for (new_i, &i) in keep_rows.iter().enumerate() {
        let mut new_j = 0;
        for j in 0..n_points {
            if j == line_index {
                continue;
            }
            if g.get_raw(i, j) {
                out.set_raw(new_i, new_j);
            }
            new_j += 1;
        }
    }
    Ok(out)
}

/// Solves `count = s^2 + s + 1` for a nonnegative integer `s`.
pub fn order_for_point_count(count: usize) -> Option<usize> {
    let mut s = 0usize;
    loop {
        let total = s * s + s + 1;
        if total == count {
            return Some(s);
        }
        if total > count {
            return None;
        }
        s += 1;
    }
}

fn prime_power_split(q: u64) -> Option<(u64, usize)> {
    if q < 2 {
        return None;
    }
    let mut p = 2;
    while p * p <= q {
        if q.is_multiple_of(p) {
            let mut rest = q;
            let mut k = 0;
            while rest.is_multiple_of(p) {
                rest /= p;
                k += 1;
            }
            return if rest == 1 { Some((p, k)) } else { None };
        }
        p += 1;
    }
    Some((q, 1)) // q itself is prime
}
