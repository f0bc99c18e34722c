//! Closed-form bounds and exact values for f(m, n), the least subset size of
//! `[m] x [n]` that forces a rectangle, evaluated in exact integer
//! arithmetic.
//!
//! All rounding is toward the tightest valid integer bound: upper bounds are
//! floored, lower bounds are ceiled, and every comparison against a square
//! root goes through [`isqrt`] and integer squaring instead of floating
//! point.

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use std::fmt;
use thiserror::Error;

use crate::solver::{self, SearchConfig, SolveStatus};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundsError {
    #[error("grid dimensions must be positive")]
    NonPositiveDimension,
    #[error("the explicit lower bound needs k >= 3, got {0}")]
    KTooSmall(u64),
    #[error("plane orders start at 2, got {0}")]
    OrderTooSmall(u64),
    #[error("no projective plane available: {0}")]
    PlaneUnavailable(PlaneOrderStatus),
    #[error("arithmetic overflow")]
    Overflow,
}

/// What is known about the existence of a projective plane of a given order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlaneOrderStatus {
    /// The order is a prime power, so the coordinate plane exists.
    ExistsPrimePower,
    /// Ruled out by the Bruck-Ryser criterion: order congruent to 1 or 2
    /// mod 4 whose square-free part has a prime factor congruent to 3 mod 4.
    RuledOutBruckRyser,
    /// Order 10, ruled out by exhaustive computer search.
    RuledOutExhaustive,
    /// Existence is an open problem (the smallest such order is 12).
    Unknown,
}

impl PlaneOrderStatus {
    pub fn as_str(&self) -> &'static str {
        match self {
            PlaneOrderStatus::ExistsPrimePower => "prime-power",
            PlaneOrderStatus::RuledOutBruckRyser => "ruled-out-bruck-ryser",
            PlaneOrderStatus::RuledOutExhaustive => "ruled-out-exhaustive",
            PlaneOrderStatus::Unknown => "unknown",
        }
    }
}

impl fmt::Display for PlaneOrderStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Integer square root, `floor(sqrt(n))`. Newton iteration seeded from the
/// floating approximation; exact for every u128.
pub fn isqrt(n: u128) -> u128 {
    if n == 0 {
        return 0;
    }
    let mut r = (n as f64).sqrt() as u128;
    if r == 0 {
        r = 1;
    }
    loop {
        let next = (r + n / r) / 2;
        // stop at a fixed point or a 2-cycle (r, r+1); r is the floor then
        if r == next || r + 1 == next {
            return r;
        }
        r = next;
    }
}

fn is_perfect_square(n: u128) -> Option<u128> {
    let s = isqrt(n);
    (s * s == n).then_some(s)
}

fn to_u64(v: u128) -> Result<u64, BoundsError> {
    u64::try_from(v).map_err(|_| BoundsError::Overflow)
}

/// Reiman's upper bound: `f(m,n) <= floor((m + sqrt(m^2 + 4mn(n-1))) / 2) + 1`.
///
/// Evaluated with exact integer square roots; flooring the root before the
/// division is safe because the enclosing expression never crosses an
/// integer inside the fractional interval. The bound is not symmetric in its
/// arguments; callers wanting the best value take the min over both orders
/// (f itself is symmetric).
pub fn reiman_upper(m: u64, n: u64) -> Result<u64, BoundsError> {
    if m == 0 || n == 0 {
        return Err(BoundsError::NonPositiveDimension);
    }
    let (m, n) = (m as u128, n as u128);
    let m_sq = m.checked_mul(m).ok_or(BoundsError::Overflow)?;
    let cross = 4u128
        .checked_mul(m)
        .and_then(|v| v.checked_mul(n))
        .and_then(|v| v.checked_mul(n - 1))
        .ok_or(BoundsError::Overflow)?;
    let d = m_sq.checked_add(cross).ok_or(BoundsError::Overflow)?;
    to_u64((m + isqrt(d)) / 2 + 1)
}

/// The explicit lower bound `f(k,k) >= ceil(((k+4) sqrt(4k-3) + 5k + 22) / 16)`
/// for `k >= 3`.
///
/// The ceiling is computed by integer squaring: with `S = isqrt((k+4)^2 (4k-3))`
/// the numerator lies in `[5k + 22 + S, 5k + 22 + S + 1)`, exactly hitting the
/// left endpoint when the radicand is a perfect square.
pub fn kst_lower(k: u64) -> Result<u64, BoundsError> {
    if k < 3 {
        return Err(BoundsError::KTooSmall(k));
    }
    let k = k as u128;
    let a = 5 * k + 22;
    let b = k + 4;
    let r = 4 * k - 3;
    let b2r = b
        .checked_mul(b)
        .and_then(|v| v.checked_mul(r))
        .ok_or(BoundsError::Overflow)?;
    let s = isqrt(b2r);
    let w = a + s;
    let v = if s * s == b2r { w.div_ceil(16) } else { w / 16 + 1 };
    to_u64(v)
}

/// Exact value `f(N, N) = (q+1)(q^2+q+1) + 1` for `N = q^2+q+1`, valid when a
/// projective plane of order `q` exists.
pub fn projective_exact(order: u64) -> Result<u64, BoundsError> {
    match plane_order_status(order)? {
        PlaneOrderStatus::ExistsPrimePower => {
            let q = order as u128;
            to_u64((q + 1) * (q * q + q + 1) + 1)
        }
        status => Err(BoundsError::PlaneUnavailable(status)),
    }
}

/// Exact value `f(q^2, q^2+q) = q^2 (q+1) + 1`, valid when a projective plane
/// of order `q` exists.
pub fn affine_exact(order: u64) -> Result<u64, BoundsError> {
    match plane_order_status(order)? {
        PlaneOrderStatus::ExistsPrimePower => {
            let q = order as u128;
            to_u64(q * q * (q + 1) + 1)
        }
        status => Err(BoundsError::PlaneUnavailable(status)),
    }
}

/// Evaluation of `h(k) = (sqrt(k - 3/4) + 1/2) k + 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HEval {
    /// Floating approximation of h(k).
    pub approx: f64,
    /// The exact integer value `(t+1) k + 1` when `4k - 3 = (2t+1)^2` is a
    /// perfect square; in particular, at `k = q^2+q+1` this equals
    /// `(q+1)(q^2+q+1) + 1`.
    pub exact: Option<u64>,
}

impl HEval {
    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }
}

/// Evaluates the interpolating function h at `k >= 1`.
pub fn h_asymptotic(k: u64) -> HEval {
    assert!(k >= 1, "h(k) is defined for k >= 1");
    let approx = ((k as f64 - 0.75).sqrt() + 0.5) * k as f64 + 1.0;
    let radicand = 4 * k as u128 - 3;
    let exact = is_perfect_square(radicand).and_then(|s| {
        let t = (s - 1) / 2;
        u64::try_from((t + 1) * k as u128 + 1).ok()
    });
    HEval { approx, exact }
}

/// Existence status of a projective plane of order `n >= 2`. Hard-codes only
/// two nonexistence facts: the Bruck-Ryser criterion and the exhaustive
/// computer search that ruled out order 10. Everything else that is not a
/// prime power is honestly `Unknown`.
pub fn plane_order_status(n: u64) -> Result<PlaneOrderStatus, BoundsError> {
    if n < 2 {
        return Err(BoundsError::OrderTooSmall(n));
    }
    let factors = factorize(n);
    if factors.len() == 1 {
        return Ok(PlaneOrderStatus::ExistsPrimePower);
    }
    if n == 10 {
        return Ok(PlaneOrderStatus::RuledOutExhaustive);
    }
    if n % 4 == 1 || n % 4 == 2 {
        let squarefree_part_has_bad_prime =
            factors.iter().any(|&(p, e)| e % 2 == 1 && p % 4 == 3);
        if squarefree_part_has_bad_prime {
            return Ok(PlaneOrderStatus::RuledOutBruckRyser);
        }
    }
    Ok(PlaneOrderStatus::Unknown)
}

fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Provenance of a bound value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSource {
    /// Reiman's upper bound.
    Reiman,
    /// The explicit square-grid lower bound.
    KstLower,
    /// Exact via a projective-plane incidence matrix.
    ProjectivePlane,
    /// Exact via the affine line-deletion construction.
    AffinePlane,
    /// Exact via the branch-and-bound solver.
    Solver,
    /// The trivial lower bound max(m, n) + 1.
    Trivial,
    /// A grid with a side of length 1 can never contain a rectangle.
    Degenerate,
}

impl BoundSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            BoundSource::Reiman => "reiman-eq1",
            BoundSource::KstLower => "kst-thm3",
            BoundSource::ProjectivePlane => "lemma1",
            BoundSource::AffinePlane => "thm2",
            BoundSource::Solver => "solver",
            BoundSource::Trivial => "trivial",
            BoundSource::Degenerate => "degenerate",
        }
    }
}

impl Serialize for BoundSource {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.as_str())
    }
}

impl fmt::Display for BoundSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A bound value with its provenance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bound {
    pub value: u64,
    pub source: BoundSource,
}

impl Serialize for Bound {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("Bound", 2)?;
        s.serialize_field("value", &self.value)?;
        s.serialize_field("source", &self.source)?;
        s.end()
    }
}

/// Best known lower/upper/exact values of f(m, n).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BoundReport {
    pub m: u64,
    pub n: u64,
    pub lower: Bound,
    pub upper: Bound,
    pub exact: Option<Bound>,
}

impl BoundReport {
    /// JSON: `{"m","n","lower":{"value","source"},"upper":{...},"exact":{...}|null}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("bound report serialization")
    }
}

/// Aggregates everything known about f(m, n):
///
/// * upper bound: Reiman, symmetrized over (m, n) and (n, m);
/// * lower bound: the explicit square bound when `m = n >= 3`, else the
///   trivial `max(m, n) + 1`;
/// * exact value when a side is 1 (`m n + 1`), when the shape matches a
///   plane construction with an available plane, or, with `allow_solver`,
///   from the exact solver on instances within its cell ceiling.
pub fn bound_report(m: u64, n: u64, allow_solver: bool) -> Result<BoundReport, BoundsError> {
    if m == 0 || n == 0 {
        return Err(BoundsError::NonPositiveDimension);
    }
    let upper = Bound {
        value: reiman_upper(m, n)?.min(reiman_upper(n, m)?),
        source: BoundSource::Reiman,
    };

    if m == 1 || n == 1 {
        let cells = m.checked_mul(n).ok_or(BoundsError::Overflow)?;
        let value = cells.checked_add(1).ok_or(BoundsError::Overflow)?;
        let bound = Bound { value, source: BoundSource::Degenerate };
        let report = BoundReport { m, n, lower: bound, upper, exact: Some(bound) };
        debug_assert!(report.lower.value <= report.upper.value);
        return Ok(report);
    }

    let lower = if m == n && m >= 3 {
        Bound { value: kst_lower(m)?, source: BoundSource::KstLower }
    } else {
        Bound { value: m.max(n) + 1, source: BoundSource::Trivial }
    };

    let exact = exact_f(m, n, allow_solver)?;

    assert!(lower.value <= upper.value, "lower bound exceeds upper bound");
    if let Some(e) = exact {
        assert!(
            lower.value <= e.value && e.value <= upper.value,
            "exact value escapes the bound sandwich"
        );
    }
    Ok(BoundReport { m, n, lower, upper, exact })
}

fn exact_f(m: u64, n: u64, allow_solver: bool) -> Result<Option<Bound>, BoundsError> {
    // square plane shape: m = n = q^2 + q + 1
    if m == n {
        if let Some(q) = plane_shape_order(m) {
            if plane_order_status(q)? == PlaneOrderStatus::ExistsPrimePower {
                return Ok(Some(Bound {
                    value: projective_exact(q)?,
                    source: BoundSource::ProjectivePlane,
                }));
            }
        }
    }

    // affine shape: {m, n} = {q^2, q^2 + q}
    let (lo, hi) = (m.min(n), m.max(n));
    if let Some(q) = is_perfect_square(lo as u128) {
        let q = q as u64;
        if q >= 2 && hi == lo + q && plane_order_status(q)? == PlaneOrderStatus::ExistsPrimePower
        {
            return Ok(Some(Bound {
                value: affine_exact(q)?,
                source: BoundSource::AffinePlane,
            }));
        }
    }

    if allow_solver {
        let cells = m.checked_mul(n).ok_or(BoundsError::Overflow)?;
        if cells <= solver::DEFAULT_CELL_CEILING as u64 {
            let cfg = SearchConfig { report_witness: false, ..SearchConfig::default() };
            if let Ok(result) = solver::max_rectfree(m as usize, n as usize, &cfg) {
                if result.status == SolveStatus::Optimal {
                    return Ok(Some(Bound {
                        value: result.f_value,
                        source: BoundSource::Solver,
                    }));
                }
            }
        }
    }

    Ok(None)
}

/// Solves `v = q^2 + q + 1` over the nonnegative integers and requires
/// `q >= 2`.
fn plane_shape_order(v: u64) -> Option<u64> {
    // 4v - 3 = (2q + 1)^2
    let s = is_perfect_square(4 * v as u128 - 3)?;
    let q = ((s - 1) / 2) as u64;
    (q >= 2 && q * q + q + 1 == v).then_some(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn isqrt_small_sweep() {
        for n in 0u128..100_000 {
            let r = isqrt(n);
            assert!(r * r <= n, "isqrt({n}) = {r}");
            assert!((r + 1) * (r + 1) > n, "isqrt({n}) = {r}");
        }
    }

    #[test]
    fn isqrt_around_squares() {
        for r in [1u128, 2, 3, 1000, 1 << 20, 1 << 40, (1 << 60) + 12345] {
            assert_eq!(isqrt(r * r), r);
            assert_eq!(isqrt(r * r - 1), r - 1);
            assert_eq!(isqrt(r * r + 1), r);
        }
    }

    #[test]
    fn reiman_values() {
        // D = 324 = 18^2, (6 + 18)/2 + 1 = 13 = 2^2 (2+1) + 1
        assert_eq!(reiman_upper(6, 4).unwrap(), 13);
        // D = 49 + 1176 = 1225 = 35^2, (7 + 35)/2 + 1 = 22
        assert_eq!(reiman_upper(7, 7).unwrap(), 22);
        // D = 144 + 6336 = 6480, isqrt = 80, (12 + 80)/2 + 1 = 47
        assert_eq!(reiman_upper(12, 12).unwrap(), 47);
        assert_eq!(reiman_upper(1, 1).unwrap(), 2);
        assert_eq!(reiman_upper(0, 5).unwrap_err(), BoundsError::NonPositiveDimension);
    }

    #[test]
    fn kst_values() {
        // k = 7: radicand 25 is a perfect square, (11*5 + 57)/16 = 7 exactly
        assert_eq!(kst_lower(7).unwrap(), 7);
        // k = 3: (7*3 + 37)/16 = 58/16 = 3.625, ceil = 4
        assert_eq!(kst_lower(3).unwrap(), 4);
        assert_eq!(kst_lower(13).unwrap(), 13);
        assert_eq!(kst_lower(2).unwrap_err(), BoundsError::KTooSmall(2));
    }

    #[test]
    fn kst_is_the_least_valid_integer() {
        // independent check of the defining inequality:
        // t is valid iff 16 t >= 5k + 22 + (k+4) sqrt(4k-3)
        let valid = |t: u128, k: u128| {
            let a = 5 * k + 22;
            let b2r = (k + 4) * (k + 4) * (4 * k - 3);
            16 * t >= a && (16 * t - a) * (16 * t - a) >= b2r
        };
        for k in 3u64..=2000 {
            let t = kst_lower(k).unwrap() as u128;
            assert!(valid(t, k as u128), "kst({k}) = {t} is not a valid ceil");
            assert!(t == 0 || !valid(t - 1, k as u128), "kst({k}) = {t} is not minimal");
        }
    }

    #[test]
    fn exact_plane_values() {
        assert_eq!(projective_exact(2).unwrap(), 22);
        assert_eq!(projective_exact(3).unwrap(), 53);
        assert_eq!(
            projective_exact(10).unwrap_err(),
            BoundsError::PlaneUnavailable(PlaneOrderStatus::RuledOutExhaustive)
        );
        assert_eq!(
            projective_exact(1).unwrap_err(),
            BoundsError::OrderTooSmall(1)
        );

        assert_eq!(affine_exact(2).unwrap(), 13);
        assert_eq!(affine_exact(3).unwrap(), 37);
        assert_eq!(
            affine_exact(6).unwrap_err(),
            BoundsError::PlaneUnavailable(PlaneOrderStatus::RuledOutBruckRyser)
        );
    }

    #[test]
    fn h_values() {
        assert_eq!(h_asymptotic(7).exact, Some(22));
        assert_eq!(h_asymptotic(13).exact, Some(53));
        let h5 = h_asymptotic(5);
        assert_eq!(h5.exact, None);
        // (sqrt(4.25) + 0.5) * 5 + 1
        assert!((h5.approx - 13.807764064044152).abs() < 1e-9);
        assert_eq!(h_asymptotic(1).exact, Some(2));
    }

    #[test]
    fn reiman_is_tight_at_plane_shapes() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let n = q * q + q + 1;
            assert_eq!(reiman_upper(n, n).unwrap(), projective_exact(q).unwrap());
            assert_eq!(
                reiman_upper(q * q + q, q * q).unwrap(),
                affine_exact(q).unwrap()
            );
        }
    }

    #[test]
    fn kst_below_reiman() {
        for k in 3u64..=200 {
            assert!(kst_lower(k).unwrap() <= reiman_upper(k, k).unwrap());
        }
    }

    #[test]
    fn statuses() {
        use PlaneOrderStatus::*;
        assert_eq!(plane_order_status(8).unwrap(), ExistsPrimePower);
        assert_eq!(plane_order_status(2).unwrap(), ExistsPrimePower);
        assert_eq!(plane_order_status(9).unwrap(), ExistsPrimePower);
        // 6 = 2 mod 4 and its square-free part 6 has the prime 3 = 3 mod 4
        assert_eq!(plane_order_status(6).unwrap(), RuledOutBruckRyser);
        assert_eq!(plane_order_status(14).unwrap(), RuledOutBruckRyser);
        assert_eq!(plane_order_status(21).unwrap(), RuledOutBruckRyser);
        assert_eq!(plane_order_status(10).unwrap(), RuledOutExhaustive);
        assert_eq!(plane_order_status(12).unwrap(), Unknown);
        assert_eq!(plane_order_status(15).unwrap(), Unknown);
        assert_eq!(plane_order_status(18).unwrap(), Unknown);
        assert_eq!(plane_order_status(1).unwrap_err(), BoundsError::OrderTooSmall(1));
    }

    #[test]
    fn report_square_plane_shape() {
        let r = bound_report(7, 7, false).unwrap();
        assert_eq!(r.lower, Bound { value: 7, source: BoundSource::KstLower });
        assert_eq!(r.upper, Bound { value: 22, source: BoundSource::Reiman });
        assert_eq!(r.exact, Some(Bound { value: 22, source: BoundSource::ProjectivePlane }));
    }

    #[test]
    fn report_affine_shape() {
        let r = bound_report(4, 6, false).unwrap();
        assert_eq!(r.exact, Some(Bound { value: 13, source: BoundSource::AffinePlane }));
        // symmetric order matches
        let r = bound_report(6, 4, false).unwrap();
        assert_eq!(r.exact.unwrap().value, 13);
        assert_eq!(r.lower.source, BoundSource::Trivial);
        assert_eq!(r.lower.value, 7);
    }

    #[test]
    fn report_degenerate() {
        let r = bound_report(1, 5, false).unwrap();
        assert_eq!(r.exact, Some(Bound { value: 6, source: BoundSource::Degenerate }));
        assert_eq!(r.upper.value, 6);
        let r = bound_report(1, 1, false).unwrap();
        assert_eq!(r.exact.unwrap().value, 2);
    }

    #[test]
    fn report_solver_backed() {
        let r = bound_report(2, 2, true).unwrap();
        assert_eq!(r.exact, Some(Bound { value: 4, source: BoundSource::Solver }));
        let r = bound_report(3, 3, true).unwrap();
        assert_eq!(r.exact, Some(Bound { value: 7, source: BoundSource::Solver }));
        // without the solver there is nothing exact at this shape
        assert_eq!(bound_report(3, 3, false).unwrap().exact, None);
    }

    #[test]
    fn report_no_exact_at_order_twelve() {
        let r = bound_report(12, 12, false).unwrap();
        assert_eq!(r.exact, None);
        assert_eq!(r.lower.value, 12);
        assert_eq!(r.upper.value, 47);
    }

    #[test]
    fn report_plane_shapes_without_planes_stay_inexact() {
        // 111 = 10^2 + 10 + 1, but order 10 is ruled out
        assert_eq!(bound_report(111, 111, false).unwrap().exact, None);
        // {100, 110} is the affine shape for order 10
        assert_eq!(bound_report(100, 110, false).unwrap().exact, None);
        // 157 = 12^2 + 12 + 1, order 12 is open
        assert_eq!(bound_report(157, 157, false).unwrap().exact, None);
        // a prime-power shape right next to them still works
        assert_eq!(bound_report(133, 133, false).unwrap().exact.unwrap().value, 12 * 133 + 1);
    }

    #[test]
    fn report_json_shape() {
        let r = bound_report(7, 7, false).unwrap();
        assert_eq!(
            r.to_json(),
            r#"{"m":7,"n":7,"lower":{"value":7,"source":"kst-thm3"},"upper":{"value":22,"source":"reiman-eq1"},"exact":{"value":22,"source":"lemma1"}}"#
        );
        let r = bound_report(3, 3, false).unwrap();
        assert!(r.to_json().ends_with(r#""exact":null}"#));
    }

    #[test]
    fn h_matches_projective_exact_on_plane_shapes() {
        for q in [2u64, 3, 4, 5, 7, 8, 9, 11, 13] {
            let k = q * q + q + 1;
            assert_eq!(h_asymptotic(k).exact, Some(projective_exact(q).unwrap()));
        }
    }

    #[test]
    fn no_silent_wraparound_at_large_k() {
        // smoke test at the advertised scale
        let k = 1_000_000u64;
        let r = reiman_upper(k, k).unwrap();
        let l = kst_lower(k).unwrap();
        assert!(l <= r);
        assert!(r > k);
    }
}
