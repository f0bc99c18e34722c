//! Exact arithmetic in GF(p^k) for small prime powers.
//!
//! A [`FieldSpec`] fixes the characteristic `p`, the extension degree `k`,
//! and a monic irreducible modulus of degree `k` over GF(p). The modulus is
//! always the lexicographically least irreducible candidate, so two runs (or
//! two machines) constructing GF(9) agree on every element index and on every
//! product.
//!
//! Elements are little-endian coefficient vectors tied to the spec that
//! created them. All values are immutable after construction and safe to
//! share across threads.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest field size `p^k` accepted by [`FieldSpec::new`].
pub const DEFAULT_SIZE_CEILING: u64 = 1 << 20;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    DegreeOutOfRange,
    #[error("field size {p}^{k} exceeds the ceiling {ceiling}")]
    SizeCeilingExceeded { p: u64, k: usize, ceiling: u64 },
    #[error("operands come from different field specs")]
    SpecMismatch,
    #[error("division by zero")]
    DivisionByZero,
}

#[derive(Debug, PartialEq, Eq)]
struct SpecInner {
    p: u64,
    k: usize,
    /// Monic modulus, little-endian, `k + 1` coefficients. For `k == 1` this
    /// is the polynomial `x`, i.e. plain arithmetic mod `p`.
    modulus: Vec<u64>,
}

/// A description of GF(p^k): characteristic, degree, and modulus polynomial.
///
/// Cloning is cheap (the payload is shared).
#[derive(Debug, Clone)]
pub struct FieldSpec {
    inner: Arc<SpecInner>,
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.inner == other.inner
    }
}

impl Eq for FieldSpec {}

impl fmt::Display for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.inner.k == 1 {
            write!(f, "GF({})", self.inner.p)
        } else {
            write!(f, "GF({}^{})", self.inner.p, self.inner.k)
        }
    }
}

impl FieldSpec {
    /// Builds GF(p^k) with the lexicographically least monic irreducible
    /// modulus of degree `k` over GF(p). Deterministic: repeated calls with
    /// the same arguments yield identical specs.
    pub fn new(p: u64, k: usize) -> Result<Self, FieldError> {
        Self::with_ceiling(p, k, DEFAULT_SIZE_CEILING)
    }

    /// Like [`FieldSpec::new`] with an explicit size ceiling on `p^k`.
    pub fn with_ceiling(p: u64, k: usize, ceiling: u64) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if k == 0 {
            return Err(FieldError::DegreeOutOfRange);
        }
        let mut order: u64 = 1;
        for _ in 0..k {
            order = order
                .checked_mul(p)
                .filter(|&o| o <= ceiling)
                .ok_or(FieldError::SizeCeilingExceeded { p, k, ceiling })?;
        }
        let modulus = if k == 1 {
            vec![0, 1]
        } else {
            least_irreducible(p, k)
        };
        Ok(FieldSpec {
            inner: Arc::new(SpecInner { p, k, modulus }),
        })
    }

    pub fn characteristic(&self) -> u64 {
        self.inner.p
    }

    pub fn degree(&self) -> usize {
        self.inner.k
    }

    /// Number of elements, `p^k`.
    pub fn order(&self) -> u64 {
        self.inner.p.pow(self.inner.k as u32)
    }

    /// The modulus polynomial, little-endian, `k + 1` coefficients, monic.
    pub fn modulus(&self) -> &[u64] {
        &self.inner.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            spec: self.clone(),
            coeffs: vec![0; self.inner.k],
        }
    }

    pub fn one(&self) -> FieldElement {
        let mut coeffs = vec![0; self.inner.k];
        coeffs[0] = 1;
        FieldElement {
            spec: self.clone(),
            coeffs,
        }
    }

    /// Builds an element from little-endian coefficients. Shorter vectors are
    /// zero-padded; coefficients are reduced mod `p`; more than `k`
    /// coefficients is an error.
    pub fn element(&self, mut coeffs: Vec<u64>) -> Result<FieldElement, FieldError> {
        if coeffs.len() > self.inner.k {
            return Err(FieldError::DegreeOutOfRange);
        }
        for c in &mut coeffs {
            *c %= self.inner.p;
        }
        coeffs.resize(self.inner.k, 0);
        Ok(FieldElement {
            spec: self.clone(),
            coeffs,
        })
    }

    /// The `index`-th element in enumeration order: the coefficients are the
    /// little-endian base-`p` digits of `index`.
    ///
    /// # Panics
    /// Panics if `index >= self.order()`.
    pub fn element_from_index(&self, index: u64) -> FieldElement {
        assert!(index < self.order(), "element index out of range");
        let mut coeffs = vec![0; self.inner.k];
        let mut rest = index;
        for c in coeffs.iter_mut() {
            *c = rest % self.inner.p;
            rest /= self.inner.p;
        }
        FieldElement {
            spec: self.clone(),
            coeffs,
        }
    }

    /// All `p^k` elements in lexicographic coefficient order starting at 0.
    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        (0..self.order()).map(move |i| self.element_from_index(i))
    }

    fn p(&self) -> u64 {
        self.inner.p
    }

    /// Dense add/mul lookup tables over element indices, used for the hot
    /// incidence loops in plane construction. Only sensible for small fields.
    pub(crate) fn op_tables(&self) -> OpTables {
        let q = self.order() as usize;
        assert!(q <= 4096, "op tables are for small fields only");
        let elems: Vec<FieldElement> = self.elements().collect();
        let mut add = vec![0u32; q * q];
        let mut mul = vec![0u32; q * q];
        for (i, a) in elems.iter().enumerate() {
            for (j, b) in elems.iter().enumerate() {
                add[i * q + j] = a.add(b).expect("same spec").index() as u32;
                mul[i * q + j] = a.mul(b).expect("same spec").index() as u32;
            }
        }
        OpTables { q, add, mul }
    }
}

/// Index-based operation tables for a small field.
pub(crate) struct OpTables {
    pub q: usize,
    add: Vec<u32>,
    mul: Vec<u32>,
}

impl OpTables {
    #[inline]
    pub fn add(&self, a: usize, b: usize) -> usize {
        self.add[a * self.q + b] as usize
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a * self.q + b] as usize
    }
}

/// An element of GF(p^k): `k` coefficients in `[0, p)`, little-endian.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldElement {
    spec: FieldSpec,
    coeffs: Vec<u64>,
}

impl FieldElement {
    pub fn spec(&self) -> &FieldSpec {
        &self.spec
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    /// Canonical integer encoding: `sum coeffs[j] * p^j`. Inverse of
    /// [`FieldSpec::element_from_index`].
    pub fn index(&self) -> u64 {
        let p = self.spec.p();
        self.coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    fn check_spec(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.spec == other.spec {
            Ok(())
        } else {
            Err(FieldError::SpecMismatch)
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_spec(other)?;
        let p = self.spec.p();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        Ok(FieldElement {
            spec: self.spec.clone(),
            coeffs,
        })
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_spec(other)?;
        let p = self.spec.p();
        let coeffs = self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        Ok(FieldElement {
            spec: self.spec.clone(),
            coeffs,
        })
    }

    pub fn neg(&self) -> FieldElement {
        let p = self.spec.p();
        FieldElement {
            spec: self.spec.clone(),
            coeffs: self.coeffs.iter().map(|&a| (p - a) % p).collect(),
        }
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.check_spec(other)?;
        let p = self.spec.p();
        let prod = poly_mul(&self.coeffs, &other.coeffs, p);
        let rem = poly_rem(prod, &self.spec.inner.modulus, p);
        Ok(self.sibling(rem))
    }

    /// Multiplicative inverse via the extended Euclidean algorithm on
    /// polynomials. Errors on zero.
    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let p = self.spec.p();
        let inv = poly_inv_mod(&self.coeffs, &self.spec.inner.modulus, p)
            .expect("modulus is irreducible, nonzero elements are invertible");
        Ok(self.sibling(inv))
    }

    /// `self^exp` by square-and-multiply. `0^0 = 1`.
    pub fn pow(&self, mut exp: u64) -> FieldElement {
        let mut result = self.spec.one();
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                result = result.mul(&base).expect("same spec");
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base).expect("same spec");
            }
        }
        result
    }

    fn sibling(&self, mut coeffs: Vec<u64>) -> FieldElement {
        coeffs.resize(self.spec.inner.k, 0);
        FieldElement {
            spec: self.spec.clone(),
            coeffs,
        }
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

// --- polynomial arithmetic over GF(p), little-endian trimmed vectors ---
//
// The zero polynomial is the empty vector; `deg` of a nonzero polynomial is
// the index of its last nonzero coefficient.

fn trimmed(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trimmed(out)
}

/// Remainder of `a` divided by nonzero `b`.
fn poly_rem(a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let b = trimmed(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = trimmed(a);
    let db = b.len() - 1;
    let lead_inv = inv_mod(b[db], p);
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = r[dr] * lead_inv % p;
        let shift = dr - db;
        for (i, &bc) in b.iter().enumerate() {
            let idx = i + shift;
            r[idx] = (r[idx] + p - factor * bc % p) % p;
        }
        r = trimmed(r);
        if r.is_empty() {
            break;
        }
    }
    r
}

fn poly_divmod(a: Vec<u64>, b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let b = trimmed(b.to_vec());
    assert!(!b.is_empty());
    let mut r = trimmed(a);
    let db = b.len() - 1;
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let lead_inv = inv_mod(b[db], p);
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db {
        let dr = r.len() - 1;
        let factor = r[dr] * lead_inv % p;
        let shift = dr - db;
        q[shift] = factor;
        for (i, &bc) in b.iter().enumerate() {
            let idx = i + shift;
            r[idx] = (r[idx] + p - factor * bc % p) % p;
        }
        r = trimmed(r);
        if r.is_empty() {
            break;
        }
    }
    (trimmed(q), r)
}

/// Inverse of `a` modulo the monic irreducible `modulus`.
fn poly_inv_mod(a: &[u64], modulus: &[u64], p: u64) -> Option<Vec<u64>> {
    let mut r0 = trimmed(modulus.to_vec());
    let mut r1 = poly_rem(a.to_vec(), modulus, p);
    if r1.is_empty() {
        return None;
    }
    let mut t0: Vec<u64> = Vec::new();
    let mut t1: Vec<u64> = vec![1];
    while !r1.is_empty() {
        let (q, r) = poly_divmod(r0.clone(), &r1, p);
        let qt1 = poly_mul(&q, &t1, p);
        let next_t = poly_sub(&t0, &qt1, p);
        r0 = r1;
        r1 = r;
        t0 = t1;
        t1 = next_t;
    }
    // r0 is a nonzero constant: the gcd of a and the irreducible modulus.
    debug_assert_eq!(r0.len(), 1);
    let scale = inv_mod(r0[0], p);
    let inv = t0.iter().map(|&c| c * scale % p).collect();
    Some(poly_rem(inv, modulus, p))
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let len = a.len().max(b.len());
    let mut out = vec![0u64; len];
    for (i, o) in out.iter_mut().enumerate() {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        *o = (x + p - y) % p;
    }
    trimmed(out)
}

fn inv_mod(a: u64, p: u64) -> u64 {
    // extended Euclid on integers; p prime, a not divisible by p
    let (mut t, mut new_t): (i128, i128) = (0, 1);
    let (mut r, mut new_r): (i128, i128) = (p as i128, (a % p) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "inverse of a multiple of p");
    ((t % p as i128 + p as i128) % p as i128) as u64
}

/// Exhaustive irreducibility test: trial division by every monic polynomial
/// of degree at most `deg(f) / 2`. Deterministic by construction.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let k = f.len() - 1;
    for d in 1..=k / 2 {
        let count = p.pow(d as u32);
        for idx in 0..count {
            let g = monic_from_index(idx, d, p);
            if poly_rem(f.to_vec(), &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// The monic degree-`d` polynomial whose lower coefficients are the base-`p`
/// digits of `idx`.
fn monic_from_index(idx: u64, d: usize, p: u64) -> Vec<u64> {
    let mut coeffs = vec![0u64; d + 1];
    let mut rest = idx;
    for c in coeffs.iter_mut().take(d) {
        *c = rest % p;
        rest /= p;
    }
    coeffs[d] = 1;
    coeffs
}

fn least_irreducible(p: u64, k: usize) -> Vec<u64> {
    let count = p.pow(k as u32);
    for idx in 0..count {
        let candidate = monic_from_index(idx, k, p);
        if is_irreducible(&candidate, p) {
            return candidate;
        }
    }
    unreachable!("an irreducible polynomial of every degree exists over GF(p)")
}
