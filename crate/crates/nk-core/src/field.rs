//! Exact arithmetic in finite fields F_{p^r} for small p and r.
//!
//! A field is described by a [`FieldSpec`]: a prime `p`, an extension degree
//! `r`, and a monic irreducible modulus of degree `r` over F_p (constant
//! coefficient first). Elements are coordinate vectors in the basis
//! 1, x, ..., x^{r-1}.
//!
//! Invariants:
//! - the modulus is monic of degree r and irreducible over F_p, checked at
//!   construction by trial division against all monic polynomials of degree
//!   <= r/2
//! - element coordinates are always reduced modulo p
//! - all values are immutable after construction and all operations are pure,
//!   so everything here is freely shareable across threads

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Largest supported extension degree.
pub const MAX_DEGREE: usize = 16;
/// Largest supported characteristic.
pub const MAX_PRIME: u64 = 97;

/// Shared handle to a field description.
pub type Field = Arc<FieldSpec>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("p = {0} is not a prime in 2..=97")]
    BadCharacteristic(u64),
    #[error("extension degree {0} outside 1..={MAX_DEGREE}")]
    BadDegree(usize),
    #[error("modulus has {got} coefficients, expected {want}")]
    ModulusLength { got: usize, want: usize },
    #[error("modulus is not monic")]
    NotMonic,
    #[error("modulus is reducible: divisible by a monic polynomial of degree {0}")]
    Reducible(usize),
    #[error("element has {got} coordinates, field supports at most {max}")]
    TooManyCoordinates { got: usize, max: usize },
    #[error("elements belong to different fields")]
    Mismatch,
    #[error("division by zero")]
    DivisionByZero,
}

/// The coefficient field F_{p^r}, shared behind an [`Arc`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldSpec {
    p: u64,
    r: usize,
    /// r+1 coefficients, constant term first, last entry 1.
    modulus: Vec<u64>,
}

impl FieldSpec {
    /// Builds F_{p^r}. With `modulus = None` and r = 1 any degree-1 modulus
    /// works and `x + 1` is used; with `modulus = None` and r > 1 the
    /// lexicographically first monic irreducible of degree r is selected, so
    /// identical inputs always give identical fields.
    pub fn new(p: u64, r: usize, modulus: Option<Vec<u64>>) -> Result<Field, FieldError> {
        if !(2..=MAX_PRIME).contains(&p) || !is_prime_u64(p) {
            return Err(FieldError::BadCharacteristic(p));
        }
        if !(1..=MAX_DEGREE).contains(&r) {
            return Err(FieldError::BadDegree(r));
        }
        let modulus = match modulus {
            Some(m) => {
                if m.len() != r + 1 {
                    return Err(FieldError::ModulusLength {
                        got: m.len(),
                        want: r + 1,
                    });
                }
                let m: Vec<u64> = m.iter().map(|&c| c % p).collect();
                if m[r] != 1 {
                    return Err(FieldError::NotMonic);
                }
                if let Some(d) = reducible_degree(&m, p) {
                    return Err(FieldError::Reducible(d));
                }
                m
            }
            None => first_irreducible(p, r),
        };
        Ok(Arc::new(FieldSpec { p, r, modulus }))
    }

    /// The prime field F_p.
    pub fn prime_field(p: u64) -> Result<Field, FieldError> {
        FieldSpec::new(p, 1, None)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    /// Field size q = p^r.
    pub fn order(&self) -> u128 {
        (self.p as u128).pow(self.r as u32)
    }

    pub fn is_char2(&self) -> bool {
        self.p == 2
    }

    pub(crate) fn same_field(a: &Field, b: &Field) -> bool {
        Arc::ptr_eq(a, b) || a == b
    }

    /// Reduces a convolution scratch buffer of length 2r-1 modulo
    /// (p, modulus) in place; the result occupies the first r entries.
    pub(crate) fn reduce_scratch(&self, scratch: &mut [u64]) {
        let r = self.r;
        for idx in (r..2 * r - 1).rev() {
            let c = scratch[idx] % self.p;
            scratch[idx] = 0;
            if c != 0 {
                for k in 0..r {
                    // subtract c * modulus[k] * x^(idx-r+k)
                    scratch[idx - r + k] += c * (self.p - self.modulus[k] % self.p) % self.p;
                }
            }
        }
        for v in scratch[..r].iter_mut() {
            *v %= self.p;
        }
    }
}

pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Remainder of a modulo b over F_p, both constant-first. b must be nonzero.
fn poly_rem(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let bdeg = poly_deg(b).expect("division by zero polynomial");
    let lead_inv = mod_inverse(b[bdeg], p);
    let mut rem: Vec<u64> = a.to_vec();
    while let Some(rdeg) = poly_deg(&rem) {
        if rdeg < bdeg {
            break;
        }
        let factor = rem[rdeg] * lead_inv % p;
        let shift = rdeg - bdeg;
        for k in 0..=bdeg {
            let sub = factor * b[k] % p;
            rem[shift + k] = (rem[shift + k] + p - sub) % p;
        }
    }
    rem
}

fn poly_deg(a: &[u64]) -> Option<usize> {
    a.iter().rposition(|&c| c != 0)
}

fn mod_inverse(a: u64, p: u64) -> u64 {
    // p prime, a != 0 mod p
    mod_pow(a % p, p - 2, p)
}

fn mod_pow(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

/// Trial division against every monic polynomial of degree <= deg(m)/2.
/// Returns the degree of the first divisor found.
fn reducible_degree(m: &[u64], p: u64) -> Option<usize> {
    let r = poly_deg(m).unwrap_or(0);
    for d in 1..=r / 2 {
        let mut divisor = vec![0u64; d + 1];
        divisor[d] = 1;
        loop {
            if poly_deg(&poly_rem(m, &divisor, p)).is_none() {
                return Some(d);
            }
            if !next_poly(&mut divisor[..d], p) {
                break;
            }
        }
    }
    None
}

/// Advances the non-leading coefficients through lexicographic order
/// (constant coefficient most significant). Returns false after the last one.
fn next_poly(low: &mut [u64], p: u64) -> bool {
    for i in (0..low.len()).rev() {
        low[i] += 1;
        if low[i] < p {
            return true;
        }
        low[i] = 0;
    }
    false
}

fn first_irreducible(p: u64, r: usize) -> Vec<u64> {
    let mut m = vec![0u64; r + 1];
    m[r] = 1;
    if r == 1 {
        m[0] = 1; // x + 1; any monic linear works for the prime field
        return m;
    }
    loop {
        if m[0] != 0 && reducible_degree(&m, p).is_none() {
            return m;
        }
        if !next_poly(&mut m[..r], p) {
            unreachable!("an irreducible of every degree exists over F_p");
        }
    }
}

/// An element of F_{p^r}: coordinates in the basis 1, x, ..., x^{r-1},
/// reduced modulo p.
#[derive(Clone)]
pub struct FieldElement {
    spec: Field,
    coords: Vec<u64>,
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        FieldSpec::same_field(&self.spec, &other.spec) && self.coords == other.coords
    }
}

impl Eq for FieldElement {}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FieldElement({self})")
    }
}

impl fmt::Display for FieldElement {
    /// Text form: coordinates comma-separated; a single integer for r = 1.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FieldElement {
    pub fn zero(field: &Field) -> Self {
        FieldElement {
            spec: field.clone(),
            coords: vec![0; field.r],
        }
    }

    pub fn one(field: &Field) -> Self {
        Self::from_u64(field, 1)
    }

    /// The constant n viewed in the prime field inside F_{p^r}.
    pub fn from_u64(field: &Field, n: u64) -> Self {
        let mut coords = vec![0; field.r];
        coords[0] = n % field.p;
        FieldElement {
            spec: field.clone(),
            coords,
        }
    }

    /// Builds an element from coordinates, reducing modulo p. Missing
    /// trailing coordinates are treated as zero.
    pub fn from_coords(field: &Field, coords: &[u64]) -> Result<Self, FieldError> {
        if coords.len() > field.r {
            return Err(FieldError::TooManyCoordinates {
                got: coords.len(),
                max: field.r,
            });
        }
        let mut c = vec![0; field.r];
        for (i, &v) in coords.iter().enumerate() {
            c[i] = v % field.p;
        }
        Ok(FieldElement {
            spec: field.clone(),
            coords: c,
        })
    }

    /// The class of x (reduced by the modulus when r = 1).
    pub fn gen_x(field: &Field) -> Self {
        if field.r == 1 {
            // x = -c0 mod (x + c0)
            Self::from_u64(field, field.p - field.modulus[0] % field.p)
        } else {
            let mut coords = vec![0; field.r];
            coords[1] = 1;
            FieldElement {
                spec: field.clone(),
                coords,
            }
        }
    }

    /// Decodes a lexicographic index (coordinate e0 most significant).
    pub fn from_index(field: &Field, index: u128) -> Self {
        let mut coords = vec![0u64; field.r];
        let mut idx = index % field.order();
        for i in (0..field.r).rev() {
            coords[i] = (idx % field.p as u128) as u64;
            idx /= field.p as u128;
        }
        FieldElement {
            spec: field.clone(),
            coords,
        }
    }

    /// Lexicographic index of the coordinate vector, e0 most significant.
    pub fn index(&self) -> u128 {
        let mut idx = 0u128;
        for &c in &self.coords {
            idx = idx * self.spec.p as u128 + c as u128;
        }
        idx
    }

    /// Uniformly random element.
    pub fn random(field: &Field, rng: &mut impl rand::Rng) -> Self {
        let coords: Vec<u64> = (0..field.r).map(|_| rng.random_range(0..field.p)).collect();
        FieldElement {
            spec: field.clone(),
            coords,
        }
    }

    pub fn field(&self) -> &Field {
        &self.spec
    }

    pub fn coords(&self) -> &[u64] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coords[0] == 1 && self.coords[1..].iter().all(|&c| c == 0)
    }

    fn assert_same_field(&self, other: &Self) {
        assert!(
            FieldSpec::same_field(&self.spec, &other.spec),
            "elements belong to different fields"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_field(other);
        let p = self.spec.p;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + b) % p)
            .collect();
        FieldElement {
            spec: self.spec.clone(),
            coords,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.assert_same_field(other);
        let p = self.spec.p;
        let coords = self
            .coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| (a + p - b) % p)
            .collect();
        FieldElement {
            spec: self.spec.clone(),
            coords,
        }
    }

    pub fn neg(&self) -> Self {
        let p = self.spec.p;
        let coords = self.coords.iter().map(|&a| (p - a) % p).collect();
        FieldElement {
            spec: self.spec.clone(),
            coords,
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_field(other);
        let r = self.spec.r;
        let mut scratch = [0u64; 2 * MAX_DEGREE - 1];
        for i in 0..r {
            if self.coords[i] == 0 {
                continue;
            }
            for j in 0..r {
                scratch[i + j] += self.coords[i] * other.coords[j];
            }
        }
        self.spec.reduce_scratch(&mut scratch[..2 * r - 1]);
        FieldElement {
            spec: self.spec.clone(),
            coords: scratch[..r].to_vec(),
        }
    }

    /// Multiplies by the integer scalar n (viewed in F_p).
    pub fn scale(&self, n: u64) -> Self {
        let p = self.spec.p;
        let n = n % p;
        let coords = self.coords.iter().map(|&a| a * n % p).collect();
        FieldElement {
            spec: self.spec.clone(),
            coords,
        }
    }

    /// Multiplicative inverse via extended Euclid on the modulus.
    pub fn inverse(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        let p = self.spec.p;
        // Extended Euclid over F_p[x]: maintain t-coefficients for `self`.
        let mut r0: Vec<u64> = self.spec.modulus.clone();
        let mut r1: Vec<u64> = self.coords.clone();
        let mut t0: Vec<u64> = vec![0];
        let mut t1: Vec<u64> = vec![1];
        while let Some(d1) = poly_deg(&r1) {
            if d1 == 0 {
                break;
            }
            let (q, rem) = poly_divmod(&r0, &r1, p);
            let t2 = poly_sub(&t0, &poly_mul(&q, &t1, p), p);
            r0 = r1;
            r1 = rem;
            t0 = t1;
            t1 = t2;
        }
        // r1 is a nonzero constant: gcd(self, modulus) = 1.
        let c_inv = mod_inverse(r1[0], p);
        let mut coords = vec![0u64; self.spec.r];
        for (i, &c) in t1.iter().enumerate() {
            if i < coords.len() {
                coords[i] = c * c_inv % p;
            }
        }
        Ok(FieldElement {
            spec: self.spec.clone(),
            coords,
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self, FieldError> {
        self.assert_same_field(other);
        Ok(self.mul(&other.inverse()?))
    }

    /// Power with a signed machine-integer exponent; negative exponents go
    /// through the inverse.
    pub fn pow(&self, exp: i64) -> Result<Self, FieldError> {
        if exp < 0 {
            return self.inverse()?.pow(-exp);
        }
        Ok(self.pow_u128(exp as u128))
    }

    pub fn pow_u128(&self, mut exp: u128) -> Self {
        let mut acc = Self::one(&self.spec);
        let mut base = self.clone();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul(&base);
            }
            exp >>= 1;
            if exp > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Frobenius a -> a^p.
    pub fn frobenius(&self) -> Self {
        self.pow_u128(self.spec.p as u128)
    }

    /// Trace to the prime field: a + a^p + ... + a^{p^{r-1}}, returned as the
    /// integer in [0, p) it represents.
    pub fn trace_to_prime(&self) -> u64 {
        let mut acc = self.clone();
        let mut term = self.clone();
        for _ in 1..self.spec.r {
            term = term.frobenius();
            acc = acc.add(&term);
        }
        debug_assert!(acc.coords[1..].iter().all(|&c| c == 0));
        acc.coords[0]
    }

    /// Artin-Schreier operator: a^p - a.
    pub fn wp(&self) -> Self {
        self.frobenius().sub(self)
    }
}

fn poly_divmod(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let bdeg = poly_deg(b).expect("division by zero polynomial");
    let lead_inv = mod_inverse(b[bdeg], p);
    let mut rem: Vec<u64> = a.to_vec();
    let adeg = match poly_deg(&rem) {
        Some(d) if d >= bdeg => d,
        _ => return (vec![0], rem),
    };
    let mut quot = vec![0u64; adeg - bdeg + 1];
    for shift in (0..=adeg - bdeg).rev() {
        let factor = rem[shift + bdeg] * lead_inv % p;
        quot[shift] = factor;
        if factor != 0 {
            for k in 0..=bdeg {
                let sub = factor * b[k] % p;
                rem[shift + k] = (rem[shift + k] + p - sub) % p;
            }
        }
    }
    (quot, rem)
}

fn poly_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + ai * bj) % p;
        }
    }
    out
}

fn poly_sub(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut out = vec![0u64; a.len().max(b.len())];
    for (i, o) in out.iter_mut().enumerate() {
        let av = a.get(i).copied().unwrap_or(0);
        let bv = b.get(i).copied().unwrap_or(0);
        *o = (av + p - bv) % p;
    }
    out
}

/// Binary arithmetic operations, with the error checks of the text interface.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

/// Checked entry point for the four binary operations.
pub fn arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement, FieldError> {
    if !FieldSpec::same_field(a.field(), b.field()) {
        return Err(FieldError::Mismatch);
    }
    match op {
        ArithOp::Add => Ok(a.add(b)),
        ArithOp::Sub => Ok(a.sub(b)),
        ArithOp::Mul => Ok(a.mul(b)),
        ArithOp::Div => a.div(b),
    }
}

/// Solves x^p - x = a by exhaustive search in lexicographic coordinate
/// order; returns the first (smallest) solution, or None when the trace of
/// a is nonzero.
pub fn wp_solve(a: &FieldElement) -> Option<FieldElement> {
    let field = a.field();
    let q = field.order();
    for idx in 0..q {
        let c = FieldElement::from_index(field, idx);
        if &c.wp() == a {
            return Some(c);
        }
    }
    None
}

/// All field elements in lexicographic coordinate order.
pub fn elements(field: &Field) -> impl Iterator<Item = FieldElement> + '_ {
    (0..field.order()).map(move |i| FieldElement::from_index(field, i))
}
