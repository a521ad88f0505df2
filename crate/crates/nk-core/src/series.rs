//! Truncated Laurent/power series over a finite field with explicit
//! absolute-precision tracking.
//!
//! A [`TruncatedSeries`] stores the coefficients of t^i for
//! `valuation <= i < precision`; every coefficient below `precision` is
//! exact, everything at or above it is unknown. Requesting a coefficient at
//! an exponent >= precision is a hard error, never silently zero.
//!
//! Invariants:
//! - if the series is nonzero to precision, the stored coefficient at the
//!   valuation is nonzero
//! - a series that is zero to precision carries `valuation == precision`
//!   and no coefficients, so valuation is total
//! - output precision follows conservative rules: add/sub give
//!   min(N_f, N_g); mul gives min(N_f + v_g, N_g + v_f); div goes through
//!   the reciprocal; compose gives min(N_f, N_g)
//!
//! Storage is dense; reversion and m-th roots use coefficient recursion, so
//! the only division hazard in characteristic p is a single invertible
//! leading factor.

use std::fmt;

use thiserror::Error;

use crate::field::{Field, FieldElement, FieldSpec, MAX_DEGREE};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SeriesError {
    #[error("division by a series that is zero to its precision")]
    DivisionByZero,
    #[error("inner series of a composition must have valuation >= 1 (got {0})")]
    InnerValuation(i64),
    #[error("outer series of a composition must have valuation >= 0 (got {0})")]
    OuterValuation(i64),
    #[error("reversion needs valuation exactly 1 (got {0})")]
    ReversionValuation(i64),
    #[error("no {0}th root: the exponent is divisible by the characteristic {1}")]
    RootDivisibleChar(u64, u64),
    #[error("{0}th root needs a unit series of valuation 0 (got valuation {1})")]
    RootValuation(u64, i64),
    #[error("leading coefficient has no {0}th root in the field")]
    NoLeadingRoot(u64),
    #[error("series has no coefficients below its precision")]
    EmptyPrecisionRange,
}

/// A Laurent/power series over F_{p^r}, exact below its precision.
#[derive(Clone)]
pub struct TruncatedSeries {
    field: Field,
    valuation: i64,
    precision: i64,
    /// (precision - valuation) coefficient rows of r coordinates each;
    /// empty exactly when the series is zero to precision.
    data: Vec<u64>,
}

impl PartialEq for TruncatedSeries {
    fn eq(&self, other: &Self) -> bool {
        FieldSpec::same_field(&self.field, &other.field)
            && self.valuation == other.valuation
            && self.precision == other.precision
            && self.data == other.data
    }
}

impl Eq for TruncatedSeries {}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for TruncatedSeries {
    /// Text form `SER v=<valuation> N=<precision> <c_v> ... <c_{N-1}>`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SER v={} N={}", self.valuation, self.precision)?;
        let r = self.field.r();
        for i in 0..self.len() {
            let coords: Vec<String> = self.data[i * r..(i + 1) * r]
                .iter()
                .map(|c| c.to_string())
                .collect();
            write!(f, " {}", coords.join(","))?;
        }
        Ok(())
    }
}

impl TruncatedSeries {
    fn len(&self) -> usize {
        (self.precision - self.valuation) as usize
    }

    fn build(field: Field, valuation: i64, precision: i64, data: Vec<u64>) -> Self {
        let mut s = TruncatedSeries {
            field,
            valuation,
            precision,
            data,
        };
        s.normalize();
        s
    }

    /// Strips leading zero rows; an all-zero series becomes the canonical
    /// zero-to-precision form with valuation == precision.
    fn normalize(&mut self) {
        let r = self.field.r();
        let rows = self.data.len() / r;
        let mut lead = 0usize;
        while lead < rows && self.data[lead * r..(lead + 1) * r].iter().all(|&c| c == 0) {
            lead += 1;
        }
        if lead == rows {
            self.valuation = self.precision;
            self.data.clear();
        } else if lead > 0 {
            self.valuation += lead as i64;
            self.data.drain(..lead * r);
        }
    }

    pub fn zero(field: &Field, precision: i64) -> Self {
        TruncatedSeries {
            field: field.clone(),
            valuation: precision,
            precision,
            data: Vec::new(),
        }
    }

    pub fn one(field: &Field, precision: i64) -> Self {
        Self::monomial(&FieldElement::one(field), 0, precision)
    }

    /// The series c * t^k + O(t^precision).
    pub fn monomial(c: &FieldElement, k: i64, precision: i64) -> Self {
        let field = c.field().clone();
        assert!(
            k < precision,
            "monomial exponent {k} at or above precision {precision}"
        );
        if c.is_zero() {
            return Self::zero(&field, precision);
        }
        let r = field.r();
        let mut data = vec![0u64; ((precision - k) as usize) * r];
        data[..r].copy_from_slice(c.coords());
        TruncatedSeries {
            field,
            valuation: k,
            precision,
            data,
        }
    }

    /// The identity series t + O(t^precision).
    pub fn var(field: &Field, precision: i64) -> Self {
        Self::monomial(&FieldElement::one(field), 1, precision)
    }

    /// Builds a series from (exponent, coefficient) terms, summing repeats.
    pub fn from_terms(field: &Field, precision: i64, terms: &[(i64, FieldElement)]) -> Self {
        let r = field.r();
        let p = field.p();
        let val = terms
            .iter()
            .map(|(e, _)| *e)
            .min()
            .unwrap_or(precision)
            .min(precision);
        let mut data = vec![0u64; ((precision - val) as usize) * r];
        for (e, c) in terms {
            assert!(
                FieldSpec::same_field(field, c.field()),
                "term coefficient from a different field"
            );
            assert!(
                *e < precision,
                "term exponent {e} at or above precision {precision}"
            );
            let row = ((*e - val) as usize) * r;
            for (k, &v) in c.coords().iter().enumerate() {
                data[row + k] = (data[row + k] + v) % p;
            }
        }
        Self::build(field.clone(), val, precision, data)
    }

    /// Builds from a dense coefficient list starting at the given valuation;
    /// the precision is `valuation + coeffs.len()`.
    pub fn from_coefficients(field: &Field, valuation: i64, coeffs: Vec<FieldElement>) -> Self {
        let r = field.r();
        let precision = valuation + coeffs.len() as i64;
        let mut data = vec![0u64; coeffs.len() * r];
        for (i, c) in coeffs.iter().enumerate() {
            assert!(
                FieldSpec::same_field(field, c.field()),
                "coefficient from a different field"
            );
            data[i * r..(i + 1) * r].copy_from_slice(c.coords());
        }
        Self::build(field.clone(), valuation, precision, data)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    /// Valuation; equals the precision for a zero-to-precision series.
    pub fn valuation(&self) -> i64 {
        self.valuation
    }

    /// Absolute precision N: coefficients of t^i are known for i < N.
    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn is_zero_to_precision(&self) -> bool {
        self.data.is_empty()
    }

    /// Coefficient of t^e. Panics when e >= precision: that coefficient is
    /// unknown, and silently returning zero would corrupt exact arithmetic.
    pub fn coeff(&self, e: i64) -> FieldElement {
        assert!(
            e < self.precision,
            "coefficient of t^{e} requested but series is only known below t^{}",
            self.precision
        );
        match self.row_or_zero(e) {
            None => FieldElement::zero(&self.field),
            Some(row) => {
                FieldElement::from_coords(&self.field, row).expect("stored row is reduced")
            }
        }
    }

    pub fn leading_coeff(&self) -> Option<FieldElement> {
        if self.is_zero_to_precision() {
            None
        } else {
            Some(self.coeff(self.valuation))
        }
    }

    /// True when the two series have equal coefficients for all exponents
    /// below n; both must actually be known to precision n.
    pub fn agrees_to(&self, other: &Self, n: i64) -> bool {
        self.assert_same_field(other);
        assert!(
            self.precision >= n && other.precision >= n,
            "agreement check at precision {n} beyond known coefficients"
        );
        let lo = self.valuation.min(other.valuation);
        for e in lo..n {
            let zero_a = self.row_or_zero(e).is_none_or(|r| r.iter().all(|&c| c == 0));
            let zero_b = other.row_or_zero(e).is_none_or(|r| r.iter().all(|&c| c == 0));
            match (self.row_or_zero(e), other.row_or_zero(e)) {
                (Some(a), Some(b)) => {
                    if a != b {
                        return false;
                    }
                }
                _ => {
                    if zero_a != zero_b {
                        return false;
                    }
                }
            }
        }
        true
    }

    fn row_or_zero(&self, e: i64) -> Option<&[u64]> {
        if e < self.valuation || e >= self.precision {
            None
        } else {
            let r = self.field.r();
            let i = (e - self.valuation) as usize;
            Some(&self.data[i * r..(i + 1) * r])
        }
    }

    fn assert_same_field(&self, other: &Self) {
        assert!(
            FieldSpec::same_field(&self.field, &other.field),
            "series over different fields"
        );
    }

    pub fn add(&self, other: &Self) -> Self {
        self.assert_same_field(other);
        let precision = self.precision.min(other.precision);
        let val = self.valuation.min(other.valuation).min(precision);
        let r = self.field.r();
        let p = self.field.p();
        let mut data = vec![0u64; ((precision - val) as usize) * r];
        for s in [self, other] {
            for e in s.valuation..s.precision.min(precision) {
                if let Some(row) = s.row_or_zero(e) {
                    let o = ((e - val) as usize) * r;
                    for k in 0..r {
                        data[o + k] = (data[o + k] + row[k]) % p;
                    }
                }
            }
        }
        Self::build(self.field.clone(), val, precision, data)
    }

    pub fn neg(&self) -> Self {
        let p = self.field.p();
        let data = self.data.iter().map(|&c| (p - c) % p).collect();
        TruncatedSeries {
            field: self.field.clone(),
            valuation: self.valuation,
            precision: self.precision,
            data,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Multiplies every coefficient by a scalar; precision unchanged.
    pub fn scale(&self, c: &FieldElement) -> Self {
        assert!(FieldSpec::same_field(&self.field, c.field()));
        if c.is_zero() {
            return Self::zero(&self.field, self.precision);
        }
        let r = self.field.r();
        let mut data = vec![0u64; self.data.len()];
        let mut scratch = [0u64; 2 * MAX_DEGREE - 1];
        for i in 0..self.len() {
            scratch[..2 * r - 1].fill(0);
            conv_acc(&self.data[i * r..(i + 1) * r], c.coords(), &mut scratch);
            self.field.reduce_scratch(&mut scratch[..2 * r - 1]);
            data[i * r..(i + 1) * r].copy_from_slice(&scratch[..r]);
        }
        Self::build(self.field.clone(), self.valuation, self.precision, data)
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.assert_same_field(other);
        let precision = (self.precision + other.valuation).min(other.precision + self.valuation);
        if self.is_zero_to_precision() || other.is_zero_to_precision() {
            return Self::zero(&self.field, precision);
        }
        let val = self.valuation + other.valuation;
        let out_len = (precision - val) as usize;
        let data = mul_raw(
            &self.field,
            &self.data,
            self.len(),
            &other.data,
            other.len(),
            out_len,
        );
        Self::build(self.field.clone(), val, precision, data)
    }

    /// Reciprocal of a series that is nonzero to precision.
    pub fn recip(&self) -> Result<Self, SeriesError> {
        if self.is_zero_to_precision() {
            return Err(SeriesError::DivisionByZero);
        }
        let len = self.len();
        let u0_inv = self
            .coeff(self.valuation)
            .inverse()
            .expect("leading coefficient is nonzero");
        let mut g: Vec<FieldElement> = Vec::with_capacity(len);
        g.push(u0_inv.clone());
        for e in 1..len {
            // coefficient e of (unit part of self) * g must vanish
            let mut acc = FieldElement::zero(&self.field);
            for j in 1..=e {
                let uj = self.coeff(self.valuation + j as i64);
                if !uj.is_zero() {
                    acc = acc.add(&uj.mul(&g[e - j]));
                }
            }
            g.push(acc.neg().mul(&u0_inv));
        }
        Ok(Self::from_coefficients(
            &self.field,
            -self.valuation,
            g,
        ))
    }

    pub fn div(&self, other: &Self) -> Result<Self, SeriesError> {
        Ok(self.mul(&other.recip()?))
    }

    /// Multiplication by t^k: valuation and precision both shift by k.
    pub fn shift_mul(&self, k: i64) -> Self {
        TruncatedSeries {
            field: self.field.clone(),
            valuation: self.valuation + k,
            precision: self.precision + k,
            data: self.data.clone(),
        }
    }

    /// Drops precision to n (n <= current precision).
    pub fn truncated(&self, n: i64) -> Self {
        assert!(n <= self.precision, "cannot raise precision by truncation");
        if n <= self.valuation {
            return Self::zero(&self.field, n);
        }
        let r = self.field.r();
        let keep = ((n - self.valuation) as usize) * r;
        TruncatedSeries {
            field: self.field.clone(),
            valuation: self.valuation,
            precision: n,
            data: self.data[..keep].to_vec(),
        }
    }

    /// f^k by binary powering; k = 0 gives 1 at this series' precision.
    pub fn pow(&self, k: u64) -> Self {
        if k == 0 {
            return Self::one(&self.field, self.precision);
        }
        let mut acc: Option<TruncatedSeries> = None;
        let mut base = self.clone();
        let mut e = k;
        loop {
            if e & 1 == 1 {
                acc = Some(match acc {
                    None => base.clone(),
                    Some(a) => a.mul(&base),
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base);
        }
        acc.expect("k >= 1")
    }

    /// Coefficient-wise Frobenius: sends sum a_i t^i to sum a_i^p t^{pi}.
    /// Exact on all known coefficients, so the precision multiplies by p.
    pub fn frobenius(&self) -> Self {
        let p = self.field.p() as i64;
        let r = self.field.r();
        if self.is_zero_to_precision() {
            return Self::zero(&self.field, self.precision * p);
        }
        let val = self.valuation * p;
        let precision = self.precision * p;
        let mut data = vec![0u64; ((precision - val) as usize) * r];
        for i in 0..self.len() {
            let c = FieldElement::from_coords(&self.field, &self.data[i * r..(i + 1) * r])
                .expect("stored row is reduced")
                .frobenius();
            let o = i * (p as usize) * r;
            data[o..o + r].copy_from_slice(c.coords());
        }
        Self::build(self.field.clone(), val, precision, data)
    }

    /// Composition f(g(t)). Needs v_g >= 1 and v_f >= 0; the result is exact
    /// below min(N_f, N_g) because coefficient i of the composite depends
    /// only on coefficients <= i of both inputs. Horner evaluation.
    pub fn compose(&self, inner: &Self) -> Result<Self, SeriesError> {
        self.assert_same_field(inner);
        if inner.valuation < 1 {
            return Err(SeriesError::InnerValuation(inner.valuation));
        }
        if self.valuation < 0 {
            return Err(SeriesError::OuterValuation(self.valuation));
        }
        let cap = self.precision.min(inner.precision);
        if cap <= 0 {
            return Err(SeriesError::EmptyPrecisionRange);
        }
        let capu = cap as usize;
        let r = self.field.r();
        let p = self.field.p();
        if self.is_zero_to_precision() {
            return Ok(Self::zero(&self.field, cap));
        }
        let f_rows = self.dense_from_zero(capu);
        let g_rows = inner.dense_from_zero(capu);
        let mut acc = vec![0u64; capu * r];
        for e in (0..capu).rev() {
            if e != capu - 1 {
                acc = mul_raw(&self.field, &acc, capu, &g_rows, capu, capu);
            }
            for k in 0..r {
                acc[k] = (acc[k] + f_rows[e * r + k]) % p;
            }
        }
        Ok(Self::build(self.field.clone(), 0, cap, acc))
    }

    /// Dense coefficient rows for exponents 0..cap (valuation must be >= 0).
    fn dense_from_zero(&self, cap: usize) -> Vec<u64> {
        debug_assert!(self.valuation >= 0 || self.is_zero_to_precision());
        let r = self.field.r();
        let mut rows = vec![0u64; cap * r];
        for e in self.valuation.max(0)..self.precision.min(cap as i64) {
            if let Some(row) = self.row_or_zero(e) {
                let o = (e as usize) * r;
                rows[o..o + r].copy_from_slice(row);
            }
        }
        rows
    }

    /// Compositional inverse of a series t*(unit): returns g with
    /// f(g(t)) = g(f(t)) = t to this series' precision. The equation for each
    /// new coefficient is linear with leading factor a power of the leading
    /// coefficient, invertible in any characteristic.
    pub fn reversion(&self) -> Result<Self, SeriesError> {
        if self.valuation != 1 {
            return Err(SeriesError::ReversionValuation(self.valuation));
        }
        let nu = self.precision as usize;
        let r = self.field.r();
        // Powers f^1, ..., f^{nu-1} as dense rows capped at nu exponents.
        let f_dense = self.dense_from_zero(nu);
        let mut powers: Vec<Vec<u64>> = Vec::with_capacity(nu.saturating_sub(1));
        powers.push(f_dense.clone());
        for _ in 2..nu {
            let prev = powers.last().unwrap();
            powers.push(mul_raw(&self.field, prev, nu, &f_dense, nu, nu));
        }
        let f1_inv = self
            .coeff(1)
            .inverse()
            .expect("leading coefficient invertible");
        // Solve sum_i g_i * [t^e] f^i = [e == 1] for e = 2..nu.
        let mut g: Vec<FieldElement> = vec![f1_inv.clone()];
        let mut lead_inv = f1_inv.clone();
        for e in 2..nu {
            lead_inv = lead_inv.mul(&f1_inv);
            let mut acc = FieldElement::zero(&self.field);
            for (i, gi) in g.iter().enumerate() {
                let fi_e = FieldElement::from_coords(&self.field, &powers[i][e * r..(e + 1) * r])
                    .expect("stored row is reduced");
                if !fi_e.is_zero() {
                    acc = acc.add(&fi_e.mul(gi));
                }
            }
            g.push(acc.neg().mul(&lead_inv));
        }
        Ok(Self::from_coefficients(&self.field, 1, g))
    }

    /// m-th root of a unit series, p not dividing m. The root's leading
    /// coefficient is the lexicographically smallest m-th root of the input's
    /// leading coefficient (1 whenever the input leads with 1); each further
    /// coefficient solves a linear equation with factor m*(leading)^{m-1}.
    pub fn nth_root(&self, m: u64) -> Result<Self, SeriesError> {
        let p = self.field.p();
        if m == 0 || m.is_multiple_of(p) {
            return Err(SeriesError::RootDivisibleChar(m, p));
        }
        if self.is_zero_to_precision() || self.valuation != 0 {
            return Err(SeriesError::RootValuation(m, self.valuation));
        }
        let u0 = self.coeff(0);
        let rho = if u0.is_one() {
            FieldElement::one(&self.field)
        } else {
            crate::field::elements(&self.field)
                .find(|c| c.pow_u128(m as u128) == u0)
                .ok_or(SeriesError::NoLeadingRoot(m))?
        };
        let len = self.len();
        let lead_inv = rho
            .pow_u128((m - 1) as u128)
            .scale(m)
            .inverse()
            .expect("p does not divide m");
        let mut root: Vec<FieldElement> = vec![rho];
        for e in 1..len {
            // [t^e] of (prefix + r_e t^e)^m = [t^e] prefix^m + m rho^{m-1} r_e
            let terms: Vec<(i64, FieldElement)> = root
                .iter()
                .enumerate()
                .map(|(i, c)| (i as i64, c.clone()))
                .collect();
            let prefix = Self::from_terms(&self.field, e as i64 + 1, &terms);
            let known = prefix.pow(m).coeff(e as i64);
            let target = self.coeff(e as i64);
            root.push(target.sub(&known).mul(&lead_inv));
        }
        Ok(Self::from_coefficients(&self.field, 0, root))
    }
}

/// Accumulates the coordinate convolution of two rows into scratch without
/// reduction; callers bound the accumulation so u64 cannot overflow.
fn conv_acc(a: &[u64], b: &[u64], scratch: &mut [u64]) {
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            scratch[i + j] += ai * bj;
        }
    }
}

/// Dense truncated product of coefficient-row vectors:
/// out[e] = sum_{i+j=e} a_i * b_j for e < out_len.
fn mul_raw(
    field: &Field,
    a: &[u64],
    a_len: usize,
    b: &[u64],
    b_len: usize,
    out_len: usize,
) -> Vec<u64> {
    let r = field.r();
    let mut out = vec![0u64; out_len * r];
    if a_len == 0 || b_len == 0 {
        return out;
    }
    let mut scratch = [0u64; 2 * MAX_DEGREE - 1];
    for e in 0..out_len {
        scratch[..2 * r - 1].fill(0);
        let i_lo = e.saturating_sub(b_len - 1);
        let i_hi = e.min(a_len - 1);
        let mut any = false;
        for i in i_lo..=i_hi {
            let j = e - i;
            let arow = &a[i * r..(i + 1) * r];
            if arow.iter().any(|&c| c != 0) {
                conv_acc(arow, &b[j * r..(j + 1) * r], &mut scratch);
                any = true;
            }
        }
        if any {
            field.reduce_scratch(&mut scratch[..2 * r - 1]);
            out[e * r..(e + 1) * r].copy_from_slice(&scratch[..r]);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn f2() -> Field {
        FieldSpec::prime_field(2).unwrap()
    }

    fn f3() -> Field {
        FieldSpec::prime_field(3).unwrap()
    }

    fn f4() -> Field {
        FieldSpec::new(2, 2, None).unwrap()
    }

    /// Series over a prime field from (exponent, scalar) pairs.
    fn ser(field: &Field, precision: i64, terms: &[(i64, u64)]) -> TruncatedSeries {
        let elems: Vec<(i64, FieldElement)> = terms
            .iter()
            .map(|&(e, c)| (e, FieldElement::from_u64(field, c)))
            .collect();
        TruncatedSeries::from_terms(field, precision, &elems)
    }

    fn random_series(
        field: &Field,
        val_range: std::ops::Range<i64>,
        precision: i64,
        rng: &mut impl Rng,
    ) -> TruncatedSeries {
        let val = rng.random_range(val_range);
        let terms: Vec<(i64, FieldElement)> = (val..precision)
            .map(|e| (e, FieldElement::random(field, rng)))
            .collect();
        TruncatedSeries::from_terms(field, precision, &terms)
    }

    #[test]
    fn add_cancels_in_char_2() {
        let f = f2();
        let t = TruncatedSeries::var(&f, 8);
        let sum = t.add(&t);
        assert!(sum.is_zero_to_precision());
        assert_eq!(sum.valuation(), 8);
        assert_eq!(sum.precision(), 8);
    }

    #[test]
    fn mul_example() {
        let f = f2();
        let a = ser(&f, 8, &[(1, 1), (2, 1)]);
        let t = TruncatedSeries::var(&f, 8);
        assert_eq!(a.mul(&t), ser(&f, 9, &[(2, 1), (3, 1)]));
    }

    #[test]
    fn geometric_series_by_division() {
        let f = f2();
        let one = TruncatedSeries::one(&f, 5);
        let denom = ser(&f, 5, &[(0, 1), (1, 1)]);
        let q = one.div(&denom).unwrap();
        assert_eq!(q, ser(&f, 5, &[(0, 1), (1, 1), (2, 1), (3, 1), (4, 1)]));
    }

    #[test]
    fn division_by_zero_series() {
        let f = f2();
        let one = TruncatedSeries::one(&f, 5);
        let z = TruncatedSeries::zero(&f, 5);
        assert_eq!(one.div(&z).unwrap_err(), SeriesError::DivisionByZero);
    }

    #[test]
    fn mul_precision_rule() {
        let f = f2();
        let a = ser(&f, 6, &[(2, 1)]); // N=6, v=2
        let b = ser(&f, 4, &[(1, 1)]); // N=4, v=1
        let prod = a.mul(&b);
        assert_eq!(prod.valuation(), 3);
        // min(N_a + v_b, N_b + v_a) = min(7, 6)
        assert_eq!(prod.precision(), 6);
    }

    #[test]
    fn compose_squaring_truncates() {
        let f = f2();
        let outer = ser(&f, 6, &[(2, 1)]);
        let inner = ser(&f, 6, &[(1, 1), (3, 1)]);
        // (t + t^3)^2 = t^2 + t^6 over F_2, and t^6 is beyond precision 6.
        let c = outer.compose(&inner).unwrap();
        assert_eq!(c, ser(&f, 6, &[(2, 1)]));
    }

    #[test]
    fn compose_identity() {
        let f = f4();
        let mut rng = ChaCha20Rng::seed_from_u64(1);
        let a = random_series(&f, 0..3, 12, &mut rng);
        let t = TruncatedSeries::var(&f, 12);
        assert_eq!(a.compose(&t).unwrap(), a);
    }

    #[test]
    fn compose_example_char2() {
        let f = f2();
        let g = ser(&f, 5, &[(1, 1), (2, 1)]);
        // (t+t^2) + (t+t^2)^2 = t + t^4 over F_2
        let c = g.compose(&g).unwrap();
        assert_eq!(c, ser(&f, 5, &[(1, 1), (4, 1)]));
    }

    #[test]
    fn compose_rejects_bad_valuations() {
        let f = f2();
        let unit = TruncatedSeries::one(&f, 4);
        let t = TruncatedSeries::var(&f, 4);
        assert_eq!(t.compose(&unit).unwrap_err(), SeriesError::InnerValuation(0));
        let laurent = ser(&f, 4, &[(-1, 1)]);
        assert_eq!(
            laurent.compose(&t).unwrap_err(),
            SeriesError::OuterValuation(-1)
        );
    }

    #[test]
    fn reversion_examples() {
        let f = f2();
        let t = TruncatedSeries::var(&f, 8);
        assert_eq!(t.reversion().unwrap(), t);

        let g = ser(&f, 8, &[(1, 1), (2, 1)]);
        let inv = g.reversion().unwrap();
        let t8 = TruncatedSeries::var(&f, 8);
        assert_eq!(g.compose(&inv).unwrap(), t8);
        assert_eq!(inv.compose(&g).unwrap(), t8);
    }

    #[test]
    fn reversion_needs_valuation_one() {
        let f = f2();
        let bad = ser(&f, 6, &[(2, 1)]);
        assert_eq!(
            bad.reversion().unwrap_err(),
            SeriesError::ReversionValuation(2)
        );
    }

    #[test]
    fn nth_root_examples() {
        let f = f2();
        let one = TruncatedSeries::one(&f, 6);
        assert_eq!(one.nth_root(3).unwrap(), one);

        let u = ser(&f, 4, &[(0, 1), (1, 1)]);
        let root = u.nth_root(3).unwrap();
        // oracle: cubing the root recovers 1 + t below t^4
        assert!(root.pow(3).agrees_to(&u, 4));

        let f3 = f3();
        let v = ser(&f3, 4, &[(0, 1), (1, 1)]);
        assert_eq!(
            v.nth_root(3).unwrap_err(),
            SeriesError::RootDivisibleChar(3, 3)
        );
    }

    #[test]
    fn nth_root_nontrivial_leading() {
        let f = f3();
        // leading coefficient 2: the 7th root search must find one
        let u = ser(&f, 5, &[(0, 2), (1, 1)]);
        let root = u.nth_root(7).unwrap();
        assert!(root.pow(7).agrees_to(&u, 5));
    }

    #[test]
    fn shift_mul_examples() {
        let f = f2();
        let t = TruncatedSeries::var(&f, 8);
        assert_eq!(t.shift_mul(1), ser(&f, 9, &[(2, 1)]));
        let a = ser(&f, 8, &[(2, 1), (3, 1)]);
        assert_eq!(a.shift_mul(-2), ser(&f, 6, &[(0, 1), (1, 1)]));
        let one = TruncatedSeries::one(&f, 8);
        let shifted = one.shift_mul(-3);
        assert_eq!(shifted.valuation(), -3);
        assert_eq!(shifted.precision(), 5);
    }

    #[test]
    #[should_panic(expected = "only known below")]
    fn coeff_beyond_precision_is_a_hard_error() {
        let f = f2();
        let t = TruncatedSeries::var(&f, 4);
        let _ = t.coeff(4);
    }

    #[test]
    fn valuation_is_additive_on_products() {
        let f = f4();
        let mut rng = ChaCha20Rng::seed_from_u64(2);
        for _ in 0..200 {
            let a = random_series(&f, -3..5, 10, &mut rng);
            let b = random_series(&f, -3..5, 10, &mut rng);
            if a.is_zero_to_precision() || b.is_zero_to_precision() {
                continue;
            }
            assert_eq!(a.mul(&b).valuation(), a.valuation() + b.valuation());
        }
    }

    proptest! {
        #[test]
        fn ring_laws(seed in 0u64..500) {
            let f = f4();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let a = random_series(&f, -2..4, 12, &mut rng);
            let b = random_series(&f, -2..4, 12, &mut rng);
            let c = random_series(&f, -2..4, 12, &mut rng);
            prop_assert_eq!(a.mul(&b), b.mul(&a));
            let ab_c = a.mul(&b).mul(&c);
            let a_bc = a.mul(&b.mul(&c));
            let n = ab_c.precision().min(a_bc.precision());
            prop_assert!(ab_c.agrees_to(&a_bc, n));
            let lhs = a.mul(&b.add(&c));
            let rhs = a.mul(&b).add(&a.mul(&c));
            let n = lhs.precision().min(rhs.precision());
            prop_assert!(lhs.agrees_to(&rhs, n));
        }

        #[test]
        fn compose_is_associative(seed in 0u64..300) {
            let f = f4();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let a = random_series(&f, 1..2, 10, &mut rng);
            let b = random_series(&f, 1..2, 10, &mut rng);
            let c = random_series(&f, 1..2, 10, &mut rng);
            prop_assume!(!b.is_zero_to_precision());
            prop_assume!(!c.is_zero_to_precision());
            let lhs = a.compose(&b).unwrap().compose(&c).unwrap();
            let rhs = a.compose(&b.compose(&c).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn reversion_round_trip(seed in 0u64..300) {
            let f = f4();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let mut a = random_series(&f, 1..2, 10, &mut rng);
            if a.valuation() != 1 {
                a = a.add(&TruncatedSeries::var(&f, 10));
            }
            prop_assume!(a.valuation() == 1);
            let g = a.reversion().unwrap();
            let t = TruncatedSeries::var(&f, 10);
            prop_assert_eq!(a.compose(&g).unwrap(), t.clone());
            prop_assert_eq!(g.compose(&a).unwrap(), t);
        }

        #[test]
        fn frobenius_is_additive_on_series(seed in 0u64..200) {
            let f = f3();
            let mut rng = ChaCha20Rng::seed_from_u64(seed);
            let a = random_series(&f, 0..3, 9, &mut rng);
            let b = random_series(&f, 0..3, 9, &mut rng);
            let lhs = a.add(&b).pow(3);
            let rhs = a.pow(3).add(&b.pow(3));
            let n = lhs.precision().min(rhs.precision());
            prop_assert!(lhs.agrees_to(&rhs, n));
        }
    }
}
