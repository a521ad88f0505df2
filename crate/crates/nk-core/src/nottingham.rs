//! The automorphism group of k[[t]] at finite precision.
//!
//! An automorphism is stored through its action on t, a series of valuation 1
//! with invertible leading coefficient; leading coefficient 1 means membership
//! in the Nottingham group N(k). Composition convention: `a.compose(&b)` acts
//! by t -> a(b(t)), so conjugation of s by u is u∘s∘u^{-1}.
//!
//! A truncated series cannot certify infinite order, so order statements are
//! always "at precision N": [`Automorphism::order`] reports the precision it
//! tested at, and every operation that needs an exact order states its
//! certification requirement and fails loudly when it cannot be met.

use std::fmt;

use num_rational::Ratio;
use thiserror::Error;

use crate::field::{Field, FieldElement};
use crate::series::{SeriesError, TruncatedSeries};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NottinghamError {
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("series does not define an automorphism: valuation {0} is not 1")]
    NotAutomorphism(i64),
    #[error("automorphism is outside the Nottingham group (leading coefficient is not 1)")]
    NotNottingham,
    #[error("order {expected} not certified at precision {precision}")]
    WrongOrder { expected: u128, precision: i64 },
    #[error("precision {have} too small, need at least {need}")]
    InsufficientPrecision { have: i64, need: i64 },
    #[error("ramification data violates an invariant ({0}); the input is not of the declared order")]
    ProfileInvariant(String),
    #[error("m = {m} is divisible by the characteristic {p}")]
    MDivisibleByP { m: u64, p: u64 },
    #[error("c must be nonzero")]
    ZeroC,
    #[error("this operation requires characteristic 2, field has characteristic {0}")]
    CharacteristicNot2(u64),
    #[error("p = {0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("different exponent {0} is negative")]
    NegativeDifferent(i128),
    #[error("artin-schreier input must have valuation >= 1 (got {0})")]
    ArtinSchreierValuation(i64),
    #[error("parameter {name} = {got} out of range")]
    Parameter { name: &'static str, got: i128 },
    #[error("internal valuation mismatch: {0}")]
    InternalValuation(String),
}

/// An element of Aut(k[[t]]) given by its action on t.
#[derive(Clone, PartialEq, Eq)]
pub struct Automorphism {
    action: TruncatedSeries,
}

impl fmt::Debug for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Automorphism({})", self.action)
    }
}

impl fmt::Display for Automorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.action)
    }
}

impl Automorphism {
    pub fn new(action: TruncatedSeries) -> Result<Self, NottinghamError> {
        if action.is_zero_to_precision() || action.valuation() != 1 {
            return Err(NottinghamError::NotAutomorphism(action.valuation()));
        }
        Ok(Automorphism { action })
    }

    pub fn identity(field: &Field, precision: i64) -> Self {
        Automorphism {
            action: TruncatedSeries::var(field, precision),
        }
    }

    /// The torus element t -> a t.
    pub fn scaling(a: &FieldElement, precision: i64) -> Result<Self, NottinghamError> {
        Automorphism::new(TruncatedSeries::monomial(a, 1, precision))
    }

    /// Random element of N(k): leading coefficient 1, the rest uniform.
    pub fn random_nottingham(field: &Field, precision: i64, rng: &mut impl rand::Rng) -> Self {
        let mut terms = vec![(1, FieldElement::one(field))];
        for e in 2..precision {
            terms.push((e, FieldElement::random(field, rng)));
        }
        Automorphism {
            action: TruncatedSeries::from_terms(field, precision, &terms),
        }
    }

    pub fn action(&self) -> &TruncatedSeries {
        &self.action
    }

    pub fn field(&self) -> &Field {
        self.action.field()
    }

    pub fn precision(&self) -> i64 {
        self.action.precision()
    }

    pub fn leading_coeff(&self) -> FieldElement {
        self.action.coeff(1)
    }

    /// Membership in N(k): the image of t starts with 1*t.
    pub fn in_nottingham(&self) -> bool {
        self.leading_coeff().is_one()
    }

    /// (self ∘ other)(t) = self(other(t)); precision min of the two.
    pub fn compose(&self, other: &Self) -> Self {
        Automorphism {
            action: self
                .action
                .compose(&other.action)
                .expect("valuation-1 series always compose"),
        }
    }

    pub fn inverse(&self) -> Self {
        Automorphism {
            action: self
                .action
                .reversion()
                .expect("valuation-1 series always revert"),
        }
    }

    /// self^k by binary powering; negative k goes through the inverse.
    pub fn pow(&self, k: i64) -> Self {
        if k < 0 {
            return self.inverse().pow_u(k.unsigned_abs());
        }
        self.pow_u(k as u64)
    }

    fn pow_u(&self, k: u64) -> Self {
        let mut acc = Automorphism::identity(self.field(), self.precision());
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.compose(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.compose(&base);
            }
        }
        acc
    }

    pub fn conjugate_by(&self, u: &Self) -> Self {
        u.compose(self).compose(&u.inverse())
    }

    /// Identity to the stored precision.
    pub fn is_identity(&self) -> bool {
        self.action == TruncatedSeries::var(self.field(), self.precision())
    }

    /// Smallest k in 1..=bound with self^k = id to the working precision.
    pub fn order(&self, bound: u32) -> OrderResult {
        assert!(bound >= 1);
        let precision = self.precision();
        let mut acc = self.clone();
        for k in 1..=bound {
            if acc.is_identity() {
                return OrderResult {
                    order: Some(k),
                    precision,
                };
            }
            if k < bound {
                acc = acc.compose(self);
            }
        }
        OrderResult {
            order: None,
            precision,
        }
    }
}

/// Order detection result; the precision records what "identity" meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrderResult {
    pub order: Option<u32>,
    pub precision: i64,
}

/// Breaks, increments and different exponent of a cyclic group of order p^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RamificationProfile {
    pub p: u64,
    pub n: usize,
    pub lower_breaks: Vec<i64>,
    pub increments: Vec<i64>,
    pub upper_breaks: Vec<i64>,
    pub different: i128,
}

impl fmt::Display for RamificationProfile {
    /// `PROFILE p=<p> n=<n> lower=<..> upper=<..> i=<..> different=<d>`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[i64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(
            f,
            "PROFILE p={} n={} lower={} upper={} i={} different={}",
            self.p,
            self.n,
            join(&self.lower_breaks),
            join(&self.upper_breaks),
            join(&self.increments),
            self.different
        )
    }
}

impl RamificationProfile {
    /// Builds the full profile from the lower breaks, validating the break
    /// invariants: strictly increasing, congruent mod p, increments positive
    /// integers, upper breaks passing the class-field-theory conditions.
    pub fn from_lower_breaks(p: u64, lower: &[i64]) -> Result<Self, NottinghamError> {
        let n = lower.len();
        if n == 0 {
            return Err(NottinghamError::Parameter { name: "n", got: 0 });
        }
        let inv = |msg: String| Err(NottinghamError::ProfileInvariant(msg));
        let mut increments = Vec::with_capacity(n);
        for j in 0..n {
            if lower[j] <= 0 {
                return inv(format!("lower break b_{j} = {} not positive", lower[j]));
            }
            if j > 0 {
                if lower[j] <= lower[j - 1] {
                    return inv(format!("lower breaks not strictly increasing at j = {j}"));
                }
                if (lower[j] - lower[0]) % p as i64 != 0 {
                    return inv(format!("lower breaks not congruent mod {p} at j = {j}"));
                }
                let diff = lower[j] - lower[j - 1];
                let pj = (p as i64).pow(j as u32);
                if diff % pj != 0 {
                    return inv(format!(
                        "increment at j = {j} is not an integer: {diff} not divisible by {pj}"
                    ));
                }
                increments.push(diff / pj);
            } else {
                increments.push(lower[0]);
            }
        }
        let mut upper = Vec::with_capacity(n);
        let mut acc = 0i64;
        for &i in &increments {
            acc += i;
            upper.push(acc);
        }
        if let Err(v) = validate_upper_breaks(p, &upper) {
            return inv(format!("upper breaks invalid: {v}"));
        }
        let different = different_from_increments(p, &increments);
        Ok(RamificationProfile {
            p,
            n,
            lower_breaks: lower.to_vec(),
            increments,
            upper_breaks: upper,
            different,
        })
    }

    pub fn from_upper_breaks(p: u64, upper: &[i64]) -> Result<Self, NottinghamError> {
        validate_upper_breaks(p, upper)
            .map_err(|v| NottinghamError::ProfileInvariant(v.to_string()))?;
        let mut increments = Vec::with_capacity(upper.len());
        let mut prev = 0i64;
        for &b in upper {
            increments.push(b - prev);
            prev = b;
        }
        let mut lower = Vec::with_capacity(upper.len());
        let mut acc = 0i64;
        for (j, &i) in increments.iter().enumerate() {
            acc += (p as i64).pow(j as u32) * i;
            lower.push(acc);
        }
        let different = different_from_increments(p, &increments);
        Ok(RamificationProfile {
            p,
            n: upper.len(),
            lower_breaks: lower,
            increments,
            upper_breaks: upper.to_vec(),
            different,
        })
    }
}

/// d(G) = (i_0+1)(p^n-1) + i_1(p^n-p) + ... + i_{n-1}(p^n-p^{n-1}).
fn different_from_increments(p: u64, increments: &[i64]) -> i128 {
    let n = increments.len() as u32;
    let pn = (p as i128).pow(n);
    let mut d = (increments[0] as i128 + 1) * (pn - 1);
    for (j, &i) in increments.iter().enumerate().skip(1) {
        d += i as i128 * (pn - (p as i128).pow(j as u32));
    }
    d
}

/// Different exponent attached to a valid upper break sequence.
pub fn different_from_upper_breaks(p: u64, upper: &[i64]) -> Result<i128, NottinghamError> {
    Ok(RamificationProfile::from_upper_breaks(p, upper)?.different)
}

/// The three conditions on upper break sequences of a cyclic p^n-group:
/// p does not divide b(0); b(j) >= p*b(j-1); and p does not divide b(j)
/// whenever that inequality is strict. All entries must be positive.
pub fn validate_upper_breaks(p: u64, seq: &[i64]) -> Result<(), BreakViolation> {
    let p_i = p as i64;
    for (j, &b) in seq.iter().enumerate() {
        if b <= 0 {
            return Err(BreakViolation::NonPositive { j, value: b });
        }
        if j == 0 {
            if b % p_i == 0 {
                return Err(BreakViolation::FirstBreakDivisible { p, value: b });
            }
        } else {
            let min = p_i * seq[j - 1];
            if b < min {
                return Err(BreakViolation::GrowthTooSlow { j, value: b, min });
            }
            if b > min && b % p_i == 0 {
                return Err(BreakViolation::StrictButDivisible { j, value: b, p });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BreakViolation {
    #[error("b({j}) = {value} is not positive")]
    NonPositive { j: usize, value: i64 },
    #[error("p = {p} divides the first upper break {value}")]
    FirstBreakDivisible { p: u64, value: i64 },
    #[error("b({j}) = {value} is below p times the previous break ({min})")]
    GrowthTooSlow { j: usize, value: i64, min: i64 },
    #[error("b({j}) = {value} grows strictly but is divisible by p = {p}")]
    StrictButDivisible { j: usize, value: i64, p: u64 },
}

/// All valid upper break sequences of length n with last entry <= max_b,
/// in lexicographic order.
pub fn enumerate_upper_breaks(p: u64, n: usize, max_b: i64) -> Vec<Vec<i64>> {
    fn rec(p: u64, n: usize, max_b: i64, current: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if current.len() == n {
            out.push(current.clone());
            return;
        }
        let p_i = p as i64;
        let lo = match current.last() {
            None => 1,
            Some(&prev) => p_i * prev,
        };
        for b in lo..=max_b {
            let ok = if current.is_empty() {
                b % p_i != 0
            } else {
                b == lo || b % p_i != 0
            };
            if ok {
                current.push(b);
                rec(p, n, max_b, current, out);
                current.pop();
            }
        }
    }
    let mut out = Vec::new();
    let mut current = Vec::with_capacity(n);
    rec(p, n, max_b, &mut current, &mut out);
    out
}

/// Sharp lower bound (p^{2n} + p^{n+1} + p^n - p - 2) / (p + 1) for the
/// different exponent of a cyclic group of order p^n.
pub fn different_lower_bound(p: u64, n: usize) -> Result<Ratio<i128>, NottinghamError> {
    if !crate::field::is_prime_u64(p) {
        return Err(NottinghamError::NotPrime(p));
    }
    if n == 0 || n > 30 {
        return Err(NottinghamError::Parameter {
            name: "n",
            got: n as i128,
        });
    }
    let p = p as i128;
    let pn = p.pow(n as u32);
    Ok(Ratio::new(pn * pn + p * pn + pn - p - 2, p + 1))
}

/// Certifies that sigma has order exactly `order` (a power of p) at its
/// working precision.
fn certify_order(sigma: &Automorphism, order: u128) -> Result<(), NottinghamError> {
    let fail = || NottinghamError::WrongOrder {
        expected: order,
        precision: sigma.precision(),
    };
    let p = sigma.field().p() as u128;
    if !sigma.pow(order as i64).is_identity() {
        return Err(fail());
    }
    // the only maximal proper divisor of p^n is p^{n-1}
    if order > 1 && sigma.pow((order / p) as i64).is_identity() {
        return Err(fail());
    }
    Ok(())
}

/// Lower breaks, increments, upper breaks and different of the cyclic group
/// generated by an order-p^n element of N(k). The different is computed both
/// by the closed formula and by summing |G_i| - 1 directly over the group;
/// disagreement (or any violated break invariant) reports the input as not
/// genuinely of order p^n.
pub fn ramification_profile(
    sigma: &Automorphism,
    n: usize,
) -> Result<RamificationProfile, NottinghamError> {
    if !sigma.in_nottingham() {
        return Err(NottinghamError::NotNottingham);
    }
    if n == 0 || n > 20 {
        return Err(NottinghamError::Parameter {
            name: "n",
            got: n as i128,
        });
    }
    let p = sigma.field().p();
    let order = (p as u128).pow(n as u32);
    // the direct different summation walks the whole cyclic group
    if order > 1 << 20 {
        return Err(NottinghamError::Parameter {
            name: "p^n",
            got: order as i128,
        });
    }
    certify_order(sigma, order)?;

    let precision = sigma.precision();
    let t = TruncatedSeries::var(sigma.field(), precision);
    let depth = |a: &Automorphism| a.action().sub(&t).valuation();

    // b_j = v(sigma^{p^j}(t) - t) - 1, walking the chain of p-th powers.
    let mut lower = Vec::with_capacity(n);
    let mut power = sigma.clone();
    for _ in 0..n {
        lower.push(depth(&power) - 1);
        power = power.pow(p as i64);
    }
    let need = lower[n - 1] + 2;
    if precision < need {
        return Err(NottinghamError::InsufficientPrecision {
            have: precision,
            need,
        });
    }
    let profile = RamificationProfile::from_lower_breaks(p, &lower)?;

    // Independent check: d(G) = sum over g != e of v(g(t) - t).
    let mut direct: i128 = 0;
    let mut acc = sigma.clone();
    for _ in 1..order {
        direct += depth(&acc) as i128;
        acc = acc.compose(sigma);
    }
    if direct != profile.different {
        return Err(NottinghamError::ProfileInvariant(format!(
            "different mismatch: formula gives {}, direct summation gives {}",
            profile.different, direct
        )));
    }
    Ok(profile)
}

/// The order-p normal form t -> t (1 + c t^m)^{-1/m}.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrderPNormalForm {
    pub m: u64,
    pub c: FieldElement,
}

/// Working precisions must be representable and desk-scale.
pub(crate) fn check_precision(precision: i64) -> Result<(), NottinghamError> {
    if !(2..=1 << 16).contains(&precision) {
        return Err(NottinghamError::Parameter {
            name: "precision",
            got: precision as i128,
        });
    }
    Ok(())
}

/// Builds the normal form element to the requested precision; it has order p.
pub fn make_order_p(
    m: u64,
    c: &FieldElement,
    precision: i64,
) -> Result<Automorphism, NottinghamError> {
    check_precision(precision)?;
    let field = c.field();
    let p = field.p();
    if m == 0 || m.is_multiple_of(p) {
        return Err(NottinghamError::MDivisibleByP { m, p });
    }
    if c.is_zero() {
        return Err(NottinghamError::ZeroC);
    }
    let work = precision + m as i64 + 2;
    let u = TruncatedSeries::from_terms(
        field,
        work,
        &[(0, FieldElement::one(field)), (m as i64, c.clone())],
    );
    let root = u.nth_root(m)?;
    let action = root.recip()?.shift_mul(1).truncated(precision);
    Automorphism::new(action)
}

/// Reads (m, c) off an order-p element of N(k): m = v(sigma(t) - t) - 1 and
/// c = -m * (coefficient of t^{m+1} in sigma(t)). Both data are invariant
/// under conjugation in N(k), so extraction inverts `make_order_p` on any
/// conjugate of a normal form.
pub fn order_p_normal_form(sigma: &Automorphism) -> Result<OrderPNormalForm, NottinghamError> {
    if !sigma.in_nottingham() {
        return Err(NottinghamError::NotNottingham);
    }
    let p = sigma.field().p();
    certify_order(sigma, p as u128)?;
    let t = TruncatedSeries::var(sigma.field(), sigma.precision());
    let diff = sigma.action().sub(&t);
    let m = diff.valuation() - 1;
    let need = 2 * (m + 2);
    if sigma.precision() < need {
        return Err(NottinghamError::InsufficientPrecision {
            have: sigma.precision(),
            need,
        });
    }
    if m <= 0 || (m as u64).is_multiple_of(p) {
        return Err(NottinghamError::MDivisibleByP {
            m: m.max(0) as u64,
            p,
        });
    }
    let a = diff.coeff(m + 1);
    let c = a.scale(m as u64).neg();
    Ok(OrderPNormalForm { m: m as u64, c })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ConjugacyMode {
    /// Conjugacy inside N(k): normal forms must match exactly.
    Nottingham,
    /// Conjugacy in all of Aut(k[[t]]): m = m' and c/c' an m-th power.
    FullAut,
}

/// Conjugacy test for two order-p elements of N(k).
pub fn conjugacy_test_order_p(
    a: &Automorphism,
    b: &Automorphism,
    mode: ConjugacyMode,
) -> Result<bool, NottinghamError> {
    let nf_a = order_p_normal_form(a)?;
    let nf_b = order_p_normal_form(b)?;
    match mode {
        ConjugacyMode::Nottingham => Ok(nf_a == nf_b),
        ConjugacyMode::FullAut => {
            if nf_a.m != nf_b.m {
                return Ok(false);
            }
            // c/c' lies in the m-th powers iff (c/c')^((q-1)/gcd(m, q-1)) = 1
            let q_minus_1 = a.field().order() - 1;
            let g = gcd_u128(nf_a.m as u128, q_minus_1);
            let ratio = nf_a.c.div(&nf_b.c).expect("normal-form c is nonzero");
            Ok(ratio.pow_u128(q_minus_1 / g).is_one())
        }
    }
}

fn gcd_u128(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd_u128(b, a % b)
    }
}

/// m-dispersal f(t) -> f(t^m)^{1/m}, the root chosen of the form t + ... .
/// An injective endomorphism of N(k) for every m prime to p.
pub fn dispersal(sigma: &Automorphism, m: u64) -> Result<Automorphism, NottinghamError> {
    let field = sigma.field();
    let p = field.p();
    if m == 0 || m.is_multiple_of(p) {
        return Err(NottinghamError::MDivisibleByP { m, p });
    }
    if !sigma.in_nottingham() {
        return Err(NottinghamError::NotNottingham);
    }
    if m == 1 {
        return Ok(sigma.clone());
    }
    let n = sigma.precision();
    // f(t^m) = t^m * U(t^m) with U(s) = sum a_{j+1} s^j, so the m-th root of
    // the spread series is the spread of the root computed in one variable.
    let coeffs: Vec<FieldElement> = (1..n).map(|e| sigma.action().coeff(e)).collect();
    let u = TruncatedSeries::from_coefficients(field, 0, coeffs);
    let rho = u.nth_root(m)?;
    let mut terms = Vec::new();
    for j in 0..rho.precision() {
        let e = 1 + m as i64 * j;
        if e >= n {
            break;
        }
        terms.push((e, rho.coeff(j)));
    }
    Automorphism::new(TruncatedSeries::from_terms(field, n, &terms))
}

/// Series-level Artin-Schreier solver: for alpha with v(alpha) >= 1 returns
/// beta = -(alpha + alpha^p + alpha^{p^2} + ...), the unique solution of
/// beta^p - beta = alpha in t k[[t]]. The sum truncates once p^i v(alpha)
/// reaches the precision, and v(beta) = v(alpha).
pub fn artin_schreier_series(alpha: &TruncatedSeries) -> Result<TruncatedSeries, NottinghamError> {
    if alpha.valuation() < 1 {
        return Err(NottinghamError::ArtinSchreierValuation(alpha.valuation()));
    }
    let n = alpha.precision();
    let mut sum = TruncatedSeries::zero(alpha.field(), n);
    let mut acc = alpha.truncated(n);
    while !acc.is_zero_to_precision() {
        sum = sum.add(&acc);
        acc = acc.frobenius().truncated(n);
    }
    Ok(sum.neg())
}

/// The order-4 automorphism attached to b in characteristic 2, normalized so
/// that the element attached to b+1 is its exact compositional inverse.
/// Computed from the Artin-Schreier series beta for t^3 + (b^2+b+1)t^2 as
///   ((b+1)^2 t + b t^2 + beta) / ((b+1)^2 + t^2).
/// When b = 1 the denominator is t^2 and the division becomes a shift, legal
/// only because the numerator then has valuation exactly 3; that is checked,
/// and a failure reports an internal arithmetic bug rather than a user error.
pub fn sigma_b(b: &FieldElement, precision: i64) -> Result<Automorphism, NottinghamError> {
    check_precision(precision)?;
    let field = b.field();
    if field.p() != 2 {
        return Err(NottinghamError::CharacteristicNot2(field.p()));
    }
    let work = precision + 4;
    let one = FieldElement::one(field);
    let bp1 = b.add(&one);
    let s = b.mul(b).add(b).add(&one); // b^2 + b + 1, the same for b and b+1
    let alpha = TruncatedSeries::from_terms(field, work, &[(3, one.clone()), (2, s)]);
    let beta = artin_schreier_series(&alpha)?;
    let num = TruncatedSeries::from_terms(field, work, &[(1, bp1.mul(&bp1)), (2, b.clone())])
        .add(&beta);
    let action = if bp1.is_zero() {
        if num.valuation() != 3 {
            return Err(NottinghamError::InternalValuation(format!(
                "sigma_b numerator has valuation {}, expected 3",
                num.valuation()
            )));
        }
        num.shift_mul(-2)
    } else {
        let den = TruncatedSeries::from_terms(field, work, &[(0, bp1.mul(&bp1)), (2, one)]);
        num.div(&den)?
    };
    Automorphism::new(action.truncated(precision))
}

/// The order-4 elements for b and b' are conjugate in Aut(k[[t]]) exactly
/// when b - b' lies in the image of x -> x^2 - x on k, i.e. has trace zero.
pub fn sigma_conjugacy_test(
    b: &FieldElement,
    b_prime: &FieldElement,
) -> Result<bool, NottinghamError> {
    let field = b.field();
    if field.p() != 2 {
        return Err(NottinghamError::CharacteristicNot2(field.p()));
    }
    Ok(b.sub(b_prime).trace_to_prime() == 0)
}

/// Genus bounds for the curve attached to a cyclic order-p^n subgroup whose
/// orbit field has degree d over the rational function field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenusBounds {
    /// (d-1)^2
    pub upper: i128,
    /// p (p^n - 1)(p^{n-1} - 1) / (2(p+1))
    pub lower: Ratio<i128>,
    /// 1 + sqrt(lower) when that is rational; d must reach it.
    pub bound_rhs: Option<Ratio<i128>>,
    /// lower <= upper; equivalently d satisfies the degree inequality.
    pub consistent: bool,
}

impl fmt::Display for GenusBounds {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "upper={} lower={}", self.upper, self.lower)?;
        match &self.bound_rhs {
            Some(r) => write!(f, " rhs={r}")?,
            None => write!(f, " rhs=1+sqrt({})", self.lower)?,
        }
        write!(f, " consistent={}", self.consistent)
    }
}

pub fn genus_bounds(p: u64, n: usize, d: i64) -> Result<GenusBounds, NottinghamError> {
    if !crate::field::is_prime_u64(p) {
        return Err(NottinghamError::NotPrime(p));
    }
    if n == 0 || n > 30 {
        return Err(NottinghamError::Parameter {
            name: "n",
            got: n as i128,
        });
    }
    if d < 1 {
        return Err(NottinghamError::Parameter {
            name: "d",
            got: d as i128,
        });
    }
    let pi = p as i128;
    let pn = pi.pow(n as u32);
    let pn1 = pi.pow(n as u32 - 1);
    let lower = Ratio::new(pi * (pn - 1) * (pn1 - 1), 2 * (pi + 1));
    let upper = (d as i128 - 1) * (d as i128 - 1);
    let consistent = lower <= Ratio::from_integer(upper);
    let bound_rhs = ratio_sqrt(&lower).map(|s| s + Ratio::from_integer(1));
    Ok(GenusBounds {
        upper,
        lower,
        bound_rhs,
        consistent,
    })
}

fn ratio_sqrt(x: &Ratio<i128>) -> Option<Ratio<i128>> {
    let (n, d) = (*x.numer(), *x.denom());
    if n < 0 {
        return None;
    }
    let sn = n.isqrt();
    let sd = d.isqrt();
    if sn * sn == n && sd * sd == d {
        Some(Ratio::new(sn, sd))
    } else {
        None
    }
}

/// Genus of a pointed cover with one totally wildly ramified point:
/// 1 - |P| + d/2 for a p-group P of the given order and different exponent d.
pub fn hkg_genus(p_order: u64, different: i128) -> Result<Ratio<i128>, NottinghamError> {
    if p_order != 1 && !is_prime_power(p_order) {
        return Err(NottinghamError::NotPrimePower(p_order));
    }
    if different < 0 {
        return Err(NottinghamError::NegativeDifferent(different));
    }
    Ok(Ratio::new(2 - 2 * p_order as i128 + different, 2))
}

fn is_prime_power(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut f = 2;
    while f * f <= x {
        if x.is_multiple_of(f) {
            let mut y = x;
            while y.is_multiple_of(f) {
                y /= f;
            }
            return y == 1;
        }
        f += 1;
    }
    true // x itself prime
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{elements, FieldSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn f2() -> Field {
        FieldSpec::prime_field(2).unwrap()
    }

    fn f4() -> Field {
        FieldSpec::new(2, 2, None).unwrap()
    }

    fn f8() -> Field {
        FieldSpec::new(2, 3, None).unwrap()
    }

    /// t(1+t)^{-1} over F_2, the base order-2 element.
    fn base_order2(precision: i64) -> Automorphism {
        make_order_p(1, &FieldElement::one(&f2()), precision).unwrap()
    }

    #[test]
    fn compose_with_identity() {
        let f = f4();
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let s = Automorphism::random_nottingham(&f, 16, &mut rng);
        let id = Automorphism::identity(&f, 16);
        assert_eq!(s.compose(&id), s);
        assert_eq!(id.compose(&s), s);
    }

    #[test]
    fn torus_part_multiplies() {
        let f = f8();
        let x = FieldElement::gen_x(&f);
        let a = Automorphism::scaling(&x, 8).unwrap();
        let b = Automorphism::scaling(&x.mul(&x), 8).unwrap();
        let ab = a.compose(&b);
        assert_eq!(ab.leading_coeff(), x.pow(3).unwrap());
    }

    #[test]
    fn group_laws_random() {
        let f = f4();
        let mut rng = ChaCha20Rng::seed_from_u64(4);
        for _ in 0..30 {
            let a = Automorphism::random_nottingham(&f, 12, &mut rng);
            let b = Automorphism::random_nottingham(&f, 12, &mut rng);
            let c = Automorphism::random_nottingham(&f, 12, &mut rng);
            assert_eq!(a.compose(&b).compose(&c), a.compose(&b.compose(&c)));
            assert!(a.compose(&a.inverse()).is_identity());
            assert_eq!(a.pow(3), a.compose(&a).compose(&a));
        }
    }

    #[test]
    fn order_examples() {
        let f = f2();
        assert_eq!(
            Automorphism::identity(&f, 16).order(10),
            OrderResult {
                order: Some(1),
                precision: 16
            }
        );
        let s = base_order2(64);
        assert_eq!(s.order(8).order, Some(2));
        let sb = sigma_b(&FieldElement::zero(&f), 64).unwrap();
        assert_eq!(sb.order(8).order, Some(4));
    }

    #[test]
    fn profile_of_base_order2() {
        let p = ramification_profile(&base_order2(16), 1).unwrap();
        assert_eq!(p.lower_breaks, vec![1]);
        assert_eq!(p.upper_breaks, vec![1]);
        assert_eq!(p.different, 2);
    }

    #[test]
    fn profile_of_sigma_b() {
        for field in [f2(), f4()] {
            for b in elements(&field) {
                let s = sigma_b(&b, 16).unwrap();
                let p = ramification_profile(&s, 2).unwrap();
                assert_eq!(p.lower_breaks, vec![1, 3]);
                assert_eq!(p.upper_breaks, vec![1, 2]);
                assert_eq!(p.increments, vec![1, 1]);
                assert_eq!(p.different, 8);
            }
        }
    }

    #[test]
    fn profile_of_order_p_break_m() {
        // different = (m+1)(p-1) for an order-p element with break m
        let f3 = FieldSpec::prime_field(3).unwrap();
        let s = make_order_p(2, &FieldElement::from_u64(&f3, 2), 16).unwrap();
        let p = ramification_profile(&s, 1).unwrap();
        assert_eq!(p.lower_breaks, vec![2]);
        assert_eq!(p.different, 6);
    }

    #[test]
    fn profile_is_conjugation_invariant() {
        let f = f4();
        let b = FieldElement::gen_x(&f);
        let s = sigma_b(&b, 16).unwrap();
        let reference = ramification_profile(&s, 2).unwrap();
        let mut rng = ChaCha20Rng::seed_from_u64(14);
        for _ in 0..5 {
            let u = Automorphism::random_nottingham(&f, 16, &mut rng);
            assert_eq!(
                ramification_profile(&s.conjugate_by(&u), 2).unwrap(),
                reference
            );
        }
        // conjugation by a torus element also preserves the breaks
        let torus = Automorphism::scaling(&FieldElement::gen_x(&f), 16).unwrap();
        assert_eq!(
            ramification_profile(&s.conjugate_by(&torus), 2).unwrap(),
            reference
        );
    }

    #[test]
    fn profile_rejects_wrong_order() {
        let s = base_order2(16);
        assert!(matches!(
            ramification_profile(&s, 2),
            Err(NottinghamError::WrongOrder { .. })
        ));
        let id = Automorphism::identity(&f2(), 16);
        assert!(matches!(
            ramification_profile(&id, 1),
            Err(NottinghamError::WrongOrder { .. })
        ));
    }

    #[test]
    fn shallow_precision_cannot_certify_order() {
        // with break 5 and precision 6 the element looks like the identity,
        // so the order claim fails before any break is read
        let s = make_order_p(5, &FieldElement::one(&f2()), 6).unwrap();
        assert!(matches!(
            ramification_profile(&s, 1),
            Err(NottinghamError::WrongOrder { .. })
        ));
    }

    #[test]
    fn normal_form_rejects_insufficient_precision() {
        // extraction with m = 5 needs precision >= 2(m+2) = 14
        let s = make_order_p(5, &FieldElement::one(&f2()), 8).unwrap();
        assert!(matches!(
            order_p_normal_form(&s),
            Err(NottinghamError::InsufficientPrecision { need: 14, .. })
        ));
    }

    #[test]
    fn different_lower_bound_values() {
        assert_eq!(different_lower_bound(2, 1).unwrap(), Ratio::from_integer(2));
        assert_eq!(different_lower_bound(2, 2).unwrap(), Ratio::from_integer(8));
        assert_eq!(different_lower_bound(3, 2).unwrap(), Ratio::from_integer(28));
        assert_eq!(different_lower_bound(2, 3).unwrap(), Ratio::from_integer(28));
        assert!(matches!(
            different_lower_bound(6, 1),
            Err(NottinghamError::NotPrime(6))
        ));
    }

    #[test]
    fn validate_upper_breaks_examples() {
        assert!(validate_upper_breaks(2, &[1, 2]).is_ok());
        assert!(matches!(
            validate_upper_breaks(2, &[2, 4]),
            Err(BreakViolation::FirstBreakDivisible { .. })
        ));
        assert!(validate_upper_breaks(2, &[1, 3]).is_ok());
        assert!(matches!(
            validate_upper_breaks(2, &[1, 4]),
            Err(BreakViolation::StrictButDivisible { .. })
        ));
        assert!(matches!(
            validate_upper_breaks(2, &[1, 1]),
            Err(BreakViolation::GrowthTooSlow { .. })
        ));
    }

    #[test]
    fn enumerate_upper_breaks_examples() {
        assert_eq!(
            enumerate_upper_breaks(2, 1, 5),
            vec![vec![1], vec![3], vec![5]]
        );
        assert_eq!(
            enumerate_upper_breaks(2, 2, 6),
            vec![vec![1, 2], vec![1, 3], vec![1, 5], vec![3, 6]]
        );
    }

    #[test]
    fn minimum_different_matches_lower_bound() {
        for (p, n) in [(2u64, 2usize), (2, 3), (3, 2)] {
            let min = enumerate_upper_breaks(p, n, 64)
                .iter()
                .map(|seq| different_from_upper_breaks(p, seq).unwrap())
                .min()
                .unwrap();
            assert_eq!(
                Ratio::from_integer(min),
                different_lower_bound(p, n).unwrap()
            );
        }
    }

    #[test]
    fn normal_form_of_base_element() {
        let nf = order_p_normal_form(&base_order2(16)).unwrap();
        assert_eq!(nf.m, 1);
        assert!(nf.c.is_one());
    }

    #[test]
    fn normal_form_round_trip_under_conjugation() {
        let f = f8();
        let mut rng = ChaCha20Rng::seed_from_u64(6);
        let c = FieldElement::gen_x(&f);
        let s = make_order_p(3, &c, 24).unwrap();
        for _ in 0..10 {
            let u = Automorphism::random_nottingham(&f, 24, &mut rng);
            let nf = order_p_normal_form(&s.conjugate_by(&u)).unwrap();
            assert_eq!(nf.m, 3);
            assert_eq!(nf.c, c);
        }
    }

    #[test]
    fn conjugacy_test_examples() {
        let f = f4();
        let x = FieldElement::gen_x(&f);
        let one = FieldElement::one(&f);
        let a = make_order_p(3, &x, 24).unwrap();
        let b = make_order_p(3, &one, 24).unwrap();
        assert!(conjugacy_test_order_p(&a, &a, ConjugacyMode::Nottingham).unwrap());
        assert!(conjugacy_test_order_p(&a, &a, ConjugacyMode::FullAut).unwrap());
        // cubes in F_4^x are trivial, so x is not a cube times 1
        assert!(!conjugacy_test_order_p(&a, &b, ConjugacyMode::Nottingham).unwrap());
        assert!(!conjugacy_test_order_p(&a, &b, ConjugacyMode::FullAut).unwrap());
        // over F_2 with m = 1 there is only one class
        let s1 = base_order2(16);
        let s2 = s1.conjugate_by(&{
            let mut rng = ChaCha20Rng::seed_from_u64(8);
            Automorphism::random_nottingham(&f2(), 16, &mut rng)
        });
        assert!(conjugacy_test_order_p(&s1, &s2, ConjugacyMode::Nottingham).unwrap());
    }

    #[test]
    fn full_aut_conjugacy_sees_mth_powers() {
        // In F_8^x every element is a cube (gcd(3, 7) = 1), so m = 3 pairs
        // with different c are conjugate in Aut but not in N(k).
        let f = f8();
        let x = FieldElement::gen_x(&f);
        let a = make_order_p(3, &x, 24).unwrap();
        let b = make_order_p(3, &FieldElement::one(&f), 24).unwrap();
        assert!(!conjugacy_test_order_p(&a, &b, ConjugacyMode::Nottingham).unwrap());
        assert!(conjugacy_test_order_p(&a, &b, ConjugacyMode::FullAut).unwrap());
    }

    #[test]
    fn dispersal_examples() {
        let s = base_order2(24);
        assert_eq!(dispersal(&s, 1).unwrap(), s);
        // dispersing t(1+t)^{-1} gives t(1+t^m)^{-1/m}
        for m in [3u64, 5] {
            let d = dispersal(&s, m).unwrap();
            let direct = make_order_p(m, &FieldElement::one(&f2()), 24).unwrap();
            assert_eq!(d, direct);
        }
        assert!(matches!(
            dispersal(&s, 2),
            Err(NottinghamError::MDivisibleByP { m: 2, p: 2 })
        ));
    }

    #[test]
    fn normal_forms_come_from_dispersal() {
        // t(1+ct)^{-1} dispersed by m is exactly the (m, c) normal form
        let f = f4();
        let c = FieldElement::gen_x(&f);
        let base = make_order_p(1, &c, 20).unwrap();
        assert_eq!(
            dispersal(&base, 3).unwrap(),
            make_order_p(3, &c, 20).unwrap()
        );
    }

    #[test]
    fn dispersal_is_a_homomorphism() {
        let f = f4();
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        for _ in 0..10 {
            let a = Automorphism::random_nottingham(&f, 16, &mut rng);
            let b = Automorphism::random_nottingham(&f, 16, &mut rng);
            let lhs = dispersal(&a.compose(&b), 3).unwrap();
            let rhs = dispersal(&a, 3)
                .unwrap()
                .compose(&dispersal(&b, 3).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn make_order_p_really_has_order_p() {
        let f5 = FieldSpec::prime_field(5).unwrap();
        let s = make_order_p(3, &FieldElement::from_u64(&f5, 2), 32).unwrap();
        assert_eq!(s.order(6).order, Some(5));
    }

    #[test]
    fn artin_schreier_series_example() {
        let f = f2();
        let one = FieldElement::one(&f);
        let alpha = TruncatedSeries::from_terms(&f, 9, &[(3, one.clone()), (2, one.clone())]);
        let beta = artin_schreier_series(&alpha).unwrap();
        let expected = TruncatedSeries::from_terms(
            &f,
            9,
            &[
                (2, one.clone()),
                (3, one.clone()),
                (4, one.clone()),
                (6, one.clone()),
                (8, one),
            ],
        );
        assert_eq!(beta, expected);
        // defining identity
        let wp = beta.pow(2).sub(&beta);
        assert!(wp.agrees_to(&alpha, 9));
        assert_eq!(beta.valuation(), alpha.valuation());
    }

    #[test]
    fn artin_schreier_series_char3() {
        let f = FieldSpec::prime_field(3).unwrap();
        let alpha = TruncatedSeries::from_terms(
            &f,
            20,
            &[
                (1, FieldElement::from_u64(&f, 2)),
                (4, FieldElement::one(&f)),
            ],
        );
        let beta = artin_schreier_series(&alpha).unwrap();
        assert!(beta.pow(3).sub(&beta).agrees_to(&alpha, 20));
        assert_eq!(beta.valuation(), 1);
    }

    #[test]
    fn artin_schreier_rejects_nonpositive_valuation() {
        let f = f2();
        let u = TruncatedSeries::one(&f, 5);
        assert!(matches!(
            artin_schreier_series(&u),
            Err(NottinghamError::ArtinSchreierValuation(0))
        ));
    }

    #[test]
    fn sigma_b_golden_prefix() {
        let f = f2();
        let s = sigma_b(&FieldElement::zero(&f), 31).unwrap();
        let one = FieldElement::one(&f);
        let terms: Vec<(i64, FieldElement)> = [1, 2, 6, 12, 14, 24, 26, 28, 30]
            .iter()
            .map(|&e| (e, one.clone()))
            .collect();
        let expected = TruncatedSeries::from_terms(&f, 31, &terms);
        assert_eq!(s.action(), &expected);
    }

    #[test]
    fn sigma_b_inverse_is_b_plus_one() {
        for field in [f2(), f4()] {
            let one = FieldElement::one(&field);
            for b in elements(&field) {
                let s = sigma_b(&b, 48).unwrap();
                let s_inv = sigma_b(&b.add(&one), 48).unwrap();
                assert!(s.compose(&s_inv).is_identity());
                assert_eq!(s.inverse(), s_inv);
            }
        }
    }

    #[test]
    fn sigma_b_squared_depth() {
        // the square moves t with valuation 4 = second lower break + 1
        let f = f4();
        let b = FieldElement::gen_x(&f);
        let s = sigma_b(&b, 32).unwrap();
        let t = TruncatedSeries::var(&f, 32);
        assert_eq!(s.pow(2).action().sub(&t).valuation(), 4);
        assert!(s.pow(4).is_identity());
        assert!(!s.pow(2).is_identity());
    }

    #[test]
    fn sigma_conjugacy_examples() {
        let f2 = f2();
        let z2 = FieldElement::zero(&f2);
        let o2 = FieldElement::one(&f2);
        assert!(sigma_conjugacy_test(&z2, &z2).unwrap());
        assert!(!sigma_conjugacy_test(&z2, &o2).unwrap());
        let f4 = f4();
        assert!(sigma_conjugacy_test(&FieldElement::zero(&f4), &FieldElement::one(&f4)).unwrap());
    }

    #[test]
    fn sigma_conjugacy_has_two_classes() {
        for field in [f2(), f4(), f8()] {
            let zero = FieldElement::zero(&field);
            let class0 = elements(&field)
                .filter(|b| sigma_conjugacy_test(b, &zero).unwrap())
                .count();
            assert_eq!(class0 as u128 * 2, field.order());
        }
    }

    #[test]
    fn sigma_and_inverse_conjugate_iff_cube_roots_exist() {
        // trace of 1 over F_{2^r} is r mod 2, and F_{2^r} contains a
        // primitive cube root of unity exactly when r is even
        for r in 1..=4usize {
            let field = FieldSpec::new(2, r, None).unwrap();
            let zero = FieldElement::zero(&field);
            let one = FieldElement::one(&field);
            assert_eq!(sigma_conjugacy_test(&zero, &one).unwrap(), r % 2 == 0);
        }
    }

    #[test]
    fn profile_different_meets_lower_bound() {
        for (p, m) in [(2u64, 3u64), (3, 4), (5, 2)] {
            let field = FieldSpec::prime_field(p).unwrap();
            let s = make_order_p(m, &FieldElement::one(&field), 24).unwrap();
            let profile = ramification_profile(&s, 1).unwrap();
            assert_eq!(profile.different, (m as i128 + 1) * (p as i128 - 1));
            assert!(
                Ratio::from_integer(profile.different) >= different_lower_bound(p, 1).unwrap()
            );
        }
    }

    #[test]
    fn genus_bounds_examples() {
        let g = genus_bounds(2, 2, 2).unwrap();
        assert_eq!(g.upper, 1);
        assert_eq!(g.lower, Ratio::from_integer(1));
        assert_eq!(g.bound_rhs, Some(Ratio::from_integer(2)));
        assert!(g.consistent);

        let g = genus_bounds(3, 1, 5).unwrap();
        assert_eq!(g.lower, Ratio::from_integer(0));
        assert!(g.consistent);

        let g = genus_bounds(2, 3, 2).unwrap();
        assert_eq!(g.lower, Ratio::from_integer(7));
        assert_eq!(g.upper, 1);
        assert!(!g.consistent);
        assert_eq!(g.bound_rhs, None);
    }

    #[test]
    fn hkg_genus_examples() {
        assert_eq!(hkg_genus(4, 8).unwrap(), Ratio::from_integer(1));
        assert_eq!(hkg_genus(5, 8).unwrap(), Ratio::from_integer(0));
        assert_eq!(hkg_genus(1, 0).unwrap(), Ratio::from_integer(0));
        assert_eq!(hkg_genus(2, 3).unwrap(), Ratio::new(1, 2));
        assert!(matches!(
            hkg_genus(6, 0),
            Err(NottinghamError::NotPrimePower(6))
        ));
    }

    #[test]
    fn profile_display_form() {
        let s = sigma_b(&FieldElement::zero(&f2()), 16).unwrap();
        let p = ramification_profile(&s, 2).unwrap();
        assert_eq!(
            p.to_string(),
            "PROFILE p=2 n=2 lower=1,3 upper=1,2 i=1,1 different=8"
        );
    }
}
