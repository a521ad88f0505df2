//! The explicit curves behind the finite-order automorphisms.
//!
//! In characteristic 2, [`EabCurve`] is the genus-1 curve
//! z^2 - z = w^3 + (b^2+b+1)w^2 + a with its order-4 automorphism
//! (w, z) -> (w+1, z+w+b); the point at infinity is its only fixed point.
//! [`eab_local_expansion`] expands that action in the translated coordinate
//! t = z/w^2 at infinity and must reproduce the series family built by
//! [`crate::nottingham::sigma_b`].
//!
//! [`SuperellipticCover`] carries the ramification data of a tame cyclic
//! cover z^n = f through the divisor of f alone; the genus only depends on
//! the multiplicities mod n, which keeps the Hurwitz computation
//! field-independent. No general curve machinery (divisors, Riemann-Roch,
//! group law) lives here: the translated coordinates are handled through the
//! closed forms w = (1-beta)/t^2, z = (1-beta)^2/t^3, which are verified
//! against the curve equation on every run.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::field::{elements, Field, FieldElement, FieldSpec};
use crate::nottingham::{artin_schreier_series, Automorphism, NottinghamError};
use crate::series::{SeriesError, TruncatedSeries};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CurveError {
    #[error(transparent)]
    Nottingham(#[from] NottinghamError),
    #[error(transparent)]
    Series(#[from] SeriesError),
    #[error("this curve lives in characteristic 2, field has characteristic {0}")]
    CharacteristicNot2(u64),
    #[error("field of size {0} too large for point enumeration (limit 2^16)")]
    FieldTooLarge(u128),
    #[error("branch multiplicities sum to {0}, not 0: not the divisor of a function")]
    DivisorDegree(i64),
    #[error("branch point {0} carries multiplicity 0")]
    ZeroMultiplicity(String),
    #[error("cover degree n = {n} is divisible by the characteristic {p}: not tame")]
    WildCover { n: u64, p: u64 },
    #[error("Hurwitz total {0} is odd: branch data is inconsistent")]
    NonIntegralGenus(i64),
    #[error("genus would be negative ({0}): branch data is inconsistent")]
    NegativeGenus(i64),
    #[error("bad curve family parameters: {0}")]
    ExampleParams(String),
    #[error("no conjugating constant: c^2 - c differs from b - b'")]
    ConjugatorPrecondition,
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

/// The projective curve z^2 - z = w^3 + (b^2+b+1)w^2 + a over a field of
/// characteristic 2, with base point at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EabCurve {
    field: Field,
    a: FieldElement,
    b: FieldElement,
}

impl EabCurve {
    pub fn new(a: FieldElement, b: FieldElement) -> Result<Self, CurveError> {
        let field = a.field().clone();
        assert!(
            FieldSpec::same_field(&field, b.field()),
            "curve coefficients from different fields"
        );
        if field.p() != 2 {
            return Err(CurveError::CharacteristicNot2(field.p()));
        }
        Ok(EabCurve { field, a, b })
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn a(&self) -> &FieldElement {
        &self.a
    }

    pub fn b(&self) -> &FieldElement {
        &self.b
    }

    /// w^3 + (b^2+b+1)w^2 + a.
    pub fn rhs(&self, w: &FieldElement) -> FieldElement {
        let s = self
            .b
            .mul(&self.b)
            .add(&self.b)
            .add(&FieldElement::one(&self.field));
        w.mul(w).mul(w).add(&w.mul(w).mul(&s)).add(&self.a)
    }

    /// Exact affine membership: z^2 - z = rhs(w).
    pub fn contains(&self, w: &FieldElement, z: &FieldElement) -> bool {
        z.wp() == self.rhs(w)
    }
}

/// A point of the projective model: affine (w, z) or the point at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CurvePoint {
    Infinity,
    Affine { w: FieldElement, z: FieldElement },
}

impl fmt::Display for CurvePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CurvePoint::Infinity => write!(f, "O"),
            CurvePoint::Affine { w, z } => write!(f, "{w} {z}"),
        }
    }
}

/// Every point of the curve over its (finite) base field: affine points in
/// lexicographic (w, z) order, then the point at infinity. For each w the
/// equation has 2 solutions when trace(rhs) = 0 and none otherwise, so the
/// total count is odd.
pub fn eab_points(curve: &EabCurve) -> Result<Vec<CurvePoint>, CurveError> {
    let field = curve.field();
    let q = field.order();
    if q > 1 << 16 {
        return Err(CurveError::FieldTooLarge(q));
    }
    // preimage table of z -> z^2 - z, filled in lexicographic z order
    let mut wp_preimages: Vec<Vec<FieldElement>> = vec![Vec::new(); q as usize];
    for z in elements(field) {
        let idx = z.wp().index() as usize;
        wp_preimages[idx].push(z);
    }
    let mut points = Vec::new();
    for w in elements(field) {
        let rhs = curve.rhs(&w);
        for z in &wp_preimages[rhs.index() as usize] {
            points.push(CurvePoint::Affine {
                w: w.clone(),
                z: z.clone(),
            });
        }
    }
    points.push(CurvePoint::Infinity);
    Ok(points)
}

/// Outcome of the pointwise action checks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionReport {
    pub pass: bool,
    pub points_checked: usize,
    pub failure: Option<String>,
}

impl fmt::Display for ActionReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "PASS checked {} points", self.points_checked),
            Some(d) => write!(f, "FAIL {d}"),
        }
    }
}

/// Checks the curve's own order-4 action (w, z) -> (w+1, z+w+b) on every
/// point: images stay on the curve, the square is (w, z+1), the fourth power
/// is the identity, and only the point at infinity is fixed by the map or by
/// its square.
pub fn eab_verify_action(curve: &EabCurve) -> Result<ActionReport, CurveError> {
    eab_verify_action_with(curve, curve.b())
}

/// Same checks for the map (w, z) -> (w+1, z+w+s) with an arbitrary
/// translation constant s. A wrong constant sends points off the curve
/// whenever s - b falls outside the prime field (s = b + 1 gives the inverse
/// automorphism, which passes every check).
pub fn eab_verify_action_with(
    curve: &EabCurve,
    s: &FieldElement,
) -> Result<ActionReport, CurveError> {
    let field = curve.field();
    let one = FieldElement::one(field);
    let points = eab_points(curve)?;
    let on_curve: HashSet<(u128, u128)> = points
        .iter()
        .filter_map(|pt| match pt {
            CurvePoint::Infinity => None,
            CurvePoint::Affine { w, z } => Some((w.index(), z.index())),
        })
        .collect();
    let apply = |pt: &CurvePoint| -> CurvePoint {
        match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { w, z } => CurvePoint::Affine {
                w: w.add(&one),
                z: z.add(w).add(s),
            },
        }
    };
    let fail = |pt: &CurvePoint, what: &str| ActionReport {
        pass: false,
        points_checked: points.len(),
        failure: Some(format!("{what} at point {pt}")),
    };
    for pt in &points {
        let image = apply(pt);
        if let CurvePoint::Affine { w, z } = &image {
            if !on_curve.contains(&(w.index(), z.index())) {
                return Ok(fail(pt, "image leaves the curve"));
            }
        }
        let sq = apply(&image);
        let sq_expected = match pt {
            CurvePoint::Infinity => CurvePoint::Infinity,
            CurvePoint::Affine { w, z } => CurvePoint::Affine {
                w: w.clone(),
                z: z.add(&one),
            },
        };
        if sq != sq_expected {
            return Ok(fail(pt, "square is not (w, z+1)"));
        }
        let fourth = apply(&apply(&sq));
        if &fourth != pt {
            return Ok(fail(pt, "fourth power is not the identity"));
        }
        let is_inf = matches!(pt, CurvePoint::Infinity);
        if (&image == pt) != is_inf {
            return Ok(fail(pt, "fixed-point set of the map is not {O}"));
        }
        if (&sq == pt) != is_inf {
            return Ok(fail(pt, "fixed-point set of the square is not {O}"));
        }
    }
    Ok(ActionReport {
        pass: true,
        points_checked: points.len(),
        failure: None,
    })
}

/// Expands the curve's order-4 action in the translated coordinate
/// t = z/w^2 at the point at infinity of the a = 0 curve, as a power series
/// in t.
///
/// The Artin-Schreier series beta for t^3 + (b^2+b+1)t^2 recovers the
/// coordinates as Laurent series, w = (1-beta)/t^2 and z = (1-beta)^2/t^3
/// (these satisfy t = z/w^2, beta = 1 - z^2/w^3 and the curve equation,
/// which is rechecked on every call). Applying w -> w+1, z -> z+w+(b+1),
/// the inverse of the curve map under the sigma_b normalization, and
/// re-forming z/w^2 gives the new uniformizer. The result agrees
/// coefficient-for-coefficient with [`crate::nottingham::sigma_b`].
pub fn eab_local_expansion(b: &FieldElement, precision: i64) -> Result<Automorphism, CurveError> {
    crate::nottingham::check_precision(precision)?;
    let field = b.field();
    if field.p() != 2 {
        return Err(CurveError::CharacteristicNot2(field.p()));
    }
    let work = precision + 6;
    let one = FieldElement::one(field);
    let s = b.mul(b).add(b).add(&one);
    let alpha = TruncatedSeries::from_terms(field, work, &[(3, one.clone()), (2, s.clone())]);
    let beta = artin_schreier_series(&alpha)?;
    let u = TruncatedSeries::one(field, work).add(&beta); // 1 - beta in char 2
    let w = u.shift_mul(-2);
    let z = u.mul(&u).shift_mul(-3);

    // the reconstructed coordinates must satisfy the a = 0 curve equation
    let lhs = z.mul(&z).sub(&z);
    let rhs = w.mul(&w).mul(&w).add(&w.mul(&w).scale(&s));
    let n = lhs.precision().min(rhs.precision());
    if !lhs.agrees_to(&rhs, n) {
        return Err(CurveError::Internal(
            "reconstructed (w, z) do not satisfy the curve equation".into(),
        ));
    }

    let bp1 = b.add(&one);
    let num = z.add(&w).add(&TruncatedSeries::monomial(&bp1, 0, work));
    let den_root = w.add(&TruncatedSeries::one(field, work));
    let t_new = num.div(&den_root.mul(&den_root))?;
    if t_new.valuation() != 1 {
        return Err(CurveError::Internal(format!(
            "expanded action has valuation {}, expected 1",
            t_new.valuation()
        )));
    }
    Ok(Automorphism::new(t_new.truncated(precision))?)
}

/// Ramification data of a tame cyclic cover z^n = f: the degree n, the genus
/// of the base curve, and the divisor of f as labelled multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuperellipticCover {
    pub n: u64,
    pub base_genus: i64,
    pub branch: Vec<(String, i64)>,
}

impl fmt::Display for SuperellipticCover {
    /// `COVER n=<n> g0=<base_genus> branch=<m1,m2,...>`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mults: Vec<String> = self.branch.iter().map(|(_, m)| m.to_string()).collect();
        write!(
            f,
            "COVER n={} g0={} branch={}",
            self.n,
            self.base_genus,
            mults.join(",")
        )
    }
}

impl SuperellipticCover {
    /// Validates the divisor data. The characteristic is optional because the
    /// genus arithmetic never needs it; when given, tameness gcd(n, p) = 1 is
    /// enforced.
    pub fn new(
        n: u64,
        base_genus: i64,
        branch: Vec<(String, i64)>,
        char_p: Option<u64>,
    ) -> Result<Self, CurveError> {
        if n == 0 {
            return Err(CurveError::ExampleParams("cover degree n = 0".into()));
        }
        if let Some(p) = char_p {
            if n.is_multiple_of(p) {
                return Err(CurveError::WildCover { n, p });
            }
        }
        if base_genus < 0 {
            return Err(CurveError::NegativeGenus(base_genus));
        }
        for (label, m) in &branch {
            if *m == 0 {
                return Err(CurveError::ZeroMultiplicity(label.clone()));
            }
        }
        let degree: i64 = branch.iter().map(|(_, m)| m).sum();
        if degree != 0 {
            return Err(CurveError::DivisorDegree(degree));
        }
        Ok(SuperellipticCover {
            n,
            base_genus,
            branch,
        })
    }
}

/// Genus of the cover by the Hurwitz formula for tame cyclic covers:
/// 2g - 2 = n(2 g0 - 2) + sum over branch points of (n/e)(e - 1), where the
/// ramification index at a point of multiplicity m is e = n / gcd(n, m).
pub fn superelliptic_genus(cover: &SuperellipticCover) -> Result<i64, CurveError> {
    let n = cover.n as i64;
    let mut total = n * (2 * cover.base_genus - 2);
    for (_, m) in &cover.branch {
        let g = gcd_i64(n, m.rem_euclid(n));
        let e = n / g;
        total += (n / e) * (e - 1);
    }
    if total % 2 != 0 {
        return Err(CurveError::NonIntegralGenus(total));
    }
    let genus = (total + 2) / 2;
    if genus < 0 {
        return Err(CurveError::NegativeGenus(genus));
    }
    Ok(genus)
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    if b == 0 {
        a
    } else {
        gcd_i64(b, a % b)
    }
}

/// The stock example covers, each with the genus the construction predicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExampleCurve {
    /// z^n = t^q - t over the projective line: the q+1 rational points of
    /// the base field carry the full branch locus, all totally ramified.
    QCurve { q: u64, n: u64 },
    /// z^4 = t^3 - t over the projective line in characteristic 3.
    Genus3,
    /// z^3 = t^4 + t over the elliptic curve u^2 + u = t^3 in
    /// characteristic 2, branched over the nine 3-torsion points.
    Genus10,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExampleCover {
    pub cover: SuperellipticCover,
    pub expected_genus: i64,
}

pub fn example_curve(which: ExampleCurve) -> Result<ExampleCover, CurveError> {
    match which {
        ExampleCurve::QCurve { q, n } => {
            let p = smallest_prime_factor(q)
                .ok_or_else(|| CurveError::ExampleParams(format!("q = {q} is not >= 2")))?;
            if !is_power_of(q, p) {
                return Err(CurveError::ExampleParams(format!(
                    "q = {q} is not a prime power"
                )));
            }
            if n < 2 {
                return Err(CurveError::ExampleParams(format!("n = {n} must exceed 1")));
            }
            if n % p == 0 {
                return Err(CurveError::WildCover { n, p });
            }
            let mut branch: Vec<(String, i64)> =
                (0..q).map(|i| (format!("t={i}"), 1i64)).collect();
            branch.push(("inf".into(), -(q as i64)));
            let cover = SuperellipticCover::new(n, 0, branch, Some(p))?;
            let expected_genus = ((n as i64 - 1) * (q as i64 - 1)) / 2;
            Ok(ExampleCover {
                cover,
                expected_genus,
            })
        }
        ExampleCurve::Genus3 => {
            let branch = vec![
                ("t=0".into(), 1),
                ("t=1".into(), 1),
                ("t=2".into(), 1),
                ("inf".into(), -3),
            ];
            Ok(ExampleCover {
                cover: SuperellipticCover::new(4, 0, branch, Some(3))?,
                expected_genus: 3,
            })
        }
        ExampleCurve::Genus10 => {
            // the eight affine 3-torsion points of u^2 + u = t^3 are the
            // simple zeros of t^4 + t; its pole at the origin has order 8
            let mut branch: Vec<(String, i64)> =
                (1..=8).map(|i| (format!("T{i}"), 1i64)).collect();
            branch.push(("O".into(), -8));
            Ok(ExampleCover {
                cover: SuperellipticCover::new(3, 1, branch, Some(2))?,
                expected_genus: 10,
            })
        }
    }
}

fn smallest_prime_factor(x: u64) -> Option<u64> {
    if x < 2 {
        return None;
    }
    let mut f = 2;
    while f * f <= x {
        if x.is_multiple_of(f) {
            return Some(f);
        }
        f += 1;
    }
    Some(x)
}

fn is_power_of(mut x: u64, p: u64) -> bool {
    while x.is_multiple_of(p) {
        x /= p;
    }
    x == 1
}

/// Witness data for the conjugating isomorphism between the completed
/// function fields of the (a, b) and (a', b') curves at infinity.
#[derive(Debug, Clone)]
pub struct ConjugatorReport {
    pub pass: bool,
    /// The shift f = c + f_2 v'^{-1}, as a Laurent series in W = w'^{-1}.
    pub f: TruncatedSeries,
    /// The shift h = c^2 w' + ..., as a Laurent series in W = w'^{-1}.
    pub h: TruncatedSeries,
    pub detail: Option<String>,
}

impl fmt::Display for ConjugatorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.detail {
            None => write!(f, "PASS"),
            Some(d) => write!(f, "FAIL {d}"),
        }
    }
}

/// Builds and verifies the conjugator between the order-4 actions of the
/// curves with parameters (a, b) and (a', b'), given a constant c with
/// c^2 - c = b - b'. Working in Laurent series in W = w'^{-1}:
///
/// - f = c + f_2 v'^{-1} with v' = w'^2 - w' and
///   f_2 = c^3 + (b^2+b+1)c^2 + a + a', the unique choice killing the
///   constant term of the quadratic relation for h;
/// - h = c^2 w' + (terms in W) solves h^2 - h = (w'+f)^3 - w'^3
///   + (b^2+b+1)(w'+f)^2 - (b'^2+b'+1)w'^2 + a - a' exactly to precision;
/// - the equivariance identity h + f + b = b' + h(w'+1) is then checked,
///   where h(w'+1) substitutes w' -> w'+1 through the expansion of
///   (w'+1)^{-1}.
///
/// All arithmetic is exact, so any residual is a failure.
pub fn verify_order4_conjugator(
    a: &FieldElement,
    b: &FieldElement,
    a_prime: &FieldElement,
    b_prime: &FieldElement,
    c: &FieldElement,
    precision: i64,
) -> Result<ConjugatorReport, CurveError> {
    crate::nottingham::check_precision(precision)?;
    let field = a.field();
    if field.p() != 2 {
        return Err(CurveError::CharacteristicNot2(field.p()));
    }
    for other in [b, a_prime, b_prime, c] {
        assert!(
            FieldSpec::same_field(field, other.field()),
            "conjugator parameters from different fields"
        );
    }
    if c.wp() != b.sub(b_prime) {
        return Err(CurveError::ConjugatorPrecondition);
    }
    let m = precision + 8;
    let one = FieldElement::one(field);

    let wp1 = TruncatedSeries::monomial(&one, -1, m); // w'
    let wp2 = wp1.mul(&wp1); // w'^2
    let vprime = wp2.sub(&wp1); // v' = w'^2 - w'
    let vp_inv = vprime.recip()?;

    let s = b.mul(b).add(b).add(&one); // b^2 + b + 1
    let c2 = c.mul(c);
    let c4 = c2.mul(&c2);
    let f2 = c2.mul(c).add(&s.mul(&c2)).add(a).add(a_prime);
    let f = TruncatedSeries::monomial(c, 0, m).add(&vp_inv.scale(&f2));

    // h^2 - h must equal this expansion of the difference of the two curve
    // equations under w -> w' + f, z -> z' + h
    let f_sq = f.mul(&f);
    let f_cu = f_sq.mul(&f);
    let rhs = wp2
        .mul(&f)
        .add(&wp1.mul(&f_sq))
        .add(&f_cu)
        .add(&wp2.scale(&b.sub(b_prime).wp()))
        .add(&f_sq.scale(&s))
        .add(&TruncatedSeries::monomial(&a.sub(a_prime), 0, m));

    let top = wp2.scale(&c4).add(&wp1.scale(&c2));
    let remainder = rhs.sub(&top);
    if !remainder.is_zero_to_precision() && remainder.valuation() < 1 {
        return Ok(ConjugatorReport {
            pass: false,
            f: f.truncated(precision),
            h: top.truncated(precision),
            detail: Some(format!(
                "quadratic relation has uncancelled terms down to W^{}",
                remainder.valuation()
            )),
        });
    }
    let h_neg = artin_schreier_series(&remainder)?;
    let h = wp1.scale(&c2).add(&h_neg);

    let relation = h.mul(&h).sub(&h);
    let n_rel = relation.precision().min(rhs.precision());
    if !relation.agrees_to(&rhs, n_rel) {
        return Ok(ConjugatorReport {
            pass: false,
            f: f.truncated(precision),
            h: h.truncated(precision),
            detail: Some("h^2 - h does not match the curve relation".into()),
        });
    }

    // equivariance: h + f + b = b' + h(w'+1), substituting through
    // W -> W (1+W)^{-1} on the principal part and w' -> w'+1 on c^2 w'
    let shift_inner = TruncatedSeries::var(field, m).div(&TruncatedSeries::from_terms(
        field,
        m,
        &[(0, one.clone()), (1, one.clone())],
    ))?;
    let h_shifted = wp1
        .scale(&c2)
        .add(&TruncatedSeries::monomial(&c2, 0, m))
        .add(&h_neg.compose(&shift_inner)?);
    let lhs_eq = h.add(&f).add(&TruncatedSeries::monomial(b, 0, m));
    let rhs_eq = h_shifted.add(&TruncatedSeries::monomial(b_prime, 0, m));
    let n_eq = lhs_eq.precision().min(rhs_eq.precision());
    let pass = lhs_eq.agrees_to(&rhs_eq, n_eq);
    Ok(ConjugatorReport {
        pass,
        f: f.truncated(precision),
        h: h.truncated(precision),
        detail: if pass {
            None
        } else {
            Some("equivariance identity fails".into())
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::FieldSpec;
    use crate::nottingham::sigma_b;
    use rand::SeedableRng;
    use rand_chacha::ChaCha20Rng;

    fn f2() -> Field {
        FieldSpec::prime_field(2).unwrap()
    }

    fn f4() -> Field {
        FieldSpec::new(2, 2, None).unwrap()
    }

    #[test]
    fn e00_over_f2_has_five_points() {
        let f = f2();
        let curve = EabCurve::new(FieldElement::zero(&f), FieldElement::zero(&f)).unwrap();
        let pts = eab_points(&curve).unwrap();
        assert_eq!(pts.len(), 5);
        for pt in &pts {
            if let CurvePoint::Affine { w, z } = pt {
                assert!(curve.contains(w, z));
            }
        }
        assert_eq!(pts.last(), Some(&CurvePoint::Infinity));
    }

    #[test]
    fn rejects_odd_characteristic() {
        let f3 = FieldSpec::prime_field(3).unwrap();
        assert!(matches!(
            EabCurve::new(FieldElement::zero(&f3), FieldElement::zero(&f3)),
            Err(CurveError::CharacteristicNot2(3))
        ));
    }

    #[test]
    fn action_passes_on_small_fields() {
        for field in [f2(), f4(), FieldSpec::new(2, 3, None).unwrap()] {
            for a in crate::field::elements(&field) {
                for b in crate::field::elements(&field) {
                    let curve = EabCurve::new(a.clone(), b.clone()).unwrap();
                    let report = eab_verify_action(&curve).unwrap();
                    assert!(report.pass, "failed for a={a} b={b}: {report}");
                }
            }
        }
    }

    #[test]
    fn point_count_is_one_mod_four() {
        // only the point at infinity is fixed by the square, so all other
        // orbits have length 4
        for field in [f2(), f4(), FieldSpec::new(2, 4, None).unwrap()] {
            let mut rng = ChaCha20Rng::seed_from_u64(11);
            for _ in 0..5 {
                let a = FieldElement::random(&field, &mut rng);
                let b = FieldElement::random(&field, &mut rng);
                let curve = EabCurve::new(a, b).unwrap();
                let pts = eab_points(&curve).unwrap();
                assert_eq!(pts.len() % 4, 1);
            }
        }
    }

    #[test]
    fn corrupted_translation_constant_fails() {
        // over F_4 a constant with s - b outside the prime field sends
        // points off the curve
        let f = f4();
        let x = FieldElement::gen_x(&f);
        let curve = EabCurve::new(FieldElement::zero(&f), x.clone()).unwrap();
        let report = eab_verify_action_with(&curve, &FieldElement::zero(&f)).unwrap();
        assert!(!report.pass);
        assert!(report.failure.unwrap().contains("leaves the curve"));
    }

    #[test]
    fn shifting_b_by_one_gives_the_inverse_action_not_a_failure() {
        // s = b + 1 is the inverse automorphism: every check still passes
        let f = f2();
        let one = FieldElement::one(&f);
        let curve = EabCurve::new(FieldElement::zero(&f), one.clone()).unwrap();
        let report = eab_verify_action_with(&curve, &FieldElement::zero(&f)).unwrap();
        assert!(report.pass);
    }

    #[test]
    fn local_expansion_matches_sigma_b_over_f2() {
        let f = f2();
        for b in crate::field::elements(&f) {
            let expansion = eab_local_expansion(&b, 32).unwrap();
            let formula = sigma_b(&b, 32).unwrap();
            assert_eq!(expansion, formula, "mismatch at b = {b}");
        }
    }

    #[test]
    fn local_expansion_matches_sigma_b_over_f4() {
        let f = f4();
        let x = FieldElement::gen_x(&f);
        let expansion = eab_local_expansion(&x, 32).unwrap();
        let formula = sigma_b(&x, 32).unwrap();
        assert_eq!(expansion, formula);
    }

    #[test]
    fn genus_of_the_two_named_curves() {
        let g3 = example_curve(ExampleCurve::Genus3).unwrap();
        assert_eq!(superelliptic_genus(&g3.cover).unwrap(), 3);
        assert_eq!(g3.expected_genus, 3);

        let g10 = example_curve(ExampleCurve::Genus10).unwrap();
        assert_eq!(superelliptic_genus(&g10.cover).unwrap(), 10);
        assert_eq!(g10.expected_genus, 10);
    }

    #[test]
    fn q_curve_family_genus() {
        for (q, n, g) in [(3u64, 4u64, 3i64), (4, 3, 3), (8, 9, 28), (4, 5, 6)] {
            let ex = example_curve(ExampleCurve::QCurve { q, n }).unwrap();
            assert_eq!(ex.expected_genus, g);
            assert_eq!(superelliptic_genus(&ex.cover).unwrap(), g);
        }
        assert!(example_curve(ExampleCurve::QCurve { q: 6, n: 5 }).is_err());
        assert!(matches!(
            example_curve(ExampleCurve::QCurve { q: 4, n: 2 }),
            Err(CurveError::WildCover { .. })
        ));
    }

    #[test]
    fn q_curve_hurwitz_line_for_prime_q() {
        // with q = p prime, 2g - 2 = -2n + (p+1)(n-1)
        for (p, n) in [(2u64, 3u64), (3, 2), (3, 4), (5, 2), (5, 3), (5, 6), (7, 4), (7, 8)] {
            let ex = example_curve(ExampleCurve::QCurve { q: p, n }).unwrap();
            let g = superelliptic_genus(&ex.cover).unwrap();
            assert_eq!(2 * g - 2, -2 * n as i64 + (p as i64 + 1) * (n as i64 - 1));
        }
    }

    #[test]
    fn genus_is_invariant_under_relabeling() {
        let ex = example_curve(ExampleCurve::Genus10).unwrap();
        let mut shuffled = ex.cover.branch.clone();
        shuffled.reverse();
        let cover = SuperellipticCover::new(3, 1, shuffled, Some(2)).unwrap();
        assert_eq!(
            superelliptic_genus(&cover).unwrap(),
            superelliptic_genus(&ex.cover).unwrap()
        );
    }

    #[test]
    fn cover_validation_errors() {
        assert!(matches!(
            SuperellipticCover::new(4, 0, vec![("P".into(), 1)], None),
            Err(CurveError::DivisorDegree(1))
        ));
        assert!(matches!(
            SuperellipticCover::new(4, 0, vec![("P".into(), 0)], None),
            Err(CurveError::ZeroMultiplicity(_))
        ));
        assert!(matches!(
            SuperellipticCover::new(4, 0, vec![("P".into(), 2), ("Q".into(), -2)], Some(2)),
            Err(CurveError::WildCover { n: 4, p: 2 })
        ));
    }

    #[test]
    fn unramified_multiples_contribute_nothing() {
        // multiplicities divisible by n leave their points unramified: only
        // A and B ramify here, giving the double cover of the line by itself
        let cover = SuperellipticCover::new(
            2,
            0,
            vec![
                ("A".into(), 1),
                ("B".into(), 1),
                ("C".into(), 2),
                ("D".into(), -4),
            ],
            None,
        )
        .unwrap();
        assert_eq!(superelliptic_genus(&cover).unwrap(), 0);
    }

    #[test]
    fn branch_free_cover_of_the_line_is_rejected() {
        // an unramified cyclic cover of a genus-0 base would have negative
        // genus; the branch data is inconsistent
        let cover = SuperellipticCover::new(5, 0, vec![], None).unwrap();
        assert!(matches!(
            superelliptic_genus(&cover),
            Err(CurveError::NegativeGenus(_))
        ));
    }

    #[test]
    fn conjugator_trivial_case() {
        let f = f2();
        let z = FieldElement::zero(&f);
        let report = verify_order4_conjugator(&z, &z, &z, &z, &z, 16).unwrap();
        assert!(report.pass);
        assert!(report.f.is_zero_to_precision());
    }

    #[test]
    fn conjugator_f4_example() {
        // over F_4: b = 0, b' = 1, c = x satisfies c^2 - c = 1 = b - b'
        let f = f4();
        let z = FieldElement::zero(&f);
        let one = FieldElement::one(&f);
        let x = FieldElement::gen_x(&f);
        let report = verify_order4_conjugator(&z, &z, &z, &one, &x, 32).unwrap();
        assert!(report.pass, "{report}");
    }

    #[test]
    fn conjugator_precondition_over_f2() {
        // no c in F_2 has c^2 - c = 1
        let f = f2();
        let z = FieldElement::zero(&f);
        let one = FieldElement::one(&f);
        for c in crate::field::elements(&f) {
            assert!(matches!(
                verify_order4_conjugator(&z, &z, &z, &one, &c, 16),
                Err(CurveError::ConjugatorPrecondition)
            ));
        }
    }

    #[test]
    fn conjugator_random_cases() {
        let f = f4();
        let mut rng = ChaCha20Rng::seed_from_u64(12);
        for _ in 0..10 {
            let a = FieldElement::random(&f, &mut rng);
            let a2 = FieldElement::random(&f, &mut rng);
            let b = FieldElement::random(&f, &mut rng);
            let c = FieldElement::random(&f, &mut rng);
            let b2 = b.sub(&c.wp());
            let report = verify_order4_conjugator(&a, &b, &a2, &b2, &c, 32).unwrap();
            assert!(report.pass, "{report}");
        }
    }
}
