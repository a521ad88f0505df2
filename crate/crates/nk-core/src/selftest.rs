//! The deterministic verification suite: twelve numbered criteria covering
//! the golden series expansions, the order-4 family laws, ramification
//! profiles, the curve/series cross-checks, the genus table, and the bulk
//! randomized property suites. `nk selftest` prints one line per criterion;
//! the integration tests assert each one.
//!
//! Every randomized criterion takes an explicit seed, so runs are
//! reproducible across platforms.

use std::fmt;

use num_rational::Ratio;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::curves::{
    eab_local_expansion, eab_verify_action, example_curve, superelliptic_genus,
    verify_order4_conjugator, EabCurve, ExampleCurve,
};
use crate::field::{elements, wp_solve, Field, FieldElement, FieldSpec};
use crate::nottingham::{
    conjugacy_test_order_p, different_from_upper_breaks, different_lower_bound, dispersal,
    enumerate_upper_breaks, genus_bounds, hkg_genus, make_order_p, order_p_normal_form,
    ramification_profile, sigma_b, sigma_conjugacy_test, Automorphism, ConjugacyMode,
};
use crate::series::TruncatedSeries;

/// Seed used by `nk selftest` when none is given.
pub const DEFAULT_SEED: u64 = 28267;

#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub index: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {} ({})",
            self.index,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn outcome(
    index: usize,
    name: &'static str,
    failures: Vec<String>,
    summary: String,
) -> CriterionOutcome {
    let passed = failures.is_empty();
    CriterionOutcome {
        index,
        name,
        passed,
        detail: if passed {
            summary
        } else {
            format!("{} failure(s); first: {}", failures.len(), failures[0])
        },
    }
}

pub fn run_all(seed: u64) -> Vec<CriterionOutcome> {
    vec![
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(),
        criterion_5(),
        criterion_6(seed),
        criterion_7(),
        criterion_8(),
        criterion_9(seed),
        criterion_10(seed),
        criterion_11(),
        criterion_12(seed),
    ]
}

fn f2() -> Field {
    FieldSpec::prime_field(2).unwrap()
}

fn f4() -> Field {
    FieldSpec::new(2, 2, None).unwrap()
}

fn f16() -> Field {
    FieldSpec::new(2, 4, None).unwrap()
}

/// F_2 series with coefficient 1 at the given exponents.
fn f2_series(exponents: &[i64], precision: i64) -> TruncatedSeries {
    let f = f2();
    let one = FieldElement::one(&f);
    let terms: Vec<(i64, FieldElement)> =
        exponents.iter().map(|&e| (e, one.clone())).collect();
    TruncatedSeries::from_terms(&f, precision, &terms)
}

/// Golden expansion of the b = 0 series: t + t^2 plus the blocks
/// t^{6*2^j + 2l} for 0 <= l < 2^j.
pub fn criterion_1() -> CriterionOutcome {
    let mut failures = Vec::new();
    let mut exps = vec![1i64, 2];
    let mut base = 6i64;
    let mut block = 1i64;
    while base < 31 {
        for l in 0..block {
            let e = base + 2 * l;
            if e < 31 {
                exps.push(e);
            }
        }
        base *= 2;
        block *= 2;
    }
    let expected = f2_series(&exps, 31);
    match sigma_b(&FieldElement::zero(&f2()), 31) {
        Ok(s) => {
            if s.action() != &expected {
                failures.push(format!("sigma_b(0) = {} != {}", s.action(), expected));
            }
        }
        Err(e) => failures.push(e.to_string()),
    }
    outcome(
        1,
        "sigma_b(0) golden expansion",
        failures,
        "exact match below t^31".into(),
    )
}

/// The inverse series: reversion of sigma_b(0) equals
/// sum t^{3*2^i - 2} + sum_{j>=2} t^{2^j - 2}, and the pair composes to t.
pub fn criterion_2() -> CriterionOutcome {
    let mut failures = Vec::new();
    let mut exps = Vec::new();
    let mut i = 1i64; // 2^i
    while 3 * i - 2 < 47 {
        exps.push(3 * i - 2);
        i *= 2;
    }
    let mut j = 4i64; // 2^j for j >= 2
    while j - 2 < 47 {
        exps.push(j - 2);
        j *= 2;
    }
    let expected = f2_series(&exps, 47);
    let s0 = sigma_b(&FieldElement::zero(&f2()), 47).unwrap();
    let s1 = s0.inverse();
    if s1.action() != &expected {
        failures.push(format!("reversion = {} != {}", s1.action(), expected));
    }
    if !s0.compose(&s1).is_identity() {
        failures.push("sigma_0 after its reversion is not the identity".into());
    }
    outcome(
        2,
        "inverse series identity",
        failures,
        "exact match below t^47".into(),
    )
}

/// Order-4 laws at precision 256 for every b over F_2, F_4 and F_16:
/// fourth power trivial, square nontrivial, and b+1 gives the inverse.
pub fn criterion_3() -> CriterionOutcome {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for field in [f2(), f4(), f16()] {
        let one = FieldElement::one(&field);
        for b in elements(&field) {
            let s = match sigma_b(&b, 256) {
                Ok(s) => s,
                Err(e) => {
                    failures.push(format!("b={b}: {e}"));
                    continue;
                }
            };
            let sq = s.compose(&s);
            if sq.is_identity() {
                failures.push(format!("b={b}: square is the identity"));
            }
            if !sq.compose(&sq).is_identity() {
                failures.push(format!("b={b}: fourth power is not the identity"));
            }
            let partner = sigma_b(&b.add(&one), 256).unwrap();
            if !s.compose(&partner).is_identity() {
                failures.push(format!("b={b}: composition with the b+1 element is not trivial"));
            }
            checked += 1;
        }
    }
    outcome(
        3,
        "order-4 family laws (precision 256)",
        failures,
        format!("{checked} values of b checked"),
    )
}

/// Ramification profile (1,3 / 1,2 / different 8) for every tested b, the
/// genus-1 criterion value, and sharpness of the different bound at (2,2).
pub fn criterion_4() -> CriterionOutcome {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for field in [f2(), f4(), f16()] {
        for b in elements(&field) {
            let s = sigma_b(&b, 16).unwrap();
            match ramification_profile(&s, 2) {
                Ok(p) => {
                    if p.lower_breaks != vec![1, 3]
                        || p.upper_breaks != vec![1, 2]
                        || p.different != 8
                    {
                        failures.push(format!("b={b}: profile {p}"));
                    }
                }
                Err(e) => failures.push(format!("b={b}: {e}")),
            }
            checked += 1;
        }
    }
    if hkg_genus(4, 8).unwrap() != Ratio::from_integer(1) {
        failures.push("pointed-cover genus of (4, 8) is not 1".into());
    }
    if different_lower_bound(2, 2).unwrap() != Ratio::from_integer(8) {
        failures.push("different lower bound at (2,2) is not 8".into());
    }
    outcome(
        4,
        "sigma_b ramification profile and sharp different",
        failures,
        format!("{checked} profiles, all (1,3|1,2|8)"),
    )
}

/// The translated-coordinate expansion on the curve must reproduce the
/// closed-form series coefficient for coefficient.
pub fn criterion_5() -> CriterionOutcome {
    let mut failures = Vec::new();
    let mut cases: Vec<(Field, FieldElement)> = Vec::new();
    let f2 = f2();
    cases.push((f2.clone(), FieldElement::zero(&f2)));
    cases.push((f2.clone(), FieldElement::one(&f2)));
    let f4 = f4();
    cases.push((f4.clone(), FieldElement::gen_x(&f4)));
    for (_, b) in &cases {
        match (eab_local_expansion(b, 64), sigma_b(b, 64)) {
            (Ok(exp), Ok(formula)) => {
                if exp != formula {
                    failures.push(format!("b={b}: expansion differs from the closed form"));
                }
            }
            (e1, e2) => failures.push(format!("b={b}: {e1:?} vs {e2:?}")),
        }
    }
    outcome(
        5,
        "curve expansion matches the closed form",
        failures,
        "b in {0, 1} over F_2 and b = x over F_4, precision 64".into(),
    )
}

/// 200 random (p, m, c) triples with random conjugators: normal-form
/// extraction recovers (m, c) exactly, and the full-automorphism conjugacy
/// test respects m-th power classes on constructed pairs.
pub fn criterion_6(seed: u64) -> CriterionOutcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x6);
    let mut fields = Vec::new();
    for p in [2u64, 3, 5] {
        for r in 1..=3usize {
            fields.push(FieldSpec::new(p, r, None).unwrap());
        }
    }
    for case in 0..200 {
        let field = &fields[rng.random_range(0..fields.len())];
        let p = field.p();
        let m = loop {
            let m = rng.random_range(1..=9u64);
            if m % p != 0 {
                break m;
            }
        };
        let c = loop {
            let c = FieldElement::random(field, &mut rng);
            if !c.is_zero() {
                break c;
            }
        };
        let s = make_order_p(m, &c, 48).unwrap();
        let u = Automorphism::random_nottingham(field, 48, &mut rng);
        match order_p_normal_form(&s.conjugate_by(&u)) {
            Ok(nf) => {
                if nf.m != m || nf.c != c {
                    failures.push(format!(
                        "case {case}: extracted ({}, {}) from (m, c) = ({m}, {c})",
                        nf.m, nf.c
                    ));
                }
            }
            Err(e) => failures.push(format!("case {case}: {e}")),
        }
    }
    // constructed positive/negative pairs for the full conjugacy test
    let mut pairs = 0usize;
    for field in &fields {
        let q_minus_1 = field.order() - 1;
        for m in [2u64, 3, 4, 9] {
            if m % field.p() == 0 {
                continue;
            }
            let c = loop {
                let c = FieldElement::random(field, &mut rng);
                if !c.is_zero() {
                    break c;
                }
            };
            let mu = loop {
                let mu = FieldElement::random(field, &mut rng);
                if !mu.is_zero() {
                    break mu;
                }
            };
            let a = make_order_p(m, &c, 48).unwrap();
            let pos = make_order_p(m, &c.mul(&mu.pow_u128(m as u128)), 48).unwrap();
            if !conjugacy_test_order_p(&a, &pos, ConjugacyMode::FullAut).unwrap() {
                failures.push(format!("positive pair rejected (q={}, m={m})", field.order()));
            }
            pairs += 1;
            let g = gcd(m as u128, q_minus_1);
            if g > 1 {
                // some non-m-th-power exists; find the first one
                let witness = elements(field)
                    .find(|d| !d.is_zero() && !d.pow_u128(q_minus_1 / g).is_one())
                    .expect("a non-power exists when gcd > 1");
                let neg = make_order_p(m, &c.mul(&witness), 48).unwrap();
                if conjugacy_test_order_p(&a, &neg, ConjugacyMode::FullAut).unwrap() {
                    failures.push(format!("negative pair accepted (q={}, m={m})", field.order()));
                }
                pairs += 1;
            }
        }
    }
    outcome(
        6,
        "order-p normal form recovery under conjugation",
        failures,
        format!("200 extractions and {pairs} conjugacy pairs"),
    )
}

fn gcd(a: u128, b: u128) -> u128 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// Enumerating upper break sequences up to 64 attains the sharp lower bound
/// on the different for (2,2), (2,3) and (3,2).
pub fn criterion_7() -> CriterionOutcome {
    let mut failures = Vec::new();
    for (p, n) in [(2u64, 2usize), (2, 3), (3, 2)] {
        let sequences = enumerate_upper_breaks(p, n, 64);
        let min = sequences
            .iter()
            .map(|s| different_from_upper_breaks(p, s).unwrap())
            .min();
        let bound = different_lower_bound(p, n).unwrap();
        match min {
            Some(m) if Ratio::from_integer(m) == bound => {}
            other => failures.push(format!(
                "(p,n)=({p},{n}): minimum {other:?} vs bound {bound}"
            )),
        }
    }
    outcome(
        7,
        "break enumeration attains the different bound",
        failures,
        "(2,2), (2,3), (3,2) with max 64".into(),
    )
}

/// The named covers and the z^n = t^q - t family give their predicted genera.
pub fn criterion_8() -> CriterionOutcome {
    let mut failures = Vec::new();
    let mut check = |which: ExampleCurve, expect: i64| match example_curve(which) {
        Ok(ex) => match superelliptic_genus(&ex.cover) {
            Ok(g) => {
                if g != expect || ex.expected_genus != expect {
                    failures.push(format!("{which:?}: genus {g}, expected {expect}"));
                }
            }
            Err(e) => failures.push(format!("{which:?}: {e}")),
        },
        Err(e) => failures.push(format!("{which:?}: {e}")),
    };
    check(ExampleCurve::Genus3, 3);
    check(ExampleCurve::Genus10, 10);
    for (q, n) in [(3u64, 4u64), (4, 3), (8, 9), (4, 5)] {
        let expect = ((n as i64 - 1) * (q as i64 - 1)) / 2;
        check(ExampleCurve::QCurve { q, n }, expect);
    }
    outcome(
        8,
        "superelliptic genus table",
        failures,
        "genus 3, genus 10, and four (q, n) cases".into(),
    )
}

/// The order-4 point action verifies on every curve over F_2 and F_4 and on
/// 20 random curves over F_64.
pub fn criterion_9(seed: u64) -> CriterionOutcome {
    let mut failures = Vec::new();
    let mut checked = 0usize;
    for field in [f2(), f4()] {
        for a in elements(&field) {
            for b in elements(&field) {
                let curve = EabCurve::new(a.clone(), b.clone()).unwrap();
                let report = eab_verify_action(&curve).unwrap();
                if !report.pass {
                    failures.push(format!("a={a} b={b}: {report}"));
                }
                checked += 1;
            }
        }
    }
    let f64 = FieldSpec::new(2, 6, None).unwrap();
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x9);
    for _ in 0..20 {
        let a = FieldElement::random(&f64, &mut rng);
        let b = FieldElement::random(&f64, &mut rng);
        let curve = EabCurve::new(a.clone(), b.clone()).unwrap();
        let report = eab_verify_action(&curve).unwrap();
        if !report.pass {
            failures.push(format!("F_64 a={a} b={b}: {report}"));
        }
        checked += 1;
    }
    outcome(
        9,
        "elliptic order-4 action on points",
        failures,
        format!("{checked} curves, zero counterexamples"),
    )
}

/// The conjugator construction succeeds for random parameters whenever its
/// trace precondition holds, and the trace test itself separates 0 from 1
/// over F_2 but not over F_4.
pub fn criterion_10(seed: u64) -> CriterionOutcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x10);
    for field in [f4(), f16()] {
        for case in 0..50 {
            let a = FieldElement::random(&field, &mut rng);
            let a2 = FieldElement::random(&field, &mut rng);
            let b = FieldElement::random(&field, &mut rng);
            let c = FieldElement::random(&field, &mut rng);
            let b2 = b.sub(&c.wp());
            match verify_order4_conjugator(&a, &b, &a2, &b2, &c, 32) {
                Ok(report) => {
                    if !report.pass {
                        failures.push(format!("q={} case {case}: {report}", field.order()));
                    }
                }
                Err(e) => failures.push(format!("q={} case {case}: {e}", field.order())),
            }
        }
    }
    let f2 = f2();
    if sigma_conjugacy_test(&FieldElement::zero(&f2), &FieldElement::one(&f2)).unwrap() {
        failures.push("0 and 1 reported conjugate over F_2".into());
    }
    let f4 = f4();
    if !sigma_conjugacy_test(&FieldElement::zero(&f4), &FieldElement::one(&f4)).unwrap() {
        failures.push("0 and 1 reported non-conjugate over F_4".into());
    }
    outcome(
        10,
        "conjugator construction and trace test",
        failures,
        "50 cases over F_4 and 50 over F_16 at precision 32".into(),
    )
}

/// The two-sided genus bound pinches to 1 at (2,2,2) with threshold 2, and
/// excludes (2,3,2).
pub fn criterion_11() -> CriterionOutcome {
    let mut failures = Vec::new();
    let g = genus_bounds(2, 2, 2).unwrap();
    if g.upper != 1
        || g.lower != Ratio::from_integer(1)
        || g.bound_rhs != Some(Ratio::from_integer(2))
        || !g.consistent
    {
        failures.push(format!("(2,2,2): {g}"));
    }
    let g = genus_bounds(2, 3, 2).unwrap();
    if g.consistent || g.lower != Ratio::from_integer(7) {
        failures.push(format!("(2,3,2): {g}"));
    }
    outcome(
        11,
        "genus bound arithmetic",
        failures,
        "equality at (2,2,2), exclusion at (2,3,2)".into(),
    )
}

/// Bulk randomized suites, 1000 cases each: series ring laws, composition
/// associativity, reversion and root round trips, the Artin-Schreier element
/// solver, and the dispersal homomorphism.
pub fn criterion_12(seed: u64) -> CriterionOutcome {
    let mut failures = Vec::new();
    let mut rng = ChaCha20Rng::seed_from_u64(seed ^ 0x12);
    let small_fields = [
        FieldSpec::prime_field(2).unwrap(),
        FieldSpec::new(2, 2, None).unwrap(),
        FieldSpec::new(3, 2, None).unwrap(),
    ];

    let random_series = |field: &Field,
                         lo: i64,
                         prec: i64,
                         rng: &mut ChaCha20Rng|
     -> TruncatedSeries {
        let val = rng.random_range(lo..prec.min(lo + 6));
        let terms: Vec<(i64, FieldElement)> = (val..prec)
            .map(|e| (e, FieldElement::random(field, rng)))
            .collect();
        TruncatedSeries::from_terms(field, prec, &terms)
    };
    let random_val1 = |field: &Field, prec: i64, rng: &mut ChaCha20Rng| -> Automorphism {
        let mut terms = vec![(1, FieldElement::one(field))];
        for e in 2..prec {
            terms.push((e, FieldElement::random(field, rng)));
        }
        Automorphism::new(TruncatedSeries::from_terms(field, prec, &terms)).unwrap()
    };

    // ring laws
    for case in 0..1000 {
        let field = &small_fields[case % small_fields.len()];
        let prec = rng.random_range(8..=32);
        let a = random_series(field, -3, prec, &mut rng);
        let b = random_series(field, -3, prec, &mut rng);
        let c = random_series(field, -3, prec, &mut rng);
        if a.mul(&b) != b.mul(&a) {
            failures.push(format!("ring case {case}: commutativity"));
        }
        let ab_c = a.mul(&b).mul(&c);
        let a_bc = a.mul(&b.mul(&c));
        let n = ab_c.precision().min(a_bc.precision());
        if !ab_c.agrees_to(&a_bc, n) {
            failures.push(format!("ring case {case}: associativity"));
        }
        let lhs = a.mul(&b.add(&c));
        let rhs = a.mul(&b).add(&a.mul(&c));
        let n = lhs.precision().min(rhs.precision());
        if !lhs.agrees_to(&rhs, n) {
            failures.push(format!("ring case {case}: distributivity"));
        }
    }

    // composition associativity on valuation-1 triples
    for case in 0..1000 {
        let field = &small_fields[case % small_fields.len()];
        let prec = rng.random_range(8..=24);
        let a = random_val1(field, prec, &mut rng);
        let b = random_val1(field, prec, &mut rng);
        let c = random_val1(field, prec, &mut rng);
        if a.compose(&b).compose(&c) != a.compose(&b.compose(&c)) {
            failures.push(format!("compose case {case}: associativity"));
        }
    }

    // reversion and m-th root round trips
    for case in 0..1000 {
        let field = &small_fields[case % small_fields.len()];
        let prec = rng.random_range(8..=24);
        let a = random_val1(field, prec, &mut rng);
        let g = a.inverse();
        if !a.compose(&g).is_identity() || !g.compose(&a).is_identity() {
            failures.push(format!("reversion case {case}: round trip"));
        }
        let p = field.p();
        let m = [2u64, 3, 5, 7]
            .into_iter()
            .find(|m| m % p != 0)
            .unwrap();
        let mut unit_terms = vec![(0, FieldElement::one(field))];
        for e in 1..prec {
            unit_terms.push((e, FieldElement::random(field, &mut rng)));
        }
        let u = TruncatedSeries::from_terms(field, prec, &unit_terms);
        let root = u.nth_root(m).unwrap();
        if !root.pow(m).agrees_to(&u, prec) {
            failures.push(format!("root case {case}: {m}th power mismatch"));
        }
    }

    // Artin-Schreier element solver
    let solver_fields = [
        FieldSpec::prime_field(2).unwrap(),
        FieldSpec::new(2, 3, None).unwrap(),
        FieldSpec::new(3, 2, None).unwrap(),
        FieldSpec::new(5, 2, None).unwrap(),
    ];
    for case in 0..1000 {
        let field = &solver_fields[case % solver_fields.len()];
        let a = FieldElement::random(field, &mut rng);
        match wp_solve(&a) {
            Some(c) => {
                if a.trace_to_prime() != 0 {
                    failures.push(format!("solver case {case}: solution despite nonzero trace"));
                }
                if c.wp() != a {
                    failures.push(format!("solver case {case}: returned non-solution"));
                }
            }
            None => {
                if a.trace_to_prime() == 0 {
                    failures.push(format!("solver case {case}: missed a solution"));
                }
            }
        }
    }

    // dispersal is an injective homomorphism; a depth-2 deviation survives
    // the exponent spread whenever the precision exceeds m + 1, which makes
    // the kernel check meaningful at finite precision
    for case in 0..1000 {
        let field = &small_fields[case % small_fields.len()];
        let p = field.p();
        let prec = rng.random_range(8..=20);
        let m = [3u64, 5, 4].into_iter().find(|m| m % p != 0).unwrap();
        let a = random_val1(field, prec, &mut rng);
        let b = random_val1(field, prec, &mut rng);
        let lhs = dispersal(&a.compose(&b), m).unwrap();
        let rhs = dispersal(&a, m).unwrap().compose(&dispersal(&b, m).unwrap());
        if lhs != rhs {
            failures.push(format!("dispersal case {case}: homomorphism"));
        }
        if !dispersal(&Automorphism::identity(field, prec), m)
            .unwrap()
            .is_identity()
        {
            failures.push(format!("dispersal case {case}: identity not preserved"));
        }
        let c2 = loop {
            let c = FieldElement::random(field, &mut rng);
            if !c.is_zero() {
                break c;
            }
        };
        let deep = Automorphism::new(TruncatedSeries::from_terms(
            field,
            prec,
            &[(1, FieldElement::one(field)), (2, c2)],
        ))
        .unwrap();
        if dispersal(&deep, m).unwrap().is_identity() {
            failures.push(format!("dispersal case {case}: kernel sees a visible deviation"));
        }
    }

    outcome(
        12,
        "library property suites",
        failures,
        "5 suites x 1000 cases".into(),
    )
}
