//! Plain-text forms for every value the command line reads or writes.
//!
//! Grammars (all whitespace-tokenized, deterministic field order):
//! - field:   `GF p r c0,c1,...,cr` (modulus constant-first, decimal)
//! - element: `e0,e1,...,e{r-1}`; a single integer is accepted as the
//!   constant it embeds
//! - series:  `SER v=<valuation> N=<precision> <c_v> ... <c_{N-1}>`,
//!   optionally preceded by a field header; printed documents always carry
//!   the header so that output re-parses without external context
//! - profile: `PROFILE p=<p> n=<n> lower=<..> upper=<..> i=<..> different=<d>`
//! - curve:   `EAB <field> a=<elt> b=<elt>`
//! - cover:   `COVER n=<n> g0=<g> branch=<m1,m2,...>`

use thiserror::Error;

use crate::curves::{EabCurve, SuperellipticCover};
use crate::field::{Field, FieldElement, FieldSpec};
use crate::nottingham::RamificationProfile;
use crate::series::TruncatedSeries;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: &'static str, found: String },
    #[error("input ended while expecting {0}")]
    Eof(&'static str),
    #[error("trailing input starting at {0}")]
    Trailing(String),
    #[error("bad integer {0}")]
    BadInteger(String),
    #[error("element has {got} coordinates, field wants {want} (or 1)")]
    CoordinateCount { got: usize, want: usize },
    #[error("no field in scope: series text needs a GF header or an explicit field")]
    MissingField,
    #[error("series lists {got} coefficients but N - v = {want}")]
    CoefficientCount { got: usize, want: usize },
    #[error("invalid value: {0}")]
    Domain(String),
}

struct Tokens<'a> {
    items: Vec<&'a str>,
    pos: usize,
}

impl<'a> Tokens<'a> {
    fn new(s: &'a str) -> Self {
        Tokens {
            items: s.split_whitespace().collect(),
            pos: 0,
        }
    }

    fn next(&mut self, what: &'static str) -> Result<&'a str, ParseError> {
        let t = self.items.get(self.pos).ok_or(ParseError::Eof(what))?;
        self.pos += 1;
        Ok(t)
    }

    fn peek(&self) -> Option<&'a str> {
        self.items.get(self.pos).copied()
    }

    fn expect(&mut self, word: &'static str) -> Result<(), ParseError> {
        let t = self.next(word)?;
        if t != word {
            return Err(ParseError::Unexpected {
                expected: word,
                found: t.to_string(),
            });
        }
        Ok(())
    }

    fn finish(&self) -> Result<(), ParseError> {
        match self.items.get(self.pos) {
            None => Ok(()),
            Some(t) => Err(ParseError::Trailing(t.to_string())),
        }
    }

    /// Consumes `key=` and returns the value part of a `key=value` token.
    fn keyed(&mut self, key: &'static str) -> Result<&'a str, ParseError> {
        let t = self.next(key)?;
        match t.strip_prefix(key).and_then(|rest| rest.strip_prefix('=')) {
            Some(v) => Ok(v),
            None => Err(ParseError::Unexpected {
                expected: key,
                found: t.to_string(),
            }),
        }
    }
}

fn int<T: std::str::FromStr>(s: &str) -> Result<T, ParseError> {
    s.parse().map_err(|_| ParseError::BadInteger(s.to_string()))
}

fn int_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>, ParseError> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',').map(int).collect()
}

pub fn format_field(field: &Field) -> String {
    let mods: Vec<String> = field.modulus().iter().map(|c| c.to_string()).collect();
    format!("GF {} {} {}", field.p(), field.r(), mods.join(","))
}

fn parse_field_tokens(t: &mut Tokens) -> Result<Field, ParseError> {
    t.expect("GF")?;
    let p: u64 = int(t.next("p")?)?;
    let r: usize = int(t.next("r")?)?;
    let modulus: Vec<u64> = int_list(t.next("modulus")?)?;
    FieldSpec::new(p, r, Some(modulus)).map_err(|e| ParseError::Domain(e.to_string()))
}

pub fn parse_field(s: &str) -> Result<Field, ParseError> {
    let mut t = Tokens::new(s);
    let f = parse_field_tokens(&mut t)?;
    t.finish()?;
    Ok(f)
}

pub fn format_element(e: &FieldElement) -> String {
    e.to_string()
}

pub fn parse_element(s: &str, field: &Field) -> Result<FieldElement, ParseError> {
    let coords: Vec<u64> = int_list(s)?;
    if coords.len() == field.r() {
        FieldElement::from_coords(field, &coords).map_err(|e| ParseError::Domain(e.to_string()))
    } else if coords.len() == 1 {
        Ok(FieldElement::from_u64(field, coords[0]))
    } else {
        Err(ParseError::CoordinateCount {
            got: coords.len(),
            want: field.r(),
        })
    }
}

/// Series document: field header line plus the SER line, so the output
/// re-parses with no external context.
pub fn format_series_doc(s: &TruncatedSeries) -> String {
    format!("{}\n{}", format_field(s.field()), s)
}

/// Accepts `SER ...` (field supplied by the caller) or `GF ... SER ...`.
pub fn parse_series(s: &str, field: Option<&Field>) -> Result<TruncatedSeries, ParseError> {
    let mut t = Tokens::new(s);
    let own_field;
    let field = if t.peek() == Some("GF") {
        own_field = parse_field_tokens(&mut t)?;
        &own_field
    } else {
        field.ok_or(ParseError::MissingField)?
    };
    t.expect("SER")?;
    let v: i64 = int(t.keyed("v")?)?;
    let n: i64 = int(t.keyed("N")?)?;
    if n < v {
        return Err(ParseError::Domain(format!(
            "precision N = {n} below valuation v = {v}"
        )));
    }
    let want = (n - v) as usize;
    let mut coeffs = Vec::with_capacity(want);
    for _ in 0..want {
        match t.next("coefficient") {
            Ok(tok) => coeffs.push(parse_element(tok, field)?),
            Err(_) => {
                return Err(ParseError::CoefficientCount {
                    got: coeffs.len(),
                    want,
                })
            }
        }
    }
    t.finish()?;
    Ok(TruncatedSeries::from_coefficients(field, v, coeffs))
}

pub fn format_profile(p: &RamificationProfile) -> String {
    p.to_string()
}

pub fn parse_profile(s: &str) -> Result<RamificationProfile, ParseError> {
    let mut t = Tokens::new(s);
    t.expect("PROFILE")?;
    let p: u64 = int(t.keyed("p")?)?;
    let n: usize = int(t.keyed("n")?)?;
    let lower: Vec<i64> = int_list(t.keyed("lower")?)?;
    let upper: Vec<i64> = int_list(t.keyed("upper")?)?;
    let incs: Vec<i64> = int_list(t.keyed("i")?)?;
    let different: i128 = int(t.keyed("different")?)?;
    t.finish()?;
    let rebuilt = RamificationProfile::from_lower_breaks(p, &lower)
        .map_err(|e| ParseError::Domain(e.to_string()))?;
    if rebuilt.n != n
        || rebuilt.upper_breaks != upper
        || rebuilt.increments != incs
        || rebuilt.different != different
    {
        return Err(ParseError::Domain(
            "profile fields are mutually inconsistent".into(),
        ));
    }
    Ok(rebuilt)
}

pub fn format_eab_curve(c: &EabCurve) -> String {
    format!(
        "EAB {} a={} b={}",
        format_field(c.field()),
        c.a(),
        c.b()
    )
}

pub fn parse_eab_curve(s: &str) -> Result<EabCurve, ParseError> {
    let mut t = Tokens::new(s);
    t.expect("EAB")?;
    let field = parse_field_tokens(&mut t)?;
    let a = parse_element(t.keyed("a")?, &field)?;
    let b = parse_element(t.keyed("b")?, &field)?;
    t.finish()?;
    EabCurve::new(a, b).map_err(|e| ParseError::Domain(e.to_string()))
}

pub fn format_cover(c: &SuperellipticCover) -> String {
    c.to_string()
}

/// Branch labels are synthesized as s1, s2, ...; the characteristic check is
/// the caller's responsibility (pass it to the genus operation if known).
pub fn parse_cover(s: &str, char_p: Option<u64>) -> Result<SuperellipticCover, ParseError> {
    let mut t = Tokens::new(s);
    t.expect("COVER")?;
    let n: u64 = int(t.keyed("n")?)?;
    let g0: i64 = int(t.keyed("g0")?)?;
    let mults: Vec<i64> = int_list(t.keyed("branch")?)?;
    t.finish()?;
    let branch = mults
        .into_iter()
        .enumerate()
        .map(|(i, m)| (format!("s{}", i + 1), m))
        .collect();
    SuperellipticCover::new(n, g0, branch, char_p).map_err(|e| ParseError::Domain(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::example_curve;
    use crate::nottingham::{ramification_profile, sigma_b};

    #[test]
    fn field_round_trip() {
        for s in ["GF 2 1 1,1", "GF 2 2 1,1,1", "GF 3 2 1,0,1", "GF 5 3 1,1,0,1"] {
            let f = parse_field(s).unwrap();
            assert_eq!(format_field(&f), s);
        }
        assert!(parse_field("GF 4 1 1,1").is_err());
        assert!(parse_field("GF 2 1").is_err());
    }

    #[test]
    fn element_forms() {
        let f4 = parse_field("GF 2 2 1,1,1").unwrap();
        let x = parse_element("0,1", &f4).unwrap();
        assert_eq!(format_element(&x), "0,1");
        // single integer embeds as a constant
        let one = parse_element("1", &f4).unwrap();
        assert!(one.is_one());
        assert!(parse_element("1,0,1", &f4).is_err());
    }

    #[test]
    fn series_round_trip() {
        let f2 = parse_field("GF 2 1 1,1").unwrap();
        let s = sigma_b(&crate::field::FieldElement::zero(&f2), 31).unwrap();
        let doc = format_series_doc(s.action());
        let back = parse_series(&doc, None).unwrap();
        assert_eq!(&back, s.action());
        // bare SER form with external field
        let bare = s.action().to_string();
        assert_eq!(&parse_series(&bare, Some(&f2)).unwrap(), s.action());
        assert!(parse_series(&bare, None).is_err());
    }

    #[test]
    fn series_zero_and_laurent_round_trip() {
        let f4 = parse_field("GF 2 2 1,1,1").unwrap();
        let zero = TruncatedSeries::zero(&f4, 7);
        assert_eq!(zero.to_string(), "SER v=7 N=7");
        assert_eq!(parse_series("SER v=7 N=7", Some(&f4)).unwrap(), zero);

        let x = crate::field::FieldElement::gen_x(&f4);
        let laurent = TruncatedSeries::monomial(&x, -3, 2);
        let text = laurent.to_string();
        assert_eq!(text, "SER v=-3 N=2 0,1 0,0 0,0 0,0 0,0");
        assert_eq!(parse_series(&text, Some(&f4)).unwrap(), laurent);
    }

    #[test]
    fn series_with_leading_zero_normalizes() {
        let f2 = parse_field("GF 2 1 1,1").unwrap();
        let s = parse_series("SER v=1 N=4 0 1 1", Some(&f2)).unwrap();
        assert_eq!(s.valuation(), 2);
        assert_eq!(s.to_string(), "SER v=2 N=4 1 1");
    }

    #[test]
    fn series_coefficient_count_is_checked() {
        let f2 = parse_field("GF 2 1 1,1").unwrap();
        assert!(matches!(
            parse_series("SER v=1 N=4 1 1", Some(&f2)),
            Err(ParseError::CoefficientCount { got: 2, want: 3 })
        ));
        assert!(matches!(
            parse_series("SER v=1 N=4 1 1 1 1", Some(&f2)),
            Err(ParseError::Trailing(_))
        ));
    }

    #[test]
    fn profile_round_trip() {
        let f2 = parse_field("GF 2 1 1,1").unwrap();
        let s = sigma_b(&crate::field::FieldElement::zero(&f2), 16).unwrap();
        let p = ramification_profile(&s, 2).unwrap();
        let text = format_profile(&p);
        assert_eq!(parse_profile(&text).unwrap(), p);
        assert!(parse_profile("PROFILE p=2 n=2 lower=1,3 upper=1,2 i=1,1 different=9").is_err());
    }

    #[test]
    fn eab_round_trip() {
        let text = "EAB GF 2 2 1,1,1 a=0,1 b=1,1";
        let c = parse_eab_curve(text).unwrap();
        assert_eq!(format_eab_curve(&c), text);
    }

    #[test]
    fn cover_round_trip() {
        let ex = example_curve(crate::curves::ExampleCurve::Genus3).unwrap();
        let text = format_cover(&ex.cover);
        assert_eq!(text, "COVER n=4 g0=0 branch=1,1,1,-3");
        let back = parse_cover(&text, Some(3)).unwrap();
        assert_eq!(
            crate::curves::superelliptic_genus(&back).unwrap(),
            ex.expected_genus
        );
    }
}
