//! `nk`: scripted computations with finite-order automorphisms of k[[t]].
//!
//! Single-invocation model: every call runs exactly one library operation and
//! prints its result in the stable text forms, so golden-file testing needs
//! no parser. Exit status 0 on success, 1 on domain errors (one diagnostic
//! line on stderr), 2 on usage errors.

use clap::{Parser, Subcommand, ValueEnum};

use nk_core::curves::{
    eab_local_expansion, eab_points, eab_verify_action, example_curve, superelliptic_genus,
    verify_order4_conjugator, ExampleCurve,
};
use nk_core::field::{Field, FieldElement, FieldSpec};
use nk_core::nottingham::{
    artin_schreier_series, conjugacy_test_order_p, different_lower_bound, dispersal,
    enumerate_upper_breaks, genus_bounds, hkg_genus, make_order_p, order_p_normal_form,
    ramification_profile, sigma_b, sigma_conjugacy_test, validate_upper_breaks, Automorphism,
    ConjugacyMode,
};
use nk_core::selftest;
use nk_core::series::TruncatedSeries;
use nk_core::text;

#[derive(Parser)]
#[command(
    name = "nk",
    version,
    about = "Finite-order automorphisms of k[[t]] over finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// conjugacy inside the principal (leading coefficient 1) subgroup
    Nk,
    /// conjugacy in the full automorphism group
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum ExampleName {
    Genus3,
    Genus10,
    QCurve,
}

#[derive(Subcommand)]
enum Command {
    /// Build a field F_{p^r}; the modulus defaults to the first irreducible
    FieldMake {
        #[arg(long)]
        p: u64,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long)]
        modulus: Option<String>,
    },
    /// Solve x^p - x = a, printing the smallest solution or `none`
    WpSolve {
        #[arg(long)]
        field: String,
        #[arg(long)]
        a: String,
    },
    /// Compose two automorphisms: result(t) = f(g(t))
    Compose {
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
    },
    /// Compositional inverse of an automorphism
    Invert {
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        series: String,
    },
    /// k-th power of an automorphism (negative k through the inverse)
    Power {
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        series: String,
        #[arg(long, allow_negative_numbers = true)]
        k: i64,
    },
    /// Smallest k <= bound with the k-th power trivial at the precision
    Order {
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        series: String,
        #[arg(long, default_value_t = 16)]
        bound: u32,
    },
    /// Normal-form data (m, c) of an order-p element
    NormalForm {
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        series: String,
    },
    /// The element t (1 + c t^m)^{-1/m} of order p
    MakeOrderP {
        #[arg(long)]
        field: String,
        #[arg(long)]
        m: u64,
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 64)]
        prec: i64,
    },
    /// Conjugacy test for two order-p elements
    ConjTestP {
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[arg(long, value_enum, default_value_t = ModeArg::Nk)]
        mode: ModeArg,
    },
    /// m-dispersal f(t) -> f(t^m)^{1/m}
    Dispersal {
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        series: String,
        #[arg(long)]
        m: u64,
    },
    /// Ramification breaks and different of an order-p^n element
    Profile {
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        series: String,
        /// claimed group order p^n
        #[arg(long)]
        order: u128,
    },
    /// Check the three conditions on an upper break sequence
    ValidBreaks {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        seq: String,
    },
    /// All valid upper break sequences with last entry <= max
    EnumBreaks {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        max: i64,
    },
    /// Sharp lower bound for the different of a cyclic p^n-group
    BoundDifferent {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
    },
    /// Genus bounds for degree d and a cyclic p^n action
    BoundsGenus {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        d: i64,
    },
    /// Genus 1 - |P| + different/2 of a one-point wildly ramified cover
    HkgGenus {
        #[arg(long)]
        order: u64,
        #[arg(long, allow_negative_numbers = true)]
        different: i128,
    },
    /// Series solution of beta^p - beta = alpha
    AsSeries {
        #[arg(long)]
        field: Option<String>,
        #[arg(long)]
        alpha: String,
    },
    /// The order-4 automorphism attached to b (characteristic 2)
    SigmaB {
        #[arg(long)]
        field: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 64)]
        prec: i64,
    },
    /// Conjugacy of the order-4 elements for b and b' (trace test)
    SigmaConj {
        #[arg(long)]
        field: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        b2: String,
    },
    /// All points of an order-4 elliptic curve over its base field
    EabPoints {
        #[arg(long)]
        curve: String,
    },
    /// Verify the order-4 action pointwise
    EabVerify {
        #[arg(long)]
        curve: String,
    },
    /// Local expansion of the curve action at infinity
    EabExpand {
        #[arg(long)]
        field: String,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 64)]
        prec: i64,
    },
    /// Genus of a tame cyclic cover from its branch data
    Genus {
        #[arg(long)]
        cover: String,
        /// characteristic, for the tameness check
        #[arg(long)]
        p: Option<u64>,
    },
    /// One of the stock covers, with its expected genus
    Example {
        #[arg(long, value_enum)]
        name: ExampleName,
        #[arg(long)]
        q: Option<u64>,
        #[arg(long)]
        n: Option<u64>,
    },
    /// Build and check the conjugator between two order-4 curve actions
    VerifyConjugator {
        #[arg(long)]
        field: String,
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
        #[arg(long)]
        a2: String,
        #[arg(long)]
        b2: String,
        #[arg(long)]
        c: String,
        #[arg(long, default_value_t = 64)]
        prec: i64,
    },
    /// Run the full verification suite with a fixed seed
    Selftest {
        #[arg(long, default_value_t = selftest::DEFAULT_SEED)]
        seed: u64,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Command::Selftest { seed } = cli.command {
        let outcomes = selftest::run_all(seed);
        let mut ok = true;
        for o in &outcomes {
            println!("{o}");
            ok &= o.passed;
        }
        std::process::exit(if ok { 0 } else { 1 });
    }
    match run(cli.command) {
        Ok(output) => println!("{output}"),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}

fn parse_field_arg(s: &str) -> Result<Field, String> {
    text::parse_field(s).map_err(|e| e.to_string())
}

fn parse_opt_field(field: &Option<String>) -> Result<Option<Field>, String> {
    field.as_deref().map(parse_field_arg).transpose()
}

fn parse_series_arg(s: &str, field: &Option<String>) -> Result<TruncatedSeries, String> {
    let f = parse_opt_field(field)?;
    text::parse_series(s, f.as_ref()).map_err(|e| e.to_string())
}

fn parse_aut(s: &str, field: &Option<String>) -> Result<Automorphism, String> {
    Automorphism::new(parse_series_arg(s, field)?).map_err(|e| e.to_string())
}

fn parse_elem(s: &str, field: &Field) -> Result<FieldElement, String> {
    text::parse_element(s, field).map_err(|e| e.to_string())
}

fn same_field_check(a: &Automorphism, b: &Automorphism) -> Result<(), String> {
    if a.field() == b.field() {
        Ok(())
    } else {
        Err("series over different fields".into())
    }
}

fn int_list(s: &str) -> Result<Vec<i64>, String> {
    s.split(',')
        .map(|t| t.parse().map_err(|_| format!("bad integer {t}")))
        .collect()
}

fn series_doc(s: &TruncatedSeries) -> String {
    text::format_series_doc(s)
}

fn run(command: Command) -> Result<String, String> {
    let err = |e: &dyn std::fmt::Display| e.to_string();
    match command {
        Command::FieldMake { p, r, modulus } => {
            let m = modulus.map(|m| {
                m.split(',')
                    .map(|t| t.parse::<u64>().map_err(|_| format!("bad integer {t}")))
                    .collect::<Result<Vec<_>, _>>()
            });
            let m = match m {
                None => None,
                Some(v) => Some(v?),
            };
            let f = FieldSpec::new(p, r, m).map_err(|e| err(&e))?;
            Ok(text::format_field(&f))
        }
        Command::WpSolve { field, a } => {
            let f = parse_field_arg(&field)?;
            let a = parse_elem(&a, &f)?;
            Ok(match nk_core::field::wp_solve(&a) {
                Some(c) => c.to_string(),
                None => "none".into(),
            })
        }
        Command::Compose { field, f, g } => {
            let a = parse_series_arg(&f, &field)?;
            let b = parse_series_arg(&g, &field)?;
            if a.field() != b.field() {
                return Err("series over different fields".into());
            }
            Ok(series_doc(&a.compose(&b).map_err(|e| err(&e))?))
        }
        Command::Invert { field, series } => {
            let a = parse_aut(&series, &field)?;
            Ok(series_doc(a.inverse().action()))
        }
        Command::Power { field, series, k } => {
            let a = parse_aut(&series, &field)?;
            Ok(series_doc(a.pow(k).action()))
        }
        Command::Order {
            field,
            series,
            bound,
        } => {
            if bound == 0 {
                return Err("bound must be at least 1".into());
            }
            let a = parse_aut(&series, &field)?;
            let res = a.order(bound);
            Ok(match res.order {
                Some(k) => format!("order={} prec={}", k, res.precision),
                None => format!("order=none prec={}", res.precision),
            })
        }
        Command::NormalForm { field, series } => {
            let a = parse_aut(&series, &field)?;
            let nf = order_p_normal_form(&a).map_err(|e| err(&e))?;
            Ok(format!("m={} c={}", nf.m, nf.c))
        }
        Command::MakeOrderP { field, m, c, prec } => {
            let f = parse_field_arg(&field)?;
            let c = parse_elem(&c, &f)?;
            let a = make_order_p(m, &c, prec).map_err(|e| err(&e))?;
            Ok(series_doc(a.action()))
        }
        Command::ConjTestP { field, f, g, mode } => {
            let a = parse_aut(&f, &field)?;
            let b = parse_aut(&g, &field)?;
            same_field_check(&a, &b)?;
            let mode = match mode {
                ModeArg::Nk => ConjugacyMode::Nottingham,
                ModeArg::Full => ConjugacyMode::FullAut,
            };
            let res = conjugacy_test_order_p(&a, &b, mode).map_err(|e| err(&e))?;
            Ok(res.to_string())
        }
        Command::Dispersal { field, series, m } => {
            let a = parse_aut(&series, &field)?;
            Ok(series_doc(dispersal(&a, m).map_err(|e| err(&e))?.action()))
        }
        Command::Profile {
            field,
            series,
            order,
        } => {
            let a = parse_aut(&series, &field)?;
            let p = a.field().p() as u128;
            let mut n = 0usize;
            let mut rest = order;
            while rest > 1 && rest % p == 0 {
                rest /= p;
                n += 1;
            }
            if rest != 1 || n == 0 {
                return Err(format!(
                    "order {order} is not a positive power of the characteristic {p}"
                ));
            }
            let profile = ramification_profile(&a, n).map_err(|e| err(&e))?;
            Ok(profile.to_string())
        }
        Command::ValidBreaks { p, seq } => {
            let seq = int_list(&seq)?;
            Ok(match validate_upper_breaks(p, &seq) {
                Ok(()) => "true".into(),
                Err(v) => format!("false {v}"),
            })
        }
        Command::EnumBreaks { p, n, max } => {
            let lines: Vec<String> = enumerate_upper_breaks(p, n, max)
                .into_iter()
                .map(|seq| {
                    seq.iter()
                        .map(|b| b.to_string())
                        .collect::<Vec<_>>()
                        .join(",")
                })
                .collect();
            Ok(lines.join("\n"))
        }
        Command::BoundDifferent { p, n } => {
            Ok(different_lower_bound(p, n).map_err(|e| err(&e))?.to_string())
        }
        Command::BoundsGenus { p, n, d } => {
            Ok(genus_bounds(p, n, d).map_err(|e| err(&e))?.to_string())
        }
        Command::HkgGenus { order, different } => {
            let g = hkg_genus(order, different).map_err(|e| err(&e))?;
            Ok(if g.is_integer() {
                g.to_string()
            } else {
                format!("{g} (non-integral)")
            })
        }
        Command::AsSeries { field, alpha } => {
            let alpha = parse_series_arg(&alpha, &field)?;
            let beta = artin_schreier_series(&alpha).map_err(|e| err(&e))?;
            Ok(series_doc(&beta))
        }
        Command::SigmaB { field, b, prec } => {
            let f = parse_field_arg(&field)?;
            let b = parse_elem(&b, &f)?;
            Ok(series_doc(sigma_b(&b, prec).map_err(|e| err(&e))?.action()))
        }
        Command::SigmaConj { field, b, b2 } => {
            let f = parse_field_arg(&field)?;
            let b = parse_elem(&b, &f)?;
            let b2 = parse_elem(&b2, &f)?;
            Ok(sigma_conjugacy_test(&b, &b2).map_err(|e| err(&e))?.to_string())
        }
        Command::EabPoints { curve } => {
            let c = text::parse_eab_curve(&curve).map_err(|e| err(&e))?;
            let pts = eab_points(&c).map_err(|e| err(&e))?;
            let mut lines = vec![format!("POINTS {}", pts.len())];
            lines.extend(pts.iter().map(|p| p.to_string()));
            Ok(lines.join("\n"))
        }
        Command::EabVerify { curve } => {
            let c = text::parse_eab_curve(&curve).map_err(|e| err(&e))?;
            Ok(eab_verify_action(&c).map_err(|e| err(&e))?.to_string())
        }
        Command::EabExpand { field, b, prec } => {
            let f = parse_field_arg(&field)?;
            let b = parse_elem(&b, &f)?;
            let a = eab_local_expansion(&b, prec).map_err(|e| err(&e))?;
            Ok(series_doc(a.action()))
        }
        Command::Genus { cover, p } => {
            let c = text::parse_cover(&cover, p).map_err(|e| err(&e))?;
            Ok(superelliptic_genus(&c).map_err(|e| err(&e))?.to_string())
        }
        Command::Example { name, q, n } => {
            let which = match name {
                ExampleName::Genus3 => ExampleCurve::Genus3,
                ExampleName::Genus10 => ExampleCurve::Genus10,
                ExampleName::QCurve => {
                    let q = q.ok_or("q-curve needs --q")?;
                    let n = n.ok_or("q-curve needs --n")?;
                    ExampleCurve::QCurve { q, n }
                }
            };
            let ex = example_curve(which).map_err(|e| err(&e))?;
            Ok(format!("{}\ngenus={}", ex.cover, ex.expected_genus))
        }
        Command::VerifyConjugator {
            field,
            a,
            b,
            a2,
            b2,
            c,
            prec,
        } => {
            let f = parse_field_arg(&field)?;
            let a = parse_elem(&a, &f)?;
            let b = parse_elem(&b, &f)?;
            let a2 = parse_elem(&a2, &f)?;
            let b2 = parse_elem(&b2, &f)?;
            let c = parse_elem(&c, &f)?;
            let report = verify_order4_conjugator(&a, &b, &a2, &b2, &c, prec)
                .map_err(|e| err(&e))?;
            Ok(format!("{report}\nf= {}\nh= {}", report.f, report.h))
        }
        Command::Selftest { .. } => unreachable!("handled in main"),
    }
}
