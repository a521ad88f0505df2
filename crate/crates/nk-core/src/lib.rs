//! Computations with finite-order automorphisms of the power series ring
//! k[[t]] over small finite fields.
//!
//! The crate is organized by layer:
//! - [`field`]: exact arithmetic in F_{p^r}, the Artin-Schreier operator and
//!   its solver
//! - [`series`]: truncated Laurent/power series with absolute-precision
//!   tracking: ring operations, composition, reversion, m-th roots
//! - [`nottingham`]: the group of substitution automorphisms at finite
//!   precision: order detection, ramification breaks and differents,
//!   order-p normal forms, dispersal, the order-4 family sigma_b
//! - [`curves`]: the explicit curves behind those automorphisms: the
//!   order-4 elliptic-curve action, its local expansion at infinity,
//!   superelliptic covers and their genus, the conjugator construction
//! - [`text`]: the plain-text forms used by the command line tool
//! - [`selftest`]: the deterministic verification suite behind `nk selftest`

pub mod field;
pub mod series;
pub mod nottingham;
pub mod curves;
pub mod text;
pub mod selftest;
