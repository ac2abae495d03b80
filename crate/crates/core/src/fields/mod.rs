//! Exact arithmetic: rationals, polynomials and rational functions over Q,
//! tower fields and their elements, Möbius substitutions.

pub mod element;
pub mod mobius;
pub mod poly;
pub mod ratfunc;
pub mod rational;
pub mod tower;

pub use element::FieldElement;
pub use mobius::{mobius_split_identity, mobius_split_normalized, MobiusCoeffs, SPLIT_ANCHOR};
pub use poly::Poly;
pub use ratfunc::RatFunc;
pub use rational::{fmt_rational, rat, ratio, Rational};
pub use tower::{build_tower, GeneratorKind, GeneratorSpec, MinPoly, TowerField};
