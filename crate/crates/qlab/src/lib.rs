//! An exact-arithmetic laboratory for q-series identities connecting
//! Habiro-type series, Bailey chains, Hecke-type double sums, and false
//! theta functions, together with high-precision evaluation of their limits
//! at roots of unity and of the unified WRT invariant of the Poincaré
//! homology sphere.
//!
//! Identities are verified coefficient-by-coefficient in truncated formal
//! power series over the exact rationals ([`qseries::QExpansion`]); limit
//! formulas are finite Gauss/Bernoulli sums evaluated at configurable
//! decimal precision ([`precision::Ctx`]); modular transformation formulas
//! are checked numerically by quadrature of Eichler-type integrals.

pub mod bailey;
pub mod falsetheta;
pub mod hecke;
pub mod limits;
pub mod modular;
pub mod mzv;
pub mod precision;
pub mod qseries;

pub use qseries::{ord, ExactRational, Order, QExpansion};
