//! quador — exact, desk-scale analysis of quadratic polynomials over `Z_m`
//! restricted to the boolean cube.
//!
//! The crate turns one self-contained piece of combinatorics into runnable
//! code: how the zero set, the exponential sums, and the rank structure of a
//! quadratic polynomial mod a composite number interact on `B^n = {0,1}^n`.
//! Everything is computed exactly (integer histograms, Smith forms over
//! `Z_m`, exhaustive searches with explicit budgets); floating point appears
//! only in the final roots-of-unity assembly of exponential sums.
//!
//! The pieces:
//!
//! * [`zmod`] — Smith normal form, group-shape rank, nullspaces and full-rank
//!   submatrices over `Z_m`.
//! * [`quadratic`] — polynomial representation, boolean folding, associated
//!   matrices, rank and boolean-rank bounds.
//! * [`rigidity`] — diagonal rigidity, the constructive low-rank diagonal,
//!   and the weight-tail experiment.
//! * [`counting`] — residue histograms over the cube (Gray-code engine),
//!   OR-representation checking and search, exponential-sum identities,
//!   Weyl differencing.
//! * [`additive`] — Davenport constants and boolean solution counting for
//!   modular linear systems.
//! * [`constructions`] — matching vector families and Cayley-type graphs
//!   built from OR-representing polynomials.
//! * [`cli`] — manifests, reports and the subcommand front end used by the
//!   `quador` binary.
//!
//! Each major capability also has a runnable demo under `examples/`.

pub mod additive;
pub mod counting;
pub mod error;
pub mod quadratic;
pub mod rigidity;
pub mod zmod;

pub use error::{Error, Result};
