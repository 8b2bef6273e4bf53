//! Certified lower bounds for multivariate integration in tensor-product
//! spaces, and the L_p discrepancies they control.
//!
//! The crate answers questions of the form: *given any quadrature rule on a
//! fixed set of nodes, how large must its worst-case integration error be?*
//! Everything is organized around a univariate space descriptor
//! ([`spaces::SpaceSpec`]) from which worst-case functions, their
//! decompositions, and the derived constants are computed. On top of that:
//!
//! - [`fooling`] produces certified lower bounds for arbitrary rules from
//!   decomposable worst-case functions (exact hit-set computation, brute-force
//!   oracles, closed forms, and the resulting information-complexity bounds).
//! - [`positive`] produces lower bounds for nonnegative-weight rules from
//!   spline majorant families, with the polynomial-space and
//!   no-anchor-Sobolev instances built in.
//! - [`discrepancy`] evaluates anchored / quadrant / generalized L_p
//!   discrepancies with closed-form (p = 2), exact box-decomposition, and
//!   Monte Carlo backends, and ties them to quasi-Monte Carlo worst-case
//!   errors.
//! - [`weighted`] covers density-weighted integration over the real line.
//! - [`numerics`] and [`points`] carry the shared quadrature/maximization
//!   primitives and node-set generation.
//!
//! The crate is `no_std`-compatible (`alloc` required); enable the `libm`
//! feature when building without `std`.

#![cfg_attr(not(feature = "std"), no_std)]
// Parameter guards are written `!(x > 0.0)` on purpose: the negation also
// rejects NaN. Parity tests on small integers stay as `% 2`.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::manual_is_multiple_of)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("cursekit-core needs either the `std` or the `libm` feature for f64 math");

extern crate alloc;

pub mod discrepancy;
pub mod error;
pub mod fooling;
mod interp;
mod math;
pub mod numerics;
pub mod points;
pub mod positive;
pub mod spaces;
pub mod weighted;

pub use error::{Error, Result};
