//! Numerical toolkit for generalized reflection coefficients of one-dimensional
//! whole-line spectral problems.
//!
//! The library evaluates Weyl m-function pairs of Jacobi operators that are
//! compact perturbations of the free operator, builds reflection coefficients
//! from arbitrary Herglotz-function pairs, and exercises the structural facts
//! that make them useful: invariance of |R| under transfer-matrix maps (shifts
//! and Toda flows), semicontinuity of |R| under operator limits, the J-inner
//! characterization of canonical-system transfer matrices, and the shrinkage
//! dichotomy of Weyl disks.
//!
//! The crate is `no_std` (with `alloc`); all file formats and the command-line
//! front end live in the companion `reflco-cli` crate.

#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` guards are deliberate: they reject NaN along with the
// out-of-domain sign, which `x <= 0.0` would let through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod canonical;
mod error;
pub mod halfplane;
pub mod herglotz;
pub mod jacobi;
pub mod reflection;
pub mod semicont;
pub mod weyl;

pub use error::{Error, Result};
