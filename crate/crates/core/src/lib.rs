//! Numerical core for Basmajian-type series identities on holomorphic
//! families of Cantor sets.
//!
//! The crate is `no_std` with `alloc`. It covers Moebius algebra, word
//! languages and subshift codings, a level-by-level series engine, the
//! complexified Schottky identity with monodromy tracking, quadratic and
//! similarity iterated function systems, and thermodynamic dimension
//! estimators.

#![cfg_attr(not(test), no_std)]
// Negated comparisons are used on purpose so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod error;
pub mod holo_ifs;
pub mod moebius;
pub mod numeric;
pub mod schottky;
pub mod series;
pub mod symbolic;
pub mod thermo;

pub use error::{Error, Result};
pub use num_complex::Complex64 as Complex;
