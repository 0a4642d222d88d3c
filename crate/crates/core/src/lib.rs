//! Effective upper bounds for the sup-norm quantity `S_{2k}(z) = Σ |f_j(z)|² y^{2k}`
//! of cusp forms on Fuchsian groups of the first kind, together with an
//! independent numerical verifier for the modular group.
//!
//! The pipeline: [`domain`] describes a fundamental domain, [`bounds`] turns it
//! into effective constants and per-weight bounds, [`kernels`] holds the
//! special functions and kernel estimates those bounds rest on, and
//! [`verifier`] checks everything against explicit cusp forms.

// `!(x > 0.0)` is used deliberately so that NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod domain;
pub mod error;
pub mod hyperbolic;
pub mod kernels;
pub mod numfmt;
pub mod quadrature;
pub mod verifier;

pub use error::{Error, Result};
