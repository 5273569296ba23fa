//! Supersonic-sonic patch construction for pseudo-steady Euler flow of a
//! polytropic van der Waals gas.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angle;
pub mod boundary;
pub mod config;
pub mod error;
pub mod gas;
pub mod hodograph;
pub mod interp;
pub mod inversion;
pub mod output;
pub mod pipeline;
pub mod verify;

pub use error::Error;
