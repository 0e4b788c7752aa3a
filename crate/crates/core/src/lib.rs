//! Multiplicative Hecke operators on twisted infinite products, with the
//! supporting exact arithmetic, q-series, quadratic forms and trace machinery.

pub mod error;
pub mod field;
pub mod hecke;
pub mod prodexp;
pub mod qseries;
pub mod quadforms;
pub mod traces;

pub use error::{Error, Result};
