//! Truncated Laurent q-expansions and the standard modular objects built from them.

pub mod classical;
pub mod eta;
pub mod series;
pub mod spec;

pub use classical::{delta, eisenstein, faber, hauptmodul, j_invariant, Faber, SUPPORTED_LEVELS};
pub use eta::{cusps, Cusp, EtaQuotientSpec};
pub use series::QSeries;
pub use spec::{ClassicalName, FormSpec};
