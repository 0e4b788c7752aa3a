//! High-precision evaluation at CM points and cusps, twisted traces of
//! singular moduli, the numeric twisted Borcherds product, and the divisor
//! sum identities.

pub mod bigfloat;
pub mod borcherds;
pub mod eval;
pub mod rohrlich;
pub mod trace;

pub use bigfloat::{BigComplex, BigFloat};
pub use borcherds::{twisted_borcherds_numeric, TwistedBorcherds};
pub use eval::{eval_at, eval_qseries};
pub use rohrlich::{hauptmodul_at_cusp, heegner_divisor, verify_divisor_sum, verify_divisor_sum_hecke, DivisorSumCheck, DivisorTerm};
pub use trace::{
    recognize_imag_quadratic, twisted_trace, twisted_trace_report, verify_trace_identities, CmPoint, Status, TraceOptions, TraceReport,
    Verdict,
};
