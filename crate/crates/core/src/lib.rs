//! Phase-space (Wehrl) entropy production of two qubits under local
//! dephasing and amplitude damping.
//!
//! States and coherence measures live in [`qstate`], the open-system
//! dynamics in [`channels`], Husimi functions and Monte Carlo integration in
//! [`phasespace`], and the entropy functionals in [`entropy`]. The
//! [`experiment`] module runs the canned experiments behind the CLI.

// `!(x > 0.0)` is used on purpose: it rejects NaN too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod entropy;
mod error;
pub mod experiment;
pub mod phasespace;
pub mod qstate;

pub use error::{Error, Result};
