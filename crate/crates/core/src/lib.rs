//! Numerical laboratory for the almost Mathieu operator
//! (Hu)_n = u_{n+1} + u_{n-1} + 2λ cos 2π(nα + θ) u_n.

// `!(x > 0.0)` rejects NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod cf_engine;
pub mod cocycle;
pub mod freq_synth;
pub mod real;
pub mod spectrum;
pub mod tridiag;
