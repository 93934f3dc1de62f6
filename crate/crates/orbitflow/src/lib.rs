//! orbitflow minimizes the Frobenius distance between a target matrix and a
//! sum of matrices drawn from unitary similarity, unitary equivalence, or
//! unitary t-congruence orbits, using coupled gradient flows on the unitary
//! group with multi-restart search. A companion oracle suite supplies
//! closed-form optima, lower bounds and feasibility certificates that
//! cross-check the flow engine.

pub mod flows;
pub mod matcore;

pub use matcore::{CMatrix, MatError, C64};
