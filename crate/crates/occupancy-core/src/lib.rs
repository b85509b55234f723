//! Experiments around the N-set occupancy problem on the grid: select
//! N of the N² squares of side 1/N and measure the worst number any
//! single line can capture.
//!
//! The crate splits into five parts:
//! * [`grid`] — exact incidence geometry: squares, lines with rational
//!   coefficients, tubes, and the finite critical-line certificate.
//! * [`eval`] — occupancy evaluators: exact, sampled, the
//!   slope-interval reformulation, and the exhaustive minimax oracle.
//! * [`construct`] — every explicit candidate selection, seedable.
//! * [`family`] — abstract set families: greedy and probabilistic
//!   selection, covering designs, adversarial block families.
//! * [`diag`] — energy, AD-regularity, slope-class sums, Dirichlet
//!   witnesses, and growth fitting.

pub mod construct;
pub mod diag;
pub mod error;
pub mod eval;
pub mod family;
pub mod grid;

pub use error::{Error, Result};
