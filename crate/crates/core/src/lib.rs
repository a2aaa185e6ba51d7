//! Exact p-adic constructions around logarithmic matrices and signed
//! Coleman maps.
//!
//! The crate is layered bottom-up:
//!
//! * [`padic`]: p-adic floating-point scalars with precision tracking.
//! * [`matrix`]: dense matrices over any of the rings below, Smith form.
//! * [`series`]: polynomials, truncated power series, `Λ_n = Z_p[X]/ω_n`.
//! * [`log_matrix`]: Frobenius data, the hypothesis gate, `C_n` and `M_n`.
//! * [`coleman`]: the factorization `L = (C_n ⋯ C_1) col` and its inverse.
//! * [`basis`]: admissible and strongly admissible bases.
//! * [`pollack`]: the `a_p = 0` specialization with ±-logarithms.
//! * [`wach`]: `Z_p[[π]]` with `φ` and `Γ`, and the matrices `P_n`, `M'_n`, `G_γ`.
//! * [`cli`]: instance files, reports and the command implementations.
//!
//! Every identity check returns a [`report::Verdict`] rather than a bare
//! boolean, so a precision shortfall is never mistaken for a pass.

pub mod basis;
pub mod cli;
pub mod coleman;
pub mod log_matrix;
pub mod matrix;
pub mod padic;
pub mod pollack;
pub mod report;
pub mod series;
pub mod wach;

pub use matrix::{Matrix, Ring, ScalarMatrix};
pub use padic::{Comparison, PadicContext, PadicError, PadicScalar};
pub use report::Verdict;
pub use series::{LambdaNElement, Poly, XSeries};
