//! Hermitian distance critical points of unitary-invariant matrix varieties.
//!
//! A data matrix `Y` in `C^{n x t}` is measured against a variety `M` that is
//! invariant under the action `(U, V) . A = U A V*` of `U(n) x U(t)`. Every
//! such variety is the preimage `sigma^{-1}(S)` of a set `S` in `R^n` under
//! the singular value map, and the Hermitian distance problem for `(Y, M)`
//! collapses onto the real Euclidean distance problem for `(sigma(Y), S)`:
//! critical points of the distance from `Y` to `M` are exactly the matrices
//! `U diag(x) V*` where `Y = U diag(y) V*` is a singular value decomposition
//! and `x` is a critical point of the distance from `y` to `S`.
//!
//! The crate is organised around that reduction:
//!
//! * [`cxmat`] — complex matrices, the trace inner product and its real part,
//!   a deterministic Jacobi SVD, Haar-random unitaries, skew-Hermitian bases;
//! * [`rpoly`] — real univariate polynomials (Sturm chains, root isolation,
//!   quartic discriminants) and bivariate resultants;
//! * [`slices`] — slice families `S` in `R^n` and their real ED critical
//!   points;
//! * [`chambers`] — closed-form critical point counts per parameter chamber
//!   and grid scans comparing predictions against observed counts;
//! * [`lift`] — lifting slice critical points to matrix space, low-rank
//!   (Eckart-Young) critical sets, and distance polynomials;
//! * [`verify`] — independent certification: tangent frames, criticality
//!   residuals, splitting checks, linear-algebra lemma suites, and a
//!   brute-force Lagrange multiplier solver that never uses the SVD lift.

pub mod chambers;
pub mod config;
pub mod cxmat;
pub mod lift;
pub mod rpoly;
pub mod slices;
pub mod verify;

pub(crate) mod rmat;

pub use config::Tolerances;
pub use cxmat::{hermitian_inner, q_inner, CMat, RealDiag, SvdFactors, C64};
