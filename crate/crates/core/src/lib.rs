//! Exact verification of rank-2 commuting pairs of ordinary differential
//! operators of the form `L = (d^2 + V)^2 + W`, in particular `L4 = d^4 + u`.
//!
//! The crate certifies (to a stated truncation order, with exact rational
//! arithmetic throughout) whether such an operator commutes with an operator
//! of order `4g+2` as a rank-2 pair, by
//!
//! * running the coefficient hierarchy `f_1, ..., f_{g+1}` and deciding
//!   closure `f_{g+1} = const` ([`hierarchy`]),
//! * checking the pole conditions on the potential (pole order 4, quantized
//!   leading coefficient `n(4n+1)(4n+3)(4n+4)`, vanishing off-lattice
//!   coefficients) ([`hierarchy::check_theorem_1_1`]),
//! * assembling the hyperelliptic spectral curve `w^2 = F(z)` and testing
//!   nonsingularity via the discriminant ([`spectral`]),
//! * analysing the regular singular points of the eigenfunction equation
//!   (indicial exponents, resonances, log-freeness) ([`frobenius`]),
//! * verifying explicit commuting pairs by direct commutator computation in
//!   the ring of differential operators ([`operators`]).
//!
//! Everything is built on [`exactalg`]: big-rational scalars with an optional
//! quadratic extension field, affine forms in the undetermined constants
//! `C_1..C_g`, and truncated Laurent series with exact order bookkeeping.

pub mod error;
pub mod exactalg;
pub mod frobenius;
pub mod hierarchy;
pub mod operators;
pub mod potentials;
pub mod spectral;

pub use error::{Error, Obstruction, ViolationTag};
pub use exactalg::affine::AffineForm;
pub use exactalg::scalar::{Field, Scalar};
pub use exactalg::series::{Center, LaurentSeries};
pub use exactalg::solve::{solve_linear, Verdict};
pub use potentials::{PoleData, Potential, PotentialKind};

