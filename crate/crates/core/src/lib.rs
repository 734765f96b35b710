//! Exact-arithmetic and numerical toolkit for integer toral automorphisms.
//!
//! The library is organized around a pipeline:
//!
//! - [`exact`]: arbitrary-precision integer/rational matrices, polynomials,
//!   Hermite normal form and integer kernels. Everything here is exact.
//! - [`polyalg`]: univariate integer-polynomial analysis (Sturm root
//!   isolation, irreducibility, self-reciprocal structure, cyclotomic tests).
//! - [`spectrum`]: certified spectral classification of an automorphism
//!   `L ∈ GL(d,Z)`: eigenvalue counts, Lyapunov exponents as certified
//!   intervals, and the hypothesis predicates (ergodicity, property (P),
//!   spread spectrum, no three eigenvalues of the same modulus).
//! - [`centralizer`]: the integer commutant of `L`, unit discovery, the
//!   logarithmic embedding and subgroup-level procedures (cone searches,
//!   hyperbolicity, rank bounds, bounded subgroups).
//! - [`constructor`]: building automorphisms with one isometric center pair
//!   and spread spectrum from totally real seed polynomials, plus the
//!   invariant symplectic form.
//! - [`dynamics`]: the numerical layer for perturbed automorphisms: lifts,
//!   twisted cohomological equations, Lyapunov spectra, fixed points and
//!   semiconjugacies.

pub mod centralizer;
pub mod constructor;
pub mod dynamics;
pub mod error;
pub mod exact;
pub mod interval;
pub mod polyalg;
pub mod report;
pub mod spectrum;

pub use error::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
