//! Exact integer/rational linear algebra and polynomials. No rounding
//! happens anywhere in this module.

mod hnf;
mod int_matrix;
mod poly;
mod rat_matrix;

pub use hnf::{
    hnf_basis, hnf_decompose, integer_kernel, integer_kernel_of_rows, kernel_residual_is_zero,
    HnfDecomposition, LatticeBasis,
};
pub use int_matrix::IntMatrix;
pub use poly::{sign_at, IntPoly};
pub use rat_matrix::RatMatrix;

