//! Exact integer and rational algebra: matrices, Smith normal form,
//! polynomials, real-root counting, valuations and factorization.

mod factor;
mod matrix;
mod poly;
mod realroots;
mod snf;
mod valuation;

pub use factor::{
    factor, factor_with_bound, is_prime, is_prime_u64, DEFAULT_RHO_BOUND, TRIAL_DIVISION_LIMIT,
};
pub use matrix::IntMatrix;
pub use poly::{reversed_char_poly, IntPolynomial};
pub use realroots::{roots_on_circle, squarefree_part, sturm_count_open, RatPoly};
pub use snf::{smith_normal_form, SmithDecomposition};
pub use valuation::{lp_valuation, split_prime_power, strip_prime, valuation_int};
