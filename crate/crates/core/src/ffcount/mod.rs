//! Finite fields `F_{p^s}` and projective point counts of surfaces in `P^3`.

mod count;
mod field;

pub use count::{
    counts_series, counts_series_with, fermat_surface_count, fermat_surface_count_with,
    hypersurface_counts_series, naive_hypersurface_count, naive_hypersurface_count_with,
    power_histogram, Budget, CountMethod, HomogeneousForm, Term, ValueHistogram,
};
pub use field::{build_field, FiniteField};
