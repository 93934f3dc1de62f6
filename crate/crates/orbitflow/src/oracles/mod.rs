//! Closed-form optima, lower bounds and feasibility certificates used as
//! ground truth for the flow engine and as standalone analysis tools.

mod closed_form;
mod feasibility;

pub use closed_form::{
    complex_eigenvalues, equivalence_nearest, herm_skew_min_max, hermitian_nearest,
    similarity_to_scalar_inf, similarity_trace_bound, tilde_embed, HermSkewOptimum,
    HermSkewSpectra,
};
pub use feasibility::{
    diagonal_decomposition_search, kyfan_necessary, polygon_check, FeasibilityError,
    FeasibilityReport, FeasibilityWitness,
};
