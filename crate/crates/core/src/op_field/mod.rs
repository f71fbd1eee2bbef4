//! Fields of operators over the fibers `lambda_i`: extraction from global
//! operators, the connection `nabla^_X(A) = [nabla_X, A]` and the checks
//! built on it.

mod checks;
mod extract;
mod field;

pub use checks::{
    adjoint_compatibility_defect, angular_momentum_fiber, band_limited_vector, derivative_formula_check,
    horizontality_report, horizontality_report_operator, leibniz_product_defect, local_sup_norm,
    norm_continuity_modulus, parallel_transport_conjugate, pointwise_weak_derivative_check, rank_one_derivative_defect,
    rank_one_field, rank_one_norm_defect, transport_closed_form, transport_estimate_check, transport_estimate_draws,
    DerivativeFormulaReport, HorizontalityReport, PointwiseReport, TransportDraws, TransportEstimate, EXACT_TOL,
};
pub use extract::{
    decomposability_defect, extract_fibers, nabla_hat_commutator, nabla_hat_trivialized, DECOMPOSABILITY_CENTERS,
    DECOMPOSABILITY_WIDTH, LEAKAGE_THRESHOLD,
};
pub use field::{BandedOperator, Commutator, FnOperator, GlobalOperator, MultiplicationOperator, OperatorField};
