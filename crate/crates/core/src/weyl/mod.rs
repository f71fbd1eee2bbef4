//! Weyl quantization: an FFT kernel backend on Cartesian grids and an exact
//! symmetrized-product backend for symbols quadratic in the momenta.

pub mod cartesian;
mod checks;
mod diffop;
mod kernel;
pub mod polar_symbolic;

pub use checks::{
    adjoint_defect_diffop, adjoint_defect_kernel, backend_agreement_1d, backend_agreement_2d, covariance_defect_cartesian,
    covariance_defect_polar, covariance_refinement, default_planar_grid, hermite_ground_state,
    is_monotone_within_factor_two, metaplectic_dilation, planar_test_function, q2_commutation_defect,
    q2_commutation_defect_at, COMMUTATION_TIMES, PLANAR_MODES,
};
pub use cartesian::{cartesian_battery, CartesianGrid, CartesianGridFunction, DenseOperator};
pub use diffop::{
    quantize_diffop, quantize_diffop_cartesian, weyl_order, CartesianOrdering, PolarDiffOperator, PolarOrdering,
    WeylOrdering, MAX_P_DEGREE,
};
pub use kernel::{quantize_kernel, quantize_kernel_symbol, DEFAULT_ENTRY_CAP};
pub use polar_symbolic::{ExpTrig, PolarDiffSymbol};
