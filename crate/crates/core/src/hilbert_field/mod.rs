//! The field of Hilbert spaces `lambda -> L^2(S^1_{sqrt(lambda)}, mu_lambda)`
//! sampled on a log-radial by angular grid.

pub mod battery;
mod connection;
mod flow;
mod fourier;
mod grid;
mod resample;

pub use connection::{
    connection_apply, connection_correction, hamiltonian_apply, horizontal_test, hx_symmetry_defect,
    leibniz_defect, seminorm, ConnectionFormula, HorizontalReport, COLLAR_CELLS, COLLAR_TOL,
    MAX_SEMINORM_DEPTH,
};
pub use fourier::{fourier_conjugate, fourier_matrix, laplacian_defect, spectral_laplacian};
pub use resample::{check_coverage, resample_cartesian, resample_polar};
pub use flow::{dilation_group, flow_transport, shift_time, Transported};
pub use grid::{
    direct_integral_inner, direct_integral_norm, fiber_inner, fiber_norm, trivialization_weight,
    trivialize, trivialize_pointwise, untrivialize, PolarGrid, PolarSection, TrivializedSection,
};
