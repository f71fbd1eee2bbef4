//! Polynomial symbols on `R^n x R^n` and the classical structures on them.

mod bracket;
mod connection;
mod poly;
mod symplectic;
mod vector_field;

pub use bracket::{
    angular_momentum, bracket_identity_defects, constant_of_motion_battery, flow_generator_defect, is_constant_of_motion,
    moment_map_pushforward, poisson_bracket, random_symbol, BracketIdentityDefects,
};
pub use connection::{poisson_connection_apply, poisson_connection_identity_check, ConnectionIdentityReport};
pub use poly::{Polynomial, PolySymbol, ZERO_THRESHOLD};
pub use symplectic::{flow_pullback, LinearSymplecticMap};
pub use vector_field::{hamiltonian_lift_symbol, radial_lift, RadialLift, RadialVectorField};
