//! Corner-singularity calculus: the exponent of the leading corner
//! behavior, its angular profile, coefficient extraction by windowed
//! least squares, decaying complex-exponential probe fields, the closed
//! form of the probe integral along the corner rays, and numerical
//! verification of the contour integral identity.

mod cgo;
mod exponent;
mod extract;
mod identity;
mod profile;

pub use cgo::CgoParams;
pub use exponent::{exponent_equation_residual, singularity_exponent};
pub use extract::{extract_from_solution, extract_singularity_coefficient, CoefficientFit};
pub use identity::{
    corner_integral_closed_form, ray_integral_closed_form, ray_integral_quadrature,
    verify_integral_identity, IdentityOptions, IdentityReport,
};
pub use profile::SingularityData;
