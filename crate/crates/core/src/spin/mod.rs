//! Reduction of the configuration-space wave equation to spinor equations.

pub mod dirac;
pub mod fields;
pub mod reduction;

pub use dirac::{a_from_mass, dirac_plane_wave, squared_dirac_residual, DiracPlaneWave};
pub use fields::{em_lift_t, FieldConfig, LiftedPotential};
pub use reduction::{
    coefficient_residual, delta_j, mode_expand, reduction_calibration, CalibrationReport, DiracField,
    ReductionCoefficients, SpinorCoefficients, SpinorField,
};
