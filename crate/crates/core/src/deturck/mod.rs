//! DeTurck gauge: the vector fields `Y_t`, the diffeomorphisms `Θ_t` they
//! generate (as periodic displacement fields), pullbacks, and checks of the
//! coupled evolution equations for `(ω_t, Ω_t) = (Θ_t*ω̃_t, Θ_t*Ω)`.

mod coupled;
mod pullback;
mod track;

pub use coupled::{
    limit_torsion, verify_coupled, verify_coupled_initial, verify_g2_equivalence, CoupledReport,
    G2EquivalenceReport,
};
pub use pullback::{jacobian, omega_norm_of_forms, pull_back, PulledBack};
pub use track::{
    advect, cauchy_check, coupled_step, coupled_step_with, gauge_field, integrate_theta, mode_for, vector_field_y, CauchyReport,
    CoupledState, DiffeoTrack, TrackSample,
};

use crate::flows::FlowError;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum DeturckError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error("Jacobian of the gauge diffeomorphism degenerates at t = {t} (min det {min_det:e})")]
    Jacobian { t: f64, min_det: f64 },
    #[error("{0}")]
    Unsupported(String),
}

#[cfg(test)]
mod tests;
