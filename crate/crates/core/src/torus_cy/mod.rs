//! Flat tori `T^{2n}` with the standard complex structure: grids, spectral
//! calculus, Hermitian metrics from potentials, off-grid evaluation and
//! field snapshots.

mod field;
mod grid;
pub mod interp;
pub mod kahler;
pub mod snapshot;
mod spectral;

pub use field::{max_abs_diff, mean, oscillation, FourierMode, PotentialField, ScalarField};
pub use grid::TorusGrid;
pub use interp::{Pruning, TrigInterpolant};
pub use kahler::{metric_from_potential, ricci, HermitianField, KahlerError};
pub use spectral::{Spectral, C};

#[cfg(test)]
mod tests;
