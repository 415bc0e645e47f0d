//! Monge–Ampère type flows of Kähler potentials on flat tori `T^{2n}`
//! (`n = 2, 3`) and the Laplacian flow and coflow of `G₂`-structures on
//! `T³ × T⁴` and `S¹ × T⁶` that they generate through a DeTurck gauge.
//!
//! The numerical core is generic over [`Real`]; the aliases below fix the
//! scalar type.

pub mod cli;
pub mod deturck;
pub mod flows;
pub mod forms7;
pub mod g2_product;
pub mod linalg;
pub mod scalar;
pub mod torus_cy;

pub use scalar::Real;

pub type PointForm = forms7::PointForm<f64>;
pub type SmallMat = linalg::SmallMat<f64>;
pub type Spectral = torus_cy::Spectral<f64>;
pub type HermitianField = torus_cy::HermitianField<f64>;
pub type FormField = g2_product::FormField<f64>;
pub type PotentialFlow = flows::PotentialFlow<f64>;
pub type Flow = flows::Flow<f64>;
pub type DiffeoTrack = deturck::DiffeoTrack<f64>;

pub type PointForm32 = forms7::PointForm<f32>;
pub type SmallMat32 = linalg::SmallMat<f32>;
pub type Spectral32 = torus_cy::Spectral<f32>;
pub type FormField32 = g2_product::FormField<f32>;
pub type PotentialFlow32 = flows::PotentialFlow<f32>;
