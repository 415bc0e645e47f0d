use serde::{Deserialize, Serialize};

use crate::scalar::Real;

/// Speed function `H` of the potential flow `du/dt = H(ρ)`, where
/// `ρ = e^{−2 log|Ω|_ω} det(ω + i∂∂̄u)/det ω`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FlowKind {
    /// `H(ρ) = 3ρ^{1/3}`.
    Ma13,
    /// `H(ρ) = log ρ`.
    Kr,
    /// `H(ρ) = ρ^p / p` with `p > 0`.
    Power { p: f64 },
}

impl FlowKind {
    pub fn speed<T: Real>(self, rho: T) -> T {
        match self {
            FlowKind::Ma13 => T::lit(3.0) * rho.cbrt(),
            FlowKind::Kr => rho.ln(),
            FlowKind::Power { p } => rho.powf(T::lit(p)) / T::lit(p),
        }
    }

    /// `H'(ρ) ρ`, the coefficient of the linearized operator.
    pub fn stiffness<T: Real>(self, rho: T) -> T {
        match self {
            FlowKind::Ma13 => rho.cbrt(),
            FlowKind::Kr => T::one(),
            FlowKind::Power { p } => rho.powf(T::lit(p)),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FlowKind::Ma13 => "ma13",
            FlowKind::Kr => "kr",
            FlowKind::Power { .. } => "h",
        }
    }

    pub fn validate(self) -> Result<(), String> {
        match self {
            FlowKind::Power { p } if !(p > 0.0 && p.is_finite()) => Err(format!("power flow needs p > 0, got {p}")),
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for FlowKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            FlowKind::Power { p } => write!(f, "h(p={p})"),
            k => f.write_str(k.name()),
        }
    }
}
