use super::metric::{metric_from_phi, G2Metric, PhiConvention};
use super::point::PointForm;
use super::Forms7Error;
use crate::scalar::Real;

/// Irreducible torsion pieces of a G2-structure at a point, defined by
/// `dφ = τ₀ψ + 3τ₁∧φ + ⋆τ₃` and `dψ = 4τ₁∧ψ + τ₂∧φ`.
#[derive(Clone, Copy, Debug)]
pub struct TorsionForms<T> {
    pub tau0: T,
    pub tau1: PointForm<T>,
    pub tau2: PointForm<T>,
    pub tau3: PointForm<T>,
    /// Largest of `|τ₃∧φ|`, `|τ₃∧ψ|`, `|τ₂∧ψ|`.
    pub consistency: T,
}

impl<T: Real> TorsionForms<T> {
    pub fn max_abs(&self) -> T {
        crate::scalar::abs(self.tau0)
            .max(self.tau1.max_abs())
            .max(self.tau2.max_abs())
            .max(self.tau3.max_abs())
    }
}

/// Splits `(dφ, dψ)` into torsion forms using the metric of `φ`.
pub fn torsion_decompose<T: Real>(
    phi: &PointForm<T>,
    dphi: &PointForm<T>,
    dpsi: &PointForm<T>,
    conv: PhiConvention,
) -> Result<TorsionForms<T>, Forms7Error> {
    let m = metric_from_phi(phi, conv)?;
    Ok(torsion_with_metric(&m, phi, dphi, dpsi, conv))
}

pub fn torsion_with_metric<T: Real>(
    m: &G2Metric<T>,
    phi: &PointForm<T>,
    dphi: &PointForm<T>,
    dpsi: &PointForm<T>,
    conv: PhiConvention,
) -> TorsionForms<T> {
    assert_eq!(dphi.degree(), 4);
    assert_eq!(dpsi.degree(), 5);
    let psi = m.star(phi);
    let tau0 = m.star(&phi.wedge(dphi)).coeffs()[0] / T::lit(7.0);
    let tau1 = m.star(&phi.wedge(&m.star(dphi))).scale(T::one() / T::lit(12.0));
    let chi = *dpsi - tau1.wedge(&psi).scale(T::lit(4.0));
    // ⋆(β∧φ) = ∓β on the 14-dimensional summand, depending on orientation.
    let tau2 = match conv {
        PhiConvention::Flow => m.star(&chi),
        PhiConvention::Bryant => -m.star(&chi),
    };
    let rest = *dphi - psi.scale(tau0) - tau1.wedge(phi).scale(T::lit(3.0));
    let tau3 = m.star(&rest);
    let consistency = tau3
        .wedge(phi)
        .max_abs()
        .max(tau3.wedge(&psi).max_abs())
        .max(tau2.wedge(&psi).max_abs());
    TorsionForms { tau0, tau1, tau2, tau3, consistency }
}
