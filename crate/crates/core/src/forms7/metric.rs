use super::point::PointForm;
use super::Forms7Error;
use crate::linalg::SmallMat;
use crate::scalar::{odd_root, Real};

/// Sign convention for the symmetric bilinear form attached to a 3-form,
/// `B_ij = s · (e_i⨼φ) ∧ (e_j⨼φ) ∧ φ / 6` read against `e^1 ∧ … ∧ e^7`.
///
/// Both conventions give the same metric; they induce opposite
/// orientations. `Flow` (`s = −1`) is the one under which the product
/// ansatz 3-forms of this crate are positively oriented.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PhiConvention {
    #[default]
    Flow,
    Bryant,
}

impl PhiConvention {
    fn sign<T: Real>(self) -> T {
        match self {
            PhiConvention::Flow => -T::one(),
            PhiConvention::Bryant => T::one(),
        }
    }
}

/// Metric and orientation induced by a definite 3-form.
#[derive(Clone, Copy, Debug)]
pub struct G2Metric<T> {
    pub g: SmallMat<T>,
    pub ginv: SmallMat<T>,
    /// Signed coefficient of the induced volume form on `e^1 ∧ … ∧ e^7`.
    pub vol: T,
}

impl<T: Real> G2Metric<T> {
    /// `+1` when the induced orientation agrees with `e^1 ∧ … ∧ e^7`.
    pub fn orientation(&self) -> T {
        crate::scalar::signum(self.vol)
    }

    pub fn star(&self, a: &PointForm<T>) -> PointForm<T> {
        a.hodge_star_with(&self.g, &self.ginv, self.vol)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.g.sym_eigenvalues()[0]
    }
}

/// The bilinear form `B(φ)`.
pub fn bilinear_b<T: Real>(phi: &PointForm<T>, conv: PhiConvention) -> SmallMat<T> {
    assert!(phi.dim() == 7 && phi.degree() == 3, "expected a 3-form in dimension 7");
    let hooks: Vec<PointForm<T>> = (0..7).map(|i| phi.interior_basis(i)).collect();
    let c = conv.sign::<T>() / T::lit(6.0);
    let mut b = SmallMat::zeros(7);
    for i in 0..7 {
        let p = hooks[i].wedge(phi);
        for j in i..7 {
            let v = hooks[j].wedge(&p).top_coefficient() * c;
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    b
}

/// Metric `g = B / det(B)^{1/9}` and volume `det(B)^{1/9} e^{1…7}`.
pub fn metric_from_phi<T: Real>(phi: &PointForm<T>, conv: PhiConvention) -> Result<G2Metric<T>, Forms7Error> {
    let b = bilinear_b(phi, conv);
    let det = b.det();
    let scale = phi.max_abs();
    if !(crate::scalar::abs(det) > T::lit(1e-13) * scale.powi(21)) || !det.is_finite() {
        return Err(Forms7Error::Degenerate { det: det.to_f64() });
    }
    let root = odd_root(det, 9);
    let g = b.scale(T::one() / root);
    if g.cholesky().is_none() {
        return Err(Forms7Error::NotPositive { min_eigenvalue: g.sym_eigenvalues()[0].to_f64() });
    }
    let ginv = g.inverse().ok_or(Forms7Error::Degenerate { det: det.to_f64() })?;
    Ok(G2Metric { g, ginv, vol: root })
}

/// True when `φ` is definite and its induced volume is positive on
/// `e^1 ∧ … ∧ e^7`.
pub fn is_positive<T: Real>(phi: &PointForm<T>, conv: PhiConvention) -> bool {
    matches!(metric_from_phi(phi, conv), Ok(m) if m.vol > T::zero())
}

/// The dual 4-form `ψ = ⋆φ`.
pub fn psi_of<T: Real>(phi: &PointForm<T>, conv: PhiConvention) -> Result<PointForm<T>, Forms7Error> {
    let m = metric_from_phi(phi, conv)?;
    Ok(m.star(phi))
}
