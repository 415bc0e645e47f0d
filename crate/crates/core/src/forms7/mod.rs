//! Pointwise exterior algebra in dimension at most 7, the metric induced
//! by a definite 3-form, and its torsion decomposition.

pub mod basis;
mod metric;
mod point;
mod torsion;

pub use metric::{bilinear_b, is_positive, metric_from_phi, psi_of, G2Metric, PhiConvention};
pub use point::PointForm;
pub use torsion::{torsion_decompose, torsion_with_metric, TorsionForms};

use crate::scalar::Real;

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum Forms7Error {
    #[error("3-form is degenerate (det B = {det:e})")]
    Degenerate { det: f64 },
    #[error("3-form is not definite (smallest metric eigenvalue {min_eigenvalue:e})")]
    NotPositive { min_eigenvalue: f64 },
}

/// `e123 + e145 + e167 + e246 − e257 − e347 − e356` on axes `0..7`.
pub fn phi0<T: Real>() -> PointForm<T> {
    let one = T::one();
    PointForm::from_terms(
        7,
        3,
        &[
            (one, &[0, 1, 2]),
            (one, &[0, 3, 4]),
            (one, &[0, 5, 6]),
            (one, &[1, 3, 5]),
            (-one, &[1, 4, 6]),
            (-one, &[2, 3, 6]),
            (-one, &[2, 4, 5]),
        ],
    )
}

/// Flat product 3-form on `(r1, r2, r3, x1, y1, x2, y2)`:
/// `−dr123 + dr1∧ω₀ + dr2∧Re Ω₀ + dr3∧Im Ω₀`.
pub fn phi_flat_product<T: Real>() -> PointForm<T> {
    let one = T::one();
    PointForm::from_terms(
        7,
        3,
        &[
            (-one, &[0, 1, 2]),
            (one, &[0, 3, 4]),
            (one, &[0, 5, 6]),
            (one, &[1, 3, 5]),
            (-one, &[1, 4, 6]),
            (one, &[2, 3, 6]),
            (one, &[2, 4, 5]),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SmallMat;

    fn close(a: &PointForm<f64>, b: &PointForm<f64>, tol: f64) -> bool {
        (*a - *b).max_abs() <= tol
    }

    #[test]
    fn phi0_metric_is_identity_in_both_conventions() {
        let phi = phi0::<f64>();
        let b = metric_from_phi(&phi, PhiConvention::Bryant).unwrap();
        assert!(b.g.sub(&SmallMat::identity(7)).max_abs() < 1e-12);
        assert!((b.vol - 1.0).abs() < 1e-12);
        let f = metric_from_phi(&phi, PhiConvention::Flow).unwrap();
        assert!(f.g.sub(&SmallMat::identity(7)).max_abs() < 1e-12);
        assert!((f.vol + 1.0).abs() < 1e-12);
    }

    #[test]
    fn positivity_follows_orientation() {
        let phi = phi0::<f64>();
        assert!(is_positive(&phi, PhiConvention::Bryant));
        assert!(!is_positive(&(-phi), PhiConvention::Bryant));
        assert!(is_positive(&phi_flat_product::<f64>(), PhiConvention::Flow));
        assert!(!is_positive(&PointForm::<f64>::basis(7, &[0, 1, 2]), PhiConvention::Flow));
    }

    #[test]
    fn flat_product_form_has_identity_metric() {
        let m = metric_from_phi(&phi_flat_product::<f64>(), PhiConvention::Flow).unwrap();
        assert!(m.g.sub(&SmallMat::identity(7)).max_abs() < 1e-13);
        assert!((m.vol - 1.0).abs() < 1e-13);
    }

    #[test]
    fn psi0_matches_known_dual() {
        let phi = phi0::<f64>();
        let psi = psi_of(&phi, PhiConvention::Bryant).unwrap();
        let one = 1.0;
        let expected = PointForm::from_terms(
            7,
            4,
            &[
                (-one, &[0, 1, 3, 6]),
                (-one, &[0, 1, 4, 5]),
                (-one, &[0, 2, 3, 5]),
                (one, &[0, 2, 4, 6]),
                (one, &[1, 2, 3, 4]),
                (one, &[1, 2, 5, 6]),
                (one, &[3, 4, 5, 6]),
            ],
        );
        assert!(close(&psi, &expected, 1e-13));
        assert!((phi.wedge(&psi).top_coefficient() - 7.0).abs() < 1e-12);
    }

    #[test]
    fn euclidean_star_examples() {
        let g = SmallMat::<f64>::identity(7);
        let e1 = PointForm::basis(7, &[0]);
        let s = e1.hodge_star(&g, 1.0);
        assert!(close(&s, &PointForm::basis(7, &[1, 2, 3, 4, 5, 6]), 0.0));
        let one = PointForm::scalar(7, 1.0);
        assert!((one.hodge_star(&g, 1.0).top_coefficient() - 1.0).abs() < 1e-15);
        let e2 = PointForm::basis(7, &[1]);
        let s2 = e2.hodge_star(&g, 1.0);
        assert!((s2.get(&[0, 2, 3, 4, 5, 6]) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn degenerate_form_is_rejected() {
        let phi = PointForm::<f64>::basis(7, &[0, 1, 2]) + PointForm::basis(7, &[3, 4, 5]);
        assert!(matches!(metric_from_phi(&phi, PhiConvention::Flow), Err(Forms7Error::Degenerate { .. })));
    }

    #[test]
    fn torsion_free_for_constant_form() {
        let phi = phi0::<f64>();
        let t = torsion_decompose(
            &phi,
            &PointForm::zero(7, 4),
            &PointForm::zero(7, 5),
            PhiConvention::Bryant,
        )
        .unwrap();
        assert_eq!(t.max_abs(), 0.0);
    }

    #[test]
    fn conformal_torsion_is_pure_tau1() {
        // φ = e^{3f}φ₀ has dφ = 3df∧φ and dψ = 4df∧ψ.
        for conv in [PhiConvention::Bryant, PhiConvention::Flow] {
            let phi = phi0::<f64>();
            let psi = psi_of(&phi, conv).unwrap();
            let df = PointForm::from_coeffs(7, 1, &[0.3, -0.2, 0.5, 0.1, -0.7, 0.25, 0.9]);
            let t = torsion_decompose(&phi, &df.wedge(&phi).scale(3.0), &df.wedge(&psi).scale(4.0), conv).unwrap();
            assert!(close(&t.tau1, &df, 1e-14));
            assert!(t.tau0.abs() < 1e-14);
            assert!(t.tau2.max_abs() < 1e-14 && t.tau3.max_abs() < 1e-14);
        }
    }

    #[test]
    fn nearly_parallel_torsion_is_pure_tau0() {
        let phi = phi0::<f64>();
        let psi = psi_of(&phi, PhiConvention::Flow).unwrap();
        let t = torsion_decompose(&phi, &psi.scale(2.5), &PointForm::zero(7, 5), PhiConvention::Flow).unwrap();
        assert!((t.tau0 - 2.5).abs() < 1e-14);
        assert!(t.tau1.max_abs() < 1e-14 && t.tau2.max_abs() < 1e-14 && t.tau3.max_abs() < 1e-14);
    }
}
