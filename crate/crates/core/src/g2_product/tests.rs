use super::*;
use crate::forms7::{metric_from_phi, PhiConvention, PointForm};
use crate::torus_cy::{PotentialField, Spectral, TorusGrid};

fn fields(n: usize, size: usize, k: &[i64], eps: f64, mode: AnsatzMode) -> (Spectral<f64>, AnsatzFields<f64>) {
    let grid = TorusGrid::new(n, size);
    let sp = Spectral::new(grid);
    let w = PotentialField::<f64>::single_mode(grid, k, eps);
    let a = AnsatzFields::from_potential(&sp, &w.values, mode).unwrap();
    (sp, a)
}

#[test]
fn frozen_tables_match_generated() {
    for mode in [AnsatzMode::Flow, AnsatzMode::Coflow] {
        for n in [2, 3] {
            assert!(StarTable::frozen(mode, n).max_difference(&StarTable::generate(mode, n)) < 1e-15);
        }
    }
}

#[test]
fn corrupted_table_differs() {
    let t = StarTable::frozen(AnsatzMode::Flow, 2);
    assert!(t.max_difference(&t.corrupted(3)).is_infinite());
}

#[test]
fn flat_ansatz_n2_flow_is_flat_product() {
    let (_, a) = fields(2, 4, &[0, 0, 0, 0], 0.0, AnsatzMode::Flow);
    let phi = a.phi().point(3);
    assert!((phi - crate::forms7::phi_flat_product()).max_abs() < 1e-15);
}

#[test]
fn flat_n3_flow_psi() {
    let (_, a) = fields(3, 4, &[0; 6], 0.0, AnsatzMode::Flow);
    let phi = a.phi().point(0);
    let m = metric_from_phi(&phi, PhiConvention::Flow).unwrap();
    assert!(m.g.sub(&crate::linalg::SmallMat::identity(7)).max_abs() < 1e-12);
    assert!((m.vol - 1.0).abs() < 1e-12);
    let psi = a.psi().point(0);
    assert!((m.star(&phi) - psi).max_abs() < 1e-12);
}

#[test]
fn flat_n2_coflow_psi() {
    let (_, a) = fields(2, 4, &[0; 4], 0.0, AnsatzMode::Coflow);
    let phi = a.phi().point(0);
    let m = metric_from_phi(&phi, PhiConvention::Flow).unwrap();
    assert!((m.star(&phi) - a.psi().point(0)).max_abs() < 1e-12);
}

#[test]
fn block_metric_and_psi_perturbed() {
    for (n, size, k) in [(2, 8, vec![1, 0, 1, 1]), (3, 4, vec![1, 0, 0, 1, 1, 0])] {
        for mode in [AnsatzMode::Flow, AnsatzMode::Coflow] {
            let (_, a) = fields(n, size, &k, 0.3, mode);
            assert!(pointwise_metric_residual(&a) < 1e-9, "{mode} n={n}");
            let star = a.star();
            let psi = star.apply(&a.phi());
            assert!(psi.max_abs_diff(&a.psi()) < 1e-12, "{mode} n={n} table");
            assert!(pointwise_star_residual(&a, &star, &a.phi()) < 1e-9, "{mode} n={n} pointwise");
        }
    }
}

#[test]
fn closed_and_coclosed() {
    let (sp, a) = fields(2, 8, &[1, 1, 0, 1], 0.2, AnsatzMode::Flow);
    assert!(a.phi().d(&sp).max_abs() < 1e-12);
    let (sp, a) = fields(3, 4, &[1, 0, 0, 1, 1, 0], 0.2, AnsatzMode::Coflow);
    assert!(a.psi().d(&sp).max_abs() < 1e-12);
}

#[test]
fn dr_sign_single_mode() {
    let grid = TorusGrid::new(2, 8);
    let sp = Spectral::<f64>::new(grid);
    let f: Vec<f64> = (0..grid.len()).map(|i| (2.0 * std::f64::consts::PI * grid.point(i)[1]).sin()).collect();
    let mut g = FormField::zero(grid, 0, 0);
    g.set_component(0, f);
    let a = FormField::dr_wedge(3, 0b001, &g);
    let da = a.d(&sp);
    // d(f dr1) = ∂_{y1} f dy1 ∧ dr1 = −∂_{y1} f dr1 ∧ dy1, with y1 on form axis 4.
    let c = da.component(0b10001).unwrap();
    for i in 0..grid.len() {
        let y = grid.point(i)[1];
        let expect = -2.0 * std::f64::consts::PI * (2.0 * std::f64::consts::PI * y).cos();
        assert!((c[i] - expect).abs() < 1e-12);
    }
}

#[test]
fn lie_of_omega_is_ddbar() {
    let grid = TorusGrid::new(2, 8);
    let sp = Spectral::<f64>::new(grid);
    let h = crate::torus_cy::HermitianField::flat(grid);
    let s = PotentialField::<f64>::single_mode(grid, &[1, 1, 0, 1], 1.0).values;
    let data = KahlerData::from_metric(&h);
    let y = gradient(&sp, &h, &s);
    let lhs = data.omega.lie(&sp, &y);
    let rhs = KahlerData::from_metric(&crate::torus_cy::HermitianField::from_hessian(
        grid,
        &crate::torus_cy::kahler::real_hessian(&sp, &sp.forward(&s)),
        2.0,
    ))
    .omega
        - data.omega.clone();
    // L_{∇s} ω with ∇ the Riemannian gradient equals 2i∂∂̄s.
    let rhs = rhs.scale(2.0);
    assert!(lhs.max_abs_diff(&rhs) < 1e-10, "{}", lhs.max_abs_diff(&rhs));
}

#[test]
fn star_star_is_identity() {
    let (_, a) = fields(2, 4, &[1, 0, 1, 1], 0.3, AnsatzMode::Flow);
    let star = a.star();
    for k in 0..=7 {
        let f = FormField::from_points(a.h.grid, 3, k, |i| {
            let mut p = PointForm::zero(7, k);
            for (j, c) in p.coeffs_mut().iter_mut().enumerate().take(crate::forms7::basis::count(7, k)) {
                *c = ((i * 31 + j * 17) % 13) as f64 / 13.0 - 0.5;
            }
            p
        });
        assert!(star.apply(&star.apply(&f)).max_abs_diff(&f) < 1e-12, "k={k}");
    }
}

#[test]
fn flat_potential_lemmas_vanish() {
    let grid = TorusGrid::new(2, 4);
    let sp = Spectral::<f64>::new(grid);
    let w = vec![0.0; grid.len()];
    for r in verify_lemmas(&sp, &w, &LemmaId::ALL).unwrap() {
        assert!(r.residual < 1e-14 && r.pass, "{r:?}");
    }
}

#[test]
fn lemma_residuals_shrink_with_resolution() {
    let mut prev = f64::INFINITY;
    for size in [4, 8] {
        let grid = TorusGrid::new(2, size);
        let sp = Spectral::<f64>::new(grid);
        let w = PotentialField::<f64>::single_mode(grid, &[1, 0, 0, 1], 0.05).values;
        let r = verify_lemma(&sp, &w, LemmaId::FlowLaplacianN2).unwrap();
        assert!(r.residual < prev / 10.0, "{r:?}");
        prev = r.residual;
    }
}

#[test]
fn lemma_ids_parse() {
    for id in LemmaId::ALL {
        assert_eq!(LemmaId::parse(id.name()), Some(id));
        assert_eq!(LemmaId::parse(id.alias()), Some(id));
    }
    assert_eq!(LemmaId::parse("4.4"), Some(LemmaId::CoflowTorsionN3));
    assert_eq!(LemmaId::parse("5.1"), None);
}
