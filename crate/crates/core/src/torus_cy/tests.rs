use std::f64::consts::PI;

use super::kahler::*;
use super::*;
use crate::forms7::PointForm;
use crate::linalg::SmallMat;

fn grid2() -> TorusGrid {
    TorusGrid::new(2, 8)
}

#[test]
fn derivative_of_trig_mode_is_exact() {
    let g = grid2();
    let sp = Spectral::<f64>::new(g);
    let f = ScalarField::<f64>::from_fn(g, |x| (2.0 * PI * (x[0] + 2.0 * x[2])).sin());
    let d = sp.derivative(&f.values, &[2]);
    let exact = ScalarField::<f64>::from_fn(g, |x| 4.0 * PI * (2.0 * PI * (x[0] + 2.0 * x[2])).cos());
    assert!(max_abs_diff(&d, &exact.values) < 1e-12);
    let dd = sp.derivative(&f.values, &[0, 2]);
    let exact2 = ScalarField::<f64>::from_fn(g, |x| -8.0 * PI * PI * (2.0 * PI * (x[0] + 2.0 * x[2])).sin());
    assert!(max_abs_diff(&dd, &exact2.values) < 1e-11);
}

#[test]
fn paired_transforms_match_single_ones() {
    let g = grid2();
    let sp = Spectral::<f64>::new(g);
    let a = ScalarField::<f64>::from_fn(g, |x| (x[0] * 3.1).sin() + x[3] * x[1]);
    let b = ScalarField::<f64>::from_fn(g, |x| (x[2] * 1.7).cos() * x[0]);
    let (sa, sb) = sp.forward_pair(&a.values, &b.values);
    let (ra, rb) = (sp.forward(&a.values), sp.forward(&b.values));
    for i in 0..g.len() {
        assert!((sa[i] - ra[i]).norm() < 1e-12 && (sb[i] - rb[i]).norm() < 1e-12);
    }
    let (ia, ib) = sp.inverse_real_pair(&sa, &sb);
    assert!(max_abs_diff(&ia, &a.values) < 1e-13 && max_abs_diff(&ib, &b.values) < 1e-13);
}

#[test]
fn flat_potential_gives_identity() {
    let g = grid2();
    let sp = Spectral::<f64>::new(g);
    let h = metric_from_potential(&sp, &vec![0.0; g.len()]).unwrap();
    assert_eq!(h.distance_to_flat(), 0.0);
    assert!(h.omega_norm().iter().all(|&v| (v - 1.0).abs() < 1e-15));
}

#[test]
fn single_mode_metric_matches_closed_form() {
    // w = a cos 2π(x1 + x2): ∂_1∂_1̄ w = −π² a cos, so h = I − 2π²a cos [[1,1],[1,1]]
    let g = grid2();
    let sp = Spectral::<f64>::new(g);
    let a = 0.01;
    let w = ScalarField::<f64>::from_fn(g, |x| a * (2.0 * PI * (x[0] + x[2])).cos());
    let h = metric_from_potential(&sp, &w.values).unwrap();
    for i in 0..g.len() {
        let x = g.point(i);
        let c = -2.0 * PI * PI * a * (2.0 * PI * (x[0] + x[2])).cos();
        for (p, q) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            let z = h.h[i][p * 3 + q];
            let e = if p == q { 1.0 + c } else { c };
            assert!((z.re - e).abs() < 1e-12 && z.im.abs() < 1e-12);
        }
        assert!((herm_det(&h.h[i], 2) - (1.0 + 2.0 * c)).abs() < 1e-12);
    }
}

#[test]
fn nonpositive_metric_reports_location() {
    let g = grid2();
    let sp = Spectral::<f64>::new(g);
    let w = ScalarField::<f64>::from_fn(g, |x| 0.2 * (2.0 * PI * x[0]).cos());
    match metric_from_potential(&sp, &w.values) {
        Err(KahlerError::NotPositive { index, min_eigenvalue, .. }) => {
            assert_eq!(index, 0);
            assert!(min_eigenvalue < 0.0);
        }
        other => panic!("expected positivity failure, got {other:?}"),
    }
}

fn unimodular(g: TorusGrid) -> HermitianField<f64> {
    let mut h = HermitianField::flat(g);
    for (i, m) in h.h.iter_mut().enumerate() {
        let x = g.point(i);
        let a = 1.0 + 0.3 * (2.0 * PI * x[1]).sin() * (2.0 * PI * x[2]).cos();
        let b = rustfft::num_complex::Complex::new(0.2 * (2.0 * PI * x[3]).cos(), 0.1 * (2.0 * PI * x[0]).sin());
        m[0] = rustfft::num_complex::Complex::new(a, 0.0);
        m[1] = b;
        m[3] = b.conj();
        m[4] = rustfft::num_complex::Complex::new((1.0 + b.norm_sqr()) / a, 0.0);
    }
    h
}

#[test]
fn ricci_vanishes_for_unimodular_metric() {
    let g = TorusGrid::new(2, 8);
    let sp = Spectral::<f64>::new(g);
    let h = unimodular(g);
    assert!(h.det().iter().all(|d| (d - 1.0).abs() < 1e-14));
    let r = ricci(&sp, &h);
    assert!(r.distance_to_flat() - 1.0 <= 1e-12);
    assert!(r.h.iter().all(|m| m.iter().all(|z| z.norm() < 1e-11)));
}

#[test]
fn integrated_ricci_trace_vanishes() {
    let g = TorusGrid::new(2, 16);
    let sp = Spectral::<f64>::new(g);
    let w = ScalarField::<f64>::from_fn(g, |x| {
        0.004 * (2.0 * PI * (x[0] + x[2])).cos() + 0.002 * (2.0 * PI * (x[1] - x[3])).sin()
    });
    let h = metric_from_potential(&sp, &w.values).unwrap();
    let r = ricci(&sp, &h);
    let tr = trace_with(&h, &r);
    let det = h.det();
    let weighted: Vec<f64> = tr.iter().zip(&det).map(|(t, d)| t * d).collect();
    assert!(mean(&weighted).abs() < 1e-10, "{}", mean(&weighted));
}

#[test]
fn omega_norm_agrees_with_form_identity() {
    // |Ω|² = Ω∧Ω̄ / (4 ω²/2) for n = 2 and iΩ∧Ω̄ / (8 ω³/6) for n = 3.
    for n in [2usize, 3] {
        let g = TorusGrid::new(n, 4);
        let sp = Spectral::<f64>::new(g);
        let w = ScalarField::<f64>::from_fn(g, |x| {
            0.01 * (2.0 * PI * (x[0] + x[1] + x[2])).cos() + 0.005 * (2.0 * PI * (x[2 * n - 1] - x[0])).sin()
        });
        let h = metric_from_potential(&sp, &w.values).unwrap();
        let norms = h.omega_norm();
        let dim = 2 * n;
        let (mut re, mut im) = (PointForm::<f64>::scalar(dim, 1.0), PointForm::<f64>::scalar(dim, 0.0));
        for p in 0..n {
            let dx = PointForm::basis(dim, &[2 * p]);
            let dy = PointForm::basis(dim, &[2 * p + 1]);
            let (r, i) = (re.wedge(&dx) - im.wedge(&dy), re.wedge(&dy) + im.wedge(&dx));
            re = r;
            im = i;
        }
        for (idx, m) in h.h.iter().enumerate().step_by(97) {
            let om = real_two_form(m, n);
            let mut top = om;
            for k in 1..n {
                top = top.wedge(&om).scale(1.0 / (k as f64 + 1.0));
            }
            let vol = top.top_coefficient();
            let norm2 = if n == 2 {
                (re.wedge(&re) + im.wedge(&im)).top_coefficient() / (4.0 * vol)
            } else {
                2.0 * re.wedge(&im).top_coefficient() / (8.0 * vol)
            };
            assert!((norm2 - norms[idx] * norms[idx]).abs() < 1e-13);
            assert!((vol - herm_det(m, n)).abs() < 1e-13);
        }
    }
}

#[test]
fn real_metric_is_compatible_with_two_form() {
    let g = TorusGrid::new(3, 4);
    let sp = Spectral::<f64>::new(g);
    let w = ScalarField::<f64>::from_fn(g, |x| 0.01 * (2.0 * PI * (x[0] + 2.0 * x[3] - x[5])).sin());
    let h = metric_from_potential(&sp, &w.values).unwrap();
    let mut j = SmallMat::<f64>::zeros(6);
    for p in 0..3 {
        j[(2 * p + 1, 2 * p)] = 1.0;
        j[(2 * p, 2 * p + 1)] = -1.0;
    }
    for m in h.h.iter().step_by(53) {
        let gm = real_metric(m, 3);
        let om = matrix_from_two_form(&real_two_form(m, 3));
        // g(u, v) = ω(u, Jv)
        assert!(om.mul(&j).sub(&gm).max_abs() < 1e-14);
        assert!(gm.asymmetry() < 1e-15);
        assert!((gm.det() - herm_det(m, 3).powi(2)).abs() < 1e-12);
        let back = herm_from_two_form(&real_two_form(m, 3), 3);
        assert!(back.iter().zip(m.iter()).all(|(a, b)| (a - b).norm() < 1e-15));
        // the trigonometric closed form is √eps-conditioned at repeated eigenvalues
        let ev = gm.sym_eigenvalues()[0];
        assert!((ev - herm_min_eigenvalue(m, 3)).abs() < 1e-7);
    }
}

#[test]
fn interpolant_reproduces_grid_and_off_grid_values() {
    let g = TorusGrid::new(2, 8);
    let sp = Spectral::<f64>::new(g);
    let f = |x: &[f64]| (2.0 * PI * (x[0] - 2.0 * x[3])).cos() + 0.5 * (2.0 * PI * (x[1] + x[2])).sin();
    let field = ScalarField::<f64>::from_fn(g, f);
    let it = TrigInterpolant::from_fields(&sp, &[&field.values], Pruning::DEFAULT);
    assert_eq!(it.mode_count(), 2);
    let full = TrigInterpolant::from_fields(&sp, &[&field.values], Pruning::NONE);
    let pts: Vec<[f64; 6]> = (0..20).map(|i| {
        let t = i as f64 * 0.0371;
        [t, 0.3 - t, 0.77 * t, 0.1 + t * t, 0.0, 0.0]
    }).collect();
    let a = it.eval_many(&pts);
    let b = full.eval_many(&pts);
    for (i, p) in pts.iter().enumerate() {
        assert!((a[0][i] - f(&p[..4])).abs() < 1e-13);
        assert!((b[0][i] - f(&p[..4])).abs() < 1e-12);
    }
}

#[test]
fn snapshot_round_trip() {
    let dir = std::env::temp_dir().join(format!("g2flow-snap-{}", std::process::id()));
    let g = TorusGrid::new(2, 4);
    let f = ScalarField::<f64>::from_fn(g, |x| x[0] + 10.0 * x[3]);
    let stem = dir.join("potential_0");
    snapshot::write(&stem, g, "potential", 0.25, &[&f.values]).unwrap();
    let (h, comps) = snapshot::read::<f64>(&stem).unwrap();
    assert_eq!((h.n, h.size, h.field.as_str(), h.time), (2, 4, "potential", 0.25));
    assert_eq!(comps[0], f.values);
    let text = std::fs::read_to_string(stem.with_extension("json")).unwrap();
    assert!(text.contains("\"N\": 4"));
    std::fs::remove_dir_all(dir).ok();
}
