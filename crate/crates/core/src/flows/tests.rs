use super::*;
use crate::linalg::SmallMat;
use crate::torus_cy::kahler::{real_hessian, real_metric};

fn perturbed(kind: FlowKind, n: usize, size: usize, eps: f64) -> PotentialFlow<f64> {
    PotentialFlow::from_config(&FlowConfig::single_mode(kind, n, size, eps)).unwrap()
}

#[test]
fn flat_rhs_values() {
    let grid = TorusGrid::new(2, 8);
    let zero = vec![0.0; grid.len()];
    let ma = PotentialFlow::<f64>::new(FlowKind::Ma13, grid, zero.clone()).unwrap();
    assert!(ma.rhs(&zero).unwrap().iter().all(|&x| (x - 3.0).abs() < 1e-15));
    let kr = PotentialFlow::<f64>::new(FlowKind::Kr, grid, zero.clone()).unwrap();
    assert!(kr.rhs(&zero).unwrap().iter().all(|&x| x.abs() < 1e-15));
}

#[test]
fn flat_ma13_step_is_linear_in_time() {
    let grid = TorusGrid::new(2, 8);
    let zero = vec![0.0; grid.len()];
    let ma = PotentialFlow::<f64>::new(FlowKind::Ma13, grid, zero.clone()).unwrap();
    let e = ma.eval(&zero, 0.0).unwrap();
    let (u, _, dt) = ma.step(&zero, &e, 0.0, 0.01, 4).unwrap();
    assert_eq!(dt, 0.01);
    assert!(u.iter().all(|&x| (x - 0.03).abs() < 1e-15));
}

#[test]
fn ma13_rhs_matches_determinant_oracle() {
    let f = perturbed(FlowKind::Ma13, 2, 8, 0.4);
    let grid = f.grid();
    let u: Vec<f64> = (0..grid.len()).map(|i| 0.003 * (2.0 * std::f64::consts::PI * (grid.point(i)[1] - grid.point(i)[3])).sin()).collect();
    let rhs = f.rhs(&u).unwrap();
    // dense real determinant of the 4×4 metric from an independent Hessian
    let w = f.total_potential(&u);
    let hess = real_hessian(&f.sp, &f.sp.forward(&w));
    let bg = real_hessian(&f.sp, &f.sp.forward(&f.background));
    for i in (0..grid.len()).step_by(37) {
        let g = SmallMat::<f64>::from_fn(4, |a, b| {
            let hh = |hs: &[Vec<f64>], a: usize, b: usize| hs[crate::torus_cy::kahler::pair_index(a, b, 4)][i];
            // g_{ab} = δ_ab + ½(w_ab + w_{JaJb})
            let j = |a: usize| if a % 2 == 0 { a + 1 } else { a - 1 };
            let sg = |a: usize| if a % 2 == 0 { 1.0 } else { -1.0 };
            let _ = &bg;
            (a == b) as i32 as f64 + 0.5 * (hh(&hess, a, b) + sg(a) * sg(b) * hh(&hess, j(a), j(b)))
        });
        let det_h = g.det().sqrt();
        let expect = 3.0 * det_h.cbrt();
        assert!((rhs[i] - expect).abs() < 1e-12, "{} vs {expect}", rhs[i]);
    }
}

#[test]
fn ma13_rhs_is_cube_root_norm_identity() {
    let f = perturbed(FlowKind::Ma13, 3, 4, 0.5);
    let u = vec![0.0; f.grid().len()];
    let rhs = f.rhs(&u).unwrap();
    let norm = f.metric(&u).unwrap().omega_norm();
    for (r, s) in rhs.iter().zip(&norm) {
        assert!((r - 3.0 * s.powf(-2.0 / 3.0)).abs() < 1e-12);
    }
}

#[test]
fn kr_ddbar_log_norm_is_half_ricci() {
    let f = perturbed(FlowKind::Kr, 2, 16, 0.5);
    let h = f.metric(&vec![0.0; f.grid().len()]).unwrap();
    let log_norm: Vec<f64> = h.omega_norm().iter().map(|s| s.ln()).collect();
    let lhs = HermitianField::from_hessian(f.grid(), &real_hessian(&f.sp, &f.sp.forward(&log_norm)), 2.0);
    let ric = crate::torus_cy::ricci(&f.sp, &h);
    let n = 2;
    let mut worst = 0.0f64;
    for (a, r) in lhs.h.iter().zip(&ric.h) {
        for p in 0..n {
            for q in 0..n {
                let id = if p == q { 1.0 } else { 0.0 };
                worst = worst.max((a[p * 3 + q] - num_complex(id) - r[p * 3 + q] * 0.5).norm());
            }
        }
    }
    assert!(worst < 1e-9, "{worst}");
}

fn num_complex(x: f64) -> crate::torus_cy::C<f64> {
    crate::torus_cy::C::new(x, 0.0)
}

#[test]
fn real_metric_determinant_is_square() {
    let f = perturbed(FlowKind::Ma13, 2, 8, 0.5);
    let h = f.metric(&vec![0.0; f.grid().len()]).unwrap();
    let a = &h.h[5];
    let g = real_metric(a, 2);
    assert!((g.det() - herm_det(a, 2).powi(2)).abs() < 1e-13);
}

#[test]
fn kr_stationary_at_flat_metric() {
    let f = perturbed(FlowKind::Kr, 2, 8, 0.3);
    let u: Vec<f64> = f.background.iter().map(|&v| -v).collect();
    let e = f.eval(&u, 0.0).unwrap();
    let (next, _, _) = f.step(&u, &e, 0.0, 1e-3, 2).unwrap();
    assert!(next.iter().zip(&u).all(|(a, b)| (a - b).abs() < 1e-15));
}

#[test]
fn synthetic_decay_is_recovered() {
    let t: Vec<f64> = (0..40).map(|i| 0.05 * i as f64).collect();
    let y: Vec<f64> = t.iter().map(|&s| 0.7 * (-2.0 * s).exp()).collect();
    let fit = decay_fit(&t, &y).unwrap();
    assert!((fit.lambda - 2.0).abs() < 1e-3);
    assert!((fit.c - 0.7).abs() < 1e-9);
    assert!(fit.r2 > 0.999_999 && !fit.non_monotone);
    assert!(matches!(decay_fit(&t[..10], &y[..10]), Err(FitError::TooFewSamples { .. })));
}

#[test]
fn non_monotone_tail_is_flagged() {
    let t: Vec<f64> = (0..30).map(|i| i as f64).collect();
    let y: Vec<f64> = t.iter().map(|&s| (-s).exp() * if s as usize == 12 { 3.0 } else { 1.0 }).collect();
    assert!(decay_fit(&t, &y).unwrap().non_monotone);
}

#[test]
fn normalized_potential_has_zero_weighted_mean() {
    let f = perturbed(FlowKind::Ma13, 2, 8, 0.4);
    let grid = f.grid();
    let u: Vec<f64> = (0..grid.len()).map(|i| 1.0 + grid.point(i)[0].sin()).collect();
    let ut = f.normalize(&u);
    let w: Vec<f64> = ut.iter().zip(&f.bg_det).map(|(a, d)| a * d).collect();
    assert!(mean(&w).abs() < 1e-15);
}

#[test]
fn global_error_drops_sixteenfold_when_dt_halves() {
    let f = perturbed(FlowKind::Ma13, 2, 8, 0.3);
    let n = f.grid().len();
    let integrate = |dt: f64, steps: usize| {
        let mut u = vec![0.0; n];
        for s in 0..steps {
            u = f.rk4(&u, s as f64 * dt, dt).unwrap();
        }
        u
    };
    let tend = 0.004;
    let reference = integrate(tend / 64.0, 64);
    let e1 = crate::torus_cy::max_abs_diff(&integrate(tend / 4.0, 4), &reference);
    let e2 = crate::torus_cy::max_abs_diff(&integrate(tend / 8.0, 8), &reference);
    let ratio = e1 / e2;
    assert!((12.0..20.0).contains(&ratio), "ratio {ratio} ({e1:e}, {e2:e})");
}

#[test]
fn limit_residual_vanishes_for_flat_metric() {
    let grid = TorusGrid::new(2, 8);
    let f = PotentialFlow::<f64>::new(FlowKind::Ma13, grid, vec![0.0; grid.len()]).unwrap();
    let h = f.metric(&vec![0.0; grid.len()]).unwrap();
    assert!(f.limit_residual(&h) < 1e-15);
}

#[test]
fn flat_run_converges_immediately() {
    let mut cfg = FlowConfig::single_mode(FlowKind::Kr, 2, 8, 0.0);
    cfg.modes.clear();
    let (state, trace) = Flow::<f64>::new(cfg).unwrap().run().unwrap();
    assert!(trace.converged && trace.records.len() == 1 && state.u.iter().all(|&x| x == 0.0));
}

#[test]
fn short_run_conserves_volume_and_shrinks_oscillation() {
    let mut cfg = FlowConfig::single_mode(FlowKind::Ma13, 2, 8, 0.05);
    cfg.tmax = 0.02;
    let (_, trace) = Flow::<f64>::new(cfg).unwrap().run().unwrap();
    assert!(trace.volume_drift() < 1e-12, "{}", trace.volume_drift());
    let (a, b) = (trace.records[0], *trace.last().unwrap());
    assert!(b.osc_norm < a.osc_norm && b.limit_residual < a.limit_residual);
}

#[test]
fn csv_round_trip() {
    let mut cfg = FlowConfig::single_mode(FlowKind::Kr, 2, 8, 0.05);
    cfg.tmax = 0.005;
    let (_, trace) = Flow::<f64>::new(cfg).unwrap().run().unwrap();
    let mut buf = Vec::new();
    trace.write_csv(&mut buf).unwrap();
    let back = FlowTrace::read_csv(&buf[..]).unwrap();
    assert_eq!(back.len(), trace.records.len());
    for (a, b) in back.iter().zip(&trace.records) {
        assert_eq!((a.t, a.osc_norm, a.volume, a.dudt_osc), (b.t, b.osc_norm, b.volume, b.dudt_osc));
    }
}

