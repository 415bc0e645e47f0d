use super::*;
use crate::flows::{Flow, FlowConfig, FlowKind, PotentialFlow};
use crate::g2_product::AnsatzMode;
use crate::torus_cy::{Pruning, Spectral, TorusGrid, TrigInterpolant};

fn problem(kind: FlowKind, size: usize, eps: f64) -> PotentialFlow<f64> {
    PotentialFlow::from_config(&FlowConfig::single_mode(kind, 2, size, eps)).unwrap()
}

fn synthetic_y(x: &[f64; 6]) -> [f64; 6] {
    let tp = 2.0 * std::f64::consts::PI;
    let mut v = [0.0; 6];
    v[0] = 0.1 * (tp * x[1]).sin();
    v[1] = 0.05 * (tp * (x[0] + x[2])).cos();
    v[3] = 0.02 * (tp * (x[0] - x[3])).sin();
    v
}

#[test]
fn interpolated_transport_matches_reference_trajectories() {
    let grid = TorusGrid::new(2, 8);
    let sp = Spectral::<f64>::new(grid);
    let pts: Vec<[f64; 6]> = (0..grid.len()).map(|i| grid.point(i)).collect();
    let comps: Vec<Vec<f64>> = (0..4).map(|a| pts.iter().map(|p| synthetic_y(p)[a]).collect()).collect();
    let refs: Vec<&[f64]> = comps.iter().map(|c| &c[..]).collect();
    let it = TrigInterpolant::from_fields(&sp, &refs, Pruning::DEFAULT);
    let through_grid = |x: &[[f64; 6]]| -> Vec<[f64; 6]> {
        let vals = it.eval_many(x);
        (0..x.len()).map(|i| std::array::from_fn(|a| if a < 4 { vals[a][i] } else { 0.0 })).collect()
    };
    let exact = |x: &[[f64; 6]]| -> Vec<[f64; 6]> { x.iter().map(synthetic_y).collect() };
    let (mut a, mut b) = (pts.clone(), pts.clone());
    for _ in 0..50 {
        a = advect(&a, 0.02, through_grid);
    }
    for _ in 0..2000 {
        b = advect(&b, 0.0005, exact);
    }
    let err = a.iter().zip(&b).flat_map(|(p, q)| (0..4).map(move |k| (p[k] - q[k]).abs())).fold(0.0, f64::max);
    assert!(err < 1e-8, "trajectory error {err:e}");
}

#[test]
fn flat_background_has_trivial_gauge() {
    let grid = TorusGrid::new(2, 8);
    let p = PotentialFlow::<f64>::new(FlowKind::Ma13, grid, vec![0.0; grid.len()]).unwrap();
    let y = vector_field_y(&p, &vec![0.0; grid.len()], AnsatzMode::Flow).unwrap();
    assert!(y.iter().flatten().all(|&v| v.abs() < 1e-15));
    let s = CoupledState::initial(grid);
    let (next, stages) = coupled_step(&p, AnsatzMode::Flow, &s, 0.01).unwrap();
    assert!(stages.iter().all(|st| st.1 < 1e-15));
    assert!(next.displacement(grid).iter().flatten().all(|&d| d.abs() < 1e-15));
}

#[test]
fn identity_pullback_reproduces_data() {
    let p = problem(FlowKind::Ma13, 12, 0.1);
    let grid = p.grid();
    let s = CoupledState::<f64>::initial(grid);
    let pb = pull_back(&p, &s.u, &s.x, &s.displacement(grid)).unwrap();
    let h = p.metric(&s.u).unwrap();
    let d = crate::g2_product::KahlerData::from_metric(&h);
    assert!(pb.omega.max_abs_diff(&d.omega) < 1e-13);
    assert!(pb.norm_identity_residual() < 1e-12);
    assert!(pb.jac_det.iter().all(|&j| (j - 1.0).abs() < 1e-14));
}

#[test]
fn pullback_is_natural_along_the_track() {
    let p = problem(FlowKind::Ma13, 12, 0.1);
    let grid = p.grid();
    let mut s = CoupledState::<f64>::initial(grid);
    for _ in 0..20 {
        s = coupled_step(&p, AnsatzMode::Flow, &s, 0.005).unwrap().0;
    }
    let d = s.displacement(grid);
    assert!(d.iter().flatten().any(|&x| x.abs() > 1e-5));
    let pb = pull_back(&p, &s.u, &s.x, &d).unwrap();
    assert!(pb.norm_identity_residual() < 1e-7, "{:e}", pb.norm_identity_residual());
    let vol = pb.volume_ratio.iter().zip(&pb.jac_det).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(vol < 1e-12, "{vol:e}");
}

#[test]
fn coupled_equations_hold_at_start() {
    for (kind, mode) in [(FlowKind::Ma13, AnsatzMode::Flow), (FlowKind::Kr, AnsatzMode::Coflow)] {
        let p = problem(kind, 12, 0.05);
        let r = verify_coupled_initial(&p, mode).unwrap();
        assert!(r.pass, "{r:?}");
    }
}

#[test]
fn coupled_equations_hold_later() {
    let p = problem(FlowKind::Ma13, 12, 0.05);
    let mut s = CoupledState::<f64>::initial(p.grid());
    for _ in 0..10 {
        s = coupled_step(&p, AnsatzMode::Flow, &s, 0.005).unwrap().0;
    }
    let r = verify_coupled(&p, AnsatzMode::Flow, &s, 1e-3).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn g2_time_is_half_the_potential_time() {
    for (kind, mode) in [(FlowKind::Ma13, AnsatzMode::Flow), (FlowKind::Kr, AnsatzMode::Coflow)] {
        let p = problem(kind, 12, 0.05);
        let r = verify_g2_equivalence(&p, mode, 1e-3).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.time_ratio - 0.5).abs() < 1e-6, "{r:?}");
    }
}

#[test]
fn replay_reproduces_the_potential() {
    let mut cfg = FlowConfig::single_mode(FlowKind::Ma13, 2, 8, 0.05);
    cfg.tmax = 0.02;
    let flow = Flow::<f64>::new(cfg).unwrap();
    let (state, trace) = flow.run().unwrap();
    let track = integrate_theta(&flow, &trace, AnsatzMode::Flow, 5).unwrap();
    let last = track.last();
    assert_eq!(last.t, state.t);
    assert_eq!(last.u, state.u);
    assert_eq!(track.y_sup.len(), 4 * state.steps);
    let (lo, hi) = track.det_range();
    assert!(lo > 0.9 && hi < 1.1);
    assert!(track.det_mean_drift() < 1e-12);
}

#[test]
fn cauchy_bound_on_synthetic_track() {
    let grid = TorusGrid::new(2, 4);
    let lambda = 2.0;
    let mk = |t: f64| TrackSample {
        t,
        u: vec![0.0; grid.len()],
        x: Vec::new(),
        displacement: vec![vec![0.3 * (1.0 - (-lambda * t).exp()) / lambda; grid.len()]; 4],
        det_min: 1.0,
        det_max: 1.0,
        det_mean: 1.0,
    };
    let times: Vec<f64> = (0..40).map(|k| 0.05 * k as f64).collect();
    let track = DiffeoTrack {
        grid,
        mode: AnsatzMode::Flow,
        samples: times.iter().map(|&t| mk(t)).collect(),
        y_sup: times.iter().map(|&t| 0.6 * (-lambda * t).exp()).collect(),
        step_times: times,
    };
    let r = cauchy_check(&track, lambda);
    assert!(r.pass && (r.worst_ratio - 1.0).abs() < 1e-12, "{r:?}");
    let mut low = track.clone();
    low.y_sup.iter_mut().for_each(|y| *y *= 0.5);
    assert!(!cauchy_check(&low, lambda).pass);
}

