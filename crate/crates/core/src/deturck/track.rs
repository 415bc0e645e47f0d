use rayon::prelude::*;
use serde::Serialize;

use super::pullback::jacobian;
use super::DeturckError;
use crate::flows::{Flow, FlowError, FlowKind, FlowTrace, PotentialFlow};
use crate::g2_product::{driving_function, gradient, AnsatzMode};
use crate::scalar::Real;
use crate::torus_cy::{HermitianField, Pruning, Spectral, TorusGrid, TrigInterpolant};

/// Ansatz family whose gauge a potential flow realizes.
pub fn mode_for(kind: FlowKind) -> Option<AnsatzMode> {
    match kind {
        FlowKind::Ma13 => Some(AnsatzMode::Flow),
        FlowKind::Kr => Some(AnsatzMode::Coflow),
        FlowKind::Power { .. } => None,
    }
}

/// `Y = −∇_h̃ |Ω|^{−2/3}` (flow) or `Y = ∇_h̃ log|Ω|` (coflow), where the
/// complex gradient `∇_h` is half the Riemannian one.
pub fn gauge_field<T: Real>(sp: &Spectral<T>, h: &HermitianField<T>, mode: AnsatzMode) -> Vec<Vec<T>> {
    let f = driving_function(&h.omega_norm(), mode);
    let c = T::lit(match mode {
        AnsatzMode::Flow => -0.5,
        AnsatzMode::Coflow => 0.5,
    });
    let mut y = gradient(sp, h, &f);
    for comp in y.iter_mut() {
        comp.iter_mut().for_each(|x| *x = *x * c);
    }
    y
}

pub fn vector_field_y<T: Real>(flow: &PotentialFlow<T>, u: &[T], mode: AnsatzMode) -> Result<Vec<Vec<T>>, FlowError> {
    let h = flow.metric(u).map_err(|source| FlowError::Positivity { t: f64::NAN, source })?;
    Ok(gauge_field(&flow.sp, &h, mode))
}

/// Potential and marker positions `Θ(p)` of the coupled system.
#[derive(Clone, Debug)]
pub struct CoupledState<T> {
    pub t: f64,
    pub u: Vec<T>,
    pub x: Vec<[T; 6]>,
}

impl<T: Real> CoupledState<T> {
    pub fn initial(grid: TorusGrid) -> Self {
        let x = (0..grid.len()).map(|i| grid.point(i).map(T::lit)).collect();
        Self { t: 0.0, u: vec![T::zero(); grid.len()], x }
    }

    /// Displacement `Θ(p) − p` per torus axis.
    pub fn displacement(&self, grid: TorusGrid) -> Vec<Vec<T>> {
        let dims = grid.dims();
        let mut d = vec![vec![T::zero(); grid.len()]; dims];
        for (i, x) in self.x.iter().enumerate() {
            let p = grid.point(i);
            for a in 0..dims {
                d[a][i] = x[a] - T::lit(p[a]);
            }
        }
        d
    }
}

fn shifted<T: Real>(x: &[[T; 6]], v: &[[T; 6]], c: T) -> Vec<[T; 6]> {
    x.iter()
        .zip(v)
        .map(|(p, w)| {
            let mut q = *p;
            for a in 0..6 {
                q[a] = q[a] + c * w[a];
            }
            q
        })
        .collect()
}

fn velocities<T: Real>(sp: &Spectral<T>, y: &[Vec<T>], x: &[[T; 6]]) -> Vec<[T; 6]> {
    let refs: Vec<&[T]> = y.iter().map(|c| &c[..]).collect();
    let it = TrigInterpolant::from_fields(sp, &refs, Pruning::DEFAULT);
    let vals = it.eval_many(x);
    (0..x.len())
        .map(|i| {
            let mut v = [T::zero(); 6];
            for (a, c) in vals.iter().enumerate() {
                v[a] = c[i];
            }
            v
        })
        .collect()
}

/// One RK4 step of `(du/dt, dΘ/dt) = (H(ρ), Y_t(Θ))`; the potential update
/// is the same arithmetic as [`PotentialFlow::rk4`]. Returns the new state
/// and, per stage, its time and the largest marker speed.
pub fn coupled_step<T: Real>(
    flow: &PotentialFlow<T>,
    mode: AnsatzMode,
    s: &CoupledState<T>,
    dt: f64,
) -> Result<(CoupledState<T>, [(f64, f64); 4]), FlowError> {
    coupled_step_with(flow, mode, s, dt, true)
}

/// [`coupled_step`] with the dealiasing of `du/dt` optional.
pub fn coupled_step_with<T: Real>(
    flow: &PotentialFlow<T>,
    mode: AnsatzMode,
    s: &CoupledState<T>,
    dt: f64,
    dealias: bool,
) -> Result<(CoupledState<T>, [(f64, f64); 4]), FlowError> {
    let sp = &flow.sp;
    let u = &s.u;
    let h = T::lit(dt);
    let half = T::lit(0.5 * dt);
    let axpy = |c: T, k: &[T]| -> Vec<T> { u.iter().zip(k).map(|(&a, &b)| a + c * b).collect() };
    let stage = |v: &[T], x: &[[T; 6]], t: f64| -> Result<(Vec<T>, Vec<[T; 6]>, (f64, f64)), FlowError> {
        let e = flow.eval(v, t)?;
        let y = gauge_field(sp, &e.h, mode);
        let k = if dealias { flow.filter(&e.dudt) } else { e.dudt };
        let v = velocities(sp, &y, x);
        let vmax = v.iter().map(|w| w.iter().fold(T::zero(), |a, &c| a + c * c).sqrt().to_f64()).fold(0.0, f64::max);
        Ok((k, v, (t, vmax)))
    };
    let (k1, v1, s1) = stage(u, &s.x, s.t)?;
    let (k2, v2, s2) = stage(&axpy(half, &k1), &shifted(&s.x, &v1, half), s.t + 0.5 * dt)?;
    let (k3, v3, s3) = stage(&axpy(half, &k2), &shifted(&s.x, &v2, half), s.t + 0.5 * dt)?;
    let (k4, v4, s4) = stage(&axpy(h, &k3), &shifted(&s.x, &v3, h), s.t + dt)?;
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    let u_new: Vec<T> = (0..u.len()).map(|i| u[i] + sixth * (k1[i] + two * (k2[i] + k3[i]) + k4[i])).collect();
    let x_new: Vec<[T; 6]> = (0..s.x.len())
        .map(|i| {
            let mut q = s.x[i];
            for a in 0..6 {
                q[a] = q[a] + sixth * (v1[i][a] + two * (v2[i][a] + v3[i][a]) + v4[i][a]);
            }
            q
        })
        .collect();
    Ok((CoupledState { t: s.t + dt, u: u_new, x: x_new }, [s1, s2, s3, s4]))
}

/// RK4 transport of markers through a velocity field given as a function of
/// the positions.
pub fn advect<T: Real>(x: &[[T; 6]], dt: f64, y: impl Fn(&[[T; 6]]) -> Vec<[T; 6]>) -> Vec<[T; 6]> {
    let h = T::lit(dt);
    let half = T::lit(0.5 * dt);
    let v1 = y(x);
    let v2 = y(&shifted(x, &v1, half));
    let v3 = y(&shifted(x, &v2, half));
    let v4 = y(&shifted(x, &v3, h));
    let sixth = h / T::lit(6.0);
    let two = T::lit(2.0);
    (0..x.len())
        .map(|i| {
            let mut q = x[i];
            for a in 0..6 {
                q[a] = q[a] + sixth * (v1[i][a] + two * (v2[i][a] + v3[i][a]) + v4[i][a]);
            }
            q
        })
        .collect()
}

/// Stored state of the track.
#[derive(Clone, Debug)]
pub struct TrackSample<T> {
    pub t: f64,
    pub u: Vec<T>,
    pub x: Vec<[T; 6]>,
    pub displacement: Vec<Vec<T>>,
    pub det_min: f64,
    pub det_max: f64,
    /// Grid mean of `det DΘ`, which is 1 for a degree-one map.
    pub det_mean: f64,
}

#[derive(Clone, Debug)]
pub struct DiffeoTrack<T> {
    pub grid: TorusGrid,
    pub mode: AnsatzMode,
    pub samples: Vec<TrackSample<T>>,
    /// Stage times of every step and the largest marker speed `|Y_t(Θ_t)|`
    /// there.
    pub step_times: Vec<f64>,
    pub y_sup: Vec<f64>,
}

impl<T: Real> DiffeoTrack<T> {
    pub fn last(&self) -> &TrackSample<T> {
        self.samples.last().expect("track has at least the initial sample")
    }

    /// Extremes of `det DΘ` over every stored sample.
    pub fn det_range(&self) -> (f64, f64) {
        self.samples.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.det_min), hi.max(s.det_max)))
    }

    /// Largest `|mean det DΘ − 1|` over the stored samples.
    pub fn det_mean_drift(&self) -> f64 {
        self.samples.iter().map(|s| (s.det_mean - 1.0).abs()).fold(0.0, f64::max)
    }

    /// `sup_p |d_{k+1}(p) − d_k(p)|` between consecutive samples.
    pub fn increments(&self) -> Vec<(f64, f64, f64)> {
        self.samples
            .windows(2)
            .map(|w| {
                let inc = (0..self.grid.len())
                    .map(|i| {
                        w[0].displacement
                            .iter()
                            .zip(&w[1].displacement)
                            .map(|(a, b)| (b[i] - a[i]).to_f64().powi(2))
                            .sum::<f64>()
                            .sqrt()
                    })
                    .fold(0.0, f64::max);
                (w[0].t, w[1].t, inc)
            })
            .collect()
    }
}

fn sample<T: Real>(sp: &Spectral<T>, s: &CoupledState<T>) -> Result<TrackSample<T>, DeturckError> {
    let grid = sp.grid();
    let displacement = s.displacement(grid);
    let dets: Vec<f64> = jacobian(sp, &displacement).par_iter().map(|j| j.det().to_f64()).collect();
    let det_min = dets.iter().copied().fold(f64::INFINITY, f64::min);
    let det_max = dets.iter().copied().fold(0.0, f64::max);
    if !(det_min > 0.0) {
        return Err(DeturckError::Jacobian { t: s.t, min_det: det_min });
    }
    let det_mean = dets.iter().sum::<f64>() / dets.len() as f64;
    Ok(TrackSample { t: s.t, u: s.u.clone(), x: s.x.clone(), displacement, det_min, det_max, det_mean })
}

/// Replays a finished run with its recorded steps and carries the markers
/// `Θ_t(p)` along; stores every `stride`-th state and the last one.
pub fn integrate_theta<T: Real>(
    flow: &Flow<T>,
    trace: &FlowTrace,
    mode: AnsatzMode,
    stride: usize,
) -> Result<DiffeoTrack<T>, DeturckError> {
    let p = &flow.problem;
    let grid = p.grid();
    let mut s = CoupledState::initial(grid);
    let mut track = DiffeoTrack { grid, mode, samples: vec![sample(&p.sp, &s)?], step_times: Vec::new(), y_sup: Vec::new() };
    let steps: Vec<f64> = trace.records.iter().map(|r| r.dt).filter(|&dt| dt > 0.0).collect();
    let stride = stride.max(1);
    for (k, &dt) in steps.iter().enumerate() {
        let (next, stages) = coupled_step(p, mode, &s, dt)?;
        for (t, v) in stages {
            track.step_times.push(t);
            track.y_sup.push(v);
        }
        s = next;
        if (k + 1) % stride == 0 || k + 1 == steps.len() {
            track.samples.push(sample(&p.sp, &s)?);
        }
    }
    Ok(track)
}

/// Check of `sup_p |d_{t₂} − d_{t₁}| ≤ C (e^{−λt₁} − e^{−λt₂})/λ` with
/// `C = max_t sup|Y_t| e^{λt}` over the integrated stage velocities.
#[derive(Clone, Debug, Serialize)]
pub struct CauchyReport {
    pub lambda: f64,
    pub c: f64,
    /// Largest ratio of an increment to its bound.
    pub worst_ratio: f64,
    /// `sup |d|` of the last increment, which tends to zero.
    pub last_increment: f64,
    pub pass: bool,
}

pub fn cauchy_check<T: Real>(track: &DiffeoTrack<T>, lambda: f64) -> CauchyReport {
    let c = track
        .step_times
        .iter()
        .zip(&track.y_sup)
        .map(|(&t, &y)| y * (lambda * t).exp())
        .fold(0.0, f64::max);
    let incs = track.increments();
    let mut worst = 0.0f64;
    for &(t1, t2, inc) in &incs {
        let bound = c * ((-lambda * t1).exp() - (-lambda * t2).exp()) / lambda;
        if inc > 0.0 {
            worst = worst.max(inc / bound);
        }
    }
    let last_increment = incs.last().map_or(0.0, |x| x.2);
    CauchyReport { lambda, c, worst_ratio: worst, last_increment, pass: lambda > 0.0 && worst <= 1.0 + 1e-9 }
}
