//! Parabolic complex Monge–Ampère flows of Kähler potentials on the flat
//! torus: `du/dt = H(e^{−2 log|Ω|_ω} det(ω + i∂∂̄u)/det ω)` for the cube-root
//! flow, the Kähler–Ricci flow and power speeds.

mod fit;
mod kind;
mod trace;

pub use fit::{decay_fit, DecayFit, FitError, MIN_FIT_SAMPLES};
pub use kind::FlowKind;
pub use trace::{write_row, FlowTrace, TraceRecord, CSV_HEADER, FULL_CSV_HEADER};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::scalar::{abs, Real};
use crate::torus_cy::kahler::herm_det;
use crate::torus_cy::{mean, metric_from_potential, oscillation, FourierMode, HermitianField, KahlerError, PotentialField, Spectral, TorusGrid};

/// RK4 stability bound on the negative real axis.
const RK4_STABILITY: f64 = 2.78;
/// Floor for the determinant ratio; a smaller value is a hard error.
const RHO_FLOOR: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FlowConfig {
    pub kind: FlowKind,
    pub n: usize,
    #[serde(rename = "N")]
    pub size: usize,
    /// Background potential `v`, so that `ω = ω₀ + i∂∂̄v`.
    pub modes: Vec<FourierMode>,
    /// Largest step; the stability bound may shorten it.
    pub dt: f64,
    pub tmax: f64,
    /// Stop once `‖du/dt − mean du/dt‖_∞` falls below this.
    pub conv_tol: f64,
    #[serde(default = "default_safety")]
    pub safety: f64,
    #[serde(default = "default_halvings")]
    pub max_halvings: u32,
}

fn default_safety() -> f64 {
    0.9
}

fn default_halvings() -> u32 {
    10
}

/// Wave vector of the default initial mode, `cos 2π(x₁ + x₂)` on the real
/// parts of the first two complex coordinates.
pub fn default_wave_vector(n: usize) -> Vec<i64> {
    let mut k = vec![0; 2 * n];
    k[0] = 1;
    k[2] = 1;
    k
}

impl FlowConfig {
    /// Background `ε/(4π²) cos 2π(x₁ + x₂)`.
    pub fn single_mode(kind: FlowKind, n: usize, size: usize, eps: f64) -> Self {
        let amp = eps / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
        Self {
            kind,
            n,
            size,
            modes: vec![FourierMode { k: default_wave_vector(n), amplitude: amp, phase: 0.0 }],
            dt: 1e-3,
            tmax: 2.0,
            conv_tol: 1e-9,
            safety: default_safety(),
            max_halvings: default_halvings(),
        }
    }

    pub fn validate(&self) -> Result<(), FlowError> {
        let bad = |m: String| Err(FlowError::Config(m));
        if !(1..=3).contains(&self.n) {
            return bad(format!("n must be 1, 2 or 3, got {}", self.n));
        }
        if self.size < 4 || self.size % 2 != 0 {
            return bad(format!("grid size must be even and at least 4, got {}", self.size));
        }
        if !(self.dt > 0.0) || !(self.tmax >= 0.0) || !(self.conv_tol >= 0.0) || !(self.safety > 0.0 && self.safety <= 1.0) {
            return bad("need dt > 0, tmax ≥ 0, conv_tol ≥ 0 and 0 < safety ≤ 1".into());
        }
        for m in &self.modes {
            if m.k.len() != 2 * self.n {
                return bad(format!("wave vector {:?} needs {} entries", m.k, 2 * self.n));
            }
            if m.k.iter().any(|&k| 3 * k.unsigned_abs() as usize >= self.size) {
                return bad(format!("wave vector {:?} is not resolved by the dealiased grid N={}", m.k, self.size));
            }
        }
        self.kind.validate().map_err(FlowError::Config)
    }

    pub fn grid(&self) -> TorusGrid {
        TorusGrid::new(self.n, self.size)
    }
}

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("invalid flow configuration: {0}")]
    Config(String),
    #[error("positivity lost at t = {t}: {source}")]
    Positivity { t: f64, source: KahlerError },
    #[error("determinant ratio {rho:e} below floor at grid index {index}")]
    Degenerate { index: usize, rho: f64 },
    #[error("step size underflow at t = {t} (dt = {dt:e})")]
    StepUnderflow { t: f64, dt: f64 },
}

/// Fixed background data and the spectral machinery of one flow.
pub struct PotentialFlow<T: Real> {
    pub sp: Spectral<T>,
    pub kind: FlowKind,
    /// Background potential `v`.
    pub background: Vec<T>,
    /// `det h` of the background metric.
    pub bg_det: Vec<T>,
    /// `|Ω|_ω` of the background metric.
    pub bg_norm: Vec<T>,
    /// Largest retained `|k|²` under the 2/3 rule.
    k2max: f64,
}

/// Quantities derived from one potential.
#[derive(Clone, Debug)]
pub struct FlowEval<T: Real> {
    pub h: HermitianField<T>,
    pub rho: Vec<T>,
    pub dudt: Vec<T>,
}

impl<T: Real> PotentialFlow<T> {
    pub fn new(kind: FlowKind, grid: TorusGrid, background: Vec<T>) -> Result<Self, FlowError> {
        let sp = Spectral::new(grid);
        let bg = metric_from_potential(&sp, &background).map_err(|source| FlowError::Positivity { t: 0.0, source })?;
        let bg_det = bg.det();
        let bg_norm = bg.omega_norm();
        let kcut = ((grid.size - 1) / 3) as f64;
        let k2max = grid.dims() as f64 * kcut * kcut;
        Ok(Self { sp, kind, background, bg_det, bg_norm, k2max })
    }

    pub fn from_config(cfg: &FlowConfig) -> Result<Self, FlowError> {
        cfg.validate()?;
        let grid = cfg.grid();
        let v = PotentialField::<T>::from_modes(grid, &cfg.modes).values;
        Self::new(cfg.kind, grid, v)
    }

    pub fn grid(&self) -> TorusGrid {
        self.sp.grid()
    }

    /// `v + u`.
    pub fn total_potential(&self, u: &[T]) -> Vec<T> {
        self.background.iter().zip(u).map(|(&a, &b)| a + b).collect()
    }

    /// Metric `h̃` of `ω + i∂∂̄u`.
    pub fn metric(&self, u: &[T]) -> Result<HermitianField<T>, KahlerError> {
        metric_from_potential(&self.sp, &self.total_potential(u))
    }

    /// `ρ = e^{−2 log|Ω|_ω} det h̃ / det h`.
    pub fn rho(&self, h: &HermitianField<T>) -> Result<Vec<T>, FlowError> {
        let n = h.n();
        let rho: Vec<T> = h
            .h
            .par_iter()
            .enumerate()
            .map(|(i, a)| {
                let s = self.bg_norm[i];
                herm_det(a, n) / self.bg_det[i] / (s * s)
            })
            .collect();
        if let Some((index, r)) = rho.iter().enumerate().find(|(_, &r)| !(r > T::lit(RHO_FLOOR))) {
            return Err(FlowError::Degenerate { index, rho: Real::to_f64(*r) });
        }
        Ok(rho)
    }

    pub fn eval(&self, u: &[T], t: f64) -> Result<FlowEval<T>, FlowError> {
        let h = self.metric(u).map_err(|source| FlowError::Positivity { t, source })?;
        let rho = self.rho(&h)?;
        let dudt = rho.iter().map(|&r| self.kind.speed(r)).collect();
        Ok(FlowEval { h, rho, dudt })
    }

    /// `du/dt` at `u`.
    pub fn rhs(&self, u: &[T]) -> Result<Vec<T>, FlowError> {
        Ok(self.eval(u, f64::NAN)?.dudt)
    }

    /// 2/3-filtered copy of a field.
    pub fn filter(&self, f: &[T]) -> Vec<T> {
        let mut s = self.sp.forward(f);
        self.sp.dealias(&mut s);
        self.sp.inverse_real(&s)
    }

    /// Stiffness bound `Λ = sup H'(ρ)ρ · 2π² λ_max(h̃⁻¹) |k|²_max`.
    pub fn stiffness(&self, e: &FlowEval<T>) -> f64 {
        let mins = e.h.min_eigenvalues();
        let two_pi2 = 2.0 * std::f64::consts::PI * std::f64::consts::PI;
        e.rho
            .iter()
            .zip(&mins)
            .map(|(&r, &l)| self.kind.stiffness(r).to_f64() / l.to_f64())
            .fold(0.0, f64::max)
            * two_pi2
            * self.k2max
    }

    /// Largest stable step for the state described by `e`.
    pub fn stable_dt(&self, e: &FlowEval<T>, safety: f64) -> f64 {
        let lam = self.stiffness(e);
        if lam > 0.0 {
            RK4_STABILITY * safety / lam
        } else {
            f64::INFINITY
        }
    }

    /// One classical Runge–Kutta step with dealiased stage derivatives.
    pub fn rk4(&self, u: &[T], t: f64, dt: f64) -> Result<Vec<T>, FlowError> {
        let e = self.eval(u, t)?;
        Ok(self.rk4_from(u, &e, t, dt)?.0)
    }

    /// RK4 step from a state whose evaluation is already known; also
    /// returns the evaluation of the new state.
    pub fn rk4_from(&self, u: &[T], e: &FlowEval<T>, t: f64, dt: f64) -> Result<(Vec<T>, FlowEval<T>), FlowError> {
        let h = T::lit(dt);
        let half = T::lit(0.5 * dt);
        let axpy = |c: T, k: &[T]| -> Vec<T> { u.iter().zip(k).map(|(&a, &b)| a + c * b).collect() };
        let k1 = self.filter(&e.dudt);
        let k2 = self.filter(&self.eval(&axpy(half, &k1), t + 0.5 * dt)?.dudt);
        let k3 = self.filter(&self.eval(&axpy(half, &k2), t + 0.5 * dt)?.dudt);
        let k4 = self.filter(&self.eval(&axpy(h, &k3), t + dt)?.dudt);
        let sixth = h / T::lit(6.0);
        let out: Vec<T> = (0..u.len())
            .map(|i| u[i] + sixth * (k1[i] + T::lit(2.0) * (k2[i] + k3[i]) + k4[i]))
            .collect();
        let next = self.eval(&out, t + dt)?;
        Ok((out, next))
    }

    /// RK4 step that halves `dt` on positivity failure; returns the new
    /// state, its evaluation and the step actually taken.
    pub fn step(
        &self,
        u: &[T],
        e: &FlowEval<T>,
        t: f64,
        dt: f64,
        max_halvings: u32,
    ) -> Result<(Vec<T>, FlowEval<T>, f64), FlowError> {
        let mut dt = dt;
        for _ in 0..=max_halvings {
            match self.rk4_from(u, e, t, dt) {
                Ok((v, next)) => return Ok((v, next, dt)),
                Err(FlowError::Positivity { .. } | FlowError::Degenerate { .. }) => dt *= 0.5,
                Err(err) => return Err(err),
            }
        }
        Err(FlowError::StepUnderflow { t, dt })
    }

    /// `ũ = u − ∫u ω^n / ∫ω^n`.
    pub fn normalize(&self, u: &[T]) -> Vec<T> {
        let w: Vec<T> = u.iter().zip(&self.bg_det).map(|(&a, &d)| a * d).collect();
        let c = mean(&w) / mean(&self.bg_det);
        u.iter().map(|&a| a - c).collect()
    }

    /// `‖ω̃^n − c₀|Ω|²_ω ω^n‖_∞ / ‖ω^n‖_∞` with `c₀ = ∫ω^n / ∫|Ω|²_ω ω^n`.
    pub fn limit_residual(&self, h: &HermitianField<T>) -> T {
        let weighted: Vec<T> = self.bg_det.iter().zip(&self.bg_norm).map(|(&d, &s)| s * s * d).collect();
        let c0 = mean(&self.bg_det) / mean(&weighted);
        let det = h.det();
        let top = det.iter().zip(&weighted).fold(T::zero(), |m, (&a, &w)| m.max(abs(a - c0 * w)));
        top / self.bg_det.iter().fold(T::zero(), |m, &d| m.max(abs(d)))
    }

    pub fn record(&self, e: &FlowEval<T>, t: f64) -> TraceRecord {
        let norm = e.h.omega_norm();
        let m = mean(&e.dudt);
        TraceRecord {
            t,
            osc_norm: oscillation(&norm).to_f64(),
            min_eig: e.h.min_eigenvalue().to_f64(),
            volume: e.h.volume().to_f64(),
            limit_residual: self.limit_residual(&e.h).to_f64(),
            dudt_osc: oscillation(&e.dudt).to_f64(),
            dudt_dev: e.dudt.iter().fold(T::zero(), |a, &x| a.max(abs(x - m))).to_f64(),
            dist_flat: e.h.distance_to_flat().to_f64(),
            dt: 0.0,
        }
    }
}

/// Mutable state of a run: time, step count and the potential `u`.
#[derive(Clone, Debug)]
pub struct FlowState<T: Real> {
    pub t: f64,
    pub steps: usize,
    pub u: Vec<T>,
    eval: Option<FlowEval<T>>,
}

impl<T: Real> FlowState<T> {
    pub fn initial(grid: TorusGrid) -> Self {
        Self::at(0.0, 0, vec![T::zero(); grid.len()])
    }

    pub fn at(t: f64, steps: usize, u: Vec<T>) -> Self {
        Self { t, steps, u, eval: None }
    }
}

/// Outcome of one call to [`Flow::advance`].
pub enum Advance {
    Stepped,
    Converged,
    ReachedTmax,
}

/// A configured flow with its run loop.
pub struct Flow<T: Real> {
    pub config: FlowConfig,
    pub problem: PotentialFlow<T>,
}

impl<T: Real> Flow<T> {
    pub fn new(config: FlowConfig) -> Result<Self, FlowError> {
        let problem = PotentialFlow::from_config(&config)?;
        Ok(Self { config, problem })
    }

    /// Step size the run takes from `e`.
    pub fn next_dt(&self, e: &FlowEval<T>, t: f64) -> f64 {
        let dt = self.config.dt.min(self.problem.stable_dt(e, self.config.safety));
        dt.min(self.config.tmax - t)
    }

    /// Records the current state and takes one step unless the run is over.
    pub fn advance(&self, state: &mut FlowState<T>, trace: &mut FlowTrace) -> Result<Advance, FlowError> {
        let e = match state.eval.take() {
            Some(e) => e,
            None => self.problem.eval(&state.u, state.t)?,
        };
        let mut rec = self.problem.record(&e, state.t);
        if rec.dudt_dev <= self.config.conv_tol {
            trace.records.push(rec);
            trace.converged = true;
            return Ok(Advance::Converged);
        }
        if state.t >= self.config.tmax {
            trace.records.push(rec);
            return Ok(Advance::ReachedTmax);
        }
        let dt = self.next_dt(&e, state.t);
        let (u, next, taken) = self.problem.step(&state.u, &e, state.t, dt, self.config.max_halvings)?;
        rec.dt = taken;
        trace.records.push(rec);
        state.u = u;
        state.eval = Some(next);
        state.t += taken;
        state.steps += 1;
        Ok(Advance::Stepped)
    }

    /// Runs from `state` until convergence or `tmax`, calling `observe`
    /// after every step.
    pub fn run_from(
        &self,
        state: &mut FlowState<T>,
        trace: &mut FlowTrace,
        mut observe: impl FnMut(&FlowState<T>, &FlowTrace) -> std::io::Result<()>,
    ) -> Result<(), FlowError> {
        trace.kind = Some(self.config.kind);
        loop {
            match self.advance(state, trace)? {
                Advance::Stepped => {
                    observe(state, trace).map_err(|e| FlowError::Config(format!("observer failed: {e}")))?;
                }
                Advance::Converged | Advance::ReachedTmax => return Ok(()),
            }
        }
    }

    pub fn run(&self) -> Result<(FlowState<T>, FlowTrace), FlowError> {
        let mut state = FlowState::initial(self.problem.grid());
        let mut trace = FlowTrace::default();
        self.run_from(&mut state, &mut trace, |_, _| Ok(()))?;
        Ok((state, trace))
    }
}

#[cfg(test)]
mod tests;
