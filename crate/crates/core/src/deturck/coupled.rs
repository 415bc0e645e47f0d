use serde::Serialize;

use super::pullback::{pull_back, PulledBack};
use super::track::{coupled_step_with, gauge_field, CoupledState};
use super::DeturckError;
use crate::flows::PotentialFlow;
use crate::forms7::{psi_of, PhiConvention, PointForm};
use crate::g2_product::{
    assemble_phi, assemble_psi, driving_function, torsion_field, AnsatzFields, AnsatzMode, FormField, KahlerData,
};
use crate::linalg::SmallMat;
use crate::scalar::Real;
use crate::torus_cy::kahler::{real_hessian, real_metric, real_two_form};
use crate::torus_cy::{HermitianField, Spectral};

/// Residuals of `(dω_t/dt, dΩ_t/dt)` against the right-hand sides of the
/// coupled system.
#[derive(Clone, Debug, Serialize)]
pub struct CoupledReport {
    pub time: f64,
    pub residual_omega: f64,
    #[serde(rename = "residual_Omega")]
    pub residual_big_omega: f64,
    pub mode: AnsatzMode,
    pub tolerance: f64,
    pub pass: bool,
}

impl CoupledReport {
    fn new(time: f64, residual_omega: f64, residual_big_omega: f64, mode: AnsatzMode, tolerance: f64) -> Self {
        let pass = residual_omega <= tolerance && residual_big_omega <= tolerance;
        Self { time, residual_omega, residual_big_omega, mode, tolerance, pass }
    }
}

fn gradient_with<T: Real>(sp: &Spectral<T>, metric: &[SmallMat<T>], f: &[T]) -> Vec<Vec<T>> {
    let df = sp.gradient(f);
    let dims = df.len();
    let mut v = vec![vec![T::zero(); f.len()]; dims];
    for (i, g) in metric.iter().enumerate() {
        let ginv = g.inverse().expect("metric must be invertible");
        for a in 0..dims {
            let mut s = T::zero();
            for b in 0..dims {
                s = s + ginv[(a, b)] * df[b][i];
            }
            v[a][i] = s;
        }
    }
    v
}

/// Right-hand sides `(dω/dt, dReΩ/dt, dImΩ/dt)`:
/// flow `(2L_{∇_h s}ω, −L_{∇_h s}Ω)` with `s = |Ω|^{−2/3}`,
/// coflow `(−L_{∇_h ℓ}ω, L_{∇_h ℓ}Ω)` with `ℓ = log|Ω|`.
fn coupled_rhs<T: Real>(
    sp: &Spectral<T>,
    mode: AnsatzMode,
    d: &KahlerData<T>,
    metric: &[SmallMat<T>],
) -> [FormField<T>; 3] {
    let v = gradient_with(sp, metric, &driving_function(&d.norm, mode));
    let half = T::lit(0.5);
    let (cw, co) = match mode {
        AnsatzMode::Flow => (T::one(), -half),
        AnsatzMode::Coflow => (-half, half),
    };
    [d.omega.lie(sp, &v).scale(cw), d.re_omega.lie(sp, &v).scale(co), d.im_omega.lie(sp, &v).scale(co)]
}

/// `i∂∂̄f` as a real 2-form.
fn ddbar_form<T: Real>(sp: &Spectral<T>, f: &[T]) -> FormField<T> {
    let grid = sp.grid();
    let n = grid.n;
    let hf = HermitianField::from_hessian(grid, &real_hessian(sp, &sp.forward(f)), T::lit(2.0));
    let id = real_two_form(&crate::torus_cy::kahler::identity_herm::<T>(n), n);
    FormField::from_points(grid, 0, 2, |i| real_two_form(&hf.h[i], n) - id)
}

fn sup_diff<T: Real>(a: &FormField<T>, b: &FormField<T>) -> f64 {
    a.max_abs_diff(b).to_f64()
}

/// Analytic check at `t = 0`, where `Θ₀ = id`:
/// `d/dt Θ*ω̃ = i∂∂̄(du/dt) + L_Y ω̃` and `d/dt Θ*Ω = L_Y Ω`.
pub fn verify_coupled_initial<T: Real>(flow: &PotentialFlow<T>, mode: AnsatzMode) -> Result<CoupledReport, DeturckError> {
    let sp = &flow.sp;
    let grid = sp.grid();
    let e = flow.eval(&vec![T::zero(); grid.len()], 0.0)?;
    let d = KahlerData::from_metric(&e.h);
    let y = gauge_field(sp, &e.h, mode);
    let metric: Vec<SmallMat<T>> = e.h.h.iter().map(|a| real_metric(a, grid.n)).collect();
    let [rw, rre, rim] = coupled_rhs(sp, mode, &d, &metric);
    let lw = ddbar_form(sp, &e.dudt) + d.omega.lie(sp, &y);
    let lre = d.re_omega.lie(sp, &y);
    let lim = d.im_omega.lie(sp, &y);
    Ok(CoupledReport::new(0.0, sup_diff(&lw, &rw), sup_diff(&lre, &rre).max(sup_diff(&lim, &rim)), mode, 1e-6))
}

/// States at `t ± δ`, `t ± 2δ` of the unfiltered coupled system, in the
/// order `[−2δ, −δ, +δ, +2δ]`.
fn stencil<T: Real>(
    flow: &PotentialFlow<T>,
    mode: AnsatzMode,
    s: &CoupledState<T>,
    delta: f64,
) -> Result<[CoupledState<T>; 4], DeturckError> {
    let step = |x: &CoupledState<T>, dt: f64| coupled_step_with(flow, mode, x, dt, false).map(|r| r.0);
    let m1 = step(s, -delta)?;
    let m2 = step(&m1, -delta)?;
    let p1 = step(s, delta)?;
    let p2 = step(&p1, delta)?;
    Ok([m2, m1, p1, p2])
}

fn pulled<T: Real>(flow: &PotentialFlow<T>, s: &CoupledState<T>) -> Result<PulledBack<T>, DeturckError> {
    Ok(pull_back(flow, &s.u, &s.x, &s.displacement(flow.grid()))?)
}

/// Fourth-order central difference from values at `[−2δ, −δ, +δ, +2δ]`.
fn central<T: Real>(f: [&FormField<T>; 4], delta: f64) -> FormField<T> {
    let mut out = f[0].clone().scale(T::lit(1.0));
    out.axpy(T::lit(-8.0), f[1]);
    out.axpy(T::lit(8.0), f[2]);
    out.axpy(T::lit(-1.0), f[3]);
    out.scale(T::lit(1.0 / (12.0 * delta)))
}

/// Finite-difference check of the coupled system for `(Θ_t*ω̃_t, Θ_t*Ω)`
/// at the state `s`.
pub fn verify_coupled<T: Real>(
    flow: &PotentialFlow<T>,
    mode: AnsatzMode,
    s: &CoupledState<T>,
    delta: f64,
) -> Result<CoupledReport, DeturckError> {
    let sp = &flow.sp;
    let st = stencil(flow, mode, s, delta)?;
    let pbs = st.iter().map(|x| pulled(flow, x)).collect::<Result<Vec<_>, _>>()?;
    let here = pulled(flow, s)?;
    let [rw, rre, rim] = coupled_rhs(sp, mode, &here.kahler_data(), &here.metric);
    let fd = |sel: fn(&PulledBack<T>) -> &FormField<T>| central([sel(&pbs[0]), sel(&pbs[1]), sel(&pbs[2]), sel(&pbs[3])], delta);
    let dw = fd(|p| &p.omega);
    let dre = fd(|p| &p.re_omega);
    let dim = fd(|p| &p.im_omega);
    Ok(CoupledReport::new(s.t, sup_diff(&dw, &rw), sup_diff(&dre, &rre).max(sup_diff(&dim, &rim)), mode, 1e-4))
}

/// Comparison of `d/dτ` of the pulled-back ansatz form at `t = 0` with its
/// Hodge Laplacian, where `τ = t/2`.
#[derive(Clone, Debug, Serialize)]
pub struct G2EquivalenceReport {
    pub mode: AnsatzMode,
    /// `sup |2 d/dt Θ*φ_t − Δφ|` (flow) or the same for `ψ` (coflow).
    pub residual: f64,
    pub laplacian_sup: f64,
    /// Least-squares `c` in `d/dt Θ*φ_t ≈ c Δφ`.
    pub time_ratio: f64,
    pub tolerance: f64,
    pub pass: bool,
}

fn evolving<T: Real>(p: &PulledBack<T>, mode: AnsatzMode) -> FormField<T> {
    let d = p.kahler_data();
    match mode {
        AnsatzMode::Flow => assemble_phi(&d, mode),
        AnsatzMode::Coflow => assemble_psi(&d, mode),
    }
}

fn dot<T: Real>(a: &FormField<T>, b: &FormField<T>) -> f64 {
    a.blades()
        .iter()
        .filter_map(|&bl| Some((a.component(bl)?, b.component(bl)?)))
        .map(|(x, y)| x.iter().zip(y).map(|(&p, &q)| (p * q).to_f64()).sum::<f64>())
        .sum()
}

pub fn verify_g2_equivalence<T: Real>(
    flow: &PotentialFlow<T>,
    mode: AnsatzMode,
    delta: f64,
) -> Result<G2EquivalenceReport, DeturckError> {
    let sp = &flow.sp;
    let s = CoupledState::initial(sp.grid());
    let st = stencil(flow, mode, &s, delta)?;
    let forms = st.iter().map(|x| Ok(evolving(&pulled(flow, x)?, mode))).collect::<Result<Vec<_>, DeturckError>>()?;
    let ddt = central([&forms[0], &forms[1], &forms[2], &forms[3]], delta);
    let a = AnsatzFields::from_potential(sp, &flow.background, mode)
        .map_err(|source| crate::flows::FlowError::Positivity { t: 0.0, source })?;
    let lap = a.star().laplacian(sp, &a.evolving_form());
    let residual = sup_diff(&ddt.clone().scale(T::lit(2.0)), &lap);
    let ll = dot(&lap, &lap);
    let time_ratio = if ll > 0.0 { dot(&ddt, &lap) / ll } else { f64::NAN };
    let tolerance = 1e-4;
    Ok(G2EquivalenceReport {
        mode,
        residual,
        laplacian_sup: lap.max_abs().to_f64(),
        time_ratio,
        tolerance,
        pass: residual <= tolerance,
    })
}

/// Largest torsion component of the ansatz 3-form built from the
/// pulled-back limit data, with `⋆φ` computed pointwise.
pub fn limit_torsion<T: Real>(
    flow: &PotentialFlow<T>,
    mode: AnsatzMode,
    u: &[T],
    x: &[[T; 6]],
) -> Result<f64, DeturckError> {
    let p = pull_back(flow, u, x, &CoupledState { t: 0.0, u: u.to_vec(), x: x.to_vec() }.displacement(flow.grid()))?;
    let phi = assemble_phi(&p.kahler_data(), mode);
    let psi = phi.map_points(4, |_, f: PointForm<T>| psi_of(&f, PhiConvention::Flow).expect("ansatz 3-form must be definite"));
    Ok(torsion_field(&flow.sp, &phi, &psi).max_abs().to_f64())
}
