use rayon::prelude::*;
use rustfft::num_complex::Complex;

use crate::flows::{FlowError, PotentialFlow};
use crate::forms7::PointForm;
use crate::g2_product::{holomorphic_volume, FormField, KahlerData};
use crate::linalg::SmallMat;
use crate::scalar::Real;
use crate::torus_cy::kahler::{identity_herm, real_metric, real_two_form, Herm};
use crate::torus_cy::{Pruning, Spectral, TrigInterpolant};

/// `DΘ = I + D(Θ − id)` at every grid point.
pub fn jacobian<T: Real>(sp: &Spectral<T>, displacement: &[Vec<T>]) -> Vec<SmallMat<T>> {
    let dims = displacement.len();
    let grads: Vec<Vec<Vec<T>>> = displacement.iter().map(|d| sp.gradient(d)).collect();
    (0..sp.grid().len())
        .map(|i| SmallMat::from_fn(dims, |a, b| grads[a][b][i] + if a == b { T::one() } else { T::zero() }))
        .collect()
}

/// `|Ω|_g` through `(⟨ReΩ, ReΩ⟩ + ⟨ImΩ, ImΩ⟩)/2^n`.
pub fn omega_norm_of_forms<T: Real>(re: &PointForm<T>, im: &PointForm<T>, g: &SmallMat<T>) -> T {
    let ginv = g.inverse().expect("metric must be invertible");
    let n = re.degree();
    ((re.inner(re, g, &ginv) + im.inner(im, g, &ginv)) / T::of(1 << n)).sqrt()
}

/// `Θ*ω̃`, `Θ*Ω`, `Θ*g̃` and related fields on the grid.
#[derive(Clone, Debug)]
pub struct PulledBack<T: Real> {
    pub omega: FormField<T>,
    pub re_omega: FormField<T>,
    pub im_omega: FormField<T>,
    pub metric: Vec<SmallMat<T>>,
    /// `|Θ*Ω|_{Θ*g̃}` computed from the pulled-back forms.
    pub norm: Vec<T>,
    /// `|Ω|_ω̃ ∘ Θ`.
    pub norm_composed: Vec<T>,
    pub jac_det: Vec<T>,
    /// `Θ*μ / μ` for the top form `μ = ReΩ ∧ ReΩ` (n even) or
    /// `ReΩ ∧ ImΩ` (n odd); equals `det DΘ`.
    pub volume_ratio: Vec<T>,
}

impl<T: Real> PulledBack<T> {
    pub fn kahler_data(&self) -> KahlerData<T> {
        KahlerData {
            grid: self.omega.grid,
            omega: self.omega.clone(),
            re_omega: self.re_omega.clone(),
            im_omega: self.im_omega.clone(),
            norm: self.norm.clone(),
        }
    }

    /// `∫ |Θ*Ω|² vol(Θ*g̃)`, equal to `∫ |Ω|²_ω̃ ω̃ⁿ/n! = 1`.
    pub fn omega_ratio_integral(&self) -> f64 {
        let s: f64 = self.norm.iter().zip(&self.metric).map(|(&r, g)| (r * r * g.det().sqrt()).to_f64()).sum();
        s / self.norm.len() as f64
    }

    /// `sup |ρ_a − ρ_b| / sup ρ` between the two ways of computing `|Ω|`.
    pub fn norm_identity_residual(&self) -> f64 {
        let scale = self.norm.iter().fold(T::zero(), |m, &x| m.max(x)).to_f64();
        self.norm
            .iter()
            .zip(&self.norm_composed)
            .map(|(a, b)| (*a - *b).to_f64().abs())
            .fold(0.0, f64::max)
            / scale
    }
}

fn herm_channels<T: Real>(h: &[Herm<T>], n: usize) -> Vec<Vec<T>> {
    let mut ch = Vec::new();
    for j in 0..n {
        ch.push(h.iter().map(|a| a[j * 3 + j].re).collect());
        for k in j + 1..n {
            ch.push(h.iter().map(|a| a[j * 3 + k].re).collect());
            ch.push(h.iter().map(|a| a[j * 3 + k].im).collect());
        }
    }
    ch
}

fn herm_from_channels<T: Real>(vals: &[Vec<T>], i: usize, n: usize) -> Herm<T> {
    let mut a = identity_herm::<T>(n);
    let mut c = 0;
    for j in 0..n {
        a[j * 3 + j] = Complex::new(vals[c][i], T::zero());
        c += 1;
        for k in j + 1..n {
            let z = Complex::new(vals[c][i], vals[c + 1][i]);
            a[j * 3 + k] = z;
            a[k * 3 + j] = z.conj();
            c += 2;
        }
    }
    a
}

/// Pulls back the Kähler data of `v + u` through `Θ`, given by the marker
/// positions `x = Θ(p)`.
pub fn pull_back<T: Real>(
    flow: &PotentialFlow<T>,
    u: &[T],
    x: &[[T; 6]],
    displacement: &[Vec<T>],
) -> Result<PulledBack<T>, FlowError> {
    let sp = &flow.sp;
    let grid = sp.grid();
    let n = grid.n;
    let h = flow.metric(u).map_err(|source| FlowError::Positivity { t: f64::NAN, source })?;
    let mut channels = herm_channels(&h.h, n);
    channels.push(h.omega_norm());
    let refs: Vec<&[T]> = channels.iter().map(|c| &c[..]).collect();
    let vals = TrigInterpolant::from_fields(sp, &refs, Pruning::DEFAULT).eval_many(x);
    let jac = jacobian(sp, displacement);
    let (re0, im0) = holomorphic_volume::<T>(n);
    let top = |re: &PointForm<T>, im: &PointForm<T>| {
        if n % 2 == 0 {
            re.wedge(re).top_coefficient()
        } else {
            re.wedge(im).top_coefficient()
        }
    };
    let top0 = top(&re0, &im0);
    let pts: Vec<_> = (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let a = herm_from_channels(&vals, i, n);
            let j = &jac[i];
            let g = real_metric(&a, n).congruence(j);
            let w = real_two_form(&a, n).pullback(j);
            let re = re0.pullback(j);
            let im = im0.pullback(j);
            let norm = omega_norm_of_forms(&re, &im, &g);
            let det = j.det();
            let vol = top(&re, &im) / top0;
            (w, re, im, g, norm, det, vol)
        })
        .collect();
    let w: Vec<_> = pts.iter().map(|p| p.0).collect();
    let re: Vec<_> = pts.iter().map(|p| p.1).collect();
    let im: Vec<_> = pts.iter().map(|p| p.2).collect();
    Ok(PulledBack {
        omega: FormField::from_point_vec(grid, 0, 2, &w),
        re_omega: FormField::from_point_vec(grid, 0, n, &re),
        im_omega: FormField::from_point_vec(grid, 0, n, &im),
        metric: pts.iter().map(|p| p.3).collect(),
        norm: pts.iter().map(|p| p.4).collect(),
        norm_composed: vals[channels.len() - 1].clone(),
        jac_det: pts.iter().map(|p| p.5).collect(),
        volume_ratio: pts.iter().map(|p| p.6).collect(),
    })
}
