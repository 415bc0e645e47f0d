//! Assembly of the product 3- and 4-forms from Kähler data on the torus.

use super::form_field::FormField;
use super::star::{circles_for, ProductStar};
use super::AnsatzMode;
use crate::forms7::PointForm;
use crate::scalar::Real;
use crate::torus_cy::kahler::{herm_inverse, real_metric, real_two_form};
use crate::torus_cy::{metric_from_potential, HermitianField, KahlerError, Spectral, TorusGrid};

/// Kähler form, holomorphic volume form and `|Ω|_ω` on the torus factor.
#[derive(Clone, Debug)]
pub struct KahlerData<T> {
    pub grid: TorusGrid,
    pub omega: FormField<T>,
    pub re_omega: FormField<T>,
    pub im_omega: FormField<T>,
    pub norm: Vec<T>,
}

/// Real and imaginary parts of `dz^1 ∧ … ∧ dz^n` on axes `(x_1, y_1, …)`.
pub fn holomorphic_volume<T: Real>(n: usize) -> (PointForm<T>, PointForm<T>) {
    let dim = 2 * n;
    let mut re = PointForm::scalar(dim, T::one());
    let mut im = PointForm::scalar(dim, T::zero());
    for p in 0..n {
        let dx = PointForm::basis(dim, &[2 * p]);
        let dy = PointForm::basis(dim, &[2 * p + 1]);
        let r = re.wedge(&dx) - im.wedge(&dy);
        let i = re.wedge(&dy) + im.wedge(&dx);
        re = r;
        im = i;
    }
    (re, im)
}

impl<T: Real> KahlerData<T> {
    /// Data of `(ω₀ + i∂∂̄w, dz^1 ∧ … ∧ dz^n)`.
    pub fn from_metric(h: &HermitianField<T>) -> Self {
        let grid = h.grid;
        let n = grid.n;
        let omega = FormField::from_points(grid, 0, 2, |i| real_two_form(&h.h[i], n));
        let (re, im) = holomorphic_volume::<T>(n);
        Self {
            grid,
            omega,
            re_omega: FormField::constant(grid, 0, &re),
            im_omega: FormField::constant(grid, 0, &im),
            norm: h.omega_norm(),
        }
    }

    pub fn from_potential(sp: &Spectral<T>, w: &[T]) -> Result<(Self, HermitianField<T>), KahlerError> {
        let h = metric_from_potential(sp, w)?;
        Ok((Self::from_metric(&h), h))
    }

    fn norm_pow(&self, e: f64) -> Vec<T> {
        let e = T::lit(e);
        self.norm.iter().map(|&x| x.powf(e)).collect()
    }

    /// `ω²/2` (n = 2) or `ω³/6` (n = 3).
    pub fn volume_form(&self) -> FormField<T> {
        let mut top = self.omega.clone();
        for k in 1..self.grid.n {
            top = top.wedge(&self.omega).scale(T::one() / T::of(k + 1));
        }
        top
    }

    pub fn half_omega_sq(&self) -> FormField<T> {
        self.omega.wedge(&self.omega).scale(T::lit(0.5))
    }
}

fn dr<T: Real>(circles: usize, s: u8, beta: &FormField<T>) -> FormField<T> {
    FormField::dr_wedge(circles, s, beta)
}

fn circle_top<T: Real>(grid: TorusGrid, circles: usize, coeff: &[T]) -> FormField<T> {
    let mut f = FormField::zero(grid, circles, circles);
    f.set_component(((1u16 << circles) - 1) as u8, coeff.to_vec());
    f
}

const R1: u8 = 0b001;
const R2: u8 = 0b010;
const R3: u8 = 0b100;

/// The product 3-form for the given mode.
pub fn assemble_phi<T: Real>(d: &KahlerData<T>, mode: AnsatzMode) -> FormField<T> {
    let n = d.grid.n;
    let m = circles_for(n);
    match (mode, n) {
        (AnsatzMode::Flow, 2) => {
            let ones = vec![T::one(); d.grid.len()];
            -circle_top(d.grid, m, &ones) + dr(m, R1, &d.omega) + dr(m, R2, &d.re_omega) + dr(m, R3, &d.im_omega)
        }
        (AnsatzMode::Flow, 3) => dr(m, 0, &d.re_omega) - dr(m, R1, &d.omega),
        (AnsatzMode::Coflow, 2) => {
            let inv = d.norm_pow(-1.0);
            -circle_top(d.grid, m, &d.norm)
                + dr(m, R1, &d.omega.clone().scale_by(&d.norm))
                + dr(m, R2, &d.re_omega.clone().scale_by(&inv))
                + dr(m, R3, &d.im_omega.clone().scale_by(&inv))
        }
        (AnsatzMode::Coflow, 3) => {
            let inv = d.norm_pow(-1.0);
            dr(m, 0, &d.re_omega.clone().scale_by(&inv)) - dr(m, R1, &d.omega.clone().scale_by(&d.norm))
        }
        _ => unreachable!(),
    }
}

/// Closed-form dual 4-form `⋆φ` of the ansatz.
pub fn assemble_psi<T: Real>(d: &KahlerData<T>, mode: AnsatzMode) -> FormField<T> {
    let n = d.grid.n;
    let m = circles_for(n);
    let half_sq = d.half_omega_sq();
    match (mode, n) {
        (AnsatzMode::Flow, 2) => {
            let a = d.norm_pow(4.0 / 3.0);
            let b = d.norm_pow(-2.0 / 3.0);
            -dr(m, 0, &half_sq.scale_by(&a)) + dr(m, R2 | R3, &d.omega.clone().scale_by(&a))
                - dr(m, R1 | R3, &d.re_omega.clone().scale_by(&b))
                + dr(m, R1 | R2, &d.im_omega.clone().scale_by(&b))
        }
        (AnsatzMode::Flow, 3) => {
            let a = d.norm_pow(4.0 / 3.0);
            let b = d.norm_pow(-2.0 / 3.0);
            -dr(m, R1, &d.im_omega.clone().scale_by(&b)) - dr(m, 0, &half_sq.scale_by(&a))
        }
        (AnsatzMode::Coflow, 2) => {
            -dr(m, 0, &half_sq) + dr(m, R2 | R3, &d.omega) - dr(m, R1 | R3, &d.re_omega) + dr(m, R1 | R2, &d.im_omega)
        }
        (AnsatzMode::Coflow, 3) => -dr(m, R1, &d.im_omega) - dr(m, 0, &half_sq),
        _ => unreachable!(),
    }
}

/// Riemannian gradient `g⁻¹ df` of a function on the torus factor.
pub fn gradient<T: Real>(sp: &Spectral<T>, h: &HermitianField<T>, f: &[T]) -> Vec<Vec<T>> {
    let df = sp.gradient(f);
    let n = h.n();
    let dims = 2 * n;
    let mut v = vec![vec![T::zero(); f.len()]; dims];
    for i in 0..f.len() {
        let ginv = real_metric(&herm_inverse(&h.h[i], n), n);
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

/// Potential whose gradient drives the ansatz: `|Ω|^{-2/3}` for the flow,
/// `log |Ω|` for the coflow.
pub fn driving_function<T: Real>(norm: &[T], mode: AnsatzMode) -> Vec<T> {
    match mode {
        AnsatzMode::Flow => norm.iter().map(|&x| x.powf(T::lit(-2.0 / 3.0))).collect(),
        AnsatzMode::Coflow => norm.iter().map(|&x| x.ln()).collect(),
    }
}

/// Forms `B` with `Δ_d φ = L_V B` (flow) or `Δ_d ψ = L_W B` (coflow), and
/// torsion `τ₂ = V ⨼ B'` or `τ₃ = W ⨼ B'`; returns `(B, B')`.
pub fn lemma_brackets<T: Real>(d: &KahlerData<T>, mode: AnsatzMode) -> (FormField<T>, FormField<T>) {
    let n = d.grid.n;
    let m = circles_for(n);
    let two = T::lit(2.0);
    match (mode, n) {
        (AnsatzMode::Flow, 2) => {
            let b = dr(m, R1, &d.omega).scale(two) - dr(m, R2, &d.re_omega) - dr(m, R3, &d.im_omega);
            let t = -b.clone();
            (b, t)
        }
        (AnsatzMode::Flow, 3) => {
            let b = -dr(m, 0, &d.re_omega) - dr(m, R1, &d.omega).scale(two);
            let t = -b.clone();
            (b, t)
        }
        (AnsatzMode::Coflow, 2) => {
            let b = dr(m, 0, &d.half_omega_sq()) - dr(m, R2 | R3, &d.omega) - dr(m, R1 | R3, &d.re_omega)
                + dr(m, R1 | R2, &d.im_omega);
            (b.clone(), b)
        }
        (AnsatzMode::Coflow, 3) => {
            let b = -dr(m, R1, &d.im_omega) + dr(m, 0, &d.half_omega_sq());
            (b.clone(), b)
        }
        _ => unreachable!(),
    }
}

/// Everything needed to evaluate the ansatz at one instant.
pub struct AnsatzFields<T: Real> {
    pub mode: AnsatzMode,
    pub data: KahlerData<T>,
    pub h: HermitianField<T>,
}

impl<T: Real> AnsatzFields<T> {
    pub fn from_potential(sp: &Spectral<T>, w: &[T], mode: AnsatzMode) -> Result<Self, KahlerError> {
        let (data, h) = KahlerData::from_potential(sp, w)?;
        Ok(Self { mode, data, h })
    }

    pub fn star(&self) -> ProductStar<'_, T> {
        ProductStar::new(self.mode, &self.h, &self.data.norm)
    }

    pub fn phi(&self) -> FormField<T> {
        assemble_phi(&self.data, self.mode)
    }

    pub fn psi(&self) -> FormField<T> {
        assemble_psi(&self.data, self.mode)
    }

    /// The evolving form: `φ` for the flow, `ψ` for the coflow.
    pub fn evolving_form(&self) -> FormField<T> {
        match self.mode {
            AnsatzMode::Flow => self.phi(),
            AnsatzMode::Coflow => self.psi(),
        }
    }

    /// `∇_g` of the driving function.
    pub fn driving_gradient(&self, sp: &Spectral<T>) -> Vec<Vec<T>> {
        gradient(sp, &self.h, &driving_function(&self.data.norm, self.mode))
    }
}
