use rayon::prelude::*;

use crate::forms7::basis::{self, Blade};
use crate::forms7::PointForm;
use crate::scalar::{abs, Real};
use crate::torus_cy::{Spectral, TorusGrid, C};

/// Differential form field on `T^m × T^{2n}`, constant along the `m`
/// circle factors (`m ∈ {0, 1, 3}`), sampled on the grid of `T^{2n}`.
///
/// Form axes `0..m` are the circle coordinates; axis `m + a` is grid axis
/// `a`. Components are kept per blade; `None` marks an identically zero
/// component.
#[derive(Clone, Debug)]
pub struct FormField<T> {
    pub grid: TorusGrid,
    pub circles: usize,
    pub degree: usize,
    comps: Vec<Option<Vec<T>>>,
}

impl<T: Real> FormField<T> {
    pub fn zero(grid: TorusGrid, circles: usize, degree: usize) -> Self {
        let dim = circles + grid.dims();
        assert!(dim <= basis::MAX_DIM, "total dimension {dim} exceeds 7");
        assert!(degree <= dim);
        Self { grid, circles, degree, comps: vec![None; basis::count(dim, degree)] }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.circles + self.grid.dims()
    }

    pub fn blades(&self) -> &'static [Blade] {
        basis::blades(self.dim(), self.degree)
    }

    pub fn component(&self, b: Blade) -> Option<&[T]> {
        self.comps[basis::index_of(self.dim(), b)].as_deref()
    }

    pub fn set_component(&mut self, b: Blade, v: Vec<T>) {
        assert_eq!(v.len(), self.grid.len());
        let i = basis::index_of(self.dim(), b);
        self.comps[i] = Some(v);
    }

    fn add_to_component(&mut self, b: Blade, v: &[T], c: T) {
        let i = basis::index_of(self.dim(), b);
        match &mut self.comps[i] {
            Some(dst) => dst.iter_mut().zip(v).for_each(|(d, &x)| *d = *d + c * x),
            None => self.comps[i] = Some(v.iter().map(|&x| c * x).collect()),
        }
    }

    /// Constant field.
    pub fn constant(grid: TorusGrid, circles: usize, f: &PointForm<T>) -> Self {
        assert_eq!(f.dim(), circles + grid.dims());
        let mut out = Self::zero(grid, circles, f.degree());
        for (i, &c) in f.coeffs().iter().enumerate() {
            if c != T::zero() {
                out.comps[i] = Some(vec![c; grid.len()]);
            }
        }
        out
    }

    /// Field sampled from a pointwise constructor.
    pub fn from_points(grid: TorusGrid, circles: usize, degree: usize, f: impl Fn(usize) -> PointForm<T> + Sync + Send) -> Self {
        let pts: Vec<PointForm<T>> = (0..grid.len()).into_par_iter().map(f).collect();
        Self::from_point_vec(grid, circles, degree, &pts)
    }

    pub fn from_point_vec(grid: TorusGrid, circles: usize, degree: usize, pts: &[PointForm<T>]) -> Self {
        let mut out = Self::zero(grid, circles, degree);
        let nb = out.comps.len();
        for j in 0..nb {
            if pts.iter().any(|p| {
                debug_assert_eq!(p.degree(), degree);
                p.coeffs()[j] != T::zero()
            }) {
                out.comps[j] = Some(pts.iter().map(|p| p.coeffs()[j]).collect());
            }
        }
        out
    }

    pub fn point(&self, i: usize) -> PointForm<T> {
        let mut f = PointForm::zero(self.dim(), self.degree);
        let c = f.coeffs_mut();
        for (j, comp) in self.comps.iter().enumerate() {
            if let Some(v) = comp {
                c[j] = v[i];
            }
        }
        f
    }

    pub fn points(&self) -> Vec<PointForm<T>> {
        (0..self.grid.len()).into_par_iter().map(|i| self.point(i)).collect()
    }

    /// Applies a pointwise map.
    pub fn map_points(&self, degree: usize, f: impl Fn(usize, PointForm<T>) -> PointForm<T> + Sync + Send) -> Self {
        let pts: Vec<PointForm<T>> = (0..self.grid.len()).into_par_iter().map(|i| f(i, self.point(i))).collect();
        Self::from_point_vec(self.grid, self.circles, degree, &pts)
    }

    pub fn is_zero_component(&self, j: usize) -> bool {
        self.comps[j].is_none()
    }

    pub fn max_abs(&self) -> T {
        self.comps.iter().flatten().fold(T::zero(), |m, v| v.iter().fold(m, |m, &x| m.max(abs(x))))
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        (self.clone() - other.clone()).max_abs()
    }

    pub fn scale(mut self, c: T) -> Self {
        for v in self.comps.iter_mut().flatten() {
            v.iter_mut().for_each(|x| *x = *x * c);
        }
        self
    }

    /// Pointwise product with a scalar field.
    pub fn scale_by(mut self, f: &[T]) -> Self {
        for v in self.comps.iter_mut().flatten() {
            v.iter_mut().zip(f).for_each(|(x, &s)| *x = *x * s);
        }
        self
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!((self.grid, self.circles), (other.grid, other.circles));
        let dim = self.dim();
        let deg = self.degree + other.degree;
        if deg > dim {
            return Self::zero(self.grid, self.circles, dim);
        }
        let mut out = Self::zero(self.grid, self.circles, deg);
        let len = self.grid.len();
        for (i, &a) in self.blades().iter().enumerate() {
            let Some(va) = &self.comps[i] else { continue };
            for (j, &b) in other.blades().iter().enumerate() {
                let Some(vb) = &other.comps[j] else { continue };
                let s = basis::wedge_sign(a, b);
                if s == 0 {
                    continue;
                }
                let prod: Vec<T> = (0..len).map(|p| va[p] * vb[p]).collect();
                out.add_to_component(a | b, &prod, T::lit(s as f64));
            }
        }
        out
    }

    /// `V ⨼ α` for a vector field tangent to the torus factor, given by its
    /// grid-axis components.
    pub fn interior(&self, v: &[Vec<T>]) -> Self {
        assert!(self.degree > 0);
        assert_eq!(v.len(), self.grid.dims());
        let mut out = Self::zero(self.grid, self.circles, self.degree - 1);
        let len = self.grid.len();
        for (j, &b) in self.blades().iter().enumerate() {
            let Some(vb) = &self.comps[j] else { continue };
            for (a, va) in v.iter().enumerate() {
                let axis = self.circles + a;
                let s = basis::interior_sign(axis, b);
                if s == 0 {
                    continue;
                }
                let prod: Vec<T> = (0..len).map(|p| va[p] * vb[p]).collect();
                out.add_to_component(b & !(1 << axis), &prod, T::lit(s as f64));
            }
        }
        out
    }

    /// Exterior derivative; circle coordinates do not enter the coefficients.
    pub fn d(&self, sp: &Spectral<T>) -> Self {
        let dim = self.dim();
        if self.degree == dim {
            return Self::zero(self.grid, self.circles, dim);
        }
        let nout = basis::count(dim, self.degree + 1);
        let mut acc: Vec<Option<Vec<C<T>>>> = vec![None; nout];
        let inputs: Vec<(Blade, &[T])> = self
            .blades()
            .iter()
            .zip(&self.comps)
            .filter_map(|(&b, c)| c.as_deref().map(|v| (b, v)))
            .collect();
        let specs = sp.forward_many(&inputs.iter().map(|(_, v)| *v).collect::<Vec<_>>());
        for ((b, _), s) in inputs.iter().zip(&specs) {
            for a in 0..self.grid.dims() {
                let axis = self.circles + a;
                let bit = 1u8 << axis;
                if b & bit != 0 {
                    continue;
                }
                let sign = T::lit(basis::wedge_sign(bit, *b) as f64);
                let ds = sp.derivative_spectrum(s, &[a]);
                let k = basis::index_of(dim, b | bit);
                match &mut acc[k] {
                    Some(dst) => dst.iter_mut().zip(&ds).for_each(|(d, &x)| *d = *d + x * sign),
                    None => acc[k] = Some(ds.into_iter().map(|x| x * sign).collect()),
                }
            }
        }
        let which: Vec<usize> = (0..nout).filter(|&k| acc[k].is_some()).collect();
        let specs: Vec<Vec<C<T>>> = which.iter().map(|&k| acc[k].take().unwrap()).collect();
        let fields = sp.inverse_real_many(&specs);
        let mut out = Self::zero(self.grid, self.circles, self.degree + 1);
        for (k, f) in which.into_iter().zip(fields) {
            out.comps[k] = Some(f);
        }
        out
    }

    /// Lie derivative `L_V α = d(V⨼α) + V⨼dα` along a torus vector field.
    pub fn lie(&self, sp: &Spectral<T>, v: &[Vec<T>]) -> Self {
        let mut out = if self.degree < self.dim() {
            self.d(sp).interior(v)
        } else {
            Self::zero(self.grid, self.circles, self.degree)
        };
        if self.degree > 0 {
            out = out + self.interior(v).d(sp);
        }
        out
    }

    /// Coefficient form of `dr^S`: the torus form `β_S` with
    /// `α = Σ_S dr^S ∧ β_S`; `None` when the degrees cannot fit.
    pub fn circle_component(&self, s: Blade) -> Option<FormField<T>> {
        let m = self.circles;
        assert!(s < (1 << m), "circle blade out of range");
        let ks = basis::degree(s);
        if ks > self.degree || self.degree - ks > self.grid.dims() {
            return None;
        }
        let mut out = FormField::zero(self.grid, 0, self.degree - ks);
        let cmask: Blade = ((1u16 << m) - 1) as Blade;
        for (j, &b) in self.blades().iter().enumerate() {
            if b & cmask != s {
                continue;
            }
            let Some(v) = &self.comps[j] else { continue };
            let k = basis::index_of(out.dim(), b >> m);
            out.comps[k] = Some(v.clone());
        }
        Some(out)
    }

    /// `dr^S ∧ β` for a torus form `β`.
    pub fn dr_wedge(circles: usize, s: Blade, beta: &FormField<T>) -> Self {
        assert_eq!(beta.circles, 0);
        let ks = basis::degree(s);
        let mut out = Self::zero(beta.grid, circles, ks + beta.degree);
        for (j, &b) in beta.blades().iter().enumerate() {
            let Some(v) = &beta.comps[j] else { continue };
            let k = basis::index_of(out.dim(), s | (b << circles));
            out.comps[k] = Some(v.clone());
        }
        out
    }

    /// Component-wise linear combination helper.
    pub fn axpy(&mut self, c: T, other: &Self) {
        assert_eq!((self.grid, self.circles, self.degree), (other.grid, other.circles, other.degree));
        for (j, comp) in other.comps.iter().enumerate() {
            if let Some(v) = comp {
                let b = other.blades()[j];
                self.add_to_component(b, v, c);
            }
        }
    }
}

impl<T: Real> std::ops::Add for FormField<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self.axpy(T::one(), &rhs);
        self
    }
}

impl<T: Real> std::ops::Sub for FormField<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self.axpy(-T::one(), &rhs);
        self
    }
}

impl<T: Real> std::ops::Neg for FormField<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}
