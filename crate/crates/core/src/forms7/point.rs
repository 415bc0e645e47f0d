use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use super::basis::{self, Blade, MAX_BLADES};
use crate::linalg::SmallMat;
use crate::scalar::{abs, Real};

/// Differential form at a single point, of fixed degree, in dimension ≤ 7.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointForm<T> {
    dim: u8,
    degree: u8,
    coeffs: [T; MAX_BLADES],
}

impl<T: Real> PointForm<T> {
    pub fn zero(dim: usize, degree: usize) -> Self {
        assert!(dim <= basis::MAX_DIM && degree <= dim, "degree {degree} in dimension {dim}");
        Self { dim: dim as u8, degree: degree as u8, coeffs: [T::zero(); MAX_BLADES] }
    }

    /// The constant `c` as a 0-form.
    pub fn scalar(dim: usize, c: T) -> Self {
        let mut f = Self::zero(dim, 0);
        f.coeffs[0] = c;
        f
    }

    /// Basis form for an index sequence (0-based axes, any order).
    pub fn basis(dim: usize, idx: &[usize]) -> Self {
        Self::from_terms(dim, idx.len(), &[(T::one(), idx)])
    }

    /// Sum of `c · e^{i_1} ∧ … ∧ e^{i_k}`.
    pub fn from_terms(dim: usize, degree: usize, terms: &[(T, &[usize])]) -> Self {
        let mut f = Self::zero(dim, degree);
        for (c, idx) in terms {
            assert_eq!(idx.len(), degree, "term degree mismatch");
            let (b, s) = basis::from_indices(idx);
            if s != 0 {
                let i = basis::index_of(dim, b);
                f.coeffs[i] = f.coeffs[i] + *c * T::lit(s as f64);
            }
        }
        f
    }

    pub fn from_coeffs(dim: usize, degree: usize, c: &[T]) -> Self {
        let mut f = Self::zero(dim, degree);
        assert_eq!(c.len(), basis::count(dim, degree));
        f.coeffs[..c.len()].copy_from_slice(c);
        f
    }

    /// Top-degree form with coefficient `c`.
    pub fn top(dim: usize, c: T) -> Self {
        let mut f = Self::zero(dim, dim);
        f.coeffs[0] = c;
        f
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree as usize
    }

    #[inline]
    pub fn len(&self) -> usize {
        basis::count(self.dim(), self.degree())
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn coeffs(&self) -> &[T] {
        &self.coeffs[..self.len()]
    }

    #[inline]
    pub fn coeffs_mut(&mut self) -> &mut [T] {
        let n = self.len();
        &mut self.coeffs[..n]
    }

    #[inline]
    pub fn blades(&self) -> &'static [Blade] {
        basis::blades(self.dim(), self.degree())
    }

    /// Coefficient of an index sequence, including the permutation sign.
    pub fn get(&self, idx: &[usize]) -> T {
        if idx.len() != self.degree() {
            return T::zero();
        }
        let (b, s) = basis::from_indices(idx);
        if s == 0 {
            return T::zero();
        }
        self.coeffs[basis::index_of(self.dim(), b)] * T::lit(s as f64)
    }

    #[inline]
    pub fn get_blade(&self, b: Blade) -> T {
        self.coeffs[basis::index_of(self.dim(), b)]
    }

    #[inline]
    pub fn set_blade(&mut self, b: Blade, v: T) {
        self.coeffs[basis::index_of(self.dim(), b)] = v;
    }

    /// Coefficient of `e^1 ∧ … ∧ e^dim` of a top-degree form.
    pub fn top_coefficient(&self) -> T {
        assert_eq!(self.degree(), self.dim());
        self.coeffs[0]
    }

    pub fn max_abs(&self) -> T {
        self.coeffs().iter().fold(T::zero(), |m, &c| m.max(abs(c)))
    }

    pub fn scale(&self, c: T) -> Self {
        let mut f = *self;
        f.coeffs_mut().iter_mut().for_each(|x| *x = *x * c);
        f
    }

    pub fn wedge(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "wedge of forms in different dimensions");
        let dim = self.dim();
        let deg = self.degree() + other.degree();
        let mut out = Self::zero(dim, deg.min(dim));
        if deg > dim {
            return out;
        }
        let ba = self.blades();
        let bb = other.blades();
        for (i, &a) in ba.iter().enumerate() {
            let ca = self.coeffs[i];
            if ca == T::zero() {
                continue;
            }
            for (j, &b) in bb.iter().enumerate() {
                let s = basis::wedge_sign(a, b);
                if s == 0 {
                    continue;
                }
                let k = basis::index_of(dim, a | b);
                let v = ca * other.coeffs[j];
                out.coeffs[k] = if s > 0 { out.coeffs[k] + v } else { out.coeffs[k] - v };
            }
        }
        out
    }

    /// Contraction `e_i ⨼ self`.
    pub fn interior_basis(&self, i: usize) -> Self {
        assert!(self.degree() > 0, "interior product of a 0-form");
        let dim = self.dim();
        let mut out = Self::zero(dim, self.degree() - 1);
        for (j, &b) in self.blades().iter().enumerate() {
            let s = basis::interior_sign(i, b);
            if s == 0 {
                continue;
            }
            let k = basis::index_of(dim, b & !(1 << i));
            out.coeffs[k] = out.coeffs[k] + T::lit(s as f64) * self.coeffs[j];
        }
        out
    }

    /// Contraction `v ⨼ self` with a vector given by its components.
    pub fn interior(&self, v: &[T]) -> Self {
        let mut out = Self::zero(self.dim(), self.degree().saturating_sub(1));
        if self.degree() == 0 {
            return out;
        }
        for (i, &vi) in v.iter().enumerate().take(self.dim()) {
            if vi != T::zero() {
                out += self.interior_basis(i).scale(vi);
            }
        }
        out
    }

    /// Hodge star for the metric `g` and orientation `σ vol_g`, where
    /// `vol_g = √det g · e^1 ∧ … ∧ e^dim`.
    pub fn hodge_star(&self, g: &SmallMat<T>, orientation: T) -> Self {
        let ginv = g.inverse().expect("Hodge star needs a nondegenerate metric");
        self.hodge_star_with(g, &ginv, g.det().sqrt() * orientation)
    }

    /// Hodge star given `g`, `g⁻¹` and the signed volume factor `σ √det g`.
    pub fn hodge_star_with(&self, g: &SmallMat<T>, ginv: &SmallMat<T>, vol: T) -> Self {
        let dim = self.dim();
        let k = self.degree();
        let full = basis::top(dim);
        let mut out = Self::zero(dim, dim - k);
        let blades = self.blades();
        let det = vol * vol;
        // Minors of g⁻¹ on the blades, or of g on their complements.
        let direct = k <= 3 || dim - k >= k;
        let (a, m) = if direct { (ginv, k) } else { (g, dim - k) };
        let mut src = [([0usize; 7], T::zero()); basis::MAX_BLADES];
        let mut ns = 0;
        for (ii, &bi) in blades.iter().enumerate() {
            let c = self.coeffs[ii];
            if c == T::zero() {
                continue;
            }
            let ci = full & !bi;
            let mut idx = [0usize; 7];
            if direct {
                fill(bi, &mut idx);
                src[ns] = (idx, c);
            } else {
                fill(ci, &mut idx);
                src[ns] = (idx, c * T::lit(basis::wedge_sign(bi, ci) as f64) / det);
            }
            ns += 1;
        }
        if ns == 0 {
            return out;
        }
        for &bj in blades.iter() {
            let comp = full & !bj;
            let mut idx = [0usize; 7];
            let mut scale = vol * T::lit(basis::wedge_sign(bj, comp) as f64);
            if direct {
                fill(bj, &mut idx);
            } else {
                fill(comp, &mut idx);
                scale = scale * T::lit(basis::wedge_sign(bj, comp) as f64);
            }
            let mut s = T::zero();
            for (ri, c) in &src[..ns] {
                s = s + *c * if direct { index_minor(a, ri, &idx, m) } else { index_minor(a, &idx, ri, m) };
            }
            let kk = basis::index_of(dim, comp);
            out.coeffs[kk] = s * scale;
        }
        out
    }

    /// Pointwise inner product induced by `g` on forms of equal degree.
    pub fn inner(&self, other: &Self, g: &SmallMat<T>, ginv: &SmallMat<T>) -> T {
        assert_eq!(self.degree(), other.degree());
        let (dim, k) = (self.dim(), self.degree());
        let det = g.det();
        let blades = self.blades();
        let mut s = T::zero();
        for (ii, &bi) in blades.iter().enumerate() {
            if self.coeffs[ii] == T::zero() {
                continue;
            }
            for (jj, &bj) in blades.iter().enumerate() {
                if other.coeffs[jj] == T::zero() {
                    continue;
                }
                s = s + self.coeffs[ii] * other.coeffs[jj] * inverse_minor(g, ginv, det, bi, bj, k, dim);
            }
        }
        s
    }

    /// Pulls back through a linear map `x ↦ A x`: the result has
    /// components `(A*α)(v_1, …) = α(A v_1, …)`.
    pub fn pullback(&self, a: &SmallMat<T>) -> Self {
        let dim = self.dim();
        let mut out = Self::zero(dim, self.degree());
        for (jj, &bj) in self.blades().iter().enumerate() {
            let mut s = T::zero();
            for (ii, &bi) in self.blades().iter().enumerate() {
                if self.coeffs[ii] != T::zero() {
                    s = s + self.coeffs[ii] * blade_minor(a, bi, bj);
                }
            }
            out.coeffs[jj] = s;
        }
        out
    }
}

/// `det(g⁻¹[I, J])`, through the complementary minor of `g` when `|I| > 3`.
#[inline]
fn inverse_minor<T: Real>(g: &SmallMat<T>, ginv: &SmallMat<T>, det: T, bi: Blade, bj: Blade, k: usize, dim: usize) -> T {
    if k <= 3 || dim - k >= k {
        blade_minor(ginv, bi, bj)
    } else {
        let full = basis::top(dim);
        let (ci, cj) = (full & !bi, full & !bj);
        let s = basis::wedge_sign(bi, ci) * basis::wedge_sign(bj, cj);
        let m = blade_minor(g, cj, ci) / det;
        if s > 0 {
            m
        } else {
            -m
        }
    }
}

/// Minor of `a` with rows from blade `r` and columns from blade `c`.
#[inline]
fn blade_minor<T: Real>(a: &SmallMat<T>, r: Blade, c: Blade) -> T {
    let mut rows = [0usize; 7];
    let mut cols = [0usize; 7];
    let k = fill(r, &mut rows);
    fill(c, &mut cols);
    index_minor(a, &rows, &cols, k)
}

/// Minor of `a` on the first `k` listed rows and columns.
#[inline]
fn index_minor<T: Real>(a: &SmallMat<T>, rows: &[usize; 7], cols: &[usize; 7], k: usize) -> T {
    let e = |i: usize, j: usize| a[(rows[i], cols[j])];
    match k {
        0 => T::one(),
        1 => e(0, 0),
        2 => e(0, 0) * e(1, 1) - e(0, 1) * e(1, 0),
        3 => {
            e(0, 0) * (e(1, 1) * e(2, 2) - e(1, 2) * e(2, 1)) - e(0, 1) * (e(1, 0) * e(2, 2) - e(1, 2) * e(2, 0))
                + e(0, 2) * (e(1, 0) * e(2, 1) - e(1, 1) * e(2, 0))
        }
        _ => a.minor(&rows[..k], &cols[..k]),
    }
}

#[inline]
fn fill(b: Blade, out: &mut [usize; 7]) -> usize {
    let mut n = 0;
    for i in 0..7 {
        if b & (1 << i) != 0 {
            out[n] = i;
            n += 1;
        }
    }
    n
}

impl<T: Real> Add for PointForm<T> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        self += rhs;
        self
    }
}

impl<T: Real> AddAssign for PointForm<T> {
    fn add_assign(&mut self, rhs: Self) {
        assert!(self.dim == rhs.dim && self.degree == rhs.degree, "adding forms of different type");
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a = *a + *b;
        }
    }
}

impl<T: Real> Sub for PointForm<T> {
    type Output = Self;
    fn sub(mut self, rhs: Self) -> Self {
        self -= rhs;
        self
    }
}

impl<T: Real> SubAssign for PointForm<T> {
    fn sub_assign(&mut self, rhs: Self) {
        assert!(self.dim == rhs.dim && self.degree == rhs.degree, "subtracting forms of different type");
        for (a, b) in self.coeffs.iter_mut().zip(rhs.coeffs.iter()) {
            *a = *a - *b;
        }
    }
}

impl<T: Real> Neg for PointForm<T> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-T::one())
    }
}

impl<T: Real> Mul<T> for PointForm<T> {
    type Output = Self;
    fn mul(self, c: T) -> Self {
        self.scale(c)
    }
}
