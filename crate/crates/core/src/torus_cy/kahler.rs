//! Hermitian metrics on the torus and the quantities attached to them.
//!
//! A Hermitian matrix field `A` stands for the real (1,1)-form
//! `(i/2) Σ A_{jk̄} dz^j ∧ dz̄^k`; the flat Kähler form is `A = I`. The
//! form `ω₀ + i∂∂̄w` therefore corresponds to `I + 2∂∂̄w`, and
//! `|Ω|_ω = det(h)^{-1/2}` for `Ω = dz^1 ∧ … ∧ dz^n`.

use rustfft::num_complex::Complex;

use super::field::mean;
use super::grid::TorusGrid;
use super::spectral::{Spectral, C};
use crate::forms7::PointForm;
use crate::linalg::SmallMat;
use crate::scalar::Real;

/// Hermitian `n × n` matrix in a `3 × 3` row-major buffer.
pub type Herm<T> = [C<T>; 9];

#[derive(Debug, thiserror::Error, Clone, PartialEq)]
pub enum KahlerError {
    #[error("metric not positive at grid index {index} (x = {coords:?}): smallest eigenvalue {min_eigenvalue:e}")]
    NotPositive { index: usize, coords: Vec<f64>, min_eigenvalue: f64 },
}

#[derive(Clone, Debug, PartialEq)]
pub struct HermitianField<T> {
    pub grid: TorusGrid,
    pub h: Vec<Herm<T>>,
}

#[inline]
fn cz<T: Real>() -> C<T> {
    Complex::new(T::zero(), T::zero())
}

pub fn identity_herm<T: Real>(n: usize) -> Herm<T> {
    let mut m = [cz(); 9];
    for p in 0..n {
        m[p * 3 + p] = Complex::new(T::one(), T::zero());
    }
    m
}

/// Real determinant of a Hermitian matrix.
pub fn herm_det<T: Real>(a: &Herm<T>, n: usize) -> T {
    match n {
        1 => a[0].re,
        2 => a[0].re * a[4].re - a[1].norm_sqr(),
        3 => {
            let m = a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6])
                + a[2] * (a[3] * a[7] - a[4] * a[6]);
            m.re
        }
        _ => unreachable!("complex dimension {n}"),
    }
}

/// Inverse of a Hermitian matrix by cofactors.
pub fn herm_inverse<T: Real>(a: &Herm<T>, n: usize) -> Herm<T> {
    let d = herm_det(a, n);
    let inv = T::one() / d;
    let mut r = [cz(); 9];
    match n {
        1 => r[0] = Complex::new(inv, T::zero()),
        2 => {
            r[0] = a[4] * inv;
            r[1] = -a[1] * inv;
            r[3] = -a[3] * inv;
            r[4] = a[0] * inv;
        }
        3 => {
            let at = |i: usize, j: usize| a[i * 3 + j];
            for i in 0..3 {
                for j in 0..3 {
                    let (r0, r1) = ((j + 1) % 3, (j + 2) % 3);
                    let (c0, c1) = ((i + 1) % 3, (i + 2) % 3);
                    r[i * 3 + j] = (at(r0, c0) * at(r1, c1) - at(r0, c1) * at(r1, c0)) * inv;
                }
            }
        }
        _ => unreachable!("complex dimension {n}"),
    }
    r
}

/// Smallest eigenvalue of a Hermitian matrix (closed form).
pub fn herm_min_eigenvalue<T: Real>(a: &Herm<T>, n: usize) -> T {
    match n {
        1 => a[0].re,
        2 => {
            let half = T::lit(0.5);
            let m = (a[0].re + a[4].re) * half;
            let d = (a[0].re - a[4].re) * half;
            m - (d * d + a[1].norm_sqr()).sqrt()
        }
        3 => {
            let m = (a[0].re + a[4].re + a[8].re) / T::lit(3.0);
            let mut k = *a;
            for p in 0..3 {
                k[p * 3 + p] = k[p * 3 + p] - Complex::new(m, T::zero());
            }
            let p2 = k.iter().fold(T::zero(), |s, z| s + z.norm_sqr()) / T::lit(6.0);
            if p2 <= T::zero() {
                return m;
            }
            let p = p2.sqrt();
            let q = herm_det(&k, 3) / T::lit(2.0);
            let r = (q / (p2 * p)).max(-T::one()).min(T::one());
            let angle = r.acos() / T::lit(3.0);
            m + T::lit(2.0) * p * (angle + T::lit(2.0 * std::f64::consts::PI / 3.0)).cos()
        }
        _ => unreachable!("complex dimension {n}"),
    }
}

/// Real metric `g` on axes `(x_1, y_1, …)` attached to a Hermitian matrix.
pub fn real_metric<T: Real>(a: &Herm<T>, n: usize) -> SmallMat<T> {
    let mut g = SmallMat::zeros(2 * n);
    for j in 0..n {
        for k in 0..n {
            let z = a[j * 3 + k];
            g[(2 * j, 2 * k)] = z.re;
            g[(2 * j + 1, 2 * k + 1)] = z.re;
            g[(2 * j, 2 * k + 1)] = z.im;
            g[(2 * j + 1, 2 * k)] = -z.im;
        }
    }
    g
}

/// Real 2-form `(i/2) A_{jk̄} dz^j ∧ dz̄^k` on axes `(x_1, y_1, …)`.
pub fn real_two_form<T: Real>(a: &Herm<T>, n: usize) -> PointForm<T> {
    let dim = 2 * n;
    let mut w = SmallMat::zeros(dim);
    for j in 0..n {
        for k in 0..n {
            let z = a[j * 3 + k];
            w[(2 * j, 2 * k + 1)] = z.re;
            w[(2 * k + 1, 2 * j)] = -z.re;
            w[(2 * j, 2 * k)] = -z.im;
            w[(2 * j + 1, 2 * k + 1)] = -z.im;
        }
    }
    two_form_from_matrix(&w)
}

/// 2-form with components `w(∂_a, ∂_b) = W_ab` of an antisymmetric matrix.
pub fn two_form_from_matrix<T: Real>(w: &SmallMat<T>) -> PointForm<T> {
    let dim = w.dim();
    let mut f = PointForm::zero(dim, 2);
    for (i, &b) in crate::forms7::basis::blades(dim, 2).iter().enumerate() {
        let idx = crate::forms7::basis::indices(b);
        f.coeffs_mut()[i] = w[(idx[0], idx[1])];
    }
    f
}

/// Antisymmetric component matrix of a 2-form.
pub fn matrix_from_two_form<T: Real>(f: &PointForm<T>) -> SmallMat<T> {
    let dim = f.dim();
    let mut w = SmallMat::zeros(dim);
    for (i, &b) in f.blades().iter().enumerate() {
        let idx = crate::forms7::basis::indices(b);
        w[(idx[0], idx[1])] = f.coeffs()[i];
        w[(idx[1], idx[0])] = -f.coeffs()[i];
    }
    w
}

/// Hermitian matrix read back from a real 2-form of type (1,1).
pub fn herm_from_two_form<T: Real>(w: &PointForm<T>, n: usize) -> Herm<T> {
    let mut a = [cz(); 9];
    for j in 0..n {
        for k in 0..n {
            a[j * 3 + k] = Complex::new(w.get(&[2 * j, 2 * k + 1]), -w.get(&[2 * j, 2 * k]));
        }
    }
    a
}

/// Index pairs `(a, b)` with `a ≤ b`, in the order used by [`real_hessian`].
pub fn hessian_pairs(dims: usize) -> Vec<[usize; 2]> {
    let mut v = Vec::new();
    for a in 0..dims {
        for b in a..dims {
            v.push([a, b]);
        }
    }
    v
}

#[inline]
pub fn pair_index(a: usize, b: usize, dims: usize) -> usize {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    a * dims - a * (a + 1) / 2 + b
}

/// Second derivatives `∂_a ∂_b w` for `a ≤ b` from the spectrum of `w`.
pub fn real_hessian<T: Real>(sp: &Spectral<T>, spec: &[C<T>]) -> Vec<Vec<T>> {
    let pairs = hessian_pairs(sp.grid().dims());
    let list: Vec<&[usize]> = pairs.iter().map(|p| &p[..]).collect();
    sp.derivatives_of_spectrum(spec, &list)
}

/// `∂_j ∂_k̄ w` assembled from real second derivatives.
pub fn ddbar_at<T: Real>(hess: &[Vec<T>], i: usize, n: usize) -> Herm<T> {
    let dims = 2 * n;
    let d = |a: usize, b: usize| hess[pair_index(a, b, dims)][i];
    let q = T::lit(0.25);
    let mut m = [cz(); 9];
    for j in 0..n {
        for k in 0..n {
            let re = d(2 * j, 2 * k) + d(2 * j + 1, 2 * k + 1);
            let im = d(2 * j, 2 * k + 1) - d(2 * j + 1, 2 * k);
            m[j * 3 + k] = Complex::new(re * q, im * q);
        }
    }
    m
}

impl<T: Real> HermitianField<T> {
    pub fn flat(grid: TorusGrid) -> Self {
        Self { grid, h: vec![identity_herm(grid.n); grid.len()] }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.grid.n
    }

    /// `I + κ ∂∂̄w` from real second derivatives of `w`.
    pub fn from_hessian(grid: TorusGrid, hess: &[Vec<T>], kappa: T) -> Self {
        let n = grid.n;
        let h = (0..grid.len())
            .map(|i| {
                let mut m = ddbar_at(hess, i, n);
                for z in m.iter_mut() {
                    *z = *z * kappa;
                }
                for p in 0..n {
                    m[p * 3 + p] = m[p * 3 + p] + Complex::new(T::one(), T::zero());
                }
                m
            })
            .collect();
        Self { grid, h }
    }

    pub fn det(&self) -> Vec<T> {
        let n = self.n();
        self.h.iter().map(|a| herm_det(a, n)).collect()
    }

    pub fn min_eigenvalues(&self) -> Vec<T> {
        let n = self.n();
        self.h.iter().map(|a| herm_min_eigenvalue(a, n)).collect()
    }

    pub fn min_eigenvalue(&self) -> T {
        self.min_eigenvalues().into_iter().fold(T::infinity(), |m, x| m.min(x))
    }

    /// Sylvester test at every point; reports the first failing point.
    pub fn check_positive(&self) -> Result<(), KahlerError> {
        let n = self.n();
        for (i, a) in self.h.iter().enumerate() {
            let ok = a[0].re > T::zero()
                && (n < 2 || a[0].re * a[4].re - a[1].norm_sqr() > T::zero())
                && (n < 3 || herm_det(a, 3) > T::zero());
            if !ok {
                return Err(KahlerError::NotPositive {
                    index: i,
                    coords: self.grid.point(i)[..self.grid.dims()].to_vec(),
                    min_eigenvalue: herm_min_eigenvalue(a, n).to_f64(),
                });
            }
        }
        Ok(())
    }

    /// `|Ω|_ω = det(h)^{-1/2}`.
    pub fn omega_norm(&self) -> Vec<T> {
        self.det().into_iter().map(|d| T::one() / d.sqrt()).collect()
    }

    /// Total volume `∫ ω^n/n!` over the unit torus.
    pub fn volume(&self) -> T {
        mean(&self.det())
    }

    /// Largest entry of `h − I`, the sup distance to the flat form.
    pub fn distance_to_flat(&self) -> T {
        let n = self.n();
        let id = identity_herm::<T>(n);
        self.h.iter().fold(T::zero(), |m, a| {
            (0..n * n).fold(m, |m, t| {
                let (p, q) = (t / n, t % n);
                m.max((a[p * 3 + q] - id[p * 3 + q]).norm())
            })
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> T {
        let n = self.n();
        self.h.iter().zip(&other.h).fold(T::zero(), |m, (a, b)| {
            (0..n * n).fold(m, |m, t| {
                let (p, q) = (t / n, t % n);
                m.max((a[p * 3 + q] - b[p * 3 + q]).norm())
            })
        })
    }
}

/// `h = I + 2∂∂̄w`, the matrix of `ω₀ + i∂∂̄w`; errors where it is not positive.
pub fn metric_from_potential<T: Real>(sp: &Spectral<T>, w: &[T]) -> Result<HermitianField<T>, KahlerError> {
    let spec = sp.forward(w);
    let h = HermitianField::from_hessian(sp.grid(), &real_hessian(sp, &spec), T::lit(2.0));
    h.check_positive()?;
    Ok(h)
}

/// Ricci form `−i∂∂̄ log det h` in the same matrix convention as `h`.
pub fn ricci<T: Real>(sp: &Spectral<T>, h: &HermitianField<T>) -> HermitianField<T> {
    let logdet: Vec<T> = h.det().into_iter().map(|d| d.ln()).collect();
    let spec = sp.forward(&logdet);
    let mut r = HermitianField::from_hessian(sp.grid(), &real_hessian(sp, &spec), T::lit(-2.0));
    let n = h.n();
    for a in r.h.iter_mut() {
        for p in 0..n {
            a[p * 3 + p] = a[p * 3 + p] - Complex::new(T::one(), T::zero());
        }
    }
    r
}

/// `tr_ω ρ = tr(h⁻¹ ρ)` pointwise.
pub fn trace_with<T: Real>(h: &HermitianField<T>, rho: &HermitianField<T>) -> Vec<T> {
    let n = h.n();
    h.h.iter()
        .zip(&rho.h)
        .map(|(a, r)| {
            let inv = herm_inverse(a, n);
            let mut s = T::zero();
            for p in 0..n {
                for q in 0..n {
                    s = s + (inv[p * 3 + q] * r[q * 3 + p]).re;
                }
            }
            s
        })
        .collect()
}
