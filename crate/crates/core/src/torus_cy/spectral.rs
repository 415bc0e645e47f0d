use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::grid::TorusGrid;
use crate::scalar::Real;

pub type C<T> = Complex<T>;

/// Fourier transforms and spectral derivatives on a [`TorusGrid`].
///
/// Odd derivatives drop the Nyquist mode so that every derivative of a real
/// field is real and derivatives commute.
pub struct Spectral<T: Real> {
    grid: TorusGrid,
    fwd: Arc<dyn Fft<T>>,
    inv: Arc<dyn Fft<T>>,
    /// `2π k` per one-dimensional index, zero at Nyquist.
    ik: Vec<T>,
    /// One-dimensional index along each axis of every flat index.
    axis_index: Vec<[u8; 6]>,
    neg: Vec<u32>,
    keep: Vec<bool>,
}

impl<T: Real> Spectral<T> {
    pub fn new(grid: TorusGrid) -> Self {
        let n = grid.size;
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(n);
        let inv = planner.plan_fft_inverse(n);
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        let ik = (0..n)
            .map(|j| if 2 * j == n { T::zero() } else { two_pi * T::lit(grid.wavenumber(j) as f64) })
            .collect();
        let len = grid.len();
        let mut neg = Vec::with_capacity(len);
        let mut keep = Vec::with_capacity(len);
        let mut axis_index = Vec::with_capacity(len);
        for idx in 0..len {
            let m = grid.multi_index(idx);
            axis_index.push(m.map(|j| j as u8));
            let mut nm = [0usize; 6];
            let mut k = true;
            for a in 0..grid.dims() {
                nm[a] = (n - m[a]) % n;
                k &= 3 * grid.wavenumber(m[a]).unsigned_abs() < n as u64;
            }
            neg.push(grid.flat_index(&nm[..grid.dims()]) as u32);
            keep.push(k);
        }
        Self { grid, fwd, inv, ik, axis_index, neg, keep }
    }

    #[inline]
    pub fn grid(&self) -> TorusGrid {
        self.grid
    }

    fn transform(&self, data: &mut [C<T>], inverse: bool) {
        let n = self.grid.size;
        let dims = self.grid.dims();
        let len = data.len();
        assert_eq!(len, self.grid.len());
        let plan = if inverse { &self.inv } else { &self.fwd };
        let mut scratch = vec![C::new(T::zero(), T::zero()); plan.get_inplace_scratch_len()];
        let mut buf = Vec::new();
        for axis in 0..dims {
            let inner = self.grid.stride(axis);
            if inner == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = n * inner;
            buf.resize(block, C::new(T::zero(), T::zero()));
            for chunk in data.chunks_mut(block) {
                for j in 0..n {
                    for i in 0..inner {
                        buf[i * n + j] = chunk[j * inner + i];
                    }
                }
                plan.process_with_scratch(&mut buf, &mut scratch);
                for j in 0..n {
                    for i in 0..inner {
                        chunk[j * inner + i] = buf[i * n + j];
                    }
                }
            }
        }
        if inverse {
            let s = T::one() / T::of(len);
            for z in data.iter_mut() {
                *z = *z * s;
            }
        }
    }

    pub fn forward_complex(&self, data: &mut [C<T>]) {
        self.transform(data, false);
    }

    pub fn inverse_complex(&self, data: &mut [C<T>]) {
        self.transform(data, true);
    }

    pub fn forward(&self, f: &[T]) -> Vec<C<T>> {
        let mut d: Vec<C<T>> = f.iter().map(|&x| C::new(x, T::zero())).collect();
        self.transform(&mut d, false);
        d
    }

    /// Spectra of two real fields from one complex transform.
    pub fn forward_pair(&self, a: &[T], b: &[T]) -> (Vec<C<T>>, Vec<C<T>>) {
        let mut z: Vec<C<T>> = a.iter().zip(b).map(|(&x, &y)| C::new(x, y)).collect();
        self.transform(&mut z, false);
        let half = T::lit(0.5);
        let mut sa = Vec::with_capacity(z.len());
        let mut sb = Vec::with_capacity(z.len());
        for (i, &zi) in z.iter().enumerate() {
            let zc = z[self.neg[i] as usize].conj();
            sa.push((zi + zc) * half);
            let d = (zi - zc) * half;
            sb.push(C::new(d.im, -d.re));
        }
        (sa, sb)
    }

    /// Real part of the inverse transform.
    pub fn inverse_real(&self, s: &[C<T>]) -> Vec<T> {
        let mut d = s.to_vec();
        self.transform(&mut d, true);
        d.into_iter().map(|z| z.re).collect()
    }

    /// Inverse transforms of two Hermitian spectra from one complex transform.
    pub fn inverse_real_pair(&self, sa: &[C<T>], sb: &[C<T>]) -> (Vec<T>, Vec<T>) {
        let mut z: Vec<C<T>> = sa.iter().zip(sb).map(|(&a, &b)| a + C::new(-b.im, b.re)).collect();
        self.transform(&mut z, true);
        z.into_iter().map(|c| (c.re, c.im)).unzip()
    }

    /// Inverse transforms of many Hermitian spectra, paired up.
    pub fn inverse_real_many(&self, specs: &[Vec<C<T>>]) -> Vec<Vec<T>> {
        let mut out = Vec::with_capacity(specs.len());
        let mut i = 0;
        while i < specs.len() {
            if i + 1 < specs.len() {
                let (a, b) = self.inverse_real_pair(&specs[i], &specs[i + 1]);
                out.push(a);
                out.push(b);
                i += 2;
            } else {
                out.push(self.inverse_real(&specs[i]));
                i += 1;
            }
        }
        out
    }

    /// Spectra of many real fields, paired up.
    pub fn forward_many(&self, fields: &[&[T]]) -> Vec<Vec<C<T>>> {
        let mut out = Vec::with_capacity(fields.len());
        let mut i = 0;
        while i < fields.len() {
            if i + 1 < fields.len() {
                let (a, b) = self.forward_pair(fields[i], fields[i + 1]);
                out.push(a);
                out.push(b);
                i += 2;
            } else {
                out.push(self.forward(fields[i]));
                i += 1;
            }
        }
        out
    }

    /// Multiplies a spectrum by `∏_a (2πi k_{axis_a})`.
    pub fn derivative_spectrum(&self, s: &[C<T>], axes: &[usize]) -> Vec<C<T>> {
        let mut out = s.to_vec();
        self.apply_derivative(&mut out, axes);
        out
    }

    pub fn apply_derivative(&self, s: &mut [C<T>], axes: &[usize]) {
        if axes.is_empty() {
            return;
        }
        let rot = axes.len() % 4;
        for (z, m) in s.iter_mut().zip(&self.axis_index) {
            let mut f = T::one();
            for &a in axes {
                f = f * self.ik[m[a] as usize];
            }
            let w = *z * f;
            *z = match rot {
                0 => w,
                1 => C::new(-w.im, w.re),
                2 => -w,
                _ => C::new(w.im, -w.re),
            };
        }
    }

    /// Multiplies a spectrum by the symbol of the flat Laplacian `Σ ∂_a²`.
    pub fn apply_laplacian(&self, s: &mut [C<T>]) {
        let dims = self.grid.dims();
        for (z, m) in s.iter_mut().zip(&self.axis_index) {
            let mut k2 = T::zero();
            for &j in &m[..dims] {
                let k = self.ik[j as usize];
                k2 = k2 + k * k;
            }
            *z = *z * (-k2);
        }
    }

    /// Real derivative fields `∂^{axes} f` for a list of multi-indices.
    pub fn derivatives(&self, f: &[T], list: &[&[usize]]) -> Vec<Vec<T>> {
        let s = self.forward(f);
        self.derivatives_of_spectrum(&s, list)
    }

    pub fn derivatives_of_spectrum(&self, s: &[C<T>], list: &[&[usize]]) -> Vec<Vec<T>> {
        let specs: Vec<Vec<C<T>>> = list.iter().map(|axes| self.derivative_spectrum(s, axes)).collect();
        self.inverse_real_many(&specs)
    }

    pub fn derivative(&self, f: &[T], axes: &[usize]) -> Vec<T> {
        self.derivatives(f, &[axes]).pop().unwrap()
    }

    /// Gradient `(∂_0 f, …, ∂_{2n−1} f)`.
    pub fn gradient(&self, f: &[T]) -> Vec<Vec<T>> {
        let axes: Vec<[usize; 1]> = (0..self.grid.dims()).map(|a| [a]).collect();
        let list: Vec<&[usize]> = axes.iter().map(|a| &a[..]).collect();
        self.derivatives(f, &list)
    }

    /// Zeroes every mode outside the cube `3|k_a| < N`.
    pub fn dealias(&self, s: &mut [C<T>]) {
        for (z, &k) in s.iter_mut().zip(&self.keep) {
            if !k {
                *z = C::new(T::zero(), T::zero());
            }
        }
    }

    pub fn is_kept(&self, idx: usize) -> bool {
        self.keep[idx]
    }

    /// Applies the 2/3 filter to a real field.
    pub fn dealias_field(&self, f: &[T]) -> Vec<T> {
        let mut s = self.forward(f);
        self.dealias(&mut s);
        self.inverse_real(&s)
    }

    /// Flat index of the mode `−k`.
    #[inline]
    pub fn negated(&self, idx: usize) -> usize {
        self.neg[idx] as usize
    }
}
