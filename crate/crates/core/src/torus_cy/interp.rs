//! Evaluation of band-limited fields away from the grid by direct Fourier
//! summation over their significant modes.

use rayon::prelude::*;
use rustfft::num_complex::Complex;

use super::spectral::{Spectral, C};
use crate::scalar::Real;

/// Mode pruning rule: a mode is kept when its normalized coefficient
/// exceeds `max(relative · largest, absolute)` in some channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pruning {
    pub relative: f64,
    pub absolute: f64,
}

impl Pruning {
    pub const DEFAULT: Pruning = Pruning { relative: 1e-14, absolute: 1e-16 };
    /// Keeps every mode.
    pub const NONE: Pruning = Pruning { relative: 0.0, absolute: 0.0 };
}

impl Default for Pruning {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Trigonometric interpolant of several real fields sharing one mode set.
#[derive(Clone, Debug)]
pub struct TrigInterpolant<T> {
    dims: usize,
    modes: Vec<[i32; 6]>,
    /// `coeffs[mode * channels + channel]`, doubled for paired modes.
    coeffs: Vec<C<T>>,
    channels: usize,
    kmax: [usize; 6],
}

impl<T: Real> TrigInterpolant<T> {
    /// Builds from unnormalized forward spectra of real fields.
    pub fn new(sp: &Spectral<T>, spectra: &[&[C<T>]], pruning: Pruning) -> Self {
        let grid = sp.grid();
        let len = grid.len();
        let dims = grid.dims();
        let norm = T::one() / T::of(len);
        let channels = spectra.len();
        let largest = spectra
            .iter()
            .map(|s| s.iter().fold(T::zero(), |m, z| m.max(z.norm())) * norm)
            .collect::<Vec<_>>();
        let mut modes = Vec::new();
        let mut coeffs = Vec::new();
        let mut kmax = [0usize; 6];
        for idx in 0..len {
            let neg = sp.negated(idx);
            if neg < idx {
                continue;
            }
            let significant = spectra.iter().zip(&largest).any(|(s, &big)| {
                let c = s[idx].norm() * norm;
                let thr = (T::lit(pruning.relative) * big).max(T::lit(pruning.absolute));
                c > thr || (pruning.relative == 0.0 && pruning.absolute == 0.0)
            });
            if !significant {
                continue;
            }
            let m = grid.multi_index(idx);
            let mut k = [0i32; 6];
            for a in 0..dims {
                k[a] = grid.wavenumber(m[a]) as i32;
                kmax[a] = kmax[a].max(k[a].unsigned_abs() as usize);
            }
            let w = if neg == idx { norm } else { norm + norm };
            modes.push(k);
            for s in spectra {
                coeffs.push(s[idx] * w);
            }
        }
        Self { dims, modes, coeffs, channels, kmax }
    }

    /// Interpolant of real fields given on the grid.
    pub fn from_fields(sp: &Spectral<T>, fields: &[&[T]], pruning: Pruning) -> Self {
        let specs = sp.forward_many(fields);
        let refs: Vec<&[C<T>]> = specs.iter().map(|s| &s[..]).collect();
        Self::new(sp, &refs, pruning)
    }

    pub fn mode_count(&self) -> usize {
        self.modes.len()
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// Values of every channel at one point.
    pub fn eval_point(&self, x: &[T], out: &mut [T]) {
        let two_pi = T::lit(2.0 * std::f64::consts::PI);
        let mut pow: [Vec<C<T>>; 6] = Default::default();
        for a in 0..self.dims {
            let km = self.kmax[a];
            let e = Complex::new(T::zero(), two_pi * x[a]).exp();
            let mut v = Vec::with_capacity(km + 1);
            let mut z = Complex::new(T::one(), T::zero());
            for _ in 0..=km {
                v.push(z);
                z = z * e;
            }
            pow[a] = v;
        }
        for o in out.iter_mut().take(self.channels) {
            *o = T::zero();
        }
        for (mi, k) in self.modes.iter().enumerate() {
            let mut ph = Complex::new(T::one(), T::zero());
            for a in 0..self.dims {
                let ka = k[a];
                if ka > 0 {
                    ph = ph * pow[a][ka as usize];
                } else if ka < 0 {
                    ph = ph * pow[a][(-ka) as usize].conj();
                }
            }
            let base = mi * self.channels;
            for c in 0..self.channels {
                let z = self.coeffs[base + c];
                out[c] = out[c] + z.re * ph.re - z.im * ph.im;
            }
        }
    }

    /// Values of every channel at many points, `result[channel][point]`.
    pub fn eval_many(&self, points: &[[T; 6]]) -> Vec<Vec<T>> {
        let flat: Vec<T> = points
            .par_iter()
            .flat_map_iter(|p| {
                let mut out = vec![T::zero(); self.channels];
                self.eval_point(p, &mut out);
                out
            })
            .collect();
        (0..self.channels)
            .map(|c| flat.iter().skip(c).step_by(self.channels).copied().collect())
            .collect()
    }
}
