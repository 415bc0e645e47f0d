use serde::{Deserialize, Serialize};

use super::grid::TorusGrid;
use crate::scalar::Real;

/// Real scalar field sampled on a torus grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalarField<T> {
    pub grid: TorusGrid,
    pub values: Vec<T>,
}

/// Kähler potential relative to the flat form.
pub type PotentialField<T> = ScalarField<T>;

impl<T: Real> ScalarField<T> {
    pub fn new(grid: TorusGrid, values: Vec<T>) -> Self {
        assert_eq!(values.len(), grid.len(), "field length does not match grid");
        Self { grid, values }
    }

    pub fn zeros(grid: TorusGrid) -> Self {
        Self { grid, values: vec![T::zero(); grid.len()] }
    }

    /// Samples `f` at the grid points.
    pub fn from_fn(grid: TorusGrid, f: impl Fn(&[f64]) -> f64) -> Self {
        let values = (0..grid.len()).map(|i| T::lit(f(&grid.point(i)[..grid.dims()]))).collect();
        Self { grid, values }
    }

    /// `Σ amplitude · cos(2π k·x + phase)`.
    pub fn from_modes(grid: TorusGrid, modes: &[FourierMode]) -> Self {
        Self::from_fn(grid, |x| {
            modes
                .iter()
                .map(|m| {
                    let kx: f64 = m.k.iter().zip(x).map(|(&k, &xi)| k as f64 * xi).sum();
                    m.amplitude * (2.0 * std::f64::consts::PI * kx + m.phase).cos()
                })
                .sum()
        })
    }

    /// `ε/(4π²) · cos(2π k·x)`, whose Hessian has size `ε|k|²`.
    pub fn single_mode(grid: TorusGrid, k: &[i64], eps: f64) -> Self {
        let amp = eps / (4.0 * std::f64::consts::PI * std::f64::consts::PI);
        Self::from_modes(grid, &[FourierMode { k: k.to_vec(), amplitude: amp, phase: 0.0 }])
    }

    pub fn mean(&self) -> T {
        mean(&self.values)
    }

    pub fn max(&self) -> T {
        self.values.iter().fold(T::neg_infinity(), |m, &x| m.max(x))
    }

    pub fn min(&self) -> T {
        self.values.iter().fold(T::infinity(), |m, &x| m.min(x))
    }

    pub fn oscillation(&self) -> T {
        self.max() - self.min()
    }
}

/// Single Fourier mode of an initial potential.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FourierMode {
    pub k: Vec<i64>,
    pub amplitude: f64,
    #[serde(default)]
    pub phase: f64,
}

/// Grid average, which is the integral over the unit torus.
pub fn mean<T: Real>(v: &[T]) -> T {
    // pairwise summation keeps the error at O(log N · eps)
    fn sum<T: Real>(v: &[T]) -> T {
        if v.len() <= 64 {
            v.iter().fold(T::zero(), |s, &x| s + x)
        } else {
            let (a, b) = v.split_at(v.len() / 2);
            sum(a) + sum(b)
        }
    }
    sum(v) / T::of(v.len())
}

pub fn oscillation<T: Real>(v: &[T]) -> T {
    let (lo, hi) = v.iter().fold((T::infinity(), T::neg_infinity()), |(l, h), &x| (l.min(x), h.max(x)));
    hi - lo
}

pub fn max_abs_diff<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |m, (&x, &y)| m.max(crate::scalar::abs(x - y)))
}
