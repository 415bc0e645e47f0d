use serde::{Deserialize, Serialize};

/// Uniform grid of `N^{2n}` points on the unit torus `T^{2n} = R^{2n}/Z^{2n}`.
///
/// Axis `2p` carries `Re z^{p+1}` and axis `2p+1` carries `Im z^{p+1}`.
/// Flat indices are row-major with axis 0 slowest.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorusGrid {
    /// Complex dimension.
    pub n: usize,
    /// Points per axis.
    pub size: usize,
}

impl TorusGrid {
    pub fn new(n: usize, size: usize) -> Self {
        assert!((1..=3).contains(&n), "complex dimension must be 1, 2 or 3");
        assert!(size >= 2 && size % 2 == 0, "grid size must be even");
        Self { n, size }
    }

    /// Real dimension `2n`.
    #[inline]
    pub fn dims(&self) -> usize {
        2 * self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.size.pow(self.dims() as u32)
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance between flat indices of neighbours along `axis`.
    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.size.pow((self.dims() - 1 - axis) as u32)
    }

    #[inline]
    pub fn spacing(&self) -> f64 {
        1.0 / self.size as f64
    }

    pub fn multi_index(&self, mut idx: usize) -> [usize; 6] {
        let mut out = [0; 6];
        for a in (0..self.dims()).rev() {
            out[a] = idx % self.size;
            idx /= self.size;
        }
        out
    }

    pub fn flat_index(&self, m: &[usize]) -> usize {
        m.iter().take(self.dims()).fold(0, |acc, &i| acc * self.size + i)
    }

    /// Coordinates of a grid point in `[0, 1)^{2n}`.
    pub fn point(&self, idx: usize) -> [f64; 6] {
        let m = self.multi_index(idx);
        let mut x = [0.0; 6];
        for a in 0..self.dims() {
            x[a] = m[a] as f64 / self.size as f64;
        }
        x
    }

    /// Signed wavenumber of a one-dimensional index; the Nyquist index maps
    /// to `N/2`.
    #[inline]
    pub fn wavenumber(&self, j: usize) -> i64 {
        if j <= self.size / 2 {
            j as i64
        } else {
            j as i64 - self.size as i64
        }
    }
}
