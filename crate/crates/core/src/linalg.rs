//! Dense linear algebra for matrices of size at most 7.

use crate::scalar::{abs, Real};

pub const MAX_DIM: usize = 7;

/// Square matrix stored row-major on the stack.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmallMat<T> {
    n: usize,
    a: [T; MAX_DIM * MAX_DIM],
}

impl<T: Real> SmallMat<T> {
    pub fn zeros(n: usize) -> Self {
        assert!(n <= MAX_DIM, "matrix dimension {n} exceeds {MAX_DIM}");
        Self { n, a: [T::zero(); MAX_DIM * MAX_DIM] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[&[T]]) -> Self {
        let n = rows.len();
        Self::from_fn(n, |i, j| rows[i][j])
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.n, |i, j| self[(j, i)])
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let mut m = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self[(i, k)];
                if aik == T::zero() {
                    continue;
                }
                for j in 0..n {
                    m.a[i * MAX_DIM + j] = m.a[i * MAX_DIM + j] + aik * other[(k, j)];
                }
            }
        }
        m
    }

    pub fn mul_vec(&self, v: &[T]) -> [T; MAX_DIM] {
        let mut out = [T::zero(); MAX_DIM];
        for i in 0..self.n {
            let mut s = T::zero();
            for j in 0..self.n {
                s = s + self[(i, j)] * v[j];
            }
            out[i] = s;
        }
        out
    }

    pub fn scale(&self, c: T) -> Self {
        let mut m = *self;
        for x in m.a.iter_mut() {
            *x = *x * c;
        }
        m
    }

    pub fn add(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)] + other[(i, j)])
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self::from_fn(self.n, |i, j| self[(i, j)] - other[(i, j)])
    }

    /// `Pᵀ M P`.
    pub fn congruence(&self, p: &Self) -> Self {
        p.transpose().mul(&self.mul(p))
    }

    pub fn max_abs(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max(abs(self[(i, j)]));
            }
        }
        m
    }

    pub fn trace(&self) -> T {
        (0..self.n).fold(T::zero(), |s, i| s + self[(i, i)])
    }

    pub fn asymmetry(&self) -> T {
        let mut m = T::zero();
        for i in 0..self.n {
            for j in 0..i {
                m = m.max(abs(self[(i, j)] - self[(j, i)]));
            }
        }
        m
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    pub fn det(&self) -> T {
        let n = self.n;
        let mut m = *self;
        let mut det = T::one();
        for c in 0..n {
            let mut p = c;
            for r in c + 1..n {
                if abs(m[(r, c)]) > abs(m[(p, c)]) {
                    p = r;
                }
            }
            let piv = m[(p, c)];
            if piv == T::zero() {
                return T::zero();
            }
            if p != c {
                for j in 0..n {
                    m.a.swap(p * MAX_DIM + j, c * MAX_DIM + j);
                }
                det = -det;
            }
            det = det * piv;
            for r in c + 1..n {
                let f = m[(r, c)] / piv;
                if f == T::zero() {
                    continue;
                }
                for j in c..n {
                    let v = m[(r, j)] - f * m[(c, j)];
                    m[(r, j)] = v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut m = *self;
        let mut inv = Self::identity(n);
        for c in 0..n {
            let mut p = c;
            for r in c + 1..n {
                if abs(m[(r, c)]) > abs(m[(p, c)]) {
                    p = r;
                }
            }
            let piv = m[(p, c)];
            if piv == T::zero() || !piv.is_finite() {
                return None;
            }
            if p != c {
                for j in 0..n {
                    m.a.swap(p * MAX_DIM + j, c * MAX_DIM + j);
                    inv.a.swap(p * MAX_DIM + j, c * MAX_DIM + j);
                }
            }
            let ip = T::one() / piv;
            for j in 0..n {
                m[(c, j)] = m[(c, j)] * ip;
                inv[(c, j)] = inv[(c, j)] * ip;
            }
            for r in 0..n {
                if r == c {
                    continue;
                }
                let f = m[(r, c)];
                if f == T::zero() {
                    continue;
                }
                for j in 0..n {
                    let a = m[(r, j)] - f * m[(c, j)];
                    m[(r, j)] = a;
                    let b = inv[(r, j)] - f * inv[(c, j)];
                    inv[(r, j)] = b;
                }
            }
        }
        Some(inv)
    }

    /// Cholesky factor of a symmetric matrix; `None` unless positive-definite.
    pub fn cholesky(&self) -> Option<Self> {
        let n = self.n;
        let mut l = Self::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s = s - l[(i, k)] * l[(j, k)];
                }
                if i == j {
                    if !(s > T::zero()) {
                        return None;
                    }
                    l[(i, i)] = s.sqrt();
                } else {
                    l[(i, j)] = s / l[(j, j)];
                }
            }
        }
        Some(l)
    }

    /// Eigenvalues of a symmetric matrix in ascending order (cyclic Jacobi).
    pub fn sym_eigenvalues(&self) -> Vec<T> {
        let n = self.n;
        let mut m = *self;
        let two = T::lit(2.0);
        for _sweep in 0..64 {
            let mut off = T::zero();
            for i in 0..n {
                for j in 0..i {
                    off = off + m[(i, j)] * m[(i, j)];
                }
            }
            let scale = (0..n).fold(T::zero(), |s, i| s + m[(i, i)] * m[(i, i)]) + off;
            if off <= T::lit(1e-34) * scale || off == T::zero() {
                break;
            }
            for p in 0..n {
                for q in p + 1..n {
                    let apq = m[(p, q)];
                    if apq == T::zero() {
                        continue;
                    }
                    let theta = (m[(q, q)] - m[(p, p)]) / (two * apq);
                    let t = crate::scalar::signum(theta)
                        / (abs(theta) + (theta * theta + T::one()).sqrt());
                    let t = if theta == T::zero() { T::one() } else { t };
                    let c = T::one() / (t * t + T::one()).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let mkp = m[(k, p)];
                        let mkq = m[(k, q)];
                        m[(k, p)] = c * mkp - s * mkq;
                        m[(k, q)] = s * mkp + c * mkq;
                    }
                    for k in 0..n {
                        let mpk = m[(p, k)];
                        let mqk = m[(q, k)];
                        m[(p, k)] = c * mpk - s * mqk;
                        m[(q, k)] = s * mpk + c * mqk;
                    }
                }
            }
        }
        let mut ev: Vec<T> = (0..n).map(|i| m[(i, i)]).collect();
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        ev
    }

    /// Determinant of the submatrix selected by `rows` and `cols`.
    pub fn minor(&self, rows: &[usize], cols: &[usize]) -> T {
        let k = rows.len();
        debug_assert_eq!(k, cols.len());
        match k {
            0 => T::one(),
            1 => self[(rows[0], cols[0])],
            2 => {
                self[(rows[0], cols[0])] * self[(rows[1], cols[1])]
                    - self[(rows[0], cols[1])] * self[(rows[1], cols[0])]
            }
            _ => Self::from_fn(k, |i, j| self[(rows[i], cols[j])]).det(),
        }
    }
}

impl<T> std::ops::Index<(usize, usize)> for SmallMat<T> {
    type Output = T;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        &self.a[i * MAX_DIM + j]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for SmallMat<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        &mut self.a[i * MAX_DIM + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn det_and_inverse_of_known_matrix() {
        let m = SmallMat::<f64>::from_rows(&[&[2.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 4.0]]);
        assert!((m.det() - 18.0).abs() < 1e-12);
        let inv = m.inverse().unwrap();
        let id = m.mul(&inv);
        assert!(id.sub(&SmallMat::identity(3)).max_abs() < 1e-14);
    }

    #[test]
    fn jacobi_matches_closed_form_2x2() {
        let m = SmallMat::<f64>::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        let ev = m.sym_eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let m = SmallMat::<f64>::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(m.cholesky().is_none());
        assert!(SmallMat::<f64>::identity(7).cholesky().is_some());
    }
}
