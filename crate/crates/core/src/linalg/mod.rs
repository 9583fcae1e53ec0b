//! Dense complex linear algebra: square matrices, Kronecker products, and
//! Hermitian eigendecompositions.

pub mod eig;

use crate::scalar::{Real, C};
use num_complex::Complex;

/// Dense square complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMat<R: Real> {
    n: usize,
    data: Vec<C<R>>,
}

impl<R: Real> CMat<R> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex::new(R::zero(), R::zero()); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = Complex::new(R::one(), R::zero());
        }
        m
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> C<R>) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_data(n: usize, data: Vec<C<R>>) -> Self {
        assert_eq!(data.len(), n * n);
        Self { n, data }
    }

    /// Build a complex matrix from real entries.
    pub fn from_re(n: usize, re: &[R]) -> Self {
        assert_eq!(re.len(), n * n);
        Self {
            n,
            data: re.iter().map(|&x| Complex::new(x, R::zero())).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn data(&self) -> &[C<R>] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> C<R> {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: C<R>) {
        self.data[i * self.n + j] = v;
    }

    pub fn row(&self, i: usize) -> &[C<R>] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        let n = self.n;
        let zero = Complex::new(R::zero(), R::zero());
        let mut out = vec![zero; n * n];
        for i in 0..n {
            let arow = &self.data[i * n..(i + 1) * n];
            let orow = &mut out[i * n..(i + 1) * n];
            for (k, &aik) in arow.iter().enumerate() {
                if aik == zero {
                    continue;
                }
                let brow = &other.data[k * n..(k + 1) * n];
                for (o, &b) in orow.iter_mut().zip(brow) {
                    *o += aik * b;
                }
            }
        }
        Self { n, data: out }
    }

    pub fn matvec(&self, x: &[C<R>]) -> Vec<C<R>> {
        assert_eq!(x.len(), self.n);
        let n = self.n;
        let mut y = Vec::with_capacity(n);
        for i in 0..n {
            let row = &self.data[i * n..(i + 1) * n];
            let mut acc = Complex::new(R::zero(), R::zero());
            for (a, b) in row.iter().zip(x) {
                acc += a * b;
            }
            y.push(acc);
        }
        y
    }

    pub fn adjoint(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| self.data[j * n + i].conj())
    }

    pub fn transpose(&self) -> Self {
        let n = self.n;
        Self::from_fn(n, |i, j| self.data[j * n + i])
    }

    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    pub fn scale(&self, c: C<R>) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn scale_re(&self, c: R) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&z| z * c).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n);
        Self {
            n: self.n,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// self += c * other
    pub fn axpy(&mut self, c: C<R>, other: &Self) {
        assert_eq!(self.n, other.n);
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += c * b;
        }
    }

    /// self += w * v v†
    pub fn rank1_update(&mut self, w: C<R>, v: &[C<R>]) {
        assert_eq!(v.len(), self.n);
        let n = self.n;
        for i in 0..n {
            let wi = w * v[i];
            let row = &mut self.data[i * n..(i + 1) * n];
            for (r, &vj) in row.iter_mut().zip(v) {
                *r += wi * vj.conj();
            }
        }
    }

    pub fn trace(&self) -> C<R> {
        let mut acc = Complex::new(R::zero(), R::zero());
        for i in 0..self.n {
            acc += self.data[i * self.n + i];
        }
        acc
    }

    pub fn max_abs(&self) -> R {
        self.data
            .iter()
            .map(|z| z.norm())
            .fold(R::zero(), |a, b| a.max(b))
    }

    pub fn max_abs_diff(&self, other: &Self) -> R {
        assert_eq!(self.n, other.n);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(R::zero(), |a, b| a.max(b))
    }

    /// max |A_ij - conj(A_ji)|
    pub fn hermitian_defect(&self) -> R {
        let n = self.n;
        let mut worst = R::zero();
        for i in 0..n {
            for j in i..n {
                let d = (self.data[i * n + j] - self.data[j * n + i].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// max-entry norm of A†A - 1.
    pub fn unitary_defect(&self) -> R {
        self.adjoint().mul(self).sub(&Self::identity(self.n)).max_abs()
    }

    /// True when every imaginary part is exactly zero.
    pub fn is_real(&self) -> bool {
        self.data.iter().all(|z| z.im == R::zero())
    }

    pub fn re_data(&self) -> Vec<R> {
        self.data.iter().map(|z| z.re).collect()
    }

    /// Kronecker product, `self` acting on the leftmost factor.
    pub fn kron(&self, other: &Self) -> Self {
        let (na, nb) = (self.n, other.n);
        let n = na * nb;
        let zero = Complex::new(R::zero(), R::zero());
        let mut data = vec![zero; n * n];
        for ia in 0..na {
            for ja in 0..na {
                let a = self.data[ia * na + ja];
                if a == zero {
                    continue;
                }
                for ib in 0..nb {
                    let dst = (ia * nb + ib) * n + ja * nb;
                    let src = ib * nb;
                    for jb in 0..nb {
                        data[dst + jb] = a * other.data[src + jb];
                    }
                }
            }
        }
        Self { n, data }
    }
}

/// ⟨x|y⟩ with the physics convention (conjugate-linear in x).
pub fn inner<R: Real>(x: &[C<R>], y: &[C<R>]) -> C<R> {
    assert_eq!(x.len(), y.len());
    let mut acc = Complex::new(R::zero(), R::zero());
    for (a, b) in x.iter().zip(y) {
        acc += a.conj() * b;
    }
    acc
}

pub fn norm<R: Real>(x: &[C<R>]) -> R {
    inner(x, x).re.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn mul_identity() {
        let a = CMat::from_fn(3, |i, j| c((i * 3 + j) as f64, (i + j) as f64));
        let id = CMat::identity(3);
        assert_eq!(a.mul(&id), a);
        assert_eq!(id.mul(&a), a);
    }

    #[test]
    fn kron_shapes_and_values() {
        let a = CMat::from_data(2, vec![c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]);
        let b = CMat::identity(2);
        let k = a.kron(&b);
        assert_eq!(k.n(), 4);
        assert_eq!(k.get(0, 0), c(1., 0.));
        assert_eq!(k.get(1, 1), c(1., 0.));
        assert_eq!(k.get(0, 2), c(2., 0.));
        assert_eq!(k.get(2, 0), c(3., 0.));
        // (A ⊗ B)(C ⊗ D) = AC ⊗ BD
        let cmat = CMat::from_data(2, vec![c(0., 1.), c(1., 0.), c(0., 0.), c(2., -1.)]);
        let d = CMat::from_data(2, vec![c(1., 1.), c(0., 0.), c(0., 2.), c(1., 0.)]);
        let lhs = a.kron(&cmat).mul(&b.kron(&d));
        let rhs = a.mul(&b).kron(&cmat.mul(&d));
        assert!(lhs.max_abs_diff(&rhs) < 1e-14);
    }

    #[test]
    fn hermitian_defect_detects() {
        let mut a = CMat::identity(2);
        assert_eq!(a.hermitian_defect(), 0.0);
        a.set(0, 1, c(1., 2.));
        a.set(1, 0, c(1., -2.));
        assert_eq!(a.hermitian_defect(), 0.0);
        a.set(1, 0, c(1., 2.));
        assert!(a.hermitian_defect() > 1.0);
    }
}
