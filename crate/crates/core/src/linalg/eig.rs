//! Hermitian eigendecomposition.
//!
//! Householder reduction to tridiagonal form followed by the implicit-shift
//! QL iteration, in the classic EISPACK/Numerical-Recipes formulation. The
//! real-symmetric path avoids complex arithmetic entirely; complex Hermitian
//! input is reduced with complex Householder reflectors and a diagonal phase
//! transformation that makes the subdiagonal real, after which the same real
//! QL iteration rotates the complex eigenvector columns.

use super::CMat;
use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use num_complex::Complex;

const MAX_QL_ITER: usize = 60;

/// Eigensystem of a Hermitian matrix. Eigenvalues ascending; eigenvectors are
/// stored column-contiguous, real storage when the input matrix was real.
pub struct HermEigen<R: Real> {
    pub values: Vec<R>,
    vectors: EigVectors<R>,
    n: usize,
}

enum EigVectors<R: Real> {
    Real(Vec<R>),
    Complex(Vec<C<R>>),
}

impl<R: Real> HermEigen<R> {
    pub fn n(&self) -> usize {
        self.n
    }

    /// Decompose a Hermitian matrix (the caller is responsible for checking
    /// Hermiticity; entries above the diagonal are trusted).
    pub fn new(m: &CMat<R>) -> Result<Self> {
        let n = m.n();
        if m.is_real() {
            let (values, vectors) = sym_eigen(n, m.re_data(), true)?;
            Ok(Self {
                values,
                vectors: EigVectors::Real(vectors.expect("vectors requested")),
                n,
            })
        } else {
            let (values, vectors) = herm_eigen(n, m.data().to_vec(), true)?;
            Ok(Self {
                values,
                vectors: EigVectors::Complex(vectors.expect("vectors requested")),
                n,
            })
        }
    }

    /// Eigenvalues only (no eigenvector accumulation).
    pub fn values_only(m: &CMat<R>) -> Result<Vec<R>> {
        let n = m.n();
        if m.is_real() {
            Ok(sym_eigen(n, m.re_data(), false)?.0)
        } else {
            Ok(herm_eigen(n, m.data().to_vec(), false)?.0)
        }
    }

    /// k-th eigenvector as a complex vector.
    pub fn vector(&self, k: usize) -> Vec<C<R>> {
        let n = self.n;
        match &self.vectors {
            EigVectors::Real(v) => v[k * n..(k + 1) * n]
                .iter()
                .map(|&x| Complex::new(x, R::zero()))
                .collect(),
            EigVectors::Complex(v) => v[k * n..(k + 1) * n].to_vec(),
        }
    }

    /// Overlaps y_k = ⟨v_k|x⟩ of a state with every eigenvector.
    pub fn project(&self, x: &[C<R>]) -> Vec<C<R>> {
        let n = self.n;
        assert_eq!(x.len(), n);
        match &self.vectors {
            EigVectors::Real(v) => (0..n)
                .map(|k| {
                    let col = &v[k * n..(k + 1) * n];
                    let mut acc = Complex::new(R::zero(), R::zero());
                    for (&vi, &xi) in col.iter().zip(x) {
                        acc += xi * vi;
                    }
                    acc
                })
                .collect(),
            EigVectors::Complex(v) => (0..n)
                .map(|k| {
                    let col = &v[k * n..(k + 1) * n];
                    let mut acc = Complex::new(R::zero(), R::zero());
                    for (&vi, &xi) in col.iter().zip(x) {
                        acc += vi.conj() * xi;
                    }
                    acc
                })
                .collect(),
        }
    }

    /// Σ_k w_k |⟨v_k|x⟩|².
    pub fn weighted_quadratic(&self, weights: &[R], x: &[C<R>]) -> R {
        let overlaps = self.project(x);
        let mut acc = R::zero();
        for (w, y) in weights.iter().zip(&overlaps) {
            acc += *w * y.norm_sqr();
        }
        acc
    }

    /// Assemble Σ_k f(λ_k) v_k v_k† for complex-valued f (e.g. e^{-iλ}).
    pub fn apply_spectral_complex(&self, f: impl Fn(R) -> C<R>) -> CMat<R> {
        let n = self.n;
        let zero = Complex::new(R::zero(), R::zero());
        let mut out = vec![zero; n * n];
        for k in 0..n {
            let fk = f(self.values[k]);
            if fk == zero {
                continue;
            }
            let col = self.vector(k);
            for i in 0..n {
                let s = col[i] * fk;
                let row = &mut out[i * n..(i + 1) * n];
                for (r, &cj) in row.iter_mut().zip(&col) {
                    *r += s * cj.conj();
                }
            }
        }
        CMat::from_data(n, out)
    }

    /// Assemble f(A) = Σ_k f(λ_k) v_k v_k†. The result is Hermitian by
    /// construction (lower triangle mirrored).
    pub fn apply_spectral(&self, f: impl Fn(R) -> R) -> CMat<R> {
        let n = self.n;
        match &self.vectors {
            EigVectors::Real(v) => {
                let mut out = vec![R::zero(); n * n];
                for k in 0..n {
                    let fk = f(self.values[k]);
                    if fk == R::zero() {
                        continue;
                    }
                    let col = &v[k * n..(k + 1) * n];
                    for i in 0..n {
                        let s = fk * col[i];
                        let row = &mut out[i * n..i * n + i + 1];
                        for (r, &cj) in row.iter_mut().zip(col) {
                            *r += s * cj;
                        }
                    }
                }
                let mut data = vec![Complex::new(R::zero(), R::zero()); n * n];
                for i in 0..n {
                    for j in 0..=i {
                        let x = Complex::new(out[i * n + j], R::zero());
                        data[i * n + j] = x;
                        data[j * n + i] = x;
                    }
                }
                CMat::from_data(n, data)
            }
            EigVectors::Complex(v) => {
                let zero = Complex::new(R::zero(), R::zero());
                let mut out = vec![zero; n * n];
                for k in 0..n {
                    let fk = f(self.values[k]);
                    if fk == R::zero() {
                        continue;
                    }
                    let col = &v[k * n..(k + 1) * n];
                    for i in 0..n {
                        let s = col[i] * fk;
                        let row = &mut out[i * n..i * n + i + 1];
                        for (r, &cj) in row.iter_mut().zip(col) {
                            *r += s * cj.conj();
                        }
                    }
                }
                for i in 0..n {
                    for j in 0..i {
                        out[j * n + i] = out[i * n + j].conj();
                    }
                    out[i * n + i] = Complex::new(out[i * n + i].re, R::zero());
                }
                CMat::from_data(n, out)
            }
        }
    }
}

/// Real symmetric eigensystem: Householder tridiagonalization (tred2) plus
/// implicit QL (tql2). Eigenvectors, when requested, come back as
/// column-contiguous storage sorted by ascending eigenvalue.
#[allow(clippy::type_complexity)]
pub fn sym_eigen<R: Real>(
    n: usize,
    mut a: Vec<R>,
    want_vectors: bool,
) -> Result<(Vec<R>, Option<Vec<R>>)> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok((vec![], want_vectors.then(Vec::new)));
    }
    let mut d = vec![R::zero(); n];
    let mut e = vec![R::zero(); n];
    tred2(&mut a, n, &mut d, &mut e, want_vectors);

    if want_vectors {
        // Column-major copy of the accumulated transform so the QL rotations
        // act on contiguous memory.
        let mut q = vec![R::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                q[j * n + i] = a[i * n + j];
            }
        }
        tql_implicit(&mut d, &mut e, n, |i, cos, sin| {
            let (left, right) = q.split_at_mut((i + 1) * n);
            let zi = &mut left[i * n..];
            let zi1 = &mut right[..n];
            for (x, y) in zi.iter_mut().zip(zi1.iter_mut()) {
                let f = *y;
                *y = sin * *x + cos * f;
                *x = cos * *x - sin * f;
            }
        })?;
        let order = sort_order(&d);
        let values = order.iter().map(|&k| d[k]).collect();
        let mut sorted = vec![R::zero(); n * n];
        for (dst, &src) in order.iter().enumerate() {
            sorted[dst * n..(dst + 1) * n].copy_from_slice(&q[src * n..(src + 1) * n]);
        }
        Ok((values, Some(sorted)))
    } else {
        tql_implicit(&mut d, &mut e, n, |_, _, _| {})?;
        d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        Ok((d, None))
    }
}

/// Complex Hermitian eigensystem.
#[allow(clippy::type_complexity)]
pub fn herm_eigen<R: Real>(
    n: usize,
    mut a: Vec<C<R>>,
    want_vectors: bool,
) -> Result<(Vec<R>, Option<Vec<C<R>>>)> {
    assert_eq!(a.len(), n * n);
    if n == 0 {
        return Ok((vec![], want_vectors.then(Vec::new)));
    }
    let zero = Complex::new(R::zero(), R::zero());
    let mut taus = vec![R::zero(); n];
    let mut sub = vec![zero; n]; // sub[k] = T[k+1][k] after reduction

    // Householder reduction: for each column k annihilate entries below the
    // subdiagonal. The reflector vector u is left in column k (rows k+1..).
    for k in 0..n.saturating_sub(2) {
        let alpha = a[(k + 1) * n + k];
        let mut tail = R::zero();
        for i in k + 2..n {
            tail += a[i * n + k].norm_sqr();
        }
        let xnorm = (alpha.norm_sqr() + tail).sqrt();
        if xnorm == R::zero() {
            sub[k] = zero;
            continue;
        }
        let phase = if alpha.norm() > R::zero() {
            alpha / alpha.norm()
        } else {
            Complex::new(R::one(), R::zero())
        };
        let sigma = -phase * xnorm;
        a[(k + 1) * n + k] = alpha - sigma;
        let unorm_sq = a[(k + 1) * n + k].norm_sqr() + tail;
        sub[k] = sigma;
        if unorm_sq == R::zero() {
            continue;
        }
        let tau = (R::one() + R::one()) / unorm_sq;
        taus[k] = tau;

        // p = tau * B u on the trailing block B = a[k+1.., k+1..].
        let m = n - (k + 1);
        let u: Vec<C<R>> = (0..m).map(|i| a[(k + 1 + i) * n + k]).collect();
        let mut p = vec![zero; m];
        for i in 0..m {
            let row = &a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            let mut acc = zero;
            for (b, uj) in row.iter().zip(&u) {
                acc += b * uj;
            }
            p[i] = acc * tau;
        }
        // w = p - (tau/2)(u†p) u
        let mut udotp = zero;
        for i in 0..m {
            udotp += u[i].conj() * p[i];
        }
        let kappa = udotp * (tau / (R::one() + R::one()));
        for i in 0..m {
            p[i] -= kappa * u[i];
        }
        // B -= u w† + w u†
        for i in 0..m {
            let ui = u[i];
            let wi = p[i];
            let row = &mut a[(k + 1 + i) * n + k + 1..(k + 1 + i) * n + n];
            for (j, r) in row.iter_mut().enumerate() {
                *r -= ui * p[j].conj() + wi * u[j].conj();
            }
        }
    }
    if n >= 2 {
        sub[n - 2] = a[(n - 1) * n + (n - 2)];
    }

    let mut d: Vec<R> = (0..n).map(|i| a[i * n + i].re).collect();

    if !want_vectors {
        let mut e = vec![R::zero(); n];
        for k in 0..n - 1 {
            e[k + 1] = sub[k].norm();
        }
        tql_implicit(&mut d, &mut e, n, |_, _, _| {})?;
        d.sort_by(|a, b| a.partial_cmp(b).expect("finite eigenvalues"));
        return Ok((d, None));
    }

    // Assemble Q = H_0 H_1 ... by applying reflectors to the identity in
    // reverse order; column-major storage.
    let mut q = vec![zero; n * n];
    for j in 0..n {
        q[j * n + j] = Complex::new(R::one(), R::zero());
    }
    let mut w = vec![zero; n];
    for k in (0..n.saturating_sub(2)).rev() {
        if taus[k] == R::zero() {
            continue;
        }
        let tau = taus[k];
        // w_j = Σ_i conj(u_i) Q[i][j]; Q[i][j] -= tau u_i w_j
        for j in 0..n {
            let col = &q[j * n..(j + 1) * n];
            let mut acc = zero;
            for i in k + 1..n {
                acc += a[i * n + k].conj() * col[i];
            }
            w[j] = acc * tau;
        }
        for j in 0..n {
            let col = &mut q[j * n..(j + 1) * n];
            for i in k + 1..n {
                let u = a[i * n + k];
                col[i] -= u * w[j];
            }
        }
    }

    // Diagonal phase similarity making the subdiagonal real nonnegative.
    let mut e = vec![R::zero(); n];
    let mut ph = vec![Complex::new(R::one(), R::zero()); n];
    for k in 0..n - 1 {
        let t = sub[k];
        let mag = t.norm();
        e[k + 1] = mag;
        ph[k + 1] = if mag > R::zero() {
            ph[k] * (t / mag)
        } else {
            ph[k]
        };
    }
    for j in 0..n {
        let f = ph[j];
        for x in q[j * n..(j + 1) * n].iter_mut() {
            *x *= f;
        }
    }

    tql_implicit(&mut d, &mut e, n, |i, cos, sin| {
        let (left, right) = q.split_at_mut((i + 1) * n);
        let zi = &mut left[i * n..];
        let zi1 = &mut right[..n];
        for (x, y) in zi.iter_mut().zip(zi1.iter_mut()) {
            let f = *y;
            *y = *x * sin + f * cos;
            *x = *x * cos - f * sin;
        }
    })?;

    let order = sort_order(&d);
    let values: Vec<R> = order.iter().map(|&k| d[k]).collect();
    let mut sorted = vec![zero; n * n];
    for (dst, &src) in order.iter().enumerate() {
        sorted[dst * n..(dst + 1) * n].copy_from_slice(&q[src * n..(src + 1) * n]);
    }
    Ok((values, Some(sorted)))
}

fn sort_order<R: Real>(d: &[R]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..d.len()).collect();
    order.sort_by(|&i, &j| d[i].partial_cmp(&d[j]).expect("finite eigenvalues"));
    order
}

/// Householder reduction of a real symmetric matrix to tridiagonal form,
/// accumulating the orthogonal transform in `a` when `want_vectors` is set.
fn tred2<R: Real>(a: &mut [R], n: usize, d: &mut [R], e: &mut [R], want_vectors: bool) {
    let mut u = vec![R::zero(); n];
    for i in (1..n).rev() {
        let l = i - 1;
        let mut h = R::zero();
        if l > 0 {
            let mut scale = R::zero();
            for k in 0..=l {
                scale += a[i * n + k].abs();
            }
            if scale == R::zero() {
                e[i] = a[i * n + l];
            } else {
                for k in 0..=l {
                    a[i * n + k] /= scale;
                    h += a[i * n + k] * a[i * n + k];
                }
                let mut f = a[i * n + l];
                let g = if f >= R::zero() { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[i * n + l] = f - g;
                u[..=l].copy_from_slice(&a[i * n..i * n + l + 1]);
                // e[0..=l] = A u / h over the leading block, using symmetry so
                // every access walks rows.
                for item in e.iter_mut().take(l + 1) {
                    *item = R::zero();
                }
                for j in 0..=l {
                    let uj = u[j];
                    if want_vectors {
                        a[j * n + i] = uj / h;
                    }
                    let mut g = a[j * n + j] * uj;
                    let row = &a[j * n..j * n + j];
                    for (k, &ajk) in row.iter().enumerate() {
                        g += ajk * u[k];
                        e[k] += ajk * uj;
                    }
                    e[j] += g;
                }
                f = R::zero();
                for j in 0..=l {
                    e[j] /= h;
                    f += e[j] * u[j];
                }
                let hh = f / (h + h);
                for j in 0..=l {
                    let fj = u[j];
                    let gj = e[j] - hh * fj;
                    e[j] = gj;
                    let row = &mut a[j * n..j * n + j + 1];
                    for (k, r) in row.iter_mut().enumerate() {
                        *r -= fj * e[k] + gj * u[k];
                    }
                }
            }
        } else {
            e[i] = a[i * n + l];
        }
        d[i] = h;
    }
    d[0] = R::zero();
    e[0] = R::zero();
    if want_vectors {
        let mut w = vec![R::zero(); n];
        for i in 0..n {
            if d[i] != R::zero() {
                for item in w.iter_mut().take(i) {
                    *item = R::zero();
                }
                for k in 0..i {
                    let uik = a[i * n + k];
                    if uik != R::zero() {
                        let qrow = &a[k * n..k * n + i];
                        for (j, &qkj) in qrow.iter().enumerate() {
                            w[j] += uik * qkj;
                        }
                    }
                }
                for k in 0..i {
                    let cki = a[k * n + i];
                    let qrow = &mut a[k * n..k * n + i];
                    for (j, r) in qrow.iter_mut().enumerate() {
                        *r -= w[j] * cki;
                    }
                }
            }
            d[i] = a[i * n + i];
            a[i * n + i] = R::one();
            for j in 0..i {
                a[j * n + i] = R::zero();
                a[i * n + j] = R::zero();
            }
        }
    } else {
        for i in 0..n {
            d[i] = a[i * n + i];
        }
    }
}

/// Implicit-shift QL iteration on a symmetric tridiagonal matrix.
/// `e[i]` holds the subdiagonal element T[i][i-1] (e[0] unused on entry).
/// `rotate(i, c, s)` must apply the plane rotation to columns i and i+1 of
/// whatever eigenvector storage the caller maintains.
fn tql_implicit<R: Real>(
    d: &mut [R],
    e: &mut [R],
    n: usize,
    mut rotate: impl FnMut(usize, R, R),
) -> Result<()> {
    if n <= 1 {
        return Ok(());
    }
    for i in 1..n {
        e[i - 1] = e[i];
    }
    e[n - 1] = R::zero();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= R::epsilon() * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > MAX_QL_ITER {
                return Err(Error::InvalidWalk(format!(
                    "QL iteration failed to converge after {MAX_QL_ITER} sweeps"
                )));
            }
            let mut g = (d[l + 1] - d[l]) / (e[l] + e[l]);
            let mut r = g.hypot(R::one());
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = R::one();
            let mut c = R::one();
            let mut p = R::zero();
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == R::zero() {
                    d[i + 1] -= p;
                    e[m] = R::zero();
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + (c + c) * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                rotate(i, c, s);
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = R::zero();
        }
    }
    Ok(())
}
