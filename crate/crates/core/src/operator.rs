//! Dense linear operators on the N-spin Hilbert space.

use crate::error::{Error, Result};
use crate::linalg::eig::HermEigen;
use crate::linalg::CMat;
use crate::scalar::{Real, C};

/// Absolute entrywise tolerance under which an operator is flagged Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Dense complex square matrix with a Hermitian flag.
#[derive(Clone, Debug)]
pub struct Operator<R: Real> {
    mat: CMat<R>,
    hermitian: bool,
}

impl<R: Real> Operator<R> {
    /// Wrap a matrix, measuring the Hermitian defect to set the flag.
    pub fn from_matrix(mat: CMat<R>) -> Self {
        let hermitian = mat.hermitian_defect() <= R::of(HERMITIAN_TOL);
        Self { mat, hermitian }
    }

    /// Wrap a matrix known (by construction) to be exactly Hermitian or not.
    pub fn from_matrix_unchecked(mat: CMat<R>, hermitian: bool) -> Self {
        debug_assert!(!hermitian || mat.hermitian_defect() <= R::of(HERMITIAN_TOL));
        Self { mat, hermitian }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            mat: CMat::identity(dim),
            hermitian: true,
        }
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            mat: CMat::zeros(dim),
            hermitian: true,
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.n()
    }

    pub fn matrix(&self) -> &CMat<R> {
        &self.mat
    }

    pub fn into_matrix(self) -> CMat<R> {
        self.mat
    }

    pub fn hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn get(&self, i: usize, j: usize) -> C<R> {
        self.mat.get(i, j)
    }

    pub fn trace(&self) -> C<R> {
        self.mat.trace()
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self::from_matrix(self.mat.mul(&other.mat)))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            mat: self.mat.add(&other.mat),
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        Ok(Self {
            mat: self.mat.sub(&other.mat),
            hermitian: self.hermitian && other.hermitian,
        })
    }

    pub fn scale(&self, c: C<R>) -> Self {
        Self {
            mat: self.mat.scale(c),
            hermitian: self.hermitian && c.im == R::zero(),
        }
    }

    pub fn scale_re(&self, c: R) -> Self {
        Self {
            mat: self.mat.scale_re(c),
            hermitian: self.hermitian,
        }
    }

    pub fn adjoint(&self) -> Self {
        Self {
            mat: self.mat.adjoint(),
            hermitian: self.hermitian,
        }
    }

    pub fn matvec(&self, x: &[C<R>]) -> Vec<C<R>> {
        self.mat.matvec(x)
    }

    /// ⟨x|A|x⟩.
    pub fn expectation(&self, x: &[C<R>]) -> C<R> {
        crate::linalg::inner(x, &self.mat.matvec(x))
    }

    pub fn max_abs_diff(&self, other: &Self) -> R {
        self.mat.max_abs_diff(&other.mat)
    }

    pub fn kron(&self, other: &Self) -> Self {
        Self {
            mat: self.mat.kron(&other.mat),
            hermitian: self.hermitian && other.hermitian,
        }
    }

    /// U A U† for unitary U (preserves the Hermitian flag).
    pub fn conjugate_by(&self, u: &Self) -> Result<Self> {
        self.check_dim(u)?;
        let m = u.mat.mul(&self.mat).mul(&u.mat.adjoint());
        Ok(Self {
            mat: m,
            hermitian: self.hermitian,
        })
    }

    pub fn herm_eigen(&self) -> Result<HermEigen<R>> {
        self.require_hermitian()?;
        HermEigen::new(&self.mat)
    }

    pub fn eigenvalues(&self) -> Result<Vec<R>> {
        self.require_hermitian()?;
        HermEigen::values_only(&self.mat)
    }

    pub fn require_hermitian(&self) -> Result<()> {
        if self.hermitian {
            Ok(())
        } else {
            Err(Error::NotHermitian {
                defect: self.mat.hermitian_defect().to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    pub fn require_unitary(&self, tol: R) -> Result<()> {
        let defect = self.mat.unitary_defect();
        if defect <= tol {
            Ok(())
        } else {
            Err(Error::NotUnitary {
                defect: defect.to_f64().unwrap_or(f64::NAN),
            })
        }
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim() == other.dim() {
            Ok(())
        } else {
            Err(Error::DimMismatch {
                left: self.dim(),
                right: other.dim(),
            })
        }
    }
}

/// exp(scale·H) for Hermitian H, via the full eigendecomposition
/// V exp(scale·Λ) V†. The result is Hermitian positive definite.
pub fn hermitian_exp<R: Real>(h: &Operator<R>, scale: R) -> Result<Operator<R>> {
    let eig = h.herm_eigen()?;
    let mat = eig.apply_spectral(|x| (scale * x).exp());
    Ok(Operator::from_matrix_unchecked(mat, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn exp_of_zero_is_identity() {
        let h = Operator::<f64>::zeros(4);
        let e = hermitian_exp(&h, -2.5).unwrap();
        assert!(e.max_abs_diff(&Operator::identity(4)) < 1e-15);
    }

    #[test]
    fn exp_of_diagonal() {
        let mut m = CMat::zeros(2);
        m.set(0, 0, c(1.5, 0.0));
        m.set(1, 1, c(-0.5, 0.0));
        let h = Operator::from_matrix(m);
        let beta = 0.7;
        let e = hermitian_exp(&h, -beta).unwrap();
        assert!((e.get(0, 0).re - (-beta * 1.5f64).exp()).abs() < 1e-14);
        assert!((e.get(1, 1).re - (beta * 0.5f64).exp()).abs() < 1e-14);
        assert!(e.get(0, 1).norm() < 1e-15);
    }

    #[test]
    fn exp_inverse_property() {
        let mut m = CMat::zeros(3);
        for i in 0..3 {
            for j in 0..3 {
                let re = ((i * 3 + j) as f64).sin();
                m.set(i, j, c(re, 0.0));
            }
        }
        let sym = Operator::from_matrix(m.add(&m.adjoint()).scale_re(0.5));
        assert!(sym.hermitian());
        let a = hermitian_exp(&sym, -1.3).unwrap();
        let b = hermitian_exp(&sym, 1.3).unwrap();
        let prod = a.mul(&b).unwrap();
        assert!(prod.max_abs_diff(&Operator::identity(3)) < 1e-11);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = CMat::zeros(2);
        m.set(0, 1, c(1.0, 0.0));
        let op = Operator::from_matrix(m);
        assert!(!op.hermitian());
        assert!(matches!(
            hermitian_exp(&op, 1.0),
            Err(Error::NotHermitian { .. })
        ));
    }
}
