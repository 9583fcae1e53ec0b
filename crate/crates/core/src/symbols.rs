//! Covariant symbols ⟨Ω|A|Ω⟩, contravariant matrices A(F) = ∫F|Ω⟩⟨Ω|d̃Ω,
//! and the structural identities that tie them together: completeness,
//! trace, statistical duality and rotation intertwining.
//!
//! The measure d̃Ω is ((2s+1)/4π)^N dΩ; a product rule of degree
//! 4s + deg(F) per site makes every integral here exact up to rounding,
//! because the coherent projector entries are spherical polynomials of
//! degree ≤ 2s per site.

use crate::error::{Error, Result};
use crate::exact::{double_factorial, factorial};
use crate::linalg::CMat;
use crate::operator::Operator;
use crate::quadrature::ProductGrid;
use crate::scalar::{Real, C};
use crate::spin::{
    apply_site_op, coherent_vector_n, make_spin_matrices, rotation_from_unitary, Axis, PhasePoint,
    SpinRep,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

/// Ordered product of (site, axis) spin factors; order is significant since
/// same-site operators do not commute.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiIndexMonomial {
    factors: Vec<(usize, Axis)>,
}

impl MultiIndexMonomial {
    pub fn new(factors: Vec<(usize, Axis)>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::MonomialParse {
                position: 0,
                reason: "monomial must have at least one factor".into(),
            });
        }
        Ok(Self { factors })
    }

    /// Parse site-qualified tokens like "0x 1y 0z".
    pub fn parse(text: &str) -> Result<Self> {
        let mut factors = Vec::new();
        for (pos, token) in text.split_whitespace().enumerate() {
            let axis_char = token.chars().last().ok_or(Error::MonomialParse {
                position: pos + 1,
                reason: "empty token".into(),
            })?;
            let axis = match axis_char {
                'x' => Axis::X,
                'y' => Axis::Y,
                'z' => Axis::Z,
                other => {
                    return Err(Error::MonomialParse {
                        position: pos + 1,
                        reason: format!("unknown axis '{other}'"),
                    })
                }
            };
            let site_str = &token[..token.len() - 1];
            let site: usize = site_str.parse().map_err(|_| Error::MonomialParse {
                position: pos + 1,
                reason: format!("bad site index '{site_str}'"),
            })?;
            factors.push((site, axis));
        }
        Self::new(factors)
    }

    pub fn factors(&self) -> &[(usize, Axis)] {
        &self.factors
    }

    pub fn degree(&self) -> usize {
        self.factors.len()
    }

    fn check_sites(&self, rep: &SpinRep) -> Result<()> {
        for &(site, _) in &self.factors {
            if site >= rep.n_sites() {
                return Err(Error::SiteOutOfRange {
                    site,
                    n_sites: rep.n_sites(),
                });
            }
        }
        Ok(())
    }

    /// Classical counterpart Π Ω_{μ,i}.
    pub fn classical<R: Real>(&self, point: &PhasePoint<R>) -> R {
        self.factors
            .iter()
            .map(|&(site, axis)| point.component(site, axis))
            .fold(R::one(), |a, b| a * b)
    }
}

/// ((2s+1)/4π)^N, the density of d̃Ω with respect to dΩ.
pub fn measure_factor<R: Real>(rep: &SpinRep) -> R {
    let per_site = R::from_count(rep.site_dim()) / (R::of(4.0) * R::PI());
    per_site.powi(rep.n_sites() as i32)
}

/// Covariant symbol g(A)(Ω) = ⟨Ω|A|Ω⟩.
pub fn covariant_symbol<R: Real>(
    a: &Operator<R>,
    point: &PhasePoint<R>,
    rep: &SpinRep,
) -> Result<C<R>> {
    if a.dim() != rep.dim() {
        return Err(Error::DimMismatch {
            left: a.dim(),
            right: rep.dim(),
        });
    }
    let v = coherent_vector_n(rep, point)?;
    Ok(a.expectation(&v))
}

/// ⟨Ω| ŝ_{j₁}…ŝ_{j_p} |Ω⟩ for scaled operators ŝ = s_op/s, evaluated by
/// applying the site-local factors to the coherent state. This is the dense
/// matrix oracle the walk expansion is checked against.
pub fn monomial_symbol_direct<R: Real>(
    m: &MultiIndexMonomial,
    point: &PhasePoint<R>,
    rep: &SpinRep,
) -> Result<C<R>> {
    m.check_sites(rep)?;
    let mats = make_spin_matrices::<R>(&rep.site_rep())?;
    let inv_s = R::one() / rep.s_value::<R>();
    let scaled = [
        mats.s1.matrix().scale_re(inv_s),
        mats.s2.matrix().scale_re(inv_s),
        mats.s3.matrix().scale_re(inv_s),
    ];
    let omega = coherent_vector_n(rep, point)?;
    let mut v = omega.clone();
    for &(site, axis) in m.factors.iter().rev() {
        v = apply_site_op(&scaled[axis.index()], site, rep, &v)?;
    }
    Ok(crate::linalg::inner(&omega, &v))
}

type PhaseFn<'a, R> = Box<dyn Fn(&PhasePoint<R>) -> C<R> + 'a>;

/// A phase-space function together with its declared polynomial degree,
/// which drives the quadrature exactness of A(F).
pub struct ContravariantInput<'a, R: Real> {
    f: PhaseFn<'a, R>,
    degree: usize,
}

impl<'a, R: Real> ContravariantInput<'a, R> {
    pub fn new(degree: usize, f: impl Fn(&PhasePoint<R>) -> C<R> + 'a) -> Self {
        Self {
            f: Box::new(f),
            degree,
        }
    }

    /// Real-valued function helper.
    pub fn real(degree: usize, f: impl Fn(&PhasePoint<R>) -> R + 'a) -> Self {
        Self::new(degree, move |p| C::new(f(p), R::zero()))
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn eval(&self, p: &PhasePoint<R>) -> C<R> {
        (self.f)(p)
    }
}

/// Quadrature degree required for exact A(F) assembly: 4s + deg(F) per site.
pub fn required_degree(rep: &SpinRep, f_degree: usize) -> usize {
    2 * rep.two_s() as usize + f_degree
}

/// Contravariant matrix A(F) = ∫ F(Ω) |Ω⟩⟨Ω| d̃Ω by streaming rank-1
/// accumulation. `quad_degree` may raise (never lower) the default
/// exactness degree 4s + deg F.
///
/// The covariant symbol of the result is not F: g(A(F)) and F are related
/// but distinct functions (F ↦ A(F) is many-to-one, g is injective on
/// operators), so no round-trip identity holds or is claimed.
pub fn contravariant_matrix<R: Real>(
    input: &ContravariantInput<R>,
    rep: &SpinRep,
    quad_degree: Option<usize>,
) -> Result<Operator<R>> {
    let need = required_degree(rep, input.degree());
    let degree = quad_degree.unwrap_or(need);
    if degree < need {
        return Err(Error::DegreeTooLow {
            need,
            got: degree,
        });
    }
    let grid = ProductGrid::<R>::with_degree(degree, rep.n_sites())?;
    let mut acc = CMat::<R>::zeros(rep.dim());
    let mut failure = None;
    grid.for_each_node(|point, w| {
        if failure.is_some() {
            return;
        }
        match coherent_vector_n(rep, point) {
            Ok(v) => acc.rank1_update(input.eval(point) * w, &v),
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let scaled = acc.scale_re(measure_factor::<R>(rep));
    Ok(Operator::from_matrix(scaled))
}

/// Exact coefficients of A(zⁿ) = Σ_k a_k s₃^k (k ≡ n mod 2), as rationals
/// in big-integer arithmetic. Supplied for 1 ≤ n ≤ 7.
pub fn a_zn_coefficients(n: usize, rep: &SpinRep) -> Result<Vec<(usize, BigRational)>> {
    if rep.n_sites() != 1 {
        return Err(Error::SiteCountMismatch {
            expected: 1,
            got: rep.n_sites(),
        });
    }
    if n == 0 || n > 7 {
        return Err(Error::CoefficientOrder { n });
    }
    let two_s = rep.two_s() as usize;
    let mut out = Vec::new();
    let mut k = n;
    loop {
        let j = (n - k) / 2;
        let coeff = if k == 0 {
            // a_0 = (n-1)!! (1+2s)!! / (1+n+2s)!!  (even n)
            BigRational::new(
                double_factorial(n - 1) * double_factorial(two_s + 1),
                double_factorial(n + two_s + 1),
            )
        } else {
            a_zn_coefficient_k(n, j, two_s)?
        };
        out.push((k, coeff));
        if k < 2 {
            break;
        }
        k -= 2;
    }
    Ok(out)
}

/// Coefficient a_{n-2j} for j = 0..=3 from the closed formulas; s enters as
/// the half-integer two_s/2, so every numerator is assembled over a power of
/// two denominator.
fn a_zn_coefficient_k(n: usize, j: usize, two_s: usize) -> Result<BigRational> {
    let big = BigInt::from;
    let nn = n as i64;
    let ts = two_s as i64;
    let base = BigRational::new(
        BigInt::one() << n,
        BigInt::one(),
    ) * BigRational::new(factorial(two_s + 1), factorial(n + two_s + 1));
    let value = match j {
        0 => base,
        1 => {
            // n! (1 + n + 3s) / (2·3! (n-2)!)
            let poly = BigRational::new(big(2 + 2 * nn + 3 * ts), big(2));
            base * BigRational::new(factorial(n), big(12) * factorial(n - 2)) * poly
        }
        2 => {
            // n! (-2 + n(3+5n) + 15 s (1 + 2n + 3s)) / (2·6! (n-4)!)
            let c0 = 4 * (-2 + nn * (3 + 5 * nn));
            let poly = BigRational::new(
                big(c0) + big(30 + 60 * nn) * big(ts) + big(45) * big(ts) * big(ts),
                big(4),
            );
            base * BigRational::new(factorial(n), big(1440) * factorial(n - 4)) * poly
        }
        3 => {
            // n! ((1+n)(12 + 7n(5n-11)) + 63(n-1)(3+5n)s + 945 n s² + 945 s³) / (9! (n-6)!)
            let c0 = 8 * ((1 + nn) * (12 + 7 * nn * (5 * nn - 11)));
            let c1 = 4 * (63 * (nn - 1) * (3 + 5 * nn));
            let c2 = 2 * 945 * nn;
            let poly = BigRational::new(
                big(c0)
                    + big(c1) * big(ts)
                    + big(c2) * big(ts) * big(ts)
                    + big(945) * big(ts) * big(ts) * big(ts),
                big(8),
            );
            base * BigRational::new(factorial(n), big(362880) * factorial(n - 6)) * poly
        }
        _ => return Err(Error::CoefficientOrder { n }),
    };
    Ok(value)
}

/// Σ a_k s₃^k reconstructed as a dense operator.
pub fn a_zn_operator<R: Real>(n: usize, rep: &SpinRep) -> Result<Operator<R>> {
    let coeffs = a_zn_coefficients(n, rep)?;
    let mats = make_spin_matrices::<R>(&rep.site_rep())?;
    let q = rep.site_dim();
    // s₃ is diagonal, so Σ a_k s₃^k is assembled entrywise.
    let mut mat = CMat::<R>::zeros(q);
    for i in 0..q {
        let m = mats.s3.get(i, i).re;
        let mut acc = R::zero();
        for (k, a) in &coeffs {
            acc += crate::exact::ratio_to_real::<R>(a) * m.powi(*k as i32);
        }
        mat.set(i, i, C::new(acc, R::zero()));
    }
    Ok(Operator::from_matrix_unchecked(mat, true))
}

/// Max-entry norm of ((2s+1)/4π)^N ∫|Ω⟩⟨Ω|dΩ − 1 at the given quadrature
/// degree (which must be at least 4s per site).
pub fn completeness_defect<R: Real>(rep: &SpinRep, degree: usize) -> Result<R> {
    let one = ContravariantInput::real(0, |_| R::one());
    let rebuilt = contravariant_matrix(&one, rep, Some(degree))?;
    Ok(rebuilt.matrix().sub(&CMat::identity(rep.dim())).max_abs())
}

/// |Tr(W·A(F)) − ∫ g(W) F d̃Ω|, both sides evaluated with the same rule so
/// the duality identity itself is tested rather than the quadrature.
pub fn duality_gap<R: Real>(
    w: &Operator<R>,
    f: &ContravariantInput<R>,
    rep: &SpinRep,
) -> Result<R> {
    check_state(w, rep)?;
    let degree = required_degree(rep, f.degree());
    let a_f = contravariant_matrix(f, rep, Some(degree))?;
    let lhs = crate::spin::trace_prod(w.matrix(), a_f.matrix());

    let grid = ProductGrid::<R>::with_degree(degree, rep.n_sites())?;
    let mut failure = None;
    let mut acc = crate::quadrature::ChunkedSum::<R>::new();
    grid.for_each_node(|point, weight| {
        if failure.is_some() {
            return;
        }
        match coherent_vector_n(rep, point) {
            Ok(v) => acc.push(w.expectation(&v) * f.eval(point) * weight),
            Err(e) => failure = Some(e),
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let rhs = acc.finish() * measure_factor::<R>(rep);
    Ok((lhs - rhs).norm())
}

fn check_state<R: Real>(w: &Operator<R>, rep: &SpinRep) -> Result<()> {
    let tol = R::of(1e-10);
    if w.dim() != rep.dim() {
        return Err(Error::DimMismatch {
            left: w.dim(),
            right: rep.dim(),
        });
    }
    if !w.hermitian() {
        return Err(Error::NotAState {
            reason: "not Hermitian".into(),
        });
    }
    let tr = w.trace();
    if (tr.re - R::one()).abs() > tol || tr.im.abs() > tol {
        return Err(Error::NotAState {
            reason: format!("trace {} differs from 1", tr.re),
        });
    }
    let min = w
        .eigenvalues()?
        .first()
        .copied()
        .unwrap_or_else(R::zero);
    if min < -tol {
        return Err(Error::NotAState {
            reason: format!("negative eigenvalue {min:e}"),
        });
    }
    Ok(())
}

/// Max-entry norm of U_g A(F) U_g† − A(F∘R_g⁻¹) for the rotation generated
/// by (θ_g, φ_g) on a single site.
pub fn intertwining_defect<R: Real>(
    theta_g: R,
    phi_g: R,
    f: &ContravariantInput<R>,
    rep: &SpinRep,
) -> Result<R> {
    if rep.n_sites() != 1 {
        return Err(Error::SiteCountMismatch {
            expected: 1,
            got: rep.n_sites(),
        });
    }
    let u = crate::spin::rotation_unitary(rep, theta_g, phi_g)?;
    let r = rotation_from_unitary(&u, rep)?;
    let a_f = contravariant_matrix(f, rep, None)?;
    let lhs = a_f.conjugate_by(&u)?;

    // F ∘ R⁻¹ = F(Rᵀ Ω); same declared degree.
    let composed = ContravariantInput::new(f.degree(), move |p: &PhasePoint<R>| {
        let v = p.cartesian(0);
        let mut rotated = [R::zero(); 3];
        for (i, out) in rotated.iter_mut().enumerate() {
            for (j, vj) in v.iter().enumerate() {
                *out += r[j][i] * *vj;
            }
        }
        let back = PhasePoint::from_cartesian(&[rotated]).expect("rotation preserves the sphere");
        f.eval(&back)
    });
    let rhs = contravariant_matrix(&composed, rep, None)?;
    Ok(lhs.max_abs_diff(&rhs))
}
