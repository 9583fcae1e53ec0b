//! Spin representations, spin matrices, rotation unitaries, coherent states
//! and phase-space points.
//!
//! Conventions: the spin quantum number s is carried everywhere as the
//! integer `two_s` = 2s, and the single-site basis is ordered by descending
//! magnetic quantum number (index 0 ↔ m = s), so |s,...,s⟩ is the first
//! basis vector of the N-site space. Site 0 is the leftmost tensor factor.

use crate::error::{Error, Result};
use crate::linalg::CMat;
use crate::operator::Operator;
use crate::scalar::{Real, C};
use num_complex::Complex;
use rand::Rng;
use serde::Deserialize;

/// Default cap on the Hilbert dimension (2s+1)^N.
pub const DEFAULT_DIM_CAP: usize = 4096;

/// Cartesian spin axis, numbered 1, 2, 3 (x, y, z).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    /// 0-based component index into a Cartesian vector.
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }

    pub fn from_index(i: usize) -> Option<Axis> {
        match i {
            0 => Some(Axis::X),
            1 => Some(Axis::Y),
            2 => Some(Axis::Z),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Axis::X => "x",
            Axis::Y => "y",
            Axis::Z => "z",
        }
    }
}

/// Spin quantum number (as 2s) and site count; fixes the Hilbert dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SpinRep {
    two_s: u32,
    n_sites: usize,
    dim_cap: usize,
}

impl SpinRep {
    pub fn new(two_s: u32, n_sites: usize) -> Result<Self> {
        Self::with_dim_cap(two_s, n_sites, DEFAULT_DIM_CAP)
    }

    pub fn with_dim_cap(two_s: u32, n_sites: usize, dim_cap: usize) -> Result<Self> {
        if two_s == 0 {
            return Err(Error::TrivialRep);
        }
        if n_sites == 0 {
            return Err(Error::NoSites);
        }
        let site_dim = two_s as usize + 1;
        let mut dim = 1usize;
        for _ in 0..n_sites {
            dim = dim.checked_mul(site_dim).ok_or(Error::DimOverflow)?;
        }
        if dim > dim_cap {
            return Err(Error::DimCap { dim, cap: dim_cap });
        }
        Ok(Self {
            two_s,
            n_sites,
            dim_cap,
        })
    }

    pub fn two_s(&self) -> u32 {
        self.two_s
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim_cap(&self) -> usize {
        self.dim_cap
    }

    /// Single-site dimension 2s+1.
    pub fn site_dim(&self) -> usize {
        self.two_s as usize + 1
    }

    /// Full Hilbert dimension (2s+1)^N.
    pub fn dim(&self) -> usize {
        self.site_dim().pow(self.n_sites as u32)
    }

    /// The spin quantum number s as a float.
    pub fn s_value<R: Real>(&self) -> R {
        R::from_count(self.two_s as usize) / R::of(2.0)
    }

    /// Same spin, single site (used for building site-local operators).
    pub fn site_rep(&self) -> SpinRep {
        SpinRep {
            two_s: self.two_s,
            n_sites: 1,
            dim_cap: self.dim_cap,
        }
    }
}

/// A point of the classical phase space: one unit vector per site, stored as
/// polar/azimuthal angles. At the poles (sin θ = 0) the azimuth is kept but
/// physically irrelevant; points constructed from Cartesian coordinates get
/// φ = 0 there.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint<R: Real> {
    sites: Vec<(R, R)>,
}

impl<R: Real> PhasePoint<R> {
    pub fn new(angles: Vec<(R, R)>) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::NoSites);
        }
        let mut sites = Vec::with_capacity(angles.len());
        for (theta, phi) in angles {
            if !(theta >= -R::of(1e-12) && theta <= R::PI() + R::of(1e-12)) {
                return Err(Error::InvalidPoint(format!(
                    "theta {theta} outside [0, pi]"
                )));
            }
            let theta = theta.max(R::zero()).min(R::PI());
            let tau = R::PI() + R::PI();
            let mut phi = phi % tau;
            if phi < R::zero() {
                phi += tau;
            }
            sites.push((theta, phi));
        }
        Ok(Self { sites })
    }

    pub fn single(theta: R, phi: R) -> Self {
        Self::new(vec![(theta, phi)]).expect("angles in range")
    }

    pub fn from_cartesian(vectors: &[[R; 3]]) -> Result<Self> {
        let mut angles = Vec::with_capacity(vectors.len());
        for v in vectors {
            let norm_sq = v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
            if (norm_sq - R::one()).abs() > R::of(1e-8) {
                return Err(Error::InvalidPoint(format!(
                    "vector norm^2 = {norm_sq}, expected 1"
                )));
            }
            let theta = v[2].max(-R::one()).min(R::one()).acos();
            let phi = if v[0] == R::zero() && v[1] == R::zero() {
                R::zero()
            } else {
                v[1].atan2(v[0])
            };
            angles.push((theta, phi));
        }
        Self::new(angles)
    }

    /// Uniformly random point (u = cos θ uniform, φ uniform).
    pub fn random(n_sites: usize, rng: &mut impl Rng) -> Self {
        let sites = (0..n_sites)
            .map(|_| {
                let u: f64 = rng.gen_range(-1.0..=1.0);
                let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
                (R::of(u.acos()), R::of(phi))
            })
            .collect();
        Self { sites }
    }

    pub fn n_sites(&self) -> usize {
        self.sites.len()
    }

    pub fn theta(&self, site: usize) -> R {
        self.sites[site].0
    }

    pub fn phi(&self, site: usize) -> R {
        self.sites[site].1
    }

    /// Cartesian unit vector of one site.
    pub fn cartesian(&self, site: usize) -> [R; 3] {
        let (theta, phi) = self.sites[site];
        let st = theta.sin();
        [st * phi.cos(), st * phi.sin(), theta.cos()]
    }

    /// Component Ω_{μ,i}.
    pub fn component(&self, site: usize, axis: Axis) -> R {
        self.cartesian(site)[axis.index()]
    }
}

/// Coefficients of the rotated spin operator
/// U†(Ω) s_i U(Ω) = c3·s_3 + c_minus·s_- + c_plus·s_+.
#[derive(Clone, Copy, Debug)]
pub struct RotatedCoeffs<R: Real> {
    pub c3: R,
    pub c_minus: C<R>,
    pub c_plus: C<R>,
}

impl<R: Real> RotatedCoeffs<R> {
    /// Coefficient selected by a walk step: 0 ↦ c3, -1 ↦ c_minus, +1 ↦ c_plus.
    pub fn step_factor(&self, step: i8) -> C<R> {
        match step {
            0 => Complex::new(self.c3, R::zero()),
            -1 => self.c_minus,
            1 => self.c_plus,
            _ => unreachable!("steps are -1, 0, +1"),
        }
    }
}

/// Coefficient functions s_{i,3}, s_{i,-}, s_{i,+} of the rotated operators.
pub fn rotated_coeffs<R: Real>(axis: Axis, theta: R, phi: R) -> RotatedCoeffs<R> {
    let (st, ct) = (theta.sin(), theta.cos());
    let (sp, cp) = (phi.sin(), phi.cos());
    let half = R::of(0.5);
    let eip = Complex::from_polar(R::one(), phi);
    let eim = eip.conj();
    match axis {
        Axis::X => {
            let inner = Complex::new(ct * cp, -sp);
            let c_minus = eip * inner * half;
            RotatedCoeffs {
                c3: st * cp,
                c_minus,
                c_plus: c_minus.conj(),
            }
        }
        Axis::Y => {
            let inner = Complex::new(ct * sp, cp);
            let c_minus = eip * inner * half;
            RotatedCoeffs {
                c3: st * sp,
                c_minus,
                c_plus: c_minus.conj(),
            }
        }
        Axis::Z => {
            let c_minus = eip * (-half * st);
            RotatedCoeffs {
                c3: ct,
                c_minus,
                c_plus: eim * (-half * st),
            }
        }
    }
}

/// The five standard single-site spin matrices.
pub struct SpinMatrices<R: Real> {
    pub s1: Operator<R>,
    pub s2: Operator<R>,
    pub s3: Operator<R>,
    pub s_plus: Operator<R>,
    pub s_minus: Operator<R>,
}

impl<R: Real> SpinMatrices<R> {
    pub fn axis(&self, axis: Axis) -> &Operator<R> {
        match axis {
            Axis::X => &self.s1,
            Axis::Y => &self.s2,
            Axis::Z => &self.s3,
        }
    }
}

/// Single-site spin matrices in the descending-m basis.
pub fn make_spin_matrices<R: Real>(rep: &SpinRep) -> Result<SpinMatrices<R>> {
    if rep.n_sites() != 1 {
        return Err(Error::SiteCountMismatch {
            expected: 1,
            got: rep.n_sites(),
        });
    }
    let two_s = rep.two_s();
    let q = rep.site_dim();
    let zero = Complex::new(R::zero(), R::zero());
    let half = R::of(0.5);

    let mut s3 = CMat::zeros(q);
    for k in 0..q {
        // m = s - k
        let m = (R::from_count(two_s as usize) - R::of(2.0) * R::from_count(k)) * half;
        s3.set(k, k, Complex::new(m, R::zero()));
    }
    let mut s_plus = CMat::zeros(q);
    let mut s_minus = CMat::zeros(q);
    for k in 1..q {
        // ⟨m+1|s_+|m⟩ = sqrt((s-m)(s+m+1)) with a = s-m = k
        let val = (R::from_count(k) * R::from_count(two_s as usize - k + 1)).sqrt();
        s_plus.set(k - 1, k, Complex::new(val, R::zero()));
        s_minus.set(k, k - 1, Complex::new(val, R::zero()));
    }
    let mut s1 = CMat::zeros(q);
    let mut s2 = CMat::zeros(q);
    for i in 0..q {
        for j in 0..q {
            let p = s_plus.get(i, j);
            let m = s_minus.get(i, j);
            if p != zero || m != zero {
                s1.set(i, j, (p + m) * half);
                // (s_+ - s_-) / (2i) = -i/2 (s_+ - s_-)
                s2.set(i, j, (p - m) * Complex::new(R::zero(), -half));
            }
        }
    }
    Ok(SpinMatrices {
        s1: Operator::from_matrix_unchecked(s1, true),
        s2: Operator::from_matrix_unchecked(s2, true),
        s3: Operator::from_matrix_unchecked(s3, true),
        s_plus: Operator::from_matrix(s_plus),
        s_minus: Operator::from_matrix(s_minus),
    })
}

/// Embed a single-site operator at `site`, identities elsewhere
/// (site 0 leftmost).
pub fn embed_site<R: Real>(op: &Operator<R>, site: usize, rep: &SpinRep) -> Result<Operator<R>> {
    if site >= rep.n_sites() {
        return Err(Error::SiteOutOfRange {
            site,
            n_sites: rep.n_sites(),
        });
    }
    let q = rep.site_dim();
    if op.dim() != q {
        return Err(Error::DimMismatch {
            left: op.dim(),
            right: q,
        });
    }
    let left = q.pow(site as u32);
    let right = q.pow((rep.n_sites() - 1 - site) as u32);
    let mut out = Operator::identity(left).kron(op);
    if right > 1 {
        out = out.kron(&Operator::identity(right));
    }
    Ok(out)
}

/// Apply a single-site operator to a full N-site state vector without
/// materializing the embedded matrix. O(dim · site_dim) instead of O(dim²).
pub fn apply_site_op<R: Real>(
    op: &CMat<R>,
    site: usize,
    rep: &SpinRep,
    x: &[C<R>],
) -> Result<Vec<C<R>>> {
    if site >= rep.n_sites() {
        return Err(Error::SiteOutOfRange {
            site,
            n_sites: rep.n_sites(),
        });
    }
    let q = rep.site_dim();
    let dim = rep.dim();
    if op.n() != q || x.len() != dim {
        return Err(Error::DimMismatch {
            left: op.n() * x.len(),
            right: q * dim,
        });
    }
    let stride = q.pow((rep.n_sites() - 1 - site) as u32);
    let block = stride * q;
    let zero = Complex::new(R::zero(), R::zero());
    let mut y = vec![zero; dim];
    let mut local = vec![zero; q];
    for outer in (0..dim).step_by(block) {
        for inner in 0..stride {
            let off = outer + inner;
            for (r, l) in local.iter_mut().enumerate() {
                let mut acc = zero;
                for c in 0..q {
                    acc += op.get(r, c) * x[off + c * stride];
                }
                *l = acc;
            }
            for (r, l) in local.iter().enumerate() {
                y[off + r * stride] = *l;
            }
        }
    }
    Ok(y)
}

/// The rotation unitary U(Ω) = exp[(θ/2)(e^{iφ} s_- − e^{-iφ} s_+)].
pub fn rotation_unitary<R: Real>(rep: &SpinRep, theta: R, phi: R) -> Result<Operator<R>> {
    if rep.n_sites() != 1 {
        return Err(Error::SiteCountMismatch {
            expected: 1,
            got: rep.n_sites(),
        });
    }
    let mats = make_spin_matrices::<R>(rep)?;
    let half_theta = theta * R::of(0.5);
    let eip = Complex::from_polar(R::one(), phi);
    // X = (θ/2)(e^{iφ} s_- − e^{-iφ} s_+) is anti-Hermitian; H = iX is
    // Hermitian and U = exp(X) = exp(-iH).
    let i_unit = Complex::new(R::zero(), R::one());
    let x = mats
        .s_minus
        .scale(eip * half_theta)
        .sub(&mats.s_plus.scale(eip.conj() * half_theta))?;
    let h = Operator::from_matrix(x.matrix().scale(i_unit));
    let eig = h.herm_eigen()?;
    let u = eig.apply_spectral_complex(|lambda| Complex::from_polar(R::one(), -lambda));
    Ok(Operator::from_matrix(u))
}

/// Single-site spin coherent state |Ω⟩ = U(Ω)|s⟩ in closed form.
pub fn coherent_vector<R: Real>(rep: &SpinRep, theta: R, phi: R) -> Vec<C<R>> {
    let two_s = rep.two_s();
    let q = rep.site_dim();
    let half = R::of(0.5);
    let (c, s) = ((theta * half).cos(), (theta * half).sin());
    let mut v = Vec::with_capacity(q);
    for k in 0..q {
        // index k ↔ m = s - k
        let binom = num_traits::ToPrimitive::to_f64(&crate::exact::binomial(two_s as usize, k))
            .expect("binomial fits f64");
        let amp = R::of(binom).sqrt()
            * c.powi((two_s - k as u32) as i32)
            * s.powi(k as i32);
        let phase = Complex::from_polar(R::one(), R::from_count(k) * phi);
        v.push(phase * amp);
    }
    v
}

/// N-site coherent state |Ω₁⟩ ⊗ ... ⊗ |Ω_N⟩.
pub fn coherent_vector_n<R: Real>(rep: &SpinRep, point: &PhasePoint<R>) -> Result<Vec<C<R>>> {
    if point.n_sites() != rep.n_sites() {
        return Err(Error::SiteCountMismatch {
            expected: rep.n_sites(),
            got: point.n_sites(),
        });
    }
    let site_rep = rep.site_rep();
    let mut v = vec![Complex::new(R::one(), R::zero())];
    for mu in 0..rep.n_sites() {
        let site = coherent_vector(&site_rep, point.theta(mu), point.phi(mu));
        let mut out = Vec::with_capacity(v.len() * site.len());
        for &a in &v {
            for &b in &site {
                out.push(a * b);
            }
        }
        v = out;
    }
    Ok(v)
}

/// Extract the SO(3) rotation R with R_{ji} = Tr(s_j U s_i U†)/Tr(s_j²).
pub fn rotation_from_unitary<R: Real>(u: &Operator<R>, rep: &SpinRep) -> Result<[[R; 3]; 3]> {
    u.require_unitary(R::of(1e-10))?;
    let mats = make_spin_matrices::<R>(&rep.site_rep())?;
    let denom = trace_prod(mats.s3.matrix(), mats.s3.matrix()).re;
    let mut r = [[R::zero(); 3]; 3];
    for i in 0..3 {
        let rotated = mats
            .axis(Axis::from_index(i).expect("axis"))
            .conjugate_by(u)?;
        for (j, row) in r.iter_mut().enumerate() {
            let sj = mats.axis(Axis::from_index(j).expect("axis"));
            row[i] = trace_prod(sj.matrix(), rotated.matrix()).re / denom;
        }
    }
    // R must be in SO(3): orthogonal with determinant +1.
    let mut ortho_defect = R::zero();
    for a in 0..3 {
        for b in 0..3 {
            let mut dot = R::zero();
            for row in &r {
                dot += row[a] * row[b];
            }
            let target = if a == b { R::one() } else { R::zero() };
            ortho_defect = ortho_defect.max((dot - target).abs());
        }
    }
    let det = r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
        - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
        + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0]);
    let defect = ortho_defect.max((det - R::one()).abs());
    if defect > R::of(1e-10) {
        return Err(Error::NotRotation {
            defect: defect.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(r)
}

/// Tr(A·B) without forming the product.
pub fn trace_prod<R: Real>(a: &CMat<R>, b: &CMat<R>) -> C<R> {
    let n = a.n();
    assert_eq!(n, b.n());
    let mut acc = Complex::new(R::zero(), R::zero());
    for i in 0..n {
        for k in 0..n {
            acc += a.get(i, k) * b.get(k, i);
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{inner, norm};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    type Op = Operator<f64>;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn single(two_s: u32) -> SpinRep {
        SpinRep::new(two_s, 1).unwrap()
    }

    #[test]
    fn rep_validation() {
        assert!(matches!(SpinRep::new(0, 1), Err(Error::TrivialRep)));
        assert!(matches!(SpinRep::new(1, 0), Err(Error::NoSites)));
        // 3^8 = 6561 > 4096
        assert!(matches!(SpinRep::new(2, 8), Err(Error::DimCap { .. })));
        assert!(SpinRep::with_dim_cap(2, 8, 10_000).is_ok());
        assert_eq!(SpinRep::new(40, 2).unwrap().dim(), 1681);
    }

    #[test]
    fn spin_half_matrices_are_pauli_over_two() {
        let m = make_spin_matrices::<f64>(&single(1)).unwrap();
        assert_eq!(m.s3.get(0, 0), c(0.5, 0.0));
        assert_eq!(m.s3.get(1, 1), c(-0.5, 0.0));
        assert_eq!(m.s_plus.get(0, 1), c(1.0, 0.0));
        assert_eq!(m.s1.get(0, 1), c(0.5, 0.0));
        assert_eq!(m.s2.get(0, 1), c(0.0, -0.5));
        assert_eq!(m.s2.get(1, 0), c(0.0, 0.5));
    }

    #[test]
    fn spin_one_raising_entries() {
        // Both nonzero s_+ entries are sqrt(2) for s = 1.
        let m = make_spin_matrices::<f64>(&single(2)).unwrap();
        let r2 = 2.0f64.sqrt();
        assert!((m.s_plus.get(0, 1).re - r2).abs() < 1e-15);
        assert!((m.s_plus.get(1, 2).re - r2).abs() < 1e-15);
    }

    #[test]
    fn s3_eigenvalues_descend_from_s() {
        for two_s in [1u32, 2, 3, 7, 10] {
            let m = make_spin_matrices::<f64>(&single(two_s)).unwrap();
            let s = two_s as f64 / 2.0;
            for k in 0..=two_s {
                let expect = s - k as f64;
                assert_eq!(m.s3.get(k as usize, k as usize).re, expect);
            }
        }
    }

    #[test]
    fn commutator_and_casimir() {
        for two_s in [1u32, 2, 5, 13, 40] {
            let m = make_spin_matrices::<f64>(&single(two_s)).unwrap();
            let s = two_s as f64 / 2.0;
            // [s1, s2] = i s3
            let comm = m
                .s1
                .mul(&m.s2)
                .unwrap()
                .sub(&m.s2.mul(&m.s1).unwrap())
                .unwrap();
            let target = m.s3.scale(c(0.0, 1.0));
            assert!(comm.max_abs_diff(&target) < 1e-13 * (two_s as f64));
            // s1² + s2² + s3² = s(s+1) 1
            let casimir = m
                .s1
                .mul(&m.s1)
                .unwrap()
                .add(&m.s2.mul(&m.s2).unwrap())
                .unwrap()
                .add(&m.s3.mul(&m.s3).unwrap())
                .unwrap();
            let expect = Op::identity(m.s1.dim()).scale_re(s * (s + 1.0));
            assert!(casimir.max_abs_diff(&expect) < 1e-11);
        }
    }

    #[test]
    fn embed_identity_and_site_ordering() {
        let rep = SpinRep::new(1, 2).unwrap();
        let m = make_spin_matrices::<f64>(&rep.site_rep()).unwrap();
        let id = embed_site(&Op::identity(2), 0, &rep).unwrap();
        assert!(id.max_abs_diff(&Op::identity(4)) < 1e-15);
        // s3 at site 0 (leftmost) is diag(1/2, 1/2, -1/2, -1/2)
        let s3_site0 = embed_site(&m.s3, 0, &rep).unwrap();
        let expect = [0.5, 0.5, -0.5, -0.5];
        for (i, &e) in expect.iter().enumerate() {
            assert_eq!(s3_site0.get(i, i).re, e);
        }
        // disjoint sites commute exactly
        let s3_site1 = embed_site(&m.s3, 1, &rep).unwrap();
        let ab = s3_site0.mul(&s3_site1).unwrap();
        let ba = s3_site1.mul(&s3_site0).unwrap();
        assert_eq!(ab.max_abs_diff(&ba), 0.0);
        assert!(matches!(
            embed_site(&m.s3, 2, &rep),
            Err(Error::SiteOutOfRange { .. })
        ));
    }

    #[test]
    fn apply_site_op_matches_embedding() {
        let rep = SpinRep::new(3, 3).unwrap();
        let m = make_spin_matrices::<f64>(&rep.site_rep()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x: Vec<Complex64> = (0..rep.dim())
            .map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        for site in 0..3 {
            for op in [&m.s1, &m.s2, &m.s_plus] {
                let embedded = embed_site(op, site, &rep).unwrap();
                let direct = embedded.matvec(&x);
                let fast = apply_site_op(op.matrix(), site, &rep, &x).unwrap();
                let worst = direct
                    .iter()
                    .zip(&fast)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0f64, f64::max);
                assert!(worst < 1e-13);
            }
        }
    }

    #[test]
    fn rotated_coeffs_axis3_closed_form() {
        let (theta, phi) = (0.9f64, 2.3f64);
        let rc = rotated_coeffs::<f64>(Axis::Z, theta, phi);
        assert!((rc.c3 - theta.cos()).abs() < 1e-15);
        let expect = Complex64::from_polar(1.0, phi) * (-0.5 * theta.sin());
        assert!((rc.c_minus - expect).norm() < 1e-15);
        assert!((rc.c_plus - rc.c_minus.conj()).norm() < 1e-16);
    }

    #[test]
    fn rotated_coeffs_axis1_at_origin() {
        let rc = rotated_coeffs::<f64>(Axis::X, 0.0, 0.0);
        assert_eq!(rc.c3, 0.0);
        assert!((rc.c_minus - c(0.5, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn rotated_coeffs_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let theta = rng.gen_range(0.0..std::f64::consts::PI);
            let phi = rng.gen_range(0.0..std::f64::consts::TAU);
            for axis in Axis::ALL {
                let rc = rotated_coeffs::<f64>(axis, theta, phi);
                assert!(rc.c3.abs() <= 1.0 + 1e-15);
                assert!(rc.c_minus.norm() <= 0.5 + 1e-15);
                assert!((rc.c_plus - rc.c_minus.conj()).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn rotation_unitary_basics() {
        for two_s in [1u32, 2, 5] {
            let rep = single(two_s);
            let u0 = rotation_unitary(&rep, 0.0, 0.0).unwrap();
            assert!(u0.max_abs_diff(&Op::identity(rep.dim())) < 1e-13);
            let u = rotation_unitary(&rep, 1.1, 0.7).unwrap();
            assert!(u.matrix().unitary_defect() < 1e-12);
        }
    }

    #[test]
    fn rotation_conjugation_matches_coeffs() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for two_s in [1u32, 3, 6] {
            let rep = single(two_s);
            let m = make_spin_matrices::<f64>(&rep).unwrap();
            for _ in 0..5 {
                let theta = rng.gen_range(0.0..std::f64::consts::PI);
                let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                let u = rotation_unitary(&rep, theta, phi).unwrap();
                for axis in Axis::ALL {
                    let rc = rotated_coeffs::<f64>(axis, theta, phi);
                    // U† s_i U
                    let direct = m.axis(axis).conjugate_by(&u.adjoint()).unwrap();
                    let rebuilt = m
                        .s3
                        .scale(c(rc.c3, 0.0))
                        .add(&m.s_minus.scale(rc.c_minus))
                        .unwrap()
                        .add(&m.s_plus.scale(rc.c_plus))
                        .unwrap();
                    assert!(direct.max_abs_diff(&rebuilt) < 1e-11);
                }
            }
        }
    }

    #[test]
    fn spin_half_rotation_is_plane_rotation() {
        // For s = 1/2, θ = π/2, φ = 0: a 45° rotation in the (|↑⟩,|↓⟩) plane,
        // U = [[cos(θ/2), -sin(θ/2)], [sin(θ/2), cos(θ/2)]].
        let u = rotation_unitary(&single(1), std::f64::consts::FRAC_PI_2, 0.0).unwrap();
        let h = 0.5f64.sqrt();
        assert!((u.get(0, 0) - c(h, 0.0)).norm() < 1e-13);
        assert!((u.get(0, 1) - c(-h, 0.0)).norm() < 1e-13);
        assert!((u.get(1, 0) - c(h, 0.0)).norm() < 1e-13);
        assert!((u.get(1, 1) - c(h, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn coherent_vector_closed_form_cases() {
        // North pole: |m = s⟩
        let v = coherent_vector::<f64>(&single(7), 0.0, 1.3);
        assert_eq!(v[0], c(1.0, 0.0));
        for z in &v[1..] {
            assert_eq!(*z, c(0.0, 0.0));
        }
        // s = 1/2, θ = π/2, φ = 0 → (1/√2, 1/√2)
        let v = coherent_vector::<f64>(&single(1), std::f64::consts::FRAC_PI_2, 0.0);
        let h = 0.5f64.sqrt();
        assert!((v[0] - c(h, 0.0)).norm() < 1e-15);
        assert!((v[1] - c(h, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn coherent_vector_unit_norm_and_rotation_consistency() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for two_s in [1u32, 4, 9] {
            let rep = single(two_s);
            for _ in 0..5 {
                let theta = rng.gen_range(0.0..std::f64::consts::PI);
                let phi = rng.gen_range(0.0..std::f64::consts::TAU);
                let v = coherent_vector::<f64>(&rep, theta, phi);
                assert!((norm(&v) - 1.0).abs() < 1e-13);
                // |Ω⟩ = U(Ω)|s⟩
                let u = rotation_unitary(&rep, theta, phi).unwrap();
                let mut e0 = vec![c(0.0, 0.0); rep.dim()];
                e0[0] = c(1.0, 0.0);
                let via_u = u.matvec(&e0);
                let worst = v
                    .iter()
                    .zip(&via_u)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0f64, f64::max);
                assert!(worst < 1e-12, "two_s={two_s} worst={worst}");
            }
        }
    }

    #[test]
    fn coherent_expectation_is_s_omega() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for two_s in [1u32, 2, 7] {
            let rep = single(two_s);
            let m = make_spin_matrices::<f64>(&rep).unwrap();
            let s = two_s as f64 / 2.0;
            for _ in 0..5 {
                let p = PhasePoint::<f64>::random(1, &mut rng);
                let v = coherent_vector(&rep, p.theta(0), p.phi(0));
                let omega = p.cartesian(0);
                for (i, axis) in Axis::ALL.iter().enumerate() {
                    let expect = s * omega[i];
                    let got = m.axis(*axis).expectation(&v);
                    assert!((got.re - expect).abs() < 1e-12);
                    assert!(got.im.abs() < 1e-13);
                }
            }
        }
    }

    #[test]
    fn coherent_state_is_top_eigenvector() {
        // Ω·ŝ |Ω⟩ = s |Ω⟩
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        for two_s in [1u32, 5, 12] {
            let rep = single(two_s);
            let m = make_spin_matrices::<f64>(&rep).unwrap();
            let s = two_s as f64 / 2.0;
            let p = PhasePoint::<f64>::random(1, &mut rng);
            let [x, y, z] = p.cartesian(0);
            let omega_dot_s = m
                .s1
                .scale_re(x)
                .add(&m.s2.scale_re(y))
                .unwrap()
                .add(&m.s3.scale_re(z))
                .unwrap();
            let v = coherent_vector(&rep, p.theta(0), p.phi(0));
            let mv = omega_dot_s.matvec(&v);
            let worst = mv
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b * s).norm())
                .fold(0.0f64, f64::max);
            assert!(worst < 1e-11);
        }
    }

    #[test]
    fn coherent_n_product_structure() {
        let rep = SpinRep::new(2, 2).unwrap();
        let p = PhasePoint::new(vec![(0.0, 0.0), (0.0, 0.0)]).unwrap();
        let v = coherent_vector_n(&rep, &p).unwrap();
        assert_eq!(v[0], c(1.0, 0.0));
        assert!((norm(&v) - 1.0).abs() < 1e-14);

        // Overlap factorizes into single-site overlaps.
        let a = PhasePoint::new(vec![(0.3, 1.0), (2.0, 4.4)]).unwrap();
        let b = PhasePoint::new(vec![(1.2, 0.2), (0.7, 5.1)]).unwrap();
        let va = coherent_vector_n(&rep, &a).unwrap();
        let vb = coherent_vector_n(&rep, &b).unwrap();
        let full = inner(&va, &vb);
        let site = rep.site_rep();
        let mut prod = c(1.0, 0.0);
        for mu in 0..2 {
            let sa = coherent_vector(&site, a.theta(mu), a.phi(mu));
            let sb = coherent_vector(&site, b.theta(mu), b.phi(mu));
            prod *= inner(&sa, &sb);
        }
        assert!((full - prod).norm() < 1e-13);

        let wrong = PhasePoint::single(0.3, 0.2);
        assert!(matches!(
            coherent_vector_n(&rep, &wrong),
            Err(Error::SiteCountMismatch { .. })
        ));
    }

    #[test]
    fn rotation_extraction() {
        let rep = single(3);
        let u = Op::identity(rep.dim());
        let r = rotation_from_unitary(&u, &rep).unwrap();
        for (i, row) in r.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                assert!((x - target).abs() < 1e-12);
            }
        }
        // U(θ, φ=0) maps e3 to (sin θ, 0, cos θ)
        let theta = 1.234f64;
        let u = rotation_unitary(&rep, theta, 0.0).unwrap();
        let r = rotation_from_unitary(&u, &rep).unwrap();
        assert!((r[0][2] - theta.sin()).abs() < 1e-10);
        assert!(r[1][2].abs() < 1e-10);
        assert!((r[2][2] - theta.cos()).abs() < 1e-10);

        // R preserves dot products of random vectors.
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let u = rotation_unitary(&rep, 0.77, 3.1).unwrap();
        let r = rotation_from_unitary(&u, &rep).unwrap();
        for _ in 0..10 {
            let a: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
            let b: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
            let dot = a.iter().zip(&b).map(|(x, y)| x * y).sum::<f64>();
            let ra = mat3_apply(&r, &a);
            let rb = mat3_apply(&r, &b);
            let rdot = ra.iter().zip(&rb).map(|(x, y)| x * y).sum::<f64>();
            assert!((dot - rdot).abs() < 1e-10);
        }

        // Non-unitary input is rejected.
        let bad = Op::identity(rep.dim()).scale_re(1.5);
        assert!(matches!(
            rotation_from_unitary(&bad, &rep),
            Err(Error::NotUnitary { .. })
        ));
    }

    fn mat3_apply(r: &[[f64; 3]; 3], v: &[f64; 3]) -> [f64; 3] {
        let mut out = [0.0; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i] += r[i][j] * v[j];
            }
        }
        out
    }

    #[test]
    fn rotation_moves_coherent_projectors() {
        // U_g |Ω⟩⟨Ω| U_g† = |R_g Ω⟩⟨R_g Ω| (phase-free identity).
        let rep = single(4);
        let mut rng = ChaCha8Rng::seed_from_u64(47);
        for _ in 0..5 {
            let g_theta = rng.gen_range(0.1..3.0);
            let g_phi = rng.gen_range(0.0..std::f64::consts::TAU);
            let u = rotation_unitary(&rep, g_theta, g_phi).unwrap();
            let r = rotation_from_unitary(&u, &rep).unwrap();
            let p = PhasePoint::<f64>::random(1, &mut rng);
            let v = coherent_vector(&rep, p.theta(0), p.phi(0));
            let mut proj = crate::linalg::CMat::zeros(rep.dim());
            proj.rank1_update(c(1.0, 0.0), &v);
            let rotated = Operator::from_matrix(proj).conjugate_by(&u).unwrap();

            let omega = p.cartesian(0);
            let mut image = [0.0f64; 3];
            for (i, row) in r.iter().enumerate() {
                for (j, &rij) in row.iter().enumerate() {
                    image[i] += rij * omega[j];
                }
            }
            let q = PhasePoint::from_cartesian(&[image]).unwrap();
            let w = coherent_vector(&rep, q.theta(0), q.phi(0));
            let mut target = crate::linalg::CMat::zeros(rep.dim());
            target.rank1_update(c(1.0, 0.0), &w);
            assert!(rotated.matrix().max_abs_diff(&target) < 1e-11);
        }
    }

    #[test]
    fn phase_point_construction() {
        let p = PhasePoint::<f64>::new(vec![(1.0, -0.5)]).unwrap();
        assert!(p.phi(0) > 0.0 && p.phi(0) < std::f64::consts::TAU);
        let [x, y, z] = p.cartesian(0);
        assert!((x * x + y * y + z * z - 1.0).abs() < 1e-14);
        assert!(PhasePoint::<f64>::new(vec![(4.0, 0.0)]).is_err());

        let q = PhasePoint::from_cartesian(&[[0.0, 0.0, -1.0]]).unwrap();
        assert!((q.theta(0) - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(q.phi(0), 0.0);
        assert!(PhasePoint::from_cartesian(&[[0.5, 0.0, 0.0]]).is_err());
    }
}
