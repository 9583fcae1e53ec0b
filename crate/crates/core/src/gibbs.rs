//! Polynomial spin Hamiltonians Ĥ = Σ J ŝ_{j₁}…ŝ_{j_q} (scaled operators
//! ŝ = s_op/s), their classical counterparts, quantum and classical Gibbs
//! states, truncated exponentials, the uniform convergence bound
//! βLJp·e^{βLJ}/√(2s), and grid scans of the quantum-to-classical error.

use crate::error::{Error, Result};
use crate::linalg::eig::HermEigen;
use crate::linalg::CMat;
use crate::operator::Operator;
use crate::quadrature::{McSphere, ProductGrid};
use crate::scalar::{Real, C};
use crate::spin::{
    coherent_vector_n, make_spin_matrices, Axis, PhasePoint, SpinRep, DEFAULT_DIM_CAP,
};
use num_complex::Complex;
use serde::Deserialize;

/// One coupling term J · ŝ_{j₁}…ŝ_{j_q} with an ordered factor list.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianTerm<R: Real> {
    pub coefficient: R,
    pub factors: Vec<(usize, Axis)>,
}

/// A polynomial Hamiltonian family: site count plus coupling terms. The
/// derived quantities L (monomial count), p (maximal degree) and J (largest
/// |coefficient|) are recomputed on demand, never stored.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSpec<R: Real> {
    n_sites: usize,
    terms: Vec<HamiltonianTerm<R>>,
}

impl<R: Real> HamiltonianSpec<R> {
    pub fn new(n_sites: usize, terms: Vec<HamiltonianTerm<R>>) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::NoSites);
        }
        for (idx, term) in terms.iter().enumerate() {
            if term.factors.is_empty() {
                return Err(Error::EmptyFactorList { term: idx });
            }
            for &(site, _) in &term.factors {
                if site >= n_sites {
                    return Err(Error::TermSiteOutOfRange {
                        term: idx,
                        site,
                        n_sites,
                    });
                }
            }
        }
        Ok(Self { n_sites, terms })
    }

    /// The Heisenberg dimer ŝ₁·ŝ₂ (three terms xx, yy, zz with J = 1).
    pub fn heisenberg_dimer() -> Self {
        let terms = Axis::ALL
            .iter()
            .map(|&axis| HamiltonianTerm {
                coefficient: R::one(),
                factors: vec![(0, axis), (1, axis)],
            })
            .collect();
        Self { n_sites: 2, terms }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[HamiltonianTerm<R>] {
        &self.terms
    }

    /// L: number of monomials after term-wise expansion without collecting.
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// p: maximal monomial degree.
    pub fn max_degree(&self) -> usize {
        self.terms.iter().map(|t| t.factors.len()).max().unwrap_or(0)
    }

    /// J: largest |coefficient|.
    pub fn j_max(&self) -> R {
        self.terms
            .iter()
            .map(|t| t.coefficient.abs())
            .fold(R::zero(), |a, b| a.max(b))
    }

    /// True for the isotropic two-site Heisenberg coupling (xx + yy + zz with
    /// one common J), whose Gibbs symbol depends only on the angle between
    /// the two classical spins.
    pub fn is_isotropic_dimer(&self) -> bool {
        if self.n_sites != 2 || self.terms.len() != 3 {
            return false;
        }
        let j0 = self.terms[0].coefficient;
        let mut seen = [false; 3];
        for term in &self.terms {
            if term.coefficient != j0 || term.factors.len() != 2 {
                return false;
            }
            let (s0, a0) = term.factors[0];
            let (s1, a1) = term.factors[1];
            if s0 != 0 || s1 != 1 || a0 != a1 {
                return false;
            }
            seen[a0.index()] = true;
        }
        seen.iter().all(|&x| x)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHamiltonian {
    n_sites: usize,
    terms: Vec<RawTerm>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    #[serde(rename = "J")]
    j: f64,
    factors: Vec<RawFactor>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFactor {
    site: usize,
    axis: Axis,
}

/// Parse the Hamiltonian JSON document
/// `{ "n_sites": 2, "terms": [ { "J": 1.0, "factors": [ {"site":0,"axis":"x"}, … ] }, … ] }`.
pub fn parse_hamiltonian<R: Real>(text: &str) -> Result<HamiltonianSpec<R>> {
    let raw: RawHamiltonian =
        serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let terms = raw
        .terms
        .into_iter()
        .map(|t| HamiltonianTerm {
            coefficient: R::of(t.j),
            factors: t.factors.into_iter().map(|f| (f.site, f.axis)).collect(),
        })
        .collect();
    HamiltonianSpec::new(raw.n_sites, terms)
}

/// Dense Ĥ^(s) = Σ J ŝ_{j₁}…ŝ_{j_q}. Cross-site factors commute, so each
/// term is assembled as a Kronecker product of per-site ordered products.
pub fn quantum_hamiltonian<R: Real>(
    spec: &HamiltonianSpec<R>,
    rep: &SpinRep,
) -> Result<Operator<R>> {
    if spec.n_sites() != rep.n_sites() {
        return Err(Error::SiteCountMismatch {
            expected: spec.n_sites(),
            got: rep.n_sites(),
        });
    }
    let mats = make_spin_matrices::<R>(&rep.site_rep())?;
    let inv_s = R::one() / rep.s_value::<R>();
    let scaled: [CMat<R>; 3] = [
        mats.s1.matrix().scale_re(inv_s),
        mats.s2.matrix().scale_re(inv_s),
        mats.s3.matrix().scale_re(inv_s),
    ];
    let q = rep.site_dim();
    let mut h = CMat::<R>::zeros(rep.dim());
    for term in spec.terms() {
        // per-site ordered product of this term's factors
        let mut local: Vec<Option<CMat<R>>> = vec![None; rep.n_sites()];
        for &(site, axis) in &term.factors {
            let m = &scaled[axis.index()];
            local[site] = Some(match local[site].take() {
                Some(acc) => acc.mul(m),
                None => m.clone(),
            });
        }
        let mut term_mat: Option<CMat<R>> = None;
        for site_mat in local {
            let factor = site_mat.unwrap_or_else(|| CMat::identity(q));
            term_mat = Some(match term_mat.take() {
                Some(acc) => acc.kron(&factor),
                None => factor,
            });
        }
        h.axpy(
            Complex::new(term.coefficient, R::zero()),
            &term_mat.expect("at least one site"),
        );
    }
    Ok(Operator::from_matrix(h))
}

/// H^(cl)(Ω) = Σ J Π Ω_{j}. The point must carry the spec's site count.
pub fn classical_hamiltonian<R: Real>(spec: &HamiltonianSpec<R>, point: &PhasePoint<R>) -> R {
    assert_eq!(
        spec.n_sites(),
        point.n_sites(),
        "phase point site count must match the Hamiltonian"
    );
    let mut acc = R::zero();
    for term in spec.terms() {
        let mut prod = term.coefficient;
        for &(site, axis) in &term.factors {
            prod *= point.component(site, axis);
        }
        acc += prod;
    }
    acc
}

/// Ĥ together with its full eigendecomposition; the workhorse behind Gibbs
/// states, scaled symbols and partition traces, reusable across β.
pub struct SpectralHamiltonian<R: Real> {
    rep: SpinRep,
    hamiltonian: Operator<R>,
    eigen: HermEigen<R>,
}

impl<R: Real> SpectralHamiltonian<R> {
    pub fn new(spec: &HamiltonianSpec<R>, rep: &SpinRep) -> Result<Self> {
        let hamiltonian = quantum_hamiltonian(spec, rep)?;
        let eigen = hamiltonian.herm_eigen()?;
        Ok(Self {
            rep: *rep,
            hamiltonian,
            eigen,
        })
    }

    pub fn rep(&self) -> &SpinRep {
        &self.rep
    }

    pub fn hamiltonian(&self) -> &Operator<R> {
        &self.hamiltonian
    }

    pub fn eigenvalues(&self) -> &[R] {
        &self.eigen.values
    }

    /// Boltzmann weights e^{-β(λ_k - shift)} with shift = max(-βλ).
    fn shifted_weights(&self, beta: R) -> (Vec<R>, R) {
        let shift = self
            .eigen
            .values
            .iter()
            .map(|&l| -beta * l)
            .fold(R::neg_infinity(), |a, b| a.max(b));
        let weights = self
            .eigen
            .values
            .iter()
            .map(|&l| (-beta * l - shift).exp())
            .collect();
        (weights, shift)
    }

    /// W = e^{-βĤ}, its trace, and the normalized Gibbs state G = W/Tr W.
    pub fn gibbs(&self, beta: R) -> GibbsResult<R> {
        let w = Operator::from_matrix_unchecked(
            self.eigen.apply_spectral(|l| (-beta * l).exp()),
            true,
        );
        let trace: R = self
            .eigen
            .values
            .iter()
            .map(|&l| (-beta * l).exp())
            .fold(R::zero(), |a, b| a + b);
        let g = w.scale_re(R::one() / trace);
        GibbsResult {
            w,
            trace,
            g,
            beta,
            rep: self.rep,
        }
    }

    /// g(W)(Ω) = ⟨Ω|e^{-βĤ}|Ω⟩, the unnormalized Gibbs symbol.
    pub fn boltzmann_symbol(&self, beta: R, point: &PhasePoint<R>) -> Result<R> {
        let omega = coherent_vector_n(&self.rep, point)?;
        let overlaps = self.eigen.project(&omega);
        let mut acc = R::zero();
        for (&l, y) in self.eigen.values.iter().zip(&overlaps) {
            acc += (-beta * l).exp() * y.norm_sqr();
        }
        Ok(acc)
    }

    /// (2s+1)^N ⟨Ω|G|Ω⟩ without materializing W.
    pub fn scaled_symbol(&self, beta: R, point: &PhasePoint<R>) -> Result<R> {
        let omega = coherent_vector_n(&self.rep, point)?;
        let overlaps = self.eigen.project(&omega);
        let (weights, _) = self.shifted_weights(beta);
        let mut num = R::zero();
        let mut den = R::zero();
        for (w, y) in weights.iter().zip(&overlaps) {
            num += *w * y.norm_sqr();
            den += *w;
        }
        Ok(R::from_count(self.rep.dim()) * num / den)
    }

    /// (2s+1)^{-N} Tr e^{-βĤ}.
    pub fn scaled_partition(&self, beta: R) -> R {
        let sum = self
            .eigen
            .values
            .iter()
            .map(|&l| (-beta * l).exp())
            .fold(R::zero(), |a, b| a + b);
        sum / R::from_count(self.rep.dim())
    }

    /// U(β) = Tr(G Ĥ) = Σ λ e^{-βλ} / Σ e^{-βλ}, shift-stabilized.
    pub fn thermal_expectation(&self, beta: R) -> R {
        let (weights, _) = self.shifted_weights(beta);
        let mut num = R::zero();
        let mut den = R::zero();
        for (w, &l) in weights.iter().zip(&self.eigen.values) {
            num += *w * l;
            den += *w;
        }
        num / den
    }
}

/// Unnormalized and normalized Gibbs state at one β.
pub struct GibbsResult<R: Real> {
    /// W = e^{-βĤ}.
    pub w: Operator<R>,
    /// Tr W (positive).
    pub trace: R,
    /// G = W / Tr W.
    pub g: Operator<R>,
    pub beta: R,
    pub rep: SpinRep,
}

pub fn gibbs_operator<R: Real>(
    spec: &HamiltonianSpec<R>,
    rep: &SpinRep,
    beta: R,
) -> Result<GibbsResult<R>> {
    Ok(SpectralHamiltonian::new(spec, rep)?.gibbs(beta))
}

/// Moments ⟨Ω|Ĥ^k|Ω⟩ for k = 0..=n_max by repeated matrix-vector products.
pub fn hamiltonian_moments<R: Real>(
    h: &Operator<R>,
    rep: &SpinRep,
    point: &PhasePoint<R>,
    n_max: usize,
) -> Result<Vec<C<R>>> {
    let omega = coherent_vector_n(rep, point)?;
    let mut moments = Vec::with_capacity(n_max + 1);
    let mut v = omega.clone();
    moments.push(crate::linalg::inner(&omega, &v));
    for _ in 0..n_max {
        v = h.matvec(&v);
        moments.push(crate::linalg::inner(&omega, &v));
    }
    Ok(moments)
}

/// g(W_n) = Σ_{k=0}^n (-β)^k/k! ⟨Ω|Ĥ^k|Ω⟩ from precomputed moments.
pub fn truncated_symbol_from_moments<R: Real>(moments: &[C<R>], beta: R, n: usize) -> C<R> {
    let mut acc = Complex::new(R::zero(), R::zero());
    let mut coeff = R::one();
    for (k, m) in moments.iter().take(n + 1).enumerate() {
        if k > 0 {
            coeff = coeff * (-beta) / R::from_count(k);
        }
        acc += *m * coeff;
    }
    acc
}

/// Covariant symbol of the degree-n Taylor truncation
/// W_n = Σ_{k≤n} (-β)^k/k! Ĥ^k, by iterated multiplication with Ĥ.
pub fn truncated_gibbs_symbol<R: Real>(
    spec: &HamiltonianSpec<R>,
    rep: &SpinRep,
    beta: R,
    n: usize,
    point: &PhasePoint<R>,
) -> Result<C<R>> {
    let h = quantum_hamiltonian(spec, rep)?;
    let moments = hamiltonian_moments(&h, rep, point, n)?;
    Ok(truncated_symbol_from_moments(&moments, beta, n))
}

/// Classical truncation W_n^cl = Σ_{k≤n} (-β H^cl)^k / k!.
pub fn classical_truncated<R: Real>(h_cl: R, beta: R, n: usize) -> R {
    let mut acc = R::zero();
    let mut term = R::one();
    for k in 0..=n {
        if k > 0 {
            term = term * (-beta) * h_cl / R::from_count(k);
        }
        acc += term;
    }
    acc
}

/// Quadrature controls for the classical partition function.
#[derive(Clone, Debug)]
pub struct PartitionQuad {
    /// Product-rule degree; `None` picks max(24, ⌈4β⌉ + 16).
    pub degree: Option<usize>,
    /// Monte Carlo sample count for N ≥ 3.
    pub mc_samples: usize,
    pub mc_seed: u64,
}

impl Default for PartitionQuad {
    fn default() -> Self {
        Self {
            degree: None,
            mc_samples: 200_000,
            mc_seed: 0,
        }
    }
}

impl PartitionQuad {
    fn effective_degree<R: Real>(&self, beta: R) -> usize {
        self.degree.unwrap_or_else(|| {
            let b = beta.abs().to_f64().unwrap_or(1.0);
            24usize.max(4 * b.ceil() as usize + 16)
        })
    }
}

/// Z^(cl)(β) with MC standard error when sampling was used.
#[derive(Clone, Copy, Debug)]
pub struct ClassicalPartition<R: Real> {
    pub value: R,
    /// Standard error of the Monte Carlo estimate; `None` for product rules.
    pub std_err: Option<R>,
}

/// Z^(cl)(β) = (4π)^{-N} ∫ e^{-β H^cl} dΩ. Product rule for N ≤ 2,
/// uniform Monte Carlo with a reported standard error for N ≥ 3.
pub fn classical_partition<R: Real>(
    spec: &HamiltonianSpec<R>,
    beta: R,
    quad: &PartitionQuad,
) -> Result<ClassicalPartition<R>> {
    let n = spec.n_sites();
    if n <= 2 {
        let grid = ProductGrid::<R>::with_degree(quad.effective_degree(beta), n)?;
        let value = grid
            .mean(|p| Complex::new((-beta * classical_hamiltonian(spec, p)).exp(), R::zero()))
            .re;
        Ok(ClassicalPartition {
            value,
            std_err: None,
        })
    } else {
        let mc = McSphere::new(n, quad.mc_samples, quad.mc_seed)?;
        let est = mc.integrate(|p| (-beta * classical_hamiltonian(spec, p)).exp());
        let norm = (R::of(4.0) * R::PI()).powi(n as i32);
        Ok(ClassicalPartition {
            value: est.value / norm,
            std_err: Some(est.std_err / norm),
        })
    }
}

/// G^(cl)(Ω) = e^{-β H^cl(Ω)} / Z^(cl).
pub fn classical_gibbs_density<R: Real>(
    spec: &HamiltonianSpec<R>,
    beta: R,
    point: &PhasePoint<R>,
    z_cl: R,
) -> R {
    (-beta * classical_hamiltonian(spec, point)).exp() / z_cl
}

/// (2s+1)^N ⟨Ω|G|Ω⟩ (convenience wrapper; scans should reuse a
/// [`SpectralHamiltonian`]).
pub fn scaled_gibbs_symbol<R: Real>(
    spec: &HamiltonianSpec<R>,
    rep: &SpinRep,
    beta: R,
    point: &PhasePoint<R>,
) -> Result<R> {
    SpectralHamiltonian::new(spec, rep)?.scaled_symbol(beta, point)
}

/// (2s+1)^{-N} Tr e^{-βĤ} via an eigenvalues-only decomposition.
pub fn scaled_partition<R: Real>(
    spec: &HamiltonianSpec<R>,
    rep: &SpinRep,
    beta: R,
) -> Result<R> {
    let h = quantum_hamiltonian(spec, rep)?;
    let values = h.eigenvalues()?;
    let sum = values
        .iter()
        .map(|&l| (-beta * l).exp())
        .fold(R::zero(), |a, b| a + b);
    Ok(sum / R::from_count(rep.dim()))
}

/// U(β) = Tr(G(β) Ĥ), shift-stabilized so very large β degrades gracefully
/// to the ground energy.
pub fn thermal_expectation<R: Real>(
    spec: &HamiltonianSpec<R>,
    rep: &SpinRep,
    beta: R,
) -> Result<R> {
    let h = quantum_hamiltonian(spec, rep)?;
    let values = h.eigenvalues()?;
    let shift = values
        .iter()
        .map(|&l| -beta * l)
        .fold(R::neg_infinity(), |a, b| a.max(b));
    let mut num = R::zero();
    let mut den = R::zero();
    for &l in &values {
        let w = (-beta * l - shift).exp();
        num += w * l;
        den += w;
    }
    Ok(num / den)
}

/// The uniform bound βLJp·e^{βLJ}/√(2s) on |g(W_n) − W_n^cl| (and on the
/// n → ∞ object).
pub fn convergence_bound<R: Real>(spec: &HamiltonianSpec<R>, rep: &SpinRep, beta: R) -> R {
    let l = R::from_count(spec.term_count());
    let j = spec.j_max();
    let p = R::from_count(spec.max_degree());
    let two_s = R::from_count(rep.two_s() as usize);
    beta * l * j * p * (beta * l * j).exp() / two_s.sqrt()
}

/// Evaluation grid for convergence scans.
#[derive(Clone, Debug)]
pub enum ScanGrid<R: Real> {
    /// Ω₁ at the north pole, Ω₂ swept over `steps` equally spaced θ values
    /// in [0, π] (valid for two-site systems with rotationally invariant
    /// coupling).
    DimerTheta { steps: usize },
    /// Uniformly random points, reproducible by seed.
    Random { count: usize, seed: u64 },
    /// Explicit point list.
    Points(Vec<PhasePoint<R>>),
}

impl<R: Real> ScanGrid<R> {
    /// The dimer θ sweep for the isotropic dimer, 200 random points
    /// otherwise.
    pub fn default_for(spec: &HamiltonianSpec<R>, seed: u64) -> Self {
        if spec.is_isotropic_dimer() {
            ScanGrid::DimerTheta { steps: 181 }
        } else {
            ScanGrid::Random { count: 200, seed }
        }
    }

    pub fn points(&self, n_sites: usize) -> Result<Vec<PhasePoint<R>>> {
        match self {
            ScanGrid::DimerTheta { steps } => {
                if n_sites != 2 {
                    return Err(Error::SiteCountMismatch {
                        expected: 2,
                        got: n_sites,
                    });
                }
                let steps = (*steps).max(2);
                Ok((0..steps)
                    .map(|i| {
                        let theta =
                            R::PI() * R::from_count(i) / R::from_count(steps - 1);
                        PhasePoint::new(vec![(R::zero(), R::zero()), (theta, R::zero())])
                            .expect("grid angles are valid")
                    })
                    .collect())
            }
            ScanGrid::Random { count, seed } => {
                use rand::SeedableRng;
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                Ok((0..*count)
                    .map(|_| PhasePoint::random(n_sites, &mut rng))
                    .collect())
            }
            ScanGrid::Points(points) => {
                for p in points {
                    if p.n_sites() != n_sites {
                        return Err(Error::SiteCountMismatch {
                            expected: n_sites,
                            got: p.n_sites(),
                        });
                    }
                }
                Ok(points.clone())
            }
        }
    }
}

/// Scan controls.
#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub quad: PartitionQuad,
    pub dim_cap: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            quad: PartitionQuad::default(),
            dim_cap: DEFAULT_DIM_CAP,
        }
    }
}

/// One (s, point) cell of a convergence scan.
#[derive(Clone, Debug)]
pub struct ScanRow<R: Real> {
    pub two_s: u32,
    pub beta: R,
    pub point: PhasePoint<R>,
    pub quantum_scaled: R,
    pub classical: R,
    pub abs_error: R,
    /// |g(e^{-βĤ}) − e^{-βH^cl}|, the quantity the uniform bound controls.
    pub unnorm_error: R,
    pub bound: R,
}

/// Per-spin summary of a scan.
#[derive(Clone, Copy, Debug)]
pub struct ScanSummary<R: Real> {
    pub two_s: u32,
    pub sup_error: R,
    pub bound: R,
}

pub struct ScanReport<R: Real> {
    pub rows: Vec<ScanRow<R>>,
    pub summaries: Vec<ScanSummary<R>>,
    pub z_classical: ClassicalPartition<R>,
}

/// Evaluate (2s+1)^N g(G) against G^cl over a grid, for each requested spin.
/// Rows are emitted in deterministic (s, point) order.
pub fn convergence_scan<R: Real>(
    spec: &HamiltonianSpec<R>,
    beta: R,
    two_s_list: &[u32],
    grid: &ScanGrid<R>,
    config: &ScanConfig,
) -> Result<ScanReport<R>> {
    let points = grid.points(spec.n_sites())?;
    let z_cl = classical_partition(spec, beta, &config.quad)?;
    let mut rows = Vec::with_capacity(two_s_list.len() * points.len());
    let mut summaries = Vec::with_capacity(two_s_list.len());
    for &two_s in two_s_list {
        let rep = SpinRep::with_dim_cap(two_s, spec.n_sites(), config.dim_cap)?;
        let spectral = SpectralHamiltonian::new(spec, &rep)?;
        let bound = convergence_bound(spec, &rep, beta);
        let mut sup = R::zero();
        for point in &points {
            let quantum_scaled = spectral.scaled_symbol(beta, point)?;
            let classical = classical_gibbs_density(spec, beta, point, z_cl.value);
            let abs_error = (quantum_scaled - classical).abs();
            let unnorm_error = (spectral.boltzmann_symbol(beta, point)?
                - (-beta * classical_hamiltonian(spec, point)).exp())
            .abs();
            sup = sup.max(abs_error);
            rows.push(ScanRow {
                two_s,
                beta,
                point: point.clone(),
                quantum_scaled,
                classical,
                abs_error,
                unnorm_error,
                bound,
            });
        }
        summaries.push(ScanSummary {
            two_s,
            sup_error: sup,
            bound,
        });
    }
    Ok(ScanReport {
        rows,
        summaries,
        z_classical: z_cl,
    })
}
