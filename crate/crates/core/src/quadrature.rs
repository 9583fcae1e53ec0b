//! Quadrature on the sphere and on N-fold products of spheres.
//!
//! Product rules combine Gauss–Legendre in u = cos θ with a uniform
//! (trapezoidal, i.e. periodic rectangle) rule in φ. A rule of degree L
//! integrates every spherical polynomial of degree ≤ L exactly. Uniform
//! Monte Carlo sampling covers site counts where the product grid explodes.

use crate::error::{Error, Result};
use crate::scalar::{Real, C};
use crate::spin::PhasePoint;
use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SUM_CHUNK: usize = 1024;

/// Quadrature rule on a single sphere; weights sum to 4π.
#[derive(Clone, Debug)]
pub struct SphereRule<R: Real> {
    nodes: Vec<(R, R)>,
    weights: Vec<R>,
    degree: usize,
}

/// Gauss–Legendre nodes and weights on [-1, 1], by Newton iteration on the
/// Legendre recurrence.
pub fn gauss_legendre<R: Real>(n: usize) -> (Vec<R>, Vec<R>) {
    assert!(n >= 1);
    let mut nodes = vec![R::zero(); n];
    let mut weights = vec![R::zero(); n];
    let nf = R::from_count(n);
    for i in 0..n {
        let mut x = (R::PI() * (R::from_count(i) + R::of(0.75)) / (nf + R::of(0.5))).cos();
        let mut dp = R::one();
        for _ in 0..100 {
            let (p, d) = legendre_pair(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= R::epsilon() * x.abs().max(R::one()) {
                // One polishing step at the converged point.
                let (p, d) = legendre_pair(n, x);
                dp = d;
                x -= p / d;
                break;
            }
        }
        nodes[i] = x;
        weights[i] = R::of(2.0) / ((R::one() - x * x) * dp * dp);
    }
    (nodes, weights)
}

/// P_n(x) and P'_n(x) by upward recurrence (n ≥ 1, |x| < 1).
fn legendre_pair<R: Real>(n: usize, x: R) -> (R, R) {
    let mut p0 = R::one();
    let mut p1 = x;
    for k in 2..=n {
        let kf = R::from_count(k);
        let p2 = ((R::of(2.0) * kf - R::one()) * x * p1 - (kf - R::one()) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = R::from_count(n) * (x * p1 - p0) / (x * x - R::one());
    (p1, d)
}

impl<R: Real> SphereRule<R> {
    /// Product rule exact for all spherical polynomials of degree ≤ L.
    pub fn with_degree(degree: usize) -> Self {
        let n_theta = degree / 2 + 1;
        let n_phi = degree + 1;
        let (u, wu) = gauss_legendre::<R>(n_theta);
        let phi_weight = (R::PI() + R::PI()) / R::from_count(n_phi);
        let mut nodes = Vec::with_capacity(n_theta * n_phi);
        let mut weights = Vec::with_capacity(n_theta * n_phi);
        for (ui, wi) in u.iter().zip(&wu) {
            let theta = ui.min(R::one()).max(-R::one()).acos();
            for j in 0..n_phi {
                let phi = (R::PI() + R::PI()) * R::from_count(j) / R::from_count(n_phi);
                nodes.push((theta, phi));
                weights.push(*wi * phi_weight);
            }
        }
        Self {
            nodes,
            weights,
            degree,
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> impl Iterator<Item = ((R, R), R)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn weight_sum(&self) -> R {
        pairwise_sum(&self.weights)
    }

    /// ∫ f(θ, φ) dΩ with fixed chunked-pairwise reduction order.
    pub fn integrate(&self, mut f: impl FnMut(R, R) -> C<R>) -> C<R> {
        let values: Vec<C<R>> = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&(theta, phi), &w)| f(theta, phi) * w)
            .collect();
        pairwise_sum_c(&values)
    }
}

/// N-fold product of a single-sphere rule; nodes are streamed, never stored.
#[derive(Clone, Debug)]
pub struct ProductGrid<R: Real> {
    rule: SphereRule<R>,
    n_sites: usize,
}

impl<R: Real> ProductGrid<R> {
    pub fn new(rule: SphereRule<R>, n_sites: usize) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::NoSites);
        }
        Ok(Self { rule, n_sites })
    }

    pub fn with_degree(degree: usize, n_sites: usize) -> Result<Self> {
        Self::new(SphereRule::with_degree(degree), n_sites)
    }

    pub fn degree(&self) -> usize {
        self.rule.degree()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn node_count(&self) -> usize {
        self.rule.len().pow(self.n_sites as u32)
    }

    /// Visit every node with its weight, in a fixed odometer order.
    pub fn for_each_node(&self, mut f: impl FnMut(&PhasePoint<R>, R)) {
        let m = self.rule.len();
        let n = self.n_sites;
        let mut idx = vec![0usize; n];
        let mut angles = vec![(R::zero(), R::zero()); n];
        loop {
            let mut w = R::one();
            for (site, &i) in idx.iter().enumerate() {
                angles[site] = self.rule.nodes[i];
                w *= self.rule.weights[i];
            }
            let point = PhasePoint::new(angles.clone()).expect("rule nodes are valid angles");
            f(&point, w);
            // odometer increment
            let mut site = n;
            loop {
                if site == 0 {
                    return;
                }
                site -= 1;
                idx[site] += 1;
                if idx[site] < m {
                    break;
                }
                idx[site] = 0;
            }
        }
    }

    /// ∫ f dΩ₁…dΩ_N with deterministic chunked-pairwise reduction.
    pub fn integrate(&self, mut f: impl FnMut(&PhasePoint<R>) -> C<R>) -> C<R> {
        let mut acc = ChunkedSum::<R>::new();
        self.for_each_node(|point, w| acc.push(f(point) * w));
        acc.finish()
    }

    /// Weighted mean of f over the grid (the normalized integral
    /// (4π)^{-N} ∫ f). Exact for constant integrands.
    pub fn mean(&self, mut f: impl FnMut(&PhasePoint<R>) -> C<R>) -> C<R> {
        let mut num = ChunkedSum::<R>::new();
        let mut den = ChunkedSum::<R>::new();
        self.for_each_node(|point, w| {
            num.push(f(point) * w);
            den.push(Complex::new(w, R::zero()));
        });
        num.finish() / den.finish()
    }
}

/// Uniform Monte Carlo sampler on (S²)^N: u = cos θ uniform on [-1, 1],
/// φ uniform on [0, 2π). Reproducible for a fixed seed.
#[derive(Clone, Debug)]
pub struct McSphere {
    pub n_sites: usize,
    pub n_samples: usize,
    pub seed: u64,
}

/// Monte Carlo estimate with its standard error.
#[derive(Clone, Copy, Debug)]
pub struct McEstimate<R: Real> {
    pub value: R,
    pub std_err: R,
}

impl McSphere {
    pub fn new(n_sites: usize, n_samples: usize, seed: u64) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::NoSites);
        }
        assert!(n_samples >= 1);
        Ok(Self {
            n_sites,
            n_samples,
            seed,
        })
    }

    fn rng(&self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.seed)
    }

    /// Stream of sample points.
    pub fn samples<R: Real>(&self) -> impl Iterator<Item = PhasePoint<R>> {
        let mut rng = self.rng();
        let n_sites = self.n_sites;
        (0..self.n_samples).map(move |_| PhasePoint::random(n_sites, &mut rng))
    }

    /// Per-sample weight (4π)^N / n_samples.
    pub fn sample_weight<R: Real>(&self) -> R {
        let four_pi = R::of(4.0) * R::PI();
        four_pi.powi(self.n_sites as i32) / R::from_count(self.n_samples)
    }

    /// Unbiased estimate of ∫ f dΩ₁…dΩ_N = (4π)^N · mean(f).
    pub fn integrate<R: Real>(&self, mut f: impl FnMut(&PhasePoint<R>) -> R) -> McEstimate<R> {
        let mut chunk_means = Vec::new();
        let mut chunk_sqs = Vec::new();
        let mut sum = R::zero();
        let mut sum_sq = R::zero();
        let mut in_chunk = 0usize;
        for p in self.samples::<R>() {
            let v = f(&p);
            sum += v;
            sum_sq += v * v;
            in_chunk += 1;
            if in_chunk == SUM_CHUNK {
                chunk_means.push(sum);
                chunk_sqs.push(sum_sq);
                sum = R::zero();
                sum_sq = R::zero();
                in_chunk = 0;
            }
        }
        if in_chunk > 0 {
            chunk_means.push(sum);
            chunk_sqs.push(sum_sq);
        }
        let total = pairwise_sum(&chunk_means);
        let total_sq = pairwise_sum(&chunk_sqs);
        let nf = R::from_count(self.n_samples);
        let mean = total / nf;
        let scale = R::of(4.0 * std::f64::consts::PI).powi(self.n_sites as i32);
        let variance = (total_sq / nf - mean * mean).max(R::zero());
        let std_err = if self.n_samples > 1 {
            scale * (variance / (nf - R::one())).sqrt()
        } else {
            R::zero()
        };
        McEstimate {
            value: scale * mean,
            std_err,
        }
    }
}

/// Deterministic chunked-pairwise accumulator for complex values.
pub struct ChunkedSum<R: Real> {
    chunks: Vec<C<R>>,
    current: C<R>,
    in_chunk: usize,
}

impl<R: Real> Default for ChunkedSum<R> {
    fn default() -> Self {
        Self::new()
    }
}

impl<R: Real> ChunkedSum<R> {
    pub fn new() -> Self {
        Self {
            chunks: Vec::new(),
            current: Complex::new(R::zero(), R::zero()),
            in_chunk: 0,
        }
    }

    pub fn push(&mut self, v: C<R>) {
        self.current += v;
        self.in_chunk += 1;
        if self.in_chunk == SUM_CHUNK {
            self.chunks.push(self.current);
            self.current = Complex::new(R::zero(), R::zero());
            self.in_chunk = 0;
        }
    }

    pub fn finish(mut self) -> C<R> {
        if self.in_chunk > 0 {
            self.chunks.push(self.current);
        }
        pairwise_sum_c(&self.chunks)
    }
}

fn pairwise_sum_c<R: Real>(xs: &[C<R>]) -> C<R> {
    match xs.len() {
        0 => Complex::new(R::zero(), R::zero()),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let half = n / 2;
            pairwise_sum_c(&xs[..half]) + pairwise_sum_c(&xs[half..])
        }
    }
}

fn pairwise_sum<R: Real>(xs: &[R]) -> R {
    match xs.len() {
        0 => R::zero(),
        1 => xs[0],
        2 => xs[0] + xs[1],
        n => {
            let half = n / 2;
            pairwise_sum(&xs[..half]) + pairwise_sum(&xs[half..])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::re;
    use num_complex::Complex64;

    /// Analytic moment ∫ x^a y^b z^c dΩ over the unit sphere.
    fn sphere_moment(a: u32, b: u32, c: u32) -> f64 {
        if a % 2 == 1 || b % 2 == 1 || c % 2 == 1 {
            return 0.0;
        }
        let dfac = |n: i64| -> f64 {
            let mut acc = 1.0;
            let mut k = n;
            while k >= 2 {
                acc *= k as f64;
                k -= 2;
            }
            acc
        };
        let num = dfac(a as i64 - 1) * dfac(b as i64 - 1) * dfac(c as i64 - 1);
        let den = dfac((a + b + c) as i64 + 1);
        4.0 * std::f64::consts::PI * num / den
    }

    fn eval_monomial(theta: f64, phi: f64, a: u32, b: u32, c: u32) -> f64 {
        let x = theta.sin() * phi.cos();
        let y = theta.sin() * phi.sin();
        let z = theta.cos();
        x.powi(a as i32) * y.powi(b as i32) * z.powi(c as i32)
    }

    #[test]
    fn gauss_legendre_known_values() {
        let (x, w) = gauss_legendre::<f64>(2);
        let r = (1.0f64 / 3.0).sqrt();
        assert!((x[0].abs() - r).abs() < 1e-15);
        assert!((x[1].abs() - r).abs() < 1e-15);
        assert!((w[0] - 1.0).abs() < 1e-15);
        assert!((w[1] - 1.0).abs() < 1e-15);
        // weights always sum to 2
        for n in [1, 3, 7, 20, 64] {
            let (_, w) = gauss_legendre::<f64>(n);
            let sum: f64 = w.iter().sum();
            assert!((sum - 2.0).abs() < 1e-13, "n={n} sum={sum}");
        }
    }

    #[test]
    fn weight_sum_is_four_pi() {
        for degree in [0, 1, 2, 5, 12, 41] {
            let rule = SphereRule::<f64>::with_degree(degree);
            assert!((rule.weight_sum() - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        }
    }

    #[test]
    fn standard_moments() {
        let rule = SphereRule::<f64>::with_degree(2);
        // ∫ z² dΩ / 4π = 1/3
        let z2 = rule.integrate(|theta, _| re(theta.cos().powi(2)));
        assert!((z2.re / (4.0 * std::f64::consts::PI) - 1.0 / 3.0).abs() < 1e-14);
        // ∫ z dΩ = 0
        let z1 = rule.integrate(|theta, _| re(theta.cos()));
        assert!(z1.re.abs() < 1e-14);
        // ∫ x²y² dΩ / 4π = 1/15 at L ≥ 4
        let rule4 = SphereRule::<f64>::with_degree(4);
        let x2y2 = rule4.integrate(|theta, phi| re(eval_monomial(theta, phi, 2, 2, 0)));
        assert!((x2y2.re / (4.0 * std::f64::consts::PI) - 1.0 / 15.0).abs() < 1e-14);
    }

    #[test]
    fn exactness_up_to_degree() {
        // Every monomial of total degree ≤ L is integrated exactly.
        for degree in [3usize, 6, 9] {
            let rule = SphereRule::<f64>::with_degree(degree);
            for a in 0..=degree as u32 {
                for b in 0..=(degree as u32 - a) {
                    for c in 0..=(degree as u32 - a - b) {
                        let got = rule
                            .integrate(|theta, phi| re(eval_monomial(theta, phi, a, b, c)))
                            .re;
                        let expect = sphere_moment(a, b, c);
                        assert!(
                            (got - expect).abs() < 1e-12,
                            "L={degree} ({a},{b},{c}): {got} vs {expect}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn product_grid_basics() {
        let grid = ProductGrid::<f64>::with_degree(2, 2).unwrap();
        let four_pi = 4.0 * std::f64::consts::PI;
        let ones = grid.integrate(|_| re(1.0));
        assert!((ones.re - four_pi * four_pi).abs() < 1e-12);
        let mean = grid.mean(|_| re(1.0));
        assert_eq!(mean.re, 1.0);
        // odd per factor: cos θ₁ cos θ₂ integrates to zero
        let odd = grid.integrate(|p| re(p.theta(0).cos() * p.theta(1).cos()));
        assert!(odd.re.abs() < 1e-12);
        assert_eq!(grid.node_count(), grid.rule.len() * grid.rule.len());
    }

    #[test]
    fn single_sphere_grid_matches_rule() {
        let rule = SphereRule::<f64>::with_degree(5);
        let grid = ProductGrid::new(rule.clone(), 1).unwrap();
        let f = |theta: f64, phi: f64| {
            Complex64::new(theta.cos() * phi.sin(), theta.sin().powi(3))
        };
        let a = rule.integrate(f);
        let b = grid.integrate(|p| f(p.theta(0), p.phi(0)));
        assert!((a - b).norm() < 1e-13);
    }

    #[test]
    fn mc_constant_is_exact() {
        for n_sites in [1usize, 3] {
            let mc = McSphere::new(n_sites, 1000, 42).unwrap();
            let est = mc.integrate::<f64>(|_| 1.0);
            let expect = (4.0 * std::f64::consts::PI).powi(n_sites as i32);
            assert_eq!(est.value, expect);
            assert!(est.std_err.abs() < 1e-10);
        }
    }

    #[test]
    fn mc_z_squared_within_five_sigma() {
        let mc = McSphere::new(1, 1_000_000, 7).unwrap();
        let est = mc.integrate::<f64>(|p| p.theta(0).cos().powi(2));
        let expect = 4.0 * std::f64::consts::PI / 3.0;
        assert!(est.std_err > 0.0);
        assert!(
            (est.value - expect).abs() < 5.0 * est.std_err,
            "value {} expect {} err {}",
            est.value,
            expect,
            est.std_err
        );
    }

    #[test]
    fn mc_deterministic_for_fixed_seed() {
        let mc = McSphere::new(2, 5000, 123).unwrap();
        let a = mc.integrate::<f64>(|p| (p.theta(0) + p.phi(1)).cos());
        let b = mc.integrate::<f64>(|p| (p.theta(0) + p.phi(1)).cos());
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        let other = McSphere::new(2, 5000, 124).unwrap();
        let c = other.integrate::<f64>(|p| (p.theta(0) + p.phi(1)).cos());
        assert_ne!(a.value.to_bits(), c.value.to_bits());
    }
}
