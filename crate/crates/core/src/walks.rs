//! Spin walks: Motzkin-path enumeration, exact walk weights N(w), the
//! walk expansion of single-site monomial symbols, and the order-1/s
//! semiclassical corrections.
//!
//! A walk w = (a₀,…,a_n) with a₀ = a_n = 0, steps in {-1, 0, +1} and
//! nonnegative levels indexes one chain of nonvanishing matrix elements in
//! the descending-m basis; its weight is
//! N(w) = s^{-n} Π_τ (s-τ)^{B(τ)} Π_σ ((2s-σ)(σ+1))^{T(σ)},
//! with B(τ) breaks at level τ and T(σ) transition pairs σ ↔ σ+1.

use crate::error::{Error, Result};
use crate::exact::ratio_to_real;
use crate::scalar::{Real, C};
use crate::spin::{rotated_coeffs, Axis, RotatedCoeffs};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Longest enumerable walk (Motzkin growth).
pub const MAX_WALK_LENGTH: usize = 14;

/// Longest monomial the symbol assembly will expand.
pub const MAX_SYMBOL_LENGTH: usize = 12;

/// A single spin walk (Motzkin path).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinWalk {
    levels: Vec<u32>,
}

impl SpinWalk {
    pub fn new(levels: Vec<u32>) -> Result<Self> {
        if levels.len() < 2 {
            return Err(Error::InvalidWalk("walk needs at least one step".into()));
        }
        if levels[0] != 0 || *levels.last().expect("nonempty") != 0 {
            return Err(Error::InvalidWalk("walk must start and end at 0".into()));
        }
        for pair in levels.windows(2) {
            let diff = pair[1] as i64 - pair[0] as i64;
            if diff.abs() > 1 {
                return Err(Error::InvalidWalk(format!(
                    "step {} -> {} larger than one",
                    pair[0], pair[1]
                )));
            }
        }
        Ok(Self { levels })
    }

    pub fn levels(&self) -> &[u32] {
        &self.levels
    }

    /// Walk length n (number of steps).
    pub fn n(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn max_level(&self) -> u32 {
        *self.levels.iter().max().expect("nonempty")
    }

    /// δ(ℓ) = a_ℓ − a_{ℓ-1} for ℓ = 1..=n.
    pub fn steps(&self) -> Vec<i8> {
        self.levels
            .windows(2)
            .map(|p| (p[1] as i64 - p[0] as i64) as i8)
            .collect()
    }

    /// B(τ): number of breaks (a_{ℓ-1} = a_ℓ = τ).
    pub fn break_counts(&self) -> BTreeMap<u32, u32> {
        let mut map = BTreeMap::new();
        for pair in self.levels.windows(2) {
            if pair[0] == pair[1] {
                *map.entry(pair[0]).or_insert(0) += 1;
            }
        }
        map
    }

    /// T(σ): number of transition pairs σ ↔ σ+1 (counted by their upward
    /// member; the walk returns to zero, so ups and downs match).
    pub fn transition_pairs(&self) -> BTreeMap<u32, u32> {
        let mut map = BTreeMap::new();
        for pair in self.levels.windows(2) {
            if pair[1] == pair[0] + 1 {
                *map.entry(pair[0]).or_insert(0) += 1;
            }
        }
        map
    }

    /// Total number of transition pairs.
    pub fn total_pairs(&self) -> u32 {
        self.transition_pairs().values().sum()
    }
}

/// All spin walks of length n in lexicographic level order. `two_s = None`
/// drops the a_ℓ ≤ 2s ceiling (the unbounded count is the Motzkin number).
pub fn enumerate_walks(n: usize, two_s: Option<u32>) -> Result<Vec<SpinWalk>> {
    if n < 1 {
        return Err(Error::InvalidWalk("walk length must be at least 1".into()));
    }
    if n > MAX_WALK_LENGTH {
        return Err(Error::WalkLengthTooLarge {
            n,
            limit: MAX_WALK_LENGTH,
        });
    }
    let cap = two_s.unwrap_or(u32::MAX);
    let mut walks = Vec::new();
    let mut levels = vec![0u32; n + 1];
    descend(&mut walks, &mut levels, 1, n, cap);
    Ok(walks)
}

fn descend(walks: &mut Vec<SpinWalk>, levels: &mut Vec<u32>, pos: usize, n: usize, cap: u32) {
    if pos == n {
        if levels[n - 1] <= 1 {
            levels[n] = 0;
            walks.push(SpinWalk {
                levels: levels.clone(),
            });
        }
        return;
    }
    let prev = levels[pos - 1];
    let remaining = (n - pos) as u32;
    let lo = prev.saturating_sub(1);
    for next in lo..=prev + 1 {
        // must stay within the ceiling and still be able to return to 0
        if next > cap || next > remaining {
            continue;
        }
        levels[pos] = next;
        descend(walks, levels, pos + 1, n, cap);
    }
}

/// Motzkin numbers M₀..M_n by the convolution recurrence, independent of the
/// walk enumerator.
pub fn motzkin_numbers(n_max: usize) -> Vec<BigInt> {
    let mut m = vec![BigInt::one()];
    for n in 0..n_max {
        let mut next = m[n].clone();
        for k in 0..n {
            next += &m[k] * &m[n - 1 - k];
        }
        m.push(next);
    }
    m
}

/// Exact rational walk weight N(w) at a given 2s.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkWeight(pub BigRational);

impl WalkWeight {
    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn to_real<R: Real>(&self) -> R {
        ratio_to_real(&self.0)
    }

    /// "p/q" form.
    pub fn to_fraction_string(&self) -> String {
        format!("{}/{}", self.0.numer(), self.0.denom())
    }
}

/// N(w) = s^{-n} Π_τ (s-τ)^{B(τ)} Π_σ ((2s-σ)(σ+1))^{T(σ)}, exactly.
pub fn walk_weight(w: &SpinWalk, two_s: u32) -> Result<WalkWeight> {
    if w.max_level() > two_s {
        return Err(Error::WalkLevelBound {
            level: w.max_level(),
            two_s,
        });
    }
    let mut acc = BigRational::one();
    for (tau, b) in w.break_counts() {
        let factor = BigRational::new(
            BigInt::from(two_s as i64 - 2 * tau as i64),
            BigInt::from(2),
        );
        for _ in 0..b {
            acc *= &factor;
        }
    }
    for (sigma, t) in w.transition_pairs() {
        let factor = BigRational::from(BigInt::from(
            (two_s as i64 - sigma as i64) * (sigma as i64 + 1),
        ));
        for _ in 0..t {
            acc *= &factor;
        }
    }
    let inv_s = BigRational::new(BigInt::from(2), BigInt::from(two_s));
    for _ in 0..w.n() {
        acc *= &inv_s;
    }
    Ok(WalkWeight(acc))
}

/// Exact expansion of N(w) in powers of 1/s: returns c₀..c_n with
/// N(w) = Σ_j c_j s^{-j}, valid for every s at once.
pub fn weight_series(w: &SpinWalk) -> Vec<BigRational> {
    // numerator polynomial in s, integer coefficients, index = power of s
    let mut poly: Vec<BigInt> = vec![BigInt::one()];
    for (tau, b) in w.break_counts() {
        for _ in 0..b {
            poly = poly_mul_linear(&poly, BigInt::from(-(tau as i64)), BigInt::one());
        }
    }
    for (sigma, t) in w.transition_pairs() {
        let c0 = BigInt::from(-(sigma as i64) * (sigma as i64 + 1));
        let c1 = BigInt::from(2 * (sigma as i64 + 1));
        for _ in 0..t {
            poly = poly_mul_linear(&poly, c0.clone(), c1.clone());
        }
    }
    let n = w.n();
    (0..=n)
        .map(|j| {
            if n - j < poly.len() {
                BigRational::from(poly[n - j].clone())
            } else {
                BigRational::zero()
            }
        })
        .collect()
}

/// poly · (c₀ + c₁ s)
fn poly_mul_linear(poly: &[BigInt], c0: BigInt, c1: BigInt) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); poly.len() + 1];
    for (k, p) in poly.iter().enumerate() {
        out[k] += p * &c0;
        out[k + 1] += p * &c1;
    }
    out
}

/// N(w) as a reduced symbolic rational in s, e.g. "1", "2/s", "(8*s - 4)/s^3".
pub fn weight_formula_string(w: &SpinWalk) -> String {
    let series = weight_series(w);
    let jmax = series
        .iter()
        .rposition(|c| !c.is_zero())
        .unwrap_or(0);
    // numerator coefficients of s^k, k = 0..=jmax
    let coeffs: Vec<BigRational> = (0..=jmax).map(|k| series[jmax - k].clone()).collect();
    let mut parts: Vec<String> = Vec::new();
    for (k, c) in coeffs.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let mag = if c < &BigRational::zero() {
            -c.clone()
        } else {
            c.clone()
        };
        let mag_str = if mag.denom() == &BigInt::one() {
            mag.numer().to_string()
        } else {
            format!("{}/{}", mag.numer(), mag.denom())
        };
        let body = match k {
            0 => mag_str,
            1 if mag == BigRational::one() => "s".to_string(),
            1 => format!("{mag_str}*s"),
            _ if mag == BigRational::one() => format!("s^{k}"),
            _ => format!("{mag_str}*s^{k}"),
        };
        if parts.is_empty() {
            if c < &BigRational::zero() {
                parts.push(format!("-{body}"));
            } else {
                parts.push(body);
            }
        } else if c < &BigRational::zero() {
            parts.push(format!(" - {body}"));
        } else {
            parts.push(format!(" + {body}"));
        }
    }
    let numerator = if parts.is_empty() {
        "0".to_string()
    } else {
        parts.concat()
    };
    match jmax {
        0 => numerator,
        _ => {
            let wrapped = if parts.len() > 1 {
                format!("({numerator})")
            } else {
                numerator
            };
            if jmax == 1 {
                format!("{wrapped}/s")
            } else {
                format!("{wrapped}/s^{jmax}")
            }
        }
    }
}

/// Ordered single-site monomial ŝ_{i₁}…ŝ_{i_n}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AxisMonomial {
    axes: Vec<Axis>,
}

impl AxisMonomial {
    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() {
            return Err(Error::MonomialParse {
                position: 0,
                reason: "monomial must have at least one factor".into(),
            });
        }
        Ok(Self { axes })
    }

    /// Parse whitespace-separated axis tokens, e.g. "x y x z".
    pub fn parse(text: &str) -> Result<Self> {
        let mut axes = Vec::new();
        for (pos, token) in text.split_whitespace().enumerate() {
            let axis = match token {
                "x" => Axis::X,
                "y" => Axis::Y,
                "z" => Axis::Z,
                other => {
                    return Err(Error::MonomialParse {
                        position: pos + 1,
                        reason: format!(
                            "expected axis x, y or z, got '{other}' \
                             (site-qualified factors belong to the multi-site path)"
                        ),
                    })
                }
            };
            axes.push(axis);
        }
        Self::new(axes)
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.axes.is_empty()
    }

    /// Classical limit at a unit vector: Π Ω_{i_ℓ}.
    pub fn classical<R: Real>(&self, omega: &[R; 3]) -> R {
        self.axes
            .iter()
            .map(|a| omega[a.index()])
            .fold(R::one(), |acc, x| acc * x)
    }

    /// Exponents (n_x, n_y, n_z).
    pub fn exponents(&self) -> [u32; 3] {
        let mut e = [0u32; 3];
        for a in &self.axes {
            e[a.index()] += 1;
        }
        e
    }
}

fn step_coeffs<R: Real>(theta: R, phi: R) -> [RotatedCoeffs<R>; 3] {
    [
        rotated_coeffs(Axis::X, theta, phi),
        rotated_coeffs(Axis::Y, theta, phi),
        rotated_coeffs(Axis::Z, theta, phi),
    ]
}

/// Contribution of one walk to g(M): N(w) · Π_ℓ s_{i_ℓ, δ(ℓ)}(Ω).
pub fn walk_contribution<R: Real>(
    m: &AxisMonomial,
    w: &SpinWalk,
    theta: R,
    phi: R,
    two_s: u32,
) -> Result<C<R>> {
    if w.n() != m.len() {
        return Err(Error::InvalidWalk(format!(
            "walk length {} does not match monomial degree {}",
            w.n(),
            m.len()
        )));
    }
    let coeffs = step_coeffs(theta, phi);
    let weight: R = walk_weight(w, two_s)?.to_real();
    let mut acc = Complex::new(weight, R::zero());
    for (axis, step) in m.axes.iter().zip(w.steps()) {
        acc *= coeffs[axis.index()].step_factor(step);
    }
    Ok(acc)
}

/// g(M)(Ω) assembled from the walk expansion
/// g(M) = Σ_w N(w) Π_ℓ s_{i_ℓ, δ(ℓ)}(Ω).
pub fn monomial_symbol_walks<R: Real>(
    m: &AxisMonomial,
    theta: R,
    phi: R,
    two_s: u32,
) -> Result<C<R>> {
    if two_s == 0 {
        return Err(Error::TrivialRep);
    }
    let n = m.len();
    if n > MAX_SYMBOL_LENGTH {
        return Err(Error::WalkLengthTooLarge {
            n,
            limit: MAX_SYMBOL_LENGTH,
        });
    }
    let walks = enumerate_walks(n, Some(two_s))?;
    let coeffs = step_coeffs(theta, phi);
    let mut acc = Complex::new(R::zero(), R::zero());
    for w in &walks {
        let weight: R = walk_weight(w, two_s)?.to_real();
        let mut term = Complex::new(weight, R::zero());
        for (axis, step) in m.axes.iter().zip(w.steps()) {
            term *= coeffs[axis.index()].step_factor(step);
        }
        acc += term;
    }
    Ok(acc)
}

/// The three order-1/s corrections to g(M).
#[derive(Clone, Copy, Debug)]
pub struct Corrections<R: Real> {
    pub c1: C<R>,
    pub c2: C<R>,
    pub c3: C<R>,
}

impl<R: Real> Corrections<R> {
    pub fn total(&self) -> C<R> {
        self.c1 + self.c2 + self.c3
    }
}

/// C₁ = -n(n-1)/(4s)·M^cl, C₂ = ΔM^cl/(4s) with the Laplacian taken in the
/// three unconstrained variables, and C₃ = (i/2s)·Σ_{k<ℓ} ε_{i_k i_ℓ m}
/// (product of the remaining factors)·Ω_m.
pub fn semiclassical_corrections<R: Real>(
    m: &AxisMonomial,
    theta: R,
    phi: R,
    two_s: u32,
) -> Corrections<R> {
    let s = R::from_count(two_s as usize) / R::of(2.0);
    let st = theta.sin();
    let omega = [st * phi.cos(), st * phi.sin(), theta.cos()];
    let n = m.len();
    let nf = R::from_count(n);
    let classical = m.classical(&omega);

    let c1 = -nf * (nf - R::one()) / (R::of(4.0) * s) * classical;

    // Laplacian of x^a y^b z^c as a polynomial in free variables.
    let e = m.exponents();
    let mut laplacian = R::zero();
    for (i, &ei) in e.iter().enumerate() {
        if ei >= 2 {
            let mut term =
                R::from_count(ei as usize) * R::from_count(ei as usize - 1);
            for (j, &ej) in e.iter().enumerate() {
                let power = if i == j { ej - 2 } else { ej };
                term *= omega[j].powi(power as i32);
            }
            laplacian += term;
        }
    }
    let c2 = laplacian / (R::of(4.0) * s);

    // Commutator contraction: each pair (k, ℓ) with k < ℓ is replaced by
    // ε_{i_k i_ℓ m} Ω_m; classical variables commute so the placement of the
    // contracted factor is immaterial.
    let mut contraction = R::zero();
    for k in 0..n {
        for l in k + 1..n {
            if let Some((third, sign)) = levi_civita(m.axes[k], m.axes[l]) {
                let mut prod = if sign > 0 { R::one() } else { -R::one() };
                prod *= omega[third.index()];
                for (j, axis) in m.axes.iter().enumerate() {
                    if j != k && j != l {
                        prod *= omega[axis.index()];
                    }
                }
                contraction += prod;
            }
        }
    }
    let c3 = Complex::new(R::zero(), contraction / (R::of(2.0) * s));

    Corrections {
        c1: Complex::new(c1, R::zero()),
        c2: Complex::new(c2, R::zero()),
        c3,
    }
}

/// ε_{abc}: the third axis and the sign, or None when a == b.
fn levi_civita(a: Axis, b: Axis) -> Option<(Axis, i32)> {
    use Axis::*;
    match (a, b) {
        (X, Y) => Some((Z, 1)),
        (Y, X) => Some((Z, -1)),
        (Y, Z) => Some((X, 1)),
        (Z, Y) => Some((X, -1)),
        (Z, X) => Some((Y, 1)),
        (X, Z) => Some((Y, -1)),
        _ => None,
    }
}

/// Laurent coefficients of g(M) in powers of 1/s at a fixed Ω, recovered
/// from sample evaluations at the given spins by an exact Vandermonde solve
/// (g(M) is a polynomial of degree ≤ n in u = 1/s).
pub fn laurent_coefficients<R: Real>(
    m: &AxisMonomial,
    theta: R,
    phi: R,
    two_s_samples: &[u32],
) -> Result<Vec<C<R>>> {
    let n = m.len();
    let need = n + 1;
    let mut distinct: Vec<u32> = Vec::new();
    for &ts in two_s_samples {
        if ts >= 1 && !distinct.contains(&ts) {
            distinct.push(ts);
        }
        if distinct.len() == need {
            break;
        }
    }
    if distinct.len() < need {
        return Err(Error::UnderdeterminedSamples {
            need,
            got: distinct.len(),
        });
    }
    // V[i][j] = u_i^j with u_i = 2/two_s_i, inverted exactly.
    let u: Vec<BigRational> = distinct
        .iter()
        .map(|&ts| BigRational::new(BigInt::from(2), BigInt::from(ts)))
        .collect();
    let mut vand = vec![vec![BigRational::zero(); need]; need];
    for (row, ui) in vand.iter_mut().zip(&u) {
        let mut acc = BigRational::one();
        for cell in row.iter_mut() {
            *cell = acc.clone();
            acc *= ui;
        }
    }
    let inv = invert_rational(vand).ok_or(Error::UnderdeterminedSamples {
        need,
        got: distinct.len(),
    })?;
    let samples: Vec<C<R>> = distinct
        .iter()
        .map(|&ts| monomial_symbol_walks(m, theta, phi, ts))
        .collect::<Result<_>>()?;
    let mut coeffs = Vec::with_capacity(need);
    for row in &inv {
        let mut acc = Complex::new(R::zero(), R::zero());
        for (entry, sample) in row.iter().zip(&samples) {
            acc += *sample * ratio_to_real::<R>(entry);
        }
        coeffs.push(acc);
    }
    Ok(coeffs)
}

/// Gauss-Jordan inverse over exact rationals.
fn invert_rational(mut a: Vec<Vec<BigRational>>) -> Option<Vec<Vec<BigRational>>> {
    let n = a.len();
    let mut inv: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    if i == j {
                        BigRational::one()
                    } else {
                        BigRational::zero()
                    }
                })
                .collect()
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col].clone();
        for j in 0..n {
            a[col][j] /= &p;
            inv[col][j] /= &p;
        }
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let factor = a[r][col].clone();
                for j in 0..n {
                    let t = &factor * &a[col][j];
                    a[r][j] -= t;
                    let t = &factor * &inv[col][j];
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{PhasePoint, SpinRep};
    use crate::symbols::{monomial_symbol_direct, MultiIndexMonomial};
    use num_traits::Signed;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn walks_of_length_two() {
        let walks = enumerate_walks(2, None).unwrap();
        assert_eq!(walks.len(), 2);
        assert_eq!(walks[0].levels(), &[0, 0, 0]);
        assert_eq!(walks[1].levels(), &[0, 1, 0]);
    }

    #[test]
    fn unbounded_counts_match_motzkin() {
        let expected = [1usize, 2, 4, 9, 21, 51, 127, 323, 835, 2188];
        for (i, &count) in expected.iter().enumerate() {
            let n = i + 1;
            assert_eq!(enumerate_walks(n, None).unwrap().len(), count, "n={n}");
        }
        // independent recurrence up to n = 14
        let motzkin = motzkin_numbers(14);
        for (n, m) in motzkin.iter().enumerate().skip(1) {
            let count = enumerate_walks(n, None).unwrap().len();
            assert_eq!(&BigInt::from(count), m, "n={n}");
        }
        assert!(matches!(
            enumerate_walks(15, None),
            Err(Error::WalkLengthTooLarge { .. })
        ));
    }

    #[test]
    fn bounded_enumeration_excludes_high_walks() {
        let bounded = enumerate_walks(4, Some(1)).unwrap();
        assert_eq!(bounded.len(), 8);
        assert!(!bounded.iter().any(|w| w.levels() == [0, 1, 2, 1, 0]));
        let unbounded = enumerate_walks(4, None).unwrap();
        assert_eq!(unbounded.len(), 9);
    }

    #[test]
    fn walk_statistics() {
        let w = SpinWalk::new(vec![0, 1, 1, 0, 0]).unwrap();
        assert_eq!(w.n(), 4);
        assert_eq!(w.steps(), vec![1, 0, -1, 0]);
        let breaks = w.break_counts();
        assert_eq!(breaks.get(&0), Some(&1));
        assert_eq!(breaks.get(&1), Some(&1));
        let pairs = w.transition_pairs();
        assert_eq!(pairs.get(&0), Some(&1));
        // Σ 2T + Σ B = n
        let t: u32 = pairs.values().sum();
        let b: u32 = breaks.values().sum();
        assert_eq!(2 * t + b, 4);
        assert!(SpinWalk::new(vec![0, 2, 0]).is_err());
        assert!(SpinWalk::new(vec![1, 0]).is_err());
    }

    #[test]
    fn weight_closed_forms() {
        // all-breaks walk has weight 1 for every s
        for two_s in [1u32, 2, 7, 40] {
            let w = SpinWalk::new(vec![0, 0, 0, 0]).unwrap();
            assert_eq!(walk_weight(&w, two_s).unwrap().0, BigRational::one());
        }
        // (0,1,0) → 2/s
        for two_s in [1u32, 2, 3, 10] {
            let w = SpinWalk::new(vec![0, 1, 0]).unwrap();
            let expect = BigRational::new(BigInt::from(4), BigInt::from(two_s));
            assert_eq!(walk_weight(&w, two_s).unwrap().0, expect);
        }
        // (0,1,2,1,0) → 4(2s-1)/s³
        for two_s in [2u32, 3, 10] {
            let w = SpinWalk::new(vec![0, 1, 2, 1, 0]).unwrap();
            let s = BigRational::new(BigInt::from(two_s), BigInt::from(2));
            let expect = BigRational::from(BigInt::from(4))
                * (BigRational::from(BigInt::from(two_s)) - BigRational::one())
                / (&s * &s * &s);
            assert_eq!(walk_weight(&w, two_s).unwrap().0, expect);
        }
        // level bound violation is an error
        let w = SpinWalk::new(vec![0, 1, 2, 1, 0]).unwrap();
        assert!(matches!(
            walk_weight(&w, 1),
            Err(Error::WalkLevelBound { level: 2, two_s: 1 })
        ));
    }

    #[test]
    fn weight_series_evaluates_to_weight() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let walks = enumerate_walks(5, None).unwrap();
        for w in &walks {
            let series = weight_series(w);
            for _ in 0..3 {
                let two_s = rng.gen_range(w.max_level().max(1)..=12);
                let u = BigRational::new(BigInt::from(2), BigInt::from(two_s));
                let mut acc = BigRational::zero();
                let mut upow = BigRational::one();
                for c in &series {
                    acc += c * &upow;
                    upow *= &u;
                }
                assert_eq!(acc, walk_weight(w, two_s).unwrap().0);
            }
        }
    }

    #[test]
    fn weight_positivity_below_s() {
        // N(w) > 0 whenever all break levels τ < s; sign flips only through
        // (s-τ) factors at τ > s.
        for two_s in [4u32, 7] {
            for w in enumerate_walks(4, Some(two_s)).unwrap() {
                let weight = walk_weight(&w, two_s).unwrap().0;
                let max_break = w.break_counts().keys().max().copied().unwrap_or(0);
                if 2 * max_break < two_s {
                    assert!(weight.is_positive(), "w={:?} two_s={two_s}", w.levels());
                }
            }
        }
    }

    #[test]
    fn two_z_symbol_closed_form() {
        // g(ŝ₃ŝ₃) = cos²θ + sin²θ/(2s): the two-walk expansion by hand.
        let m = AxisMonomial::parse("z z").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for two_s in [1u32, 2, 3, 9] {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::PI);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let got = monomial_symbol_walks::<f64>(&m, theta, phi, two_s).unwrap();
            let expect = theta.cos().powi(2) + theta.sin().powi(2) / two_s as f64;
            assert!((got.re - expect).abs() < 1e-14, "two_s={two_s}");
            assert!(got.im.abs() < 1e-15);
        }
    }

    #[test]
    fn walks_match_direct_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        for _ in 0..60 {
            let two_s = rng.gen_range(1..=9);
            let n = rng.gen_range(1..=6);
            let axes: Vec<Axis> = (0..n).map(|_| Axis::ALL[rng.gen_range(0..3)]).collect();
            let m = AxisMonomial::new(axes.clone()).unwrap();
            let p = PhasePoint::<f64>::random(1, &mut rng);
            let via_walks =
                monomial_symbol_walks::<f64>(&m, p.theta(0), p.phi(0), two_s).unwrap();
            let rep = SpinRep::new(two_s, 1).unwrap();
            let mm =
                MultiIndexMonomial::new(axes.iter().map(|&a| (0usize, a)).collect()).unwrap();
            let via_matrix = monomial_symbol_direct(&mm, &p, &rep).unwrap();
            assert!(
                (via_walks - via_matrix).norm() < 1e-12,
                "two_s={two_s} axes={axes:?}"
            );
        }
    }

    #[test]
    fn worked_example_corrections() {
        // M = ŝ₁ŝ₂ŝ₁ŝ₃: C₁ = -3x²yz/s, C₂ = yz/(2s), C₃ = i·x(x²-2y²)/(2s).
        let m = AxisMonomial::parse("x y x z").unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        for two_s in [2u32, 3, 10] {
            let s = two_s as f64 / 2.0;
            for _ in 0..5 {
                let p = PhasePoint::<f64>::random(1, &mut rng);
                let (theta, phi) = (p.theta(0), p.phi(0));
                let [x, y, z] = p.cartesian(0);
                let corr = semiclassical_corrections::<f64>(&m, theta, phi, two_s);
                assert!((corr.c1.re - (-3.0 * x * x * y * z / s)).abs() < 1e-13);
                assert!(corr.c1.im.abs() < 1e-16);
                assert!((corr.c2.re - y * z / (2.0 * s)).abs() < 1e-14);
                assert!(
                    (corr.c3 - Complex64::new(0.0, x * (x * x - 2.0 * y * y) / (2.0 * s)))
                        .norm()
                        < 1e-14
                );
            }
        }
    }

    #[test]
    fn laurent_recovers_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        // single z: only the s⁰ coefficient survives and equals cos θ
        let m = AxisMonomial::parse("z").unwrap();
        let theta = rng.gen_range(0.0..std::f64::consts::PI);
        let phi = rng.gen_range(0.0..std::f64::consts::TAU);
        let coeffs = laurent_coefficients::<f64>(&m, theta, phi, &[1, 2]).unwrap();
        assert!((coeffs[0].re - theta.cos()).abs() < 1e-14);
        assert!(coeffs[1].norm() < 1e-14);

        // s⁰ coefficient equals the classical monomial for random M
        for _ in 0..20 {
            let n = rng.gen_range(1..=5);
            let axes: Vec<Axis> = (0..n).map(|_| Axis::ALL[rng.gen_range(0..3)]).collect();
            let m = AxisMonomial::new(axes).unwrap();
            let p = PhasePoint::<f64>::random(1, &mut rng);
            let samples: Vec<u32> = (1..=n as u32 + 1).collect();
            let coeffs =
                laurent_coefficients::<f64>(&m, p.theta(0), p.phi(0), &samples).unwrap();
            let classical = m.classical(&p.cartesian(0));
            assert!(
                (coeffs[0] - Complex64::new(classical, 0.0)).norm() < 1e-10,
                "n={n}"
            );
        }

        // underdetermined sample sets are refused
        let m = AxisMonomial::parse("x y").unwrap();
        assert!(matches!(
            laurent_coefficients::<f64>(&m, 0.3, 0.4, &[2, 2, 2]),
            Err(Error::UnderdeterminedSamples { need: 3, got: 1 })
        ));
    }

    #[test]
    fn corrections_match_laurent_first_order() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..25 {
            let n = rng.gen_range(2..=5);
            let axes: Vec<Axis> = (0..n).map(|_| Axis::ALL[rng.gen_range(0..3)]).collect();
            let m = AxisMonomial::new(axes).unwrap();
            let p = PhasePoint::<f64>::random(1, &mut rng);
            let samples: Vec<u32> = (1..=n as u32 + 1).map(|k| 2 * k).collect();
            let coeffs =
                laurent_coefficients::<f64>(&m, p.theta(0), p.phi(0), &samples).unwrap();
            // evaluate C₁+C₂+C₃ at some s and compare with c₁/s
            let two_s = 6;
            let s = 3.0;
            let corr = semiclassical_corrections::<f64>(&m, p.theta(0), p.phi(0), two_s);
            let expect = coeffs[1] / s;
            assert!(
                (corr.total() - expect).norm() < 1e-9,
                "axes={:?} total={} expect={}",
                m.axes(),
                corr.total(),
                expect
            );
        }
    }

    #[test]
    fn single_pair_walks_carry_first_order() {
        // Recompute the 1/s Laurent coefficient from the walks with exactly
        // one transition pair; it must match the full coefficient.
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        for _ in 0..10 {
            let n = rng.gen_range(2..=5);
            let axes: Vec<Axis> = (0..n).map(|_| Axis::ALL[rng.gen_range(0..3)]).collect();
            let m = AxisMonomial::new(axes).unwrap();
            let p = PhasePoint::<f64>::random(1, &mut rng);
            let (theta, phi) = (p.theta(0), p.phi(0));
            let coeffs: [RotatedCoeffs<f64>; 3] = [
                rotated_coeffs(Axis::X, theta, phi),
                rotated_coeffs(Axis::Y, theta, phi),
                rotated_coeffs(Axis::Z, theta, phi),
            ];
            let mut from_subset = Complex64::new(0.0, 0.0);
            for w in enumerate_walks(n, None).unwrap() {
                if w.total_pairs() != 1 {
                    continue;
                }
                let series = weight_series(&w);
                let c1: f64 = ratio_to_real(&series[1]);
                let mut factor = Complex64::new(1.0, 0.0);
                for (axis, step) in m.axes().iter().zip(w.steps()) {
                    factor *= coeffs[axis.index()].step_factor(step);
                }
                from_subset += factor * c1;
            }
            let samples: Vec<u32> = (1..=n as u32 + 1).collect();
            let full = laurent_coefficients::<f64>(&m, theta, phi, &samples).unwrap();
            assert!(
                (full[1] - from_subset).norm() < 1e-10,
                "axes={:?}",
                m.axes()
            );
        }
    }

    #[test]
    fn monomial_parse_errors() {
        assert!(AxisMonomial::parse("x y z").is_ok());
        let err = AxisMonomial::parse("x 0y").unwrap_err();
        assert!(matches!(err, Error::MonomialParse { position: 2, .. }));
        assert!(AxisMonomial::parse("").is_err());
    }

    #[test]
    fn weight_formula_rendering() {
        let flat = SpinWalk::new(vec![0, 0, 0]).unwrap();
        assert_eq!(weight_formula_string(&flat), "1");
        let bump = SpinWalk::new(vec![0, 1, 0]).unwrap();
        assert_eq!(weight_formula_string(&bump), "2/s");
        let tall = SpinWalk::new(vec![0, 1, 2, 1, 0]).unwrap();
        // 4(2s-1)/s³
        assert_eq!(weight_formula_string(&tall), "(8*s - 4)/s^3");
        let mixed = SpinWalk::new(vec![0, 1, 1, 0, 0]).unwrap();
        // 2(s-1)/s²
        assert_eq!(weight_formula_string(&mixed), "(2*s - 2)/s^2");
    }
}
