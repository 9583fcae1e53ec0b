//! Closed-form results for the Heisenberg dimer Ĥ = ŝ₁·ŝ₂ of two spins s:
//! spectrum, Clebsch-Gordan coefficients, partition function, the explicit
//! covariant symbol of the scaled Gibbs state as a function of the angle
//! between the two classical spins, and its classical limit.
//!
//! These are the independent oracle the dense-matrix Gibbs machinery is
//! checked against.

use crate::error::{Error, Result};
use crate::exact::{factorial, ln_factorial_table, signed_sqrt};
use crate::scalar::Real;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// One total-spin sector of the dimer.
#[derive(Clone, Copy, Debug)]
pub struct DimerLevel<R: Real> {
    /// Total spin S (integer, 0..=2s).
    pub s_total: u32,
    /// E_S = (S(S+1) − 2s(s+1)) / (2s²).
    pub energy: R,
    /// 2S+1.
    pub degeneracy: u32,
}

/// The full dimer spectrum for a given 2s.
#[derive(Clone, Debug)]
pub struct DimerSpectrum<R: Real> {
    pub two_s: u32,
    pub levels: Vec<DimerLevel<R>>,
}

/// E_S = (1/2s²)(S(S+1) − 2s(s+1)), exactly in integer arithmetic before
/// the final division.
pub fn dimer_energy<R: Real>(two_s: u32, s_total: u32) -> R {
    let ts = two_s as i64;
    let cap_s = s_total as i64;
    let numerator = 2 * cap_s * (cap_s + 1) - ts * (ts + 2);
    R::from_int(numerator) / R::from_int(ts * ts)
}

pub fn dimer_spectrum<R: Real>(two_s: u32) -> DimerSpectrum<R> {
    let levels = (0..=two_s)
        .map(|s_total| DimerLevel {
            s_total,
            energy: dimer_energy(two_s, s_total),
            degeneracy: 2 * s_total + 1,
        })
        .collect();
    DimerSpectrum { two_s, levels }
}

/// Z(β) = Σ_S (2S+1) exp(−β E_S), accumulated with a max-exponent shift so
/// large β·s(s+1)/s² stays in range.
pub fn dimer_partition<R: Real>(two_s: u32, beta: R) -> R {
    let spectrum = dimer_spectrum::<R>(two_s);
    let shift = spectrum
        .levels
        .iter()
        .map(|l| -beta * l.energy)
        .fold(R::neg_infinity(), |a, b| a.max(b));
    let mut acc = R::zero();
    for level in &spectrum.levels {
        acc += R::from_count(level.degeneracy as usize) * (-beta * level.energy - shift).exp();
    }
    shift.exp() * acc
}

/// Clebsch-Gordan coefficient ⟨s m₁; s m₂ | S m⟩ for two equal spins, all
/// arguments doubled. Selection-rule violations return 0; malformed doubled
/// integers are an error. Racah's single-sum formula with exact big-integer
/// factorials, converted to floating point at the end.
pub fn clebsch_gordan<R: Real>(
    two_s: u32,
    two_m1: i64,
    two_m2: i64,
    two_cap_s: u32,
    two_m: i64,
) -> Result<R> {
    let ts = two_s as i64;
    let tss = two_cap_s as i64;
    // m must have the parity of s (per factor) and S, m must be integers for
    // integer total spin of two equal spins.
    if (two_m1 - ts) % 2 != 0 || (two_m2 - ts) % 2 != 0 {
        return Err(Error::MalformedDoubled(
            "two_m parity does not match two_s".into(),
        ));
    }
    if tss % 2 != 0 || two_m % 2 != 0 {
        return Err(Error::MalformedDoubled(
            "total spin of two equal spins must be an integer".into(),
        ));
    }
    if two_m1.abs() > ts || two_m2.abs() > ts {
        return Err(Error::MalformedDoubled("|m| exceeds s".into()));
    }
    // selection rules → zero
    if two_m1 + two_m2 != two_m || tss > 2 * ts || two_m.abs() > tss {
        return Ok(R::zero());
    }

    // Integer-valued combinations (j₁ = j₂ = s).
    let s_plus_m1 = ((ts + two_m1) / 2) as usize;
    let s_minus_m1 = ((ts - two_m1) / 2) as usize;
    let s_plus_m2 = ((ts + two_m2) / 2) as usize;
    let s_minus_m2 = ((ts - two_m2) / 2) as usize;
    let cap_s = (tss / 2) as usize;
    let m = two_m / 2;
    let cap_s_plus_m = (tss / 2 + m) as usize;
    let cap_s_minus_m = (tss / 2 - m) as usize;
    let two_s_minus_cap = (2 * ts - tss) / 2; // 2s − S

    // radicand = (2S+1)·(2s−S)!·S!·S!·(S+m)!(S−m)!(s∓m₁)!(s∓m₂)! / (2s+S+1)!
    let radicand = BigRational::new(
        BigInt::from(tss + 1)
            * factorial(two_s_minus_cap as usize)
            * factorial(cap_s)
            * factorial(cap_s)
            * factorial(cap_s_plus_m)
            * factorial(cap_s_minus_m)
            * factorial(s_plus_m1)
            * factorial(s_minus_m1)
            * factorial(s_plus_m2)
            * factorial(s_minus_m2),
        factorial((ts + cap_s as i64 + 1) as usize),
    );

    // Racah sum over k, bounds in ordinary (undoubled) integers:
    // k ≥ 0, k ≥ −(S − s + m₁), k ≥ −(S − s − m₂)
    // k ≤ 2s − S, k ≤ s − m₁, k ≤ s + m₂
    let lo = 0i64
        .max(-((tss - ts + two_m1) / 2))
        .max(-((tss - ts - two_m2) / 2));
    let hi = two_s_minus_cap
        .min((ts - two_m1) / 2)
        .min((ts + two_m2) / 2);
    let mut sum = BigRational::zero();
    let mut k = lo;
    while k <= hi {
        let den = factorial(k as usize)
            * factorial((two_s_minus_cap - k) as usize)
            * factorial(((ts - two_m1) / 2 - k) as usize)
            * factorial(((ts + two_m2) / 2 - k) as usize)
            * factorial(((tss - ts + two_m1) / 2 + k) as usize)
            * factorial(((tss - ts - two_m2) / 2 + k) as usize);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
        k += 1;
    }
    // value = sqrt(radicand) · sum, with the sign carried by the sum.
    let signed_square = &sum * &sum * radicand;
    let magnitude: R = signed_sqrt(&signed_square);
    Ok(if sum < BigRational::zero() {
        -magnitude
    } else {
        magnitude
    })
}

/// (2s+1)² ⟨Ω|G|Ω⟩ for the dimer Gibbs state in closed form, as a function
/// of the angle θ between Ω₁ and Ω₂. Every summand is nonnegative; the
/// factorial ratios are evaluated in log space so s = 20 stays in range.
/// Combining sin^{2s}θ · tan^{2m}(θ/2) / 2^{2s} into half-angle powers makes
/// both endpoints θ = 0, π exact.
pub fn dimer_symbol_closed<R: Real>(two_s: u32, beta: R, theta: R) -> R {
    let lf = ln_factorial_table::<R>(2 * two_s as usize + 2);
    let half = R::of(0.5);
    let sin_half = (theta * half).sin();
    let cos_half = (theta * half).cos();
    let ln_sin = if sin_half > R::zero() {
        sin_half.ln()
    } else {
        R::neg_infinity()
    };
    let ln_cos = if cos_half > R::zero() {
        cos_half.ln()
    } else {
        R::neg_infinity()
    };

    // ln Z by the same shifted accumulation as dimer_partition.
    let spectrum = dimer_spectrum::<R>(two_s);
    let ln_z = {
        let shift = spectrum
            .levels
            .iter()
            .map(|l| -beta * l.energy)
            .fold(R::neg_infinity(), |a, b| a.max(b));
        let mut acc = R::zero();
        for level in &spectrum.levels {
            acc += R::from_count(level.degeneracy as usize)
                * (-beta * level.energy - shift).exp();
        }
        shift + acc.ln()
    };

    // ln of each (S, a) term; a = s − m runs 0..=S.
    let ts = two_s as usize;
    let mut terms: Vec<R> = Vec::new();
    for level in &spectrum.levels {
        let cap_s = level.s_total as usize;
        let ln_coeff = -beta * level.energy
            + R::from_count(2 * cap_s + 1).ln()
            + R::of(2.0) * lf[ts]
            - lf[ts - cap_s]
            - lf[ts + cap_s + 1];
        for a in 0..=cap_s {
            let sin_pow = 2 * (ts - a);
            let cos_pow = 2 * a;
            if (sin_pow > 0 && ln_sin == R::neg_infinity())
                || (cos_pow > 0 && ln_cos == R::neg_infinity())
            {
                continue;
            }
            let mut ln_term = ln_coeff + lf[cap_s + a] - R::of(2.0) * lf[a] - lf[cap_s - a];
            if sin_pow > 0 {
                ln_term += R::from_count(sin_pow) * ln_sin;
            }
            if cos_pow > 0 {
                ln_term += R::from_count(cos_pow) * ln_cos;
            }
            terms.push(ln_term);
        }
    }
    let max_ln = terms
        .iter()
        .copied()
        .fold(R::neg_infinity(), |a, b| a.max(b));
    if max_ln == R::neg_infinity() {
        return R::zero();
    }
    let mut acc = R::zero();
    for t in &terms {
        acc += (*t - max_ln).exp();
    }
    let ln_prefactor = R::of(2.0) * R::from_count(ts + 1).ln();
    (max_ln + acc.ln() + ln_prefactor - ln_z).exp()
}

/// Classical dimer Gibbs density β e^{−β cos θ} / sinh β, with the β → 0
/// limit handled analytically.
pub fn dimer_classical<R: Real>(beta: R, theta: R) -> R {
    if beta == R::zero() {
        return R::one();
    }
    beta * (-beta * theta.cos()).exp() / beta.sinh()
}

/// ⟨S, m| as coefficients over the product basis |m₁, m₂⟩ (descending-m
/// index order), built from Clebsch-Gordan coefficients.
pub fn dimer_coupled_state<R: Real>(two_s: u32, two_cap_s: u32, two_m: i64) -> Result<Vec<R>> {
    let q = two_s as usize + 1;
    let mut v = vec![R::zero(); q * q];
    let ts = two_s as i64;
    for k1 in 0..q {
        let two_m1 = ts - 2 * k1 as i64;
        let two_m2 = two_m - two_m1;
        if two_m2.abs() > ts {
            continue;
        }
        let k2 = ((ts - two_m2) / 2) as usize;
        v[k1 * q + k2] = clebsch_gordan(two_s, two_m1, two_m2, two_cap_s, two_m)?;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_closed_forms() {
        // s = 1/2: E₀ = −3, E₁ = +1
        let sp = dimer_spectrum::<f64>(1);
        assert_eq!(sp.levels.len(), 2);
        assert_eq!(sp.levels[0].energy, -3.0);
        assert_eq!(sp.levels[1].energy, 1.0);
        // s = 1: E₀ = −2, E₁ = −1, E₂ = +1 with degeneracies 1, 3, 5
        let sp = dimer_spectrum::<f64>(2);
        let energies: Vec<f64> = sp.levels.iter().map(|l| l.energy).collect();
        assert_eq!(energies, vec![-2.0, -1.0, 1.0]);
        let degs: Vec<u32> = sp.levels.iter().map(|l| l.degeneracy).collect();
        assert_eq!(degs, vec![1, 3, 5]);
        // degeneracies always sum to (2s+1)²; energies increase with S
        for two_s in [1u32, 2, 5, 40] {
            let sp = dimer_spectrum::<f64>(two_s);
            let total: u32 = sp.levels.iter().map(|l| l.degeneracy).sum();
            assert_eq!(total as usize, (two_s as usize + 1).pow(2));
            for pair in sp.levels.windows(2) {
                assert!(pair[0].energy < pair[1].energy);
            }
        }
    }

    #[test]
    fn partition_closed_forms() {
        // β = 0 → (2s+1)²
        for two_s in [1u32, 3, 10] {
            let z = dimer_partition::<f64>(two_s, 0.0);
            assert_eq!(z, ((two_s + 1) * (two_s + 1)) as f64);
        }
        // s = 1/2, β = 1 → e³ + 3e⁻¹
        let z = dimer_partition::<f64>(1, 1.0);
        let expect = 3.0f64.exp() + 3.0 * (-1.0f64).exp();
        assert!((z - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn cg_basic_values() {
        // singlet of two spin-1/2: ⟨½,½;½,−½|0,0⟩ = 1/√2
        let v: f64 = clebsch_gordan(1, 1, -1, 0, 0).unwrap();
        assert!((v - 0.5f64.sqrt()).abs() < 1e-15);
        let v: f64 = clebsch_gordan(1, -1, 1, 0, 0).unwrap();
        assert!((v + 0.5f64.sqrt()).abs() < 1e-15);
        // stretched state: ⟨½,½;½,½|1,1⟩ = 1
        let v: f64 = clebsch_gordan(1, 1, 1, 2, 2).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        // selection-rule violation → 0
        let v: f64 = clebsch_gordan(1, 1, 1, 2, 0).unwrap();
        assert_eq!(v, 0.0);
        // malformed parity → error
        assert!(clebsch_gordan::<f64>(1, 0, 1, 2, 2).is_err());
        assert!(clebsch_gordan::<f64>(1, 3, -1, 2, 2).is_err());
    }

    #[test]
    fn cg_orthogonality() {
        // Σ_{S,m} CG(m₁,m₂;S,m)² = 1 for every fixed (m₁, m₂), s ≤ 5.
        for two_s in [1u32, 2, 5, 10] {
            let ts = two_s as i64;
            let mut two_m1 = -ts;
            while two_m1 <= ts {
                let mut two_m2 = -ts;
                while two_m2 <= ts {
                    let mut total = 0.0f64;
                    for two_cap_s in (0..=2 * two_s).step_by(2) {
                        let v: f64 =
                            clebsch_gordan(two_s, two_m1, two_m2, two_cap_s, two_m1 + two_m2)
                                .unwrap();
                        total += v * v;
                    }
                    assert!(
                        (total - 1.0).abs() < 1e-12,
                        "two_s={two_s} m1={two_m1} m2={two_m2}: {total}"
                    );
                    two_m2 += 2;
                }
                two_m1 += 2;
            }
        }
    }

    #[test]
    fn classical_density_values() {
        // β = 1, θ = π → e/sinh(1)
        let v = dimer_classical::<f64>(1.0, std::f64::consts::PI);
        let expect = 1.0f64.exp() / 1.0f64.sinh();
        assert!((v - expect).abs() < 1e-13);
        // β → 0 limit is exactly 1
        assert_eq!(dimer_classical::<f64>(0.0, 1.234), 1.0);
        // β = 1, θ = π/2 → 1/sinh(1)
        let v = dimer_classical::<f64>(1.0, std::f64::consts::FRAC_PI_2);
        assert!((v - 1.0 / 1.0f64.sinh()).abs() < 1e-13);
    }

    #[test]
    fn classical_density_normalizes() {
        // (1/2) ∫ G^cl(θ) sin θ dθ = 1
        let (nodes, weights) = crate::quadrature::gauss_legendre::<f64>(60);
        for beta in [0.5f64, 1.0, 4.0] {
            let mut acc = 0.0;
            for (u, w) in nodes.iter().zip(&weights) {
                // u = cos θ
                let theta = u.acos();
                acc += w * dimer_classical::<f64>(beta, theta);
            }
            acc *= 0.5;
            assert!((acc - 1.0).abs() < 1e-12, "beta={beta}: {acc}");
        }
    }

    #[test]
    fn closed_symbol_at_beta_zero_is_one() {
        for two_s in [1u32, 2, 7, 40] {
            for theta in [0.0, 0.3, 1.5, 3.0, std::f64::consts::PI] {
                let v = dimer_symbol_closed::<f64>(two_s, 0.0, theta);
                assert!(
                    (v - 1.0).abs() < 1e-11,
                    "two_s={two_s} theta={theta}: {v}"
                );
            }
        }
    }

    #[test]
    fn closed_symbol_endpoints_finite() {
        // θ = 0 picks out the stretched state: value e^{-βE_{2s}}·(2s+1)²/Z.
        for two_s in [1u32, 4, 40] {
            let beta = 1.0;
            let v0 = dimer_symbol_closed::<f64>(two_s, beta, 0.0);
            let z = dimer_partition::<f64>(two_s, beta);
            let e_top = dimer_energy::<f64>(two_s, two_s);
            let expect = ((two_s + 1) * (two_s + 1)) as f64 * (-beta * e_top).exp() / z;
            assert!(
                (v0 - expect).abs() < 1e-10 * expect.max(1.0),
                "two_s={two_s}"
            );
            let v_pi = dimer_symbol_closed::<f64>(two_s, beta, std::f64::consts::PI);
            assert!(v_pi.is_finite() && v_pi > 0.0);
        }
    }

    #[test]
    fn closed_symbol_approaches_classical() {
        // sup error over a θ grid decreases along s = 1, 5, 20 at β = 1.
        let beta = 1.0;
        let mut sups = Vec::new();
        for two_s in [2u32, 10, 40] {
            let mut sup = 0.0f64;
            for i in 0..=60 {
                let theta = std::f64::consts::PI * i as f64 / 60.0;
                let q = dimer_symbol_closed::<f64>(two_s, beta, theta);
                let cl = dimer_classical::<f64>(beta, theta);
                sup = sup.max((q - cl).abs());
            }
            sups.push(sup);
        }
        assert!(sups[0] > sups[1] && sups[1] > sups[2], "sups={sups:?}");
        assert!(sups[2] < 0.05);
    }
}
