//! Spin coherent states, Berezin covariant/contravariant symbols, spin-walk
//! combinatorics, and quantum/classical Gibbs states for N-spin systems.
//!
//! The crate is organized around the classical phase space (S²)^N: coherent
//! states |Ω⟩ map operators to functions via the covariant symbol ⟨Ω|A|Ω⟩
//! and functions back to operators via A(F) = ∫F|Ω⟩⟨Ω|d̃Ω. On top of that
//! sit the Gibbs-state machinery (quantum vs classical, with the uniform
//! error bound βLJp·e^{βLJ}/√(2s)), the Heisenberg-dimer closed forms used
//! as an independent oracle, and the spin-walk expansion of monomial symbols
//! with its order-1/s corrections.
//!
//! Everything numerical is generic over the scalar type via [`scalar::Real`]
//! (`f32` or `f64`); exact combinatorial quantities (walk weights, A(zⁿ)
//! coefficients, Clebsch-Gordan sums) use big-integer rationals. Concrete
//! `f64` aliases for the main types are exported at the crate root.

pub mod dimer;
pub mod error;
pub mod exact;
pub mod gibbs;
pub mod linalg;
pub mod operator;
pub mod quadrature;
pub mod scalar;
pub mod spin;
pub mod symbols;
pub mod walks;

pub use error::{Error, Result};
pub use operator::{hermitian_exp, Operator};
pub use scalar::{Real, C};
pub use spin::{
    apply_site_op, coherent_vector, coherent_vector_n, embed_site, make_spin_matrices,
    rotated_coeffs, rotation_from_unitary, rotation_unitary, Axis, PhasePoint, RotatedCoeffs,
    SpinMatrices, SpinRep, DEFAULT_DIM_CAP,
};

pub use gibbs::{
    classical_gibbs_density, classical_hamiltonian, classical_partition, convergence_bound,
    convergence_scan, gibbs_operator, parse_hamiltonian, quantum_hamiltonian, scaled_gibbs_symbol,
    scaled_partition, thermal_expectation, truncated_gibbs_symbol, GibbsResult, HamiltonianSpec,
    HamiltonianTerm, PartitionQuad, ScanConfig, ScanGrid, ScanReport, ScanRow, ScanSummary,
    SpectralHamiltonian,
};
pub use quadrature::{gauss_legendre, McSphere, ProductGrid, SphereRule};
pub use symbols::{
    a_zn_coefficients, a_zn_operator, completeness_defect, contravariant_matrix, covariant_symbol,
    duality_gap, intertwining_defect, monomial_symbol_direct, ContravariantInput,
    MultiIndexMonomial,
};
pub use walks::{
    enumerate_walks, laurent_coefficients, monomial_symbol_walks, motzkin_numbers,
    semiclassical_corrections, walk_contribution, walk_weight, weight_formula_string,
    weight_series, AxisMonomial,
    Corrections, SpinWalk, WalkWeight,
};

pub use dimer::{
    clebsch_gordan, dimer_classical, dimer_partition, dimer_spectrum, dimer_symbol_closed,
    DimerLevel, DimerSpectrum,
};

/// Default-precision aliases.
pub type Operator64 = Operator<f64>;
pub type PhasePoint64 = PhasePoint<f64>;
pub type HamiltonianSpec64 = HamiltonianSpec<f64>;
pub type GibbsResult64 = GibbsResult<f64>;
pub type Complex64 = num_complex::Complex<f64>;

/// Single-precision aliases.
pub type Operator32 = Operator<f32>;
pub type PhasePoint32 = PhasePoint<f32>;
pub type HamiltonianSpec32 = HamiltonianSpec<f32>;
pub type Complex32 = num_complex::Complex<f32>;
