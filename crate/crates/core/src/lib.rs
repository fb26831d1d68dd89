//! Numerical workbench for Hardy–Littlewood type inequalities of
//! multilinear forms.
//!
//! The crate computes the optimal Khinchin lower constants, the exponents
//! and constants of the λ₀-family of mixed-norm bounds
//!
//! ```text
//! ( Σ_{j_i} ( Σ_{ĵ_i} |T(e_{j₁}, …, e_{j_m})|^s )^{η₁/s} )^{1/η₁} ≤ A_{λ₀}^{−2(m−1)/s} ‖T‖,
//! ```
//!
//! and checks them numerically: exact Rademacher enumeration, operator norm
//! brackets with explicit witnesses, and seeded random certification runs.
//!
//! Everything is generic over a [`Scalar`] (real or complex, `f32` or `f64`
//! precision); the aliases below fix the common double-precision choices.
//!
//! ```
//! use hlcert_core::{exponents, ScalarField};
//!
//! let e = exponents(3, 4.0f64, 1.0, ScalarField::Real).unwrap();
//! assert!((e.s - 2.0).abs() < 1e-12);
//! assert!((e.eta1 - 4.0).abs() < 1e-12);
//! assert!((e.constant - 2.0).abs() < 1e-12);
//! ```

// Range checks are written as `!(x >= lo)` on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certify;
pub mod chaos;
pub mod error;
pub mod exponents;
pub mod norm;
pub mod scalar;
pub mod seed;
pub mod serde_ext;
pub mod signs;
pub mod special;
pub mod tensor;

pub use num_complex::Complex64;

pub use certify::{
    certify, certify_form, search_extremal, sweep_lambda0, CertificationReport, Classification, FormVerdict,
    SearchConfig, SearchResult, SweepRow, TrialConfig, TrialMix, TrialRecord,
};
pub use chaos::{
    chaos_moment, check_contraction, check_khinchin, check_multiple_khinchin, rademacher_moment, steinhaus_moment,
    verify_proof_chain, ChainReport, ChaosMoment, MomentMode, MonteCarloConfig, Variables,
};
pub use error::{Error, Result};
pub use exponents::{classical_exponents, exponents, region, transfer, TransferProblem};
pub use norm::{alternating_max, estimate_norm, exact_linf_enum, AscentConfig, NormMethod};
pub use scalar::{Real, Scalar, ScalarField};
pub use special::{gamma, khinchin_a, solve_q0, KhinchinBranch};
pub use tensor::{generate, AnyForm, FormTensor, MixedNormSpec, TensorKind};

/// Real forms in double precision.
pub type RealForm = tensor::FormTensor<f64>;
/// Complex forms in double precision.
pub type ComplexForm = tensor::FormTensor<Complex64>;
pub type KhinchinConstant = special::KhinchinConstant<f64>;
pub type ExponentSet = exponents::ExponentSet<f64>;
pub type Region = exponents::Region<f64>;
pub type TransferResult = exponents::TransferResult<f64>;
pub type ClassicalExponents = exponents::ClassicalExponents<f64>;
pub type RealNormEstimate = norm::NormEstimate<f64>;
pub type ComplexNormEstimate = norm::NormEstimate<Complex64>;
