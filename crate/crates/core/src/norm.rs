//! Operator norm ‖T‖ = sup |T(x₁, …, x_m)| over unit balls of ℓ_pⁿ.
//!
//! Lower bounds always come with an explicit witness tuple of unit vectors;
//! upper bounds come from inequalities that hold for every input.

use num_traits::{Float, One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{conjugate_exponent, lp_norm, Real, Scalar, ScalarField};
use crate::seed::{derive_seed, rng_from_seed};
use crate::signs::{sign_fold, sign_vector};
use crate::tensor::FormTensor;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormMethod {
    AlternatingMax,
    ExactSignEnum,
    DualClosedForm,
    CrudeUpper,
}

/// Certified bracket lower ≤ ‖T‖ ≤ upper.
#[derive(Debug, Clone, PartialEq)]
pub struct NormEstimate<S: Scalar> {
    pub lower: S::Real,
    pub upper: S::Real,
    pub method: NormMethod,
    pub restarts: usize,
    pub converged: bool,
    /// Unit vectors with |T(witness)| = lower.
    pub witness: Vec<Vec<S>>,
}

/// The serialized face of a [`NormEstimate`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSummary {
    pub lower: f64,
    pub upper: f64,
    pub method: NormMethod,
    pub restarts: usize,
    pub converged: bool,
}

impl<S: Scalar> NormEstimate<S> {
    pub fn summary(&self) -> NormSummary {
        NormSummary {
            lower: self.lower.to_f64_lossy(),
            upper: self.upper.to_f64_lossy(),
            method: self.method,
            restarts: self.restarts,
            converged: self.converged,
        }
    }

    pub fn witness_refs(&self) -> Vec<&[S]> {
        self.witness.iter().map(|v| v.as_slice()).collect()
    }

    pub fn is_exact(&self) -> bool {
        self.lower == self.upper
    }
}

/// Exact norm of a linear functional on ℓ_pⁿ together with a maximizer.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution<S: Scalar> {
    /// ‖c‖_{p'}.
    pub value: S::Real,
    /// Unit ℓ_p vector with Σ c_j x_j = value.
    pub maximizer: Vec<S>,
    /// c = 0; the maximizer is e₁.
    pub degenerate: bool,
}

/// sup_{‖x‖_p ≤ 1} |Σ c_j x_j| = ‖c‖_{p'} and a vector attaining it.
///
/// The maximizer is x_j ∝ conj(phase(c_j))·|c_j|^{p'−1} for 1 < p < ∞,
/// conj(phase(c_j)) for p = ∞ (with +1 where c_j = 0) and a signed basis
/// vector at the largest |c_j| for p = 1.
pub fn dual_norm_linear<S: Scalar>(c: &[S], p: S::Real) -> DualSolution<S> {
    assert!(p >= S::Real::one(), "dual_norm_linear needs p >= 1");
    let n = c.len();
    let zero = S::Real::zero();
    let dual = conjugate_exponent(p);
    let value = lp_norm(c, dual);
    if value == zero {
        let mut maximizer = vec![S::zero(); n];
        if let Some(first) = maximizer.first_mut() {
            *first = S::one();
        }
        return DualSolution {
            value,
            maximizer,
            degenerate: true,
        };
    }
    let mut maximizer: Vec<S> = if p.is_infinite() {
        c.iter().map(|&cj| cj.phase().conj()).collect()
    } else if dual.is_infinite() {
        let (k, _) = c.iter().enumerate().fold(
            (0, zero),
            |best, (j, cj)| {
                if cj.modulus() > best.1 {
                    (j, cj.modulus())
                } else {
                    best
                }
            },
        );
        let mut x = vec![S::zero(); n];
        x[k] = c[k].phase().conj();
        x
    } else {
        let expo = dual - S::Real::one();
        c.iter()
            .map(|&cj| cj.phase().conj().scale((cj.modulus() / value).powf(expo)))
            .collect()
    };
    if !p.is_infinite() {
        // Remove rounding drift so the witness sits on the unit sphere.
        let norm = lp_norm(&maximizer, p);
        for x in &mut maximizer {
            *x = x.scale(norm.recip());
        }
    }
    DualSolution {
        value,
        maximizer,
        degenerate: false,
    }
}

/// Σ_J |coeff[J]|, an upper bound on ‖T‖ for every p ≥ 1.
pub fn crude_upper<S: Scalar>(t: &FormTensor<S>) -> S::Real {
    t.coeffs().iter().map(|c| c.modulus()).sum()
}

/// ‖coeff‖_{p'}: Hölder against x₁ ⊗ ⋯ ⊗ x_m, whose ℓ_p norm is
/// Π‖x_k‖_p. Never worse than [`crude_upper`] and equal to it at p = ∞.
pub fn holder_upper<S: Scalar>(t: &FormTensor<S>, p: S::Real) -> S::Real {
    t.entry_norm(conjugate_exponent(p))
}

/// Settings of the block-coordinate ascent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AscentConfig {
    pub restarts: usize,
    pub max_iters: usize,
    pub tol: f64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        AscentConfig {
            restarts: 32,
            max_iters: 500,
            tol: 1e-10,
        }
    }
}

/// One ascent trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct AscentRun<S: Scalar> {
    pub value: S::Real,
    pub witness: Vec<Vec<S>>,
    /// |T(x)| after every single-slot update, starting with the initial
    /// point.
    pub history: Vec<S::Real>,
    pub sweeps: usize,
    pub converged: bool,
}

fn random_unit<S: Scalar, G: rand::Rng + ?Sized>(n: usize, p: S::Real, rng: &mut G) -> Vec<S> {
    loop {
        let v: Vec<S> = (0..n).map(|_| S::sample_gaussian(rng)).collect();
        let norm = lp_norm(&v, p);
        if norm > S::Real::zero() {
            return v.into_iter().map(|x| x.scale(norm.recip())).collect();
        }
    }
}

/// Runs the ascent from `init`: each step replaces one argument by the exact
/// maximizer of the linear functional left after fixing the others.
pub fn ascent_run<S: Scalar>(
    t: &FormTensor<S>,
    p: S::Real,
    init: Vec<Vec<S>>,
    max_iters: usize,
    tol: S::Real,
) -> Result<AscentRun<S>> {
    if init.len() != t.order() {
        return Err(Error::DimensionMismatch {
            expected: t.order(),
            got: init.len(),
        });
    }
    let mut xs = init;
    let start = {
        let refs: Vec<&[S]> = xs.iter().map(|v| v.as_slice()).collect();
        t.evaluate(&refs)?.modulus()
    };
    let mut history = vec![start];
    let mut current = start;
    let mut converged = false;
    let mut sweeps = 0;
    for _ in 0..max_iters {
        let before = current;
        for k in 0..t.order() {
            let c = {
                let refs: Vec<&[S]> = xs.iter().map(|v| v.as_slice()).collect();
                t.partial_contraction(k, &refs)?
            };
            let sol = dual_norm_linear(&c, p);
            xs[k] = sol.maximizer;
            current = sol.value;
            history.push(current);
        }
        sweeps += 1;
        let floor = S::Real::min_positive_value();
        if current - before <= tol * current.max(floor) {
            converged = true;
            break;
        }
    }
    let refs: Vec<&[S]> = xs.iter().map(|v| v.as_slice()).collect();
    let value = t.evaluate(&refs)?.modulus();
    Ok(AscentRun {
        value,
        witness: xs,
        history,
        sweeps,
        converged,
    })
}

/// Lower bound on ‖T‖ by alternating maximization from `restarts` random
/// starts on the ℓ_p sphere; upper bound from [`crude_upper`] tightened by
/// [`holder_upper`].
///
/// Restart r uses seed `derive_seed(seed, r)`; the best run wins, ties going
/// to the lowest restart index, so the result does not depend on the
/// thread pool.
pub fn alternating_max<S: Scalar>(
    t: &FormTensor<S>,
    p: S::Real,
    config: &AscentConfig,
    seed: u64,
) -> Result<NormEstimate<S>> {
    if !(p > S::Real::one()) {
        return Err(Error::Domain(format!("alternating maximization needs p > 1, got {p}")));
    }
    if config.restarts == 0 {
        return Err(Error::Domain("need at least one restart".into()));
    }
    let tol = S::Real::lit(config.tol);
    let runs: Vec<AscentRun<S>> = (0..config.restarts)
        .into_par_iter()
        .map(|r| {
            let mut rng = rng_from_seed(derive_seed(seed, r as u64));
            let init = (0..t.order())
                .map(|_| random_unit::<S, _>(t.dim(), p, &mut rng))
                .collect();
            ascent_run(t, p, init, config.max_iters, tol)
        })
        .collect::<Result<_>>()?;
    let best = runs
        .into_iter()
        .reduce(|a, b| if b.value > a.value { b } else { a })
        .expect("at least one restart");
    let bound = crude_upper(t).min(holder_upper(t, p));
    if best.value > bound * (S::Real::one() + S::Real::lit(1e-9)) {
        return Err(Error::Violation {
            check: "norm sandwich".into(),
            lhs: best.value.to_f64_lossy(),
            rhs: bound.to_f64_lossy(),
        });
    }
    let upper = bound.max(best.value);
    Ok(NormEstimate {
        lower: best.value,
        upper,
        method: NormMethod::AlternatingMax,
        restarts: config.restarts,
        converged: best.converged,
        witness: best.witness,
    })
}

/// Exact ‖T‖ on (ℓ_∞ⁿ)^m for real forms.
///
/// The extreme points of the ℓ_∞ ball are sign vectors, so slots 2..m are
/// enumerated and slot 1 is solved in closed form: the norm is
/// max Σ_{j₁} |T(e_{j₁}, ε⁽²⁾, …, ε⁽ᵐ⁾)|.
pub fn exact_linf_enum<S: Scalar>(t: &FormTensor<S>) -> Result<NormEstimate<S>> {
    if S::FIELD != ScalarField::Real {
        return Err(Error::Unsupported(
            "exact l_inf norm needs a real form; the complex extreme points form a torus".into(),
        ));
    }
    let n = t.dim();
    let slots = t.order() - 1;
    let folded = sign_fold(
        t.coeffs(),
        n,
        slots,
        || (S::Real::neg_infinity(), Vec::<u32>::new()),
        |best: &mut (S::Real, Vec<u32>), leaf: &[S], masks: &[u32]| {
            let v: S::Real = leaf.iter().map(|c| c.modulus()).sum();
            if v > best.0 {
                *best = (v, masks.to_vec());
            }
        },
        |a, b| if b.0 > a.0 { b } else { a },
    )?;
    let (value, masks) = folded.acc;
    let mut witness: Vec<Vec<S>> = vec![vec![S::one(); n]];
    witness.extend(masks.iter().map(|&mask| sign_vector::<S>(mask, n)));
    // Slot 1 follows the signs of the contracted functional.
    let c = {
        let refs: Vec<&[S]> = witness.iter().map(|v| v.as_slice()).collect();
        t.partial_contraction(0, &refs)?
    };
    witness[0] = c.iter().map(|cj| cj.phase().conj()).collect();
    Ok(NormEstimate {
        lower: value,
        upper: value,
        method: NormMethod::ExactSignEnum,
        restarts: 0,
        converged: true,
        witness,
    })
}

/// Smallest certified upper bound available cheaply: Hölder, and for real
/// forms within the enumeration budget the exact ℓ_∞ norm (the ℓ_p ball sits
/// inside the ℓ_∞ ball).
pub fn certified_upper<S: Scalar>(t: &FormTensor<S>, p: S::Real) -> S::Real {
    let mut upper = crude_upper(t).min(holder_upper(t, p));
    if S::FIELD == ScalarField::Real {
        if let Ok(exact) = exact_linf_enum(t) {
            upper = upper.min(exact.upper);
        }
    }
    upper
}

/// Norm bracket for T on ℓ_pⁿ: exact enumeration for real forms at p = ∞
/// when affordable, otherwise alternating maximization with the upper bound
/// tightened by [`certified_upper`].
pub fn estimate_norm<S: Scalar>(
    t: &FormTensor<S>,
    p: S::Real,
    config: &AscentConfig,
    seed: u64,
) -> Result<NormEstimate<S>> {
    if p.is_infinite() && S::FIELD == ScalarField::Real {
        match exact_linf_enum(t) {
            Ok(est) => return Ok(est),
            Err(Error::BudgetExceeded { .. }) => {}
            Err(e) => return Err(e),
        }
    }
    if t.order() == 1 {
        let sol = dual_norm_linear(t.coeffs(), p);
        return Ok(NormEstimate {
            lower: sol.value,
            upper: sol.value,
            method: NormMethod::DualClosedForm,
            restarts: 0,
            converged: true,
            witness: vec![sol.maximizer],
        });
    }
    let mut est = alternating_max(t, p, config, seed)?;
    est.upper = est.upper.min(certified_upper(t, p)).max(est.lower);
    Ok(est)
}
