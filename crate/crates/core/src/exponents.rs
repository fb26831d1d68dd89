//! Exponents, admissibility windows and constants of the mixed-norm
//! Hardy–Littlewood family indexed by λ₀ ∈ [1, 2].
//!
//! `p = ∞` is represented by `R::infinity()` and every formula below is
//! arranged so that 1/p = 0 falls out of IEEE arithmetic.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{Real, ScalarField};
use crate::serde_ext::{extended, extended_vec};
use crate::special::khinchin_a;

/// Relative slack used when comparing p against the closed upper end of the
/// admissible window.
const BOUNDARY_RTOL: f64 = 1e-12;

fn check_m(m: usize) -> Result<()> {
    if m < 2 {
        return Err(Error::Domain(format!("m must be at least 2, got {m}")));
    }
    Ok(())
}

fn check_lambda0<R: Real>(lambda0: R) -> Result<()> {
    if !(lambda0 >= R::one() && lambda0 <= R::lit(2.0)) {
        return Err(Error::Domain(format!("lambda0 must lie in [1, 2], got {lambda0}")));
    }
    Ok(())
}

/// The half-open window λ₀m < p ≤ 2λ₀(m−1)/(2−λ₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct Region<R> {
    #[serde(with = "extended")]
    pub lower: R,
    /// `+∞` when λ₀ = 2.
    #[serde(with = "extended")]
    pub upper: R,
    pub empty: bool,
    /// Set for λ₀ = 2, where the closed form divides by zero and the window
    /// is taken as its limit (2m, ∞].
    pub extrapolated: bool,
}

impl<R: Real> Region<R> {
    /// Whether `p` lies in (lower, upper].
    pub fn contains(&self, p: R) -> bool {
        if self.empty || !(p > self.lower) {
            return false;
        }
        if self.upper.is_infinite() {
            return true;
        }
        p <= self.upper * (R::one() + R::lit(BOUNDARY_RTOL))
    }
}

/// Admissible window of p for given (m, λ₀).
pub fn region<R: Real>(m: usize, lambda0: R) -> Result<Region<R>> {
    check_m(m)?;
    check_lambda0(lambda0)?;
    let two = R::lit(2.0);
    let mf = R::from_usize_lossy(m);
    let lower = lambda0 * mf;
    let extrapolated = lambda0 == two;
    let upper = if extrapolated {
        R::infinity()
    } else {
        two * lambda0 * (mf - R::one()) / (two - lambda0)
    };
    Ok(Region {
        lower,
        upper,
        empty: lower >= upper,
        extrapolated,
    })
}

/// Everything the λ₀-family attaches to a triple (m, p, λ₀).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct ExponentSet<R> {
    pub m: usize,
    #[serde(with = "extended")]
    pub p: R,
    #[serde(with = "extended")]
    pub lambda0: R,
    pub field: ScalarField,
    /// Inner exponent s = λ₀p/(p − λ₀m + λ₀).
    #[serde(with = "extended")]
    pub s: R,
    /// Outer exponent η₁ = λ₀p/(p − λ₀m).
    #[serde(with = "extended")]
    pub eta1: R,
    /// A_{λ₀}^{−2(m−1)/s}.
    #[serde(with = "extended")]
    pub constant: R,
    pub admissible: bool,
    pub extrapolated: bool,
}

/// s = [1/λ₀ − (m−1)/p]^{−1}, the inner exponent on its own.
///
/// Defined whenever p ≠ λ₀(m−1); this is also the transfer exponent η₂ of
/// the all-ℓ_∞ reduction.
pub fn inner_exponent<R: Real>(m: usize, p: R, lambda0: R) -> Result<R> {
    check_m(m)?;
    let mf = R::from_usize_lossy(m);
    if p.is_infinite() {
        return Ok(lambda0);
    }
    let den = p - lambda0 * mf + lambda0;
    if den.abs() <= R::epsilon() * R::lit(8.0) * p.abs().max(R::one()) {
        return Err(Error::Singular(format!(
            "s is undefined at p = lambda0 (m - 1) = {}",
            lambda0 * (mf - R::one())
        )));
    }
    Ok(lambda0 * p / den)
}

/// Computes s, η₁, the constant and admissibility.
///
/// Inadmissible triples still get s and η₁ as long as their denominators
/// are nonzero; `admissible` is false and the constant is evaluated with
/// whatever s came out, which is only meaningful when s > 0.
pub fn exponents<R: Real>(m: usize, p: R, lambda0: R, field: ScalarField) -> Result<ExponentSet<R>> {
    check_m(m)?;
    check_lambda0(lambda0)?;
    if !(p > R::zero()) {
        return Err(Error::Domain(format!("p must be positive, got {p}")));
    }
    let mf = R::from_usize_lossy(m);
    let s = inner_exponent(m, p, lambda0)?;
    let eta1 = if p.is_infinite() {
        lambda0
    } else {
        let den = p - lambda0 * mf;
        if den.abs() <= R::epsilon() * R::lit(8.0) * p.abs().max(R::one()) {
            return Err(Error::Singular(format!(
                "eta1 is undefined at p = lambda0 m = {}",
                lambda0 * mf
            )));
        }
        lambda0 * p / den
    };
    let a = khinchin_a(lambda0, field)?.value;
    let constant = a.powf(-R::lit(2.0) * (mf - R::one()) / s);
    let reg = region(m, lambda0)?;
    Ok(ExponentSet {
        m,
        p,
        lambda0,
        field,
        s,
        eta1,
        constant,
        admissible: reg.contains(p),
        extrapolated: reg.extrapolated,
    })
}

/// Names the admissibility condition an (m, p, λ₀) triple fails, or `None` when
/// it is admissible.
pub fn admissibility_failure<R: Real>(m: usize, p: R, lambda0: R) -> Result<Option<String>> {
    let reg = region(m, lambda0)?;
    if reg.empty {
        return Ok(Some(format!(
            "empty window: lambda0*m = {} does not exceed 2",
            reg.lower
        )));
    }
    if !(p > reg.lower) {
        return Ok(Some(format!("need p > lambda0*m = {}, got p = {p}", reg.lower)));
    }
    if !reg.contains(p) {
        return Ok(Some(format!(
            "need p <= 2*lambda0*(m-1)/(2-lambda0) = {}, got p = {p} (equivalently s >= 2)",
            reg.upper
        )));
    }
    Ok(None)
}

/// Input of an exponent transfer: ℓ_{p_k} spaces embedded in larger
/// ℓ_{q_k} spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct TransferProblem<R> {
    #[serde(with = "extended_vec")]
    pub p_list: Vec<R>,
    #[serde(with = "extended_vec")]
    pub q_list: Vec<R>,
    #[serde(with = "extended")]
    pub lambda0: R,
    #[serde(with = "extended")]
    pub s: R,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "R: Real")]
pub struct TransferResult<R> {
    #[serde(with = "extended")]
    pub eta1: R,
    #[serde(with = "extended")]
    pub eta2: R,
    /// Σ_{j=1..m} (1/p_j − 1/q_j).
    #[serde(with = "extended")]
    pub deficiency: R,
}

impl<R: Real> TransferProblem<R> {
    /// All p_j = p and q_j = ∞: the reduction from ℓ_∞ to ℓ_p.
    pub fn uniform_from_infinity(m: usize, p: R, lambda0: R, s: R) -> Self {
        TransferProblem {
            p_list: vec![p; m],
            q_list: vec![R::infinity(); m],
            lambda0,
            s,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.p_list.len() != self.q_list.len() {
            return Err(Error::DimensionMismatch {
                expected: self.p_list.len(),
                got: self.q_list.len(),
            });
        }
        if self.p_list.is_empty() {
            return Err(Error::Domain("transfer needs at least one exponent pair".into()));
        }
        for (k, (&p, &q)) in self.p_list.iter().zip(&self.q_list).enumerate() {
            if !(p >= R::one() && p < q) {
                return Err(Error::Domain(format!(
                    "need 1 <= p_k < q_k <= inf, got p_{} = {p}, q_{} = {q}",
                    k + 1,
                    k + 1
                )));
            }
        }
        if !(self.lambda0 >= R::one()) || !(self.s >= R::one()) {
            return Err(Error::Domain(format!(
                "need lambda0, s >= 1, got lambda0 = {}, s = {}",
                self.lambda0, self.s
            )));
        }
        Ok(())
    }
}

/// Exponent transfer: checks both hypotheses and returns η₁ together with
/// the diagnostic η₂.
pub fn transfer<R: Real>(tp: &TransferProblem<R>) -> Result<TransferResult<R>> {
    tp.validate()?;
    let gaps: Vec<R> = tp
        .p_list
        .iter()
        .zip(&tp.q_list)
        .map(|(&p, &q)| p.recip() - q.recip())
        .collect();
    let m = gaps.len();
    let partial: R = gaps[..m - 1].iter().copied().sum();
    let deficiency = partial + gaps[m - 1];
    let inv = tp.lambda0.recip();
    if !(deficiency < inv) {
        return Err(Error::Hypothesis(format!(
            "first condition fails: sum of (1/p_j - 1/q_j) = {deficiency} is not below 1/lambda0 = {inv}"
        )));
    }
    let eta2 = (inv - partial).recip();
    if !(tp.s >= eta2 * (R::one() - R::lit(BOUNDARY_RTOL))) {
        return Err(Error::Hypothesis(format!(
            "second condition fails: s = {} is below eta2 = {eta2}",
            tp.s
        )));
    }
    Ok(TransferResult {
        eta1: (inv - deficiency).recip(),
        eta2,
        deficiency,
    })
}

/// Exponents of the classical Hardy–Littlewood inequalities on ℓ_p.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassicalExponents<R> {
    /// 2mp/(mp + p − 2m), valid for 2m ≤ p ≤ ∞ (2m/(m+1) at p = ∞).
    pub hl_high: Option<R>,
    /// p/(p − m), valid for m < p ≤ 2m.
    pub hl_low: Option<R>,
}

pub fn classical_exponents<R: Real>(m: usize, p: R) -> Result<ClassicalExponents<R>> {
    check_m(m)?;
    let mf = R::from_usize_lossy(m);
    if !(p > mf) {
        return Err(Error::Domain(format!("classical exponents need p > m = {m}, got {p}")));
    }
    let two = R::lit(2.0);
    let hl_high = if p.is_infinite() {
        Some(two * mf / (mf + R::one()))
    } else if p >= two * mf {
        Some(two * mf * p / (mf * p + p - two * mf))
    } else {
        None
    };
    let hl_low = (p <= two * mf).then(|| p / (p - mf));
    Ok(ClassicalExponents { hl_high, hl_low })
}
