//! Rademacher and Steinhaus chaos moments, and numerical checks of the
//! inequalities built on them: Khinchin, the contraction bound for chaos
//! coefficients, the multiple Khinchin step, and the full ℓ_∞ chain that
//! bounds the λ₀-mixed norm by A_{λ₀}^{−2(m−1)/s}‖S‖.
//!
//! Rademacher averages are exact: they are uniform means over sign patterns
//! (see [`crate::signs`]). Steinhaus averages are Monte Carlo only.

use num_traits::{Float, One, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norm::{certified_upper, exact_linf_enum};
use crate::scalar::{lp_norm, Real, Scalar, ScalarField};
use crate::seed::{derive_seed, rng_from_seed};
use crate::signs::{check_budget, sign_fold};
use crate::special::khinchin_a;
use crate::tensor::FormTensor;

/// Absolute slack allowed on inequalities, scaled by max(1, |rhs|).
pub const INEQUALITY_SLACK: f64 = 1e-12;
/// Relative tolerance on equalities.
pub const EQUALITY_RTOL: f64 = 1e-10;
/// Default Monte Carlo sample count.
pub const DEFAULT_MC_SAMPLES: usize = 100_000;

/// Fixed number of Monte Carlo streams; each gets `derive_seed(seed, k)`.
const MC_STREAMS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum MomentMode {
    ExactEnum,
    MonteCarlo { samples: usize, seed: u64 },
}

/// Random variables the chaos is built from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variables {
    /// Independent ±1.
    Rademacher,
    /// Independent uniform on the unit circle.
    Steinhaus,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            samples: DEFAULT_MC_SAMPLES,
            seed: 0,
        }
    }
}

/// (E|X|^q)^{1/q} for the chaos X = Σ_J a_J ξ⁽¹⁾_{j₁} ⋯ ξ⁽ᵏ⁾_{j_k}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChaosMoment {
    /// Number of independent random vectors k.
    pub order: usize,
    pub q: f64,
    pub value: f64,
    /// E|X|^q before the 1/q root.
    pub mean_power: f64,
    /// Standard error of `mean_power` (0 when exact).
    pub std_error: f64,
    pub variables: Variables,
    pub mode: MomentMode,
}

impl ChaosMoment {
    /// Standard error of `value` by the delta method.
    pub fn value_std_error(&self) -> f64 {
        if self.std_error == 0.0 || self.mean_power == 0.0 {
            return 0.0;
        }
        self.value / (self.q * self.mean_power) * self.std_error
    }
}

fn check_q<R: Real>(q: R) -> Result<()> {
    if !(q >= R::one()) || !q.is_finite() {
        return Err(Error::Domain(format!(
            "moment exponent q must be finite and >= 1, got {q}"
        )));
    }
    Ok(())
}

/// Exact Rademacher moment of a chaos given by a flat coefficient array of
/// `n^order` entries.
fn exact_moment<S: Scalar>(data: &[S], n: usize, order: usize, q: S::Real) -> Result<S::Real> {
    let folded = sign_fold(
        data,
        n,
        order,
        S::Real::zero,
        |acc: &mut S::Real, leaf: &[S], _| *acc += leaf[0].modulus().powf(q),
        |a, b| a + b,
    )?;
    Ok(folded.acc / <S::Real as num_traits::FromPrimitive>::from_u64(folded.patterns).expect("pattern count"))
}

/// Monte Carlo estimate of E|X|^q and its standard error.
fn mc_moment<S: Scalar>(
    t: &FormTensor<S>,
    q: S::Real,
    variables: Variables,
    cfg: &MonteCarloConfig,
) -> Result<(f64, f64)> {
    if cfg.samples < 2 {
        return Err(Error::Domain("Monte Carlo needs at least two samples".into()));
    }
    if variables == Variables::Steinhaus && S::FIELD != ScalarField::Complex {
        return Err(Error::Unsupported(
            "Steinhaus variables need a complex coefficient type".into(),
        ));
    }
    let n = t.dim();
    let k = t.order();
    let per = cfg.samples.div_ceil(MC_STREAMS);
    let parts: Vec<(f64, f64, usize)> = (0..MC_STREAMS)
        .into_par_iter()
        .map(|stream| {
            let count = per.min(cfg.samples.saturating_sub(stream * per));
            let mut rng = rng_from_seed(derive_seed(cfg.seed, stream as u64));
            let mut xs: Vec<Vec<S>> = vec![vec![S::zero(); n]; k];
            let (mut sum, mut sum_sq) = (0.0f64, 0.0f64);
            for _ in 0..count {
                for v in xs.iter_mut() {
                    for x in v.iter_mut() {
                        *x = match variables {
                            Variables::Rademacher => {
                                if rng.random::<bool>() {
                                    S::one()
                                } else {
                                    -S::one()
                                }
                            }
                            Variables::Steinhaus => S::sample_unimodular(&mut rng),
                        };
                    }
                }
                let refs: Vec<&[S]> = xs.iter().map(|v| v.as_slice()).collect();
                let y = t
                    .evaluate(&refs)
                    .expect("dimensions match")
                    .modulus()
                    .powf(q)
                    .to_f64_lossy();
                sum += y;
                sum_sq += y * y;
            }
            (sum, sum_sq, count)
        })
        .collect();
    let (sum, sum_sq, count) = parts
        .into_iter()
        .fold((0.0, 0.0, 0usize), |a, b| (a.0 + b.0, a.1 + b.1, a.2 + b.2));
    let nf = count as f64;
    let mean = sum / nf;
    let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
    Ok((mean, (var / nf).sqrt()))
}

/// (E|X|^q)^{1/q} for the chaos with coefficient tensor `a` of order k.
///
/// `ExactEnum` averages over all 2^{n·k} Rademacher patterns and needs
/// n·k ≤ 24. `MonteCarlo` samples the requested variables.
pub fn chaos_moment<S: Scalar>(
    a: &FormTensor<S>,
    q: S::Real,
    variables: Variables,
    mode: MomentMode,
) -> Result<ChaosMoment> {
    check_q(q)?;
    let (mean_power, std_error) = match mode {
        MomentMode::ExactEnum => {
            if variables != Variables::Rademacher {
                return Err(Error::Unsupported(
                    "Steinhaus moments have no finite enumeration; use Monte Carlo".into(),
                ));
            }
            check_budget(a.dim(), a.order(), "chaos moment patterns")?;
            let v = exact_moment(a.coeffs(), a.dim(), a.order(), q)?;
            (v.to_f64_lossy(), 0.0)
        }
        MomentMode::MonteCarlo { samples, seed } => mc_moment(a, q, variables, &MonteCarloConfig { samples, seed })?,
    };
    let qf = q.to_f64_lossy();
    Ok(ChaosMoment {
        order: a.order(),
        q: qf,
        value: mean_power.powf(qf.recip()),
        mean_power,
        std_error,
        variables,
        mode,
    })
}

/// (E|Σ_j a_j ε_j|^q)^{1/q} with Rademacher ε.
pub fn rademacher_moment<S: Scalar>(a: &[S], q: S::Real, mode: MomentMode) -> Result<ChaosMoment> {
    let t = FormTensor::new(1, a.len(), a.to_vec())?;
    chaos_moment(&t, q, Variables::Rademacher, mode)
}

/// (E|Σ_j a_j z_j|^q)^{1/q} with Steinhaus z, by Monte Carlo.
pub fn steinhaus_moment<S: Scalar>(a: &[S], q: S::Real, cfg: &MonteCarloConfig) -> Result<ChaosMoment> {
    let t = FormTensor::new(1, a.len(), a.to_vec())?;
    chaos_moment(
        &t,
        q,
        Variables::Steinhaus,
        MomentMode::MonteCarlo {
            samples: cfg.samples,
            seed: cfg.seed,
        },
    )
}

fn slack_ok(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + INEQUALITY_SLACK * rhs.abs().max(1.0)
}

/// Outcome of a Khinchin lower-bound check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KhinchinReport {
    pub q: f64,
    pub field: ScalarField,
    pub a_q: f64,
    /// (Σ|a_j|²)^{1/2}.
    pub l2: f64,
    /// A_q·(Σ|a_j|²)^{1/2}.
    pub lhs: f64,
    /// The q-th moment.
    pub mid: f64,
    /// mid/lhs; 1 when both vanish.
    pub ratio: f64,
    /// Three standard errors of `mid` (0 when exact).
    pub noise: f64,
    pub pass: bool,
    pub mode: MomentMode,
}

/// Checks A_q(Σ|a_j|²)^{1/2} ≤ (E|Σ a_j ξ_j|^q)^{1/q}.
///
/// Real coefficients use exact Rademacher enumeration and a failure is
/// returned as [`Error::Violation`]. Complex coefficients use Steinhaus
/// variables by Monte Carlo with `mc`; the report carries a 3σ band and is
/// never turned into an error.
pub fn check_khinchin<S: Scalar>(a: &[S], q: S::Real, mc: &MonteCarloConfig) -> Result<KhinchinReport> {
    let field = S::FIELD;
    let a_q = khinchin_a(q, field)?.value.to_f64_lossy();
    let l2 = lp_norm(a, S::Real::lit(2.0)).to_f64_lossy();
    let moment = match field {
        ScalarField::Real => rademacher_moment(a, q, MomentMode::ExactEnum)?,
        ScalarField::Complex => steinhaus_moment(a, q, mc)?,
    };
    let lhs = a_q * l2;
    let mid = moment.value;
    let noise = 3.0 * moment.value_std_error();
    let ratio = if lhs == 0.0 && mid == 0.0 { 1.0 } else { mid / lhs };
    let pass = slack_ok(lhs, mid + noise);
    let report = KhinchinReport {
        q: q.to_f64_lossy(),
        field,
        a_q,
        l2,
        lhs,
        mid,
        ratio,
        noise,
        pass,
        mode: moment.mode,
    };
    if !pass && field == ScalarField::Real {
        return Err(Error::Violation {
            check: format!("khinchin (q = {})", report.q),
            lhs,
            rhs: mid,
        });
    }
    Ok(report)
}

/// Outcome of the coefficient-contraction check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionReport {
    pub order: usize,
    pub n: usize,
    pub t: f64,
    /// max_J |a_J|.
    pub max_coeff: f64,
    /// (E|Σ_J ε⁽¹⁾_{i₁} ⋯ ε⁽ᵐ⁾_{i_m} a_J|^t)^{1/t}.
    pub moment: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Checks max_J |a_J| ≤ ‖Σ_J r_{i₁}(t₁) ⋯ r_{i_m}(t_m) a_J‖_{L_t} by exact
/// enumeration.
pub fn check_contraction<S: Scalar>(a: &FormTensor<S>, t: S::Real) -> Result<ContractionReport> {
    let moment = chaos_moment(a, t, Variables::Rademacher, MomentMode::ExactEnum)?;
    let max_coeff = a.max_modulus().to_f64_lossy();
    let pass = slack_ok(max_coeff, moment.value);
    let ratio = if max_coeff == 0.0 {
        1.0
    } else {
        moment.value / max_coeff
    };
    if !pass {
        return Err(Error::Violation {
            check: "contraction".into(),
            lhs: max_coeff,
            rhs: moment.value,
        });
    }
    Ok(ContractionReport {
        order: a.order(),
        n: a.dim(),
        t: moment.q,
        max_coeff,
        moment: moment.value,
        ratio,
        pass,
    })
}

/// Outcome of the multiple Khinchin check on one row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MultipleKhinchinReport {
    pub row: usize,
    pub lambda0: f64,
    /// (Σ_{ĵ₁} |S(e_{j₁}, …)|²)^{1/2}.
    pub l2: f64,
    /// R_n: the λ₀-th moment of the (m−1)-fold Rademacher chaos of the row.
    pub r_n: f64,
    /// A_{λ₀}^{−(m−1)}·R_n.
    pub rhs: f64,
    pub pass: bool,
}

fn real_only<S: Scalar>(what: &str) -> Result<()> {
    if S::FIELD != ScalarField::Real {
        return Err(Error::Unsupported(format!("{what} is implemented for real forms")));
    }
    Ok(())
}

fn check_lambda0<R: Real>(lambda0: R) -> Result<()> {
    if !(lambda0 >= R::one() && lambda0 <= R::lit(2.0)) {
        return Err(Error::Domain(format!("lambda0 must lie in [1, 2], got {lambda0}")));
    }
    Ok(())
}

/// Checks (Σ_{ĵ₁}|S(e_{j₁}, …)|²)^{1/2} ≤ A_{λ₀}^{−(m−1)} R_n for the row
/// j₁ = `row` (0-based) of a real form of order m ≥ 2.
pub fn check_multiple_khinchin<S: Scalar>(
    t: &FormTensor<S>,
    row: usize,
    lambda0: S::Real,
) -> Result<MultipleKhinchinReport> {
    real_only::<S>("the multiple Khinchin check")?;
    check_lambda0(lambda0)?;
    let (m, n) = (t.order(), t.dim());
    if m < 2 {
        return Err(Error::Domain("the multiple Khinchin check needs m >= 2".into()));
    }
    if row >= n {
        return Err(Error::Domain(format!("row {row} out of range for n = {n}")));
    }
    check_budget(n, m - 1, "multiple Khinchin patterns")?;
    let width = t.coeffs().len() / n;
    let slice = &t.coeffs()[row * width..(row + 1) * width];
    let sub = FormTensor::new(m - 1, n, slice.to_vec())?;
    let r_n = chaos_moment(&sub, lambda0, Variables::Rademacher, MomentMode::ExactEnum)?.value;
    let a = khinchin_a(lambda0, ScalarField::Real)?.value.to_f64_lossy();
    let l2 = lp_norm(slice, S::Real::lit(2.0)).to_f64_lossy();
    let rhs = a.powi(-(m as i32 - 1)) * r_n;
    let pass = slack_ok(l2, rhs);
    if !pass {
        return Err(Error::Violation {
            check: format!("multiple khinchin (row {row})"),
            lhs: l2,
            rhs,
        });
    }
    Ok(MultipleKhinchinReport {
        row,
        lambda0: lambda0.to_f64_lossy(),
        l2,
        r_n,
        rhs,
        pass,
    })
}

/// ‖v‖_s ≤ ‖v‖₂^θ ‖v‖_∞^{1−θ} with θ = 2/s, s ≥ 2. Returns both sides.
pub fn holder_interpolation<S: Scalar>(v: &[S], s: S::Real) -> (S::Real, S::Real) {
    let theta = S::Real::lit(2.0) / s;
    let lhs = lp_norm(v, s);
    let rhs = lp_norm(v, S::Real::lit(2.0)).powf(theta) * lp_norm(v, S::Real::infinity()).powf(S::Real::one() - theta);
    (lhs, rhs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinkKind {
    Inequality,
    Equality,
}

/// One step lhs ≤ rhs (or lhs = rhs) of the chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainLink {
    pub name: String,
    pub kind: LinkKind,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs.
    pub slack: f64,
    /// Allowance for Monte Carlo noise (0 when exact).
    pub noise: f64,
    pub pass: bool,
}

impl ChainLink {
    fn inequality(name: &str, lhs: f64, rhs: f64, noise: f64) -> Self {
        ChainLink {
            name: name.into(),
            kind: LinkKind::Inequality,
            lhs,
            rhs,
            slack: rhs - lhs,
            noise,
            pass: slack_ok(lhs, rhs + noise),
        }
    }

    fn equality(name: &str, lhs: f64, rhs: f64) -> Self {
        let scale = lhs.abs().max(rhs.abs()).max(f64::MIN_POSITIVE);
        ChainLink {
            name: name.into(),
            kind: LinkKind::Equality,
            lhs,
            rhs,
            slack: rhs - lhs,
            noise: 0.0,
            pass: (lhs - rhs).abs() <= EQUALITY_RTOL * scale,
        }
    }
}

/// Every intermediate quantity of the chain, with K = A_{λ₀}^{−2(m−1)/s}.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainQuantities {
    /// (Σ_j (Σ_{ĵ} |S|^s)^{λ₀/s})^{1/λ₀}.
    pub mixed: f64,
    /// (Σ_j ((Σ_{ĵ}|S|²)^{1/2})^θ (max_{ĵ}|S|)^{1−θ})^{λ₀})^{1/λ₀}.
    pub interpolated: f64,
    /// (Σ_j ((A^{−(m−1)}R_j)^θ R_j^{1−θ})^{λ₀})^{1/λ₀}.
    pub khinchin: f64,
    /// K (E Σ_j |S(e_j, ξ⁽²⁾, …, ξ⁽ᵐ⁾)|^{λ₀})^{1/λ₀}.
    pub averaged: f64,
    /// K (sup Σ_j |S(e_j, ξ⁽²⁾, …, ξ⁽ᵐ⁾)|^{λ₀})^{1/λ₀}.
    pub supremum: f64,
    /// K ‖S‖ (an upper bound on it for complex forms).
    pub norm_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainReport {
    pub m: usize,
    pub n: usize,
    pub field: ScalarField,
    pub lambda0: f64,
    pub s: f64,
    /// 0-based slot taken outermost.
    pub fixed_index: usize,
    pub khinchin_constant: f64,
    /// A_{λ₀}^{−2(m−1)/s}.
    pub constant: f64,
    /// ‖S‖ on (ℓ_∞ⁿ)^m; a certified upper bound for complex forms.
    pub norm: f64,
    pub variables: Variables,
    pub mode: MomentMode,
    pub quantities: ChainQuantities,
    /// Hölder, multiple Khinchin, Fubini, supremum/norm, in order.
    pub links: Vec<ChainLink>,
    /// The per-index mixed-norm bound: mixed ≤ K‖S‖.
    pub bound: ChainLink,
    pub first_failure: Option<String>,
}

impl ChainReport {
    pub fn pass(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Chain failure carrying the full report.
#[derive(Debug, Clone, PartialEq)]
pub struct BrokenChain {
    pub link: String,
    pub report: Box<ChainReport>,
}

/// Per-row sums gathered over the random vectors of slots 2..m.
struct RowStats {
    /// Σ over patterns/samples of |c_j|^{λ₀}, per row j.
    per_row: Vec<f64>,
    /// Σ over patterns/samples of Σ_j |c_j|^{λ₀}, accumulated separately.
    total: f64,
    total_sq: f64,
    sup: f64,
    count: f64,
}

impl RowStats {
    fn new(n: usize) -> Self {
        RowStats {
            per_row: vec![0.0; n],
            total: 0.0,
            total_sq: 0.0,
            sup: 0.0,
            count: 0.0,
        }
    }

    fn add<S: Scalar>(&mut self, leaf: &[S], lambda0: S::Real) {
        let mut y = 0.0;
        for (acc, c) in self.per_row.iter_mut().zip(leaf) {
            let v = c.modulus().powf(lambda0).to_f64_lossy();
            *acc += v;
            y += v;
        }
        self.total += y;
        self.total_sq += y * y;
        self.sup = self.sup.max(y);
        self.count += 1.0;
    }

    fn merge(mut self, other: RowStats) -> RowStats {
        for (a, b) in self.per_row.iter_mut().zip(other.per_row) {
            *a += b;
        }
        self.total += other.total;
        self.total_sq += other.total_sq;
        self.sup = self.sup.max(other.sup);
        self.count += other.count;
        self
    }
}

/// Evaluates and checks every link of the chain for a form S on (ℓ_∞ⁿ)^m
/// with slot `fixed_index` (0-based) outermost.
///
/// Real forms are handled exactly: R_j row by row through
/// [`chaos_moment`], the averaged side by one enumeration of the whole
/// form, and ‖S‖ by [`exact_linf_enum`]. A failing link is returned as
/// [`Error::Violation`] naming the link; use [`verify_proof_chain_report`]
/// to get the report either way.
///
/// Complex forms use Steinhaus variables with `mc`; the Khinchin and
/// Fubini links then carry a 3σ noise band and ‖S‖ is replaced by its
/// certified upper bound. Monte Carlo reports are never turned into errors.
pub fn verify_proof_chain<S: Scalar>(
    form: &FormTensor<S>,
    lambda0: S::Real,
    s: S::Real,
    fixed_index: usize,
    mc: &MonteCarloConfig,
) -> Result<ChainReport> {
    match verify_proof_chain_report(form, lambda0, s, fixed_index, mc)? {
        Ok(report) => Ok(report),
        Err(broken) => {
            let link = broken
                .report
                .links
                .iter()
                .chain(std::iter::once(&broken.report.bound))
                .find(|l| l.name == broken.link)
                .expect("failing link is in the report");
            Err(Error::Violation {
                check: format!("proof chain link `{}`", broken.link),
                lhs: link.lhs,
                rhs: link.rhs,
            })
        }
    }
}

/// Like [`verify_proof_chain`] but hands back the report on failure too.
pub fn verify_proof_chain_report<S: Scalar>(
    form: &FormTensor<S>,
    lambda0: S::Real,
    s: S::Real,
    fixed_index: usize,
    mc: &MonteCarloConfig,
) -> Result<std::result::Result<ChainReport, BrokenChain>> {
    check_lambda0(lambda0)?;
    let (m, n) = (form.order(), form.dim());
    if m < 2 {
        return Err(Error::Domain("the chain needs m >= 2".into()));
    }
    if fixed_index >= m {
        return Err(Error::Domain(format!(
            "fixed index {fixed_index} out of range for m = {m}"
        )));
    }
    if !(s >= S::Real::lit(2.0)) || !s.is_finite() {
        return Err(Error::Domain(format!(
            "the interpolation step needs a finite s >= 2, got {s}"
        )));
    }
    let field = S::FIELD;
    let exact = field == ScalarField::Real;
    if exact {
        check_budget(n, m - 1, "proof chain patterns")?;
    }

    let lam = lambda0.to_f64_lossy();
    let sf = s.to_f64_lossy();
    let theta = 2.0 / sf;
    let a = khinchin_a(lambda0, field)?.value.to_f64_lossy();
    let k_pow = (m - 1) as i32;
    let constant = a.powf(-2.0 * (m as f64 - 1.0) / sf);

    let front = form.swap_axes(0, fixed_index);
    let width = front.coeffs().len() / n;
    let rows: Vec<&[S]> = front.coeffs().chunks_exact(width).collect();

    // Left end and the interpolated row norms.
    let mixed = front.mixed_norm_unchecked(0, s, lambda0).to_f64_lossy();
    let row_l2: Vec<f64> = rows
        .iter()
        .map(|r| lp_norm(r, S::Real::lit(2.0)).to_f64_lossy())
        .collect();
    let row_max: Vec<f64> = rows
        .iter()
        .map(|r| lp_norm(r, S::Real::infinity()).to_f64_lossy())
        .collect();
    let lambda_sum =
        |terms: &mut dyn Iterator<Item = f64>| -> f64 { terms.map(|v| v.powf(lam)).sum::<f64>().powf(lam.recip()) };
    let interpolated = lambda_sum(
        &mut row_l2
            .iter()
            .zip(&row_max)
            .map(|(&l2, &mx)| l2.powf(theta) * mx.powf(1.0 - theta)),
    );

    // R_j per row, and the averaged/supremum sides over the whole form.
    let (r_rows, stats, variables, mode) = if exact {
        let r_rows = rows
            .iter()
            .map(|r| {
                let sub = FormTensor::new(m - 1, n, r.to_vec())?;
                Ok(chaos_moment(&sub, lambda0, Variables::Rademacher, MomentMode::ExactEnum)?.value)
            })
            .collect::<Result<Vec<f64>>>()?;
        let folded = sign_fold(
            front.coeffs(),
            n,
            m - 1,
            || RowStats::new(n),
            |acc: &mut RowStats, leaf: &[S], _| acc.add(leaf, lambda0),
            RowStats::merge,
        )?;
        (r_rows, folded.acc, Variables::Rademacher, MomentMode::ExactEnum)
    } else {
        let stats = steinhaus_row_stats(&front, lambda0, mc)?;
        let r_rows = stats
            .per_row
            .iter()
            .map(|&v| (v / stats.count).powf(lam.recip()))
            .collect();
        (
            r_rows,
            stats,
            Variables::Steinhaus,
            MomentMode::MonteCarlo {
                samples: mc.samples,
                seed: mc.seed,
            },
        )
    };

    let khinchin = lambda_sum(
        &mut r_rows
            .iter()
            .map(|&r| (a.powi(-k_pow) * r).powf(theta) * r.powf(1.0 - theta)),
    );
    let mean_total = stats.total / stats.count;
    let averaged = constant * mean_total.powf(lam.recip());
    let supremum = constant * stats.sup.powf(lam.recip());
    let norm = if exact {
        exact_linf_enum(form)?.upper.to_f64_lossy()
    } else {
        certified_upper(form, S::Real::infinity()).to_f64_lossy()
    };
    let norm_bound = constant * norm;

    // 3σ band on the averaged quantity, propagated through the 1/λ₀ root.
    let noise = if exact || stats.count < 2.0 {
        0.0
    } else {
        let var = ((stats.total_sq - stats.count * mean_total * mean_total) / (stats.count - 1.0)).max(0.0);
        let se = (var / stats.count).sqrt();
        if mean_total > 0.0 {
            3.0 * constant * mean_total.powf(lam.recip() - 1.0) / lam * se
        } else {
            0.0
        }
    };

    let links = vec![
        ChainLink::inequality("holder", mixed, interpolated, 0.0),
        ChainLink::inequality("multiple_khinchin", interpolated, khinchin, noise),
        ChainLink::equality("fubini", khinchin, averaged),
        {
            let mut link = ChainLink::inequality("supremum_norm", averaged, norm_bound, 0.0);
            link.pass = link.pass && slack_ok(averaged, supremum) && slack_ok(supremum, norm_bound);
            link
        },
    ];
    let bound = ChainLink::inequality("mixed_norm_bound", mixed, norm_bound, 0.0);
    let first_failure = links
        .iter()
        .chain(std::iter::once(&bound))
        .find(|l| !l.pass)
        .map(|l| l.name.clone());

    let report = ChainReport {
        m,
        n,
        field,
        lambda0: lam,
        s: sf,
        fixed_index,
        khinchin_constant: a,
        constant,
        norm,
        variables,
        mode,
        quantities: ChainQuantities {
            mixed,
            interpolated,
            khinchin,
            averaged,
            supremum,
            norm_bound,
        },
        links,
        bound,
        first_failure: first_failure.clone(),
    };
    Ok(match first_failure {
        Some(link) if exact => Err(BrokenChain {
            link,
            report: Box::new(report),
        }),
        _ => Ok(report),
    })
}

fn steinhaus_row_stats<S: Scalar>(front: &FormTensor<S>, lambda0: S::Real, mc: &MonteCarloConfig) -> Result<RowStats> {
    if mc.samples < 2 {
        return Err(Error::Domain("Monte Carlo needs at least two samples".into()));
    }
    let (m, n) = (front.order(), front.dim());
    let per = mc.samples.div_ceil(MC_STREAMS);
    let parts: Vec<RowStats> = (0..MC_STREAMS)
        .into_par_iter()
        .map(|stream| {
            let count = per.min(mc.samples.saturating_sub(stream * per));
            let mut rng = rng_from_seed(derive_seed(mc.seed, stream as u64));
            let mut stats = RowStats::new(n);
            let mut xs: Vec<Vec<S>> = vec![vec![S::one(); n]; m];
            for _ in 0..count {
                for v in xs.iter_mut().skip(1) {
                    for x in v.iter_mut() {
                        *x = S::sample_unimodular(&mut rng);
                    }
                }
                let refs: Vec<&[S]> = xs.iter().map(|v| v.as_slice()).collect();
                let leaf = front.partial_contraction(0, &refs).expect("dimensions match");
                stats.add(&leaf, lambda0);
            }
            stats
        })
        .collect();
    Ok(parts
        .into_iter()
        .reduce(RowStats::merge)
        .unwrap_or_else(|| RowStats::new(n)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::solve_q0;
    use crate::tensor::{generate, TensorKind};
    use num_complex::Complex64;

    fn mc() -> MonteCarloConfig {
        MonteCarloConfig {
            samples: 20_000,
            seed: 5,
        }
    }

    #[test]
    fn moment_examples() {
        let m = rademacher_moment(&[1.0f64, 1.0], 2.0, MomentMode::ExactEnum).unwrap();
        assert!((m.value - 2f64.sqrt()).abs() < 1e-15);
        let m = rademacher_moment(&[1.0f64, 1.0], 1.0, MomentMode::ExactEnum).unwrap();
        assert_eq!(m.value, 1.0);
        for q in [1.0, 1.5, 3.0] {
            let m = rademacher_moment(&[-2.5f64], q, MomentMode::ExactEnum).unwrap();
            assert!((m.value - 2.5).abs() < 1e-15);
        }
        assert!(rademacher_moment(&[1.0f64; 25], 1.0, MomentMode::ExactEnum).is_err());
        assert!(rademacher_moment(&[1.0f64; 2], 0.5, MomentMode::ExactEnum).is_err());
    }

    #[test]
    fn moment_q_monotone() {
        let a = [0.3f64, -1.2, 0.7, 2.0, -0.1];
        let mut prev = 0.0;
        for k in 0..=30 {
            let q = 1.0 + k as f64 * 0.1;
            let v = rademacher_moment(&a, q, MomentMode::ExactEnum).unwrap().value;
            assert!(v >= prev - 1e-14);
            prev = v;
        }
    }

    #[test]
    fn monte_carlo_tracks_exact() {
        let a = [0.5f64, -1.0, 0.25, 2.0];
        let exact = rademacher_moment(&a, 1.3, MomentMode::ExactEnum).unwrap();
        let est = rademacher_moment(
            &a,
            1.3,
            MomentMode::MonteCarlo {
                samples: 50_000,
                seed: 2,
            },
        )
        .unwrap();
        assert!((est.mean_power - exact.mean_power).abs() <= 4.0 * est.std_error);
        let again = rademacher_moment(
            &a,
            1.3,
            MomentMode::MonteCarlo {
                samples: 50_000,
                seed: 2,
            },
        )
        .unwrap();
        assert_eq!(est, again);
    }

    #[test]
    fn steinhaus_second_moment_is_l2() {
        let a = [
            Complex64::new(1.0, 0.5),
            Complex64::new(-0.3, 2.0),
            Complex64::new(0.0, -1.0),
        ];
        let m = steinhaus_moment(&a, 2.0, &mc()).unwrap();
        let l2 = lp_norm(&a, 2.0);
        assert!((m.value - l2).abs() <= 4.0 * m.value_std_error());
        assert!(chaos_moment(
            &FormTensor::new(1, 3, a.to_vec()).unwrap(),
            2.0,
            Variables::Steinhaus,
            MomentMode::ExactEnum
        )
        .is_err());
        assert!(steinhaus_moment(&[1.0f64, 2.0], 2.0, &mc()).is_err());
    }

    #[test]
    fn khinchin_examples() {
        let r = check_khinchin(&[1.0f64, 1.0], 1.0, &mc()).unwrap();
        assert!((r.lhs - 1.0).abs() < 1e-15 && (r.mid - 1.0).abs() < 1e-15);
        assert!((r.ratio - 1.0).abs() < 1e-12);
        for q in [1.0, 1.4, 2.0] {
            let r = check_khinchin(&[1.0f64, 0.0, 0.0, 0.0], q, &mc()).unwrap();
            assert!((r.mid - 1.0).abs() < 1e-15);
            assert!((r.ratio * r.a_q - 1.0).abs() < 1e-12);
        }
        let r = check_khinchin(&[1.0f64, 1.0, 1.0], 2.0, &mc()).unwrap();
        assert!((r.lhs - 3f64.sqrt()).abs() < 1e-12 && (r.mid - 3f64.sqrt()).abs() < 1e-12);
        let r = check_khinchin(&[0.0f64, 0.0], 1.5, &mc()).unwrap();
        assert_eq!(r.ratio, 1.0);
        // Equality pair for every q up to q₀.
        let q0 = solve_q0::<f64>();
        for q in [1.0, 1.2, 1.6, q0] {
            let r = check_khinchin(&[1.0f64, 1.0, 0.0], q, &mc()).unwrap();
            assert!((r.ratio - 1.0).abs() < 1e-9, "q = {q}: {}", r.ratio);
        }
    }

    #[test]
    fn khinchin_complex_uses_steinhaus() {
        let a = [Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0)];
        let r = check_khinchin(&a, 1.0, &mc()).unwrap();
        assert_eq!(r.field, ScalarField::Complex);
        assert!(matches!(r.mode, MomentMode::MonteCarlo { .. }));
        assert!(r.pass && r.noise > 0.0);
    }

    #[test]
    fn contraction_examples() {
        let single = FormTensor::new(2, 3, {
            let mut v = vec![0.0f64; 9];
            v[4] = -1.5;
            v
        })
        .unwrap();
        let r = check_contraction(&single, 1.7).unwrap();
        assert!((r.max_coeff - 1.5).abs() < 1e-15 && (r.moment - 1.5).abs() < 1e-15);
        let v = FormTensor::new(1, 2, vec![1.0f64, 1.0]).unwrap();
        let r = check_contraction(&v, 2.0).unwrap();
        assert_eq!(r.max_coeff, 1.0);
        assert!((r.moment - 2f64.sqrt()).abs() < 1e-15);
        let h = FormTensor::new(2, 2, vec![1.0f64, 1.0, 1.0, -1.0]).unwrap();
        let r = check_contraction(&h, 2.0).unwrap();
        assert!((r.moment - 2.0).abs() < 1e-15);
    }

    #[test]
    fn multiple_khinchin_examples() {
        // m = 2 reduces to the Khinchin check of the row with q = λ₀.
        let t: FormTensor<f64> = generate(TensorKind::Gaussian, 2, 4, 3).unwrap();
        for row in 0..4 {
            let r = check_multiple_khinchin(&t, row, 1.3).unwrap();
            let k = check_khinchin(&t.coeffs()[row * 4..row * 4 + 4], 1.3, &mc()).unwrap();
            assert!((r.r_n - k.mid).abs() < 1e-13);
            assert!((r.rhs * k.a_q - r.r_n).abs() < 1e-12);
        }
        let u: FormTensor<f64> = generate(TensorKind::SparseUnit, 3, 3, 1).unwrap();
        for row in 0..3 {
            let r = check_multiple_khinchin(&u, row, 1.5).unwrap();
            assert!(r.l2 <= r.rhs);
            assert_eq!(r.l2, r.r_n);
        }
        let c: FormTensor<Complex64> = generate(TensorKind::Gaussian, 2, 2, 0).unwrap();
        assert!(matches!(
            check_multiple_khinchin(&c, 0, 1.0),
            Err(Error::Unsupported(_))
        ));
        assert!(check_multiple_khinchin(&t, 4, 1.0).is_err());
    }

    #[test]
    fn holder_step_in_isolation() {
        let v = [0.3f64, 1.7, 0.0, 2.2, 0.9];
        for s in [2.0, 2.5, 4.0, 10.0] {
            let (l, r) = holder_interpolation(&v, s);
            assert!(l <= r + 1e-14);
        }
        let single = [0.0f64, -3.0, 0.0];
        for s in [2.0, 3.3, 8.0] {
            let (l, r) = holder_interpolation(&single, s);
            assert!((l - r).abs() < 1e-14);
        }
    }

    #[test]
    fn chain_sparse_unit_is_tight() {
        let u: FormTensor<f64> = generate(TensorKind::SparseUnit, 3, 2, 4).unwrap();
        let r = verify_proof_chain(&u, 1.0, 2.0, 0, &mc()).unwrap();
        assert!(r.pass());
        assert_eq!(r.norm, 1.0);
        assert!((r.links[0].slack).abs() < 1e-15);
        assert!((r.links[2].slack).abs() < 1e-15);
    }

    #[test]
    fn chain_small_hadamard() {
        let h = FormTensor::new(2, 2, vec![1.0f64, 1.0, 1.0, -1.0]).unwrap();
        let r = verify_proof_chain(&h, 1.0, 2.0, 0, &mc()).unwrap();
        // ‖H‖_∞ = 2, A₁ = 2^{−1/2}, K = A₁^{−1} = √2.
        assert_eq!(r.norm, 2.0);
        assert!((r.constant - 2f64.sqrt()).abs() < 1e-12);
        // Both rows have ℓ₂ norm √2, so every link is an equality.
        assert!((r.quantities.mixed - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!((r.quantities.norm_bound - 2.0 * 2f64.sqrt()).abs() < 1e-12);
        assert!(r.links.iter().all(|l| l.pass));
    }

    #[test]
    fn chain_every_index() {
        for seed in 0..5 {
            let t: FormTensor<f64> = generate(TensorKind::Signs, 3, 2, seed).unwrap();
            for i in 0..3 {
                let r = verify_proof_chain(&t, 1.5, 3.0, i, &mc()).unwrap();
                assert_eq!(r.links.len(), 4);
                assert!(r.pass());
            }
        }
    }

    #[test]
    fn chain_rejects_bad_parameters() {
        let t: FormTensor<f64> = generate(TensorKind::Signs, 3, 2, 0).unwrap();
        assert!(verify_proof_chain(&t, 1.0, 1.5, 0, &mc()).is_err());
        assert!(verify_proof_chain(&t, 2.5, 2.0, 0, &mc()).is_err());
        assert!(verify_proof_chain(&t, 1.0, 2.0, 3, &mc()).is_err());
    }

    #[test]
    fn chain_complex_monte_carlo() {
        let t: FormTensor<Complex64> = generate(TensorKind::Gaussian, 2, 3, 2).unwrap();
        let r = verify_proof_chain(&t, 1.5, 2.4, 1, &mc()).unwrap();
        assert_eq!(r.variables, Variables::Steinhaus);
        assert!(r.links[1].noise > 0.0);
        assert!(r.pass(), "{:?}", r.first_failure);
    }
}
