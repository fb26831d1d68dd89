//! Empirical certification of the mixed-norm bound
//! max_i ‖T‖_{(s, η₁), i} ≤ A_{λ₀}^{−2(m−1)/s} ‖T‖ on random forms, a
//! hill-climbing search for large ratios, and sweeps over λ₀.

use std::time::{Duration, Instant};

use num_traits::{Float, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponents::{admissibility_failure, exponents, ExponentSet};
use crate::norm::{certified_upper, estimate_norm, AscentConfig, NormMethod};
use crate::scalar::{Real, Scalar, ScalarField};
use crate::seed::{derive_seed, rng_from_seed};
use crate::serde_ext::extended;
use crate::tensor::{generate, FormTensor, TensorKind};

/// Absolute tolerance on ratio comparisons.
pub const RATIO_TOL: f64 = 1e-9;

/// Which coefficient distributions the trials draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum TrialMix {
    /// Gaussian on even trials, signs on odd ones.
    Mixed,
    Single(TensorKind),
}

impl TrialMix {
    pub fn kind_for(self, trial: usize) -> TensorKind {
        match self {
            TrialMix::Mixed if trial.is_multiple_of(2) => TensorKind::Gaussian,
            TrialMix::Mixed => TensorKind::Signs,
            TrialMix::Single(kind) => kind,
        }
    }
}

impl std::fmt::Display for TrialMix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TrialMix::Mixed => f.write_str("mixed"),
            TrialMix::Single(kind) => f.write_str(kind.as_str()),
        }
    }
}

impl std::str::FromStr for TrialMix {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("mixed") {
            Ok(TrialMix::Mixed)
        } else {
            s.parse().map(TrialMix::Single)
        }
    }
}

impl From<TrialMix> for String {
    fn from(mix: TrialMix) -> String {
        mix.to_string()
    }
}

impl TryFrom<String> for TrialMix {
    type Error = String;

    fn try_from(s: String) -> std::result::Result<Self, String> {
        s.parse()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub trials: usize,
    pub seed: u64,
    pub mix: TrialMix,
    pub ascent: AscentConfig,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            trials: 1000,
            seed: 0,
            mix: TrialMix::Mixed,
            ascent: AscentConfig::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Classification {
    Pass,
    /// constant·lower < LHS ≤ constant·upper.
    Inconclusive,
    /// LHS > constant·upper.
    Violation,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::Pass => "pass",
            Classification::Inconclusive => "inconclusive",
            Classification::Violation => "violation",
        }
    }
}

/// Parameters shared by every trial of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertParams {
    pub m: usize,
    pub n: usize,
    #[serde(with = "extended")]
    pub p: f64,
    pub lambda0: f64,
    pub field: ScalarField,
    pub s: f64,
    pub eta1: f64,
    pub constant: f64,
    pub extrapolated: bool,
}

impl CertParams {
    fn from_set<R: Real>(set: &ExponentSet<R>, n: usize) -> Self {
        CertParams {
            m: set.m,
            n,
            p: set.p.to_f64_lossy(),
            lambda0: set.lambda0.to_f64_lossy(),
            field: set.field,
            s: set.s.to_f64_lossy(),
            eta1: set.eta1.to_f64_lossy(),
            constant: set.constant.to_f64_lossy(),
            extrapolated: set.extrapolated,
        }
    }
}

/// One row of the per-trial CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub trial_seed: u64,
    pub kind: TensorKind,
    pub lhs: f64,
    pub norm_lower: f64,
    pub norm_upper: f64,
    pub norm_method: NormMethod,
    pub ratio_conservative: f64,
    pub ratio_empirical: f64,
    pub classification: Classification,
    pub retried: bool,
}

impl TrialRecord {
    pub const CSV_HEADER: [&'static str; 11] = [
        "trial",
        "trial_seed",
        "kind",
        "lhs",
        "norm_lower",
        "norm_upper",
        "norm_method",
        "ratio_conservative",
        "ratio_empirical",
        "classification",
        "retried",
    ];
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificationReport {
    pub params: CertParams,
    pub trials: usize,
    pub mix: TrialMix,
    /// max LHS/upper(‖T‖): a valid lower bound on the best constant.
    pub max_ratio_conservative: f64,
    /// max LHS/lower(‖T‖).
    pub max_ratio_empirical: f64,
    pub violations: usize,
    pub inconclusive: usize,
    /// Trials that were inconclusive at first and got a second norm estimate.
    pub retried: usize,
    pub seed: u64,
    /// Worker threads available to the run.
    pub jobs: usize,
    /// Wall time; left out of JSON so reports are reproducible byte for byte.
    #[serde(skip)]
    pub elapsed: Duration,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

/// Largest mixed norm over the choice of outermost slot.
pub fn mixed_lhs<S: Scalar>(t: &FormTensor<S>, s: S::Real, eta1: S::Real) -> S::Real {
    t.max_mixed_norm(s, eta1)
}

/// Exponents for an admissible triple, or [`Error::Inadmissible`] naming
/// the condition that fails.
pub fn admissible_exponents<R: Real>(m: usize, p: R, lambda0: R, field: ScalarField) -> Result<ExponentSet<R>> {
    if let Some(reason) = admissibility_failure(m, p, lambda0)? {
        return Err(Error::Inadmissible(reason));
    }
    exponents(m, p, lambda0, field)
}

fn ratio(lhs: f64, norm: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else {
        lhs / norm
    }
}

fn classify(constant: f64, conservative: f64, empirical: f64) -> Classification {
    if conservative > constant + RATIO_TOL {
        Classification::Violation
    } else if empirical > constant + RATIO_TOL {
        Classification::Inconclusive
    } else {
        Classification::Pass
    }
}

/// Outcome of judging one form against the bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Judgement {
    pub lhs: f64,
    pub norm_lower: f64,
    pub norm_upper: f64,
    pub norm_method: NormMethod,
    pub ratio_conservative: f64,
    pub ratio_empirical: f64,
    pub classification: Classification,
    /// Set when a first inconclusive estimate was redone with 4× restarts.
    pub retried: bool,
}

fn judge<S: Scalar>(
    t: &FormTensor<S>,
    set: &ExponentSet<S::Real>,
    ascent: &AscentConfig,
    seed: u64,
) -> Result<Judgement> {
    let lhs = mixed_lhs(t, set.s, set.eta1).to_f64_lossy();
    let constant = set.constant.to_f64_lossy();
    let est = estimate_norm(t, set.p, ascent, derive_seed(seed, 1))?;
    let mut lower = est.lower.to_f64_lossy();
    let mut upper = est.upper.to_f64_lossy();
    let mut class = classify(constant, ratio(lhs, upper), ratio(lhs, lower));
    let mut retried = false;
    if class == Classification::Inconclusive && !est.is_exact() {
        let stronger = AscentConfig {
            restarts: ascent.restarts * 4,
            ..*ascent
        };
        let again = estimate_norm(t, set.p, &stronger, derive_seed(seed, 2))?;
        lower = lower.max(again.lower.to_f64_lossy());
        upper = upper.min(again.upper.to_f64_lossy());
        class = classify(constant, ratio(lhs, upper), ratio(lhs, lower));
        retried = true;
    }
    Ok(Judgement {
        lhs,
        norm_lower: lower,
        norm_upper: upper,
        norm_method: est.method,
        ratio_conservative: ratio(lhs, upper),
        ratio_empirical: ratio(lhs, lower),
        classification: class,
        retried,
    })
}

fn run_trial<S: Scalar>(trial: usize, set: &ExponentSet<S::Real>, n: usize, cfg: &TrialConfig) -> Result<TrialRecord> {
    let trial_seed = derive_seed(cfg.seed, trial as u64);
    let kind = cfg.mix.kind_for(trial);
    let t: FormTensor<S> = generate(kind, set.m, n, trial_seed)?;
    let j = judge(&t, set, &cfg.ascent, trial_seed)?;
    Ok(TrialRecord {
        trial,
        trial_seed,
        kind,
        lhs: j.lhs,
        norm_lower: j.norm_lower,
        norm_upper: j.norm_upper,
        norm_method: j.norm_method,
        ratio_conservative: j.ratio_conservative,
        ratio_empirical: j.ratio_empirical,
        classification: j.classification,
        retried: j.retried,
    })
}

/// The bound checked on one given form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormVerdict {
    pub params: CertParams,
    /// Mixed norm with slot i outermost, for i = 0..m.
    pub lhs_per_index: Vec<f64>,
    #[serde(flatten)]
    pub judgement: Judgement,
    pub seed: u64,
}

/// Checks the bound on a single form for an admissible (p, λ₀).
pub fn certify_form<S: Scalar>(
    t: &FormTensor<S>,
    p: S::Real,
    lambda0: S::Real,
    ascent: &AscentConfig,
    seed: u64,
) -> Result<FormVerdict> {
    let set = admissible_exponents(t.order(), p, lambda0, S::FIELD)?;
    let lhs_per_index = (0..t.order())
        .map(|i| t.mixed_norm_unchecked(i, set.s, set.eta1).to_f64_lossy())
        .collect();
    Ok(FormVerdict {
        params: CertParams::from_set(&set, t.dim()),
        lhs_per_index,
        judgement: judge(t, &set, ascent, seed)?,
        seed,
    })
}

/// Runs `cfg.trials` random trials of the bound for an admissible
/// (m, p, λ₀) on forms of dimension n over the scalar field of `S`.
///
/// Trial k draws its form from seed `derive_seed(cfg.seed, k)`, so the
/// report depends only on the parameters and the seed.
pub fn certify<S: Scalar>(
    m: usize,
    n: usize,
    p: S::Real,
    lambda0: S::Real,
    cfg: &TrialConfig,
) -> Result<CertificationReport> {
    let started = Instant::now();
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let set = admissible_exponents(m, p, lambda0, S::FIELD)?;
    let records = (0..cfg.trials)
        .into_par_iter()
        .map(|k| run_trial::<S>(k, &set, n, cfg))
        .collect::<Result<Vec<_>>>()?;
    let count = |c| records.iter().filter(|r| r.classification == c).count();
    let max_of = |f: fn(&TrialRecord) -> f64| records.iter().map(f).fold(0.0, f64::max);
    Ok(CertificationReport {
        params: CertParams::from_set(&set, n),
        trials: cfg.trials,
        mix: cfg.mix,
        max_ratio_conservative: max_of(|r| r.ratio_conservative),
        max_ratio_empirical: max_of(|r| r.ratio_empirical),
        violations: count(Classification::Violation),
        inconclusive: count(Classification::Inconclusive),
        retried: records.iter().filter(|r| r.retried).count(),
        seed: cfg.seed,
        jobs: rayon::current_num_threads(),
        elapsed: started.elapsed(),
        records,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    /// Candidate tensors evaluated after the seed tensors.
    pub budget: usize,
    /// Independent hill-climbing chains sharing the budget.
    pub chains: usize,
    /// Initial perturbation size, relative to the largest coefficient.
    pub step: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: 2000,
            chains: 8,
            step: 0.5,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchResult<S: Scalar> {
    pub best_tensor: FormTensor<S>,
    /// LHS / certified upper bound on ‖T‖.
    pub best_ratio_conservative: f64,
    pub params: CertParams,
    pub evaluations: usize,
    pub seed: u64,
}

/// Start distributions, cycled over chains. The unit tensor pins the
/// ratio at 1 from the outset.
const CHAIN_STARTS: [TensorKind; 3] = [TensorKind::Signs, TensorKind::Gaussian, TensorKind::SparseUnit];

fn conservative_ratio<S: Scalar>(t: &FormTensor<S>, set: &ExponentSet<S::Real>) -> f64 {
    let lhs = mixed_lhs(t, set.s, set.eta1).to_f64_lossy();
    ratio(lhs, certified_upper(t, set.p).to_f64_lossy())
}

fn climb<S: Scalar>(
    set: &ExponentSet<S::Real>,
    n: usize,
    steps: usize,
    step0: f64,
    chain: usize,
    seed: u64,
) -> Result<(FormTensor<S>, f64)> {
    let kind = CHAIN_STARTS[chain % CHAIN_STARTS.len()];
    let mut best: FormTensor<S> = generate(kind, set.m, n, seed)?;
    let mut best_ratio = conservative_ratio(&best, set);
    let mut rng = rng_from_seed(derive_seed(seed, 1));
    let mut step = step0;
    let len = best.coeffs().len();
    for _ in 0..steps {
        let j = rng.random_range(0..len);
        let scale = best.max_modulus().to_f64_lossy().max(1.0) * step;
        let kick = S::sample_gaussian(&mut rng).scale(S::Real::lit(scale));
        let mut coeffs = best.coeffs().to_vec();
        coeffs[j] += kick;
        let candidate = FormTensor::new(set.m, n, coeffs)?;
        let r = conservative_ratio(&candidate, set);
        if r > best_ratio {
            best = candidate;
            best_ratio = r;
            step = (step * 1.5).min(step0);
        } else {
            step = (step * 0.9).max(1e-6);
        }
    }
    Ok((best, best_ratio))
}

/// Searches for forms with a large LHS/upper(‖T‖) ratio by hill-climbing
/// single-coefficient perturbations from seeded random starts.
///
/// Chain c starts from a signs, Gaussian or unit tensor (cycling) drawn
/// with `derive_seed(seed, c)`; with budget 0 only the first chain's seed
/// tensor is evaluated. A ratio above the constant is
/// reported as [`Error::Violation`].
pub fn search_extremal<S: Scalar>(
    m: usize,
    n: usize,
    p: S::Real,
    lambda0: S::Real,
    cfg: &SearchConfig,
    seed: u64,
) -> Result<SearchResult<S>> {
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let set = admissible_exponents(m, p, lambda0, S::FIELD)?;
    let chains = if cfg.budget == 0 {
        1
    } else {
        cfg.chains.clamp(1, cfg.budget)
    };
    let per = cfg.budget / chains;
    let extra = cfg.budget % chains;
    let results = (0..chains)
        .into_par_iter()
        .map(|c| {
            let steps = per + usize::from(c < extra);
            climb::<S>(&set, n, steps, cfg.step, c, derive_seed(seed, c as u64))
        })
        .collect::<Result<Vec<_>>>()?;
    let (best_tensor, best_ratio) = results
        .into_iter()
        .reduce(|a, b| if b.1 > a.1 { b } else { a })
        .expect("at least one chain");
    let constant = set.constant.to_f64_lossy();
    if best_ratio > constant + RATIO_TOL {
        return Err(Error::Violation {
            check: "extremal search ratio".into(),
            lhs: best_ratio,
            rhs: constant,
        });
    }
    Ok(SearchResult {
        best_tensor,
        best_ratio_conservative: best_ratio,
        params: CertParams::from_set(&set, n),
        evaluations: chains + cfg.budget,
        seed,
    })
}

/// One λ₀ of a sweep. Exponents are absent where their formulas are
/// singular.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lambda0: f64,
    pub s: Option<f64>,
    pub eta1: Option<f64>,
    pub constant: Option<f64>,
    pub admissible: bool,
    pub extrapolated: bool,
    pub max_ratio_conservative: Option<f64>,
}

impl SweepRow {
    pub const CSV_HEADER: [&'static str; 7] = [
        "lambda0",
        "s",
        "eta1",
        "constant",
        "admissible",
        "extrapolated",
        "max_ratio_conservative",
    ];
}

/// Evaluates the exponents at every λ₀ of `grid`, plus a certification run
/// at admissible points when `trials` is given.
pub fn sweep_lambda0<S: Scalar>(
    m: usize,
    p: S::Real,
    n: usize,
    grid: &[S::Real],
    trials: Option<&TrialConfig>,
) -> Result<Vec<SweepRow>> {
    grid.iter()
        .map(|&lambda0| {
            let set = match exponents(m, p, lambda0, S::FIELD) {
                Ok(set) => Some(set),
                Err(Error::Singular(_)) => None,
                Err(e) => return Err(e),
            };
            let admissible = admissibility_failure(m, p, lambda0)?.is_none();
            let max_ratio = match (trials, admissible) {
                (Some(cfg), true) => Some(certify::<S>(m, n, p, lambda0, cfg)?.max_ratio_conservative),
                _ => None,
            };
            let finite = |x: S::Real| (x > S::Real::zero() && x.is_finite()).then(|| x.to_f64_lossy());
            Ok(SweepRow {
                lambda0: lambda0.to_f64_lossy(),
                s: set.as_ref().and_then(|e| finite(e.s)),
                eta1: set.as_ref().and_then(|e| finite(e.eta1)),
                constant: set
                    .as_ref()
                    .filter(|e| e.s > S::Real::zero())
                    .map(|e| e.constant.to_f64_lossy()),
                admissible,
                extrapolated: set.map(|e| e.extrapolated).unwrap_or(lambda0 == S::Real::lit(2.0)),
                max_ratio_conservative: max_ratio,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_uses_both_brackets() {
        assert_eq!(classify(2.0, 1.5, 1.9), Classification::Pass);
        assert_eq!(classify(2.0, 1.5, 2.1), Classification::Inconclusive);
        assert_eq!(classify(2.0, 2.0 + 1e-6, 2.1), Classification::Violation);
        assert_eq!(classify(1.0, 1.0 + 1e-12, 1.0 + 1e-12), Classification::Pass);
    }

    fn small(trials: usize, seed: u64) -> TrialConfig {
        TrialConfig {
            trials,
            seed,
            mix: TrialMix::Mixed,
            ascent: AscentConfig {
                restarts: 8,
                ..AscentConfig::default()
            },
        }
    }

    #[test]
    fn sparse_unit_ratio_is_one() {
        let cfg = TrialConfig {
            mix: TrialMix::Single(TensorKind::SparseUnit),
            ..small(20, 3)
        };
        let r = certify::<f64>(3, 2, 4.0, 1.0, &cfg).unwrap();
        assert_eq!(r.violations, 0);
        for rec in &r.records {
            assert!((rec.ratio_conservative - 1.0).abs() < 1e-12);
            assert_eq!(rec.classification, Classification::Pass);
        }
    }

    #[test]
    fn lambda0_one_has_no_violations() {
        let r = certify::<f64>(3, 2, 4.0, 1.0, &small(200, 7)).unwrap();
        assert_eq!(r.violations, 0);
        assert!((r.params.constant - 2.0).abs() < 1e-12);
        assert!(r.max_ratio_conservative <= r.max_ratio_empirical);
        for rec in &r.records {
            assert!(rec.ratio_conservative <= rec.ratio_empirical);
        }
    }

    #[test]
    fn single_form_verdict() {
        let h = FormTensor::new(2, 2, vec![1.0f64, 1.0, 1.0, -1.0]).unwrap();
        let v = certify_form(&h, f64::INFINITY, 2.0, &AscentConfig::default(), 0).unwrap();
        // Frobenius norm 2 against ‖H‖ = 2 with constant 1.
        assert_eq!(v.lhs_per_index, vec![2.0, 2.0]);
        assert_eq!(v.judgement.norm_method, NormMethod::ExactSignEnum);
        assert!((v.judgement.ratio_conservative - 1.0).abs() < 1e-12);
        assert_eq!(v.judgement.classification, Classification::Pass);
    }

    #[test]
    fn rank_one_closed_form() {
        // T = u ⊗ v on ℓ_p² × ℓ_p²: ‖T‖ = ‖u‖_{p'}‖v‖_{p'}.
        let (u, v) = ([0.6f64, -1.3], [2.0f64, 0.4]);
        let t = FormTensor::from_fn(2, 2, |i| u[i[0]] * v[i[1]]).unwrap();
        let (p, lambda0) = (5.0f64, 1.5);
        let set = admissible_exponents(2, p, lambda0, ScalarField::Real).unwrap();
        let pd = p / (p - 1.0);
        let dual = |w: &[f64]| w.iter().map(|x| x.abs().powf(pd)).sum::<f64>().powf(1.0 / pd);
        let norm = dual(&u) * dual(&v);
        let est = estimate_norm(&t, p, &AscentConfig::default(), 1).unwrap();
        assert!((est.lower - norm).abs() < 1e-9 * norm);
        let lhs = mixed_lhs(&t, set.s, set.eta1);
        assert!(lhs / norm <= set.constant + RATIO_TOL);
    }

    #[test]
    fn inadmissible_is_rejected() {
        let err = certify::<f64>(2, 2, 4.0, 1.0, &small(1, 0)).unwrap_err();
        match err {
            Error::Inadmissible(msg) => assert!(msg.contains("empty")),
            e => panic!("{e}"),
        }
        let err = certify::<f64>(3, 2, 8.0, 1.0, &small(1, 0)).unwrap_err();
        assert!(matches!(err, Error::Inadmissible(ref m) if m.contains("s >= 2")));
    }

    #[test]
    fn search_trivial_cases() {
        let zero = SearchConfig {
            budget: 0,
            ..SearchConfig::default()
        };
        let a = search_extremal::<f64>(3, 2, 4.0, 1.0, &zero, 9).unwrap();
        let again = search_extremal::<f64>(3, 2, 4.0, 1.0, &zero, 9).unwrap();
        assert_eq!(a.best_tensor, again.best_tensor);
        let set = admissible_exponents(3, 4.0, 1.0, ScalarField::Real).unwrap();
        assert_eq!(a.best_ratio_conservative, conservative_ratio(&a.best_tensor, &set));
        assert_eq!(a.evaluations, 1);

        let scalar = search_extremal::<f64>(2, 1, 5.0, 1.5, &SearchConfig::default(), 1).unwrap();
        assert!((scalar.best_ratio_conservative - 1.0).abs() < 1e-12);
    }

    #[test]
    fn search_stays_below_constant() {
        let cfg = SearchConfig {
            budget: 400,
            chains: 4,
            step: 0.5,
        };
        let r = search_extremal::<f64>(3, 2, 4.0, 1.0, &cfg, 11).unwrap();
        assert!(r.best_ratio_conservative >= 1.0 - 1e-12);
        assert!(r.best_ratio_conservative <= 2.0 + RATIO_TOL);
    }

    #[test]
    fn sweep_examples() {
        let rows = sweep_lambda0::<f64>(2, 4.0, 2, &[1.0, 1.5, 2.0], None).unwrap();
        let flags: Vec<bool> = rows.iter().map(|r| r.admissible).collect();
        assert_eq!(flags, vec![false, true, false]);
        assert!(rows[2].eta1.is_none() && rows[2].extrapolated);
        let rows = sweep_lambda0::<f64>(3, 4.0, 2, &[1.0], None).unwrap();
        assert!((rows[0].constant.unwrap() - 2.0).abs() < 1e-12);
        assert!(sweep_lambda0::<f64>(3, 4.0, 2, &[], None).unwrap().is_empty());
    }

    #[test]
    fn mix_parses() {
        assert_eq!("mixed".parse::<TrialMix>().unwrap(), TrialMix::Mixed);
        assert_eq!(
            "sparse-unit".parse::<TrialMix>().unwrap(),
            TrialMix::Single(TensorKind::SparseUnit)
        );
        let json = serde_json::to_string(&TrialMix::Single(TensorKind::Signs)).unwrap();
        assert_eq!(json, "\"signs\"");
    }
}
