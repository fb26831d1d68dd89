use std::fs;
use std::path::Path;
use std::str::FromStr;

use hlcert_core::chaos::{verify_proof_chain_report, ChainReport};
use hlcert_core::exponents::{admissibility_failure, inner_exponent, TransferProblem};
use hlcert_core::{
    certify, certify_form, check_contraction, check_khinchin, classical_exponents, exponents, khinchin_a, region,
    search_extremal, solve_q0, sweep_lambda0, transfer, AnyForm, AscentConfig, Classification, Complex64, Error,
    FormTensor, MonteCarloConfig, Result, Scalar, ScalarField, SearchConfig, TrialConfig,
};
use serde_json::{json, Value};

use crate::args::*;
use crate::output::{columns, merged, Output};

pub fn run(command: &Command) -> Result<Output> {
    match command {
        Command::Constants(a) => constants(a),
        Command::Region(a) => region_cmd(a),
        Command::Exponents(a) => exponents_cmd(a),
        Command::Transfer(a) => transfer_cmd(a),
        Command::Classical(a) => classical(a),
        Command::Verify(a) => verify(a),
        Command::Search(a) => search(a),
        Command::Sweep(a) => sweep(a),
        Command::KhinchinCheck(a) => khinchin(a),
        Command::ContractionCheck(a) => contraction(a),
        Command::ChainCheck(a) => chain(a),
    }
}

fn resolve_seed(seed: &SeedArg) -> u64 {
    seed.seed.unwrap_or_else(rand::random)
}

fn ascent(a: &AscentArgs) -> AscentConfig {
    AscentConfig {
        restarts: a.restarts,
        max_iters: a.max_iters,
        ..AscentConfig::default()
    }
}

/// JSON number, or `"inf"` for infinity.
fn real_json(x: f64) -> Value {
    if x.is_finite() {
        json!(x)
    } else {
        json!("inf")
    }
}

fn read_form(path: &Path) -> Result<AnyForm> {
    let text = fs::read_to_string(path).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    AnyForm::from_json(&text)
}

fn constants(a: &ConstantsArgs) -> Result<Output> {
    let fields = match a.field {
        Some(f) => vec![f],
        None => vec![ScalarField::Real, ScalarField::Complex],
    };
    let values = fields.iter().map(|&f| khinchin_a(a.q, f)).collect::<Result<Vec<_>>>()?;
    let q0: f64 = solve_q0();
    let mut out = Output::new(
        "constants",
        &json!({ "q0": q0, "constants": values }),
        columns::CONSTANTS,
    )
    .rows(
        values
            .iter()
            .map(|v| serde_json::to_value(v).expect("serialize"))
            .collect(),
    );
    out.details = false;
    for v in &values {
        out = out.summary(format!(
            "A_{} ({}) = {}  [{:?} branch]",
            v.q, v.field, v.value, v.branch
        ));
    }
    Ok(out.summary(format!("q0 = {q0}")))
}

fn region_cmd(a: &RegionArgs) -> Result<Output> {
    let r = region(a.m, a.lambda0)?;
    let line = if r.empty {
        format!("region: empty (lambda0*m = {} does not exceed 2)", r.lower)
    } else {
        format!(
            "region: {} < p <= {}{}",
            r.lower,
            r.upper,
            if r.extrapolated {
                " (extrapolated at lambda0 = 2)"
            } else {
                ""
            }
        )
    };
    let result = merged(&r, json!({ "m": a.m, "lambda0": a.lambda0 }));
    Ok(Output::new("region", &result, columns::REGION).summary(line))
}

fn exponents_cmd(a: &ExponentsArgs) -> Result<Output> {
    let e = exponents(a.m, a.p, a.lambda0, a.field)?;
    let reason = admissibility_failure(a.m, a.p, a.lambda0)?;
    let mut out = Output::new(
        "exponents",
        &merged(&e, json!({ "inadmissible_reason": reason })),
        columns::EXPONENTS,
    )
    .summary(format!("s = {}  eta1 = {}  constant = {}", e.s, e.eta1, e.constant));
    if let Some(reason) = reason {
        out = out.summary(format!("inadmissible: {reason}"));
    }
    Ok(out)
}

fn transfer_cmd(a: &TransferArgs) -> Result<Output> {
    let tp = TransferProblem {
        p_list: a.p.clone(),
        q_list: a.q.clone(),
        lambda0: a.lambda0,
        s: a.s,
    };
    let t = transfer(&tp)?;
    Ok(Output::new("transfer", &t, columns::TRANSFER).summary(format!("eta1 = {}  eta2 = {}", t.eta1, t.eta2)))
}

fn classical(a: &ClassicalArgs) -> Result<Output> {
    let c = classical_exponents(a.m, a.p)?;
    let result = merged(&c, json!({ "m": a.m, "p": real_json(a.p) }));
    Ok(Output::new("classical", &result, columns::CLASSICAL))
}

fn verify(a: &VerifyArgs) -> Result<Output> {
    let seed = resolve_seed(&a.seed);
    let ascent = ascent(&a.ascent);
    if let Some(path) = &a.tensor {
        let verdict = match read_form(path)? {
            AnyForm::Real(t) => certify_form(&t, a.p, a.lambda0, &ascent, seed)?,
            AnyForm::Complex(t) => certify_form(&t, a.p, a.lambda0, &ascent, seed)?,
        };
        let j = verdict.judgement;
        let mut out = Output::new("verify", &verdict, columns::VERIFY)
            .seed(seed)
            .summary(format!(
                "{}: ratio {} (conservative) / {} (empirical) against constant {}",
                j.classification.as_str(),
                j.ratio_conservative,
                j.ratio_empirical,
                verdict.params.constant
            ));
        out.rows = vec![merged(&j, json!({ "trial": 0, "trial_seed": seed, "kind": "file" }))];
        if j.classification == Classification::Violation {
            out.violation = Some("mixed-norm bound exceeded".into());
        }
        return Ok(out);
    }
    let cfg = TrialConfig {
        trials: a.trials,
        seed,
        mix: a.mix,
        ascent,
    };
    let (m, n) = (a.m.expect("required by clap"), a.n.expect("required by clap"));
    let report = match a.field {
        ScalarField::Real => certify::<f64>(m, n, a.p, a.lambda0, &cfg)?,
        ScalarField::Complex => certify::<Complex64>(m, n, a.p, a.lambda0, &cfg)?,
    };
    let rows = report
        .records
        .iter()
        .map(|r| serde_json::to_value(r).expect("serialize"))
        .collect();
    let mut out = Output::new("verify", &report, columns::VERIFY)
        .seed(seed)
        .rows(rows)
        .summary(format!(
            "{} trials: {} violations, {} inconclusive; max ratio {} (conservative) / {} (empirical) against constant {}",
            report.trials,
            report.violations,
            report.inconclusive,
            report.max_ratio_conservative,
            report.max_ratio_empirical,
            report.params.constant
        ))
        .summary(format!("elapsed {:.3}s", report.elapsed.as_secs_f64()));
    if report.violations > 0 {
        out.violation = Some(format!("{} trials exceed the mixed-norm bound", report.violations));
    }
    Ok(out)
}

fn search(a: &SearchArgs) -> Result<Output> {
    let seed = resolve_seed(&a.seed);
    let cfg = SearchConfig {
        budget: a.budget,
        chains: a.chains,
        ..SearchConfig::default()
    };
    let (result, tensor) = match a.field {
        ScalarField::Real => {
            let r = search_extremal::<f64>(a.m, a.n, a.p, a.lambda0, &cfg, seed)?;
            (
                search_summary(&r.params, r.best_ratio_conservative, r.evaluations, seed),
                r.best_tensor.to_file(),
            )
        }
        ScalarField::Complex => {
            let r = search_extremal::<Complex64>(a.m, a.n, a.p, a.lambda0, &cfg, seed)?;
            (
                search_summary(&r.params, r.best_ratio_conservative, r.evaluations, seed),
                r.best_tensor.to_file(),
            )
        }
    };
    if let Some(path) = &a.save {
        let text = serde_json::to_string(&tensor).expect("serialize");
        fs::write(path, text).map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
    }
    let line = format!(
        "best ratio {} against constant {} after {} evaluations",
        result["best_ratio_conservative"], result["constant"], result["evaluations"]
    );
    let row = result.clone();
    let full = merged(&result, json!({ "best_tensor": tensor }));
    Ok(Output::new("search", &full, columns::SEARCH)
        .seed(seed)
        .rows(vec![row])
        .summary(line))
}

fn search_summary(params: &impl serde::Serialize, ratio: f64, evaluations: usize, seed: u64) -> Value {
    merged(
        params,
        json!({ "best_ratio_conservative": ratio, "evaluations": evaluations, "seed": seed }),
    )
}

fn sweep(a: &SweepArgs) -> Result<Output> {
    let grid: Vec<f64> = if a.grid.is_empty() {
        match a.steps {
            0 => Vec::new(),
            1 => vec![1.0],
            k => (0..k).map(|i| 1.0 + i as f64 / (k - 1) as f64).collect(),
        }
    } else {
        a.grid.clone()
    };
    let seed = (a.trials > 0).then(|| resolve_seed(&a.seed));
    let cfg = seed.map(|seed| TrialConfig {
        trials: a.trials,
        seed,
        mix: a.mix,
        ascent: ascent(&a.ascent),
    });
    let rows = match a.field {
        ScalarField::Real => sweep_lambda0::<f64>(a.m, a.p, a.n, &grid, cfg.as_ref())?,
        ScalarField::Complex => sweep_lambda0::<Complex64>(a.m, a.p, a.n, &grid, cfg.as_ref())?,
    };
    let values: Vec<Value> = rows
        .iter()
        .map(|r| serde_json::to_value(r).expect("serialize"))
        .collect();
    let result = json!({ "m": a.m, "p": real_json(a.p), "rows": rows });
    let mut out = Output::new("sweep", &result, columns::SWEEP).rows(values);
    out.details = false;
    out = out.summary(format!(
        "{:>8}  {:>10}  {:>10}  {:>10}  admissible",
        "lambda0", "s", "eta1", "constant"
    ));
    let show = |x: Option<f64>| x.map(|v| format!("{v:.6}")).unwrap_or_else(|| "-".into());
    for r in &rows {
        out = out.summary(format!(
            "{:>8.4}  {:>10}  {:>10}  {:>10}  {}{}",
            r.lambda0,
            show(r.s),
            show(r.eta1),
            show(r.constant),
            r.admissible,
            r.max_ratio_conservative
                .map(|x| format!("  max ratio {x:.6}"))
                .unwrap_or_default()
        ));
    }
    Ok(match seed {
        Some(seed) => out.seed(seed),
        None => out,
    })
}

fn parse_coefficients(raw: &[String]) -> Result<Vec<Complex64>> {
    raw.iter()
        .map(|s| Complex64::from_str(s.trim()).map_err(|_| Error::Format(format!("cannot parse coefficient `{s}`"))))
        .collect()
}

fn khinchin(a: &KhinchinArgs) -> Result<Output> {
    let coeffs = parse_coefficients(&a.a)?;
    let has_imag = coeffs.iter().any(|c| c.im != 0.0);
    let field = a.field.unwrap_or(if has_imag {
        ScalarField::Complex
    } else {
        ScalarField::Real
    });
    let (report, seed) = match field {
        ScalarField::Real => {
            if has_imag {
                return Err(Error::Domain("real field requested for complex coefficients".into()));
            }
            let re: Vec<f64> = coeffs.iter().map(|c| c.re).collect();
            (check_khinchin(&re, a.q, &MonteCarloConfig::default())?, None)
        }
        ScalarField::Complex => {
            let seed = resolve_seed(&a.seed);
            let mc = MonteCarloConfig {
                samples: a.samples,
                seed,
            };
            (check_khinchin(&coeffs, a.q, &mc)?, Some(seed))
        }
    };
    let out = Output::new("khinchin-check", &report, columns::KHINCHIN).summary(format!(
        "{}: A_q*|a|_2 = {} <= moment {} (ratio {})",
        if report.pass {
            "pass"
        } else {
            "outside the 3-sigma band"
        },
        report.lhs,
        report.mid,
        report.ratio
    ));
    Ok(match seed {
        Some(seed) => out.seed(seed),
        None => out,
    })
}

/// Form from `--tensor` or generated from the source flags and `seed`.
fn load_form(src: &TensorSource, seed: u64) -> Result<AnyForm> {
    match &src.tensor {
        Some(path) => read_form(path),
        None => AnyForm::generate(
            src.kind,
            src.m.expect("required by clap"),
            src.n.expect("required by clap"),
            src.field,
            seed,
        ),
    }
}

fn contraction(a: &ContractionArgs) -> Result<Output> {
    let seed = resolve_seed(&a.seed);
    let report = match load_form(&a.source, seed)? {
        AnyForm::Real(t) => check_contraction(&t, a.t)?,
        AnyForm::Complex(t) => check_contraction(&t, a.t)?,
    };
    let out = Output::new("contraction-check", &report, columns::CONTRACTION).summary(format!(
        "max |a_J| = {} <= L_{} norm {}",
        report.max_coeff, report.t, report.moment
    ));
    Ok(if a.source.tensor.is_none() { out.seed(seed) } else { out })
}

fn chain(a: &ChainArgs) -> Result<Output> {
    let seed = resolve_seed(&a.seed);
    let form = load_form(&a.source, seed)?;
    let mc = MonteCarloConfig {
        samples: a.samples,
        seed,
    };
    let reports = match &form {
        AnyForm::Real(t) => chain_reports(t, a, &mc)?,
        AnyForm::Complex(t) => chain_reports(t, a, &mc)?,
    };
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    let mut violation = None;
    for r in &reports {
        let index = r.fixed_index + 1;
        summary.push(format!(
            "index {index}: {}  (constant {}, norm {})",
            match &r.first_failure {
                None => "pass".to_string(),
                Some(link) => format!("FAILED at {link}"),
            },
            r.constant,
            r.norm
        ));
        for l in r.links.iter().chain(std::iter::once(&r.bound)) {
            summary.push(format!(
                "  {:<18} {:>14.9} <= {:<14.9} slack {:>10.3e}  {}",
                l.name,
                l.lhs,
                l.rhs,
                l.slack,
                if l.pass { "ok" } else { "FAIL" }
            ));
            rows.push(merged(l, json!({ "index": index })));
        }
        if r.first_failure.is_some() && r.variables == hlcert_core::Variables::Rademacher && violation.is_none() {
            violation = Some(format!(
                "chain link `{}` fails for index {index}",
                r.first_failure.as_deref().unwrap_or_default()
            ));
        }
    }
    let mut out = Output::new("chain-check", &reports, columns::CHAIN).rows(rows);
    out.details = false;
    out.summary = summary;
    out.violation = violation;
    let random = a.source.tensor.is_none() || form.field() == ScalarField::Complex;
    Ok(if random { out.seed(seed) } else { out })
}

fn chain_reports<S: Scalar<Real = f64>>(
    t: &FormTensor<S>,
    a: &ChainArgs,
    mc: &MonteCarloConfig,
) -> Result<Vec<ChainReport>> {
    let m = t.order();
    let s = match (a.s, a.p) {
        (Some(s), _) => s,
        (None, Some(p)) => inner_exponent(m, p, a.lambda0)?,
        (None, None) => unreachable!("clap requires --s or --p"),
    };
    let indices: Vec<usize> = match a.index {
        Some(i) if i == 0 || i > m => {
            return Err(Error::Domain(format!("--index must lie in 1..={m}, got {i}")));
        }
        Some(i) => vec![i - 1],
        None => (0..m).collect(),
    };
    indices
        .into_iter()
        .map(|i| {
            verify_proof_chain_report(t, a.lambda0, s, i, mc).map(|r| match r {
                Ok(report) => report,
                Err(broken) => *broken.report,
            })
        })
        .collect()
}
