use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hlcert_core::serde_ext::parse_extended;
use hlcert_core::{ScalarField, TensorKind, TrialMix};

use crate::output::columns;

#[derive(Debug, Parser)]
#[command(
    name = "hlcert",
    version,
    about = "Khinchin constants, Hardy-Littlewood exponents and numerical checks of mixed-norm bounds",
    long_about = "Khinchin constants, Hardy-Littlewood exponents and numerical checks of mixed-norm bounds \
                  for multilinear forms.\n\nExit status: 0 on success, 1 on usage or domain errors, \
                  2 when a checked inequality is violated (which indicates a bug)."
)]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Worker threads (defaults to one per core).
    #[arg(long, env = "HLCERT_JOBS", global = true)]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Optimal Khinchin lower constant A_q and the branch point q0.
    #[command(after_help = columns::CONSTANTS_HELP)]
    Constants(ConstantsArgs),
    /// Admissible window lambda0*m < p <= 2*lambda0*(m-1)/(2-lambda0).
    #[command(after_help = columns::REGION_HELP)]
    Region(RegionArgs),
    /// Exponents s, eta1 and the constant A^{-2(m-1)/s} for (m, p, lambda0).
    #[command(after_help = columns::EXPONENTS_HELP)]
    Exponents(ExponentsArgs),
    /// Exponents after embedding l_p spaces into l_q spaces.
    #[command(after_help = columns::TRANSFER_HELP)]
    Transfer(TransferArgs),
    /// Classical Hardy-Littlewood exponents for (m, p).
    #[command(after_help = columns::CLASSICAL_HELP)]
    Classical(ClassicalArgs),
    /// Check the mixed-norm bound on random forms or on a form read from a file.
    #[command(after_help = columns::VERIFY_HELP)]
    Verify(VerifyArgs),
    /// Hill-climb towards forms with a large mixed-norm to norm ratio.
    #[command(after_help = columns::SEARCH_HELP)]
    Search(SearchArgs),
    /// Exponents, constants and optional certification over a lambda0 grid.
    #[command(after_help = columns::SWEEP_HELP)]
    Sweep(SweepArgs),
    /// Check A_q (sum |a_j|^2)^{1/2} <= (E|sum a_j xi_j|^q)^{1/q}.
    #[command(name = "khinchin-check", after_help = columns::KHINCHIN_HELP)]
    KhinchinCheck(KhinchinArgs),
    /// Check that every chaos coefficient is bounded by the chaos L_t norm.
    #[command(name = "contraction-check", after_help = columns::CONTRACTION_HELP)]
    ContractionCheck(ContractionArgs),
    /// Evaluate every link of the l_inf chain bounding the mixed norm.
    #[command(name = "chain-check", after_help = columns::CHAIN_HELP)]
    ChainCheck(ChainArgs),
}

/// Real number that also accepts `inf`.
pub fn parse_real(text: &str) -> Result<f64, String> {
    match parse_extended(text) {
        Some(x) if !x.is_nan() => Ok(x),
        _ => Err(format!("`{text}` is not a number (use `inf` for infinity)")),
    }
}

fn parse_field(text: &str) -> Result<ScalarField, String> {
    text.parse()
}

fn parse_kind(text: &str) -> Result<TensorKind, String> {
    text.parse()
}

fn parse_mix(text: &str) -> Result<TrialMix, String> {
    text.parse()
}

#[derive(Debug, Args)]
pub struct ConstantsArgs {
    /// Moment exponent in [1, 2].
    #[arg(long, value_parser = parse_real)]
    pub q: f64,
    /// real or complex; both when omitted.
    #[arg(long, value_parser = parse_field)]
    pub field: Option<ScalarField>,
}

#[derive(Debug, Args)]
pub struct RegionArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_parser = parse_real)]
    pub lambda0: f64,
}

#[derive(Debug, Args)]
pub struct ExponentsArgs {
    #[arg(long)]
    pub m: usize,
    /// Exponent of the l_p spaces; `inf` allowed.
    #[arg(long, value_parser = parse_real)]
    pub p: f64,
    #[arg(long, value_parser = parse_real)]
    pub lambda0: f64,
    #[arg(long, value_parser = parse_field, default_value = "real")]
    pub field: ScalarField,
}

#[derive(Debug, Args)]
pub struct TransferArgs {
    /// Comma-separated p_1,...,p_m.
    #[arg(long, value_parser = parse_real, value_delimiter = ',', required = true)]
    pub p: Vec<f64>,
    /// Comma-separated q_1,...,q_m with q_k >= p_k.
    #[arg(long, value_parser = parse_real, value_delimiter = ',', required = true)]
    pub q: Vec<f64>,
    #[arg(long, value_parser = parse_real)]
    pub lambda0: f64,
    /// Inner exponent of the starting inequality.
    #[arg(long, value_parser = parse_real)]
    pub s: f64,
}

#[derive(Debug, Args)]
pub struct ClassicalArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_parser = parse_real)]
    pub p: f64,
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Random seed; drawn at random and reported when omitted.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct AscentArgs {
    /// Random restarts of the norm ascent.
    #[arg(long, default_value_t = 32)]
    pub restarts: usize,
    /// Sweep limit per restart.
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, required_unless_present = "tensor")]
    pub m: Option<usize>,
    #[arg(long, required_unless_present = "tensor")]
    pub n: Option<usize>,
    #[arg(long, value_parser = parse_real)]
    pub p: f64,
    #[arg(long, value_parser = parse_real)]
    pub lambda0: f64,
    #[arg(long, value_parser = parse_field, default_value = "real")]
    pub field: ScalarField,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// mixed (Gaussian and signs alternating) or one of gaussian, signs,
    /// sparse-unit, steinhaus.
    #[arg(long, value_parser = parse_mix, default_value = "mixed")]
    pub mix: TrialMix,
    /// Check this form (JSON) instead of random ones.
    #[arg(long, conflicts_with_all = ["m", "n", "trials", "mix"])]
    pub tensor: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub ascent: AscentArgs,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_parser = parse_real)]
    pub p: f64,
    #[arg(long, value_parser = parse_real)]
    pub lambda0: f64,
    #[arg(long, value_parser = parse_field, default_value = "real")]
    pub field: ScalarField,
    /// Candidate forms to evaluate.
    #[arg(long, default_value_t = 2000)]
    pub budget: usize,
    /// Independent hill-climbing chains.
    #[arg(long, default_value_t = 8)]
    pub chains: usize,
    /// Write the best form found to this JSON file.
    #[arg(long)]
    pub save: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub m: usize,
    #[arg(long, value_parser = parse_real)]
    pub p: f64,
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, value_parser = parse_field, default_value = "real")]
    pub field: ScalarField,
    /// Explicit comma-separated lambda0 values.
    #[arg(long, value_parser = parse_real, value_delimiter = ',', conflicts_with = "steps")]
    pub grid: Vec<f64>,
    /// Number of evenly spaced lambda0 values in [1, 2].
    #[arg(long, default_value_t = 11)]
    pub steps: usize,
    /// Certification trials per admissible lambda0 (0 skips certification).
    #[arg(long, default_value_t = 0)]
    pub trials: usize,
    #[arg(long, value_parser = parse_mix, default_value = "mixed")]
    pub mix: TrialMix,
    #[command(flatten)]
    pub seed: SeedArg,
    #[command(flatten)]
    pub ascent: AscentArgs,
}

#[derive(Debug, Args)]
pub struct KhinchinArgs {
    #[arg(long, value_parser = parse_real)]
    pub q: f64,
    /// Comma-separated coefficients; complex ones as `1+2i`.
    #[arg(long, value_delimiter = ',', required = true, allow_hyphen_values = true)]
    pub a: Vec<String>,
    /// Defaults to complex when any coefficient has an imaginary part.
    #[arg(long, value_parser = parse_field)]
    pub field: Option<ScalarField>,
    /// Monte Carlo samples for complex coefficients.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[command(flatten)]
    pub seed: SeedArg,
}

/// A form read from disk or generated from a seed.
#[derive(Debug, Args)]
pub struct TensorSource {
    /// Read the form from this JSON file.
    #[arg(long, conflicts_with_all = ["m", "n", "kind"])]
    pub tensor: Option<PathBuf>,
    #[arg(long, required_unless_present = "tensor")]
    pub m: Option<usize>,
    #[arg(long, required_unless_present = "tensor")]
    pub n: Option<usize>,
    /// Distribution of generated coefficients.
    #[arg(long, value_parser = parse_kind, default_value = "gaussian")]
    pub kind: TensorKind,
    #[arg(long, value_parser = parse_field, default_value = "real")]
    pub field: ScalarField,
}

#[derive(Debug, Args)]
pub struct ContractionArgs {
    /// Moment exponent t >= 1.
    #[arg(long, value_parser = parse_real)]
    pub t: f64,
    #[command(flatten)]
    pub source: TensorSource,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct ChainArgs {
    #[arg(long, value_parser = parse_real)]
    pub lambda0: f64,
    /// Inner exponent s >= 2.
    #[arg(long, value_parser = parse_real, required_unless_present = "p", conflicts_with = "p")]
    pub s: Option<f64>,
    /// Derive s = [1/lambda0 - (m-1)/p]^{-1} from p instead.
    #[arg(long, value_parser = parse_real)]
    pub p: Option<f64>,
    /// Slot taken outermost, 1-based; every slot when omitted.
    #[arg(long)]
    pub index: Option<usize>,
    /// Monte Carlo samples for complex forms.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[command(flatten)]
    pub source: TensorSource,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn reals_accept_infinity() {
        assert_eq!(parse_real("inf"), Ok(f64::INFINITY));
        assert_eq!(parse_real("2.5"), Ok(2.5));
        assert!(parse_real("nan").is_err());
        assert!(parse_real("four").is_err());
    }
}
