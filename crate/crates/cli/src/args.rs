use clap::{Args, Parser, Subcommand, ValueEnum};

pub const DEFAULT_SEED: u64 = 20_120_428;

#[derive(Debug, Parser)]
#[command(
    name = "smvbs",
    version,
    about = "Skewed multivariate Birnbaum-Saunders models"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model and report estimates, standard errors and intervals.
    Fit(FitArgs),
    /// Draw a sample from a model with given parameters.
    Simulate(SimulateArgs),
    /// Likelihood-ratio test of lambda = 0.
    TestLambda(TestLambdaArgs),
    /// Vuong comparison of two fitted models.
    Compare(CompareArgs),
    /// Marginal goodness of fit of the fitted BS margins.
    Gof(GofArgs),
    /// Observed and/or expected information matrix.
    Info(InfoArgs),
    /// Latent correlation and product moment.
    Corr(CorrArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Smvbs,
    Indep,
    Kbj,
    GbsT,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Smvbs => "smvbs",
            Model::Indep => "indep",
            Model::Kbj => "kbj",
            Model::GbsT => "gbs-t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Output {
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InfoChoice {
    Observed,
    Expected,
    Both,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Data file (CSV or whitespace separated) or the bundled dataset "volle".
    #[arg(long)]
    pub input: Option<String>,
    /// 1-based column selection, e.g. "1,3" or "2-4".
    #[arg(long)]
    pub columns: Option<String>,
    /// Keep the bundled dataset's printed values.
    #[arg(long)]
    pub raw: bool,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte-Carlo draws for expectations.
    #[arg(long, env = "SMVBS_MC_DRAWS", default_value_t = 200_000)]
    pub mc_draws: usize,
    /// Significance level.
    #[arg(long, default_value_t = 0.05)]
    pub level: f64,
    /// Report format (json unless given; simulate writes CSV by default).
    #[arg(long, value_enum)]
    pub output: Option<Output>,
    /// Degrees of freedom of the Student-t generator.
    #[arg(long, default_value_t = 4.0)]
    pub nu: f64,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[arg(long, value_enum, default_value_t = Model::Smvbs)]
    pub model: Model,
    /// Refit from several starting values of lambda.
    #[arg(long)]
    pub multi_start: bool,
    #[arg(long, value_enum, default_value_t = InfoChoice::Expected)]
    pub info: InfoChoice,
    /// Write the fitted density on a grid over the data range to this CSV file.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, default_value_t = 100)]
    pub grid_size: usize,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum, default_value_t = Model::Smvbs)]
    pub model: Model,
    #[arg(long)]
    pub n: usize,
    /// Comma-separated parameters: alphas, betas, then lambda (or rho).
    #[arg(long, allow_hyphen_values = true)]
    pub params: String,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct TestLambdaArgs {
    #[arg(long)]
    pub multi_start: bool,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_enum, default_value_t = Model::Smvbs)]
    pub model: Model,
    #[arg(long, value_enum, default_value_t = Model::Kbj)]
    pub against: Model,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct GofArgs {
    #[arg(long, value_enum, default_value_t = Model::Smvbs)]
    pub model: Model,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct InfoArgs {
    #[arg(long, value_enum, default_value_t = InfoChoice::Both)]
    pub info: InfoChoice,
    /// Evaluate at these parameters instead of the fitted ones.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    /// Sample size for the expected information when no data are given.
    #[arg(long)]
    pub n: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Args)]
pub struct CorrArgs {
    /// Parameters; fitted from the input when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub params: Option<String>,
    #[command(flatten)]
    pub common: Common,
}
