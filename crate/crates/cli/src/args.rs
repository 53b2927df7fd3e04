use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "colorcover",
    version,
    about = "Random graph coloring experiments: whitening, covers, cores, rate bounds"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Generate,
    Color,
    Whiten,
    Census,
    Core,
    Bounds,
    Montecarlo,
    ModelCompare,
    BallsbinsCheck,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a graph from G(n,m) or G'(n,m) and emit its edges.
    Generate(Options),
    /// Count proper k-colorings, broken down by class profile.
    Color(Options),
    /// Whiten a coloring and check the resulting cover.
    Whiten(Options),
    /// Group all proper colorings by their cover.
    Census(Options),
    /// Core construction and freeze checks over sampled instances.
    Core(Options),
    /// Table of degree thresholds for each k.
    Bounds(Options),
    /// Empirical mean of the profile-restricted coloring count in G'(n,m).
    Montecarlo(Options),
    /// Probability of an event under G(n,m) and G'(n,m).
    ModelCompare(Options),
    /// Balls-into-bins against conditioned Poisson, over a grid.
    BallsbinsCheck(Options),
}

impl Command {
    pub fn split(self) -> (CommandKind, Options) {
        match self {
            Command::Generate(o) => (CommandKind::Generate, o),
            Command::Color(o) => (CommandKind::Color, o),
            Command::Whiten(o) => (CommandKind::Whiten, o),
            Command::Census(o) => (CommandKind::Census, o),
            Command::Core(o) => (CommandKind::Core, o),
            Command::Bounds(o) => (CommandKind::Bounds, o),
            Command::Montecarlo(o) => (CommandKind::Montecarlo, o),
            Command::ModelCompare(o) => (CommandKind::ModelCompare, o),
            Command::BallsbinsCheck(o) => (CommandKind::BallsbinsCheck, o),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Uniform simple graph with exactly m edges.
    Gnm,
    /// m independent uniform ordered pairs.
    Multi,
    /// Balanced planted coloring, m uniform bichromatic edges.
    Planted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Event {
    /// The graph has a proper k-coloring.
    Colorable,
    /// Some vertex has degree zero.
    Isolated,
}

/// Every flag of every subcommand; a subcommand ignores the ones it does not use.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Options {
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, conflicts_with = "d")]
    pub m: Option<usize>,
    /// Average degree; m = ceil(d n / 2).
    #[arg(long)]
    pub d: Option<f64>,
    /// Color count; `bounds` accepts a comma-separated list.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<u32>,
    #[arg(long)]
    pub ell: Option<f64>,
    #[arg(long)]
    pub delta: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,

    /// Edge-list file, or a built-in name (triangle, K222, two-triangles,
    /// pathN, cycleN, edgelessN, kN).
    #[arg(long)]
    pub edges: Option<String>,
    /// Coloring file (`n k` then the colors), or an inline comma list.
    #[arg(long)]
    pub coloring: Option<String>,
    /// Class profile for `montecarlo`, comma-separated.
    #[arg(long, value_delimiter = ',')]
    pub nu: Vec<usize>,
    #[arg(long, value_enum)]
    pub model: Option<Model>,
    #[arg(long, value_enum)]
    pub event: Option<Event>,
    /// Number of colorings to list in `color`, or include colorings in the
    /// `census` export when nonzero.
    #[arg(long, default_value_t = 0)]
    pub limit: usize,
    /// Cap on enumerated colorings or search nodes.
    #[arg(long)]
    pub budget: Option<u64>,
    #[arg(long, default_value_t = 6)]
    pub mu_max: u64,
    #[arg(long, default_value_t = 4)]
    pub nu_max: usize,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.5, 1.0, 5.0])]
    pub lambda: Vec<f64>,
}
