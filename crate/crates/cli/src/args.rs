use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use ranksig_core::{Counting, Criterion, ProportionMode};

#[derive(Debug, Parser)]
#[command(
    name = "ranksig",
    version,
    about = "Significance tests and tiering for institutional rankings"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compare two institutions: 2×2 tables, chi-square, residuals and z.
    Pairwise(PairwiseArgs),
    /// Partition institutions into tiers and print ranked group tables.
    Group(GroupArgs),
    /// Cross-tabulate two labelings and report association measures.
    Compare(CompareArgs),
    /// Split an indicator change into data and model effects.
    Decompose(DecomposeArgs),
    /// Bootstrap stability intervals of the top-10% share.
    Bootstrap(BootstrapArgs),
    /// Per-category z values in decreasing order, for plotting.
    Zcurve(ZcurveArgs),
    /// Write the significance graph in a network file format.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CountingArg {
    Frac,
    Full,
}

impl From<CountingArg> for Counting {
    fn from(c: CountingArg) -> Self {
        match c {
            CountingArg::Frac => Counting::Fractional,
            CountingArg::Full => Counting::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CriterionArg {
    Ztest,
    Ci,
}

impl From<CriterionArg> for Criterion {
    fn from(c: CriterionArg) -> Self {
        match c {
            CriterionArg::Ztest => Criterion::ZTest,
            CriterionArg::Ci => Criterion::CiOverlap,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProportionsArg {
    Stored,
    Exact,
}

impl From<ProportionsArg> for ProportionMode {
    fn from(p: ProportionsArg) -> Self {
        match p {
            ProportionsArg::Stored => ProportionMode::Stored,
            ProportionsArg::Exact => ProportionMode::Exact,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Dot,
    Pajek,
    Vjson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Weak components of the significance graph.
    Components,
    /// Greedy modularity clustering.
    Modularity,
    /// Groups taken from the `group` column of the node table.
    Given,
}

/// Record file and the slice of it to use.
#[derive(Debug, Clone, Args)]
pub struct Selection {
    /// Record file, `-` for stdin, or `builtin:NAME`.
    #[arg(long, default_value = "builtin:lr2020-sample")]
    pub input: String,
    #[arg(long, default_value = "2015-2018")]
    pub period: String,
    #[arg(long, default_value = "All sciences")]
    pub field: String,
    #[arg(long, value_enum, default_value = "frac")]
    pub counting: CountingArg,
    /// Keep only these countries (repeatable).
    #[arg(long = "country")]
    pub countries: Vec<String>,
}

/// How edges of the significance graph are decided.
#[derive(Debug, Clone, Args)]
pub struct GraphOptions {
    #[arg(long, value_enum, default_value = "ztest")]
    pub criterion: CriterionArg,
    #[arg(long, default_value_t = 0.01)]
    pub alpha: f64,
    #[arg(long, value_enum, default_value = "stored")]
    pub proportions: ProportionsArg,
    /// Node table (`name,z[,group][,category]`) instead of a record file.
    #[arg(long)]
    pub nodes: Option<String>,
    /// Link table (`a,b,z`); pairs without a link count as significant.
    #[arg(long, requires = "nodes")]
    pub links: Option<String>,
}

#[derive(Debug, Args)]
pub struct PairwiseArgs {
    pub first: String,
    pub second: String,
    #[command(flatten)]
    pub selection: Selection,
    #[arg(long, value_enum, default_value = "stored")]
    pub proportions: ProportionsArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    #[command(flatten)]
    pub selection: Selection,
    #[command(flatten)]
    pub opts: GraphOptions,
    #[arg(long, value_enum, default_value = "components")]
    pub method: Method,
    #[arg(long, default_value_t = 1.0)]
    pub resolution: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also write the graph to this file.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    /// Format of the `--graph` file.
    #[arg(long, value_enum, default_value = "dot")]
    pub format: Format,
    /// Group table destination; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Labeling file with a `name` column and a label column, or
    /// `builtin:countries` / `builtin:tiers`.
    #[arg(long)]
    pub left: String,
    #[arg(long)]
    pub right: String,
    /// Label column in both files; the first of group, tier, label,
    /// category, country when absent.
    #[arg(long)]
    pub column: Option<String>,
    /// Node table with z values; adds the Spearman correlation between
    /// overall z rank and the tier order of the right labeling.
    #[arg(long)]
    pub z: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    /// Value reported in the old edition.
    #[arg(allow_negative_numbers = true)]
    pub reported_old: f64,
    /// Old period recomputed with the current model.
    #[arg(allow_negative_numbers = true)]
    pub reconstructed_old: f64,
    #[arg(allow_negative_numbers = true)]
    pub current: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BootstrapArgs {
    #[command(flatten)]
    pub selection: Selection,
    #[arg(long, default_value_t = 1000)]
    pub draws: usize,
    #[arg(long, default_value_t = 0.95)]
    pub coverage: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Write the selected records with the intervals filled in, instead of
    /// the interval table.
    #[arg(long)]
    pub as_records: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ZcurveArgs {
    #[command(flatten)]
    pub selection: Selection,
    /// Node table (`name,z[,category]`) instead of a record file; series
    /// are split by the category column.
    #[arg(long)]
    pub nodes: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub selection: Selection,
    #[command(flatten)]
    pub opts: GraphOptions,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
