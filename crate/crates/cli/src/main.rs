//! `dgmspace` command-line interface.
//!
//! Exit codes: 0 success (including negative verdicts), 2 input error,
//! 3 resource limit, 4 hypothesis violation.

mod commands;
mod error;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "dgmspace", version, about = "Metric geometry of persistence diagram space")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    #[command(flatten)]
    pub global: GlobalOpts,
}

#[derive(Debug, Clone, Args)]
pub struct GlobalOpts {
    /// Relative eigenvalue tolerance.
    #[arg(long, global = true, default_value_t = dgmspace::negtype::DEFAULT_TOLERANCE)]
    pub tol: f64,

    /// Seed recorded in reports for reproducible runs.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Output path: a directory for `embed`, a file otherwise.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Print the JSON report to stdout instead of text.
    #[arg(long, global = true)]
    pub json: bool,
}

/// A finite metric space given by file or by a builtin family.
#[derive(Debug, Clone, Args, Default)]
pub struct SpaceSource {
    /// Distance matrix as CSV (optional header line of labels).
    pub matrix: Option<PathBuf>,

    /// Builtin K_{n,n}: distance 2 within parts, 1 across.
    #[arg(long, value_name = "N")]
    pub knn: Option<usize>,

    /// Builtin cyclic grid Z_n^m with the max of circular distances.
    #[arg(long, num_args = 2, value_names = ["N", "M"])]
    pub torus: Option<Vec<usize>>,

    /// Builtin collinear points 0, 1, ..., n-1.
    #[arg(long, value_name = "N")]
    pub line: Option<usize>,

    /// Builtin three-point space with distances 0.3, 0.5, 0.8.
    #[arg(long)]
    pub three_point: bool,

    /// Also require positivity and the triangle inequality.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Bottleneck or p-Wasserstein distance between two diagram files.
    Dist {
        a: PathBuf,
        b: PathBuf,
        /// Order p >= 1, or `inf` for the bottleneck distance.
        #[arg(long, default_value = "inf")]
        p: String,
        /// Cross-check against exhaustive enumeration of partial matchings.
        #[arg(long)]
        oracle: bool,
    },
    /// Embed a metric space into diagrams; writes one diagram per point.
    Embed {
        #[command(flatten)]
        source: SpaceSource,
        /// Separation constant; defaults to 1 + diameter.
        #[arg(long)]
        c: Option<f64>,
    },
    /// Negative-type supremum and per-q verdicts of a metric space.
    Certify {
        #[command(flatten)]
        source: SpaceSource,
        /// Upper end of the bisection interval.
        #[arg(long, default_value_t = dgmspace::negtype::DEFAULT_Q_MAX)]
        qmax: f64,
        /// Exponents to test individually.
        #[arg(long = "q", value_name = "Q")]
        qs: Vec<f64>,
    },
    /// Search the Gaussian kernel of the bottleneck distance for a
    /// non-positive-semidefinite Gram matrix.
    ProbeKernel {
        /// Directory of `.dgm` files.
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Otherwise: a space whose embedded images are probed.
        #[command(flatten)]
        source: SpaceSource,
        /// Eigenvalues below minus this count as witnesses.
        #[arg(long, default_value_t = 1e-8)]
        threshold: f64,
        #[arg(long, default_value_t = 1e-3)]
        t_min: f64,
        #[arg(long, default_value_t = 1e3)]
        t_max: f64,
        #[arg(long, default_value_t = 121)]
        t_count: usize,
    },
    /// Reproduction experiments printed as tables.
    Experiment {
        name: Experiment,
        /// roundness-decay: largest n.
        #[arg(long, default_value_t = 10)]
        max_n: usize,
        /// union-conditions: pairs as `n,m;n,m;...`.
        #[arg(long, default_value = "1,1;1,2;2,1;1,3;2,2;3,1")]
        pairs: String,
        /// envelope: grid sizes as `n,n,...`.
        #[arg(long, default_value = "4,8,16")]
        sizes: String,
        /// envelope: Gaussian kernel parameter.
        #[arg(long, default_value_t = 1.0)]
        t: f64,
    },
    /// Realize a diagram as degree-one persistent homology of a complex.
    Realize {
        diagram: PathBuf,
        /// Run persistence on the complex and compare with the input.
        #[arg(long)]
        verify: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    RoundnessDecay,
    UnionConditions,
    Envelope,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(output) => {
            print!("{output}");
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.code())
        }
    }
}
