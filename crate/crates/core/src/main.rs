use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use cointerest::report::{self, GammaMode, OutputFormat, PipelineError, RunConfig, View};

#[derive(Parser)]
#[command(name = "cointerest", version, about = "Co-interest graph clustering and centrality")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Node, edge and density figures of the co-interest graph.
    Stats(Common),
    /// Louvain clusters, one line per cluster.
    Cluster(Common),
    /// Top-k eigenvector centrality ranking.
    Centrality(Common),
    /// The clustered graph as DOT, GraphML or JSON.
    Export(Common),
    /// Everything: stats, clusters, ranking and the graph.
    Report(Common),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
    Dot,
    Graphml,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Text => OutputFormat::Text,
            Format::Json => OutputFormat::Json,
            Format::Csv => OutputFormat::Csv,
            Format::Dot => OutputFormat::Dot,
            Format::Graphml => OutputFormat::GraphMl,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Records file: CSV with header `country,topic,frequency`, or a JSON array.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fixed resolution.
    #[arg(long, conflicts_with = "auto_gamma")]
    gamma: Option<f64>,
    /// Search for the smallest resolution giving at least --min-clusters clusters.
    #[arg(long)]
    auto_gamma: bool,
    #[arg(long, default_value_t = 10, requires = "auto_gamma")]
    min_clusters: usize,
    #[arg(long, default_value_t = 0.0, requires = "auto_gamma")]
    gamma_lo: f64,
    #[arg(long, default_value_t = 8.0, requires = "auto_gamma")]
    gamma_hi: f64,
    #[arg(long, default_value_t = 1e-9, requires = "auto_gamma")]
    precision: f64,
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

impl Common {
    fn run_config(&self, default_format: OutputFormat) -> RunConfig {
        let gamma_mode = if self.auto_gamma {
            GammaMode::Auto {
                min_clusters: self.min_clusters,
                lo: self.gamma_lo,
                hi: self.gamma_hi,
                precision: self.precision,
            }
        } else {
            GammaMode::Fixed(self.gamma.unwrap_or(1.0))
        };
        RunConfig {
            input_path: self.input.clone(),
            seed: self.seed,
            gamma_mode,
            top_k: self.top_k,
            output_format: self.format.map_or(default_format, Into::into),
            output_path: self.output.clone(),
        }
    }
}

fn execute(view: View, config: &RunConfig) -> Result<i32, PipelineError> {
    let bundle = report::run_pipeline(config, view)?;
    for warning in &bundle.warnings {
        eprintln!("warning: {warning}");
    }
    let text = report::render(&bundle, view, config.output_format)?;
    report::write_output(config.output_path.as_deref(), &text)?;
    Ok(bundle.exit_code())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (view, common, default_format) = match &cli.command {
        Command::Stats(c) => (View::Stats, c, OutputFormat::Text),
        Command::Cluster(c) => (View::Clusters, c, OutputFormat::Text),
        Command::Centrality(c) => (View::Centrality, c, OutputFormat::Text),
        Command::Export(c) => (View::Graph, c, OutputFormat::Dot),
        Command::Report(c) => (View::Report, c, OutputFormat::Json),
    };
    let config = common.run_config(default_format);
    let code = match execute(view, &config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
