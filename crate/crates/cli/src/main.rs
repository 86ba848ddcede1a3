//! `sepgeom`: writes the distance tables, graphs, tensors, path scans and
//! section reports as JSON and CSV files.
//!
//! Exit codes: 0 on success, 2 when an argument or a scenario calibration
//! fails validation, 1 on any other error. Errors are also written to stderr
//! as a one-line JSON object.

mod commands;
mod config;
mod reference;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use sepgeom::{Convention, Error};

use config::RunConfig;

#[derive(Parser)]
#[command(name = "sepgeom", version, about = "Geometry of separable two- and three-qubit states")]
struct Cli {
    /// Output directory for artifacts.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "SEPGEOM_THREADS")]
    threads: Option<usize>,

    /// Metric normalization: bures (d^2 = 2 - 2F) or sd (four times larger).
    #[arg(long, global = true, default_value = "bures")]
    convention: Convention,

    /// Relative gap for clustering eigenvalues.
    #[arg(long, global = true, default_value_t = sepgeom::metrics::CLUSTER_TOL)]
    cluster_tol: f64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct BasisArgs {
    /// tetra16, tetra64 or pauli36.
    #[arg(long, default_value = "tetra16")]
    basis: String,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form volume and probability constants.
    Constants,
    /// Dump the members of a pure-product basis.
    Basis(BasisArgs),
    /// Distance classes and the graph of one class.
    Graph {
        #[command(flatten)]
        basis: BasisArgs,
        /// bures, hs, wy or trace-product.
        #[arg(long, default_value = "bures")]
        metric: String,
        /// 1-based class index (ascending by value) or the class value.
        #[arg(long, default_value = "1")]
        class: String,
    },
    /// Metric tensor in a chart.
    Tensor {
        /// weights, naive or generator.
        #[arg(long, default_value = "weights")]
        chart: String,
        /// Matrix dimension, 4 or 8.
        #[arg(long, default_value_t = 4)]
        dim: usize,
        /// `mixed` or comma-separated chart coordinates.
        #[arg(long, default_value = "mixed")]
        at: String,
    },
    /// Volume element and trace along the w1 path.
    Scan {
        #[arg(long, default_value_t = 129)]
        resolution: usize,
    },
    /// Leave-one-out and leave-two-out mixtures of the tetrahedral basis.
    Mixtures,
    /// Areas and volumes of a two-parameter section.
    Section {
        /// C, G, E or custom:a,b.
        #[arg(long, default_value = "C")]
        scenario: String,
        /// Element-grid resolution.
        #[arg(long, default_value_t = 128)]
        resolution: usize,
        /// Relative quadrature target.
        #[arg(long, default_value_t = sepgeom::sections::DEFAULT_TOL)]
        tol: f64,
    },
}

impl Cli {
    fn config(&self) -> RunConfig {
        let name = match &self.command {
            Command::Constants => "constants",
            Command::Basis(_) => "basis",
            Command::Graph { .. } => "graph",
            Command::Tensor { .. } => "tensor",
            Command::Scan { .. } => "scan",
            Command::Mixtures => "mixtures",
            Command::Section { .. } => "section",
        };
        let mut c = RunConfig::new(name, self.out.clone(), self.threads);
        c.convention = self.convention;
        c.cluster_tol = self.cluster_tol;
        match &self.command {
            Command::Constants | Command::Mixtures => {}
            Command::Basis(b) => c.basis = Some(b.basis.clone()),
            Command::Graph { basis, metric, class } => {
                c.basis = Some(basis.basis.clone());
                c.metric = Some(metric.clone());
                c.class = Some(class.clone());
            }
            Command::Tensor { chart, dim, at } => {
                c.chart = Some(chart.clone());
                c.dim = Some(*dim);
                c.at = Some(at.clone());
            }
            Command::Scan { resolution } => c.resolution = Some(*resolution),
            Command::Section { scenario, resolution, tol } => {
                c.scenario = Some(scenario.clone());
                c.resolution = Some(*resolution);
                c.tol = Some(*tol);
            }
        }
        c
    }
}

#[derive(Serialize)]
struct ErrorReport<'a> {
    error: &'a str,
    message: String,
    exit_code: u8,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CalibrationMismatch(_)
        | Error::InvalidArgument(_)
        | Error::UnknownClass(_)
        | Error::DimensionMismatch { .. }
        | Error::OutsideChartDomain(_) => 2,
        _ => 1,
    }
}

fn configure_threads(threads: Option<usize>) -> sepgeom::Result<()> {
    #[cfg(feature = "parallel")]
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    if threads.is_some_and(|n| n > 1) {
        log::warn!("built without the parallel feature; --threads ignored");
    }
    Ok(())
}

fn run(cli: &Cli) -> sepgeom::Result<Vec<PathBuf>> {
    let cfg = cli.config();
    cfg.validate()?;
    configure_threads(cfg.threads)?;
    config::ensure_dir(&cfg.out)?;
    match &cli.command {
        Command::Constants => commands::constants(&cfg),
        Command::Basis(_) => commands::basis(&cfg),
        Command::Graph { .. } => commands::graph(&cfg),
        Command::Tensor { .. } => commands::tensor(&cfg),
        Command::Scan { .. } => commands::scan(&cfg),
        Command::Mixtures => commands::mixtures(&cfg),
        Command::Section { .. } => commands::section(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            let code = exit_code(&e);
            let report = ErrorReport {
                error: e.kind(),
                message: e.to_string(),
                exit_code: code,
            };
            eprintln!("{}", serde_json::to_string(&report).expect("error report serializes"));
            ExitCode::from(code)
        }
    }
}
