use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use spectra_evolve::experiment::{self, ExperimentConfig, SEED_ENV};
use spectra_evolve::{io, spectral, Metric};

#[derive(Parser)]
#[command(name = "spectra-evolve", version, about = "Evolve graphs toward a target spectral density")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run replicated evolutions described by a key = value config file.
    Evolve {
        #[arg(long)]
        config: PathBuf,
        /// Worker threads for replicates; defaults to the hardware thread count.
        #[arg(long)]
        jobs: Option<usize>,
        /// Overrides `output_dir` from the config.
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Export a target graph and its density.
    Target {
        /// `star` or `circulant`.
        kind: String,
        n: usize,
        /// Circulant offsets: `1,2,3`, `1..4`, `third` or `quarter`.
        offsets: Option<String>,
        /// Output path prefix; defaults to `<kind>_<n>`.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: bool,
    },
    /// Structural metrics for edge-list files, optionally with diversity.
    Metrics {
        #[arg(required = true)]
        files: Vec<PathBuf>,
        #[arg(long)]
        diversity: bool,
        /// Comma-separated subset of ac,pl,cc,bc used for diversity.
        #[arg(long, default_value = "ac,pl,cc,bc")]
        metric_set: String,
        /// Directory for metrics.csv and diversity.csv.
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Print the spectral density of an edge-list file as CSV.
    Density { graph: PathBuf },
}

fn fail(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::FAILURE
}

fn cmd_evolve(config: PathBuf, jobs: Option<usize>, output_dir: Option<PathBuf>) -> ExitCode {
    let mut cfg = match ExperimentConfig::load(&config) {
        Ok(c) => c,
        Err(e) => return fail(format!("{}: {e}", config.display())),
    };
    if let Ok(seed) = std::env::var(SEED_ENV) {
        if let Err(e) = cfg.override_seed(&seed) {
            return fail(e);
        }
    }
    if let Some(dir) = output_dir {
        cfg.output_dir = dir;
    }
    if jobs == Some(0) {
        return fail("--jobs must be at least 1");
    }
    match experiment::run_experiment(&cfg, jobs) {
        Ok(outcome) if outcome.failures.is_empty() => {
            println!(
                "{} runs written to {}",
                outcome.records.len(),
                cfg.output_dir.display()
            );
            ExitCode::SUCCESS
        }
        Ok(outcome) => {
            for f in &outcome.failures {
                eprintln!("run {} (seed {}) failed: {}", f.run, f.seed, f.error);
            }
            fail(format!(
                "{} of {} runs failed; see {}",
                outcome.failures.len(),
                cfg.runs,
                cfg.output_dir.join("errors.json").display()
            ))
        }
        Err(e) => fail(e),
    }
}

fn cmd_target(kind: String, n: usize, offsets: Option<String>, out: Option<PathBuf>, svg: bool) -> ExitCode {
    let spec = match experiment::target_from_args(&kind, n, offsets.as_deref()) {
        Ok(s) => s,
        Err(e) => return fail(e),
    };
    let prefix = out.unwrap_or_else(|| PathBuf::from(format!("{kind}_{n}")));
    match experiment::export_target(&spec, &prefix, svg) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => fail(e),
    }
}

fn cmd_metrics(files: Vec<PathBuf>, diversity: bool, metric_set: String, out: PathBuf) -> ExitCode {
    let metrics: Vec<Metric> = match metric_set.split(',').map(Metric::parse).collect() {
        Ok(m) => m,
        Err(e) => return fail(e),
    };
    let table = match experiment::metrics_for_files(&files, diversity, &metrics) {
        Ok(t) => t,
        Err(e) => return fail(e),
    };
    let write = || -> spectra_evolve::Result<()> {
        std::fs::create_dir_all(&out)?;
        std::fs::write(out.join("metrics.csv"), &table.metrics_csv)?;
        if let Some(d) = &table.diversity_csv {
            std::fs::write(out.join("diversity.csv"), d)?;
        }
        Ok(())
    };
    if let Err(e) = write() {
        return fail(e);
    }
    if table.failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        for (id, msg) in &table.failures {
            eprintln!("{id}: {msg}");
        }
        fail(format!("{} input(s) could not be measured", table.failures.len()))
    }
}

fn cmd_density(graph: PathBuf) -> ExitCode {
    let result = io::load_edge_list(&graph)
        .and_then(|g| spectral::eigen_spectrum(&g))
        .map(|s| io::density_csv(&spectral::density(&s)));
    match result {
        Ok(csv) => {
            print!("{csv}");
            ExitCode::SUCCESS
        }
        Err(e) => fail(format!("{}: {e}", graph.display())),
    }
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Evolve { config, jobs, output_dir } => cmd_evolve(config, jobs, output_dir),
        Command::Target { kind, n, offsets, out, svg } => cmd_target(kind, n, offsets, out, svg),
        Command::Metrics { files, diversity, metric_set, out } => cmd_metrics(files, diversity, metric_set, out),
        Command::Density { graph } => cmd_density(graph),
    }
}
