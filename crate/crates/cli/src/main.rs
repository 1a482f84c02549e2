mod commands;
mod error;
mod formats;
mod manifest;

use clap::{Parser, Subcommand};

use commands::{
    benchmark::BenchmarkArgs, classify::ClassifyArgs, estimate::EstimateArgs,
    evaluate::EvaluateArgs, portfolio::PortfolioArgs, refit::RefitArgs, scores::ScoresArgs,
    simulate::SimulateArgs,
};

/// Sparse precision matrix estimation for Gaussian graphical models:
/// nodewise penalized regressions over a block partition, covariance
/// thresholding of the innovated data matrix, and downstream applications.
#[derive(Parser)]
#[command(name = "isee", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a ground-truth precision matrix and Gaussian sample
    Simulate(SimulateArgs),
    /// Estimate a sparse precision matrix from a data CSV
    Estimate(EstimateArgs),
    /// Compare an estimate against a known truth
    Evaluate(EvaluateArgs),
    /// Run a simulation grid and aggregate recovery metrics
    Benchmark(BenchmarkArgs),
    /// Re-estimate entries column by column on a given support
    Refit(RefitArgs),
    /// Two-class linear discriminant classification
    Classify(ClassifyArgs),
    /// Mean-variance portfolio weights from a precision estimate
    Portfolio(PortfolioArgs),
    /// Innovated regression scores for a response vector
    Scores(ScoresArgs),
}

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Estimate(args) => commands::estimate::run(args),
        Command::Evaluate(args) => commands::evaluate::run(args),
        Command::Benchmark(args) => commands::benchmark::run(args),
        Command::Refit(args) => commands::refit::run(args),
        Command::Classify(args) => commands::classify::run(args),
        Command::Portfolio(args) => commands::portfolio::run(args),
        Command::Scores(args) => commands::scores::run(args),
    };
    if let Err(e) = result {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}
