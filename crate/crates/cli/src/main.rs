//! Batch front-end: run configurations in, CSV/JSON artifacts out.
//!
//! Every run writes a `summary.json` with the computed scalars and pass/fail
//! flags; identical configurations produce byte-identical artifacts. Solver
//! failures leave their diagnostics in the summary and exit nonzero.

mod output;
mod problem;
mod runs;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "concentra",
    about = "Bubble profiles, reduced singular equations and residual scaling studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct GridArgs {
    /// Radial node count M.
    #[arg(long, default_value_t = 2048)]
    radial_m: usize,
    /// Grading exponent of the radial grid.
    #[arg(long, default_value_t = 2.0)]
    grading: f64,
    /// Outer radius; construct/scaling use eta/sqrt(eps) instead.
    #[arg(long, default_value_t = 30.0)]
    r_out: f64,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Output directory for the artifacts.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Projection constants and ratio identities per dimension.
    Constants {
        #[command(flatten)]
        common: CommonArgs,
        /// Comma-separated list of transverse dimensions.
        #[arg(long, default_value = "7,8,9,10", value_delimiter = ',')]
        n_dims: Vec<usize>,
    },
    /// Bubble and kernel radial profiles.
    Profile {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 7)]
        n_dim: usize,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Positive eigenpair of the linearized bubble operator.
    Eigenpair {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value_t = 7)]
        n_dim: usize,
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Solve the attractive singular equation on K.
    AttractiveSolve {
        #[command(flatten)]
        common: CommonArgs,
        /// Problem file: geometry plus alpha/beta field specs.
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Solve the repulsive singular equation on K.
    RepulsiveSolve {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
    },
    /// Normal-bundle nondegeneracy and minimality checks.
    Jacobi {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        geometry: PathBuf,
        /// Overall sign convention for the geometric potential.
        #[arg(long, default_value = "positive")]
        omega_sign: String,
    },
    /// Build the approximate solution at one eps and emit fields + residuals.
    Construct {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        geometry: PathBuf,
        /// sub (attractive reduced problem) or super (repulsive).
        #[arg(long, default_value = "sub")]
        sign: String,
        #[arg(long, default_value_t = 1e-2)]
        eps: f64,
        #[arg(long, default_value_t = 2048)]
        radial_m: usize,
        #[arg(long, default_value_t = 2.0)]
        grading: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value = "positive")]
        omega_sign: String,
    },
    /// Residual norms across an eps list with a fitted log-log slope.
    Scaling {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        geometry: PathBuf,
        #[arg(long, default_value = "sub")]
        sign: String,
        /// v0, v1 or both.
        #[arg(long, default_value = "both")]
        version: String,
        #[arg(long, default_value = "1e-2,5e-3,2e-3,1e-3", value_delimiter = ',')]
        eps_list: Vec<f64>,
        #[arg(long, default_value_t = 2048)]
        radial_m: usize,
        #[arg(long, default_value_t = 2.0)]
        grading: f64,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value = "positive")]
        omega_sign: String,
        /// Also run the second-stage correction and report its slope.
        #[arg(long, default_value_t = false)]
        extended: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Constants { common, n_dims } => runs::constants(&common.out_dir, &n_dims),
        Command::Profile {
            common,
            n_dim,
            grid,
        } => runs::profile(&common.out_dir, n_dim, &grid),
        Command::Eigenpair {
            common,
            n_dim,
            grid,
        } => runs::eigenpair(&common.out_dir, n_dim, &grid),
        Command::AttractiveSolve {
            common,
            problem,
            tol,
        } => runs::singular_solve(&common.out_dir, &problem, tol, true),
        Command::RepulsiveSolve {
            common,
            problem,
            tol,
        } => runs::singular_solve(&common.out_dir, &problem, tol, false),
        Command::Jacobi {
            common,
            geometry,
            omega_sign,
        } => runs::jacobi(&common.out_dir, &geometry, &omega_sign),
        Command::Construct {
            common,
            geometry,
            sign,
            eps,
            radial_m,
            grading,
            eta,
            omega_sign,
        } => runs::construct(
            &common.out_dir,
            &geometry,
            &sign,
            eps,
            radial_m,
            grading,
            eta,
            &omega_sign,
        ),
        Command::Scaling {
            common,
            geometry,
            sign,
            version,
            eps_list,
            radial_m,
            grading,
            eta,
            omega_sign,
            extended,
        } => runs::scaling(
            &common.out_dir,
            &geometry,
            &sign,
            &version,
            &eps_list,
            radial_m,
            grading,
            eta,
            &omega_sign,
            extended,
        ),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
