use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "mmloco", version, about = "Energy-aware walk/fly mission planning and simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a roadmap and plan the cheapest mission.
    Plan(RunArgs),
    /// Execute a plan in the reduced-order simulator.
    Simulate(SimulateArgs),
    /// Plan on the sampled roadmap and on a uniform grid side by side.
    Compare(RunArgs),
    /// Fit the walking rate and transformation cost by simulation.
    Calibrate(CalibrateArgs),
}

#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Scenario JSON file or bundled name (env_a, env_b, env_c).
    #[arg(long)]
    pub scenario: String,
    /// Overrides the scenario seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Price walk edges with per-edge simulator rollouts.
    #[arg(long)]
    pub hi_fi_edges: bool,
    /// Plan on a uniform grid with this spacing (m); for `compare`, the
    /// grid spacing to compare against.
    #[arg(long)]
    pub grid: Option<f64>,
    /// Cost model JSON (a `calibrate` output or a bare model). Calibrated
    /// in-process when absent from both the flag and the scenario.
    #[arg(long)]
    pub cost_model: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub run: RunArgs,
    /// Plan JSON to execute; planned first when omitted.
    #[arg(long)]
    pub plan: Option<PathBuf>,
}

#[derive(Clone, Debug, Args)]
pub struct CalibrateArgs {
    /// Scenario supplying robot, ground and simulation overrides.
    #[arg(long)]
    pub scenario: Option<String>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Steady trot window, m.
    #[arg(long, default_value_t = crate::commands::CALIBRATION_WINDOW)]
    pub window: f64,
}
