use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use log::info;
use mmloco_core::planner::{plan_on_graph, CostModel, Discretization, MissionPlan, PlanOutcome, RoadmapGraph};
use mmloco_core::rng::RNG_ALGORITHM;
use mmloco_core::sim::calibrate::walk_rollout;
use mmloco_core::sim::{
    calibrate, run_mission, write_governor_csv, write_trajectory_csv, LedgerReport, MissionLog, MissionResult,
};

use crate::args::{CalibrateArgs, RunArgs, SimulateArgs};
use crate::config::{param_hash, PlannerConfig, ScenarioFile};
use crate::error::CliError;
use crate::report::*;

/// Default steady trot window for calibration, m.
pub const CALIBRATION_WINDOW: f64 = 8.0;

pub const PLAN_FILE: &str = "plan.json";
pub const ROADMAP_FILE: &str = "roadmap.json";
pub const REPORT_FILE: &str = "report.json";
pub const COMPARE_FILE: &str = "compare.json";
pub const LEDGER_FILE: &str = "ledger.json";
pub const TRAJECTORY_FILE: &str = "trajectory.csv";
pub const GOVERNOR_FILE: &str = "governor.csv";
pub const COST_MODEL_FILE: &str = "cost_model.json";
pub const TIMING_FILE: &str = "timing.json";

/// Resolved inputs of one run.
pub struct Context {
    pub file: ScenarioFile,
    pub planner: PlannerConfig,
    pub model: CostModel,
    pub model_source: String,
    pub hash: String,
    pub timing: Timing,
}

impl Context {
    pub fn new(args: &RunArgs) -> Result<Self, CliError> {
        let file = ScenarioFile::load(&args.scenario)?;
        let planner = PlannerConfig { seed: args.seed.unwrap_or(file.planner.seed), ..file.planner };
        if let Some(g) = args.grid {
            if g.is_nan() || g <= 0.0 {
                return Err(CliError::Input(format!("grid spacing must be positive, got {g}")));
            }
        }
        let mut timing = Timing::default();
        let (model, model_source) = match (&args.cost_model, &file.cost_model) {
            (Some(path), _) => (load_cost_model(path)?, path.display().to_string()),
            (None, Some(m)) => (*m, "scenario".to_string()),
            (None, None) => {
                info!("calibrating cost model");
                let (m, _) = timing.time("calibrate_s", || {
                    calibrate(&file.robot(), &file.ground(), &file.sim(), &CostModel::nominal(), CALIBRATION_WINDOW)
                })?;
                (m, "calibrated".to_string())
            }
        };
        let hash = param_hash(
            &file.scenario,
            &planner,
            &model,
            &file.sim(),
            &file.robot(),
            &file.ground(),
            args.hi_fi_edges,
            args.grid,
        );
        Ok(Self { file, planner, model, model_source, hash, timing })
    }

    fn report(&self, command: &str) -> RunReport {
        RunReport {
            command: command.to_string(),
            scenario: self.file.scenario.name.clone(),
            seed: self.planner.seed,
            param_hash: self.hash.clone(),
            rng: RNG_ALGORITHM.to_string(),
            cost_model: CostModelSource { source: self.model_source.clone(), model: self.model },
            roadmap: None,
            plan: None,
            comparison: None,
            mission: None,
        }
    }

    fn build(&mut self, d: &Discretization, key: &str) -> Result<RoadmapGraph, CliError> {
        let env = &self.file.scenario.env;
        Ok(self.timing.time(key, || d.build(env))?)
    }

    fn search(&mut self, graph: RoadmapGraph, d: &Discretization, hi_fi: bool, key: &str) -> Result<PlanOutcome, CliError> {
        let (robot, ground, sim) = (self.file.robot(), self.file.ground(), self.file.sim());
        let rollout = move |len: f64| walk_rollout(&robot, &ground, &sim, len).map(|(e, _)| e).unwrap_or(f64::INFINITY);
        let rollout: Option<&(dyn Fn(f64) -> f64 + Sync)> = if hi_fi { Some(&rollout) } else { None };
        let s = &self.file.scenario;
        let model = self.model;
        Ok(self.timing.time(key, || plan_on_graph(graph, &s.env, s.start, s.goal, d.endpoint_radius(), &model, rollout))?)
    }
}

pub fn load_cost_model(path: &Path) -> Result<CostModel, CliError> {
    let value: serde_json::Value = read_json(path)?;
    // calibrate output, run report, or a bare model
    let inner = value.get("cost_model").map(|m| m.get("model").unwrap_or(m)).unwrap_or(&value);
    let model: CostModel = serde_json::from_value(inner.clone())?;
    model.validate()?;
    Ok(model)
}

fn discretization_name(d: &Discretization) -> String {
    match d {
        Discretization::Prm(c) => format!("mm-prm R={} N_w={} N_f={}", c.radius, c.n_walk, c.n_fly),
        Discretization::Grid(s) => format!("grid {s} m"),
    }
}

fn finish(out: &Path, report: &RunReport, timing: &Timing) -> Result<(), CliError> {
    write_json(&out.join(REPORT_FILE), report)?;
    write_json(&out.join(TIMING_FILE), timing)
}

fn plan_into(ctx: &mut Context, args: &RunArgs, report: &mut RunReport) -> Result<MissionPlan, CliError> {
    let d = match args.grid {
        Some(g) => Discretization::Grid(g),
        None => ctx.planner.prm(),
    };
    info!("building {}", discretization_name(&d));
    let graph = ctx.build(&d, "roadmap_build_s")?;
    report.roadmap = Some(RoadmapStats::of(&graph, discretization_name(&d)));
    let out = match ctx.search(graph, &d, args.hi_fi_edges, "search_s") {
        Ok(o) => o,
        Err(e) => {
            finish(&args.out, report, &ctx.timing)?;
            return Err(e);
        }
    };
    report.roadmap = Some(RoadmapStats::of(&out.graph, discretization_name(&d)));
    report.plan = Some(PlanSummary::of(&out.plan, out.flight_only));
    write_json(&args.out.join(PLAN_FILE), &out.plan)?;
    write_json(&args.out.join(ROADMAP_FILE), &out.graph.export(&out.costs))?;
    info!("plan: {:.1} J, {} transitions", out.plan.total_energy, out.plan.n_transitions);
    Ok(out.plan)
}

pub fn plan(args: &RunArgs) -> Result<RunReport, CliError> {
    std::fs::create_dir_all(&args.out)?;
    let mut ctx = Context::new(args)?;
    let mut report = ctx.report("plan");
    plan_into(&mut ctx, args, &mut report)?;
    finish(&args.out, &report, &ctx.timing)?;
    Ok(report)
}

pub fn compare(args: &RunArgs) -> Result<RunReport, CliError> {
    std::fs::create_dir_all(&args.out)?;
    let mut ctx = Context::new(args)?;
    let mut report = ctx.report("compare");
    let prm = ctx.planner.prm();
    let grid = Discretization::Grid(args.grid.unwrap_or(ctx.planner.grid_spacing));
    let mut results = Vec::new();
    for (d, key) in [(prm, "prm"), (grid, "grid")] {
        let graph = ctx.build(&d, &format!("{key}_build_s"))?;
        let stats = RoadmapStats::of(&graph, discretization_name(&d));
        info!("{}: {} nodes, {} edges", stats.discretization, stats.nodes, stats.edges);
        let r = match ctx.search(graph, &d, args.hi_fi_edges, &format!("{key}_search_s")) {
            Ok(o) => DiscretizationResult { roadmap: stats, plan: Some(PlanSummary::of(&o.plan, o.flight_only)) },
            Err(CliError::Unreachable) => DiscretizationResult { roadmap: stats, plan: None },
            Err(e) => return Err(e),
        };
        results.push(r);
    }
    let grid = results.pop().expect("two results");
    let prm = results.pop().expect("two results");
    let cost = |r: &DiscretizationResult| r.plan.as_ref().map(|p| p.total_energy);
    let comparison = Comparison {
        node_ratio: prm.roadmap.nodes as f64 / grid.roadmap.nodes as f64,
        edge_ratio: prm.roadmap.edges as f64 / grid.roadmap.edges.max(1) as f64,
        cost_ratio: cost(&prm).zip(cost(&grid)).map(|(a, b)| a / b),
        prm,
        grid,
    };
    report.comparison = Some(comparison);
    write_json(&args.out.join(COMPARE_FILE), &report)?;
    write_json(&args.out.join(TIMING_FILE), &ctx.timing)?;
    Ok(report)
}

fn mission_summary(log: &MissionLog) -> MissionSummary {
    let planned = log.planned_total();
    let realized = log.realized_total();
    MissionSummary {
        result: log.result.clone(),
        n_transformations: log.n_transformations,
        final_error_m: Some(log.final_error),
        planned_total: planned,
        realized_total: Some(realized),
        energy_ratio: (planned > 0.0).then(|| realized / planned),
        duration_s: Some(log.duration),
    }
}

pub fn simulate(args: &SimulateArgs) -> Result<RunReport, CliError> {
    let run = &args.run;
    std::fs::create_dir_all(&run.out)?;
    let mut ctx = Context::new(run)?;
    let mut report = ctx.report("simulate");
    let plan = match &args.plan {
        Some(path) => read_json::<MissionPlan>(path)?,
        None => plan_into(&mut ctx, run, &mut report)?,
    };
    let f = &ctx.file;
    let (robot, ground, sim) = (f.robot(), f.ground(), f.sim());
    info!("simulating {} waypoints", plan.waypoints.len());
    let env = &f.scenario.env;
    let outcome = ctx.timing.time("simulate_s", || run_mission(&plan, env, &robot, &ground, &sim));
    let log = match outcome {
        Ok(log) => log,
        Err(mmloco_core::SimError::MissionFailure { waypoint, reason }) => {
            report.mission = Some(MissionSummary {
                result: MissionResult::Failed { waypoint, reason: reason.clone() },
                n_transformations: 0,
                final_error_m: None,
                planned_total: plan.total_energy,
                realized_total: None,
                energy_ratio: None,
                duration_s: None,
            });
            finish(&run.out, &report, &ctx.timing)?;
            return Err(CliError::MissionFailed { waypoint, reason });
        }
        Err(e) => return Err(e.into()),
    };
    write_trajectory_csv(&log.rows, BufWriter::new(File::create(run.out.join(TRAJECTORY_FILE))?))?;
    write_governor_csv(&log.governor_trace, BufWriter::new(File::create(run.out.join(GOVERNOR_FILE))?))?;
    write_json(&run.out.join(LEDGER_FILE), &LedgerReport::from_log(&log))?;
    report.mission = Some(mission_summary(&log));
    finish(&run.out, &report, &ctx.timing)?;
    match log.result {
        MissionResult::Completed => Ok(report),
        MissionResult::Failed { waypoint, reason } => Err(CliError::MissionFailed { waypoint, reason }),
    }
}

pub fn calibrate_cmd(args: &CalibrateArgs) -> Result<CalibrationFile, CliError> {
    std::fs::create_dir_all(&args.out)?;
    if args.window.is_nan() || args.window <= 0.0 {
        return Err(CliError::Input(format!("calibration window must be positive, got {}", args.window)));
    }
    let file = match &args.scenario {
        Some(s) => ScenarioFile::load(s)?,
        None => ScenarioFile::load("env_a")?,
    };
    let (robot, ground, sim) = (file.robot(), file.ground(), file.sim());
    let mut timing = Timing::default();
    let (model, cal) = timing.time("calibrate_s", || calibrate(&robot, &ground, &sim, &CostModel::nominal(), args.window))?;
    let seed = args.seed.unwrap_or(file.planner.seed);
    let planner = PlannerConfig { seed, ..file.planner };
    let hash = param_hash(&file.scenario, &planner, &model, &sim, &robot, &ground, false, None);
    let out = CalibrationFile {
        cost_model: model,
        calibration: cal,
        provenance: Provenance {
            seed,
            param_hash: hash,
            dt_s: sim.dt,
            walk_window_m: args.window,
            walk_duration_s: cal.walk_duration,
            transform_duration_s: sim.transform_duration,
        },
    };
    write_json(&args.out.join(COST_MODEL_FILE), &out)?;
    write_json(&args.out.join(TIMING_FILE), &timing)?;
    info!("c_walk_per_m = {:.2} J/m, C_t = {:.2} J", model.c_walk_per_m, model.c_t);
    Ok(out)
}
