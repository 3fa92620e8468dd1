//! `sff`: plan, benchmark and compare multi-goal planners from scenario files.

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use sff_core::bench::{
    generate_map, place_targets, run_experiment_with, run_seed, svg_document, svg_scene, welch_t_test,
    ExperimentOptions, Histogram, MapKind, Metric, PlannerKind, RunStats, Scenario, Verdict,
};
use sff_core::{Error, PlannerParams};

#[derive(Parser)]
#[command(name = "sff", version, about = "Space-filling forest multi-goal planner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Plan one seed of a scenario; write the forest as JSON and optionally SVG.
    Plan(PlanArgs),
    /// Run every seed of a scenario and write RunStats as JSON and/or CSV.
    Bench(BenchArgs),
    /// Welch t-test between two RunStats files.
    Compare(CompareArgs),
    /// Generate a map and targets and write a scenario file.
    Genmap(GenmapArgs),
}

/// Overrides for the scenario's planner parameters.
#[derive(Args, Clone, Default)]
struct ParamArgs {
    /// Expansion step length.
    #[arg(long)]
    l: Option<f64>,
    /// Connection radius between trees.
    #[arg(long)]
    d: Option<f64>,
    /// Rewiring neighbourhood size.
    #[arg(long)]
    k: Option<usize>,
    /// Probability of selecting a node from a target queue.
    #[arg(long)]
    pq: Option<f64>,
    /// Iteration limit.
    #[arg(long)]
    imax: Option<usize>,
    /// Collision check points per segment.
    #[arg(long = "check-points")]
    check_points: Option<usize>,
    /// Planner, e.g. SFF_STAR, NR_SFF_STAR, SIMPLE_SFF, MULTI_T_RRT, MULTI_T_RRT_BEST_OF:20, LAZY_TSP.
    #[arg(long)]
    planner: Option<String>,
}

impl ParamArgs {
    fn apply(&self, params: &mut PlannerParams) {
        if let Some(v) = self.l {
            params.l = v;
        }
        if let Some(v) = self.d {
            params.d = v;
        }
        if let Some(v) = self.k {
            params.k = v;
        }
        if let Some(v) = self.pq {
            params.p_q = v;
        }
        if let Some(v) = self.imax {
            params.i_max = v;
        }
        if let Some(v) = self.check_points {
            params.check_points = v;
        }
    }

    fn planner(&self) -> Result<Option<PlannerKind>, Failure> {
        self.planner.as_deref().map(str::parse).transpose().map_err(Failure::from)
    }

    /// Applies the overrides to a loaded scenario and revalidates it.
    fn override_scenario(&self, sc: &mut Scenario) -> Result<(), Failure> {
        self.apply(&mut sc.params);
        if let Some(p) = self.planner()? {
            sc.planner = p;
        }
        sc.validate().map_err(Failure::invalid)
    }
}

#[derive(Args)]
struct PlanArgs {
    scenario: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Seed to run. Defaults to the scenario's first seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Forest JSON output; stdout when omitted.
    #[arg(long, short)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    scenario: PathBuf,
    #[command(flatten)]
    params: ParamArgs,
    /// Replaces the scenario's seed list. Repeatable.
    #[arg(long)]
    seed: Vec<u64>,
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Histogram CSV of `--hist-metric`.
    #[arg(long)]
    hist: Option<PathBuf>,
    #[arg(long, default_value = "cumulative_cost")]
    hist_metric: String,
    #[arg(long, default_value_t = 20)]
    bins: usize,
    /// Record per-seed wall time (outputs are then no longer reproducible).
    #[arg(long)]
    timing: bool,
}

#[derive(Args)]
struct CompareArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long, default_value = "cumulative_cost")]
    metric: String,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Also write the report as JSON.
    #[arg(long)]
    json: Option<PathBuf>,
}

#[derive(Args)]
struct GenmapArgs {
    /// DENSE_GRID, V_DENSE or TRIANGLES.
    #[arg(long, default_value = "DENSE_GRID")]
    kind: String,
    #[arg(long, default_value_t = 1000.0)]
    size: f64,
    #[arg(long, default_value_t = 0.3)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    map_seed: u64,
    /// Number of targets.
    #[arg(long, short = 'n', default_value_t = 10)]
    targets: usize,
    /// Minimum distance between targets.
    #[arg(long, default_value_t = 100.0)]
    min_separation: f64,
    #[command(flatten)]
    params: ParamArgs,
    /// Seeds to list in the scenario. Repeatable; overrides `--seed-count`.
    #[arg(long)]
    seed: Vec<u64>,
    /// Lists seeds `0..N`.
    #[arg(long, default_value_t = 50)]
    seed_count: u64,
    #[arg(long, short)]
    out: Option<PathBuf>,
}

/// Error with the exit code it maps to.
enum Failure {
    Invalid(String),
    Planning(String),
    Other(String),
}

impl Failure {
    fn invalid(e: impl fmt::Display) -> Self {
        Failure::Invalid(e.to_string())
    }

    fn code(&self) -> u8 {
        match self {
            Failure::Invalid(_) => 2,
            Failure::Planning(_) => 3,
            Failure::Other(_) => 1,
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_invalid_input() {
            Failure::Invalid(e.to_string())
        } else {
            Failure::Other(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Other(e.to_string())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Invalid(m) => write!(f, "invalid scenario: {m}"),
            Failure::Planning(m) => write!(f, "planning failed: {m}"),
            Failure::Other(m) => f.write_str(m),
        }
    }
}

fn load_scenario(path: &Path) -> Result<Scenario, Failure> {
    Scenario::load(path).map_err(|e| Failure::Invalid(format!("{}: {e}", path.display())))
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_plan(args: PlanArgs) -> Result<(), Failure> {
    let mut sc = load_scenario(&args.scenario)?;
    args.params.override_scenario(&mut sc)?;
    let seed = args.seed.unwrap_or(sc.seeds[0]);
    let run = run_seed(&sc, seed, ExperimentOptions::default());
    if let Some(err) = &run.record.error {
        return Err(Failure::Planning(format!("seed {seed}: {err}")));
    }
    let outcome = run.outcome.as_ref().expect("successful run has an outcome");
    let planner = sc.planner.to_string();
    let forest = outcome.output().map(|o| o.to_record(&planner));
    let tour = run.tour.as_ref().map(|t| json!({ "sequence": t.sequence, "total_cost": t.total_cost }));
    let report = json!({
        "planner": planner,
        "seed": seed,
        "stats": run.record,
        "tour": tour,
        "tour_paths": run.tour_paths,
        "forest": forest,
    });
    let text = serde_json::to_string_pretty(&report).map_err(|e| Failure::Other(e.to_string()))? + "\n";
    write_or_print(args.out.as_deref(), &text)?;
    if let Some(svg) = &args.svg {
        let doc = match outcome.output() {
            Some(o) => svg_document(&sc.workspace, o, &run.tour_paths),
            None => svg_scene(&sc.workspace, &sc.targets, &[], &[], &run.tour_paths),
        };
        std::fs::write(svg, doc)?;
    }
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<(), Failure> {
    let mut sc = load_scenario(&args.scenario)?;
    if !args.seed.is_empty() {
        sc.seeds = args.seed.clone();
    }
    args.params.override_scenario(&mut sc)?;
    let metric: Metric = args.hist_metric.parse().map_err(Failure::invalid)?;
    let stats = run_experiment_with(&sc, ExperimentOptions { timing: args.timing })?;
    log::info!("{}: {} seeds, {} failed", stats.planner, stats.records.len(), stats.failures);
    if args.json.is_none() && args.csv.is_none() {
        println!("{}", stats.to_json());
    }
    if let Some(p) = &args.json {
        stats.write_json(p)?;
    }
    if let Some(p) = &args.csv {
        stats.write_csv(p)?;
    }
    if let Some(p) = &args.hist {
        let values = stats.values(metric);
        if values.is_empty() {
            log::warn!("no values for histogram");
        } else {
            std::fs::write(p, Histogram::new(&values, args.bins)?.to_csv()?)?;
        }
    }
    if stats.failures == stats.records.len() {
        return Err(Failure::Planning("every seed failed".into()));
    }
    Ok(())
}

fn cmd_compare(args: CompareArgs) -> Result<(), Failure> {
    let read = |p: &Path| RunStats::read(p).map_err(|e| Failure::Invalid(format!("{}: {e}", p.display())));
    let (a, b) = (read(&args.a)?, read(&args.b)?);
    let metric: Metric = args.metric.parse().map_err(Failure::invalid)?;
    let r = welch_t_test(&a.values(metric), &b.values(metric), args.alpha)?;
    let relation = match (r.verdict, r.mean_a < r.mean_b) {
        (Verdict::Same, _) => "no significant difference",
        (Verdict::Different, true) => "A lower than B",
        (Verdict::Different, false) => "A higher than B",
    };
    println!("metric     {}", args.metric);
    println!("A          {} (n={}) mean {:.6}", a.planner, a.values(metric).len(), r.mean_a);
    println!("B          {} (n={}) mean {:.6}", b.planner, b.values(metric).len(), r.mean_b);
    println!("t          {:.6}", r.t);
    println!("df         {:.3}", r.df);
    println!("p          {:.6e}", r.p_value);
    println!("verdict    {relation} at alpha {}", args.alpha);
    if let Some(p) = &args.json {
        let report = json!({
            "metric": args.metric,
            "alpha": args.alpha,
            "a": a.planner,
            "b": b.planner,
            "result": r,
        });
        std::fs::write(p, serde_json::to_string_pretty(&report).map_err(|e| Failure::Other(e.to_string()))? + "\n")?;
    }
    Ok(())
}

fn cmd_genmap(args: GenmapArgs) -> Result<(), Failure> {
    let kind: MapKind = args.kind.parse().map_err(Failure::invalid)?;
    let ws = generate_map(kind, args.size, args.density, args.map_seed)?;
    let targets = place_targets(&ws, args.targets, args.min_separation, args.map_seed)?;
    let mut params = PlannerParams::default();
    args.params.apply(&mut params);
    let planner = args.params.planner()?.unwrap_or(PlannerKind::SffStar);
    let seeds = if args.seed.is_empty() {
        (0..args.seed_count).collect()
    } else {
        args.seed.clone()
    };
    let sc = Scenario::new(ws, targets, params, planner, seeds);
    sc.validate().map_err(Failure::invalid)?;
    write_or_print(args.out.as_deref(), &(sc.to_json() + "\n"))
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Plan(a) => cmd_plan(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Compare(a) => cmd_compare(a),
        Command::Genmap(a) => cmd_genmap(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("sff: {f}");
            ExitCode::from(f.code())
        }
    }
}
