use std::time::Instant;

use rayon::prelude::*;

use crate::baselines::{lazy_tsp, mix_seed, multi_t_rrt, LazySolver, LazyTspResult, MergeForest};
use crate::bench::scenario::{PlannerKind, Scenario};
use crate::bench::stats::{RunStats, SeedRecord};
use crate::error::{Error, Result};
use crate::forest::{plan, Forest};
use crate::geometry::Configuration;
use crate::output::PlannerOutput;
use crate::roadmap::{all_target_distances, build_graph, cumulative_cost, extract_path};
use crate::tsp::{solve_tour, Tour};

/// Planner result kept for inspection and rendering.
#[derive(Clone, Debug)]
pub enum PlanOutcome {
    Forest(Forest),
    Merge(MergeForest),
    /// The sub-run with the cheapest tour.
    BestOf { best: MergeForest, runs: usize },
    Lazy(LazyTspResult),
}

impl PlanOutcome {
    /// Tree-based output, if the planner produced one.
    pub fn output(&self) -> Option<&dyn PlannerOutput> {
        match self {
            PlanOutcome::Forest(f) => Some(f),
            PlanOutcome::Merge(m) | PlanOutcome::BestOf { best: m, .. } => Some(m),
            PlanOutcome::Lazy(_) => None,
        }
    }
}

/// Everything produced for one seed.
#[derive(Clone, Debug)]
pub struct SeedRun {
    pub record: SeedRecord,
    pub outcome: Option<PlanOutcome>,
    pub tour: Option<Tour>,
    /// One configuration path per consecutive tour pair, closing pair last.
    pub tour_paths: Vec<Vec<Configuration>>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExperimentOptions {
    /// Record wall-clock time per seed. Off by default because it makes
    /// outputs differ between runs.
    pub timing: bool,
}

struct Evaluated {
    tour: Tour,
    cumulative: f64,
    paths: Vec<Vec<Configuration>>,
}

/// Roadmap, all-target distances and the optimal tour of a tree-based result.
fn evaluate<P: PlannerOutput + ?Sized>(out: &P) -> Result<Evaluated> {
    let g = build_graph(out);
    let m = all_target_distances(&g);
    let cumulative = cumulative_cost(m.costs()).map_err(|_| {
        Error::NoPlannableTour(format!(
            "targets not connected after {} iterations",
            out.iterations_used()
        ))
    })?;
    let tour = solve_tour(m.costs())?;
    let seq = &tour.sequence;
    let paths = if seq.len() < 2 {
        Vec::new()
    } else {
        (0..seq.len())
            .map(|i| extract_path(&g, &m, seq[i], seq[(i + 1) % seq.len()]))
            .collect::<Result<_>>()?
    };
    Ok(Evaluated { tour, cumulative, paths })
}

fn forest_iterations<P: PlannerOutput + ?Sized>(out: &P) -> usize {
    out.connected_at().unwrap_or(out.iterations_used())
}

fn run_planner(sc: &Scenario, seed: u64) -> Result<(SeedRecord, PlanOutcome, Tour, Vec<Vec<Configuration>>)> {
    let params = sc.params_for(seed);
    let ws = &sc.workspace;
    let targets = &sc.targets;
    let record = |tour: &Tour, cumulative: Option<f64>, iterations: usize, checks: u64| SeedRecord {
        seed,
        tsp_cost: Some(tour.total_cost),
        cumulative_cost: cumulative,
        iterations,
        cd_point_checks: checks,
        wall_time: None,
        error: None,
    };
    match sc.planner {
        PlannerKind::SffStar | PlannerKind::NrSffStar | PlannerKind::SimpleSff => {
            let f = plan(ws, targets, params)?;
            let e = evaluate(&f)?;
            let r = record(&e.tour, Some(e.cumulative), forest_iterations(&f), f.total_point_checks());
            Ok((r, PlanOutcome::Forest(f), e.tour, e.paths))
        }
        PlannerKind::MultiTRrt => {
            let m = multi_t_rrt(ws, targets, params)?;
            let e = evaluate(&m)?;
            let r = record(&e.tour, Some(e.cumulative), m.iterations_used(), m.total_point_checks());
            Ok((r, PlanOutcome::Merge(m), e.tour, e.paths))
        }
        PlannerKind::MultiTRrtBestOf(count) => {
            let mut best: Option<(Evaluated, MergeForest)> = None;
            let mut best_cumulative = f64::INFINITY;
            let (mut iterations, mut checks) = (0, 0);
            let mut last_error = None;
            for j in 0..count {
                let sub = if j == 0 { seed } else { mix_seed(seed, j as u64) };
                let m = multi_t_rrt(ws, targets, params.clone().with_seed(sub))?;
                iterations += m.iterations_used();
                checks += m.total_point_checks();
                match evaluate(&m) {
                    Ok(e) => {
                        best_cumulative = best_cumulative.min(e.cumulative);
                        if best.as_ref().is_none_or(|(b, _)| e.tour.total_cost < b.tour.total_cost) {
                            best = Some((e, m));
                        }
                    }
                    Err(err) => last_error = Some(err),
                }
            }
            let Some((e, m)) = best else {
                return Err(last_error.expect("at least one sub-run"));
            };
            let r = record(&e.tour, Some(best_cumulative), iterations, checks);
            Ok((r, PlanOutcome::BestOf { best: m, runs: count }, e.tour, e.paths))
        }
        PlannerKind::LazyTsp => {
            let lazy = lazy_tsp(ws, targets, &params, LazySolver::Auto)?;
            let seq = &lazy.tour.sequence;
            let paths = (0..seq.len())
                .map(|i| lazy.path(seq[i], seq[(i + 1) % seq.len()]).expect("tour edges are planned"))
                .collect();
            let r = record(&lazy.tour, None, lazy.total_iterations, lazy.point_checks);
            let tour = lazy.tour.clone();
            Ok((r, PlanOutcome::Lazy(lazy), tour, paths))
        }
    }
}

/// Plans and evaluates one seed. Failures are captured in the record.
pub fn run_seed(sc: &Scenario, seed: u64, opts: ExperimentOptions) -> SeedRun {
    let start = Instant::now();
    let result = run_planner(sc, seed);
    let elapsed = start.elapsed().as_secs_f64();
    match result {
        Ok((mut record, outcome, tour, tour_paths)) => {
            record.wall_time = opts.timing.then_some(elapsed);
            SeedRun {
                record,
                outcome: Some(outcome),
                tour: Some(tour),
                tour_paths,
            }
        }
        Err(e) => {
            log::warn!("seed {seed} failed: {e}");
            let mut record = SeedRecord::failed(seed, e.to_string());
            record.wall_time = opts.timing.then_some(elapsed);
            SeedRun {
                record,
                outcome: None,
                tour: None,
                tour_paths: Vec::new(),
            }
        }
    }
}

/// Runs every seed of the scenario (in parallel) and collects the records in
/// seed-list order.
pub fn run_experiment(sc: &Scenario) -> Result<RunStats> {
    run_experiment_with(sc, ExperimentOptions::default())
}

pub fn run_experiment_with(sc: &Scenario, opts: ExperimentOptions) -> Result<RunStats> {
    let runs = run_seeds(sc, opts)?;
    Ok(stats_of(sc, runs.into_iter().map(|r| r.record).collect()))
}

/// Like [`run_experiment_with`] but keeps the full per-seed results.
pub fn run_seeds(sc: &Scenario, opts: ExperimentOptions) -> Result<Vec<SeedRun>> {
    sc.validate()?;
    Ok(sc.seeds.par_iter().map(|&s| run_seed(sc, s, opts)).collect())
}

pub fn stats_of(sc: &Scenario, records: Vec<SeedRecord>) -> RunStats {
    RunStats::from_records(sc.planner.to_string(), sc.targets.len(), records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bench::mapgen::{generate_map, place_targets, MapKind};
    use crate::forest::PlannerParams;
    use crate::geometry::{Rect, Workspace};

    fn scenario(planner: PlannerKind, n: usize) -> Scenario {
        let ws = generate_map(MapKind::DenseGrid, 500.0, 0.25, 1).unwrap();
        let targets = place_targets(&ws, n, 60.0, 2).unwrap();
        let params = PlannerParams {
            i_max: 30_000,
            ..PlannerParams::default()
        };
        Scenario::new(ws, targets, params, planner, vec![1, 2, 3])
    }

    #[test]
    fn single_target_is_trivial() {
        let ws = Workspace::empty(Rect::square(100.0), 1.0).unwrap();
        let params = PlannerParams {
            i_max: 50,
            ..PlannerParams::default()
        };
        let sc = Scenario::new(ws, vec![Configuration::new(50.0, 50.0)], params, PlannerKind::SffStar, vec![9]);
        let stats = run_experiment(&sc).unwrap();
        assert_eq!(stats.records.len(), 1);
        assert_eq!(stats.records[0].tsp_cost, Some(0.0));
        assert_eq!(stats.records[0].cumulative_cost, Some(0.0));
        assert_eq!(stats.failures, 0);
    }

    #[test]
    fn experiments_are_deterministic() {
        for kind in [PlannerKind::SffStar, PlannerKind::MultiTRrt, PlannerKind::LazyTsp] {
            let sc = scenario(kind, 4);
            let a = run_experiment(&sc).unwrap();
            let b = run_experiment(&sc).unwrap();
            assert_eq!(a.to_json(), b.to_json());
            assert_eq!(a.to_csv().unwrap(), b.to_csv().unwrap());
            assert_eq!(a.failures, 0, "{kind}: {:?}", a.records);
            assert!(a.aggregates_consistent(1e-9));
        }
    }

    #[test]
    fn tour_paths_follow_the_tour() {
        let sc = scenario(PlannerKind::SffStar, 4);
        let run = run_seed(&sc, 5, ExperimentOptions { timing: true });
        assert!(run.record.wall_time.is_some());
        let tour = run.tour.unwrap();
        assert_eq!(run.tour_paths.len(), 4);
        let mut total = 0.0;
        for (i, p) in run.tour_paths.iter().enumerate() {
            assert_eq!(p[0], sc.targets[tour.sequence[i]]);
            assert_eq!(*p.last().unwrap(), sc.targets[tour.sequence[(i + 1) % 4]]);
            total += crate::roadmap::path_length(p);
        }
        assert!((total - tour.total_cost).abs() < 1e-6 * total);
    }

    #[test]
    fn best_of_is_no_worse_than_its_first_run() {
        let single = run_experiment(&scenario(PlannerKind::MultiTRrt, 4)).unwrap();
        let best = run_experiment(&scenario(PlannerKind::MultiTRrtBestOf(5), 4)).unwrap();
        for (s, b) in single.records.iter().zip(&best.records) {
            assert!(b.tsp_cost.unwrap() <= s.tsp_cost.unwrap());
            assert!(b.cumulative_cost.unwrap() <= s.cumulative_cost.unwrap());
            assert!(b.iterations >= s.iterations);
        }
    }

    #[test]
    fn failures_are_recorded_not_fatal() {
        let mut sc = scenario(PlannerKind::SffStar, 4);
        sc.params.i_max = 5;
        let stats = run_experiment(&sc).unwrap();
        assert_eq!(stats.failures, 3);
        assert!(stats.records.iter().all(|r| r.error.is_some()));
        assert!(stats.aggregates.tsp_cost.is_none());
    }
}
