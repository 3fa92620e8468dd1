//! Experiment harness: scenario files, map generators, batch runs over seed
//! lists, summary statistics and SVG output.

pub mod experiment;
pub mod mapgen;
pub mod scenario;
pub mod stats;
pub mod svg;

pub use experiment::{run_experiment, run_experiment_with, run_seed, run_seeds, ExperimentOptions, PlanOutcome, SeedRun};
pub use mapgen::{generate_map, generate_map_with, place_targets, MapKind, MapOptions};
pub use scenario::{PlannerKind, Scenario};
pub use stats::{welch_t_test, Histogram, Metric, RunStats, SeedRecord, Verdict, WelchResult};
pub use svg::{render_svg, svg_document, svg_scene};
