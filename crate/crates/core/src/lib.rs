//! Multi-goal path planning among polygonal obstacles.
//!
//! The crate grows a forest of trees rooted at the targets ([`forest`]),
//! turns the result into a roadmap with target-to-target shortest paths
//! ([`roadmap`]) and orders the targets into a minimum-cost closed tour
//! ([`tsp`]). Baseline planners live in [`baselines`]; scenario files, map
//! generators, batch statistics and SVG output live in [`bench`].

pub mod baselines;
pub mod bench;
pub mod error;
pub mod forest;
pub mod geometry;
pub mod nn_index;
pub mod output;
pub mod roadmap;
pub mod tree;
pub mod tsp;
pub mod union_find;

pub use error::{Error, Result};
pub use forest::{plan, Expansion, Forest, IterationRecord, PlannerParams, SffPlanner};
pub use geometry::{distance, Configuration, Polygon, Rect, Workspace};
pub use nn_index::{NodeId, SpatialIndex, TargetQueue, TreeId};
pub use output::{IterationCounters, Node, PlanRecord, PlannerOutput, VirtualEdge};
pub use roadmap::{all_target_distances, build_graph, DistanceMatrix, RoadmapGraph};
pub use tsp::{held_karp, heuristic_tour, solve_tour, tour_cost, CostMatrix, Tour};
