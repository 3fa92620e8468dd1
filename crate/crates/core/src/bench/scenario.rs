use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forest::{validate_targets, PlannerParams};
use crate::geometry::{Configuration, Workspace};

pub const SCENARIO_VERSION: u32 = 1;

/// Which planner a scenario runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum PlannerKind {
    SffStar,
    NrSffStar,
    SimpleSff,
    MultiTRrt,
    /// Multi-T-RRT repeated on this many sub-seeds, keeping the best result.
    MultiTRrtBestOf(usize),
    LazyTsp,
}

impl PlannerKind {
    /// Planner parameters with the variant's switches applied.
    pub fn apply(self, params: PlannerParams) -> PlannerParams {
        match self {
            PlannerKind::SffStar => params.sff_star(),
            PlannerKind::NrSffStar => params.nr_sff_star(),
            PlannerKind::SimpleSff => params.simple_sff(),
            _ => params,
        }
    }

    pub fn is_forest(self) -> bool {
        matches!(self, PlannerKind::SffStar | PlannerKind::NrSffStar | PlannerKind::SimpleSff)
    }
}

impl fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PlannerKind::SffStar => f.write_str("SFF_STAR"),
            PlannerKind::NrSffStar => f.write_str("NR_SFF_STAR"),
            PlannerKind::SimpleSff => f.write_str("SIMPLE_SFF"),
            PlannerKind::MultiTRrt => f.write_str("MULTI_T_RRT"),
            PlannerKind::MultiTRrtBestOf(c) => write!(f, "MULTI_T_RRT_BEST_OF({c})"),
            PlannerKind::LazyTsp => f.write_str("LAZY_TSP"),
        }
    }
}

impl FromStr for PlannerKind {
    type Err = Error;

    /// Accepts the display names case-insensitively, with `-` for `_`, and
    /// `MULTI_T_RRT_BEST_OF:<count>` or `MULTI_T_RRT_BEST_OF(<count>)`.
    fn from_str(s: &str) -> Result<Self> {
        let norm = s.trim().to_ascii_uppercase().replace('-', "_");
        let kind = match norm.as_str() {
            "SFF_STAR" | "SFF*" => PlannerKind::SffStar,
            "NR_SFF_STAR" | "NR_SFF*" => PlannerKind::NrSffStar,
            "SIMPLE_SFF" => PlannerKind::SimpleSff,
            "MULTI_T_RRT" => PlannerKind::MultiTRrt,
            "LAZY_TSP" => PlannerKind::LazyTsp,
            other => {
                let count = other
                    .strip_prefix("MULTI_T_RRT_BEST_OF")
                    .map(|rest| rest.trim_matches(|c| c == ':' || c == '(' || c == ')' || c == '_'))
                    .and_then(|c| c.parse::<usize>().ok())
                    .filter(|&c| c >= 1);
                match count {
                    Some(c) => PlannerKind::MultiTRrtBestOf(c),
                    None => return Err(Error::InvalidScenario(format!("unknown planner {s:?}"))),
                }
            }
        };
        Ok(kind)
    }
}

/// A reproducible experiment: map, targets, parameters, planner and seeds.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Scenario {
    pub version: u32,
    pub workspace: Workspace,
    pub targets: Vec<Configuration>,
    #[serde(default)]
    pub params: PlannerParams,
    pub planner: PlannerKind,
    pub seeds: Vec<u64>,
}

impl Scenario {
    pub fn new(
        workspace: Workspace,
        targets: Vec<Configuration>,
        params: PlannerParams,
        planner: PlannerKind,
        seeds: Vec<u64>,
    ) -> Self {
        Self {
            version: SCENARIO_VERSION,
            workspace,
            targets,
            params,
            planner,
            seeds,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != SCENARIO_VERSION {
            return Err(Error::InvalidScenario(format!(
                "unsupported version {} (expected {SCENARIO_VERSION})",
                self.version
            )));
        }
        if self.seeds.is_empty() {
            return Err(Error::InvalidScenario("at least one seed is required".into()));
        }
        if self.planner == PlannerKind::MultiTRrtBestOf(0) {
            return Err(Error::InvalidScenario("best-of count must be positive".into()));
        }
        self.params.validate()?;
        validate_targets(&self.workspace, &self.targets)
    }

    /// Parameters for one seed, with the planner's switches applied.
    pub fn params_for(&self, seed: u64) -> PlannerParams {
        self.planner.apply(self.params.clone()).with_seed(seed)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(text)?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n")?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Polygon, Rect};

    fn scenario() -> Scenario {
        let ws = Workspace::new(
            Rect::square(100.0),
            vec![Polygon::rectangle(40.0, 40.0, 60.0, 60.0).unwrap()],
            1.0,
        )
        .unwrap();
        Scenario::new(
            ws,
            vec![Configuration::new(10.0, 10.0), Configuration::new(90.0, 90.0)],
            PlannerParams::default(),
            PlannerKind::MultiTRrtBestOf(20),
            vec![1, 2],
        )
    }

    #[test]
    fn planner_names_roundtrip() {
        for kind in [
            PlannerKind::SffStar,
            PlannerKind::NrSffStar,
            PlannerKind::SimpleSff,
            PlannerKind::MultiTRrt,
            PlannerKind::MultiTRrtBestOf(20),
            PlannerKind::LazyTsp,
        ] {
            assert_eq!(kind.to_string().parse::<PlannerKind>().unwrap(), kind);
        }
        assert_eq!("sff-star".parse::<PlannerKind>().unwrap(), PlannerKind::SffStar);
        assert_eq!(
            "multi_t_rrt_best_of:5".parse::<PlannerKind>().unwrap(),
            PlannerKind::MultiTRrtBestOf(5)
        );
        assert!("best".parse::<PlannerKind>().is_err());
        assert!("MULTI_T_RRT_BEST_OF:0".parse::<PlannerKind>().is_err());
    }

    #[test]
    fn json_shape() {
        let sc = scenario();
        let v: serde_json::Value = serde_json::from_str(&sc.to_json()).unwrap();
        assert_eq!(v["version"], 1);
        assert_eq!(v["planner"]["MULTI_T_RRT_BEST_OF"], 20);
        assert_eq!(v["targets"][1], serde_json::json!([90.0, 90.0]));
        assert_eq!(v["workspace"]["obstacles"][0].as_array().unwrap().len(), 4);
        let back = Scenario::from_json(&sc.to_json()).unwrap();
        assert_eq!(back.to_json(), sc.to_json());
    }

    #[test]
    fn minimal_file_uses_defaults() {
        let text = r#"{"version":1,"workspace":{"bounds":{"min_x":0,"min_y":0,"max_x":50,"max_y":50}},
            "targets":[[5,5]],"planner":"SFF_STAR","seeds":[7]}"#;
        let sc = Scenario::from_json(text).unwrap();
        assert_eq!(sc.params, PlannerParams::default());
        assert_eq!(sc.params_for(7).rng_seed, 7);
    }

    #[test]
    fn invalid_scenarios() {
        let mut sc = scenario();
        sc.seeds.clear();
        assert!(matches!(sc.validate(), Err(Error::InvalidScenario(_))));
        let mut sc = scenario();
        sc.version = 2;
        assert!(sc.validate().is_err());
        let mut sc = scenario();
        sc.targets.push(Configuration::new(50.0, 50.0));
        assert!(matches!(sc.validate(), Err(Error::TargetInCollision { index: 2, .. })));
        let mut sc = scenario();
        sc.params.k = 0;
        assert!(sc.validate().unwrap_err().is_invalid_input());
        assert!(Scenario::from_json("{").unwrap_err().is_invalid_input());
    }

    #[test]
    fn variant_switches() {
        let mut sc = scenario();
        sc.planner = PlannerKind::SimpleSff;
        let p = sc.params_for(3);
        assert!(!p.rewiring_enabled && !p.queues_enabled);
        sc.planner = PlannerKind::NrSffStar;
        let p = sc.params_for(3);
        assert!(!p.rewiring_enabled && p.queues_enabled);
    }
}
