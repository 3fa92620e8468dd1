use std::path::Path;

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};

pub const RUN_STATS_VERSION: u32 = 1;

/// Outcome of one seed. Failed seeds carry `error` and no costs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub seed: u64,
    pub tsp_cost: Option<f64>,
    /// Sum of all pairwise target distances; absent for Lazy-TSP, which only
    /// plans the pairs its tours use.
    pub cumulative_cost: Option<f64>,
    pub iterations: usize,
    pub cd_point_checks: u64,
    /// Seconds; only recorded when timing is requested, so that default
    /// outputs are reproducible byte for byte.
    pub wall_time: Option<f64>,
    pub error: Option<String>,
}

impl SeedRecord {
    pub fn failed(seed: u64, error: String) -> Self {
        Self {
            seed,
            tsp_cost: None,
            cumulative_cost: None,
            iterations: 0,
            cd_point_checks: 0,
            wall_time: None,
            error: Some(error),
        }
    }

    pub fn is_ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub count: usize,
    pub mean: f64,
    /// Sample standard deviation (`n - 1` denominator); 0 for one value.
    pub std_dev: f64,
    pub min: f64,
}

impl Aggregate {
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std_dev = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Some(Self {
            count: values.len(),
            mean,
            std_dev,
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
        })
    }

    fn matches(&self, other: &Self, rel: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= rel * a.abs().max(b.abs()).max(f64::MIN_POSITIVE);
        self.count == other.count && close(self.mean, other.mean) && close(self.std_dev, other.std_dev) && close(self.min, other.min)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub tsp_cost: Option<Aggregate>,
    pub cumulative_cost: Option<Aggregate>,
    pub iterations: Option<Aggregate>,
    pub cd_point_checks: Option<Aggregate>,
    pub wall_time: Option<Aggregate>,
}

/// Metric selector for [`RunStats::values`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    TspCost,
    CumulativeCost,
    Iterations,
    CdPointChecks,
    WallTime,
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsp_cost" => Ok(Metric::TspCost),
            "cumulative_cost" => Ok(Metric::CumulativeCost),
            "iterations" => Ok(Metric::Iterations),
            "cd_point_checks" => Ok(Metric::CdPointChecks),
            "wall_time" => Ok(Metric::WallTime),
            _ => Err(Error::InvalidParams(format!("unknown metric {s:?}"))),
        }
    }
}

/// Per-seed records of one experiment plus their aggregates over the
/// successful seeds.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunStats {
    pub version: u32,
    pub planner: String,
    pub targets: usize,
    pub records: Vec<SeedRecord>,
    pub failures: usize,
    pub aggregates: Aggregates,
}

impl RunStats {
    pub fn from_records(planner: impl Into<String>, targets: usize, records: Vec<SeedRecord>) -> Self {
        let mut s = Self {
            version: RUN_STATS_VERSION,
            planner: planner.into(),
            targets,
            failures: records.iter().filter(|r| !r.is_ok()).count(),
            records,
            aggregates: Aggregates::default(),
        };
        s.aggregates = s.compute_aggregates();
        s
    }

    /// Values of `metric` over successful seeds, in seed order.
    pub fn values(&self, metric: Metric) -> Vec<f64> {
        self.records
            .iter()
            .filter(|r| r.is_ok())
            .filter_map(|r| match metric {
                Metric::TspCost => r.tsp_cost,
                Metric::CumulativeCost => r.cumulative_cost,
                Metric::Iterations => Some(r.iterations as f64),
                Metric::CdPointChecks => Some(r.cd_point_checks as f64),
                Metric::WallTime => r.wall_time,
            })
            .collect()
    }

    pub fn compute_aggregates(&self) -> Aggregates {
        Aggregates {
            tsp_cost: Aggregate::of(&self.values(Metric::TspCost)),
            cumulative_cost: Aggregate::of(&self.values(Metric::CumulativeCost)),
            iterations: Aggregate::of(&self.values(Metric::Iterations)),
            cd_point_checks: Aggregate::of(&self.values(Metric::CdPointChecks)),
            wall_time: Aggregate::of(&self.values(Metric::WallTime)),
        }
    }

    /// Whether the stored aggregates agree with a recomputation from the
    /// records within `rel` relative error.
    pub fn aggregates_consistent(&self, rel: f64) -> bool {
        let fresh = self.compute_aggregates();
        let pair = |a: &Option<Aggregate>, b: &Option<Aggregate>| match (a, b) {
            (Some(a), Some(b)) => a.matches(b, rel),
            (None, None) => true,
            _ => false,
        };
        let s = &self.aggregates;
        pair(&s.tsp_cost, &fresh.tsp_cost)
            && pair(&s.cumulative_cost, &fresh.cumulative_cost)
            && pair(&s.iterations, &fresh.iterations)
            && pair(&s.cd_point_checks, &fresh.cd_point_checks)
            && pair(&s.wall_time, &fresh.wall_time)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("stats serialize") + "\n"
    }

    /// One row per seed.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        for r in &self.records {
            w.serialize(r)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json())?;
        Ok(())
    }

    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_csv()?)?;
        Ok(())
    }

    /// Reads stats written by [`RunStats::write_json`], or per-seed rows
    /// written by [`RunStats::write_csv`] (recognized by a `.csv` extension).
    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
            let mut r = csv::Reader::from_path(path)?;
            let records = r.deserialize().collect::<std::result::Result<Vec<SeedRecord>, _>>()?;
            let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            return Ok(Self::from_records(name, 0, records));
        }
        Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Different,
    Same,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WelchResult {
    pub verdict: Verdict,
    pub p_value: f64,
    pub t: f64,
    pub df: f64,
    pub mean_a: f64,
    pub mean_b: f64,
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Two-sided Welch t-test; the samples differ iff `p < alpha`.
pub fn welch_t_test(a: &[f64], b: &[f64], alpha: f64) -> Result<WelchResult> {
    for (name, s) in [("a", a), ("b", b)] {
        if s.len() < 2 {
            return Err(Error::DegenerateSample(format!("sample {name} has {} values", s.len())));
        }
        if s.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateSample(format!("sample {name} has non-finite values")));
        }
    }
    let (ma, va) = mean_var(a);
    let (mb, vb) = mean_var(b);
    if va == 0.0 || vb == 0.0 {
        return Err(Error::DegenerateSample("zero variance".into()));
    }
    let (sa, sb) = (va / a.len() as f64, vb / b.len() as f64);
    let se = (sa + sb).sqrt();
    let t = (ma - mb) / se;
    let df = (sa + sb).powi(2) / (sa * sa / (a.len() as f64 - 1.0) + sb * sb / (b.len() as f64 - 1.0));
    let dist = StudentsT::new(0.0, 1.0, df).map_err(|e| Error::DegenerateSample(e.to_string()))?;
    let p_value = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(WelchResult {
        verdict: if p_value < alpha { Verdict::Different } else { Verdict::Same },
        p_value,
        t,
        df,
        mean_a: ma,
        mean_b: mb,
    })
}

/// Equal-width histogram over `[min, max]`; the last bin is closed.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Histogram {
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn new(values: &[f64], bins: usize) -> Result<Self> {
        if bins == 0 {
            return Err(Error::InvalidParams("histogram needs at least one bin".into()));
        }
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::DegenerateSample("histogram needs finite values".into()));
        }
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo == hi {
            return Ok(Self {
                edges: vec![lo, hi],
                counts: vec![values.len()],
            });
        }
        let width = (hi - lo) / bins as f64;
        let mut edges: Vec<f64> = (0..bins).map(|i| lo + i as f64 * width).collect();
        edges.push(hi);
        let mut counts = vec![0; bins];
        for &v in values {
            let i = (((v - lo) / width) as usize).min(bins - 1);
            counts[i] += 1;
        }
        Ok(Self { edges, counts })
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["bin_start", "bin_end", "count"])?;
        for (i, c) in self.counts.iter().enumerate() {
            w.write_record([self.edges[i].to_string(), self.edges[i + 1].to_string(), c.to_string()])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, Normal};

    fn record(seed: u64, tsp: f64) -> SeedRecord {
        SeedRecord {
            seed,
            tsp_cost: Some(tsp),
            cumulative_cost: Some(tsp * 2.0),
            iterations: seed as usize * 10,
            cd_point_checks: 100 + seed,
            wall_time: None,
            error: None,
        }
    }

    #[test]
    fn aggregates_skip_failures() {
        let stats = RunStats::from_records(
            "SFF_STAR",
            3,
            vec![record(1, 10.0), SeedRecord::failed(2, "boom".into()), record(3, 14.0)],
        );
        assert_eq!(stats.failures, 1);
        let tsp = stats.aggregates.tsp_cost.unwrap();
        assert_eq!((tsp.count, tsp.mean, tsp.min), (2, 12.0, 10.0));
        assert!((tsp.std_dev - 8f64.sqrt()).abs() < 1e-12);
        assert!(stats.aggregates.wall_time.is_none());
        assert!(stats.aggregates_consistent(1e-9));
        let mut tampered = stats.clone();
        tampered.records[0].tsp_cost = Some(11.0);
        assert!(!tampered.aggregates_consistent(1e-9));
    }

    #[test]
    fn csv_and_json_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let stats = RunStats::from_records("X", 2, vec![record(1, 10.5), SeedRecord::failed(2, "no, path".into())]);
        let csv_path = dir.path().join("x.csv");
        stats.write_csv(&csv_path).unwrap();
        let text = std::fs::read_to_string(&csv_path).unwrap();
        assert!(text.starts_with("seed,tsp_cost,cumulative_cost,iterations,cd_point_checks,wall_time,error\n"));
        let back = RunStats::read(&csv_path).unwrap();
        assert_eq!(back.records, stats.records);
        let json_path = dir.path().join("x.json");
        stats.write_json(&json_path).unwrap();
        assert_eq!(RunStats::read(&json_path).unwrap(), stats);
    }

    #[test]
    fn welch_identical_samples() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let r = welch_t_test(&a, &a, 0.05).unwrap();
        assert_eq!(r.verdict, Verdict::Same);
        assert_eq!(r.p_value, 1.0);
    }

    #[test]
    fn welch_separated_samples() {
        let a: Vec<f64> = (0..20).map(|i| i as f64 * 0.1).collect();
        let b: Vec<f64> = (0..20).map(|i| 100.0 + i as f64 * 0.1).collect();
        let r = welch_t_test(&a, &b, 0.05).unwrap();
        assert_eq!(r.verdict, Verdict::Different);
        assert!(r.p_value < 1e-10);
        assert!(r.mean_a < r.mean_b);
    }

    #[test]
    fn welch_matches_reference_value() {
        // reference values from scipy.stats.ttest_ind(a, b, equal_var=False)
        let a = [27.5, 21.0, 19.0, 23.6, 17.0, 17.9, 16.9, 20.1, 21.9, 22.6, 23.1, 19.6, 19.0, 21.7, 21.4];
        let b = [27.1, 22.0, 20.8, 23.4, 23.4, 23.5, 25.8, 22.0, 24.8, 20.2, 21.9, 22.1, 22.9, 20.5, 24.4];
        let r = welch_t_test(&a, &b, 0.05).unwrap();
        assert!((r.t - -2.455356398286006).abs() < 1e-9, "{}", r.t);
        assert!((r.df - 24.988529290231416).abs() < 1e-9, "{}", r.df);
        assert!((r.p_value - 0.021378001462866985).abs() < 1e-9, "{}", r.p_value);
    }

    #[test]
    fn welch_rejects_degenerate_samples() {
        assert!(welch_t_test(&[1.0], &[1.0, 2.0], 0.05).is_err());
        assert!(welch_t_test(&[1.0, 1.0], &[1.0, 2.0], 0.05).is_err());
    }

    #[test]
    fn welch_false_positive_rate() {
        let normal = Normal::new(10.0, 2.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut same = 0;
        for _ in 0..100 {
            let a: Vec<f64> = (0..50).map(|_| normal.sample(&mut rng)).collect();
            let b: Vec<f64> = (0..50).map(|_| normal.sample(&mut rng)).collect();
            if welch_t_test(&a, &b, 0.05).unwrap().verdict == Verdict::Same {
                same += 1;
            }
        }
        assert!(same >= 90, "{same}");
    }

    #[test]
    fn histogram_bins() {
        let h = Histogram::new(&[0.0, 1.0, 2.0, 3.0, 4.0], 2).unwrap();
        assert_eq!(h.edges, vec![0.0, 2.0, 4.0]);
        assert_eq!(h.counts, vec![2, 3]);
        assert_eq!(h.to_csv().unwrap(), "bin_start,bin_end,count\n0,2,2\n2,4,3\n");
        let flat = Histogram::new(&[5.0, 5.0], 4).unwrap();
        assert_eq!(flat.counts, vec![2]);
        assert!(Histogram::new(&[], 3).is_err());
        assert!(Histogram::new(&[1.0], 0).is_err());
    }
}
