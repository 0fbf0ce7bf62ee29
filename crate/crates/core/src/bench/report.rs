use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use super::RunRow;
use crate::search::Algorithm;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RowComparison {
    pub algorithm: Algorithm,
    pub found: bool,
    /// `L / L_opt`, with `L_opt` the visibility-graph length if present,
    /// otherwise the shortest length among the rows.
    pub length_ratio: Option<f64>,
    /// `No / No` of the focal planner (or of the fewest-node row).
    pub evaluations_ratio: Option<f64>,
    /// `T_median` of the visibility-graph planner over this row's (or of
    /// the slowest row when it is absent).
    pub speedup: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MapComparison {
    pub map_id: String,
    pub query: String,
    pub rows: Vec<RowComparison>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub maps: Vec<MapComparison>,
    /// Per metric (`length`, `evaluations`, `time`), how often each algorithm
    /// was best (ties count for all).
    pub wins: BTreeMap<String, BTreeMap<Algorithm, usize>>,
}

fn ratio(a: f64, b: f64) -> Option<f64> {
    if b == 0.0 {
        (a == 0.0).then_some(1.0)
    } else {
        Some(a / b)
    }
}

fn best_by(rows: &[&RunRow], key: impl Fn(&RunRow) -> f64) -> Option<f64> {
    rows.iter()
        .filter(|r| r.found)
        .map(|r| key(r))
        .reduce(f64::min)
}

/// Compares algorithms per (map, query) group of rows.
pub fn compare_report(rows: &[RunRow]) -> ComparisonReport {
    let mut groups: BTreeMap<(String, String), Vec<&RunRow>> = BTreeMap::new();
    for r in rows {
        groups
            .entry((r.map_id.clone(), r.query.clone()))
            .or_default()
            .push(r);
    }
    let mut wins: BTreeMap<String, BTreeMap<Algorithm, usize>> = BTreeMap::new();
    let mut maps = Vec::new();
    for ((map_id, query), group) in groups {
        let by_alg = |a: Algorithm| group.iter().find(|r| r.algorithm == a && r.found);
        let l_ref = by_alg(Algorithm::AstarVisgraph)
            .map(|r| r.length)
            .or_else(|| best_by(&group, |r| r.length));
        let no_ref = by_alg(Algorithm::FaAstar)
            .map(|r| r.evaluated_nodes as f64)
            .or_else(|| best_by(&group, |r| r.evaluated_nodes as f64));
        let t_ref = by_alg(Algorithm::AstarVisgraph)
            .map(|r| r.t_median_s)
            .or_else(|| {
                group
                    .iter()
                    .filter(|r| r.found)
                    .map(|r| r.t_median_s)
                    .reduce(f64::max)
            });
        let mut out = Vec::new();
        for r in &group {
            let found = r.found;
            out.push(RowComparison {
                algorithm: r.algorithm,
                found,
                length_ratio: l_ref.filter(|_| found).and_then(|l| ratio(r.length, l)),
                evaluations_ratio: no_ref
                    .filter(|_| found)
                    .and_then(|n| ratio(r.evaluated_nodes as f64, n)),
                speedup: t_ref.filter(|_| found).and_then(|t| ratio(t, r.t_median_s)),
            });
        }
        for (metric, key) in [
            ("length", (|r: &RunRow| r.length) as fn(&RunRow) -> f64),
            ("evaluations", |r: &RunRow| r.evaluated_nodes as f64),
            ("time", |r: &RunRow| r.t_median_s),
        ] {
            if let Some(best) = best_by(&group, key) {
                let tol = if metric == "length" {
                    1e-9 * best.abs().max(1.0)
                } else {
                    0.0
                };
                for r in group.iter().filter(|r| r.found && key(r) <= best + tol) {
                    *wins
                        .entry(metric.to_string())
                        .or_default()
                        .entry(r.algorithm)
                        .or_default() += 1;
                }
            }
        }
        maps.push(MapComparison {
            map_id,
            query,
            rows: out,
        });
    }
    ComparisonReport { maps, wins }
}

impl ComparisonReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report is serializable")
    }

    /// Aligned plain-text table followed by the win counts.
    pub fn to_text(&self) -> String {
        let fmt = |v: Option<f64>| v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"));
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{:<36} {:<16} {:>8} {:>10} {:>10} {:>10}",
            "map", "algorithm", "found", "L/L_opt", "No/No_fa", "speedup"
        );
        for m in &self.maps {
            for r in &m.rows {
                let _ = writeln!(
                    s,
                    "{:<36} {:<16} {:>8} {:>10} {:>10} {:>10}",
                    m.map_id,
                    r.algorithm.as_str(),
                    r.found,
                    fmt(r.length_ratio),
                    fmt(r.evaluations_ratio),
                    fmt(r.speedup)
                );
            }
        }
        let _ = writeln!(s);
        for (metric, counts) in &self.wins {
            let parts: Vec<String> = counts.iter().map(|(a, n)| format!("{a}={n}")).collect();
            let _ = writeln!(s, "best {metric}: {}", parts.join(" "));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(algorithm: Algorithm, length: f64, no: usize, t: f64) -> RunRow {
        RunRow {
            map_id: "m".into(),
            seed: Some(1),
            density: 0.1,
            clusters: 3,
            query: "(0, 0)->(5, 5)".into(),
            algorithm,
            w: None,
            length,
            evaluated_nodes: no,
            expansions: no,
            t_mean_s: t,
            t_median_s: t,
            found: true,
            pruning_loss: false,
            v1: 10,
            preprocess_s: 0.0,
            waypoints: String::new(),
            note: String::new(),
        }
    }

    #[test]
    fn single_row_ratios_are_one() {
        let rep = compare_report(&[row(Algorithm::ThetaStar, 7.5, 40, 0.01)]);
        let r = &rep.maps[0].rows[0];
        assert_eq!(r.length_ratio, Some(1.0));
        assert_eq!(r.evaluations_ratio, Some(1.0));
        assert_eq!(r.speedup, Some(1.0));
    }

    #[test]
    fn ratios_against_references() {
        let rows = vec![
            row(Algorithm::AstarVisgraph, 10.0, 100, 0.4),
            row(Algorithm::FaAstar, 10.0, 10, 0.1),
            row(Algorithm::ThetaStar, 10.5, 300, 0.2),
        ];
        let rep = compare_report(&rows);
        let get = |a| {
            rep.maps[0]
                .rows
                .iter()
                .find(|r| r.algorithm == a)
                .unwrap()
                .clone()
        };
        assert_eq!(get(Algorithm::FaAstar).length_ratio, Some(1.0));
        assert_eq!(get(Algorithm::ThetaStar).evaluations_ratio, Some(30.0));
        assert_eq!(get(Algorithm::FaAstar).speedup, Some(4.0));
        assert_eq!(rep.wins["length"].get(&Algorithm::AstarVisgraph), Some(&1));
        assert_eq!(rep.wins["length"].get(&Algorithm::FaAstar), Some(&1));
        assert_eq!(rep.wins["evaluations"].get(&Algorithm::FaAstar), Some(&1));
        assert!(rep.to_text().contains("best evaluations: fa_astar=1"));
        assert!(rep.to_json().contains("\"length_ratio\""));
    }
}
