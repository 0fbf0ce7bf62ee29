//! Path planners sharing one open-list implementation and one visibility
//! semantics.
//!
//! | planner | nodes | edges |
//! |---|---|---|
//! | [`astar_grid`] | lattice corners | 8 (or 4) unit moves |
//! | [`theta_star`] | lattice corners | unit moves, shortcut through the parent when visible |
//! | [`astar_visgraph`] | convex corners, start, target | every visible pair |
//! | [`fa_astar`] | cluster vertices, start, target | candidate vertices of each expanded node |

mod focal;
mod grid;
mod open_list;
mod visgraph;

use std::fmt;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::grid_map::{GridMap, Node, Query};
use crate::visibility::{nodes_visible, VisibilityConfig};

pub use focal::{fa_astar, fa_astar_escalating, EscalationPolicy};
pub use grid::{astar_grid, theta_star};
pub use open_list::{Entry, OpenList, Refresh};
pub use visgraph::{astar_visgraph, visgraph_nodes};

#[derive(Debug, Error, PartialEq)]
pub enum SearchError {
    #[error("query {0} is outside the map or starts/ends inside an obstacle")]
    InvalidQuery(Query),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    AstarGrid,
    ThetaStar,
    AstarVisgraph,
    FaAstar,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::AstarGrid,
        Algorithm::ThetaStar,
        Algorithm::AstarVisgraph,
        Algorithm::FaAstar,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::AstarGrid => "astar_grid",
            Algorithm::ThetaStar => "theta_star",
            Algorithm::AstarVisgraph => "astar_visgraph",
            Algorithm::FaAstar => "fa_astar",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.as_str() == s)
            .ok_or_else(|| format!("unknown algorithm `{s}`"))
    }
}

/// Movement and line-of-sight rules shared by all planners on a map.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlannerConfig {
    pub diagonal_move_allowed: bool,
    pub visibility: VisibilityConfig,
}

impl PlannerConfig {
    /// The visibility rule paired with the diagonal rule.
    pub fn paired(diagonal_move_allowed: bool) -> Self {
        Self {
            diagonal_move_allowed,
            visibility: VisibilityConfig::for_diagonal_rule(diagonal_move_allowed),
        }
    }
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self::paired(true)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Found,
    /// The open list emptied before the target was reached.
    Exhausted,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub algorithm: Algorithm,
    pub waypoints: Vec<Node>,
    pub length: f64,
    /// Distinct nodes inserted into the open list.
    pub evaluated_nodes: usize,
    /// Nodes taken off the open list as the current node.
    pub expansions: usize,
    #[serde(with = "duration_secs")]
    pub elapsed: Duration,
    pub found: bool,
    pub outcome: Outcome,
    /// Scale factor, focal planner only.
    pub w: Option<f64>,
    /// `(w, length)` of every focal run tried by the escalating planner.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub attempts: Vec<(f64, f64)>,
    /// Inserted nodes in insertion order.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub evaluated: Vec<Node>,
    /// Focal expansions whose candidate set came back empty.
    #[serde(default)]
    pub dead_ends: usize,
}

impl PathResult {
    fn trivial(algorithm: Algorithm, start: Node) -> Self {
        Self {
            algorithm,
            waypoints: vec![start],
            length: 0.0,
            evaluated_nodes: 0,
            expansions: 0,
            elapsed: Duration::ZERO,
            found: true,
            outcome: Outcome::Found,
            w: None,
            attempts: Vec::new(),
            evaluated: Vec::new(),
            dead_ends: 0,
        }
    }

    fn from_open(
        algorithm: Algorithm,
        open: &OpenList,
        target: Node,
        expansions: usize,
        elapsed: Duration,
    ) -> Self {
        let waypoints = open.path_to(target).unwrap_or_default();
        let found = !waypoints.is_empty();
        Self {
            algorithm,
            length: path_length(&waypoints),
            waypoints,
            evaluated_nodes: open.evaluated(),
            expansions,
            elapsed,
            found,
            outcome: if found {
                Outcome::Found
            } else {
                Outcome::Exhausted
            },
            w: None,
            attempts: Vec::new(),
            evaluated: open.insertion_order().to_vec(),
            dead_ends: 0,
        }
    }

    /// Every consecutive waypoint pair is mutually visible.
    pub fn is_valid_on(&self, map: &GridMap, visibility: VisibilityConfig) -> bool {
        self.waypoints
            .windows(2)
            .all(|p| nodes_visible(p[0], p[1], map, visibility))
    }
}

/// Sum of Euclidean segment lengths.
pub fn path_length(waypoints: &[Node]) -> f64 {
    waypoints.windows(2).map(|p| p[0].distance(p[1])).sum()
}

fn check_query(query: Query, map: &GridMap) -> Result<(), SearchError> {
    if query.is_valid_for(map) {
        Ok(())
    } else {
        Err(SearchError::InvalidQuery(query))
    }
}

mod duration_secs {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(d.as_secs_f64())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        let secs = f64::deserialize(d)?;
        Ok(Duration::from_secs_f64(secs.max(0.0)))
    }
}
