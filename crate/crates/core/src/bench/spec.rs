use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::grid_map::{GridMap, Node, Query};
use crate::preprocess::VertexMode;
use crate::search::{Algorithm, EscalationPolicy};

/// A benchmark suite, usually read from a JSON file.
///
/// ```json
/// {
///   "maps": [{"kind": "random", "width": 50, "height": 50,
///             "densities": [0.1, 0.3], "seeds": [1, 2, 3]}],
///   "queries": {"kind": "corners"},
///   "algorithms": ["astar_grid", "theta_star", "astar_visgraph", "fa_astar"],
///   "repetitions": 5
/// }
/// ```
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchSpec {
    pub maps: Vec<MapSource>,
    #[serde(default)]
    pub queries: QueryPlacement,
    #[serde(default = "all_algorithms")]
    pub algorithms: Vec<Algorithm>,
    /// Timed executions per row.
    #[serde(default = "default_repetitions")]
    pub repetitions: u32,
    #[serde(default = "yes")]
    pub diagonal_move_allowed: bool,
    /// Defaults to the rule paired with `diagonal_move_allowed`.
    #[serde(default)]
    pub vertex_touch_blocks: Option<bool>,
    /// Vertex extraction for the focal planner.
    #[serde(default)]
    pub vertex_mode: VertexMode,
    #[serde(default)]
    pub w_policy: WPolicy,
    /// Keep generated obstacles off the cells around query endpoints.
    #[serde(default = "yes")]
    pub clear_query_cells: bool,
    /// Worker threads; `None` uses all cores.
    #[serde(default)]
    pub threads: Option<usize>,
}

fn all_algorithms() -> Vec<Algorithm> {
    Algorithm::ALL.to_vec()
}

fn default_repetitions() -> u32 {
    5
}

fn yes() -> bool {
    true
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapSource {
    Empty {
        width: u32,
        height: u32,
    },
    /// One map per (density, seed).
    Random {
        width: u32,
        height: u32,
        densities: Vec<f64>,
        seeds: Vec<u64>,
    },
    Clustered {
        width: u32,
        height: u32,
        density: f64,
        clusters: Vec<u32>,
        seeds: Vec<u64>,
    },
    Maze {
        width: u32,
        height: u32,
        corridor: u32,
        seeds: Vec<u64>,
    },
    /// Octile `.map` or native JSON, chosen by extension.
    File {
        path: PathBuf,
    },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum QueryPlacement {
    /// Bottom-left corner to top-right corner.
    #[default]
    Corners,
    /// Start at the map centre, `count` seeded random targets.
    CenterRandom { count: u32, seed: u64 },
    /// `[sx, sy, tx, ty]` per query.
    Explicit { queries: Vec<[i32; 4]> },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum WPolicy {
    Fixed {
        w: f64,
    },
    /// Grow `w` until the focal path matches the visibility-graph length.
    Escalate {
        #[serde(default = "default_w_max")]
        w_max: f64,
        #[serde(default = "default_w_step")]
        w_step: f64,
    },
}

fn default_w_max() -> f64 {
    EscalationPolicy::default().w_max
}

fn default_w_step() -> f64 {
    EscalationPolicy::default().w_step
}

impl Default for WPolicy {
    fn default() -> Self {
        WPolicy::Fixed { w: 1.0 }
    }
}

impl QueryPlacement {
    /// Queries for a `width` x `height` map.
    pub fn queries(&self, width: u32, height: u32) -> Vec<Query> {
        let (w, h) = (width as i32, height as i32);
        match self {
            QueryPlacement::Corners => vec![Query::new(Node::new(0, 0), Node::new(w, h))],
            QueryPlacement::CenterRandom { count, seed } => {
                let start = Node::new(w / 2, h / 2);
                let mut rng = ChaCha8Rng::seed_from_u64(*seed);
                let mut out = Vec::with_capacity(*count as usize);
                while out.len() < *count as usize {
                    let t = Node::new(rng.gen_range(0..=w), rng.gen_range(0..=h));
                    if t != start {
                        out.push(Query::new(start, t));
                    }
                }
                out
            }
            QueryPlacement::Explicit { queries } => queries
                .iter()
                .map(|q| Query::new(Node::new(q[0], q[1]), Node::new(q[2], q[3])))
                .collect(),
        }
    }
}

/// One concrete map of a suite.
#[derive(Clone, Debug)]
pub struct SuiteMap {
    pub id: String,
    pub seed: Option<u64>,
    pub map: GridMap,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<(), String> {
        if self.repetitions == 0 {
            return Err("repetitions must be at least 1".into());
        }
        if self.maps.is_empty() {
            return Err("spec lists no maps".into());
        }
        if self.algorithms.is_empty() {
            return Err("spec lists no algorithms".into());
        }
        if let WPolicy::Fixed { w } = self.w_policy {
            if !(w.is_finite() && w >= 1.0) {
                return Err(format!("w must be >= 1, got {w}"));
            }
        }
        if self.threads == Some(0) {
            return Err("threads must be positive".into());
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let spec: BenchSpec = serde_json::from_str(text).map_err(|e| e.to_string())?;
        spec.validate()?;
        Ok(spec)
    }
}
