//! Benchmark harness: builds the maps of a [`BenchSpec`], runs every
//! requested planner on every query, and collects one [`RunRow`] per
//! (map, query, algorithm).

mod render;
mod report;
mod spec;

use std::collections::BTreeMap;
use std::io;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::candidate_vertices::CvContext;
use crate::grid_map::{
    generate_clustered, generate_maze, generate_random_with_clearance, Cell, GridMap, MapError,
    Node, Query, RNG_ALGORITHM,
};
use crate::preprocess::{preprocess, Preprocessed, VertexMode};
use crate::search::{
    astar_grid, astar_visgraph, fa_astar, fa_astar_escalating, theta_star, Algorithm,
    EscalationPolicy, PathResult, PlannerConfig,
};
use crate::visibility::VisibilityConfig;

pub use render::{render_path, render_svg};
pub use report::{compare_report, ComparisonReport, MapComparison, RowComparison};
pub use spec::{BenchSpec, MapSource, QueryPlacement, SuiteMap, WPolicy};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error("map {id}: {source}")]
    Map {
        id: String,
        #[source]
        source: MapError,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

/// One result row. Field names are the CSV column names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub map_id: String,
    pub seed: Option<u64>,
    /// Obstacle fraction of the generated map.
    pub density: f64,
    pub clusters: usize,
    pub query: String,
    pub algorithm: Algorithm,
    pub w: Option<f64>,
    #[serde(rename = "L")]
    pub length: f64,
    #[serde(rename = "No")]
    pub evaluated_nodes: usize,
    pub expansions: usize,
    #[serde(rename = "T_mean_s")]
    pub t_mean_s: f64,
    #[serde(rename = "T_median_s")]
    pub t_median_s: f64,
    pub found: bool,
    /// The focal planner found nothing while the visibility graph found a path.
    pub pruning_loss: bool,
    /// Size of `V_convex` in the focal planner's vertex mode.
    pub v1: usize,
    pub preprocess_s: f64,
    /// `x:y` pairs joined by `;`.
    pub waypoints: String,
    pub note: String,
}

impl RunRow {
    /// Columns that must reproduce exactly for a fixed spec.
    pub fn deterministic_key(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.map_id,
            self.query,
            self.algorithm,
            self.length,
            self.evaluated_nodes,
            self.expansions,
            self.found,
            self.pruning_loss,
            self.waypoints
        )
    }
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub rows: Vec<RunRow>,
    /// How many times preprocessing ran; one per map.
    pub preprocess_runs: usize,
    pub metadata: BTreeMap<String, String>,
}

impl SuiteReport {
    pub fn to_csv(&self) -> Result<String, BenchError> {
        write_csv(&self.rows)
    }
}

pub fn write_csv(rows: &[RunRow]) -> Result<String, BenchError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| BenchError::Csv(e.into_error().into()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn read_csv(text: &str) -> Result<Vec<RunRow>, BenchError> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    r.deserialize()
        .map(|row| row.map_err(BenchError::from))
        .collect()
}

pub fn format_waypoints(path: &[Node]) -> String {
    path.iter()
        .map(|n| format!("{}:{}", n.x, n.y))
        .collect::<Vec<_>>()
        .join(";")
}

/// Reads a map file: native JSON for `.json`, octile text otherwise.
pub fn load_map_file(path: &Path) -> Result<GridMap, BenchError> {
    let text = std::fs::read_to_string(path).map_err(|source| BenchError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let id = path.display().to_string();
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        GridMap::from_json(&text)
    } else {
        GridMap::from_octile(&text)
    };
    parsed.map_err(|source| BenchError::Map { id, source })
}

fn endpoint_cells(queries: &[Query]) -> Vec<Cell> {
    queries
        .iter()
        .flat_map(|q| [q.start, q.target])
        .flat_map(|n| n.incident_cells())
        .collect()
}

/// Generates or loads every map of the spec, in spec order.
pub fn materialize(spec: &BenchSpec) -> Result<Vec<SuiteMap>, BenchError> {
    let mut out = Vec::new();
    let wrap = |id: &str| {
        let id = id.to_string();
        move |source| BenchError::Map { id, source }
    };
    for source in &spec.maps {
        match source {
            MapSource::Empty { width, height } => out.push(SuiteMap {
                id: format!("empty-{width}x{height}"),
                seed: None,
                map: GridMap::new(*width, *height),
            }),
            MapSource::Random {
                width,
                height,
                densities,
                seeds,
            } => {
                let keep = if spec.clear_query_cells {
                    endpoint_cells(&spec.queries.queries(*width, *height))
                } else {
                    Vec::new()
                };
                for &d in densities {
                    for &seed in seeds {
                        let id = format!("random-{width}x{height}-d{d}-s{seed}");
                        let map = generate_random_with_clearance(*width, *height, d, seed, &keep)
                            .map_err(wrap(&id))?;
                        out.push(SuiteMap {
                            id,
                            seed: Some(seed),
                            map,
                        });
                    }
                }
            }
            MapSource::Clustered {
                width,
                height,
                density,
                clusters,
                seeds,
            } => {
                for &k in clusters {
                    for &seed in seeds {
                        let id = format!("clustered-{width}x{height}-d{density}-k{k}-s{seed}");
                        let map = generate_clustered(*width, *height, *density, k as usize, seed)
                            .map_err(wrap(&id))?;
                        out.push(SuiteMap {
                            id,
                            seed: Some(seed),
                            map,
                        });
                    }
                }
            }
            MapSource::Maze {
                width,
                height,
                corridor,
                seeds,
            } => {
                for &seed in seeds {
                    let id = format!("maze-{width}x{height}-c{corridor}-s{seed}");
                    let map = generate_maze(*width, *height, *corridor, seed).map_err(wrap(&id))?;
                    out.push(SuiteMap {
                        id,
                        seed: Some(seed),
                        map,
                    });
                }
            }
            MapSource::File { path } => out.push(SuiteMap {
                id: path.display().to_string(),
                seed: None,
                map: load_map_file(path)?,
            }),
        }
    }
    Ok(out)
}

/// Per-map data shared by all rows of that map.
struct Prepared {
    focal: Preprocessed,
    visgraph_nodes: Vec<Node>,
    preprocess_s: f64,
}

fn prepare(map: &GridMap, spec: &BenchSpec, counter: &AtomicUsize) -> Prepared {
    counter.fetch_add(1, Ordering::Relaxed);
    let clock = Instant::now();
    let focal = preprocess(map, spec.diagonal_move_allowed, spec.vertex_mode);
    let visgraph_nodes = if spec.vertex_mode == VertexMode::ConvexCorner {
        focal.convex_nodes()
    } else {
        preprocess(map, spec.diagonal_move_allowed, VertexMode::ConvexCorner).convex_nodes()
    };
    Prepared {
        focal,
        visgraph_nodes,
        preprocess_s: clock.elapsed().as_secs_f64(),
    }
}

fn planner_config(spec: &BenchSpec) -> PlannerConfig {
    let mut cfg = PlannerConfig::paired(spec.diagonal_move_allowed);
    if let Some(touch) = spec.vertex_touch_blocks {
        cfg.visibility = VisibilityConfig {
            vertex_touch_blocks: touch,
        };
    }
    cfg
}

fn median(xs: &mut [f64]) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

/// Runs one planner `repetitions` times; returns the first result and the
/// individual timings.
fn timed(
    repetitions: u32,
    mut run: impl FnMut() -> Result<PathResult, String>,
) -> Result<(PathResult, Vec<Duration>, bool), String> {
    let first = run()?;
    let mut times = vec![first.elapsed];
    let mut stable = true;
    for _ in 1..repetitions {
        let again = run()?;
        stable &=
            again.waypoints == first.waypoints && again.evaluated_nodes == first.evaluated_nodes;
        times.push(again.elapsed);
    }
    Ok((first, times, stable))
}

fn rows_for_map(sm: &SuiteMap, spec: &BenchSpec, counter: &AtomicUsize) -> Vec<RunRow> {
    let cfg = planner_config(spec);
    let prepared = prepare(&sm.map, spec, counter);
    let clusters = prepared.focal.clusters().len();
    let v1 = prepared.focal.v_convex().len();
    let queries = spec.queries.queries(sm.map.width(), sm.map.height());
    let mut rows = Vec::new();
    for query in queries {
        let query_label = format!("{}->{}", query.start, query.target);
        let mut reference: Option<PathResult> = None;
        let visgraph = |cache: &mut Option<PathResult>| -> Result<PathResult, String> {
            if let Some(r) = cache {
                return Ok(r.clone());
            }
            let r = astar_visgraph(query, &sm.map, &prepared.visgraph_nodes, cfg)
                .map_err(|e| e.to_string())?;
            *cache = Some(r.clone());
            Ok(r)
        };
        for &algorithm in &spec.algorithms {
            let outcome = match algorithm {
                Algorithm::AstarGrid => timed(spec.repetitions, || {
                    astar_grid(query, &sm.map, cfg).map_err(|e| e.to_string())
                }),
                Algorithm::ThetaStar => timed(spec.repetitions, || {
                    theta_star(query, &sm.map, cfg).map_err(|e| e.to_string())
                }),
                Algorithm::AstarVisgraph => {
                    let r = timed(spec.repetitions, || {
                        astar_visgraph(query, &sm.map, &prepared.visgraph_nodes, cfg)
                            .map_err(|e| e.to_string())
                    });
                    if let Ok((first, _, _)) = &r {
                        reference = Some(first.clone());
                    }
                    r
                }
                Algorithm::FaAstar => {
                    let w = match spec.w_policy {
                        WPolicy::Fixed { w } => w,
                        WPolicy::Escalate { .. } => 1.0,
                    };
                    match CvContext::new(&sm.map, &prepared.focal, cfg.visibility, w) {
                        Err(e) => Err(e.to_string()),
                        Ok(ctx) => match spec.w_policy {
                            WPolicy::Fixed { .. } => timed(spec.repetitions, || {
                                fa_astar(query, &ctx).map_err(|e| e.to_string())
                            }),
                            WPolicy::Escalate { w_max, w_step } => match visgraph(&mut reference) {
                                Err(e) => Err(e),
                                Ok(refr) => {
                                    let policy = EscalationPolicy {
                                        w_max,
                                        w_step,
                                        ..Default::default()
                                    };
                                    let target_len = if refr.found { refr.length } else { 0.0 };
                                    timed(spec.repetitions, || {
                                        fa_astar_escalating(query, &ctx, target_len, policy)
                                            .map_err(|e| e.to_string())
                                    })
                                }
                            },
                        },
                    }
                }
            };
            let mut row = RunRow {
                map_id: sm.id.clone(),
                seed: sm.seed,
                density: sm.map.density(),
                clusters,
                query: query_label.clone(),
                algorithm,
                w: None,
                length: 0.0,
                evaluated_nodes: 0,
                expansions: 0,
                t_mean_s: 0.0,
                t_median_s: 0.0,
                found: false,
                pruning_loss: false,
                v1,
                preprocess_s: prepared.preprocess_s,
                waypoints: String::new(),
                note: String::new(),
            };
            match outcome {
                Err(e) => row.note = format!("error: {e}"),
                Ok((r, times, stable)) => {
                    let mut secs: Vec<f64> = times.iter().map(Duration::as_secs_f64).collect();
                    row.t_mean_s = secs.iter().sum::<f64>() / secs.len() as f64;
                    row.t_median_s = median(&mut secs);
                    row.w = r.w;
                    row.length = r.length;
                    row.evaluated_nodes = r.evaluated_nodes;
                    row.expansions = r.expansions;
                    row.found = r.found;
                    row.waypoints = format_waypoints(&r.waypoints);
                    let mut notes = Vec::new();
                    if !stable {
                        notes.push("results differed between repetitions".to_string());
                    }
                    if algorithm == Algorithm::FaAstar {
                        if r.dead_ends > 0 {
                            notes.push(format!("dead_ends={}", r.dead_ends));
                        }
                        if !r.attempts.is_empty() {
                            let ws: Vec<String> =
                                r.attempts.iter().map(|(w, _)| format!("{w:.1}")).collect();
                            notes.push(format!("w_tried={}", ws.join("|")));
                        }
                        if !r.found {
                            match visgraph(&mut reference) {
                                Ok(v) if v.found => row.pruning_loss = true,
                                Ok(_) => {}
                                Err(e) => notes.push(format!("reference error: {e}")),
                            }
                        }
                    }
                    row.note = notes.join(" ");
                }
            }
            rows.push(row);
        }
    }
    rows
}

/// Runs the whole suite. Maps are processed in parallel; rows come back in
/// spec order (map, query, algorithm).
pub fn run_suite(spec: &BenchSpec) -> Result<SuiteReport, BenchError> {
    spec.validate().map_err(BenchError::Spec)?;
    let maps = materialize(spec)?;
    let counter = AtomicUsize::new(0);
    let work = || -> Vec<Vec<RunRow>> {
        maps.par_iter()
            .map(|m| rows_for_map(m, spec, &counter))
            .collect()
    };
    let per_map = match spec.threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| BenchError::Spec(e.to_string()))?
            .install(work),
        None => work(),
    };
    let cfg = planner_config(spec);
    let mut metadata = BTreeMap::new();
    metadata.insert("rng".into(), RNG_ALGORITHM.into());
    metadata.insert(
        "line_of_sight".into(),
        "slab ray cast shared by all planners (Theta* does not use Bresenham)".into(),
    );
    metadata.insert(
        "diagonal_move_allowed".into(),
        cfg.diagonal_move_allowed.to_string(),
    );
    metadata.insert(
        "vertex_touch_blocks".into(),
        cfg.visibility.vertex_touch_blocks.to_string(),
    );
    metadata.insert("vertex_mode".into(), spec.vertex_mode.to_string());
    metadata.insert(
        "visgraph_vertex_mode".into(),
        VertexMode::ConvexCorner.to_string(),
    );
    metadata.insert("repetitions".into(), spec.repetitions.to_string());
    metadata.insert("crate_version".into(), env!("CARGO_PKG_VERSION").into());
    Ok(SuiteReport {
        rows: per_map.into_iter().flatten().collect(),
        preprocess_runs: counter.load(Ordering::Relaxed),
        metadata,
    })
}
