//! Any-angle pathfinding on occupancy grids.
//!
//! The focal planner ([`search::fa_astar`]) searches a visibility graph whose
//! nodes are obstacle-cluster vertices, but at each expansion only considers
//! the vertices of clusters near the straight line to the target. Grid A*,
//! Theta* and full visibility-graph A* are provided as baselines, along with
//! map generators and a benchmark harness.

pub mod bench;
pub mod candidate_vertices;
pub mod geometry;
pub mod grid_map;
pub mod preprocess;
pub mod search;
pub mod visibility;
