//! One-time, query-independent map preprocessing.
//!
//! Obstacle cells are grouped by single-linkage clustering under the
//! center-to-center distance between cells. With a hard cutoff, single linkage
//! is exactly the connected components of the threshold graph; for unit cells
//! `d < sqrt(2)` means edge-adjacent (4-connectivity) and `d <= sqrt(2)` adds
//! the diagonal neighbours (8-connectivity).
//!
//! Each cluster then contributes vertices in two tables:
//!
//! * `V_all`: every corner of every cell of the cluster,
//! * `V_convex`: the subset a path may turn at, either the cluster's convex
//!   hull vertices or all of its convex corners, with points on the map border
//!   removed.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{convex_hull, Point};
use crate::grid_map::{Cell, GridMap, Node};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ClusterId(pub u32);

impl fmt::Display for ClusterId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Which cluster vertices are kept as turning points.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexMode {
    /// Convex hull vertices of each cluster.
    #[default]
    Hull,
    /// Every corner with an inner obstacle angle below 180 degrees.
    ConvexCorner,
}

impl fmt::Display for VertexMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VertexMode::Hull => "hull",
            VertexMode::ConvexCorner => "convex_corner",
        })
    }
}

impl std::str::FromStr for VertexMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "hull" => Ok(VertexMode::Hull),
            "convex_corner" | "convex-corner" => Ok(VertexMode::ConvexCorner),
            other => Err(format!(
                "unknown vertex mode `{other}` (hull, convex_corner)"
            )),
        }
    }
}

struct DisjointSet {
    parent: Vec<u32>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        let mut root = x;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        while self.parent[x as usize] != root {
            let next = self.parent[x as usize];
            self.parent[x as usize] = root;
            x = next;
        }
        root
    }

    fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        match self.rank[ra as usize].cmp(&self.rank[rb as usize]) {
            std::cmp::Ordering::Less => self.parent[ra as usize] = rb,
            std::cmp::Ordering::Greater => self.parent[rb as usize] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb as usize] = ra;
                self.rank[ra as usize] += 1;
            }
        }
    }
}

/// Partition of the occupied cells into clusters.
///
/// Cluster ids are dense and ordered by each cluster's first cell in
/// row-major order, so they do not depend on how the cells were enumerated.
#[derive(Clone, Debug)]
pub struct ClusterSet {
    width: u32,
    cluster_of: Vec<Option<ClusterId>>,
    clusters: Vec<Vec<Cell>>,
    diagonal_move_allowed: bool,
}

impl ClusterSet {
    pub fn cluster_of(&self, cell: Cell) -> Option<ClusterId> {
        if cell.x < 0 || cell.y < 0 || cell.x as u32 >= self.width {
            return None;
        }
        let idx = cell.y as usize * self.width as usize + cell.x as usize;
        self.cluster_of.get(idx).copied().flatten()
    }

    /// Cells of one cluster in row-major order.
    pub fn cells(&self, id: ClusterId) -> &[Cell] {
        &self.clusters[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ClusterId> {
        (0..self.clusters.len() as u32).map(ClusterId)
    }

    pub fn diagonal_move_allowed(&self) -> bool {
        self.diagonal_move_allowed
    }
}

/// Single-linkage clustering of the occupied cells with a `sqrt(2)` cutoff:
/// strict `<` when diagonal moves between obstacles are allowed, `<=`
/// otherwise.
pub fn cluster_obstacles(map: &GridMap, diagonal_move_allowed: bool) -> ClusterSet {
    let (w, h) = (map.width() as i64, map.height() as i64);
    let n = (w * h) as usize;
    let mut dsu = DisjointSet::new(n);
    // forward half-neighbourhood; the rest is covered symmetrically
    let offsets: &[(i64, i64)] = if diagonal_move_allowed {
        &[(1, 0), (0, 1)]
    } else {
        &[(1, 0), (0, 1), (1, 1), (-1, 1)]
    };
    for cy in 0..h {
        for cx in 0..w {
            if !map.is_occupied(cx, cy) {
                continue;
            }
            for &(dx, dy) in offsets {
                if map.is_occupied(cx + dx, cy + dy) {
                    dsu.union(
                        map.linear(cx, cy) as u32,
                        map.linear(cx + dx, cy + dy) as u32,
                    );
                }
            }
        }
    }

    let mut cluster_of = vec![None; n];
    let mut clusters: Vec<Vec<Cell>> = Vec::new();
    let mut root_to_id: BTreeMap<u32, ClusterId> = BTreeMap::new();
    for (idx, slot) in cluster_of.iter_mut().enumerate() {
        let cell = map.cell_at(idx);
        if !map.is_cell_occupied(cell) {
            continue;
        }
        let root = dsu.find(idx as u32);
        let id = *root_to_id.entry(root).or_insert_with(|| {
            clusters.push(Vec::new());
            ClusterId(clusters.len() as u32 - 1)
        });
        *slot = Some(id);
        clusters[id.0 as usize].push(cell);
    }
    ClusterSet {
        width: map.width(),
        cluster_of,
        clusters,
        diagonal_move_allowed,
    }
}

/// One row of a vertex table: position, owning obstacle and cluster.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct VertexRow {
    pub node: Node,
    /// Row-major index `cy * W + cx` of the owning cell; the lowest `(cy, cx)`
    /// among the cluster's cells touching this corner.
    pub obstacle: usize,
    pub cluster: ClusterId,
}

/// A `|V| x 4` table of `(x, y, obstacle, cluster)` rows, grouped by cluster
/// and sorted by `(y, x)` within a cluster.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexTable {
    rows: Vec<VertexRow>,
}

impl VertexTable {
    pub fn rows(&self) -> &[VertexRow] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Debug dump: `[[x, y, obstacle_index, cluster_index], ...]`.
    pub fn to_json(&self) -> String {
        let rows: Vec<[i64; 4]> = self
            .rows
            .iter()
            .map(|r| {
                [
                    r.node.x as i64,
                    r.node.y as i64,
                    r.obstacle as i64,
                    r.cluster.0 as i64,
                ]
            })
            .collect();
        serde_json::to_string(&rows).expect("rows serialize")
    }
}

/// Corners of every cluster cell, deduplicated per cluster. The value is the
/// owning obstacle index.
fn cluster_corners(cs: &ClusterSet, map: &GridMap, id: ClusterId) -> BTreeMap<(i32, i32), usize> {
    let mut corners = BTreeMap::new();
    // cells arrive in row-major order, so the first writer is the lowest (cy, cx)
    for &cell in cs.cells(id) {
        let owner = map.linear(cell.x as i64, cell.y as i64);
        for c in cell.corners() {
            corners.entry((c.y, c.x)).or_insert(owner);
        }
    }
    corners
}

fn on_border(map: &GridMap, n: Node) -> bool {
    n.x == 0 || n.y == 0 || n.x as u32 == map.width() || n.y as u32 == map.height()
}

fn all_table(cs: &ClusterSet, map: &GridMap) -> VertexTable {
    let mut rows = Vec::new();
    for id in cs.ids() {
        for ((y, x), owner) in cluster_corners(cs, map, id) {
            rows.push(VertexRow {
                node: Node::new(x, y),
                obstacle: owner,
                cluster: id,
            });
        }
    }
    VertexTable { rows }
}

/// `(V_all, V_convex)` with convex hull vertices as turning points.
pub fn cluster_vertices_hull(cs: &ClusterSet, map: &GridMap) -> (VertexTable, VertexTable) {
    let v_all = all_table(cs, map);
    let mut rows = Vec::new();
    for id in cs.ids() {
        let corners = cluster_corners(cs, map, id);
        let pts: Vec<Point> = corners
            .keys()
            .map(|&(y, x)| Point::new(x as f64, y as f64))
            .collect();
        let mut hull: Vec<((i32, i32), usize)> = convex_hull(&pts)
            .into_iter()
            .map(|p| {
                let key = (p.y as i32, p.x as i32);
                (key, corners[&key])
            })
            .collect();
        hull.sort_unstable();
        for ((y, x), owner) in hull {
            let node = Node::new(x, y);
            if !on_border(map, node) {
                rows.push(VertexRow {
                    node,
                    obstacle: owner,
                    cluster: id,
                });
            }
        }
    }
    (v_all, VertexTable { rows })
}

/// `(V_all, V_convex)` with every convex corner as a turning point.
///
/// A corner is convex for its cluster when exactly one incident cell belongs
/// to the cluster, or exactly two do and they touch only diagonally (kept only
/// when diagonal moves between obstacles are allowed; otherwise such a point
/// cannot be passed).
pub fn cluster_vertices_convex_corners(
    cs: &ClusterSet,
    map: &GridMap,
) -> (VertexTable, VertexTable) {
    let v_all = all_table(cs, map);
    let mut rows = Vec::new();
    for id in cs.ids() {
        for ((y, x), owner) in cluster_corners(cs, map, id) {
            let node = Node::new(x, y);
            if on_border(map, node) {
                continue;
            }
            let [ll, lr, ul, ur] = node.incident_cells().map(|c| cs.cluster_of(c) == Some(id));
            let count = [ll, lr, ul, ur].iter().filter(|&&b| b).count();
            let convex = match count {
                1 => true,
                2 => cs.diagonal_move_allowed() && ((ll && ur) || (lr && ul)),
                _ => false,
            };
            if convex {
                rows.push(VertexRow {
                    node,
                    obstacle: owner,
                    cluster: id,
                });
            }
        }
    }
    (v_all, VertexTable { rows })
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Bounds {
    pub min_x: i32,
    pub min_y: i32,
    pub max_x: i32,
    pub max_y: i32,
}

/// Everything the focal planner needs about a map, computed once per map.
#[derive(Clone, Debug)]
pub struct Preprocessed {
    clusters: ClusterSet,
    mode: VertexMode,
    v_all: VertexTable,
    v_convex: VertexTable,
    all_by_cluster: Vec<std::ops::Range<usize>>,
    convex_by_cluster: Vec<std::ops::Range<usize>>,
    bounds: Vec<Bounds>,
}

impl Preprocessed {
    pub fn clusters(&self) -> &ClusterSet {
        &self.clusters
    }

    pub fn mode(&self) -> VertexMode {
        self.mode
    }

    pub fn v_all(&self) -> &VertexTable {
        &self.v_all
    }

    pub fn v_convex(&self) -> &VertexTable {
        &self.v_convex
    }

    pub fn all_rows(&self, id: ClusterId) -> &[VertexRow] {
        &self.v_all.rows[self.all_by_cluster[id.0 as usize].clone()]
    }

    pub fn convex_rows(&self, id: ClusterId) -> &[VertexRow] {
        &self.v_convex.rows[self.convex_by_cluster[id.0 as usize].clone()]
    }

    /// Distinct `V_convex` points over all clusters, sorted.
    pub fn convex_nodes(&self) -> Vec<Node> {
        let set: BTreeSet<Node> = self.v_convex.rows.iter().map(|r| r.node).collect();
        set.into_iter().collect()
    }

    pub(crate) fn bounds(&self, id: ClusterId) -> Bounds {
        self.bounds[id.0 as usize]
    }
}

fn ranges(table: &VertexTable, clusters: usize) -> Vec<std::ops::Range<usize>> {
    let mut out = vec![0..0; clusters];
    let mut start = 0;
    while start < table.rows.len() {
        let id = table.rows[start].cluster;
        let mut end = start;
        while end < table.rows.len() && table.rows[end].cluster == id {
            end += 1;
        }
        out[id.0 as usize] = start..end;
        start = end;
    }
    out
}

/// Clusters the map and builds both vertex tables for `mode`.
pub fn preprocess(map: &GridMap, diagonal_move_allowed: bool, mode: VertexMode) -> Preprocessed {
    let clusters = cluster_obstacles(map, diagonal_move_allowed);
    let (v_all, v_convex) = match mode {
        VertexMode::Hull => cluster_vertices_hull(&clusters, map),
        VertexMode::ConvexCorner => cluster_vertices_convex_corners(&clusters, map),
    };
    let bounds = clusters
        .clusters
        .iter()
        .map(|cells| {
            let mut b = Bounds {
                min_x: i32::MAX,
                min_y: i32::MAX,
                max_x: i32::MIN,
                max_y: i32::MIN,
            };
            for c in cells {
                b.min_x = b.min_x.min(c.x);
                b.min_y = b.min_y.min(c.y);
                b.max_x = b.max_x.max(c.x + 1);
                b.max_y = b.max_y.max(c.y + 1);
            }
            b
        })
        .collect();
    Preprocessed {
        all_by_cluster: ranges(&v_all, clusters.len()),
        convex_by_cluster: ranges(&v_convex, clusters.len()),
        clusters,
        mode,
        v_all,
        v_convex,
        bounds,
    }
}
