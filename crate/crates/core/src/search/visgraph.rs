use std::time::Instant;

use super::{check_query, Algorithm, OpenList, PathResult, PlannerConfig, SearchError};
use crate::grid_map::{GridMap, Node, Query};
use crate::preprocess::{preprocess, VertexMode};
use crate::visibility::nodes_visible;

/// Convex obstacle corners of `map`, the node set of the visibility graph.
pub fn visgraph_nodes(map: &GridMap, diagonal_move_allowed: bool) -> Vec<Node> {
    preprocess(map, diagonal_move_allowed, VertexMode::ConvexCorner).convex_nodes()
}

/// A* over the visibility graph on `{start, target} ∪ nodes`. Edges are found
/// at expansion time, and a visibility test is skipped whenever the edge
/// could not improve the neighbour or beat the best path to the target so
/// far.
///
/// Exact under strict visibility. Under the touch rule a path that would
/// have to run along an obstacle edge needs bends at non-corner lattice
/// points, which this graph does not contain, so such queries can come back
/// not found or longer than the lattice optimum.
pub fn astar_visgraph(
    query: Query,
    map: &GridMap,
    nodes: &[Node],
    cfg: PlannerConfig,
) -> Result<PathResult, SearchError> {
    check_query(query, map)?;
    let Query { start, target } = query;
    if start == target {
        return Ok(PathResult::trivial(Algorithm::AstarVisgraph, start));
    }
    let clock = Instant::now();
    let mut graph: Vec<Node> = nodes.to_vec();
    graph.push(target);
    graph.sort_unstable();
    graph.dedup();

    let mut open = OpenList::new();
    open.insert(start, start, 0.0, start.distance(target));
    let mut expansions = 0;
    while let Some(current) = open.pop() {
        expansions += 1;
        if current == target {
            break;
        }
        open.close(current);
        let g_cur = open.get(current).expect("popped nodes are stored").g;
        for &next in &graph {
            if next == current {
                continue;
            }
            let g = g_cur + current.distance(next);
            let h = next.distance(target);
            match open.get(next) {
                Some(e) if e.closed || g >= e.g => continue,
                _ => {}
            }
            if let Some(t) = open.get(target) {
                if g + h >= t.g {
                    continue;
                }
            }
            if nodes_visible(current, next, map, cfg.visibility) {
                open.refresh(next, current, g, h);
            }
        }
    }
    Ok(PathResult::from_open(
        Algorithm::AstarVisgraph,
        &open,
        target,
        expansions,
        clock.elapsed(),
    ))
}
