use std::time::Instant;

use super::{check_query, Algorithm, OpenList, PathResult, PlannerConfig, SearchError};
use crate::grid_map::{GridMap, Node, Query};
use crate::visibility::nodes_visible;

const DIRECTIONS: [(i32, i32); 8] = [
    (1, 0),
    (0, 1),
    (-1, 0),
    (0, -1),
    (1, 1),
    (-1, 1),
    (-1, -1),
    (1, -1),
];

fn moves(node: Node, map: &GridMap, cfg: PlannerConfig) -> impl Iterator<Item = Node> + '_ {
    let count = if cfg.diagonal_move_allowed { 8 } else { 4 };
    DIRECTIONS[..count].iter().filter_map(move |&(dx, dy)| {
        let next = Node::new(node.x + dx, node.y + dy);
        (map.contains_node(next) && nodes_visible(node, next, map, cfg.visibility)).then_some(next)
    })
}

fn run(
    query: Query,
    map: &GridMap,
    cfg: PlannerConfig,
    shortcut: bool,
) -> Result<PathResult, SearchError> {
    check_query(query, map)?;
    let algorithm = if shortcut {
        Algorithm::ThetaStar
    } else {
        Algorithm::AstarGrid
    };
    let Query { start, target } = query;
    if start == target {
        return Ok(PathResult::trivial(algorithm, start));
    }
    let clock = Instant::now();
    let mut open = OpenList::new();
    open.insert(start, start, 0.0, start.distance(target));
    let mut expansions = 0;
    while let Some(current) = open.pop() {
        expansions += 1;
        if current == target {
            break;
        }
        open.close(current);
        let entry = *open.get(current).expect("popped nodes are stored");
        for next in moves(current, map, cfg) {
            if open.is_closed(next) {
                continue;
            }
            let h = next.distance(target);
            let parent = entry.parent;
            if shortcut && parent != current && nodes_visible(parent, next, map, cfg.visibility) {
                let g = open.get(parent).expect("parents are stored").g + parent.distance(next);
                open.refresh(next, parent, g, h);
            } else {
                open.refresh(next, current, entry.g + current.distance(next), h);
            }
        }
    }
    Ok(PathResult::from_open(
        algorithm,
        &open,
        target,
        expansions,
        clock.elapsed(),
    ))
}

/// A* over lattice corners with unit (and, if allowed, diagonal) moves. A
/// move is legal when its segment is visible.
pub fn astar_grid(
    query: Query,
    map: &GridMap,
    cfg: PlannerConfig,
) -> Result<PathResult, SearchError> {
    run(query, map, cfg, false)
}

/// Basic Theta*: grid A* whose relaxation connects a neighbour straight to
/// the current node's parent whenever the two see each other.
pub fn theta_star(
    query: Query,
    map: &GridMap,
    cfg: PlannerConfig,
) -> Result<PathResult, SearchError> {
    run(query, map, cfg, true)
}
