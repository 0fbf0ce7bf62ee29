//! Ray-cast line of sight over the obstacle grid.
//!
//! A segment is tested against each obstacle cell with the slab method: the
//! parameter intervals over which the segment lies within the cell's x and y
//! extents are intersected, and the segment meets the cell when the latest
//! entry precedes the earliest exit. With strict comparison a segment that only
//! grazes a cell corner passes; with `vertex_touch_blocks` any contact away
//! from the segment's own endpoints blocks.
//!
//! Only cells near the segment are tested. They are found by sweeping the
//! columns the segment spans and, per column, the rows covered by the
//! segment's y-range there (plus one cell of slack on each side).
//!
//! Segments running along a grid line need a separate rule because no single
//! cell is entered. Strict mode blocks such a segment where the cells on both
//! sides are obstacles (cells outside the map count as obstacles here, so the
//! map border acts as a wall); touch mode blocks it where either side is an
//! obstacle.

use std::collections::BTreeSet;
use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::geometry::Point;
use crate::grid_map::{Cell, GridMap, Node};
use crate::preprocess::{ClusterId, ClusterSet};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct VisibilityConfig {
    /// Use `<=` in the slab comparison: passing through a cell corner blocks.
    pub vertex_touch_blocks: bool,
}

impl VisibilityConfig {
    pub const STRICT: Self = Self {
        vertex_touch_blocks: false,
    };
    pub const TOUCH_BLOCKS: Self = Self {
        vertex_touch_blocks: true,
    };

    /// Strict when diagonal moves between obstacles are allowed, touch
    /// blocking otherwise.
    pub fn for_diagonal_rule(diagonal_move_allowed: bool) -> Self {
        Self {
            vertex_touch_blocks: !diagonal_move_allowed,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Contact {
    /// positive-length overlap with the open cell or, for touch mode, any
    /// contact not at a segment endpoint
    Strict,
    Touch,
    /// any contact with the closed cell, endpoints included
    Closed,
}

/// Parameter interval `[enter, exit]` of `p + t (q - p)` inside the closed
/// cell, clipped to `t in [0, 1]`. For an axis with zero extent the
/// perpendicular coordinate must be inside the open (or closed) cell range.
fn slab(p: Point, q: Point, cell: Cell, open_perpendicular: bool) -> Option<(f64, f64)> {
    let d = q - p;
    let mut enter = 0.0f64;
    let mut exit = 1.0f64;
    for (pc, dc, lo, hi) in [
        (p.x, d.x, cell.x as f64, cell.x as f64 + 1.0),
        (p.y, d.y, cell.y as f64, cell.y as f64 + 1.0),
    ] {
        if dc == 0.0 {
            let inside = if open_perpendicular {
                lo < pc && pc < hi
            } else {
                lo <= pc && pc <= hi
            };
            if !inside {
                return None;
            }
        } else {
            let ta = (lo - pc) / dc;
            let tb = (hi - pc) / dc;
            enter = enter.max(ta.min(tb));
            exit = exit.min(ta.max(tb));
        }
    }
    (enter <= exit).then_some((enter, exit))
}

fn contacts(p: Point, q: Point, cell: Cell, contact: Contact) -> bool {
    match contact {
        Contact::Strict => matches!(slab(p, q, cell, true), Some((a, b)) if a < b),
        Contact::Touch => match slab(p, q, cell, false) {
            Some((a, b)) => a < b || (a > 0.0 && a < 1.0),
            None => false,
        },
        Contact::Closed => {
            if p == q {
                let (x, y) = (cell.x as f64, cell.y as f64);
                return x <= p.x && p.x <= x + 1.0 && y <= p.y && p.y <= y + 1.0;
            }
            slab(p, q, cell, false).is_some()
        }
    }
}

/// Does the segment `pq` pass through `cell` under `cfg`?
pub fn segment_intersects_cell(p: Point, q: Point, cell: Cell, cfg: VisibilityConfig) -> bool {
    if p == q {
        return false;
    }
    let contact = if cfg.vertex_touch_blocks {
        Contact::Touch
    } else {
        Contact::Strict
    };
    contacts(p, q, cell, contact)
}

/// Visits candidate cells near `pq` (a superset of those it meets) that are
/// occupied.
fn sweep_occupied<B>(
    p: Point,
    q: Point,
    map: &GridMap,
    mut f: impl FnMut(Cell) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let (w, h) = (map.width() as i64, map.height() as i64);
    let d = q - p;
    let (xmin, xmax) = (p.x.min(q.x), p.x.max(q.x));
    let (ymin, ymax) = (p.y.min(q.y), p.y.max(q.y));
    let c0 = (xmin.floor() as i64 - 1).max(0);
    let c1 = (xmax.ceil() as i64).min(w - 1);
    for cx in c0..=c1 {
        let (ylo, yhi) = if d.x == 0.0 {
            (ymin, ymax)
        } else {
            let ta = (cx as f64 - p.x) / d.x;
            let tb = (cx as f64 + 1.0 - p.x) / d.x;
            let t0 = ta.min(tb).max(0.0);
            let t1 = ta.max(tb).min(1.0);
            if t0 > t1 {
                continue;
            }
            let ya = p.y + t0 * d.y;
            let yb = p.y + t1 * d.y;
            (ya.min(yb), ya.max(yb))
        };
        let r0 = (ylo.floor() as i64 - 1).max(0);
        let r1 = (yhi.ceil() as i64).min(h - 1);
        for cy in r0..=r1 {
            if map.is_occupied(cx, cy) {
                f(Cell::new(cx as i32, cy as i32))?;
            }
        }
    }
    ControlFlow::Continue(())
}

/// Grid-line rule for axis-parallel segments on integer coordinates.
fn sweep_gridline<B>(
    p: Point,
    q: Point,
    map: &GridMap,
    cfg: VisibilityConfig,
    mut f: impl FnMut(Cell) -> ControlFlow<B>,
) -> ControlFlow<B> {
    let vertical = p.x == q.x;
    let (line, a, b) = if vertical {
        (p.x, p.y, q.y)
    } else {
        (p.y, p.x, q.x)
    };
    let line = line as i64;
    let (lo, hi) = (a.min(b), a.max(b));
    let occ = |along: i64, across: i64| -> (Cell, bool, bool) {
        let (cx, cy) = if vertical {
            (across, along)
        } else {
            (along, across)
        };
        let inside = map.in_bounds(cx, cy);
        (
            Cell::new(cx as i32, cy as i32),
            inside,
            inside && map.is_occupied(cx, cy),
        )
    };
    for step in (lo.floor() as i64)..(hi.ceil() as i64) {
        let (c1, in1, o1) = occ(step, line - 1);
        let (c2, in2, o2) = occ(step, line);
        let blocked = if cfg.vertex_touch_blocks {
            o1 || o2
        } else {
            (o1 || !in1) && (o2 || !in2)
        };
        if blocked {
            if o1 {
                f(c1)?;
            }
            if o2 {
                f(c2)?;
            }
            if !o1 && !o2 {
                // only reachable for segments entirely outside the map
                f(c1)?;
            }
        }
    }
    ControlFlow::Continue(())
}

fn on_gridline(p: Point, q: Point) -> bool {
    (p.x == q.x && p.x.fract() == 0.0) || (p.y == q.y && p.y.fract() == 0.0)
}

fn for_each_blocking_cell<B>(
    p: Point,
    q: Point,
    map: &GridMap,
    cfg: VisibilityConfig,
    mut f: impl FnMut(Cell) -> ControlFlow<B>,
) -> ControlFlow<B> {
    if p == q {
        return ControlFlow::Continue(());
    }
    if on_gridline(p, q) {
        return sweep_gridline(p, q, map, cfg, f);
    }
    sweep_occupied(p, q, map, |cell| {
        if segment_intersects_cell(p, q, cell, cfg) {
            f(cell)
        } else {
            ControlFlow::Continue(())
        }
    })
}

/// Line of sight between two points. A point always sees itself.
pub fn visible(p: Point, q: Point, map: &GridMap, cfg: VisibilityConfig) -> bool {
    for_each_blocking_cell(p, q, map, cfg, |_| ControlFlow::Break(())).is_continue()
}

/// [`visible`] for lattice points.
#[inline]
pub fn nodes_visible(a: Node, b: Node, map: &GridMap, cfg: VisibilityConfig) -> bool {
    visible(a.to_point(), b.to_point(), map, cfg)
}

/// Obstacle cells that block `pq`, in sweep order.
pub fn blocking_cells(p: Point, q: Point, map: &GridMap, cfg: VisibilityConfig) -> Vec<Cell> {
    let mut out = Vec::new();
    let _ = for_each_blocking_cell(p, q, map, cfg, |c| {
        out.push(c);
        ControlFlow::<()>::Continue(())
    });
    out.sort_unstable();
    out.dedup();
    out
}

/// Clusters owning at least one cell that blocks `pq`. Empty exactly when
/// `visible(p, q)`.
pub fn blocking_clusters(
    p: Point,
    q: Point,
    map: &GridMap,
    clusters: &ClusterSet,
    cfg: VisibilityConfig,
) -> BTreeSet<ClusterId> {
    let mut out = BTreeSet::new();
    let _ = for_each_blocking_cell(p, q, map, cfg, |c| {
        if let Some(id) = clusters.cluster_of(c) {
            out.insert(id);
        }
        ControlFlow::<()>::Continue(())
    });
    out
}

/// Obstacle cells whose closed square meets the closed segment `pq` at all,
/// endpoints and corner contact included.
pub fn touching_cells(p: Point, q: Point, map: &GridMap) -> Vec<Cell> {
    let mut out = Vec::new();
    let _ = sweep_occupied(p, q, map, |cell| {
        if contacts(p, q, cell, Contact::Closed) {
            out.push(cell);
        }
        ControlFlow::<()>::Continue(())
    });
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid_map::generate_random;
    use crate::preprocess::cluster_obstacles;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    fn map_with(w: u32, h: u32, cells: &[(i32, i32)]) -> GridMap {
        GridMap::from_cells(w, h, cells.iter().map(|&(x, y)| Cell::new(x, y))).unwrap()
    }

    const S: VisibilityConfig = VisibilityConfig::STRICT;
    const T: VisibilityConfig = VisibilityConfig::TOUCH_BLOCKS;

    #[test]
    fn slab_examples() {
        let cell = Cell::new(1, 1);
        assert!(segment_intersects_cell(p(0., 0.), p(4., 4.), cell, S));
        assert!(!segment_intersects_cell(p(0., 0.), p(4., 0.), cell, S));
        assert!(!segment_intersects_cell(p(0., 0.), p(4., 0.), cell, T));
        let below = Cell::new(1, 0);
        assert!(!segment_intersects_cell(p(0., 0.), p(2., 2.), below, S));
        assert!(segment_intersects_cell(p(0., 0.), p(2., 2.), below, T));
    }

    #[test]
    fn endpoint_contact_does_not_block() {
        let cell = Cell::new(2, 2);
        assert!(!segment_intersects_cell(p(0., 0.), p(2., 2.), cell, T));
        assert!(!segment_intersects_cell(p(3., 3.), p(5., 4.), cell, T));
        // running along an edge touches the closed cell
        assert!(segment_intersects_cell(p(2., 0.), p(2., 5.), cell, T));
        assert!(!segment_intersects_cell(p(2., 0.), p(2., 5.), cell, S));
        assert!(segment_intersects_cell(p(2.5, 0.), p(2.5, 5.), cell, S));
    }

    #[test]
    fn empty_map_sees_everything() {
        let map = GridMap::new(10, 10);
        for (a, b) in [
            ((0., 0.), (10., 10.)),
            ((0., 0.), (10., 0.)),
            ((3.5, 2.), (1., 9.)),
        ] {
            assert!(visible(p(a.0, a.1), p(b.0, b.1), &map, S));
            assert!(visible(p(a.0, a.1), p(b.0, b.1), &map, T));
        }
    }

    #[test]
    fn corner_pass_depends_on_mode() {
        // the diagonal runs through the interior of cell (2, 2)
        let map = map_with(10, 10, &[(2, 2)]);
        assert!(!visible(p(0., 0.), p(5., 5.), &map, S));
        assert!(!visible(p(0., 0.), p(5., 5.), &map, T));
        let map = map_with(10, 10, &[(3, 2)]);
        assert!(visible(p(0., 0.), p(5., 5.), &map, S));
        assert!(!visible(p(0., 0.), p(5., 5.), &map, T));
        let map = map_with(10, 10, &[(2, 1)]);
        assert!(visible(p(0., 0.), p(5., 5.), &map, S));
        assert!(!visible(p(0., 0.), p(5., 5.), &map, T));
    }

    #[test]
    fn gridline_rules() {
        // wall below and above the line y = 2 between x = 1 and x = 2
        let both = map_with(10, 10, &[(1, 1), (1, 2)]);
        assert!(!visible(p(0., 2.), p(4., 2.), &both, S));
        let one = map_with(10, 10, &[(1, 1)]);
        assert!(visible(p(0., 2.), p(4., 2.), &one, S));
        assert!(!visible(p(0., 2.), p(4., 2.), &one, T));
        // sliding along the map border past an obstacle
        let border = map_with(10, 10, &[(3, 0)]);
        assert!(!visible(p(0., 0.), p(6., 0.), &border, S));
        assert!(visible(p(0., 0.), p(3., 0.), &border, S));
        assert!(visible(p(0., 0.), p(6., 0.), &GridMap::new(10, 10), S));
    }

    #[test]
    fn diagonal_pinch_is_open_only_in_strict_mode() {
        let map = map_with(10, 10, &[(1, 0), (0, 1)]);
        assert!(visible(p(0., 0.), p(2., 2.), &map, S));
        assert!(!visible(p(0., 0.), p(2., 2.), &map, T));
    }

    #[test]
    fn symmetry_and_consistency_on_random_map() {
        let map = generate_random(30, 30, 0.25, 3).unwrap();
        let cs = cluster_obstacles(&map, true);
        let mut checked = 0;
        for ax in (0..=30).step_by(3) {
            for ay in (0..=30).step_by(5) {
                for bx in (0..=30).step_by(4) {
                    for by in (0..=30).step_by(7) {
                        let (a, b) = (p(ax as f64, ay as f64), p(bx as f64, by as f64));
                        for cfg in [S, T] {
                            let v = visible(a, b, &map, cfg);
                            assert_eq!(v, visible(b, a, &map, cfg));
                            assert_eq!(v, blocking_clusters(a, b, &map, &cs, cfg).is_empty());
                        }
                        // touch mode only removes visibility
                        if visible(a, b, &map, T) {
                            assert!(visible(a, b, &map, S));
                        }
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 1000);
    }

    #[test]
    fn sweep_matches_bounding_box_scan() {
        // the column sweep must find every cell the bounding-box filter finds
        let map = generate_random(25, 25, 0.3, 12).unwrap();
        for (a, b) in [
            ((0., 0.), (25., 17.)),
            ((3., 24.), (21., 1.)),
            ((0.5, 3.25), (19.75, 8.5)),
        ] {
            let (a, b) = (p(a.0, a.1), p(b.0, b.1));
            for cfg in [S, T] {
                let mut brute = Vec::new();
                for cell in map.occupied_cells() {
                    let overlaps = (cell.x as f64) <= a.x.max(b.x)
                        && (cell.x as f64 + 1.0) >= a.x.min(b.x)
                        && (cell.y as f64) <= a.y.max(b.y)
                        && (cell.y as f64 + 1.0) >= a.y.min(b.y);
                    if overlaps && segment_intersects_cell(a, b, cell, cfg) {
                        brute.push(cell);
                    }
                }
                brute.sort_unstable();
                assert_eq!(blocking_cells(a, b, &map, cfg), brute);
            }
        }
    }

    #[test]
    fn blocking_clusters_examples() {
        let empty = GridMap::new(10, 10);
        let cs = cluster_obstacles(&empty, true);
        assert!(blocking_clusters(p(0., 0.), p(9., 9.), &empty, &cs, S).is_empty());

        let one = map_with(10, 10, &[(4, 4)]);
        let cs = cluster_obstacles(&one, true);
        assert_eq!(
            blocking_clusters(p(0., 0.), p(10., 10.), &one, &cs, S),
            BTreeSet::from([ClusterId(0)])
        );

        let two = map_with(10, 10, &[(2, 2), (6, 6)]);
        let cs = cluster_obstacles(&two, true);
        let expected: BTreeSet<ClusterId> = two
            .occupied_cells()
            .filter(|&c| segment_intersects_cell(p(0., 0.5), p(10., 9.5), c, S))
            .filter_map(|c| cs.cluster_of(c))
            .collect();
        assert_eq!(expected.len(), 2);
        assert_eq!(
            blocking_clusters(p(0., 0.5), p(10., 9.5), &two, &cs, S),
            expected
        );
    }

    #[test]
    fn removing_an_obstacle_never_hides() {
        let mut map = generate_random(20, 20, 0.3, 8).unwrap();
        let pairs: Vec<(Point, Point)> = (0..200)
            .map(|i| {
                let a = p((i * 7 % 21) as f64, (i * 3 % 21) as f64);
                let b = p((i * 11 % 21) as f64, (i * 13 % 21) as f64);
                (a, b)
            })
            .collect();
        let before: Vec<bool> = pairs.iter().map(|&(a, b)| visible(a, b, &map, S)).collect();
        let victim = map.occupied_cells().nth(10).unwrap();
        map.set_occupied(victim, false).unwrap();
        for (&(a, b), &was) in pairs.iter().zip(&before) {
            if was {
                assert!(visible(a, b, &map, S));
            }
        }
    }

    #[test]
    fn touching_includes_endpoints() {
        let map = map_with(10, 10, &[(2, 2), (5, 5)]);
        let cells = touching_cells(p(0., 0.), p(2., 2.), &map);
        assert_eq!(cells, vec![Cell::new(2, 2)]);
        assert!(touching_cells(p(0., 0.), p(1., 3.), &map).is_empty());
    }
}
