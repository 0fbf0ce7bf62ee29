//! Occupancy grids, seeded map generators and map file formats.
//!
//! Obstacles are closed unit squares `[cx, cx + 1] x [cy, cy + 1]`. Search
//! nodes live on the integer lattice corners `(x, y)` with `0 <= x <= W` and
//! `0 <= y <= H`.

use std::collections::BTreeSet;
use std::fmt;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::Point;

/// Identifier of the PRNG behind every seeded generator. Written into
/// benchmark metadata so a map can be traced back to its generator.
pub const RNG_ALGORITHM: &str = "chacha8 (rand_chacha 0.3)";

#[derive(Debug, Error, PartialEq)]
pub enum MapError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("cell ({0}, {1}) is outside the map")]
    CellOutOfBounds(i64, i64),
    #[error("obstacle fraction {0} is not in [0, 1]")]
    InvalidFraction(f64),
    #[error("map generation failed: {0}")]
    Generation(String),
    #[error("invalid json map: {0}")]
    Json(String),
}

/// An obstacle cell, addressed by its lower-left lattice corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Cell {
    pub x: i32,
    pub y: i32,
}

impl Cell {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    /// The four lattice corners, counter-clockwise from the lower-left one.
    pub fn corners(self) -> [Node; 4] {
        [
            Node::new(self.x, self.y),
            Node::new(self.x + 1, self.y),
            Node::new(self.x + 1, self.y + 1),
            Node::new(self.x, self.y + 1),
        ]
    }
}

/// A lattice corner point; the unit every planner searches over.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Node {
    pub x: i32,
    pub y: i32,
}

impl Node {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn to_point(self) -> Point {
        Point::new(self.x as f64, self.y as f64)
    }

    pub fn distance(self, other: Node) -> f64 {
        let dx = (self.x - other.x) as f64;
        let dy = (self.y - other.y) as f64;
        dx.hypot(dy)
    }

    /// Cells that have this point as one of their corners (at most four).
    pub fn incident_cells(self) -> [Cell; 4] {
        [
            Cell::new(self.x - 1, self.y - 1),
            Cell::new(self.x, self.y - 1),
            Cell::new(self.x - 1, self.y),
            Cell::new(self.x, self.y),
        ]
    }
}

impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A start/target pair of lattice points.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub start: Node,
    pub target: Node,
}

impl Query {
    pub const fn new(start: Node, target: Node) -> Self {
        Self { start, target }
    }

    /// Lattice points are never strictly inside a cell, so the only
    /// requirement is that both endpoints lie on the map.
    pub fn is_valid_for(&self, map: &GridMap) -> bool {
        map.contains_node(self.start) && map.contains_node(self.target)
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}->{}", self.start, self.target)
    }
}

/// A `W x H` occupancy grid of unit obstacle cells.
#[derive(Clone, PartialEq, Eq)]
pub struct GridMap {
    width: u32,
    height: u32,
    occupied: Vec<bool>,
}

impl fmt::Debug for GridMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GridMap")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("obstacles", &self.obstacle_count())
            .finish()
    }
}

impl GridMap {
    /// An empty map.
    pub fn new(width: u32, height: u32) -> Self {
        Self {
            width,
            height,
            occupied: vec![false; width as usize * height as usize],
        }
    }

    pub fn from_cells(
        width: u32,
        height: u32,
        cells: impl IntoIterator<Item = Cell>,
    ) -> Result<Self, MapError> {
        let mut map = Self::new(width, height);
        for cell in cells {
            map.set_occupied(cell, true)?;
        }
        Ok(map)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn in_bounds(&self, cx: i64, cy: i64) -> bool {
        cx >= 0 && cy >= 0 && cx < self.width as i64 && cy < self.height as i64
    }

    pub fn contains_node(&self, node: Node) -> bool {
        node.x >= 0 && node.y >= 0 && node.x as u32 <= self.width && node.y as u32 <= self.height
    }

    pub fn contains_point(&self, p: Point) -> bool {
        p.x >= 0.0 && p.y >= 0.0 && p.x <= self.width as f64 && p.y <= self.height as f64
    }

    /// Cells outside the map read as free.
    #[inline]
    pub fn is_occupied(&self, cx: i64, cy: i64) -> bool {
        self.in_bounds(cx, cy) && self.occupied[self.linear(cx, cy)]
    }

    #[inline]
    pub fn is_cell_occupied(&self, cell: Cell) -> bool {
        self.is_occupied(cell.x as i64, cell.y as i64)
    }

    pub fn set_occupied(&mut self, cell: Cell, value: bool) -> Result<(), MapError> {
        let (cx, cy) = (cell.x as i64, cell.y as i64);
        if !self.in_bounds(cx, cy) {
            return Err(MapError::CellOutOfBounds(cx, cy));
        }
        let idx = self.linear(cx, cy);
        self.occupied[idx] = value;
        Ok(())
    }

    /// Row-major index `cy * W + cx`; also the obstacle id used in vertex tables.
    #[inline]
    pub fn linear(&self, cx: i64, cy: i64) -> usize {
        cy as usize * self.width as usize + cx as usize
    }

    pub fn cell_at(&self, index: usize) -> Cell {
        let w = self.width as usize;
        Cell::new((index % w) as i32, (index / w) as i32)
    }

    pub fn obstacle_count(&self) -> usize {
        self.occupied.iter().filter(|&&o| o).count()
    }

    /// Fraction of cells that are obstacles.
    pub fn density(&self) -> f64 {
        let total = self.occupied.len();
        if total == 0 {
            0.0
        } else {
            self.obstacle_count() as f64 / total as f64
        }
    }

    /// Occupied cells in row-major order (by `cy`, then `cx`).
    pub fn occupied_cells(&self) -> impl Iterator<Item = Cell> + '_ {
        self.occupied
            .iter()
            .enumerate()
            .filter(|(_, &o)| o)
            .map(|(i, _)| self.cell_at(i))
    }

    pub fn from_octile(text: &str) -> Result<Self, MapError> {
        let lines: Vec<&str> = text.lines().map(|l| l.trim_end_matches('\r')).collect();
        let header = |idx: usize| -> Result<&str, MapError> {
            lines.get(idx).copied().ok_or_else(|| MapError::Parse {
                line: idx + 1,
                message: "unexpected end of file in header".into(),
            })
        };
        let keyed = |idx: usize, key: &str| -> Result<u32, MapError> {
            let line = header(idx)?;
            let mut parts = line.split_whitespace();
            match (parts.next(), parts.next(), parts.next()) {
                (Some(k), Some(v), None) if k == key => v.parse().map_err(|_| MapError::Parse {
                    line: idx + 1,
                    message: format!("invalid {key} value {v:?}"),
                }),
                _ => Err(MapError::Parse {
                    line: idx + 1,
                    message: format!("expected `{key} <n>`, found {line:?}"),
                }),
            }
        };

        if header(0)?.trim() != "type octile" {
            return Err(MapError::Parse {
                line: 1,
                message: "expected `type octile`".into(),
            });
        }
        let height = keyed(1, "height")?;
        let width = keyed(2, "width")?;
        if header(3)?.trim() != "map" {
            return Err(MapError::Parse {
                line: 4,
                message: "expected `map`".into(),
            });
        }

        let mut map = Self::new(width, height);
        let body = &lines[4..];
        let mut rows = 0usize;
        for (i, row) in body.iter().enumerate() {
            let line_no = i + 5;
            if i >= height as usize {
                if body[i..].iter().all(|l| l.trim().is_empty()) {
                    break;
                }
                return Err(MapError::Parse {
                    line: line_no,
                    message: format!("more than {height} map rows"),
                });
            }
            let chars: Vec<char> = row.chars().collect();
            if chars.len() != width as usize {
                return Err(MapError::Parse {
                    line: line_no,
                    message: format!("row has {} characters, expected {width}", chars.len()),
                });
            }
            for (cx, ch) in chars.into_iter().enumerate() {
                let blocked = match ch {
                    '.' | 'G' => false,
                    '@' | 'O' | 'T' | 'S' | 'W' => true,
                    other => {
                        return Err(MapError::Parse {
                            line: line_no,
                            message: format!("unknown map character {other:?}"),
                        })
                    }
                };
                if blocked {
                    let idx = map.linear(cx as i64, i as i64);
                    map.occupied[idx] = true;
                }
            }
            rows += 1;
        }
        if rows != height as usize {
            return Err(MapError::Parse {
                line: 5 + rows,
                message: format!("found {rows} map rows, expected {height}"),
            });
        }
        Ok(map)
    }

    /// Octile text with `.` for free cells and `@` for obstacles.
    pub fn to_octile(&self) -> String {
        let mut out = format!(
            "type octile\nheight {}\nwidth {}\nmap\n",
            self.height, self.width
        );
        for cy in 0..self.height as i64 {
            for cx in 0..self.width as i64 {
                out.push(if self.is_occupied(cx, cy) { '@' } else { '.' });
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json_value(&self) -> JsonMap {
        let mut occupied: Vec<[i32; 2]> = self.occupied_cells().map(|c| [c.x, c.y]).collect();
        occupied.sort_unstable();
        JsonMap {
            width: self.width,
            height: self.height,
            occupied,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&self.to_json_value()).expect("map serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, MapError> {
        let raw: JsonMap = serde_json::from_str(text).map_err(|e| MapError::Json(e.to_string()))?;
        Self::from_cells(
            raw.width,
            raw.height,
            raw.occupied.into_iter().map(|[x, y]| Cell::new(x, y)),
        )
    }
}

/// `{"width": W, "height": H, "occupied": [[cx, cy], ...]}` with a sorted cell list.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct JsonMap {
    pub width: u32,
    pub height: u32,
    pub occupied: Vec<[i32; 2]>,
}

fn target_count(width: u32, height: u32, fraction: f64) -> Result<usize, MapError> {
    if !(0.0..=1.0).contains(&fraction) || fraction.is_nan() {
        return Err(MapError::InvalidFraction(fraction));
    }
    Ok((fraction * width as f64 * height as f64).round() as usize)
}

/// Uniformly random obstacles: exactly `round(fraction * W * H)` distinct cells.
pub fn generate_random(
    width: u32,
    height: u32,
    fraction: f64,
    seed: u64,
) -> Result<GridMap, MapError> {
    generate_random_with_clearance(width, height, fraction, seed, &[])
}

/// As [`generate_random`], but never places an obstacle on the `keep_free`
/// cells. Used to keep query endpoints from being walled in.
pub fn generate_random_with_clearance(
    width: u32,
    height: u32,
    fraction: f64,
    seed: u64,
    keep_free: &[Cell],
) -> Result<GridMap, MapError> {
    let count = target_count(width, height, fraction)?;
    let mut map = GridMap::new(width, height);
    let reserved: BTreeSet<usize> = keep_free
        .iter()
        .filter(|c| map.in_bounds(c.x as i64, c.y as i64))
        .map(|c| map.linear(c.x as i64, c.y as i64))
        .collect();
    let pool: Vec<usize> = (0..map.occupied.len())
        .filter(|i| !reserved.contains(i))
        .collect();
    if count > pool.len() {
        return Err(MapError::Generation(format!(
            "cannot place {count} obstacles in {} free cells",
            pool.len()
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in sample(&mut rng, pool.len(), count) {
        map.occupied[pool[i]] = true;
    }
    Ok(map)
}

#[derive(Clone, Copy, Debug)]
struct Blob {
    x0: i32,
    y0: i32,
    x1: i32,
    y1: i32,
}

/// Obstacles grouped into `cluster_count` separate blobs.
///
/// Every blob starts from a seed cell and accretes whole rows or columns on a
/// randomly chosen side, so position, size and aspect ratio vary per seed.
/// Blobs keep one free cell between each other and from the map border, which
/// keeps them distinct clusters under either diagonal rule. The final partial
/// row makes the total exactly `round(fraction * W * H)`.
pub fn generate_clustered(
    width: u32,
    height: u32,
    fraction: f64,
    cluster_count: usize,
    seed: u64,
) -> Result<GridMap, MapError> {
    let total = target_count(width, height, fraction)?;
    if cluster_count == 0 {
        return Err(MapError::Generation(
            "cluster_count must be at least 1".into(),
        ));
    }
    if total < cluster_count {
        return Err(MapError::Generation(format!(
            "{total} obstacle cells cannot form {cluster_count} clusters"
        )));
    }
    if width < 3 || height < 3 {
        return Err(MapError::Generation(
            "map too small for clustered obstacles".into(),
        ));
    }

    let (w, h) = (width as i32, height as i32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut map = GridMap::new(width, height);
    let mut blobs: Vec<Blob> = Vec::with_capacity(cluster_count);

    // A cell may join blob `owner` only if no other blob is within Chebyshev
    // distance 1 and it keeps a one-cell margin to the border.
    let placeable = |map: &GridMap, blobs: &[Blob], owner: Option<usize>, x: i32, y: i32| {
        if x < 1 || y < 1 || x > w - 2 || y > h - 2 || map.is_occupied(x as i64, y as i64) {
            return false;
        }
        blobs
            .iter()
            .enumerate()
            .all(|(i, b)| Some(i) == owner || x < b.x0 - 1 || x > b.x1 || y < b.y0 - 1 || y > b.y1)
    };

    const ATTEMPTS: usize = 20_000;
    for _ in 0..cluster_count {
        let mut placed = false;
        for _ in 0..ATTEMPTS {
            let x = rng.gen_range(1..w - 1);
            let y = rng.gen_range(1..h - 1);
            if placeable(&map, &blobs, None, x, y) {
                let i = map.linear(x as i64, y as i64);
                map.occupied[i] = true;
                blobs.push(Blob {
                    x0: x,
                    y0: y,
                    x1: x + 1,
                    y1: y + 1,
                });
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(MapError::Generation(format!(
                "could not seed {cluster_count} separated clusters"
            )));
        }
    }

    let mut remaining = total - cluster_count;
    let mut failures = 0usize;
    while remaining > 0 {
        if failures > ATTEMPTS {
            return Err(MapError::Generation(format!(
                "ran out of room with {remaining} obstacle cells left to place"
            )));
        }
        let i = rng.gen_range(0..blobs.len());
        let b = blobs[i];
        let side = rng.gen_range(0..4);
        let row: Vec<(i32, i32)> = match side {
            0 => (b.x0..b.x1).map(|x| (x, b.y0 - 1)).collect(),
            1 => (b.x0..b.x1).map(|x| (x, b.y1)).collect(),
            2 => (b.y0..b.y1).map(|y| (b.x0 - 1, y)).collect(),
            _ => (b.y0..b.y1).map(|y| (b.x1, y)).collect(),
        };
        if !row
            .iter()
            .all(|&(x, y)| placeable(&map, &blobs, Some(i), x, y))
        {
            failures += 1;
            continue;
        }
        failures = 0;
        let take = row.len().min(remaining);
        // a partial row starts from a random end so the blob stays connected
        let from_start = rng.gen_bool(0.5);
        let cells: Vec<(i32, i32)> = if from_start {
            row[..take].to_vec()
        } else {
            row[row.len() - take..].to_vec()
        };
        for &(x, y) in &cells {
            let i = map.linear(x as i64, y as i64);
            map.occupied[i] = true;
        }
        remaining -= take;
        if take == row.len() {
            let b = &mut blobs[i];
            match side {
                0 => b.y0 -= 1,
                1 => b.y1 += 1,
                2 => b.x0 -= 1,
                _ => b.x1 += 1,
            }
        } else {
            // grow the exclusion box over the partial row
            let b = &mut blobs[i];
            for &(x, y) in &cells {
                b.x0 = b.x0.min(x);
                b.y0 = b.y0.min(y);
                b.x1 = b.x1.max(x + 1);
                b.y1 = b.y1.max(y + 1);
            }
        }
    }
    Ok(map)
}

/// A recursive-division maze with one-cell-thick walls and corridors
/// `corridor` cells wide. Walls are not drawn along the map border.
pub fn generate_maze(
    width: u32,
    height: u32,
    corridor: u32,
    seed: u64,
) -> Result<GridMap, MapError> {
    if corridor == 0 {
        return Err(MapError::Generation(
            "corridor width must be positive".into(),
        ));
    }
    let pitch = corridor as i32 + 1;
    let blocks_x = (width as i32 + 1) / pitch;
    let blocks_y = (height as i32 + 1) / pitch;
    if blocks_x < 1 || blocks_y < 1 {
        return Err(MapError::Generation("map smaller than one corridor".into()));
    }
    let mut map = GridMap::new(width, height);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stack = vec![(0, 0, blocks_x, blocks_y)];
    while let Some((bx0, by0, bx1, by1)) = stack.pop() {
        let (bw, bh) = (bx1 - bx0, by1 - by0);
        if bw < 2 && bh < 2 {
            continue;
        }
        let vertical = if bw == bh { rng.gen_bool(0.5) } else { bw > bh };
        if vertical {
            let k = rng.gen_range(bx0 + 1..bx1);
            let gap = rng.gen_range(by0..by1);
            let x = k * pitch - 1;
            for y in by0 * pitch..(by1 * pitch - 1).min(height as i32) {
                if y >= gap * pitch && y < gap * pitch + corridor as i32 {
                    continue;
                }
                map.set_occupied(Cell::new(x, y), true)?;
            }
            stack.push((bx0, by0, k, by1));
            stack.push((k, by0, bx1, by1));
        } else {
            let k = rng.gen_range(by0 + 1..by1);
            let gap = rng.gen_range(bx0..bx1);
            let y = k * pitch - 1;
            for x in bx0 * pitch..(bx1 * pitch - 1).min(width as i32) {
                if x >= gap * pitch && x < gap * pitch + corridor as i32 {
                    continue;
                }
                map.set_occupied(Cell::new(x, y), true)?;
            }
            stack.push((bx0, by0, bx1, k));
            stack.push((bx0, k, bx1, by1));
        }
    }
    Ok(map)
}
