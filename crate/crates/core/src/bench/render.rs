use std::fmt::Write as _;
use std::io;
use std::path::Path;

use crate::grid_map::{GridMap, Node};
use crate::search::PathResult;

const SCALE: i64 = 10;

/// SVG picture of a search: obstacle cells, evaluated nodes as dots, the path
/// and start/target markers. The y axis points up. Output depends only on
/// the inputs.
pub fn render_svg(map: &GridMap, result: &PathResult) -> String {
    let (w, h) = (map.width() as i64, map.height() as i64);
    let px = |n: Node| (n.x as i64 * SCALE, (h - n.y as i64) * SCALE);
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{}" height="{}" viewBox="0 0 {} {}">"#,
        w * SCALE,
        h * SCALE,
        w * SCALE,
        h * SCALE
    );
    let _ = writeln!(
        s,
        r#"<rect x="0" y="0" width="{}" height="{}" fill="white" stroke="black"/>"#,
        w * SCALE,
        h * SCALE
    );
    let _ = writeln!(s, r#"<g fill="dimgray">"#);
    for c in map.occupied_cells() {
        let _ = writeln!(
            s,
            r#"<rect x="{}" y="{}" width="{SCALE}" height="{SCALE}"/>"#,
            c.x as i64 * SCALE,
            (h - c.y as i64 - 1) * SCALE
        );
    }
    let _ = writeln!(s, "</g>");
    let _ = writeln!(s, r#"<g fill="steelblue" class="evaluated">"#);
    for &n in &result.evaluated {
        let (x, y) = px(n);
        let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="2"/>"#);
    }
    let _ = writeln!(s, "</g>");
    if result.waypoints.len() >= 2 {
        let points: Vec<String> = result
            .waypoints
            .iter()
            .map(|&n| {
                let (x, y) = px(n);
                format!("{x},{y}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="crimson" stroke-width="2"/>"#,
            points.join(" ")
        );
    }
    if let (Some(&start), Some(&target)) = (result.waypoints.first(), result.waypoints.last()) {
        for (n, color) in [(start, "green"), (target, "orange")] {
            let (x, y) = px(n);
            let _ = writeln!(s, r#"<circle cx="{x}" cy="{y}" r="4" fill="{color}"/>"#);
        }
    }
    s.push_str("</svg>\n");
    s
}

/// Writes [`render_svg`] to `out`.
pub fn render_path(map: &GridMap, result: &PathResult, out: &Path) -> io::Result<()> {
    std::fs::write(out, render_svg(map, result))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::candidate_vertices::CvContext;
    use crate::grid_map::{Cell, Query};
    use crate::preprocess::{preprocess, VertexMode};
    use crate::search::fa_astar;
    use crate::visibility::VisibilityConfig;

    fn straight() -> (GridMap, PathResult) {
        let map = GridMap::new(10, 10);
        let pre = preprocess(&map, true, VertexMode::Hull);
        let ctx = CvContext::new(&map, &pre, VisibilityConfig::STRICT, 1.0).unwrap();
        let r = fa_astar(Query::new(Node::new(0, 0), Node::new(10, 10)), &ctx).unwrap();
        (map, r)
    }

    #[test]
    fn straight_path_has_one_segment_and_two_dots() {
        let (map, r) = straight();
        let svg = render_svg(&map, &r);
        assert_eq!(svg.matches("<polyline").count(), 1);
        assert!(svg.contains(r#"points="0,100 100,0""#));
        let dots = svg
            .split(r#"class="evaluated">"#)
            .nth(1)
            .unwrap()
            .split("</g>")
            .next()
            .unwrap();
        assert_eq!(dots.matches("<circle").count(), 2);
    }

    #[test]
    fn output_is_byte_stable() {
        let (mut map, r) = straight();
        map.set_occupied(Cell::new(3, 7), true).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let (a, b) = (dir.path().join("a.svg"), dir.path().join("b.svg"));
        render_path(&map, &r, &a).unwrap();
        render_path(&map, &r, &b).unwrap();
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn unwritable_path_is_an_error() {
        let (map, r) = straight();
        assert!(render_path(&map, &r, Path::new("/nonexistent-dir/x.svg")).is_err());
    }
}
