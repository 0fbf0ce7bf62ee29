//! Planar primitives shared by preprocessing, visibility and candidate
//! generation.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for classifying a point as lying on a line:
/// `|D| <= ON_LINE_TOL * max(1, |p - q|)`.
pub const ON_LINE_TOL: f64 = 1e-9;

#[derive(Debug, Error, PartialEq)]
pub enum GeometryError {
    #[error("line through coincident points is undefined")]
    DegenerateLine,
    #[error("angle with a zero-length vector is undefined")]
    ZeroVector,
}

#[derive(Clone, Copy, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, other: Point) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Point) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point) -> f64 {
        (self - other).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point::new(self.x * s, self.y * s)
    }
}

/// Twice the signed area of `abc`; positive when counter-clockwise.
#[inline]
pub fn orient(a: Point, b: Point, c: Point) -> f64 {
    (b - a).cross(c - a)
}

/// Implicit line `A x + B y + C = 0` through two points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineCoeffs {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl LineCoeffs {
    pub fn through(p: Point, q: Point) -> Result<Self, GeometryError> {
        if p == q {
            return Err(GeometryError::DegenerateLine);
        }
        Ok(Self {
            a: p.y - q.y,
            b: q.x - p.x,
            c: p.x * q.y - q.x * p.y,
        })
    }

    pub fn eval(&self, v: Point) -> f64 {
        self.a * v.x + self.b * v.y + self.c
    }
}

/// Signed side value `D = A v_x + B v_y + C` of `v` against the line `pq`.
/// Positive values are to the left of `p -> q`.
pub fn side_of_line(p: Point, q: Point, v: Point) -> Result<f64, GeometryError> {
    Ok(LineCoeffs::through(p, q)?.eval(v))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Negative,
    On,
    Positive,
}

/// [`side_of_line`] bucketed with the [`ON_LINE_TOL`] band.
pub fn classify_side(p: Point, q: Point, v: Point) -> Result<Side, GeometryError> {
    let d = side_of_line(p, q, v)?;
    let tol = ON_LINE_TOL * p.distance(q).max(1.0);
    Ok(if d.abs() <= tol {
        Side::On
    } else if d > 0.0 {
        Side::Positive
    } else {
        Side::Negative
    })
}

/// Angle at `p` between `p -> q` and `p -> v`, in `[0, pi]`.
pub fn angle_alpha(p: Point, q: Point, v: Point) -> Result<f64, GeometryError> {
    let pq = q - p;
    let pv = v - p;
    let denom = pq.norm() * pv.norm();
    if denom == 0.0 {
        return Err(GeometryError::ZeroVector);
    }
    Ok((pq.dot(pv) / denom).clamp(-1.0, 1.0).acos())
}

/// True iff `alpha` is strictly acute.
pub fn is_acute(alpha: f64) -> bool {
    alpha < PI / 2.0
}

/// Is `v` on the closed segment `ab`?
pub fn point_on_segment(v: Point, a: Point, b: Point) -> bool {
    let ab = b - a;
    let tol = ON_LINE_TOL * ab.norm().max(1.0);
    if orient(a, b, v).abs() > tol {
        return false;
    }
    v.x >= a.x.min(b.x) - tol
        && v.x <= a.x.max(b.x) + tol
        && v.y >= a.y.min(b.y) - tol
        && v.y <= a.y.max(b.y) + tol
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Triangle {
    pub a: Point,
    pub b: Point,
    pub c: Point,
}

impl Triangle {
    pub const fn new(a: Point, b: Point, c: Point) -> Self {
        Self { a, b, c }
    }

    pub fn barycenter(&self) -> Point {
        Point::new(
            (self.a.x + self.b.x + self.c.x) / 3.0,
            (self.a.y + self.b.y + self.c.y) / 3.0,
        )
    }

    /// Collinear (zero-area) triangles are flagged rather than rejected.
    pub fn is_degenerate(&self) -> bool {
        let scale = (self.b - self.a).norm() * (self.c - self.a).norm();
        orient(self.a, self.b, self.c).abs() <= ON_LINE_TOL * scale.max(1.0)
    }

    pub fn vertices(&self) -> [Point; 3] {
        [self.a, self.b, self.c]
    }

    pub fn edges(&self) -> [(Point, Point); 3] {
        [(self.a, self.b), (self.b, self.c), (self.c, self.a)]
    }

    /// `(min, max)` corners of the axis-aligned bounding box.
    pub fn bounds(&self) -> (Point, Point) {
        let xs = [self.a.x, self.b.x, self.c.x];
        let ys = [self.a.y, self.b.y, self.c.y];
        let fold = |v: [f64; 3], f: fn(f64, f64) -> f64| v[1..].iter().fold(v[0], |m, &x| f(m, x));
        (
            Point::new(fold(xs, f64::min), fold(ys, f64::min)),
            Point::new(fold(xs, f64::max), fold(ys, f64::max)),
        )
    }
}

/// Point containment in an arbitrary (possibly non-simple) polygon by the
/// winding-number method of Hormann and Agathos, with exact boundary
/// detection. Returns `Some(true)` inside, `Some(false)` outside and `None`
/// on the boundary.
pub fn point_in_polygon(v: Point, polygon: &[Point]) -> Option<bool> {
    let n = polygon.len();
    if n == 0 {
        return Some(false);
    }
    if polygon[0] == v {
        return None;
    }
    let mut winding = 0i32;
    for i in 0..n {
        let pi = polygon[i] - v;
        let pj = polygon[(i + 1) % n] - v;
        if pj.y == 0.0 {
            if pj.x == 0.0 {
                return None;
            }
            if pi.y == 0.0 && ((pj.x > 0.0) == (pi.x < 0.0)) {
                return None;
            }
        }
        if (pi.y < 0.0) != (pj.y < 0.0) {
            if pi.x >= 0.0 {
                if pj.x > 0.0 {
                    winding += if pj.y > pi.y { 1 } else { -1 };
                } else {
                    let det = pi.cross(pj);
                    if det == 0.0 {
                        return None;
                    }
                    if (det > 0.0) == (pj.y > pi.y) {
                        winding += if pj.y > pi.y { 1 } else { -1 };
                    }
                }
            } else if pj.x > 0.0 {
                let det = pi.cross(pj);
                if det == 0.0 {
                    return None;
                }
                if (det > 0.0) == (pj.y > pi.y) {
                    winding += if pj.y > pi.y { 1 } else { -1 };
                }
            }
        }
    }
    Some(winding != 0)
}

/// Is `v` inside `t`? Boundary points count only when `boundary_counts`.
/// Degenerate triangles contain exactly the points of their segments, so they
/// answer `boundary_counts` there and `false` elsewhere.
pub fn point_in_triangle(v: Point, t: &Triangle, boundary_counts: bool) -> bool {
    match point_in_polygon(v, &t.vertices()) {
        Some(inside) => inside,
        None => boundary_counts,
    }
}

/// Convex hull by quickhull.
///
/// The result is counter-clockwise, starts at the lowest-y (then lowest-x)
/// point, excludes collinear boundary points and tolerates duplicates. A
/// single distinct point yields one vertex; collinear input yields its two
/// extremes.
pub fn convex_hull(points: &[Point]) -> Vec<Point> {
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() <= 1 {
        return pts;
    }
    let left = pts[0];
    let right = pts[pts.len() - 1];

    let (mut upper, mut lower) = (Vec::new(), Vec::new());
    for &p in &pts[1..pts.len() - 1] {
        let o = orient(left, right, p);
        if o > 0.0 {
            upper.push(p);
        } else if o < 0.0 {
            lower.push(p);
        }
    }

    // CCW: left, lower chain (left -> right), right, upper chain (right -> left)
    let mut hull = vec![left];
    quickhull_side(left, right, &lower, &mut hull);
    hull.push(right);
    quickhull_side(right, left, &upper, &mut hull);

    let anchor = hull
        .iter()
        .enumerate()
        .min_by(|(_, a), (_, b)| a.y.total_cmp(&b.y).then(a.x.total_cmp(&b.x)))
        .map(|(i, _)| i)
        .unwrap_or(0);
    hull.rotate_left(anchor);
    hull
}

/// Appends the hull vertices strictly right of `a -> b` among `candidates`,
/// ordered from `a` to `b`. `candidates` are all strictly right of `a -> b`.
fn quickhull_side(a: Point, b: Point, candidates: &[Point], out: &mut Vec<Point>) {
    if candidates.is_empty() {
        return;
    }
    // farthest from the line; ties broken towards `a` for determinism
    let mut far = candidates[0];
    let mut far_d = -orient(a, b, far);
    for &p in &candidates[1..] {
        let d = -orient(a, b, p);
        if d > far_d {
            far = p;
            far_d = d;
        }
    }
    let mut left_of_af = Vec::new();
    let mut left_of_fb = Vec::new();
    for &p in candidates {
        if orient(a, far, p) < 0.0 {
            left_of_af.push(p);
        } else if orient(far, b, p) < 0.0 {
            left_of_fb.push(p);
        }
    }
    quickhull_side(a, far, &left_of_af, out);
    out.push(far);
    quickhull_side(far, b, &left_of_fb, out);
}

/// Pushes `v_a` and `v_b` away from the barycenter `o` of
/// `(current, v_a, v_b)` by the factor `w`; `current` stays fixed.
/// `w == 1` returns the triangle unchanged.
pub fn enlarge_triangle(current: Point, v_a: Point, v_b: Point, w: f64) -> Triangle {
    if w == 1.0 {
        return Triangle::new(current, v_a, v_b);
    }
    let o = Triangle::new(current, v_a, v_b).barycenter();
    Triangle::new(current, o + (v_a - o) * w, o + (v_b - o) * w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn side_examples() {
        assert_eq!(side_of_line(p(0., 0.), p(4., 0.), p(2., 1.)).unwrap(), 4.0);
        assert_eq!(side_of_line(p(0., 0.), p(4., 4.), p(2., 2.)).unwrap(), 0.0);
        assert_eq!(side_of_line(p(0., 0.), p(4., 6.), p(2., 2.)).unwrap(), -4.0);
        assert_eq!(
            side_of_line(p(1., 1.), p(1., 1.), p(2., 2.)),
            Err(GeometryError::DegenerateLine)
        );
        assert_eq!(
            classify_side(p(0., 0.), p(4., 4.), p(2., 2.)).unwrap(),
            Side::On
        );
        assert_eq!(
            classify_side(p(0., 0.), p(4., 0.), p(2., 1.)).unwrap(),
            Side::Positive
        );
    }

    #[test]
    fn angle_examples() {
        let o = p(0., 0.);
        let x = p(1., 0.);
        assert!((angle_alpha(o, x, p(1., 1.)).unwrap() - PI / 4.0).abs() < 1e-15);
        assert!((angle_alpha(o, x, p(0., 1.)).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!(!is_acute(angle_alpha(o, x, p(0., 1.)).unwrap()));
        assert!((angle_alpha(o, x, p(-1., 0.)).unwrap() - PI).abs() < 1e-15);
        assert_eq!(angle_alpha(o, x, o), Err(GeometryError::ZeroVector));
        assert_eq!(angle_alpha(o, o, x), Err(GeometryError::ZeroVector));
    }

    #[test]
    fn triangle_containment() {
        let t = Triangle::new(p(0., 0.), p(4., 0.), p(0., 4.));
        assert!(point_in_triangle(t.barycenter(), &t, false));
        assert!(point_in_triangle(p(0., 0.), &t, true));
        assert!(!point_in_triangle(p(0., 0.), &t, false));
        assert!(point_in_triangle(p(2., 2.), &t, true));
        assert!(!point_in_triangle(p(2., 2.), &t, false));
        assert!(!point_in_triangle(p(3., 3.), &t, true));
        // clockwise winding is handled the same way
        let cw = Triangle::new(p(0., 0.), p(0., 4.), p(4., 0.));
        assert!(point_in_triangle(p(1., 1.), &cw, false));
    }

    #[test]
    fn degenerate_triangle_is_a_segment() {
        let t = Triangle::new(p(0., 0.), p(2., 2.), p(4., 4.));
        assert!(t.is_degenerate());
        assert!(point_in_triangle(p(1., 1.), &t, true));
        assert!(!point_in_triangle(p(1., 1.), &t, false));
        assert!(!point_in_triangle(p(1., 2.), &t, true));
        assert!(!point_in_triangle(p(5., 5.), &t, true));
    }

    #[test]
    fn hull_examples() {
        let square = [
            p(1., 1.),
            p(0., 1.),
            p(0., 0.),
            p(1., 0.),
            p(0.5, 0.5),
            p(1., 1.),
        ];
        assert_eq!(
            convex_hull(&square),
            vec![p(0., 0.), p(1., 0.), p(1., 1.), p(0., 1.)]
        );
        let line = [p(2., 2.), p(0., 0.), p(1., 1.), p(3., 3.)];
        assert_eq!(convex_hull(&line), vec![p(0., 0.), p(3., 3.)]);
        assert_eq!(convex_hull(&[p(5., 5.), p(5., 5.)]), vec![p(5., 5.)]);
        assert!(convex_hull(&[]).is_empty());
        // collinear points on an edge are dropped
        let edge = [p(0., 0.), p(1., 0.), p(2., 0.), p(1., 2.)];
        assert_eq!(convex_hull(&edge), vec![p(0., 0.), p(2., 0.), p(1., 2.)]);
    }

    #[test]
    fn enlarge_examples() {
        let t = enlarge_triangle(p(0., 0.), p(3., 0.), p(0., 3.), 2.0);
        assert_eq!(t.a, p(0., 0.));
        assert_eq!(t.b, p(5., -1.));
        assert_eq!(t.c, p(-1., 5.));
        let same = enlarge_triangle(p(0.3, 0.1), p(3.7, 0.2), p(0.9, 3.3), 1.0);
        assert_eq!((same.b, same.c), (p(3.7, 0.2), p(0.9, 3.3)));
    }

    proptest! {
        #[test]
        fn side_is_antisymmetric(
            px in -50i32..50, py in -50i32..50, qx in -50i32..50, qy in -50i32..50,
            vx in -50i32..50, vy in -50i32..50,
        ) {
            let (pp, q, v) = (p(px as f64, py as f64), p(qx as f64, qy as f64), p(vx as f64, vy as f64));
            prop_assume!(pp != q);
            let d1 = side_of_line(pp, q, v).unwrap();
            let d2 = side_of_line(q, pp, v).unwrap();
            prop_assert_eq!(d1, -d2);
        }

        #[test]
        fn angle_is_scale_invariant(
            qx in -10.0f64..10.0, qy in -10.0f64..10.0, vx in -10.0f64..10.0, vy in -10.0f64..10.0,
            s in 0.01f64..100.0,
        ) {
            let o = p(0.5, -0.25);
            let q = o + p(qx, qy);
            let v = o + p(vx, vy);
            prop_assume!(p(qx, qy).norm() > 1e-3 && p(vx, vy).norm() > 1e-3);
            let a = angle_alpha(o, q, v).unwrap();
            let b = angle_alpha(o, q, o + (v - o) * s).unwrap();
            prop_assert!((a - b).abs() < 1e-7);
        }

        #[test]
        fn enlarge_displacements(
            ax in -10.0f64..10.0, ay in -10.0f64..10.0,
            bx in -10.0f64..10.0, by in -10.0f64..10.0,
            cx in -10.0f64..10.0, cy in -10.0f64..10.0,
            w in 1.0f64..4.0,
        ) {
            let (cur, va, vb) = (p(ax, ay), p(bx, by), p(cx, cy));
            let o = Triangle::new(cur, va, vb).barycenter();
            let t = enlarge_triangle(cur, va, vb, w);
            prop_assert_eq!(t.a, cur);
            let ea = t.b - (o + (va - o) * w);
            let eb = t.c - (o + (vb - o) * w);
            prop_assert!(ea.norm() < 1e-12 && eb.norm() < 1e-12);
        }
    }
}
