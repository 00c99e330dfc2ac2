//! Exact 2-D primitives: convex hulls, minimum-area enclosing rectangles,
//! convex polygon clipping, and intersection-over-union for axis-aligned and
//! rotated shapes.
//!
//! Coordinates are image pixels (x right, y down). A polygon is stored
//! counter-clockwise, meaning its shoelace signed area is positive. All
//! tolerances are absolute because coordinates are pixel-scale: collinearity
//! uses [`COLLINEAR_EPS`], rectangle containment 1e-6 px.

use thiserror::Error;

/// Absolute tolerance for collinearity and duplicate-vertex tests, in pixels.
pub const COLLINEAR_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("polygon is not convex")]
    NotConvex,
    #[error("polygon vertices are not counter-clockwise")]
    NotCounterClockwise,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Twice the signed area of triangle `(o, a, b)`; positive for a
/// counter-clockwise turn.
pub fn cross(o: Point, a: Point, b: Point) -> f64 {
    (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x)
}

fn dist(a: Point, b: Point) -> f64 {
    ((a.x - b.x).powi(2) + (a.y - b.y).powi(2)).sqrt()
}

/// Axis-aligned box. `max_*` may equal `min_*` (zero-area box).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Aabb {
    pub fn new(min_x: f64, min_y: f64, max_x: f64, max_y: f64) -> Self {
        debug_assert!(max_x >= min_x && max_y >= min_y);
        Self { min_x, min_y, max_x, max_y }
    }

    pub fn area(&self) -> f64 {
        (self.max_x - self.min_x) * (self.max_y - self.min_y)
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min_x: self.min_x.min(other.min_x),
            min_y: self.min_y.min(other.min_y),
            max_x: self.max_x.max(other.max_x),
            max_y: self.max_y.max(other.max_y),
        }
    }

    pub fn from_points(points: &[Point]) -> Aabb {
        let mut b = Aabb {
            min_x: f64::INFINITY,
            min_y: f64::INFINITY,
            max_x: f64::NEG_INFINITY,
            max_y: f64::NEG_INFINITY,
        };
        for p in points {
            b.min_x = b.min_x.min(p.x);
            b.min_y = b.min_y.min(p.y);
            b.max_x = b.max_x.max(p.x);
            b.max_y = b.max_y.max(p.y);
        }
        b
    }
}

/// Standard IoU on axis-aligned boxes; 0 when the overlap has no area.
pub fn aabb_iou(a: &Aabb, b: &Aabb) -> f64 {
    let ix = (a.max_x.min(b.max_x) - a.min_x.max(b.min_x)).max(0.0);
    let iy = (a.max_y.min(b.max_y) - a.min_y.max(b.min_y)).max(0.0);
    let inter = ix * iy;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

/// Rotated rectangle: center, side lengths and the angle (degrees) of the
/// `w` side measured from the +x axis toward +y. Normalized so `w >= h` and
/// `angle_deg` lies in `[0, 180)`, which quotients out the half-turn symmetry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotatedRect {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
    pub angle_deg: f64,
}

impl RotatedRect {
    pub fn new(cx: f64, cy: f64, w: f64, h: f64, angle_deg: f64) -> Self {
        debug_assert!(w > 0.0 && h > 0.0);
        let (w, h, angle) = if w >= h {
            (w, h, angle_deg)
        } else {
            (h, w, angle_deg + 90.0)
        };
        let mut angle = angle.rem_euclid(180.0);
        // rem_euclid can round up to 180.0 for tiny negative inputs;
        // also normalize -0.0 so serialized output is stable.
        if angle >= 180.0 || angle == 0.0 {
            angle = 0.0;
        }
        Self { cx, cy, w, h, angle_deg: angle }
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    /// The four corners as a counter-clockwise convex polygon.
    pub fn to_polygon(&self) -> ConvexPolygon {
        let (s, c) = self.angle_deg.to_radians().sin_cos();
        let (hw, hh) = (self.w / 2.0, self.h / 2.0);
        let local = [(-hw, -hh), (hw, -hh), (hw, hh), (-hw, hh)];
        let verts = local
            .iter()
            .map(|&(x, y)| Point::new(self.cx + x * c - y * s, self.cy + x * s + y * c))
            .collect();
        ConvexPolygon::try_new(verts).expect("rectangle corners form a CCW convex polygon")
    }
}

/// Convex polygon with at least three counter-clockwise vertices and
/// positive area. Construction canonicalizes: consecutive duplicates and
/// collinear middle vertices are dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

impl ConvexPolygon {
    pub fn try_new(vertices: Vec<Point>) -> Result<Self, GeometryError> {
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(GeometryError::DegenerateInput("non-finite vertex"));
        }
        let mut v = vertices;
        // Drop consecutive duplicates and collinear middle vertices until
        // stable; reject reflex turns outright.
        loop {
            if v.len() < 3 {
                return Err(GeometryError::DegenerateInput("fewer than 3 vertices"));
            }
            let n = v.len();
            let mut removed = false;
            for i in 0..n {
                let prev = v[(i + n - 1) % n];
                let cur = v[i];
                let next = v[(i + 1) % n];
                if dist(cur, next) <= COLLINEAR_EPS {
                    v.remove(if i + 1 == n { 0 } else { i + 1 });
                    removed = true;
                    break;
                }
                let c = cross(prev, cur, next);
                if c < -COLLINEAR_EPS {
                    return Err(GeometryError::NotConvex);
                }
                if c <= COLLINEAR_EPS {
                    v.remove(i);
                    removed = true;
                    break;
                }
            }
            if !removed {
                break;
            }
        }
        let poly = Self { vertices: v };
        if poly.area() <= 0.0 {
            return Err(GeometryError::NotCounterClockwise);
        }
        Ok(poly)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    /// Shoelace area; positive by construction.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let mut twice = 0.0;
        for i in 0..n {
            let j = (i + 1) % n;
            twice += v[i].x * v[j].y - v[j].x * v[i].y;
        }
        twice / 2.0
    }

    pub fn bbox(&self) -> Aabb {
        Aabb::from_points(&self.vertices)
    }

    /// Inclusive point-in-polygon test: boundary points count as inside.
    pub fn contains(&self, p: Point) -> bool {
        let v = &self.vertices;
        let n = v.len();
        (0..n).all(|i| cross(v[i], v[(i + 1) % n], p) >= -COLLINEAR_EPS)
    }
}

/// Smallest convex polygon containing all input points (monotone chain).
/// Collinear boundary points are dropped; vertices are a subset of the input.
pub fn convex_hull(points: &[Point]) -> Result<ConvexPolygon, GeometryError> {
    if points.iter().any(|p| !p.is_finite()) {
        return Err(GeometryError::DegenerateInput("non-finite point"));
    }
    let mut pts: Vec<Point> = points.to_vec();
    pts.sort_by(|a, b| a.x.partial_cmp(&b.x).unwrap().then(a.y.partial_cmp(&b.y).unwrap()));
    pts.dedup_by(|a, b| a.x == b.x && a.y == b.y);
    if pts.len() < 3 {
        return Err(GeometryError::DegenerateInput("fewer than 3 distinct points"));
    }

    let mut lower: Vec<Point> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2
            && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= COLLINEAR_EPS
        {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Point> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2
            && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= COLLINEAR_EPS
        {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() < 3 {
        return Err(GeometryError::DegenerateInput("all points collinear"));
    }
    ConvexPolygon::try_new(lower)
}

/// Minimum-area enclosing rotated rectangle of a point set. One side of the
/// result is collinear with a hull edge (rotating-calipers optimality).
pub fn min_area_rect(points: &[Point]) -> Result<RotatedRect, GeometryError> {
    let hull = convex_hull(points)?;
    let v = hull.vertices();
    let n = v.len();

    let mut best_area = f64::INFINITY;
    let mut best: Option<RotatedRect> = None;
    for i in 0..n {
        let a = v[i];
        let b = v[(i + 1) % n];
        let len = dist(a, b);
        let d = Point::new((b.x - a.x) / len, (b.y - a.y) / len);
        let u = Point::new(-d.y, d.x);

        let (mut s_min, mut s_max) = (f64::INFINITY, f64::NEG_INFINITY);
        let (mut t_min, mut t_max) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in v {
            let s = p.x * d.x + p.y * d.y;
            let t = p.x * u.x + p.y * u.y;
            s_min = s_min.min(s);
            s_max = s_max.max(s);
            t_min = t_min.min(t);
            t_max = t_max.max(t);
        }
        let area = (s_max - s_min) * (t_max - t_min);
        if area < best_area {
            best_area = area;
            let sc = (s_min + s_max) / 2.0;
            let tc = (t_min + t_max) / 2.0;
            best = Some(RotatedRect::new(
                sc * d.x + tc * u.x,
                sc * d.y + tc * u.y,
                s_max - s_min,
                t_max - t_min,
                d.y.atan2(d.x).to_degrees(),
            ));
        }
    }
    Ok(best.expect("hull has at least one edge"))
}

/// Intersection of two convex polygons by successive half-plane clipping.
/// `None` means the intersection has no area.
pub fn clip_convex(subject: &ConvexPolygon, clip: &ConvexPolygon) -> Option<ConvexPolygon> {
    let mut out: Vec<Point> = subject.vertices().to_vec();
    let cv = clip.vertices();
    for i in 0..cv.len() {
        let a = cv[i];
        let b = cv[(i + 1) % cv.len()];
        let input = std::mem::take(&mut out);
        if input.is_empty() {
            return None;
        }
        let inside = |p: Point| cross(a, b, p) >= -COLLINEAR_EPS;
        for j in 0..input.len() {
            let s = input[j];
            let e = input[(j + 1) % input.len()];
            let (s_in, e_in) = (inside(s), inside(e));
            if e_in {
                if !s_in {
                    out.push(line_intersection(a, b, s, e));
                }
                out.push(e);
            } else if s_in {
                out.push(line_intersection(a, b, s, e));
            }
        }
    }
    ConvexPolygon::try_new(out).ok()
}

/// Intersection of the infinite line through `(a, b)` with segment `(s, e)`.
fn line_intersection(a: Point, b: Point, s: Point, e: Point) -> Point {
    let denom = (b.x - a.x) * (s.y - e.y) - (b.y - a.y) * (s.x - e.x);
    // Callers only ask when s and e straddle the line, so denom != 0.
    let t = ((s.x - a.x) * (s.y - e.y) - (s.y - a.y) * (s.x - e.x)) / denom;
    Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
}

/// IoU of two convex polygons via exact clipping. Exactly symmetric: the
/// operands are put in a canonical order before clipping.
pub fn rotated_iou(a: &ConvexPolygon, b: &ConvexPolygon) -> f64 {
    let (first, second) = if poly_le(a, b) { (a, b) } else { (b, a) };
    let inter = clip_convex(first, second).map_or(0.0, |p| p.area());
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        0.0
    } else {
        (inter / union).clamp(0.0, 1.0)
    }
}

fn poly_le(a: &ConvexPolygon, b: &ConvexPolygon) -> bool {
    let (va, vb) = (a.vertices(), b.vertices());
    if va.len() != vb.len() {
        return va.len() < vb.len();
    }
    for (p, q) in va.iter().zip(vb) {
        if p.x != q.x {
            return p.x < q.x;
        }
        if p.y != q.y {
            return p.y < q.y;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;

    fn pts(coords: &[(f64, f64)]) -> Vec<Point> {
        coords.iter().map(|&(x, y)| Point::new(x, y)).collect()
    }

    fn unit_square() -> ConvexPolygon {
        ConvexPolygon::try_new(pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)])).unwrap()
    }

    #[test]
    fn hull_removes_interior_point() {
        let hull =
            convex_hull(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)]))
                .unwrap();
        assert_eq!(hull.vertices().len(), 4);
        assert!((hull.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hull_of_triangle_is_triangle() {
        let hull = convex_hull(&pts(&[(0.0, 0.0), (2.0, 0.0), (1.0, 1.0)])).unwrap();
        assert_eq!(hull.vertices().len(), 3);
        assert!((hull.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hull_rejects_degenerate_inputs() {
        assert!(matches!(
            convex_hull(&pts(&[(0.0, 0.0), (1.0, 1.0)])),
            Err(GeometryError::DegenerateInput(_))
        ));
        assert!(matches!(
            convex_hull(&pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0), (3.0, 3.0)])),
            Err(GeometryError::DegenerateInput(_))
        ));
    }

    #[test]
    fn hull_contains_every_input_point() {
        let mut rng = SplitMix64::new(11);
        let points: Vec<Point> = (0..100)
            .map(|_| {
                // uniform in the unit disk by rejection
                loop {
                    let x = rng.uniform(-1.0, 1.0);
                    let y = rng.uniform(-1.0, 1.0);
                    if x * x + y * y <= 1.0 {
                        return Point::new(x, y);
                    }
                }
            })
            .collect();
        let hull = convex_hull(&points).unwrap();
        let v = hull.vertices();
        for p in &points {
            for i in 0..v.len() {
                let a = v[i];
                let b = v[(i + 1) % v.len()];
                let signed = cross(a, b, *p) / dist(a, b);
                assert!(signed >= -1e-9, "point {p:?} outside hull edge {i}: {signed}");
            }
        }
    }

    #[test]
    fn min_rect_of_axis_aligned_box() {
        let r = min_area_rect(&pts(&[(0.0, 0.0), (4.0, 0.0), (4.0, 2.0), (0.0, 2.0)])).unwrap();
        assert!((r.cx - 2.0).abs() < 1e-9);
        assert!((r.cy - 1.0).abs() < 1e-9);
        assert!((r.w - 4.0).abs() < 1e-9);
        assert!((r.h - 2.0).abs() < 1e-9);
        assert!(r.angle_deg.min(180.0 - r.angle_deg) < 1e-9);
    }

    #[test]
    fn min_rect_is_rotation_equivariant() {
        let (s, c) = 30f64.to_radians().sin_cos();
        let corners: Vec<Point> = pts(&[(-2.0, -1.0), (2.0, -1.0), (2.0, 1.0), (-2.0, 1.0)])
            .iter()
            .map(|p| Point::new(p.x * c - p.y * s, p.x * s + p.y * c))
            .collect();
        let r = min_area_rect(&corners).unwrap();
        assert!((r.w - 4.0).abs() < 1e-9);
        assert!((r.h - 2.0).abs() < 1e-9);
        assert!((r.angle_deg - 30.0).abs() < 1e-9);
    }

    #[test]
    fn min_rect_beats_one_degree_grid() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..20 {
            let points: Vec<Point> = (0..50)
                .map(|_| Point::new(rng.uniform(0.0, 100.0), rng.uniform(0.0, 100.0)))
                .collect();
            let r = min_area_rect(&points).unwrap();
            let grid_best = (0..180)
                .map(|deg| {
                    let (s, c) = (deg as f64).to_radians().sin_cos();
                    let (mut a, mut b, mut lo, mut hi) =
                        (f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY);
                    for p in &points {
                        let u = p.x * c + p.y * s;
                        let v = -p.x * s + p.y * c;
                        a = a.min(u);
                        b = b.max(u);
                        lo = lo.min(v);
                        hi = hi.max(v);
                    }
                    (b - a) * (hi - lo)
                })
                .fold(f64::INFINITY, f64::min);
            assert!(r.area() <= grid_best * (1.0 + 1e-6));
        }
    }

    #[test]
    fn min_rect_contains_inputs() {
        let mut rng = SplitMix64::new(9);
        for _ in 0..20 {
            let points: Vec<Point> = (0..30)
                .map(|_| Point::new(rng.uniform(0.0, 640.0), rng.uniform(0.0, 480.0)))
                .collect();
            let r = min_area_rect(&points).unwrap();
            let (s, c) = r.angle_deg.to_radians().sin_cos();
            for p in &points {
                let dx = p.x - r.cx;
                let dy = p.y - r.cy;
                let u = dx * c + dy * s;
                let v = -dx * s + dy * c;
                assert!(u.abs() <= r.w / 2.0 + 1e-6);
                assert!(v.abs() <= r.h / 2.0 + 1e-6);
            }
        }
    }

    #[test]
    fn rect_polygon_round_trip() {
        let mut rng = SplitMix64::new(3);
        for _ in 0..100 {
            let r = RotatedRect::new(
                rng.uniform(50.0, 600.0),
                rng.uniform(50.0, 400.0),
                rng.uniform(5.0, 80.0),
                rng.uniform(5.0, 80.0),
                rng.uniform(0.0, 180.0),
            );
            let back = min_area_rect(r.to_polygon().vertices()).unwrap();
            assert!((back.cx - r.cx).abs() < 1e-6);
            assert!((back.cy - r.cy).abs() < 1e-6);
            assert!((back.w - r.w).abs() < 1e-6);
            assert!((back.h - r.h).abs() < 1e-6);
            let da = (back.angle_deg - r.angle_deg).abs();
            // Squares recover the angle only modulo 90 degrees.
            let quarter = if (r.w - r.h).abs() < 1e-9 { 90.0 } else { 180.0 };
            let da = da.rem_euclid(quarter);
            assert!(da < 1e-6 || (quarter - da) < 1e-6, "angle {} vs {}", back.angle_deg, r.angle_deg);
        }
    }

    #[test]
    fn rect_to_polygon_matches_declared_corners() {
        let poly = RotatedRect::new(0.0, 0.0, 2.0, 2.0, 0.0).to_polygon();
        let expect = pts(&[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)]);
        for (got, want) in poly.vertices().iter().zip(&expect) {
            assert!((got.x - want.x).abs() < 1e-12 && (got.y - want.y).abs() < 1e-12);
        }
        // a square rotated by 90 degrees has the same vertex set
        let rot = RotatedRect::new(0.0, 0.0, 2.0, 2.0, 90.0).to_polygon();
        for want in &expect {
            assert!(rot
                .vertices()
                .iter()
                .any(|p| (p.x - want.x).abs() < 1e-9 && (p.y - want.y).abs() < 1e-9));
        }
    }

    #[test]
    fn clip_identical_squares() {
        let sq = unit_square();
        let inter = clip_convex(&sq, &sq).unwrap();
        assert!((inter.area() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn clip_shifted_squares() {
        let a = unit_square();
        let b = ConvexPolygon::try_new(pts(&[(0.5, 0.0), (1.5, 0.0), (1.5, 1.0), (0.5, 1.0)]))
            .unwrap();
        let inter = clip_convex(&a, &b).unwrap();
        assert!((inter.area() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn clip_rotated_square_gives_octagon() {
        let a = unit_square();
        let b = RotatedRect::new(0.5, 0.5, 1.0, 1.0, 45.0).to_polygon();
        let inter = clip_convex(&a, &b).unwrap();
        assert_eq!(inter.vertices().len(), 8);
        assert!((inter.area() - 0.828427).abs() <= 1e-6);
    }

    #[test]
    fn clip_disjoint_is_empty() {
        let a = unit_square();
        let b = ConvexPolygon::try_new(pts(&[(5.0, 5.0), (6.0, 5.0), (6.0, 6.0), (5.0, 6.0)]))
            .unwrap();
        assert!(clip_convex(&a, &b).is_none());
    }

    #[test]
    fn rotated_iou_examples() {
        let sq = unit_square();
        assert!((rotated_iou(&sq, &sq) - 1.0).abs() < 1e-12);

        let far = ConvexPolygon::try_new(pts(&[(5.0, 5.0), (6.0, 5.0), (6.0, 6.0), (5.0, 6.0)]))
            .unwrap();
        assert_eq!(rotated_iou(&sq, &far), 0.0);

        let rot = RotatedRect::new(0.5, 0.5, 1.0, 1.0, 45.0).to_polygon();
        assert!((rotated_iou(&sq, &rot) - 0.707107).abs() <= 1e-3);
    }

    #[test]
    fn aabb_iou_examples() {
        let a = Aabb::new(0.0, 0.0, 2.0, 2.0);
        assert!((aabb_iou(&a, &a) - 1.0).abs() < 1e-12);

        let b = Aabb::new(1.0, 1.0, 3.0, 3.0);
        assert!((aabb_iou(&a, &b) - 1.0 / 7.0).abs() < 1e-12);

        let touching = Aabb::new(2.0, 0.0, 4.0, 2.0);
        assert_eq!(aabb_iou(&a, &touching), 0.0);
    }

    fn random_rect(rng: &mut SplitMix64) -> RotatedRect {
        RotatedRect::new(
            rng.uniform(100.0, 540.0),
            rng.uniform(100.0, 380.0),
            rng.uniform(20.0, 160.0),
            rng.uniform(20.0, 160.0),
            rng.uniform(0.0, 180.0),
        )
    }

    #[test]
    fn iou_is_symmetric_and_bounded() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..200 {
            let a = random_rect(&mut rng).to_polygon();
            let mut b = random_rect(&mut rng);
            b.cx = a.bbox().min_x + rng.uniform(-50.0, 150.0);
            b.cy = a.bbox().min_y + rng.uniform(-50.0, 150.0);
            let b = b.to_polygon();
            let ab = rotated_iou(&a, &b);
            let ba = rotated_iou(&b, &a);
            assert_eq!(ab.to_bits(), ba.to_bits(), "IoU must be exactly symmetric");
            assert!((0.0..=1.0).contains(&ab));
        }
    }

    #[test]
    fn clip_area_bounded_by_operands() {
        let mut rng = SplitMix64::new(23);
        for _ in 0..200 {
            let a = random_rect(&mut rng).to_polygon();
            let b = random_rect(&mut rng).to_polygon();
            if let Some(inter) = clip_convex(&a, &b) {
                assert!(inter.area() <= a.area().min(b.area()) + 1e-9);
            }
        }
    }

    #[test]
    fn iou_invariant_under_rigid_motion() {
        let mut rng = SplitMix64::new(31);
        for _ in 0..50 {
            let a = random_rect(&mut rng);
            let mut b = random_rect(&mut rng);
            b.cx = a.cx + rng.uniform(-80.0, 80.0);
            b.cy = a.cy + rng.uniform(-80.0, 80.0);
            let base = rotated_iou(&a.to_polygon(), &b.to_polygon());

            let (tx, ty) = (rng.uniform(-30.0, 30.0), rng.uniform(-30.0, 30.0));
            let theta = rng.uniform(0.0, 360.0);
            let (s, c) = theta.to_radians().sin_cos();
            let mv = |r: &RotatedRect| {
                let x = r.cx * c - r.cy * s + tx;
                let y = r.cx * s + r.cy * c + ty;
                RotatedRect::new(x, y, r.w, r.h, r.angle_deg + theta)
            };
            let moved = rotated_iou(&mv(&a).to_polygon(), &mv(&b).to_polygon());
            assert!((moved - base).abs() <= 1e-9, "IoU drifted: {base} vs {moved}");
        }
    }
}
