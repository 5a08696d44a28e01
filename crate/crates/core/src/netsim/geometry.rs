//! Planar geometry for exact uniform-in-cell user placement.
//!
//! A base station's Voronoi cell is carved out of a bounding square by
//! clipping against the perpendicular bisector toward each neighbor, visited
//! in order of increasing distance so the loop can stop as soon as no
//! remaining neighbor can touch the cell. The resulting convex polygon is
//! fan-triangulated and points are drawn area-uniformly, which samples small
//! and sliver cells without rejection.

use rand::Rng;

/// A point (or vector) in the simulation plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    /// Squared Euclidean distance to `other`.
    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }

    /// Distance from the origin.
    pub fn norm(self) -> f64 {
        (self.x * self.x + self.y * self.y).sqrt()
    }
}

/// Convex polygon stored as a counter-clockwise vertex list.
pub type Polygon = Vec<Point>;

/// Axis-aligned square centered on `center`, as a counter-clockwise polygon.
pub fn square_around(center: Point, half_side: f64) -> Polygon {
    debug_assert!(half_side > 0.0);
    vec![
        Point::new(center.x - half_side, center.y - half_side),
        Point::new(center.x + half_side, center.y - half_side),
        Point::new(center.x + half_side, center.y + half_side),
        Point::new(center.x - half_side, center.y + half_side),
    ]
}

/// Intersects `poly` with the half-plane of points at least as close to
/// `site` as to `other` (the Voronoi half-plane of `site` against `other`).
/// Sutherland–Hodgman clipping; preserves winding order and convexity.
fn clip_to_bisector(poly: &Polygon, site: Point, other: Point) -> Polygon {
    // Signed side of the bisector: f(p) < 0 strictly closer to `site`.
    let nx = other.x - site.x;
    let ny = other.y - site.y;
    let mx = 0.5 * (site.x + other.x);
    let my = 0.5 * (site.y + other.y);
    let side = |p: Point| nx * (p.x - mx) + ny * (p.y - my);

    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let fa = side(a);
        let fb = side(b);
        if fa <= 0.0 {
            out.push(a);
        }
        if (fa < 0.0 && fb > 0.0) || (fa > 0.0 && fb < 0.0) {
            let t = fa / (fa - fb);
            out.push(Point::new(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)));
        }
    }
    out
}

/// Voronoi cell of `site` against the `others`, clipped to `bound`.
///
/// Neighbors are visited by increasing distance; once the next neighbor is
/// farther than twice the most distant remaining vertex its bisector cannot
/// intersect the cell, and neither can any later one, so the loop stops.
/// `others` must not contain `site` itself.
pub fn voronoi_cell(site: Point, others: &[Point], bound: &Polygon) -> Polygon {
    let mut order: Vec<(f64, u32)> = others
        .iter()
        .enumerate()
        .map(|(i, &p)| (site.dist2(p), i as u32))
        .collect();
    order.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

    let mut cell = bound.clone();
    let mut reach2 = max_dist2(site, &cell);
    for &(d2, k) in &order {
        let k = k as usize;
        debug_assert!(d2 > 0.0, "duplicate site passed as its own neighbor");
        if d2 > 4.0 * reach2 {
            break;
        }
        cell = clip_to_bisector(&cell, site, others[k]);
        debug_assert!(cell.len() >= 3, "site clipped out of its own cell");
        reach2 = max_dist2(site, &cell);
    }
    cell
}

fn max_dist2(site: Point, poly: &Polygon) -> f64 {
    poly.iter()
        .map(|&p| site.dist2(p))
        .fold(0.0f64, f64::max)
}

/// Area of a counter-clockwise polygon (shoelace formula).
pub fn polygon_area(poly: &Polygon) -> f64 {
    let mut twice = 0.0;
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        twice += a.x * b.y - a.y * b.x;
    }
    0.5 * twice
}

/// Draws a point uniformly over a convex polygon: fan-triangulate from the
/// first vertex, pick a triangle with probability proportional to its area,
/// then sample the triangle by folding the unit square onto it.
///
/// Consumes exactly three `f64` draws from `rng` regardless of the polygon,
/// so callers interleaving several generators keep a stable draw schedule.
pub fn sample_uniform<R: Rng>(poly: &Polygon, rng: &mut R) -> Point {
    debug_assert!(poly.len() >= 3);
    let anchor = poly[0];
    let total: f64 = (1..poly.len() - 1)
        .map(|i| triangle_area(anchor, poly[i], poly[i + 1]))
        .sum();
    debug_assert!(total > 0.0);

    let mut target = rng.gen::<f64>() * total;
    let mut chosen = poly.len() - 2;
    for i in 1..poly.len() - 1 {
        let w = triangle_area(anchor, poly[i], poly[i + 1]);
        if target < w {
            chosen = i;
            break;
        }
        target -= w;
    }

    let (b, c) = (poly[chosen], poly[chosen + 1]);
    let mut u = rng.gen::<f64>();
    let mut w = rng.gen::<f64>();
    if u + w > 1.0 {
        u = 1.0 - u;
        w = 1.0 - w;
    }
    Point::new(
        anchor.x + u * (b.x - anchor.x) + w * (c.x - anchor.x),
        anchor.y + u * (b.y - anchor.y) + w * (c.y - anchor.y),
    )
}

fn triangle_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x))
}
