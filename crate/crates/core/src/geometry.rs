//! Planar Euclidean primitives for the current diagram.
//!
//! Coordinates are amperes on the diagram axes. Lines are kept in implicit
//! form `a·x + b·y = c` with a unit normal, so vertical and horizontal lines
//! need no special casing and slopes are only a derived view.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use thiserror::Error;

/// Default absolute tolerance for membership checks on unit-scale inputs.
pub const DEFAULT_TOL_GEOM: f64 = 1e-9;

/// Below this |sin| between two unit normals the lines are treated as parallel.
const PARALLEL_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate input: {0}")]
    DegenerateInput(&'static str),
    #[error("non-finite coordinate ({x}, {y})")]
    NonFinite { x: f64, y: f64 },
    #[error("lines do not intersect")]
    NoIntersection,
    #[error("lines coincide, intersection is not a point")]
    InfiniteIntersections,
    #[error("points are collinear; the generalized circle through them is a line")]
    CollinearPoints,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const ORIGIN: Point2 = Point2 { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    /// Checked constructor that refuses NaN and infinities.
    pub fn try_new(x: f64, y: f64) -> Result<Self, GeometryError> {
        let p = Self { x, y };
        if p.is_finite() {
            Ok(p)
        } else {
            Err(GeometryError::NonFinite { x, y })
        }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dot(self, other: Point2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the planar cross product.
    pub fn cross(self, other: Point2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(self, other: Point2) -> f64 {
        (self - other).norm()
    }

    /// Counter-clockwise quarter turn.
    pub fn perp(self) -> Point2 {
        Point2::new(-self.y, self.x)
    }

    pub fn normalized(self) -> Option<Point2> {
        let n = self.norm();
        (n > 0.0 && n.is_finite()).then(|| self * (1.0 / n))
    }
}

impl fmt::Display for Point2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Point2 {
    type Output = Point2;
    fn add(self, rhs: Point2) -> Point2 {
        Point2::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point2 {
    type Output = Point2;
    fn sub(self, rhs: Point2) -> Point2 {
        Point2::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl Mul<f64> for Point2 {
    type Output = Point2;
    fn mul(self, k: f64) -> Point2 {
        Point2::new(self.x * k, self.y * k)
    }
}

impl Neg for Point2 {
    type Output = Point2;
    fn neg(self) -> Point2 {
        Point2::new(-self.x, -self.y)
    }
}

/// Line `a·x + b·y = c`, canonical: `a² + b² = 1` and the first nonzero of
/// `(a, b)` is positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Line2 {
    a: f64,
    b: f64,
    c: f64,
}

impl Line2 {
    pub fn from_coefficients(a: f64, b: f64, c: f64) -> Result<Self, GeometryError> {
        if !(a.is_finite() && b.is_finite() && c.is_finite()) {
            return Err(GeometryError::NonFinite { x: a, y: b });
        }
        let n = a.hypot(b);
        if n == 0.0 {
            return Err(GeometryError::DegenerateInput("line normal (a, b) is zero"));
        }
        let sign = if a > 0.0 || (a == 0.0 && b > 0.0) { 1.0 } else { -1.0 };
        let k = sign / n;
        Ok(Self { a: a * k, b: b * k, c: c * k })
    }

    /// The line through two distinct points.
    pub fn through(p: Point2, q: Point2) -> Result<Self, GeometryError> {
        if p == q {
            return Err(GeometryError::DegenerateInput("line through coincident points"));
        }
        Self::through_point_with_direction(p, q - p)
    }

    pub fn through_point_with_direction(p: Point2, dir: Point2) -> Result<Self, GeometryError> {
        Self::through_point_with_normal(p, dir.perp())
    }

    pub fn through_point_with_normal(p: Point2, normal: Point2) -> Result<Self, GeometryError> {
        Self::from_coefficients(normal.x, normal.y, normal.dot(p))
    }

    pub fn horizontal(y: f64) -> Self {
        Self { a: 0.0, b: 1.0, c: y }
    }

    pub fn vertical(x: f64) -> Self {
        Self { a: 1.0, b: 0.0, c: x }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// Unit normal `(a, b)`.
    pub fn normal(&self) -> Point2 {
        Point2::new(self.a, self.b)
    }

    /// Unit direction `(-b, a)`.
    pub fn direction(&self) -> Point2 {
        self.normal().perp()
    }

    /// `None` for vertical lines.
    pub fn slope(&self) -> Option<f64> {
        (self.b != 0.0).then(|| -self.a / self.b)
    }

    pub fn is_horizontal(&self) -> bool {
        self.a.abs() <= PARALLEL_EPS
    }

    pub fn is_vertical(&self) -> bool {
        self.b.abs() <= PARALLEL_EPS
    }

    pub fn signed_distance(&self, p: Point2) -> f64 {
        self.a * p.x + self.b * p.y - self.c
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.signed_distance(p).abs() <= tol
    }

    /// Orthogonal projection of `p` onto the line.
    pub fn foot_of(&self, p: Point2) -> Point2 {
        p - self.normal() * self.signed_distance(p)
    }

    /// A point of the line (the foot of the origin).
    pub fn anchor(&self) -> Point2 {
        self.normal() * self.c
    }

    pub fn offset(&self, distance: f64) -> Line2 {
        Line2 { c: self.c + distance, ..*self }
    }

    pub fn intersect(&self, other: &Line2) -> Result<Point2, GeometryError> {
        let det = self.a * other.b - self.b * other.a;
        if det.abs() <= PARALLEL_EPS {
            // Parallel: coincident iff the anchor of one lies on the other.
            let gap = other.signed_distance(self.anchor());
            return Err(if gap.abs() <= DEFAULT_TOL_GEOM {
                GeometryError::InfiniteIntersections
            } else {
                GeometryError::NoIntersection
            });
        }
        let x = (self.c * other.b - self.b * other.c) / det;
        let y = (self.a * other.c - self.c * other.a) / det;
        Point2::try_new(x, y)
    }

    /// Point of the line on the vertical `x = x0`.
    pub fn at_x(&self, x0: f64) -> Result<Point2, GeometryError> {
        self.intersect(&Line2::vertical(x0)).map(|p| Point2::new(x0, p.y))
    }
}

impl fmt::Display for Line2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x + {}y = {}", self.a, self.b, self.c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle2 {
    pub center: Point2,
    pub radius: f64,
}

impl Circle2 {
    pub fn new(center: Point2, radius: f64) -> Result<Self, GeometryError> {
        if !center.is_finite() || !radius.is_finite() {
            return Err(GeometryError::NonFinite { x: center.x, y: radius });
        }
        if radius <= 0.0 {
            return Err(GeometryError::DegenerateInput("circle radius must be positive"));
        }
        Ok(Self { center, radius })
    }

    /// `‖p − center‖ − radius`.
    pub fn radial_residual(&self, p: Point2) -> f64 {
        p.distance(self.center) - self.radius
    }

    pub fn contains(&self, p: Point2, tol: f64) -> bool {
        self.radial_residual(p).abs() <= tol
    }

    pub fn point_at_angle(&self, theta: f64) -> Point2 {
        self.center + Point2::new(theta.cos(), theta.sin()) * self.radius
    }

    pub fn top(&self) -> Point2 {
        self.center + Point2::new(0.0, self.radius)
    }
}

pub fn midpoint(p: Point2, q: Point2) -> Point2 {
    Point2::new((p.x + q.x) / 2.0, (p.y + q.y) / 2.0)
}

/// Locus of points equidistant from `p` and `q`.
pub fn perpendicular_bisector(p: Point2, q: Point2) -> Result<Line2, GeometryError> {
    if p == q {
        return Err(GeometryError::DegenerateInput("bisector of coincident points"));
    }
    Line2::through_point_with_normal(midpoint(p, q), q - p)
}

pub fn intersect_line_with_horizontal(line: &Line2, y0: f64) -> Result<Point2, GeometryError> {
    line.intersect(&Line2::horizontal(y0))
        .map(|p| Point2::new(p.x, y0))
}

/// Intersections of a line and a circle, ordered by descending `y`, ties by
/// ascending `x`. A tangent line within `DEFAULT_TOL_GEOM` yields one point.
pub fn intersect_line_circle(line: &Line2, circle: &Circle2) -> Vec<Point2> {
    let d = line.signed_distance(circle.center);
    let foot = line.foot_of(circle.center);
    let r = circle.radius;
    if d.abs() > r {
        return if d.abs() - r <= DEFAULT_TOL_GEOM { vec![foot] } else { Vec::new() };
    }
    let h = ((r - d.abs()) * (r + d.abs())).sqrt();
    if h == 0.0 {
        return vec![foot];
    }
    let dir = line.direction();
    let mut pts = vec![foot + dir * h, foot - dir * h];
    pts.sort_by(|p, q| {
        q.y.partial_cmp(&p.y)
            .unwrap_or(Ordering::Equal)
            .then(p.x.partial_cmp(&q.x).unwrap_or(Ordering::Equal))
    });
    pts
}

/// Circumcircle of three non-collinear points.
pub fn circle_through_three_points(
    p: Point2,
    q: Point2,
    r: Point2,
) -> Result<Circle2, GeometryError> {
    if p == q || q == r || p == r {
        return Err(GeometryError::DegenerateInput("circle through repeated points"));
    }
    // Translate to p for conditioning.
    let b = q - p;
    let c = r - p;
    let d = 2.0 * b.cross(c);
    if d.abs() <= 1e-14 * b.norm() * c.norm() {
        return Err(GeometryError::CollinearPoints);
    }
    let bb = b.dot(b);
    let cc = c.dot(c);
    let u = Point2::new((c.y * bb - b.y * cc) / d, (b.x * cc - c.x * bb) / d);
    Circle2::new(p + u, u.norm())
}
