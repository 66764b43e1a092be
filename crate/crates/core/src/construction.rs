//! Ruler-and-compass reconstruction of the circle diagram from the no-load
//! and blocked-rotor current phasors.
//!
//! The pipeline mirrors the classical recipe: midpoint and perpendicular
//! bisector of the output line, centre on the reference horizontal through
//! the no-load point, torque chord to `E`, the two extremal points, and the
//! slip and efficiency scales. Every readout is a vertical intercept or a
//! central projection, so nothing here needs the circuit parameters.

use std::f64::consts::TAU;

use thiserror::Error;

use crate::geometry::{
    intersect_line_circle, intersect_line_with_horizontal, midpoint, perpendicular_bisector,
    Circle2, GeometryError, Line2, Point2, DEFAULT_TOL_GEOM,
};

/// Relative offset of the slip-scale line from the torque chord, in radii.
pub const SLIP_SCALE_OFFSET: f64 = 0.15;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructionError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("invalid phasor: {0}")]
    InvalidPhasor(&'static str),
    #[error("no-load and blocked-rotor points coincide")]
    CoincidentTestPoints,
    #[error("ill-posed construction: {0}")]
    IllPosedConstruction(&'static str),
    #[error("torque chord is degenerate (E coincides with the no-load point)")]
    DegenerateChord,
    #[error("ill-posed scale: {0}")]
    IllPosedScale(&'static str),
    #[error("point is off the circle by {residual:e}")]
    NotOnCircle { residual: f64 },
    #[error("point lies outside the motoring arc")]
    OutsideMotoringArc,
    #[error("invalid copper-loss split {0}; expected a fraction in [0, 1]")]
    InvalidSplit(f64),
}

/// Current phasor: magnitude in amperes, angle in radians counter-clockwise
/// from the reference horizontal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Phasor {
    pub magnitude: f64,
    pub angle: f64,
}

impl Phasor {
    pub fn new(magnitude: f64, angle: f64) -> Result<Self, ConstructionError> {
        if !magnitude.is_finite() || magnitude < 0.0 {
            return Err(ConstructionError::InvalidPhasor("magnitude must be finite and >= 0"));
        }
        if !angle.is_finite() {
            return Err(ConstructionError::InvalidPhasor("angle must be finite"));
        }
        Ok(Self { magnitude, angle })
    }

    pub fn from_degrees(magnitude: f64, angle_deg: f64) -> Result<Self, ConstructionError> {
        Self::new(magnitude, angle_deg.to_radians())
    }

    pub fn from_point(p: Point2) -> Self {
        Self { magnitude: p.norm(), angle: p.y.atan2(p.x) }
    }

    pub fn to_point(self) -> Point2 {
        phasor_to_point(self)
    }
}

pub fn phasor_to_point(ph: Phasor) -> Point2 {
    Point2::new(ph.magnitude * ph.angle.cos(), ph.magnitude * ph.angle.sin())
}

/// No-load point `p0` (O′) and blocked-rotor point `pA` (A), the latter
/// already referred to rated voltage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestPoints {
    p0: Point2,
    pa: Point2,
}

impl TestPoints {
    pub fn new(p0: Point2, pa: Point2) -> Result<Self, ConstructionError> {
        let p0 = Point2::try_new(p0.x, p0.y)?;
        let pa = Point2::try_new(pa.x, pa.y)?;
        if p0 == pa {
            return Err(ConstructionError::CoincidentTestPoints);
        }
        Ok(Self { p0, pa })
    }

    pub fn from_phasors(no_load: Phasor, blocked: Phasor) -> Result<Self, ConstructionError> {
        Self::new(no_load.to_point(), blocked.to_point())
    }

    pub fn p0(&self) -> Point2 {
        self.p0
    }

    pub fn pa(&self) -> Point2 {
        self.pa
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleParts {
    pub circle: Circle2,
    pub c_prime: Point2,
    pub output_line: Line2,
}

/// The unique circle through both test points with centre on `y = p0.y`.
pub fn build_circle(test: &TestPoints) -> Result<CircleParts, ConstructionError> {
    let (p0, pa) = (test.p0, test.pa);
    let c_prime = midpoint(p0, pa);
    let output_line = Line2::through(p0, pa)?;
    let bisector = perpendicular_bisector(p0, pa)?;
    let center = intersect_line_with_horizontal(&bisector, p0.y).map_err(|e| match e {
        GeometryError::NoIntersection | GeometryError::InfiniteIntersections => {
            ConstructionError::IllPosedConstruction(
                "test points are vertically aligned; bisector is parallel to the reference horizontal",
            )
        }
        other => other.into(),
    })?;
    let circle = Circle2::new(center, center.distance(p0))?;
    Ok(CircleParts { circle, c_prime, output_line })
}

/// Share of the blocked-rotor copper loss assigned to the stator. The torque
/// chord point `E` sits this fraction of the way from the reference
/// horizontal up to `pA`; the classical recipe uses one half.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CopperLossSplit(f64);

impl CopperLossSplit {
    pub const EQUAL: CopperLossSplit = CopperLossSplit(0.5);

    pub fn new(stator_fraction: f64) -> Result<Self, ConstructionError> {
        if (0.0..=1.0).contains(&stator_fraction) {
            Ok(Self(stator_fraction))
        } else {
            Err(ConstructionError::InvalidSplit(stator_fraction))
        }
    }

    pub fn stator_fraction(self) -> f64 {
        self.0
    }
}

impl Default for CopperLossSplit {
    fn default() -> Self {
        Self::EQUAL
    }
}

/// `E = (x_A, (y0 + yA)/2)` and the chord from `p0` through `E`.
pub fn torque_chord(test: &TestPoints) -> Result<(Point2, Line2), ConstructionError> {
    torque_chord_with_split(test, CopperLossSplit::EQUAL)
}

pub fn torque_chord_with_split(
    test: &TestPoints,
    split: CopperLossSplit,
) -> Result<(Point2, Line2), ConstructionError> {
    let (p0, pa) = (test.p0, test.pa);
    let e = if split == CopperLossSplit::EQUAL {
        Point2::new(pa.x, (p0.y + pa.y) / 2.0)
    } else {
        Point2::new(pa.x, p0.y + split.0 * (pa.y - p0.y))
    };
    if e == p0 {
        return Err(ConstructionError::DegenerateChord);
    }
    Ok((e, Line2::through(p0, e)?))
}

/// Upper intersections of the circle with the lines through the centre
/// perpendicular to the output line (`M_O`) and to the torque chord (`M_T`).
pub fn extremal_points(circle: &Circle2, output_line: &Line2, chord: &Line2) -> (Point2, Point2) {
    let upper = |line: &Line2| {
        let radial = Line2::through_point_with_direction(circle.center, line.normal())
            .expect("unit normal is never zero");
        intersect_line_circle(&radial, circle)[0]
    };
    (upper(output_line), upper(chord))
}

/// A calibrated straight scale: label 0 at the first tick, 1 at the last.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleLine {
    pub line: Line2,
    pub ticks: Vec<(Point2, f64)>,
}

impl ScaleLine {
    fn calibrated(line: Line2, zero: Point2, one: Point2, divisions: usize) -> Self {
        let ticks = (0..=divisions)
            .map(|k| {
                let t = k as f64 / divisions as f64;
                (zero + (one - zero) * t, t)
            })
            .collect();
        Self { line, ticks }
    }

    pub fn zero(&self) -> Point2 {
        self.ticks[0].0
    }

    pub fn one(&self) -> Point2 {
        self.ticks[self.ticks.len() - 1].0
    }

    /// Scale value of a point on the line (linear in arc length, signed).
    pub fn value_at(&self, x: Point2) -> f64 {
        let span = self.one() - self.zero();
        (x - self.zero()).dot(span) / span.dot(span)
    }

    pub fn point_at(&self, value: f64) -> Point2 {
        self.zero() + (self.one() - self.zero()) * value
    }
}

/// Slip scale parallel to the torque chord, on the side away from `pA`:
/// 0 on the tangent (vertical) through `p0`, 1 on the output line. The slip
/// of an operating point is read by projecting it from `p0`.
///
/// The efficiency scale lies on the horizontal through the top of the
/// circle: 0 where the output line meets it, 1 on the vertical through the
/// pole `T` (output line ∩ `y = 0`). Points are read by projection from `T`.
pub fn annotate_scales(
    test: &TestPoints,
    parts: &CircleParts,
    chord: &Line2,
) -> Result<(ScaleLine, ScaleLine, Point2), ConstructionError> {
    let p0 = test.p0;
    let r = parts.circle.radius;

    let mut away = chord.normal();
    if away.dot(test.pa - p0) > 0.0 {
        away = -away;
    }
    let slip_line = Line2::through_point_with_direction(p0 + away * (SLIP_SCALE_OFFSET * r), chord.direction())?;
    let zero = slip_line
        .intersect(&Line2::vertical(p0.x))
        .map_err(|_| ConstructionError::IllPosedScale("torque chord is vertical"))?;
    let one = slip_line
        .intersect(&parts.output_line)
        .map_err(|_| ConstructionError::IllPosedScale("torque chord is parallel to the output line"))?;
    let slip_scale = ScaleLine::calibrated(slip_line, zero, one, 10);

    let pole = intersect_line_with_horizontal(&parts.output_line, 0.0)
        .map_err(|_| ConstructionError::IllPosedScale("output line is horizontal"))?;
    let top = parts.circle.top();
    if top.y == 0.0 {
        return Err(ConstructionError::IllPosedScale("circle top lies on the abscissa"));
    }
    let top_line = Line2::horizontal(top.y);
    let eff_zero = intersect_line_with_horizontal(&parts.output_line, top.y)?;
    let eff_one = Point2::new(pole.x, top.y);
    if eff_zero == eff_one {
        return Err(ConstructionError::IllPosedScale("efficiency scale has zero length"));
    }
    let efficiency_line = ScaleLine::calibrated(top_line, eff_zero, eff_one, 10);
    Ok((slip_scale, efficiency_line, pole))
}

/// Which diagram axis carries the voltage phasor, for power-factor readout.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PfAxis {
    X,
    #[default]
    Y,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramOptions {
    pub tol_geom: f64,
    pub split: CopperLossSplit,
}

impl Default for DiagramOptions {
    fn default() -> Self {
        Self { tol_geom: DEFAULT_TOL_GEOM, split: CopperLossSplit::EQUAL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingReadout {
    pub input_current: Phasor,
    pub power_factor: f64,
    pub output_segment: f64,
    pub torque_segment: f64,
    pub slip: f64,
    pub efficiency: f64,
}

/// Vertical-intercept readouts without arc restrictions. Ratios are signed,
/// so they extend past the motoring arc (slip > 1 when braking, < 0 when
/// generating).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SignedReadout {
    pub output_segment: f64,
    pub torque_segment: f64,
    pub slip: f64,
    pub efficiency: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircleDiagram {
    pub test: TestPoints,
    pub circle: Circle2,
    pub output_line: Line2,
    pub torque_chord: Line2,
    pub e: Point2,
    pub c_prime: Point2,
    pub m_o: Point2,
    pub m_t: Point2,
    pub slip_scale: ScaleLine,
    pub efficiency_line: ScaleLine,
    /// Projection centre of the efficiency scale.
    pub efficiency_pole: Point2,
    pub options: DiagramOptions,
}

/// Largest violations of the diagram invariants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantResiduals {
    pub center_offset: f64,
    pub test_points_on_circle: f64,
    pub extremal_points_on_circle: f64,
    pub mt_orthogonality: f64,
    pub mo_orthogonality: f64,
}

impl InvariantResiduals {
    pub fn max(&self) -> f64 {
        [
            self.center_offset,
            self.test_points_on_circle,
            self.extremal_points_on_circle,
            self.mt_orthogonality,
            self.mo_orthogonality,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

impl CircleDiagram {
    pub fn build(test: TestPoints) -> Result<Self, ConstructionError> {
        Self::build_with(test, DiagramOptions::default())
    }

    pub fn build_with(test: TestPoints, options: DiagramOptions) -> Result<Self, ConstructionError> {
        let parts = build_circle(&test)?;
        let (e, chord) = torque_chord_with_split(&test, options.split)?;
        let (m_o, m_t) = extremal_points(&parts.circle, &parts.output_line, &chord);
        let (slip_scale, efficiency_line, efficiency_pole) = annotate_scales(&test, &parts, &chord)?;
        Ok(Self {
            test,
            circle: parts.circle,
            output_line: parts.output_line,
            torque_chord: chord,
            e,
            c_prime: parts.c_prime,
            m_o,
            m_t,
            slip_scale,
            efficiency_line,
            efficiency_pole,
            options,
        })
    }

    pub fn from_phasors(no_load: Phasor, blocked: Phasor) -> Result<Self, ConstructionError> {
        Self::build(TestPoints::from_phasors(no_load, blocked)?)
    }

    fn scale(&self) -> f64 {
        self.circle.radius.max(1.0)
    }

    pub fn invariant_residuals(&self) -> InvariantResiduals {
        let c = self.circle;
        let on = |p: Point2| c.radial_residual(p).abs();
        InvariantResiduals {
            center_offset: (c.center.y - self.test.p0.y).abs(),
            test_points_on_circle: on(self.test.p0).max(on(self.test.pa)),
            extremal_points_on_circle: on(self.m_o).max(on(self.m_t)),
            mt_orthogonality: (self.m_t - c.center).dot(self.torque_chord.direction()).abs(),
            mo_orthogonality: (self.m_o - c.center).dot(self.output_line.direction()).abs(),
        }
    }

    /// Angle swept from `p0` to `p`, going round through the upper side.
    fn sweep_from_no_load(&self, p: Point2) -> f64 {
        let v0 = self.test.p0 - self.circle.center;
        let v = p - self.circle.center;
        let sigma = if v0.x < 0.0 { -1.0 } else { 1.0 };
        let phi = (sigma * v0.cross(v)).atan2(v0.dot(v));
        if phi < 0.0 {
            phi + TAU
        } else {
            phi
        }
    }

    /// True for points of the arc from `p0` to `pA` inclusive (upper side).
    pub fn on_motoring_arc(&self, p: Point2) -> bool {
        let tol_angle = self.options.tol_geom * self.scale() / self.circle.radius;
        let mut phi = self.sweep_from_no_load(p);
        if TAU - phi <= tol_angle {
            phi = 0.0;
        }
        phi <= self.sweep_from_no_load(self.test.pa) + tol_angle
    }

    pub fn signed_readouts(&self, p: Point2) -> Result<SignedReadout, ConstructionError> {
        let q1 = self.output_line.at_x(p.x)?;
        let q2 = self.torque_chord.at_x(p.x)?;
        let output_segment = p.y - q1.y;
        let torque_segment = p.y - q2.y;
        let slip = if torque_segment == 0.0 && q1.y == q2.y {
            0.0
        } else {
            (q1.y - q2.y) / torque_segment
        };
        let efficiency = if p.y == 0.0 { 0.0 } else { output_segment / p.y };
        Ok(SignedReadout { output_segment, torque_segment, slip, efficiency })
    }

    /// Classical readouts at a point of the motoring arc.
    ///
    /// With `Q1`, `Q2`, `D` the points of the output line, torque chord and
    /// abscissa on the vertical through `P`: output ∝ ‖P−Q1‖, torque ∝
    /// ‖P−Q2‖, slip = ‖Q1−Q2‖/‖P−Q2‖, efficiency = ‖P−Q1‖/‖P−D‖.
    pub fn readouts_at_point(
        &self,
        p: Point2,
        pf_axis: PfAxis,
    ) -> Result<OperatingReadout, ConstructionError> {
        let residual = self.circle.radial_residual(p);
        if residual.abs() > self.options.tol_geom * self.scale() {
            return Err(ConstructionError::NotOnCircle { residual });
        }
        if !self.on_motoring_arc(p) {
            return Err(ConstructionError::OutsideMotoringArc);
        }
        let q1 = self.output_line.at_x(p.x)?;
        let q2 = self.torque_chord.at_x(p.x)?;
        let output_segment = (p.y - q1.y).abs();
        let torque_segment = (p.y - q2.y).abs();
        // 0/0 at the no-load point: s -> 0+.
        let slip = if torque_segment == 0.0 { 0.0 } else { (q1.y - q2.y).abs() / torque_segment };
        let efficiency = if p.y == 0.0 { 0.0 } else { output_segment / p.y.abs() };
        let magnitude = p.norm();
        let power_factor = if magnitude == 0.0 {
            0.0
        } else {
            match pf_axis {
                PfAxis::X => p.x / magnitude,
                PfAxis::Y => p.y / magnitude,
            }
        };
        Ok(OperatingReadout {
            input_current: Phasor::from_point(p),
            power_factor,
            output_segment,
            torque_segment,
            slip,
            efficiency,
        })
    }

    /// Slip read by projecting `p` from `p0` onto the slip scale.
    pub fn read_slip_scale(&self, p: Point2) -> Result<f64, ConstructionError> {
        let p0 = self.test.p0;
        if p == p0 {
            return Ok(0.0);
        }
        let ray = Line2::through(p0, p)?;
        let x = ray.intersect(&self.slip_scale.line)?;
        Ok(self.slip_scale.value_at(x))
    }

    /// Efficiency read by projecting `p` from the pole onto the top scale.
    pub fn read_efficiency_scale(&self, p: Point2) -> Result<f64, ConstructionError> {
        let ray = Line2::through(self.efficiency_pole, p)?;
        let x = ray.intersect(&self.efficiency_line.line)?;
        Ok(self.efficiency_line.value_at(x))
    }

    /// Inverse of the slip scale: the circle point whose slip reading is `s`.
    pub fn point_at_slip(&self, s: f64) -> Result<Point2, ConstructionError> {
        let p0 = self.test.p0;
        let x = self.slip_scale.point_at(s);
        let ray = Line2::through(p0, x)?;
        intersect_line_circle(&ray, &self.circle)
            .into_iter()
            .max_by(|a, b| a.distance(p0).total_cmp(&b.distance(p0)))
            .ok_or(ConstructionError::IllPosedScale("slip ray misses the circle"))
    }
}
