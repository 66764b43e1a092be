//! Per-phase equivalent circuit of the induction machine.
//!
//! Stator `Zs = Rs + jXs`, purely reactive magnetizing branch `Zm = jXm`,
//! rotor branch `Zr(s) = R'r/s + jX'r`. The supply voltage is the real
//! reference phasor, so currents here live in the "circuit frame"
//! (`x = Re I`, `y = Im I`).

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::{circle_through_three_points, Circle2, GeometryError, Point2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter { name: &'static str, value: f64, reason: &'static str },
    #[error("invalid slip {0}: slip must be finite and nonzero")]
    InvalidSlip(f64),
    #[error("singular network: {0}")]
    SingularNetwork(&'static str),
    #[error("locus fit failed: {0}")]
    LocusFit(#[from] GeometryError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    pub rs: f64,
    pub xs: f64,
    pub xm: f64,
    /// Rotor resistance referred to the stator.
    pub rr: f64,
    /// Rotor leakage reactance referred to the stator.
    pub xr: f64,
    /// Per-phase supply voltage magnitude.
    pub v: f64,
}

impl CircuitParams {
    pub fn new(rs: f64, xs: f64, xm: f64, rr: f64, xr: f64, v: f64) -> Result<Self, CircuitError> {
        let p = Self { rs, xs, xm, rr, xr, v };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        let positive = [("Xm", self.xm), ("Rr", self.rr), ("V", self.v)];
        let non_negative = [("Rs", self.rs), ("Xs", self.xs), ("Xr", self.xr)];
        for (name, value) in positive.into_iter().chain(non_negative) {
            if !value.is_finite() {
                return Err(CircuitError::InvalidParameter { name, value, reason: "must be finite" });
            }
        }
        for (name, value) in positive {
            if value <= 0.0 {
                return Err(CircuitError::InvalidParameter { name, value, reason: "must be > 0" });
            }
        }
        for (name, value) in non_negative {
            if value < 0.0 {
                return Err(CircuitError::InvalidParameter { name, value, reason: "must be >= 0" });
            }
        }
        Ok(())
    }

    pub fn z_s(&self) -> Complex64 {
        Complex64::new(self.rs, self.xs)
    }

    pub fn z_m(&self) -> Complex64 {
        Complex64::new(0.0, self.xm)
    }

    pub fn z_r(&self, s: SlipValue) -> Complex64 {
        Complex64::new(self.rr / s.get(), self.xr)
    }

    pub fn voltage(&self) -> Complex64 {
        Complex64::new(self.v, 0.0)
    }
}

/// Thévenin source and impedance seen from the rotor branch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheveninEquivalent {
    pub r_th: f64,
    pub x_th: f64,
    pub v_th: Complex64,
}

impl TheveninEquivalent {
    pub fn z_th(&self) -> Complex64 {
        Complex64::new(self.r_th, self.x_th)
    }

    /// `R_th + j(X_th + X'r)`: the slip-independent part of the loop impedance.
    pub fn loop_constant(&self, p: &CircuitParams) -> Complex64 {
        Complex64::new(self.r_th, self.x_th + p.xr)
    }
}

/// Nonzero finite slip.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SlipValue(f64);

impl SlipValue {
    pub fn new(s: f64) -> Result<Self, CircuitError> {
        if s == 0.0 || !s.is_finite() {
            Err(CircuitError::InvalidSlip(s))
        } else {
            Ok(Self(s))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for SlipValue {
    type Error = CircuitError;
    fn try_from(s: f64) -> Result<Self, CircuitError> {
        Self::new(s)
    }
}

/// A steady-state operating point: a finite slip or the no-load limit `s → 0⁺`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OperatingPoint {
    Slip(SlipValue),
    NoLoad,
}

impl From<SlipValue> for OperatingPoint {
    fn from(s: SlipValue) -> Self {
        OperatingPoint::Slip(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LocusKind {
    Rotor,
    Input,
}

pub fn to_point(c: Complex64) -> Point2 {
    Point2::new(c.re, c.im)
}

pub fn thevenin(p: &CircuitParams) -> Result<TheveninEquivalent, CircuitError> {
    let (zs, zm) = (p.z_s(), p.z_m());
    let sum = zs + zm;
    if sum == Complex64::new(0.0, 0.0) {
        return Err(CircuitError::SingularNetwork("Zs + Zm = 0"));
    }
    let z_th = zs * zm / sum;
    Ok(TheveninEquivalent { r_th: z_th.re, x_th: z_th.im, v_th: p.voltage() * zm / sum })
}

/// `I_r(s) = V_th / (a(s) + jb)` with `a(s) = R_th + R'r/s`, `b = X_th + X'r`.
pub fn rotor_current(th: &TheveninEquivalent, p: &CircuitParams, s: SlipValue) -> Complex64 {
    let a = th.r_th + p.rr / s.get();
    let b = th.x_th + p.xr;
    th.v_th / Complex64::new(a, b)
}

pub fn rotor_current_at(th: &TheveninEquivalent, p: &CircuitParams, op: OperatingPoint) -> Complex64 {
    match op {
        OperatingPoint::Slip(s) => rotor_current(th, p, s),
        OperatingPoint::NoLoad => Complex64::new(0.0, 0.0),
    }
}

/// Terminal current `V / (Zs + Zm ∥ Zr(s))`; `V / (Zs + Zm)` at no load.
pub fn input_current(p: &CircuitParams, op: OperatingPoint) -> Result<Complex64, CircuitError> {
    let (zs, zm) = (p.z_s(), p.z_m());
    let z_in = match op {
        OperatingPoint::NoLoad => zs + zm,
        OperatingPoint::Slip(s) => {
            let zr = p.z_r(s);
            zs + zm * zr / (zm + zr)
        }
    };
    if z_in == Complex64::new(0.0, 0.0) || !z_in.is_finite() {
        return Err(CircuitError::SingularNetwork("input impedance is zero"));
    }
    Ok(p.voltage() / z_in)
}

pub fn current(
    th: &TheveninEquivalent,
    p: &CircuitParams,
    kind: LocusKind,
    op: OperatingPoint,
) -> Result<Complex64, CircuitError> {
    match kind {
        LocusKind::Rotor => Ok(rotor_current_at(th, p, op)),
        LocusKind::Input => input_current(p, op),
    }
}

/// Circle carrying `{current(s) : s ∈ ℝ \ {0}}`, realized as the circumcircle
/// of three operating points (input: no load, 1, −1; rotor: 1, −1, 0.5).
pub fn analytic_locus_circle(p: &CircuitParams, kind: LocusKind) -> Result<Circle2, CircuitError> {
    let th = thevenin(p)?;
    let slip = |s: f64| OperatingPoint::Slip(SlipValue(s));
    let ops = match kind {
        LocusKind::Input => [OperatingPoint::NoLoad, slip(1.0), slip(-1.0)],
        LocusKind::Rotor => [slip(1.0), slip(-1.0), slip(0.5)],
    };
    let mut pts = [Point2::ORIGIN; 3];
    for (pt, op) in pts.iter_mut().zip(ops) {
        *pt = to_point(current(&th, p, kind, op)?);
    }
    Ok(circle_through_three_points(pts[0], pts[1], pts[2])?)
}

/// Air-gap power per phase, `|I_r|² R'r / s` (torque up to the synchronous speed).
pub fn torque(th: &TheveninEquivalent, p: &CircuitParams, s: SlipValue) -> f64 {
    rotor_current(th, p, s).norm_sqr() * p.rr / s.get()
}

/// Rotated-phasor torque reference `ω = V_th·conj(δ)/b`, `δ = R_th + jb`.
///
/// On the rotor locus `|I_r|² = 2 Re{c̄ I_r}` with centre `c = −jV_th/(2b)`,
/// so air-gap power `Re{V_th* I_r} − R_th|I_r|²` is the linear functional
/// `Im{I_r ω*}`.
pub fn torque_reference(th: &TheveninEquivalent, p: &CircuitParams) -> Complex64 {
    let delta = th.loop_constant(p);
    th.v_th * delta.conj() / delta.im
}

/// Torque as the imaginary part of the current rotated into the torque frame.
pub fn torque_rotated(th: &TheveninEquivalent, p: &CircuitParams, s: SlipValue) -> f64 {
    (rotor_current(th, p, s) * torque_reference(th, p).conj()).im
}

/// `R'r / |δ|`: the textbook maximum-torque slip.
pub fn closed_form_max_torque_slip(th: &TheveninEquivalent, p: &CircuitParams) -> f64 {
    p.rr / th.r_th.hypot(th.x_th + p.xr)
}

const GRID_POINTS: usize = 1000;
const GRID_LO: f64 = 1e-3;
const GRID_HI: f64 = 10.0;
const GOLDEN_TOL: f64 = 1e-10;

/// Maximizer of a single-peaked function on a log grid refined by
/// golden-section search. The grid is widened by decades while the peak
/// sits on its edge.
pub fn golden_section_argmax(f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (mut lo, mut hi) = (GRID_LO, GRID_HI);
    let (a, b) = loop {
        let ratio = (hi / lo).powf(1.0 / (GRID_POINTS - 1) as f64);
        let grid: Vec<f64> = (0..GRID_POINTS).map(|i| lo * ratio.powi(i as i32)).collect();
        let values: Vec<f64> = grid.iter().map(|&s| f(s)).collect();
        let best = (0..GRID_POINTS)
            .max_by(|&i, &j| values[i].total_cmp(&values[j]))
            .expect("grid is non-empty");
        if best == GRID_POINTS - 1 && hi < 1e8 {
            lo = hi / 10.0;
            hi *= 1e4;
        } else if best == 0 && lo > 1e-12 {
            hi = lo * 10.0;
            lo /= 1e4;
        } else {
            break (grid[best.saturating_sub(1)], grid[(best + 1).min(GRID_POINTS - 1)]);
        }
    };

    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (a, b);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > GOLDEN_TOL {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    let s = parabolic_polish(&f, (a + b) / 2.0);
    (s, f(s))
}

/// One vertex step of the parabola through `s(1 − h), s, s(1 + h)`.
///
/// Golden-section comparisons stall once `f` differences drop below
/// rounding, about `√ε` relative from the peak; the vertex of a wider
/// stencil is not limited that way.
fn parabolic_polish(f: &impl Fn(f64) -> f64, s: f64) -> f64 {
    let h = 1e-5 * s;
    let (fm, f0, fp) = (f(s - h), f(s), f(s + h));
    let curvature = fm - 2.0 * f0 + fp;
    if curvature.is_nan() || curvature >= 0.0 {
        return s;
    }
    let step = 0.5 * h * (fm - fp) / curvature;
    if step.abs() > h {
        s
    } else {
        s + step
    }
}

/// Numeric `argmax_{s>0} T(s)`, returned as `(s_mT, T_max)`.
pub fn max_torque_slip(th: &TheveninEquivalent, p: &CircuitParams) -> (f64, f64) {
    golden_section_argmax(|s| torque(th, p, SlipValue(s)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    fn reference() -> CircuitParams {
        CircuitParams::new(0.0, 0.0, 10.0, 1.0, 1.0, 1.0).unwrap()
    }

    fn slip(s: f64) -> SlipValue {
        SlipValue::new(s).unwrap()
    }

    #[test]
    fn thevenin_reference_passes_voltage() {
        let th = thevenin(&reference()).unwrap();
        assert_eq!(th.z_th(), Complex64::new(0.0, 0.0));
        assert_eq!(th.v_th, Complex64::new(1.0, 0.0));
    }

    #[test]
    fn thevenin_direct_arithmetic() {
        let p = CircuitParams::new(0.1, 0.5, 20.0, 1.0, 1.0, 1.0).unwrap();
        let th = thevenin(&p).unwrap();
        // j20/(0.1 + j20.5) and (0.1+j0.5)·j20/(0.1+j20.5), evaluated by hand
        assert_abs_diff_eq!(th.v_th.re, 0.9755865416646838, epsilon = 1e-12);
        assert_abs_diff_eq!(th.v_th.im, 0.004758958739827726, epsilon = 1e-12);
        assert_abs_diff_eq!(th.r_th, 0.09517917479655451, epsilon = 1e-12);
        assert_abs_diff_eq!(th.x_th, 0.48826916670632464, epsilon = 1e-12);
    }

    #[test]
    fn thevenin_large_magnetizing_limit() {
        let p = CircuitParams::new(1.0, 1.0, 1e9, 1.0, 1.0, 1.0).unwrap();
        let th = thevenin(&p).unwrap();
        assert_abs_diff_eq!(th.r_th, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(th.x_th, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!((th.v_th - 1.0).norm(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn rotor_current_reference() {
        let p = reference();
        let th = thevenin(&p).unwrap();
        let i = rotor_current(&th, &p, slip(1.0));
        assert_abs_diff_eq!((i - Complex64::new(0.5, -0.5)).norm(), 0.0, epsilon = 1e-15);
        assert!(rotor_current(&th, &p, slip(1e-9)).norm() <= 1e-8);
        let i = rotor_current(&th, &p, slip(-1.0));
        assert_abs_diff_eq!((i - Complex64::new(-0.5, -0.5)).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(SlipValue::new(0.0), Err(CircuitError::InvalidSlip(0.0)));
    }

    #[test]
    fn rotor_current_matches_expanded_components() {
        let p = CircuitParams::new(0.3, 0.7, 15.0, 0.4, 0.9, 2.0).unwrap();
        let th = thevenin(&p).unwrap();
        for s in [-2.0, -0.1, 0.05, 0.5, 3.0] {
            let a = th.r_th + p.rr / s;
            let b = th.x_th + p.xr;
            let den = a * a + b * b;
            let x = (th.v_th.re * a + th.v_th.im * b) / den;
            let y = (th.v_th.im * a - th.v_th.re * b) / den;
            let i = rotor_current(&th, &p, slip(s));
            assert_abs_diff_eq!(i.re, x, epsilon = 1e-14);
            assert_abs_diff_eq!(i.im, y, epsilon = 1e-14);
        }
    }

    #[test]
    fn input_current_reference() {
        let p = reference();
        let i0 = input_current(&p, OperatingPoint::NoLoad).unwrap();
        assert_abs_diff_eq!((i0 - Complex64::new(0.0, -0.1)).norm(), 0.0, epsilon = 1e-15);
        // I = V/Zm + I_r = -0.1j + (0.5 - 0.5j)
        let i1 = input_current(&p, slip(1.0).into()).unwrap();
        assert_abs_diff_eq!((i1 - Complex64::new(0.5, -0.6)).norm(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn input_current_large_magnetizing_limit() {
        let p = CircuitParams::new(0.2, 0.4, 1e9, 0.5, 0.6, 1.0).unwrap();
        let th = thevenin(&p).unwrap();
        for s in [0.1, 1.0, -1.0] {
            let i = input_current(&p, slip(s).into()).unwrap();
            assert_abs_diff_eq!((i - rotor_current(&th, &p, slip(s))).norm(), 0.0, epsilon = 1e-6);
        }
    }

    #[test]
    fn no_load_limit_matches_tiny_slip() {
        let p = CircuitParams::new(0.2, 0.4, 12.0, 0.5, 0.6, 1.0).unwrap();
        let exact = input_current(&p, OperatingPoint::NoLoad).unwrap();
        let near = input_current(&p, slip(1e-9).into()).unwrap();
        assert_abs_diff_eq!((exact - near).norm(), 0.0, epsilon = 1e-6);
    }

    #[test]
    fn locus_circles_reference() {
        let p = reference();
        let rotor = analytic_locus_circle(&p, LocusKind::Rotor).unwrap();
        assert_abs_diff_eq!(rotor.center.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rotor.center.y, -0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(rotor.radius, 0.5, epsilon = 1e-12);
        let input = analytic_locus_circle(&p, LocusKind::Input).unwrap();
        assert_abs_diff_eq!(input.center.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(input.center.y, -0.6, epsilon = 1e-12);
        assert_abs_diff_eq!(input.radius, 0.5, epsilon = 1e-12);
    }

    #[test]
    fn torque_reference_values() {
        let p = reference();
        let th = thevenin(&p).unwrap();
        assert_abs_diff_eq!(torque(&th, &p, slip(1.0)), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(torque(&th, &p, slip(2.0)), 0.4, epsilon = 1e-15);
        assert!(torque(&th, &p, slip(1e-9)).abs() <= 1e-6);
        for s in [0.1, 0.7, 1.3, -0.4] {
            assert_abs_diff_eq!(torque(&th, &p, slip(s)), s / (1.0 + s * s), epsilon = 1e-15);
            assert_abs_diff_eq!(torque_rotated(&th, &p, slip(s)), s / (1.0 + s * s), epsilon = 1e-15);
        }
    }

    #[test]
    fn max_torque_reference() {
        let p = reference();
        let th = thevenin(&p).unwrap();
        let (s, t) = max_torque_slip(&th, &p);
        assert_relative_eq!(s, 1.0, max_relative = 1e-6);
        assert_relative_eq!(t, 0.5, max_relative = 1e-12);
    }

    #[test]
    fn max_torque_given_thevenin() {
        let p = CircuitParams::new(0.0, 0.0, 10.0, 0.2, 0.5, 1.0).unwrap();
        let th = TheveninEquivalent { r_th: 0.09501, x_th: 0.48838, v_th: Complex64::new(1.0, 0.0) };
        let (s, _) = max_torque_slip(&th, &p);
        assert_relative_eq!(s, 0.2014228485267462, max_relative = 1e-6);
        assert_relative_eq!(s, closed_form_max_torque_slip(&th, &p), max_relative = 1e-6);

        // doubling R'r doubles s_mT and leaves T_max alone
        let p2 = CircuitParams { rr: 0.4, ..p };
        let (s2, t2) = max_torque_slip(&th, &p2);
        let (_, t1) = max_torque_slip(&th, &p);
        assert_relative_eq!(s2, 2.0 * s, max_relative = 1e-6);
        assert_relative_eq!(t2, t1, max_relative = 1e-6);
    }

    #[test]
    fn max_torque_beyond_default_grid() {
        // s_mT = 2 / 0.1 = 20 lies past the initial grid
        let p = CircuitParams::new(0.0, 0.0, 1e12, 2.0, 0.1, 1.0).unwrap();
        let th = thevenin(&p).unwrap();
        let (s, _) = max_torque_slip(&th, &p);
        assert_relative_eq!(s, closed_form_max_torque_slip(&th, &p), max_relative = 1e-6);
    }

    #[test]
    fn parameter_validation() {
        assert!(matches!(
            CircuitParams::new(0.0, 0.0, 0.0, 1.0, 1.0, 1.0),
            Err(CircuitError::InvalidParameter { name: "Xm", .. })
        ));
        assert!(matches!(
            CircuitParams::new(-0.1, 0.0, 1.0, 1.0, 1.0, 1.0),
            Err(CircuitError::InvalidParameter { name: "Rs", .. })
        ));
        assert!(CircuitParams::new(0.0, 0.0, 1.0, 1.0, 1.0, f64::NAN).is_err());
    }
}
