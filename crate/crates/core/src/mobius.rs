//! Fractional-linear formulation of the current loci.
//!
//! With `z = 1/s` the rotor current is `I_r(z) = V_th / (R'r z + δ)`, a
//! Möbius map with `(a, b, c, d) = (0, V_th, R'r, δ)` and `δ = R_th + jb`.
//! The slip axis is the real line, so its image is a generalized circle.

use num_complex::Complex64;
use thiserror::Error;

use crate::circuit::{
    self, thevenin, CircuitError, CircuitParams, SlipValue, TheveninEquivalent,
};
use crate::geometry::{circle_through_three_points, Circle2, Line2, Point2};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MobiusError {
    #[error("degenerate map: ad - bc = 0")]
    DegenerateMap,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error("no sign change of the torque residual found")]
    NoBracket,
}

/// Point of the extended complex plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtComplex {
    Finite(Complex64),
    Infinity,
}

impl ExtComplex {
    pub fn finite(self) -> Option<Complex64> {
        match self {
            ExtComplex::Finite(z) => Some(z),
            ExtComplex::Infinity => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        self == ExtComplex::Infinity
    }
}

impl From<Complex64> for ExtComplex {
    fn from(z: Complex64) -> Self {
        ExtComplex::Finite(z)
    }
}

impl From<f64> for ExtComplex {
    fn from(x: f64) -> Self {
        ExtComplex::Finite(Complex64::new(x, 0.0))
    }
}

/// `z ↦ (az + b)/(cz + d)` with `ad − bc ≠ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    a: Complex64,
    b: Complex64,
    c: Complex64,
    d: Complex64,
}

impl MobiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self, MobiusError> {
        let det = a * d - b * c;
        let scale = (a * d).norm() + (b * c).norm();
        if det.norm() <= 1e-14 * scale || det == Complex64::new(0.0, 0.0) || !det.is_finite() {
            return Err(MobiusError::DegenerateMap);
        }
        Ok(Self { a, b, c, d })
    }

    pub fn coefficients(&self) -> [Complex64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn determinant(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    /// `−d/c`, or `∞` for affine maps.
    pub fn pole(&self) -> ExtComplex {
        if self.c == Complex64::new(0.0, 0.0) {
            ExtComplex::Infinity
        } else {
            ExtComplex::Finite(-self.d / self.c)
        }
    }

    pub fn evaluate(&self, z: ExtComplex) -> ExtComplex {
        let zero = Complex64::new(0.0, 0.0);
        match z {
            ExtComplex::Infinity => {
                if self.c == zero {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite(self.a / self.c)
                }
            }
            ExtComplex::Finite(z) => {
                let den = self.c * z + self.d;
                if den == zero {
                    ExtComplex::Infinity
                } else {
                    ExtComplex::Finite((self.a * z + self.b) / den)
                }
            }
        }
    }

    /// `f'(z) = det / (cz + d)²`; `None` at the pole.
    pub fn derivative(&self, z: Complex64) -> Option<Complex64> {
        let den = self.c * z + self.d;
        (den != Complex64::new(0.0, 0.0)).then(|| self.determinant() / (den * den))
    }

    fn pole_is_real(&self) -> bool {
        match self.pole() {
            ExtComplex::Infinity => true,
            ExtComplex::Finite(p) => p.im.abs() <= 1e-12 * p.norm().max(1.0),
        }
    }
}

/// Rotor-current map `(0, V_th, R'r, R_th + j(X_th + X'r))`.
pub fn from_circuit(th: &TheveninEquivalent, p: &CircuitParams) -> Result<MobiusMap, MobiusError> {
    MobiusMap::new(Complex64::new(0.0, 0.0), th.v_th, Complex64::new(p.rr, 0.0), th.loop_constant(p))
}

/// Terminal-current map in `z = 1/s`:
/// `I(z) = V(R'r z + Zm + jX'r) / ((Zs + Zm)R'r z + ZsZm + (Zs + Zm)jX'r)`.
pub fn input_from_circuit(p: &CircuitParams) -> Result<MobiusMap, MobiusError> {
    let (zs, zm, v) = (p.z_s(), p.z_m(), p.voltage());
    let jxr = Complex64::new(0.0, p.xr);
    MobiusMap::new(
        v * p.rr,
        v * (zm + jxr),
        (zs + zm) * p.rr,
        zs * zm + (zs + zm) * jxr,
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeneralizedCircle {
    Circle(Circle2),
    Line(Line2),
}

impl GeneralizedCircle {
    pub fn as_circle(&self) -> Option<&Circle2> {
        match self {
            GeneralizedCircle::Circle(c) => Some(c),
            GeneralizedCircle::Line(_) => None,
        }
    }

    /// Distance from `p` to the curve.
    pub fn residual(&self, p: Point2) -> f64 {
        match self {
            GeneralizedCircle::Circle(c) => c.radial_residual(p).abs(),
            GeneralizedCircle::Line(l) => l.signed_distance(p).abs(),
        }
    }
}

const PRIMARY_SAMPLES: [f64; 3] = [0.0, 1.0, -1.0];
const FALLBACK_SAMPLES: [f64; 3] = [2.0, 3.0, -2.0];

/// Image of the extended real axis.
pub fn image_of_real_axis(m: &MobiusMap) -> GeneralizedCircle {
    let images: Vec<Point2> = PRIMARY_SAMPLES
        .iter()
        .chain(FALLBACK_SAMPLES.iter())
        .filter_map(|&x| m.evaluate(x.into()).finite())
        .map(circuit::to_point)
        .collect();
    // A real pole sends the axis through ∞: the image is a line.
    if m.pole_is_real() {
        let line = Line2::through(images[0], images[1]).expect("injective map");
        return GeneralizedCircle::Line(line);
    }
    match circle_through_three_points(images[0], images[1], images[2]) {
        Ok(c) => GeneralizedCircle::Circle(c),
        Err(_) => GeneralizedCircle::Line(Line2::through(images[0], images[1]).expect("injective map")),
    }
}

/// Closed form `dI_r/ds = βγ / ((γz + δ)² s²)` at `z = 1/s`.
pub fn rotor_current_slip_derivative(th: &TheveninEquivalent, p: &CircuitParams, s: SlipValue) -> Complex64 {
    let s = s.get();
    let z = 1.0 / s;
    let (beta, gamma, delta) = (th.v_th, p.rr, th.loop_constant(p));
    let den = (gamma * z + delta) * s;
    beta * gamma / (den * den)
}

/// `Im{ dI_r/ds · ω* }` with the rotated torque reference `ω`; equals
/// `dT/ds` of the air-gap power, so it vanishes exactly at torque extrema.
pub fn torque_phase_residual(th: &TheveninEquivalent, p: &CircuitParams, s: SlipValue) -> f64 {
    let omega = circuit::torque_reference(th, p);
    (rotor_current_slip_derivative(th, p, s) * omega.conj()).im
}

/// Positive root of the phase residual, by bisection on a sign change
/// located on a logarithmic scan of `(1e-6, 1e6)`.
pub fn residual_root(th: &TheveninEquivalent, p: &CircuitParams) -> Result<f64, MobiusError> {
    let r = |s: f64| torque_phase_residual(th, p, SlipValue::new(s).expect("positive slip"));
    let steps = 240;
    let ratio = 10f64.powf(12.0 / steps as f64);
    let mut lo = 1e-6;
    let mut r_lo = r(lo);
    let mut bracket = None;
    for _ in 0..steps {
        let hi = lo * ratio;
        let r_hi = r(hi);
        if r_lo > 0.0 && r_hi <= 0.0 {
            bracket = Some((lo, hi));
            break;
        }
        lo = hi;
        r_lo = r_hi;
    }
    let (mut lo, mut hi) = bracket.ok_or(MobiusError::NoBracket)?;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if r(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Möbius image circle of the rotor current for a parameter set.
pub fn rotor_image_circle(p: &CircuitParams) -> Result<GeneralizedCircle, MobiusError> {
    let th = thevenin(p)?;
    Ok(image_of_real_axis(&from_circuit(&th, p)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    const ZERO: Complex64 = Complex64::new(0.0, 0.0);
    const ONE: Complex64 = Complex64::new(1.0, 0.0);
    const J: Complex64 = Complex64::new(0.0, 1.0);

    fn reference() -> CircuitParams {
        CircuitParams::new(0.0, 0.0, 10.0, 1.0, 1.0, 1.0).unwrap()
    }

    fn reference_map() -> MobiusMap {
        let p = reference();
        from_circuit(&thevenin(&p).unwrap(), &p).unwrap()
    }

    #[test]
    fn from_circuit_reference_coefficients() {
        let m = reference_map();
        assert_eq!(m.coefficients(), [ZERO, ONE, ONE, J]);
        assert_eq!(m.determinant(), -ONE);
    }

    #[test]
    fn zero_thevenin_voltage_is_degenerate() {
        let p = reference();
        let th = TheveninEquivalent { r_th: 0.0, x_th: 0.0, v_th: ZERO };
        assert_eq!(from_circuit(&th, &p), Err(MobiusError::DegenerateMap));
    }

    #[test]
    fn map_matches_rotor_current() {
        let p = reference();
        let th = thevenin(&p).unwrap();
        let m = from_circuit(&th, &p).unwrap();
        let i = m.evaluate(1.0.into()).finite().unwrap();
        assert_abs_diff_eq!((i - Complex64::new(0.5, -0.5)).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn evaluate_extended_plane() {
        let m = reference_map();
        assert_eq!(m.evaluate(ExtComplex::Infinity), ExtComplex::Finite(ZERO));
        let at_zero = m.evaluate(0.0.into()).finite().unwrap();
        assert_abs_diff_eq!((at_zero + J).norm(), 0.0, epsilon = 1e-15);
        assert_eq!(m.evaluate((-J).into()), ExtComplex::Infinity);
        let affine = MobiusMap::new(ONE, ZERO, ZERO, ONE).unwrap();
        assert_eq!(affine.evaluate(ExtComplex::Infinity), ExtComplex::Infinity);
    }

    #[test]
    fn image_examples() {
        match image_of_real_axis(&reference_map()) {
            GeneralizedCircle::Circle(c) => {
                assert_abs_diff_eq!(c.center.x, 0.0, epsilon = 1e-15);
                assert_abs_diff_eq!(c.center.y, -0.5, epsilon = 1e-15);
                assert_abs_diff_eq!(c.radius, 0.5, epsilon = 1e-15);
            }
            other => panic!("expected circle, got {other:?}"),
        }
        let identity = MobiusMap::new(ONE, ZERO, ZERO, ONE).unwrap();
        assert_eq!(image_of_real_axis(&identity), GeneralizedCircle::Line(Line2::horizontal(0.0)));
        let real_pole = MobiusMap::new(ZERO, ONE, ONE, ONE).unwrap();
        assert_eq!(image_of_real_axis(&real_pole), GeneralizedCircle::Line(Line2::horizontal(0.0)));
    }

    #[test]
    fn residual_reference() {
        let p = reference();
        let th = thevenin(&p).unwrap();
        let r = |s: f64| torque_phase_residual(&th, &p, SlipValue::new(s).unwrap());
        assert_abs_diff_eq!(r(1.0), 0.0, epsilon = 1e-9);
        // (1 - s²)/(1 + s²)², the hand derivative of s/(1 + s²)
        assert_abs_diff_eq!(r(0.5), 0.75 / 1.5625, epsilon = 1e-15);
        for k in 1..100 {
            assert!(r(k as f64 / 100.0) > 0.0);
        }
        assert!(r(1.5) < 0.0);
        assert_abs_diff_eq!(residual_root(&th, &p).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn input_map_reference() {
        let p = reference();
        let m = input_from_circuit(&p).unwrap();
        let i0 = m.evaluate(ExtComplex::Infinity).finite().unwrap();
        assert_abs_diff_eq!((i0 - Complex64::new(0.0, -0.1)).norm(), 0.0, epsilon = 1e-15);
        let i1 = m.evaluate(1.0.into()).finite().unwrap();
        assert_abs_diff_eq!((i1 - Complex64::new(0.5, -0.6)).norm(), 0.0, epsilon = 1e-14);
    }
}
