//! Placement of circuit-frame currents on the diagram axes.
//!
//! The construction fixes a reference horizontal through the no-load
//! point and puts the centre on it. That holds for the exact locus only
//! when the horizontal is the normal to the locus at no load, i.e. when
//! the no-load tangent points up. The tangent is `dI/ds|₀ ∝ V_th²/V` for
//! the input current and `∝ V_th` for the rotor current; both reduce to the
//! supply voltage when the stator impedance vanishes.

use num_complex::Complex64;

use crate::circuit::{thevenin, to_point, CircuitError, CircuitParams, LocusKind};
use crate::geometry::{Circle2, Point2};

const J: Complex64 = Complex64::new(0.0, 1.0);

/// Unit rotation taking circuit-frame currents to diagram coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramFrame {
    rotation: Complex64,
}

impl DiagramFrame {
    /// Supply voltage along `+y`; the classical textbook orientation.
    pub fn voltage_vertical() -> Self {
        Self { rotation: J }
    }

    /// Reference horizontal normal to the locus at the no-load point.
    pub fn no_load_normal(p: &CircuitParams, kind: LocusKind) -> Result<Self, CircuitError> {
        let th = thevenin(p)?;
        let tangent = match kind {
            LocusKind::Input => th.v_th * th.v_th / p.voltage(),
            LocusKind::Rotor => th.v_th,
        };
        Ok(Self { rotation: J * tangent.conj() / tangent.norm() })
    }

    pub fn rotation(&self) -> Complex64 {
        self.rotation
    }

    /// Signed angle of the reference horizontal relative to the
    /// voltage-vertical frame, in radians.
    pub fn tilt_from_voltage(&self) -> f64 {
        (self.rotation / J).arg()
    }

    pub fn to_diagram(&self, current: Complex64) -> Point2 {
        to_point(self.rotation * current)
    }

    pub fn to_circuit(&self, p: Point2) -> Complex64 {
        self.rotation.conj() * Complex64::new(p.x, p.y)
    }

    pub fn circle_to_diagram(&self, c: &Circle2) -> Circle2 {
        let center = self.to_diagram(Complex64::new(c.center.x, c.center.y));
        Circle2 { center, radius: c.radius }
    }

    pub fn circle_to_circuit(&self, c: &Circle2) -> Circle2 {
        let z = self.to_circuit(c.center);
        Circle2 { center: to_point(z), radius: c.radius }
    }
}
