//! Slip sweeps and sampled locus points.

use heyland_core::circuit::{input_current, thevenin, torque, CircuitError, SlipValue};
use heyland_core::construction::ConstructionError;
use heyland_core::geometry::Point2;
use heyland_core::{CircleDiagram, CircuitParams, DiagramFrame};
use thiserror::Error;

/// Sweeps skip slips with `|s|` below this.
pub const SLIP_EXCLUSION: f64 = 1e-3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SweepError {
    #[error("samples must be at least 3, got {0}")]
    TooFewSamples(usize),
    #[error("slip-min ({0}) must be below slip-max ({1})")]
    EmptyRange(f64, f64),
    #[error("slip bound {0} is not finite")]
    NonFinite(f64),
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlipRange {
    s_min: f64,
    s_max: f64,
    samples: usize,
}

impl SlipRange {
    pub fn new(s_min: f64, s_max: f64, samples: usize) -> Result<Self, SweepError> {
        for s in [s_min, s_max] {
            if !s.is_finite() {
                return Err(SweepError::NonFinite(s));
            }
        }
        if samples < 3 {
            return Err(SweepError::TooFewSamples(samples));
        }
        if s_min >= s_max {
            return Err(SweepError::EmptyRange(s_min, s_max));
        }
        Ok(Self { s_min, s_max, samples })
    }

    /// Evenly spaced slips, minus those inside the exclusion band.
    pub fn values(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n)
            .map(|k| self.s_min + (self.s_max - self.s_min) * k as f64 / n as f64)
            .filter(|s| s.abs() >= SLIP_EXCLUSION)
            .collect()
    }
}

impl Default for SlipRange {
    fn default() -> Self {
        Self { s_min: -1.0, s_max: 1.0, samples: 101 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocusSample {
    pub s: f64,
    /// Input current with the supply voltage real.
    pub i_re: f64,
    pub i_im: f64,
    pub torque: f64,
    pub slip_readout: f64,
    pub efficiency_readout: f64,
    /// Same current in diagram coordinates.
    pub point: Point2,
}

/// Circuit input: exact input currents, air-gap torque, and the diagram's
/// readouts at each current.
pub fn sample_circuit(
    p: &CircuitParams,
    frame: &DiagramFrame,
    diagram: &CircleDiagram,
    range: &SlipRange,
) -> Result<Vec<LocusSample>, SweepError> {
    let th = thevenin(p)?;
    range
        .values()
        .into_iter()
        .map(|s| {
            let slip = SlipValue::new(s)?;
            let i = input_current(p, slip.into())?;
            let point = frame.to_diagram(i);
            let r = diagram.signed_readouts(point)?;
            Ok(LocusSample {
                s,
                i_re: i.re,
                i_im: i.im,
                torque: torque(&th, p, slip),
                slip_readout: r.slip,
                efficiency_readout: r.efficiency,
                point,
            })
        })
        .collect()
}

/// Test-sheet input: points placed by the slip scale, torque as the
/// torque segment.
pub fn sample_test(diagram: &CircleDiagram, range: &SlipRange) -> Result<Vec<LocusSample>, SweepError> {
    let frame = DiagramFrame::voltage_vertical();
    range
        .values()
        .into_iter()
        .map(|s| {
            let point = diagram.point_at_slip(s)?;
            let i = frame.to_circuit(point);
            let r = diagram.signed_readouts(point)?;
            Ok(LocusSample {
                s,
                i_re: i.re,
                i_im: i.im,
                torque: r.torque_segment,
                slip_readout: r.slip,
                efficiency_readout: r.efficiency,
                point,
            })
        })
        .collect()
}

pub const CSV_HEADER: &str = "s,I_re,I_im,torque,slip_readout,efficiency_readout";

pub fn emit_csv(locus: &[LocusSample]) -> String {
    let mut out = String::with_capacity(96 * (locus.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for l in locus {
        out.push_str(&format!(
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}\n",
            l.s, l.i_re, l.i_im, l.torque, l.slip_readout, l.efficiency_readout
        ));
    }
    out
}
