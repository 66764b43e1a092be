//! Flat `key = value` input files.
//!
//! Two kinds of file are accepted. A test sheet carries the no-load and
//! blocked-rotor measurements:
//!
//! ```text
//! V = 400
//! I0 = 8.5
//! phi0_deg = 80
//! Isc = 60
//! phisc_deg = 65
//! ```
//!
//! A circuit file carries the per-phase equivalent circuit (`Rs`, `Xs`,
//! `Xm`, `Rr`, `Xr`, `V`). The kind is taken from an optional `mode` key or
//! inferred from the keys present. Angles are lags of the current behind the
//! supply voltage, in degrees.

use std::fmt::Write as _;
use std::path::Path;

use heyland_core::construction::{ConstructionError, Phasor};
use heyland_core::{CircuitParams, TestPoints};
use thiserror::Error;

pub const TEST_KEYS: [&str; 5] = ["V", "I0", "phi0_deg", "Isc", "phisc_deg"];
pub const CIRCUIT_KEYS: [&str; 6] = ["Rs", "Xs", "Xm", "Rr", "Xr", "V"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParseError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("line {line}: expected `key = value`")]
    MalformedLine { line: usize },
    #[error("missing key `{0}`")]
    MissingKey(String),
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { key: String, line: usize },
    #[error("line {line}: duplicate key `{key}`")]
    DuplicateKey { key: String, line: usize },
    #[error("line {line}: malformed value for `{key}`: `{value}`")]
    MalformedValue { key: String, line: usize, value: String },
    #[error("invariant violation on `{key}`: {reason}")]
    InvariantViolation { key: String, reason: String },
    /// The no-load and blocked-rotor phasors coincide, so no circle exists.
    #[error("invariant violation on `Isc`/`phisc_deg`: no-load and blocked-rotor phasors coincide")]
    CoincidentPhasors,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Test,
    Circuit,
}

/// Measured test sheet, as written in the file.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestSheet {
    pub v: f64,
    pub i0: f64,
    pub phi0_deg: f64,
    pub isc: f64,
    pub phisc_deg: f64,
}

impl TestSheet {
    /// Diagram coordinates with the voltage along `+y`: a current lagging
    /// by φ sits at angle `90° − φ` from the abscissa.
    pub fn test_points(&self) -> Result<TestPoints, ConstructionError> {
        let no_load = Phasor::from_degrees(self.i0, 90.0 - self.phi0_deg)?;
        let blocked = Phasor::from_degrees(self.isc, 90.0 - self.phisc_deg)?;
        TestPoints::from_phasors(no_load, blocked)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InputSpec {
    Test(TestSheet),
    Circuit(CircuitParams),
}

impl InputSpec {
    pub fn mode(&self) -> Mode {
        match self {
            InputSpec::Test(_) => Mode::Test,
            InputSpec::Circuit(_) => Mode::Circuit,
        }
    }
}

pub fn parse_input(path: &Path) -> Result<InputSpec, ParseError> {
    let text = std::fs::read_to_string(path).map_err(|e| ParseError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse_str(&text)
}

struct Entry<'a> {
    key: &'a str,
    value: &'a str,
    line: usize,
}

pub fn parse_str(text: &str) -> Result<InputSpec, ParseError> {
    let mut entries: Vec<Entry> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or(ParseError::MalformedLine { line })?;
        let (key, value) = (key.trim(), value.trim());
        if key.is_empty() {
            return Err(ParseError::MalformedLine { line });
        }
        if entries.iter().any(|e| e.key == key) {
            return Err(ParseError::DuplicateKey { key: key.to_string(), line });
        }
        entries.push(Entry { key, value, line });
    }

    let mode = match entries.iter().find(|e| e.key == "mode") {
        Some(e) => match e.value {
            "test" => Mode::Test,
            "circuit" => Mode::Circuit,
            _ => {
                return Err(ParseError::MalformedValue {
                    key: "mode".into(),
                    line: e.line,
                    value: e.value.into(),
                })
            }
        },
        None => infer_mode(&entries)?,
    };
    let allowed: &[&str] = match mode {
        Mode::Test => &TEST_KEYS,
        Mode::Circuit => &CIRCUIT_KEYS,
    };
    if let Some(e) = entries.iter().find(|e| e.key != "mode" && !allowed.contains(&e.key)) {
        return Err(ParseError::UnknownKey { key: e.key.to_string(), line: e.line });
    }

    let get = |key: &str| -> Result<f64, ParseError> {
        let e = entries
            .iter()
            .find(|e| e.key == key)
            .ok_or_else(|| ParseError::MissingKey(key.to_string()))?;
        match e.value.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(ParseError::MalformedValue {
                key: key.to_string(),
                line: e.line,
                value: e.value.to_string(),
            }),
        }
    };

    match mode {
        Mode::Test => {
            let sheet = TestSheet {
                v: get("V")?,
                i0: get("I0")?,
                phi0_deg: get("phi0_deg")?,
                isc: get("Isc")?,
                phisc_deg: get("phisc_deg")?,
            };
            for (key, value) in [("V", sheet.v), ("I0", sheet.i0), ("Isc", sheet.isc)] {
                if value <= 0.0 {
                    return Err(ParseError::InvariantViolation {
                        key: key.into(),
                        reason: format!("must be positive, got {value}"),
                    });
                }
            }
            match sheet.test_points() {
                Ok(_) => Ok(InputSpec::Test(sheet)),
                Err(ConstructionError::CoincidentTestPoints) => Err(ParseError::CoincidentPhasors),
                Err(e) => Err(ParseError::InvariantViolation { key: "I0".into(), reason: e.to_string() }),
            }
        }
        Mode::Circuit => {
            let p = CircuitParams {
                rs: get("Rs")?,
                xs: get("Xs")?,
                xm: get("Xm")?,
                rr: get("Rr")?,
                xr: get("Xr")?,
                v: get("V")?,
            };
            p.validate().map_err(|e| ParseError::InvariantViolation {
                key: offending_key(&e).to_string(),
                reason: e.to_string(),
            })?;
            Ok(InputSpec::Circuit(p))
        }
    }
}

fn infer_mode(entries: &[Entry]) -> Result<Mode, ParseError> {
    let has = |keys: &[&str]| entries.iter().any(|e| e.key != "V" && keys.contains(&e.key));
    match (has(&TEST_KEYS), has(&CIRCUIT_KEYS)) {
        (true, false) => Ok(Mode::Test),
        (false, true) => Ok(Mode::Circuit),
        // mixed files are reported by the unknown-key check of the first mode to appear
        (true, true) => {
            let first = entries.iter().find(|e| e.key != "V" && (TEST_KEYS.contains(&e.key) || CIRCUIT_KEYS.contains(&e.key)));
            Ok(if first.is_some_and(|e| TEST_KEYS.contains(&e.key)) { Mode::Test } else { Mode::Circuit })
        }
        (false, false) => match entries.iter().find(|e| e.key != "V") {
            Some(e) => Err(ParseError::UnknownKey { key: e.key.to_string(), line: e.line }),
            None => Err(ParseError::MissingKey("mode".into())),
        },
    }
}

fn offending_key(e: &heyland_core::circuit::CircuitError) -> &'static str {
    match e {
        heyland_core::circuit::CircuitError::InvalidParameter { name, .. } => name,
        _ => "V",
    }
}

/// Serialize back to the file format. Values use the shortest
/// representation that parses to the same `f64`.
pub fn emit_config(spec: &InputSpec) -> String {
    let mut out = String::new();
    match spec {
        InputSpec::Test(t) => {
            out.push_str("mode = test\n");
            for (k, v) in [("V", t.v), ("I0", t.i0), ("phi0_deg", t.phi0_deg), ("Isc", t.isc), ("phisc_deg", t.phisc_deg)] {
                writeln!(out, "{k} = {v:?}").unwrap();
            }
        }
        InputSpec::Circuit(p) => {
            out.push_str("mode = circuit\n");
            for (k, v) in [("Rs", p.rs), ("Xs", p.xs), ("Xm", p.xm), ("Rr", p.rr), ("Xr", p.xr), ("V", p.v)] {
                writeln!(out, "{k} = {v:?}").unwrap();
            }
        }
    }
    out
}
