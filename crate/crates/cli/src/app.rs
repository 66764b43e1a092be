//! Subcommand implementations. Each command returns the text for standard
//! output or a [`CliError`] naming the stage that failed.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use heyland_core::construction::{ConstructionError, DiagramOptions, InvariantResiduals};
use heyland_core::equivalence::{run_random_suite, EquivalenceError};
use heyland_core::geometry::{Circle2, Point2};
use heyland_core::{
    verify_full_equivalence, CircleDiagram, CircuitParams, DiagramFrame, EquivalenceReport,
    EquivalenceTolerances, PfAxis,
};
use thiserror::Error;

use crate::config::{parse_input, InputSpec, ParseError};
use crate::locus::{emit_csv, sample_circuit, sample_test, LocusSample, SlipRange, SweepError};
use crate::svg::render_svg;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Io,
    Parse,
    Validation,
    Construction,
    Verification,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Io => "io",
            Stage::Parse => "parse",
            Stage::Validation => "validation",
            Stage::Construction => "construction",
            Stage::Verification => "verification",
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Stage::Io => 1,
            Stage::Parse | Stage::Validation => 2,
            Stage::Construction => 3,
            Stage::Verification => 4,
        }
    }
}

#[derive(Debug, Error)]
#[error("{} failed: {message}", stage.name())]
pub struct CliError {
    pub stage: Stage,
    pub message: String,
}

impl CliError {
    fn new(stage: Stage, message: impl Into<String>) -> Self {
        Self { stage, message: message.into() }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        let stage = match e {
            ParseError::Io { .. } => Stage::Io,
            ParseError::CoincidentPhasors => Stage::Construction,
            _ => Stage::Parse,
        };
        Self::new(stage, e.to_string())
    }
}

impl From<ConstructionError> for CliError {
    fn from(e: ConstructionError) -> Self {
        Self::new(Stage::Construction, e.to_string())
    }
}

impl From<SweepError> for CliError {
    fn from(e: SweepError) -> Self {
        let stage = match e {
            SweepError::TooFewSamples(_) | SweepError::EmptyRange(..) | SweepError::NonFinite(_) => Stage::Validation,
            SweepError::Construction(_) => Stage::Construction,
            SweepError::Circuit(_) => Stage::Verification,
        };
        Self::new(stage, e.to_string())
    }
}

impl From<EquivalenceError> for CliError {
    fn from(e: EquivalenceError) -> Self {
        let stage = match e {
            EquivalenceError::Construction(_) => Stage::Construction,
            _ => Stage::Verification,
        };
        Self::new(stage, e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Settings {
    pub tol_geom: f64,
    pub tol_equiv: f64,
    pub pf_axis: PfAxis,
}

impl Default for Settings {
    fn default() -> Self {
        Self { tol_geom: 1e-9, tol_equiv: 1e-9, pf_axis: PfAxis::Y }
    }
}

impl Settings {
    pub fn validate(&self) -> Result<(), CliError> {
        for (name, t) in [("tol-geom", self.tol_geom), ("tol-equiv", self.tol_equiv)] {
            if !(t.is_finite() && t > 0.0) {
                return Err(CliError::new(Stage::Validation, format!("--{name} must be positive, got {t}")));
            }
        }
        Ok(())
    }

    fn tolerances(&self) -> EquivalenceTolerances {
        EquivalenceTolerances::with_circle(self.tol_equiv)
    }
}

/// Everything derived from one input file.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub spec: InputSpec,
    pub diagram: CircleDiagram,
    /// Rotation from circuit currents (voltage real) to diagram axes.
    pub frame: DiagramFrame,
    /// Input-current locus with the supply voltage real.
    pub locus_circle: Circle2,
    pub invariants: InvariantResiduals,
    pub equivalence: Option<EquivalenceReport>,
    pub settings: Settings,
}

impl Analysis {
    pub fn new(spec: InputSpec, settings: Settings) -> Result<Self, CliError> {
        settings.validate()?;
        let options = DiagramOptions { tol_geom: settings.tol_geom, ..DiagramOptions::default() };
        let (diagram, frame, equivalence) = match spec {
            InputSpec::Test(sheet) => {
                let diagram = CircleDiagram::build_with(sheet.test_points()?, options)?;
                (diagram, DiagramFrame::voltage_vertical(), None)
            }
            InputSpec::Circuit(p) => {
                let report = verify_full_equivalence(&p, &settings.tolerances())?;
                let diagram = CircleDiagram::build_with(report.diagram.test, options)?;
                (diagram, report.frame, Some(report))
            }
        };
        let locus_circle = match &equivalence {
            Some(r) => r.analytic_circle_circuit,
            None => frame.circle_to_circuit(&diagram.circle),
        };
        let invariants = diagram.invariant_residuals();
        Ok(Self { spec, diagram, frame, locus_circle, invariants, equivalence, settings })
    }

    pub fn invariants_hold(&self) -> bool {
        self.invariants.max() <= self.settings.tol_geom * self.diagram.circle.radius.max(1.0)
    }

    pub fn passed(&self) -> bool {
        self.invariants_hold() && self.equivalence.as_ref().is_none_or(|r| r.passed)
    }

    pub fn sample(&self, range: &SlipRange) -> Result<Vec<LocusSample>, CliError> {
        Ok(match self.spec {
            InputSpec::Test(_) => sample_test(&self.diagram, range)?,
            InputSpec::Circuit(p) => sample_circuit(&p, &self.frame, &self.diagram, range)?,
        })
    }

    fn failure(&self) -> Option<CliError> {
        if !self.invariants_hold() {
            return Some(CliError::new(
                Stage::Verification,
                format!("construction invariants off by {:e}", self.invariants.max()),
            ));
        }
        match &self.equivalence {
            Some(r) if !r.passed => Some(CliError::new(Stage::Verification, r.failures.join("; "))),
            _ => None,
        }
    }
}

/// Near-zero values print as zero so reports do not flicker in sign.
fn fixed(x: f64) -> String {
    if x.abs() < 5e-13 {
        format!("{:.12}", 0.0)
    } else {
        format!("{x:.12}")
    }
}

fn pt(p: Point2) -> String {
    format!("({}, {})", fixed(p.x), fixed(p.y))
}

pub fn emit_report(a: &Analysis) -> String {
    let d = &a.diagram;
    let mut out = String::new();
    let mode = match a.spec {
        InputSpec::Test(_) => "test",
        InputSpec::Circuit(_) => "circuit",
    };
    let mut line = |k: &str, v: String| writeln!(out, "{k}: {v}").unwrap();
    line("mode", mode.into());
    line("center", pt(a.locus_circle.center));
    line("radius", fixed(a.locus_circle.radius));
    line("diagram center", pt(d.circle.center));
    line("frame tilt rad", fixed(a.frame.tilt_from_voltage()));
    line("p0", pt(d.test.p0()));
    line("pA", pt(d.test.pa()));
    line("C'", pt(d.c_prime));
    line("E", pt(d.e));
    line("M_O", pt(d.m_o));
    line("M_T", pt(d.m_t));
    if let Ok(r) = d.readouts_at_point(d.m_o, a.settings.pf_axis) {
        line("power factor at M_O", fixed(r.power_factor));
        line("efficiency at M_O", fixed(r.efficiency));
    }
    if let Ok(r) = d.signed_readouts(d.m_t) {
        line("s at M_T (diagram chord)", fixed(r.slip));
    }
    line("invariant residual", format!("{:e}", a.invariants.max()));
    if let Some(r) = &a.equivalence {
        line("s_mT geometric", fixed(r.torque_slip_geometric));
        line("s_mT analytic", fixed(r.torque_slip_analytic));
        line("s_mT residual root", fixed(r.torque_slip_residual_root));
        line("s_mT closed form", fixed(r.torque_slip_closed_form));
        line("max torque", fixed(r.max_torque));
        line("rotor circle center", pt(r.analytic_rotor_circle.center));
        line("rotor circle radius", fixed(r.analytic_rotor_circle.radius));
        line("center error", format!("{:e}", r.center_error));
        line("radius error", format!("{:e}", r.radius_error));
        line("max point residual", format!("{:e}", r.max_point_residual));
        let failures = if r.failures.is_empty() { "none".to_string() } else { r.failures.join("; ") };
        line("failures", failures);
    }
    line("passed", a.passed().to_string());
    out
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::new(Stage::Io, format!("cannot write {}: {e}", path.display())))
}

#[derive(Debug, Clone, Default)]
pub struct Outputs {
    pub svg: Option<PathBuf>,
    pub csv: Option<PathBuf>,
    pub report: Option<PathBuf>,
}

/// Build the diagram and write the requested artifacts; the report goes to
/// standard output when no report path is given.
pub fn build(input: &Path, settings: Settings, range: &SlipRange, outputs: &Outputs) -> Result<String, CliError> {
    let a = Analysis::new(parse_input(input)?, settings)?;
    let locus = a.sample(range)?;
    if let Some(path) = &outputs.svg {
        write(path, &render_svg(&a.diagram, &locus))?;
    }
    if let Some(path) = &outputs.csv {
        write(path, &emit_csv(&locus))?;
    }
    let report = emit_report(&a);
    let stdout = match &outputs.report {
        Some(path) => {
            write(path, &report)?;
            String::new()
        }
        None => report,
    };
    match a.failure() {
        Some(e) => Err(e),
        None => Ok(stdout),
    }
}

/// Slip sweep as CSV, to a file or standard output.
pub fn sweep(input: &Path, settings: Settings, range: &SlipRange, csv: Option<&Path>) -> Result<String, CliError> {
    let a = Analysis::new(parse_input(input)?, settings)?;
    let text = emit_csv(&a.sample(range)?);
    match csv {
        Some(path) => {
            write(path, &text)?;
            Ok(String::new())
        }
        None => Ok(text),
    }
}

/// Check the input file and, for circuit files, a seeded random suite.
pub fn verify(
    input: &Path,
    settings: Settings,
    draws: usize,
    seed: u64,
    report: Option<&Path>,
) -> Result<String, CliError> {
    let a = Analysis::new(parse_input(input)?, settings)?;
    let mut text = emit_report(&a);
    let mut suite_failure = None;
    if a.equivalence.is_some() && draws > 0 {
        let outcome = run_random_suite(draws, seed, &settings.tolerances());
        writeln!(text, "random draws: {draws} (seed {seed})").unwrap();
        writeln!(text, "random passed: {}/{}", outcome.passed(), draws).unwrap();
        writeln!(text, "worst center error: {:e}", outcome.worst_center_error()).unwrap();
        writeln!(text, "worst radius error: {:e}", outcome.worst_radius_error()).unwrap();
        writeln!(text, "worst point residual: {:e}", outcome.worst_point_residual()).unwrap();
        if !outcome.all_passed() {
            let first = outcome
                .results
                .iter()
                .find_map(|(p, r)| match r {
                    Ok(rep) if rep.passed => None,
                    Ok(rep) => Some(format!("{}: {}", describe(p), rep.failures.join("; "))),
                    Err(e) => Some(format!("{}: {e}", describe(p))),
                })
                .unwrap_or_default();
            suite_failure = Some(CliError::new(
                Stage::Verification,
                format!("{} of {draws} random draws failed; first: {first}", draws - outcome.passed()),
            ));
        }
    }
    let stdout = match report {
        Some(path) => {
            write(path, &text)?;
            String::new()
        }
        None => text,
    };
    if let Some(e) = a.failure().or(suite_failure) {
        return Err(e);
    }
    Ok(stdout)
}

fn describe(p: &CircuitParams) -> String {
    format!("Rs={} Xs={} Xm={} Rr={} Xr={} V={}", p.rs, p.xs, p.xm, p.rr, p.xr, p.v)
}
