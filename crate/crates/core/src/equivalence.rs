//! Cross-route verification: the ruler-and-compass circle, the
//! equivalent-circuit locus and the Möbius image of the slip axis must be
//! one circle, and the orthogonality construction of `M_T` must land on the
//! torque-maximizing slip.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::circuit::{
    analytic_locus_circle, closed_form_max_torque_slip, input_current, max_torque_slip,
    rotor_current, thevenin, to_point, CircuitError, CircuitParams, LocusKind, OperatingPoint,
    SlipValue,
};
use crate::construction::{
    CircleDiagram, ConstructionError, CopperLossSplit, DiagramOptions, TestPoints,
};
use crate::frame::DiagramFrame;
use crate::geometry::{Circle2, Point2};
use crate::mobius::{
    from_circuit, image_of_real_axis, input_from_circuit, residual_root, GeneralizedCircle,
    MobiusError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EquivalenceError {
    #[error(transparent)]
    Circuit(#[from] CircuitError),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Mobius(#[from] MobiusError),
    #[error("Möbius image of the slip axis is a line, expected a circle")]
    ImageIsLine,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleComparison {
    pub center_error: f64,
    pub radius_error: f64,
    pub passed: bool,
}

pub fn compare_circles(c1: &Circle2, c2: &Circle2, tol: f64) -> CircleComparison {
    let center_error = c1.center.distance(c2.center);
    let radius_error = (c1.radius - c2.radius).abs();
    CircleComparison { center_error, radius_error, passed: center_error <= tol && radius_error <= tol }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EquivalenceTolerances {
    /// Circle identity and locus membership, amperes on unit scale.
    pub circle: f64,
    /// Relative agreement of the maximum-torque slips across routes.
    pub extremizer: f64,
    /// Relative agreement of the numeric argmax with `R'r/|δ|`.
    pub closed_form: f64,
}

impl Default for EquivalenceTolerances {
    fn default() -> Self {
        Self { circle: 1e-9, extremizer: 1e-4, closed_form: 1e-6 }
    }
}

impl EquivalenceTolerances {
    pub fn with_circle(circle: f64) -> Self {
        Self { circle, ..Self::default() }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EquivalenceReport {
    pub params: CircuitParams,
    /// Diagram frame used for the input-current construction.
    pub frame: DiagramFrame,
    /// Input-current diagram built from the synthetic test points.
    pub diagram: CircleDiagram,
    /// Constructed circle, diagram frame.
    pub geometric_circle: Circle2,
    /// Equivalent-circuit input locus, diagram frame.
    pub analytic_circle: Circle2,
    /// Equivalent-circuit input locus, circuit frame.
    pub analytic_circle_circuit: Circle2,
    /// Möbius image of the slip axis under the input-current map, circuit frame.
    pub mobius_input_circle: Circle2,
    /// Möbius image of the slip axis under the rotor-current map, circuit frame.
    pub mobius_circle: Circle2,
    /// Equivalent-circuit rotor locus, circuit frame.
    pub analytic_rotor_circle: Circle2,
    pub center_error: f64,
    pub radius_error: f64,
    /// Largest distance of a swept operating point (both slip signs) from
    /// any of the circles it should lie on.
    pub max_point_residual: f64,
    /// Slip read off the rotor-current diagram at `M_T`.
    pub torque_slip_geometric: f64,
    /// Numeric argmax of the air-gap power.
    pub torque_slip_analytic: f64,
    pub torque_slip_residual_root: f64,
    pub torque_slip_closed_form: f64,
    pub max_torque: f64,
    pub mt_orthogonality: f64,
    pub failures: Vec<String>,
    pub passed: bool,
}

fn slip(s: f64) -> OperatingPoint {
    OperatingPoint::Slip(SlipValue::new(s).expect("sweep slips are nonzero"))
}

/// `n` motoring and `n` generating slips with `0.01 ≤ |s| ≤ 5`.
pub fn sweep_slips(n: usize) -> Vec<f64> {
    let pos: Vec<f64> = (0..n)
        .map(|k| 0.01 + (5.0 - 0.01) * k as f64 / (n - 1) as f64)
        .collect();
    pos.iter().copied().chain(pos.iter().map(|s| -s)).collect()
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn expect_circle(g: GeneralizedCircle) -> Result<Circle2, EquivalenceError> {
    g.as_circle().copied().ok_or(EquivalenceError::ImageIsLine)
}

/// Run every route for one parameter set and collect the discrepancies.
pub fn verify_full_equivalence(
    p: &CircuitParams,
    tol: &EquivalenceTolerances,
) -> Result<EquivalenceReport, EquivalenceError> {
    p.validate()?;
    let th = thevenin(p)?;

    // Input current: synthetic test points -> construction.
    let frame = DiagramFrame::no_load_normal(p, LocusKind::Input)?;
    let p0 = frame.to_diagram(input_current(p, OperatingPoint::NoLoad)?);
    let pa = frame.to_diagram(input_current(p, slip(1.0))?);
    let diagram = CircleDiagram::build(TestPoints::new(p0, pa)?)?;
    let geometric_circle = diagram.circle;

    let analytic_circle_circuit = analytic_locus_circle(p, LocusKind::Input)?;
    let analytic_circle = frame.circle_to_diagram(&analytic_circle_circuit);
    let mobius_input_circle = expect_circle(image_of_real_axis(&input_from_circuit(p)?))?;

    // Rotor current: Möbius image versus analytic locus.
    let rotor_map = from_circuit(&th, p)?;
    let mobius_circle = expect_circle(image_of_real_axis(&rotor_map))?;
    let analytic_rotor_circle = analytic_locus_circle(p, LocusKind::Rotor)?;

    let scale_in = analytic_circle.radius.max(1.0);
    let scale_r = analytic_rotor_circle.radius.max(1.0);
    let comparisons = [
        ("geometric vs analytic input circle", compare_circles(&geometric_circle, &analytic_circle, tol.circle * scale_in), scale_in),
        ("Möbius vs analytic input circle", compare_circles(&mobius_input_circle, &analytic_circle_circuit, tol.circle * scale_in), scale_in),
        ("Möbius vs analytic rotor circle", compare_circles(&mobius_circle, &analytic_rotor_circle, tol.circle * scale_r), scale_r),
    ];
    let mut failures = Vec::new();
    let (mut center_error, mut radius_error) = (0.0f64, 0.0f64);
    for (name, cmp, _) in &comparisons {
        center_error = center_error.max(cmp.center_error);
        radius_error = radius_error.max(cmp.radius_error);
        if !cmp.passed {
            failures.push(format!(
                "{name}: center error {:e}, radius error {:e}",
                cmp.center_error, cmp.radius_error
            ));
        }
    }

    // Both slip signs on every circle.
    let mut max_point_residual = 0.0f64;
    let mut worst_relative = 0.0f64;
    for s in sweep_slips(50) {
        let i_in = input_current(p, slip(s))?;
        let i_r = rotor_current(&th, p, SlipValue::new(s)?);
        let pt_in = to_point(i_in);
        let pt_r = to_point(i_r);
        let residuals = [
            (analytic_circle_circuit.radial_residual(pt_in).abs(), scale_in),
            (mobius_input_circle.radial_residual(pt_in).abs(), scale_in),
            (geometric_circle.radial_residual(frame.to_diagram(i_in)).abs(), scale_in),
            (analytic_rotor_circle.radial_residual(pt_r).abs(), scale_r),
            (mobius_circle.radial_residual(pt_r).abs(), scale_r),
        ];
        for (res, scale) in residuals {
            max_point_residual = max_point_residual.max(res);
            worst_relative = worst_relative.max(res / scale);
        }
    }
    if worst_relative > tol.circle {
        failures.push(format!("slip sweep leaves the circle by {max_point_residual:e}"));
    }

    // Maximum torque on the rotor-current diagram, whose torque chord splits
    // the blocked-rotor copper loss as R_th : R'r.
    let rotor_frame = DiagramFrame::no_load_normal(p, LocusKind::Rotor)?;
    let r0 = rotor_frame.to_diagram(Complex64::new(0.0, 0.0));
    let ra = rotor_frame.to_diagram(rotor_current(&th, p, SlipValue::new(1.0)?));
    let split = CopperLossSplit::new(th.r_th / (th.r_th + p.rr))?;
    let rotor_diagram = CircleDiagram::build_with(
        TestPoints::new(r0, ra)?,
        DiagramOptions { split, ..DiagramOptions::default() },
    )?;
    let torque_slip_geometric = rotor_diagram.signed_readouts(rotor_diagram.m_t)?.slip;
    let mt_orthogonality = rotor_diagram.invariant_residuals().mt_orthogonality;

    let (torque_slip_analytic, max_torque) = max_torque_slip(&th, p);
    let torque_slip_residual_root = residual_root(&th, p)?;
    let torque_slip_closed_form = closed_form_max_torque_slip(&th, p);

    let slip_checks = [
        ("geometric M_T slip vs numeric argmax", relative(torque_slip_geometric, torque_slip_analytic), tol.extremizer),
        ("phase-residual root vs numeric argmax", relative(torque_slip_residual_root, torque_slip_analytic), tol.extremizer),
        ("numeric argmax vs closed form", relative(torque_slip_analytic, torque_slip_closed_form), tol.closed_form),
    ];
    for (name, err, limit) in slip_checks {
        if err.is_nan() || err > limit {
            failures.push(format!("{name}: relative error {err:e} > {limit:e}"));
        }
    }

    let passed = failures.is_empty();
    Ok(EquivalenceReport {
        params: *p,
        frame,
        diagram,
        geometric_circle,
        analytic_circle,
        analytic_circle_circuit,
        mobius_input_circle,
        mobius_circle,
        analytic_rotor_circle,
        center_error,
        radius_error,
        max_point_residual,
        torque_slip_geometric,
        torque_slip_analytic,
        torque_slip_residual_root,
        torque_slip_closed_form,
        max_torque,
        mt_orthogonality,
        failures,
        passed,
    })
}

/// Sampling box for randomized parameter draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParameterRanges {
    pub rs: (f64, f64),
    pub xs: (f64, f64),
    pub xm: (f64, f64),
    pub rr: (f64, f64),
    pub xr: (f64, f64),
    pub v: f64,
}

impl Default for ParameterRanges {
    fn default() -> Self {
        Self { rs: (0.0, 1.0), xs: (0.0, 1.0), xm: (5.0, 50.0), rr: (0.05, 2.0), xr: (0.1, 2.0), v: 1.0 }
    }
}

impl ParameterRanges {
    pub fn sample(&self, rng: &mut impl Rng) -> CircuitParams {
        let mut u = |(lo, hi): (f64, f64)| rng.gen_range(lo..=hi);
        CircuitParams {
            rs: u(self.rs),
            xs: u(self.xs),
            xm: u(self.xm),
            rr: u(self.rr),
            xr: u(self.xr),
            v: self.v,
        }
    }

    /// Deterministic draws for a seed.
    pub fn draws(&self, n: usize, seed: u64) -> Vec<CircuitParams> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sample(&mut rng)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteOutcome {
    pub results: Vec<(CircuitParams, Result<EquivalenceReport, EquivalenceError>)>,
}

impl SuiteOutcome {
    pub fn passed(&self) -> usize {
        self.results.iter().filter(|(_, r)| matches!(r, Ok(rep) if rep.passed)).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.results.len()
    }

    pub fn reports(&self) -> impl Iterator<Item = &EquivalenceReport> {
        self.results.iter().filter_map(|(_, r)| r.as_ref().ok())
    }

    pub fn worst_center_error(&self) -> f64 {
        self.reports().map(|r| r.center_error).fold(0.0, f64::max)
    }

    pub fn worst_radius_error(&self) -> f64 {
        self.reports().map(|r| r.radius_error).fold(0.0, f64::max)
    }

    pub fn worst_point_residual(&self) -> f64 {
        self.reports().map(|r| r.max_point_residual).fold(0.0, f64::max)
    }
}

pub fn run_random_suite(draws: usize, seed: u64, tol: &EquivalenceTolerances) -> SuiteOutcome {
    let results = ParameterRanges::default()
        .draws(draws, seed)
        .into_iter()
        .map(|p| (p, verify_full_equivalence(&p, tol)))
        .collect();
    SuiteOutcome { results }
}

/// Largest distance of the diagram-frame points from a circle.
pub fn max_residual(circle: &Circle2, points: impl IntoIterator<Item = Point2>) -> f64 {
    points.into_iter().map(|p| circle.radial_residual(p).abs()).fold(0.0, f64::max)
}
