//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use heyland_cli::REQUIRED_IDS;
use heyland_core::circuit::{
    analytic_locus_circle, closed_form_max_torque_slip, input_current, max_torque_slip,
    rotor_current, thevenin, to_point, torque, LocusKind, OperatingPoint, SlipValue,
};
use heyland_core::equivalence::{run_random_suite, EquivalenceReport};
use heyland_core::mobius::{rotor_current_slip_derivative, rotor_image_circle};
use heyland_core::{CircleDiagram, CircuitParams, EquivalenceTolerances, Point2, TestPoints};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TOL_CIRCLE: f64 = 1e-9;
const TOL_EXTREMIZER: f64 = 1e-4;
const TOL_CLOSED_FORM: f64 = 1e-6;
const SUITE_DRAWS: usize = 200;
const SUITE_SEED: u64 = 20_240_601;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn slip(s: f64) -> SlipValue {
    SlipValue::new(s).unwrap()
}

fn relative(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn uniqueness_and_membership() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut worst, mut exact_center, mut perturbed_ok) = (0.0f64, true, true);
    let mut n = 0;
    while n < 1000 {
        let p0 = Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        let pa = Point2::new(rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0));
        // well-posed: distinct and not vertically aligned
        if (pa.x - p0.x).abs() < 0.05 {
            continue;
        }
        n += 1;
        let d = match CircleDiagram::build(TestPoints::new(p0, pa).unwrap()) {
            Ok(d) => d,
            Err(e) => return outcome(false, format!("construction failed for {p0} {pa}: {e}")),
        };
        let scale = d.circle.radius.max(1.0);
        worst = worst.max(d.circle.radial_residual(p0).abs().max(d.circle.radial_residual(pa).abs()) / scale);
        exact_center &= d.circle.center.y == p0.y;
        let shift = Point2::new(1e-6 * scale, 0.0);
        for c in [d.circle.center + shift, d.circle.center - shift] {
            perturbed_ok &= (c.distance(p0) - c.distance(pa)).abs() > 1e-12 * scale;
        }
    }
    let elapsed = start.elapsed();
    let passed = worst <= TOL_CIRCLE && exact_center && perturbed_ok && elapsed < Duration::from_secs(1);
    outcome(
        passed,
        format!("1000 pairs, worst residual {worst:.2e}, centre on y0: {exact_center}, perturbed centres rejected: {perturbed_ok}, {elapsed:.2?}"),
    )
}

fn suite() -> (Vec<EquivalenceReport>, Vec<String>, Duration) {
    let start = Instant::now();
    let outcome = run_random_suite(SUITE_DRAWS, SUITE_SEED, &EquivalenceTolerances::default());
    let elapsed = start.elapsed();
    let mut reports = Vec::new();
    let mut errors = Vec::new();
    for (p, r) in outcome.results {
        match r {
            Ok(rep) => reports.push(rep),
            Err(e) => errors.push(format!("{p:?}: {e}")),
        }
    }
    (reports, errors, elapsed)
}

fn three_route_identity(reports: &[EquivalenceReport], errors: &[String], elapsed: Duration) -> Outcome {
    let mut worst = 0.0f64;
    for r in reports {
        let scale = r.analytic_circle.radius.max(1.0);
        let pairs = [
            (r.geometric_circle, r.analytic_circle),
            (r.mobius_input_circle, r.analytic_circle_circuit),
        ];
        for (a, b) in pairs {
            worst = worst.max(a.center.distance(b.center) / scale).max((a.radius - b.radius).abs() / scale);
        }
        let scale_r = r.analytic_rotor_circle.radius.max(1.0);
        let (a, b) = (r.mobius_circle, r.analytic_rotor_circle);
        worst = worst.max(a.center.distance(b.center) / scale_r).max((a.radius - b.radius).abs() / scale_r);
    }
    let all = errors.is_empty() && reports.iter().all(|r| r.passed) && reports.len() == SUITE_DRAWS;
    let passed = all && worst <= TOL_CIRCLE && elapsed < Duration::from_secs(5);
    let mut detail = format!(
        "{}/{SUITE_DRAWS} draws passed, worst centre/radius error {worst:.2e}, {elapsed:.2?}",
        reports.iter().filter(|r| r.passed).count()
    );
    if let Some(e) = errors.first() {
        detail.push_str(&format!("; first error: {e}"));
    }
    outcome(passed, detail)
}

fn generating_mode(reports: &[EquivalenceReport]) -> Outcome {
    let mut worst = 0.0f64;
    for r in reports {
        let p = &r.params;
        let th = thevenin(p).unwrap();
        let scale_in = r.analytic_circle.radius.max(1.0);
        let scale_r = r.analytic_rotor_circle.radius.max(1.0);
        for k in 0..50 {
            let s = -5.0 + (5.0 - 0.01) * k as f64 / 49.0;
            let i = input_current(p, slip(s).into()).unwrap();
            let ir = rotor_current(&th, p, slip(s));
            let residuals = [
                r.geometric_circle.radial_residual(r.frame.to_diagram(i)).abs() / scale_in,
                r.analytic_circle_circuit.radial_residual(to_point(i)).abs() / scale_in,
                r.mobius_input_circle.radial_residual(to_point(i)).abs() / scale_in,
                r.analytic_rotor_circle.radial_residual(to_point(ir)).abs() / scale_r,
                r.mobius_circle.radial_residual(to_point(ir)).abs() / scale_r,
            ];
            worst = residuals.into_iter().fold(worst, f64::max);
        }
    }
    outcome(
        worst <= TOL_CIRCLE && reports.len() == SUITE_DRAWS,
        format!("{} draws x 50 slips in [-5, -0.01], worst residual {worst:.2e}", reports.len()),
    )
}

fn max_torque_consistency(reports: &[EquivalenceReport]) -> Outcome {
    let (mut geo, mut root, mut closed) = (0.0f64, 0.0f64, 0.0f64);
    for r in reports {
        geo = geo.max(relative(r.torque_slip_geometric, r.torque_slip_analytic));
        root = root.max(relative(r.torque_slip_residual_root, r.torque_slip_analytic));
        closed = closed.max(relative(r.torque_slip_analytic, r.torque_slip_closed_form));
    }
    let passed = geo <= TOL_EXTREMIZER && root <= TOL_EXTREMIZER && closed <= TOL_CLOSED_FORM && reports.len() == SUITE_DRAWS;
    outcome(
        passed,
        format!("relative errors vs numeric argmax: geometric {geo:.2e}, residual root {root:.2e}; closed form {closed:.2e}"),
    )
}

fn ref_regression() -> Outcome {
    let p = CircuitParams::new(0.0, 0.0, 10.0, 1.0, 1.0, 1.0).unwrap();
    let th = thevenin(&p).unwrap();
    let mut worst = 0.0f64;
    let mut check = |got: f64, want: f64| worst = worst.max((got - want).abs());

    let rotor = analytic_locus_circle(&p, LocusKind::Rotor).unwrap();
    check(rotor.center.x, 0.0);
    check(rotor.center.y, -0.5);
    check(rotor.radius, 0.5);
    let mobius = *rotor_image_circle(&p).unwrap().as_circle().unwrap();
    check(mobius.center.x, 0.0);
    check(mobius.center.y, -0.5);
    check(mobius.radius, 0.5);
    let input = analytic_locus_circle(&p, LocusKind::Input).unwrap();
    check(input.center.x, 0.0);
    check(input.center.y, -0.6);
    check(input.radius, 0.5);
    let i0 = input_current(&p, OperatingPoint::NoLoad).unwrap();
    check(i0.re, 0.0);
    check(i0.im, -0.1);

    let (s_mt, t_max) = max_torque_slip(&th, &p);
    check(s_mt, 1.0);
    check(closed_form_max_torque_slip(&th, &p), 1.0);
    check(t_max, 0.5);
    for s in [0.01, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0, -0.3, -2.0] {
        check(torque(&th, &p, slip(s)), s / (1.0 + s * s));
    }
    outcome(worst <= TOL_CIRCLE, format!("worst deviation {worst:.2e}"))
}

fn derivative_convergence() -> Outcome {
    let cases = [
        CircuitParams::new(0.0, 0.0, 10.0, 1.0, 1.0, 1.0).unwrap(),
        CircuitParams::new(0.25, 0.8, 25.0, 0.2, 0.8, 230.0).unwrap(),
    ];
    let mut ratios = Vec::new();
    for p in &cases {
        let th = thevenin(p).unwrap();
        // Near s = 1 the O(h^2) term at h = 1e-5 drops to the f64 roundoff
        // floor eps*|I|/h, so the ratio there measures roundoff; the sample
        // slips stay where truncation dominates.
        for s in [0.02, 0.05, 0.1, 0.2, 0.5, -0.2, -0.5] {
            let exact = rotor_current_slip_derivative(&th, p, slip(s));
            let err = |h: f64| {
                let fd = (rotor_current(&th, p, slip(s + h)) - rotor_current(&th, p, slip(s - h))) / (2.0 * h);
                (fd - exact).norm()
            };
            ratios.push(err(1e-4) / err(1e-5));
        }
    }
    let passed = ratios.iter().all(|r| (r.log10() - 2.0).abs() <= 0.1);
    let (lo, hi) = ratios.iter().fold((f64::MAX, f64::MIN), |(lo, hi), &r| (lo.min(r), hi.max(r)));
    outcome(passed, format!("error ratio h=1e-4 / h=1e-5 in [{lo:.1}, {hi:.1}] over {} cases", ratios.len()))
}

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn svg_reproduction() -> Outcome {
    let dir = std::env::temp_dir().join(format!("heyland-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut details = Vec::new();
    let mut passed = true;
    for name in ["ref_circuit.cfg", "sample_test.cfg"] {
        let mut outs = Vec::new();
        for k in 0..2 {
            let path = dir.join(format!("{name}.{k}.svg"));
            let status = Command::new(env!("CARGO_BIN_EXE_heyland"))
                .arg("build")
                .arg("--input")
                .arg(data(name))
                .arg("--svg")
                .arg(&path)
                .output()
                .unwrap()
                .status;
            passed &= status.success();
            outs.push(std::fs::read(&path).unwrap_or_default());
        }
        let text = String::from_utf8_lossy(&outs[0]);
        let missing: Vec<&str> = REQUIRED_IDS.iter().copied().filter(|id| !text.contains(&format!(r#"id="{id}""#))).collect();
        let stable = outs[0] == outs[1] && !outs[0].is_empty();
        passed &= missing.is_empty() && stable;
        details.push(format!("{name}: missing {missing:?}, byte-stable {stable}"));
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(passed, details.join("; "))
}

fn cli_contract() -> Outcome {
    let dir = std::env::temp_dir().join(format!("heyland-contract-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cases = [
        ("missing.cfg", "Rs = 0\nXs = 0\nRr = 1\nXr = 1\nV = 1\n", 2, Some("Xm")),
        ("malformed.cfg", "Rs = 0\nXs = 0\nXm = 10\nRr = one\nXr = 1\nV = 1\n", 2, Some("Rr")),
        ("invalid.cfg", "Rs = 0\nXs = -1\nXm = 10\nRr = 1\nXr = 1\nV = 1\n", 2, Some("Xs")),
        ("coincident.cfg", "V = 400\nI0 = 10\nphi0_deg = 70\nIsc = 10\nphisc_deg = 70\n", 3, None),
    ];
    let mut passed = true;
    let mut details = Vec::new();
    for (name, text, want, key) in cases {
        let path = dir.join(name);
        std::fs::write(&path, text).unwrap();
        let o = Command::new(env!("CARGO_BIN_EXE_heyland")).arg("build").arg("--input").arg(&path).output().unwrap();
        let stderr = String::from_utf8_lossy(&o.stderr);
        let names_key = key.is_none_or(|k| stderr.contains(k));
        let ok = o.status.code() == Some(want) && names_key;
        passed &= ok;
        details.push(format!("{name} -> {:?}", o.status.code()));
    }
    let _ = std::fs::remove_dir_all(&dir);
    outcome(passed, details.join(", "))
}

fn main() {
    let (reports, errors, elapsed) = suite();
    let results = [
        ("1 uniqueness & membership", uniqueness_and_membership()),
        ("2 three-route circle identity", three_route_identity(&reports, &errors, elapsed)),
        ("3 generating-mode membership", generating_mode(&reports)),
        ("4 max-torque consistency", max_torque_consistency(&reports)),
        ("5 reference fixture regression", ref_regression()),
        ("6 slip-derivative convergence", derivative_convergence()),
        ("7 SVG structural reproduction", svg_reproduction()),
        ("8 CLI exit-code contract", cli_contract()),
    ];
    let mut failed = 0;
    for (name, o) in &results {
        println!("{} [{name}] {}", if o.passed { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {}/{} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
