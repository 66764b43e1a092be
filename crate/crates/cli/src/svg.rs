//! Standalone SVG 1.1 rendering of a circle diagram.
//!
//! Geometry is drawn in diagram units inside a group whose transform flips
//! the y-axis, so the picture shows the mathematical upper half-plane.
//! Labels are placed outside that group to keep the text upright. Output is
//! a pure function of the inputs.

use std::fmt::Write as _;

use heyland_core::geometry::{Line2, Point2};
use heyland_core::CircleDiagram;

use crate::locus::LocusSample;

const WIDTH: f64 = 800.0;
const HEIGHT: f64 = 600.0;
const MARGIN: f64 = 40.0;

/// Every element id the renderer guarantees.
pub const REQUIRED_IDS: [&str; 14] = [
    "circle",
    "p0",
    "pA",
    "C",
    "E",
    "MO",
    "MT",
    "output-line",
    "torque-chord",
    "max-output-line",
    "max-torque-line",
    "efficiency-line",
    "slip-scale",
    "locus",
];

struct View {
    min: Point2,
    max: Point2,
    scale: f64,
    tx: f64,
    ty: f64,
}

impl View {
    fn fit(d: &CircleDiagram) -> Self {
        let c = d.circle.center;
        let r = d.circle.radius;
        let mut min = Point2::new(c.x - r, c.y - r);
        let mut max = Point2::new(c.x + r, c.y + r);
        let mut extra = vec![d.test.p0(), d.test.pa(), d.e, d.c_prime, d.slip_scale.zero(), d.slip_scale.one()];
        extra.push(d.efficiency_line.zero());
        extra.push(d.efficiency_line.one());
        extra.push(Point2::ORIGIN);
        for p in extra {
            // far-away construction points would squash the circle
            if p.distance(c) <= 3.0 * r {
                min = Point2::new(min.x.min(p.x), min.y.min(p.y));
                max = Point2::new(max.x.max(p.x), max.y.max(p.y));
            }
        }
        let pad = 0.08 * r;
        min = min - Point2::new(pad, pad);
        max = max + Point2::new(pad, pad);
        let scale = ((WIDTH - 2.0 * MARGIN) / (max.x - min.x)).min((HEIGHT - 2.0 * MARGIN) / (max.y - min.y));
        let tx = MARGIN - min.x * scale + 0.5 * ((WIDTH - 2.0 * MARGIN) - (max.x - min.x) * scale);
        let ty = MARGIN + max.y * scale + 0.5 * ((HEIGHT - 2.0 * MARGIN) - (max.y - min.y) * scale);
        Self { min, max, scale, tx, ty }
    }

    fn screen(&self, p: Point2) -> (f64, f64) {
        (self.tx + self.scale * p.x, self.ty - self.scale * p.y)
    }

    /// Segment of `line` that spans the view box.
    fn span(&self, line: &Line2) -> (Point2, Point2) {
        let mid = Point2::new(0.5 * (self.min.x + self.max.x), 0.5 * (self.min.y + self.max.y));
        let half = 0.5 * self.min.distance(self.max);
        let foot = line.foot_of(mid);
        let d = line.direction();
        (foot - d * half, foot + d * half)
    }
}

/// Fixed-precision number; negative zero prints as zero.
fn num(x: f64) -> String {
    let s = format!("{x:.6}");
    if s.trim_start_matches('-').trim_matches(|c| c == '0' || c == '.').is_empty() {
        "0.000000".to_string()
    } else {
        s
    }
}

/// `<line>`; an empty `id` leaves the attribute out.
fn segment(out: &mut String, id: &str, a: Point2, b: Point2, style: &str) {
    let id = if id.is_empty() { String::new() } else { format!(r#" id="{id}""#) };
    writeln!(
        out,
        r#"    <line{id} x1="{}" y1="{}" x2="{}" y2="{}" {style}/>"#,
        num(a.x),
        num(a.y),
        num(b.x),
        num(b.y)
    )
    .unwrap();
}

fn polyline(out: &mut String, id: &str, pts: &[Point2], style: &str) {
    let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", num(p.x), num(p.y))).collect();
    writeln!(out, r#"      <polyline id="{id}" points="{}" {style}/>"#, coords.join(" ")).unwrap();
}

pub fn render_svg(d: &CircleDiagram, locus: &[LocusSample]) -> String {
    let v = View::fit(d);
    let unit = 1.0 / v.scale;
    let stroke = |color: &str, dash: &str| {
        let dash = if dash.is_empty() { String::new() } else { format!(r#" stroke-dasharray="{dash}""#) };
        format!(r#"fill="none" stroke="{color}" stroke-width="1.5" vector-effect="non-scaling-stroke"{dash}"#)
    };

    let mut out = String::new();
    out.push_str("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n");
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">"#
    )
    .unwrap();
    out.push_str("  <title>Circle diagram</title>\n");
    out.push_str("  <defs>\n");
    writeln!(
        out,
        r#"    <clipPath id="view"><rect x="{}" y="{}" width="{}" height="{}"/></clipPath>"#,
        num(v.min.x),
        num(v.min.y),
        num(v.max.x - v.min.x),
        num(v.max.y - v.min.y)
    )
    .unwrap();
    out.push_str("  </defs>\n");
    out.push_str(r#"  <rect width="100%" height="100%" fill="white"/>"#);
    out.push('\n');
    writeln!(
        out,
        r#"  <g id="diagram" transform="translate({} {}) scale({} {})" clip-path="url(#view)">"#,
        num(v.tx),
        num(v.ty),
        num(v.scale),
        num(-v.scale)
    )
    .unwrap();

    // axes: abscissa and the vertical through the origin
    segment(&mut out, "x-axis", Point2::new(v.min.x, 0.0), Point2::new(v.max.x, 0.0), &stroke("#bbbbbb", ""));
    segment(&mut out, "y-axis", Point2::new(0.0, v.min.y), Point2::new(0.0, v.max.y), &stroke("#bbbbbb", ""));

    let c = d.circle;
    writeln!(
        out,
        r#"    <circle id="circle" cx="{}" cy="{}" r="{}" {}/>"#,
        num(c.center.x),
        num(c.center.y),
        num(c.radius),
        stroke("black", "")
    )
    .unwrap();

    let (a, b) = v.span(&d.output_line);
    segment(&mut out, "output-line", a, b, &stroke("#1f4e9c", "8 5"));
    let (a, b) = v.span(&d.torque_chord);
    segment(&mut out, "torque-chord", a, b, &stroke("#1f7a3a", "10 4 2 4"));
    segment(&mut out, "max-output-line", d.output_line.foot_of(c.center), d.m_o, &stroke("black", ""));
    segment(&mut out, "max-torque-line", d.torque_chord.foot_of(c.center), d.m_t, &stroke("#c0392b", "2 4"));

    // efficiency scale: grey line from 0 to 1 with tenth ticks
    let tick = 0.02 * c.radius;
    out.push_str(r#"    <g id="efficiency-line">"#);
    out.push('\n');
    segment(&mut out, "efficiency-scale", d.efficiency_line.zero(), d.efficiency_line.one(), &stroke("#888888", ""));
    for (p, _) in &d.efficiency_line.ticks {
        segment(&mut out, "", *p - Point2::new(0.0, tick), *p + Point2::new(0.0, tick), &stroke("#888888", ""));
    }
    out.push_str("    </g>\n");

    out.push_str(r#"    <g id="slip-scale">"#);
    out.push('\n');
    segment(&mut out, "slip-scale-line", d.slip_scale.zero(), d.slip_scale.one(), &stroke("#6c3483", ""));
    let normal = d.slip_scale.line.normal();
    for (k, (p, _)) in d.slip_scale.ticks.iter().enumerate() {
        let len = if k == 0 || k + 1 == d.slip_scale.ticks.len() { 2.0 * tick } else { tick };
        segment(&mut out, "", *p - normal * len, *p + normal * len, &stroke("#6c3483", ""));
    }
    out.push_str("    </g>\n");

    let motoring: Vec<Point2> = locus.iter().filter(|l| l.s > 0.0).map(|l| l.point).collect();
    let generating: Vec<Point2> = locus.iter().filter(|l| l.s < 0.0).map(|l| l.point).collect();
    if !motoring.is_empty() || !generating.is_empty() {
        out.push_str(r#"    <g id="locus">"#);
        out.push('\n');
        if !motoring.is_empty() {
            polyline(&mut out, "locus-motoring", &motoring, &stroke("#e67e22", ""));
        }
        if !generating.is_empty() {
            polyline(&mut out, "locus-generating", &generating, &stroke("#2e86c1", "4 3"));
        }
        out.push_str("    </g>\n");
    }

    let points = [
        ("p0", d.test.p0()),
        ("pA", d.test.pa()),
        ("C", c.center),
        ("E", d.e),
        ("MO", d.m_o),
        ("MT", d.m_t),
    ];
    for (id, p) in points {
        writeln!(
            out,
            r#"    <circle id="{id}" cx="{}" cy="{}" r="{}" fill="black"/>"#,
            num(p.x),
            num(p.y),
            num(3.0 * unit)
        )
        .unwrap();
    }
    out.push_str("  </g>\n");

    // upright labels in screen coordinates
    out.push_str(r#"  <g id="labels" font-family="sans-serif" font-size="13" fill="black">"#);
    out.push('\n');
    let labels = [
        ("O′", d.test.p0()),
        ("A", d.test.pa()),
        ("C", c.center),
        ("E", d.e),
        ("M_O", d.m_o),
        ("M_T", d.m_t),
    ];
    for (text, p) in labels {
        let (x, y) = v.screen(p);
        writeln!(out, r#"    <text x="{}" y="{}">{text}</text>"#, num(x + 5.0), num(y - 5.0)).unwrap();
    }
    for (p, text) in [(d.slip_scale.zero(), "0%"), (d.slip_scale.one(), "100%")] {
        let (x, y) = v.screen(p);
        writeln!(out, r##"    <text x="{}" y="{}" fill="#6c3483">{text}</text>"##, num(x + 5.0), num(y + 15.0)).unwrap();
    }
    out.push_str("  </g>\n");
    out.push_str("</svg>\n");
    out
}
