//! Command-line front end: input files, slip sweeps, SVG/CSV/report
//! artifacts and exit-code mapping.

pub mod app;
pub mod config;
pub mod locus;
pub mod svg;

pub use app::{build, sweep, verify, Analysis, CliError, Outputs, Settings, Stage};
pub use config::{emit_config, parse_input, parse_str, InputSpec, ParseError, TestSheet};
pub use locus::{emit_csv, LocusSample, SlipRange};
pub use svg::{render_svg, REQUIRED_IDS};
