//! Heyland circle diagram for induction machines.
//!
//! Three routes to the same circle:
//!
//! - [`construction`]: Euclidean reconstruction from the no-load and
//!   blocked-rotor current phasors (circle, torque chord, `M_O`, `M_T`,
//!   slip and efficiency scales).
//! - [`circuit`]: the per-phase equivalent circuit, its Thévenin reduction
//!   and the analytic current loci.
//! - [`mobius`]: the rotor current as a fractional-linear map of `z = 1/s`.
//!
//! [`equivalence`] runs all three against each other; [`frame`] places
//! circuit currents on the diagram axes.

pub mod circuit;
pub mod construction;
pub mod equivalence;
pub mod frame;
pub mod geometry;
pub mod mobius;

pub use circuit::{CircuitParams, LocusKind, OperatingPoint, SlipValue, TheveninEquivalent};
pub use construction::{CircleDiagram, Phasor, PfAxis, TestPoints};
pub use equivalence::{verify_full_equivalence, EquivalenceReport, EquivalenceTolerances};
pub use frame::DiagramFrame;
pub use geometry::{Circle2, Line2, Point2};
pub use mobius::{ExtComplex, GeneralizedCircle, MobiusMap};
