//! Decide whether the epigraph of a function on an open domain of R^n is
//! strictly convex.
//!
//! Three independent routes produce a [`Verdict`]:
//!
//! * [`analysis::main_theorem_verdict`] checks the analytic characterization:
//!   the domain is convex and relatively open, the function is strictly convex
//!   and continuous, and it blows up at every relative boundary point.
//! * [`analysis::line_restriction_verdict`] reduces to one-dimensional
//!   restrictions along sampled lines.
//! * [`oracle::oracle_epigraph_strict_convexity`] applies the set-level
//!   definition (open segments between closure points stay in the relative
//!   interior) directly to a sampled epigraph.
//!
//! Every verdict is tri-state. `Refuted` always carries a [`Witness`] that can
//! be replayed with nothing but expression evaluation and domain membership;
//! `Certified` is a sampled certification at the configured tolerances.

pub mod analysis;
pub mod geometry;
pub mod model;
pub mod oracle;
pub mod rng;
mod status;
mod tolerances;

pub use analysis::{ConditionId, ConditionReport, Verdict, VerdictMode, Witness, WitnessKind};
pub use geometry::{AffineSubspace, PointCloud, Segment, Vector};
pub use model::{DomainSpec, Expr, FunctionSpec, Objective};
pub use status::Status;
pub use tolerances::Tolerances;
