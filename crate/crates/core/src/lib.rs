//! Numerics for an operation-dependent metric on unitary orbits of density
//! matrices.
//!
//! The interference amplitude `Tr(rho U)` between a mixed state and its
//! unitary image carries a visibility and a relative phase; the crate turns
//! that amplitude into a distance along the orbit, a set of evolution-time
//! lower bounds (uncertainty-type, mean-energy, and visibility-based, with a
//! Bures-angle baseline for comparison), their generalization to completely
//! positive trace-preserving maps through dilation, and a finite-shot
//! two-arm fringe simulation that estimates all of these from counted data.
//!
//! Modules:
//! - [`matrix`], [`eig`]: dense complex linear algebra and the Hermitian
//!   eigensolver everything rides on.
//! - [`states`]: validated density matrices, Bloch parametrization,
//!   purification, Hamiltonian schedules.
//! - [`orbit`]: visibility, phase, orbit distance, Bargmann angle, quantum
//!   speed, path length.
//! - [`bounds`]: the evolution-time bounds and the [`bounds::BoundReport`].
//! - [`cptp`]: Kraus channels, dilations, and the channel speed limit.
//! - [`interferometer`]: detector statistics, fringe fitting, estimation.
//! - [`ensemble`], [`seeding`]: reproducible random instances.

pub mod bounds;
pub mod cptp;
pub mod eig;
pub mod ensemble;
pub mod error;
pub mod interferometer;
pub mod matrix;
pub mod orbit;
pub mod seeding;
pub mod states;
pub mod tolerance;

pub use error::{Error, Result};
pub use matrix::{C64, ComplexMatrix, Subsystem};
pub use states::{DensityMatrix, HamiltonianSchedule, PurifiedState};
