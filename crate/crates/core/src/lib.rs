//! Strapdown inertial navigation toolkit built around the Earth-frame
//! (ECEF) mechanization, with the classical local-level (North-Up-East)
//! mechanization alongside it for comparison.
//!
//! The local-level frame is the textbook choice for terrestrial
//! navigation, but its curvature matrix and transport rate divide by
//! `cos L` and blow up near the poles. Running the same two-sample
//! strapdown updates directly in Earth axes removes the singularity
//! entirely; local-level quantities remain available as a display-side
//! projection. This crate implements both mechanizations over one shared
//! gravity/Earth model, synthesizes perfect-sensor polar flight data
//! analytically, and performs GNSS-aided coarse attitude alignment as an
//! eigenvalue problem over accumulated velocity/gravity integrals.
//!
//! Modules:
//! - [`geodesy`]: Earth model, coordinate transforms, gravity, local-level
//!   frame geometry (and its deliberate polar failure mode).
//! - [`attitude`]: quaternion/DCM/rotation-vector algebra.
//! - [`strapdown`]: the discrete two-sample steppers in both frames, the
//!   zero-vertical-velocity reset, and a continuous-time RK4 reference.
//! - [`trajgen`]: analytic truth trajectories and IMU/GNSS synthesis.
//! - [`alignment`]: in-motion optimization-based coarse alignment.
//! - [`harness`]: scenario runner, error metrics, CSV/JSON/plot output.

pub mod alignment;
pub mod attitude;
pub mod geodesy;
pub mod harness;
pub mod strapdown;
pub mod trajgen;

pub use alignment::{AlignmentAccumulator, AlignmentError, AlignmentSolution};
pub use attitude::{Dcm, Quaternion, RotationVector};
pub use geodesy::{CurvilinearPosition, EarthModel, EcefPosition, GeodesyError};
pub use harness::{AlignmentReport, HarnessError, Mechanization, RunReport};
pub use strapdown::{EarthFrameState, ImuIncrements, LocalLevelState};
pub use trajgen::{PathKind, ScenarioConfig, ScenarioError, TruthSample};
