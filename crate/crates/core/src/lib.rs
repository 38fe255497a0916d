//! Dichotomy-based N-phase Cahn-Hilliard model on a uniform 2-D grid.
//!
//! `N` phases are described by `N-1` independent order parameters
//! `phi_1 .. phi_{N-1}` (for three phases, `psi = phi_1` and `phi = phi_2`).
//! The crate provides the discrete operators, the surface-tension
//! functions, the model quantities, a decoupled second-order splitting
//! integrator, and the diagnostics used to check it.
//!
//! Runnable examples (`cargo run --release --example <name>`):
//!
//! - `surface_tensions`: gamma functions, the consistency certifier, the step condition
//! - `square_cross`: energy decay and volumes of four relaxing quadrants
//! - `temporal_convergence`: self-convergence orders in time
//! - `neumann_angles`: lens junction angles against the force balance
//! - `liquid_lens`: total spreading of a lens into a film
//! - `two_droplets`: Janus, separated and core-shell droplet pairs
//! - `four_phase`: three order parameters, monotone energy
//! - `snapshots`: snapshot and CSV round trip, angles on a reloaded state
//! - `experiment_config`: a catalog experiment driven by configuration text

pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod io;
pub mod jet;
pub mod krylov;
pub mod model;
pub mod scheme;
pub mod spectral;
pub mod tension;

pub use error::{Error, Result};
pub use grid::{Grid2D, Norm, ScalarField};
pub use model::{ModelParams, PhaseState, Preset};
pub use scheme::{SchemeParams, Stepper};
pub use tension::{GammaSet, SurfaceTensions};
