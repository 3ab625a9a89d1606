//! Spectral toolbox for relaxation-to-equilibrium studies of kinetic
//! transport models.
//!
//! The crate bundles, around one shared Fourier core:
//!
//! * [`spectral`] — band-limited fields on the torus, discrete velocity
//!   sets, exact free transport and fractional smoothing multipliers;
//! * [`sigma`] — nonnegative relaxation cross-sections and exact
//!   sigma-weighted quadratures;
//! * [`flows`] — finite-dimensional damped/free operator pairs with
//!   dissipation comparisons, observability constants and certified decay
//!   rates;
//! * [`goldstein_taylor`] — the two-speed relaxation system on the circle,
//!   with the exact Fourier observability identity of its free flow;
//! * [`transport`] — discrete-velocity relaxation transport with plain and
//!   smoothed (weak) damping, observability reports, Sobolev growth checks
//!   and the Jensen-type decay iteration;
//! * [`boltzmann`] — a velocity-discretized linearized collision operator
//!   assembled from its Dirichlet form, with spectral transport coupling,
//!   kernel splits and hard/soft decay studies;
//! * [`analysis`] — decay-rate fitting and dissipation-window selection;
//! * [`config`] / [`runner`] / [`verify`] — the JSON-driven experiment
//!   runner and self-check suites behind the thin command-line binary.
//!
//! Most capabilities have a runnable demonstration under `examples/`.

pub mod analysis;
pub mod boltzmann;
pub mod config;
pub mod runner;
pub mod verify;
pub mod error;
pub mod flows;
pub mod goldstein_taylor;
pub mod sigma;
pub mod spectral;
pub mod transport;

pub use error::{Error, Result};
