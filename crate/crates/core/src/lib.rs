//! Simulation and certification toolkit for a two-pathway photoionization
//! interferometer driven by coherent light.
//!
//! One- and two-photon ionization of a heavy alkali atom act as the two arms
//! of an interferometer whose output ports are the photoelectron spin
//! projections. Two field configurations are supported: an *open* one in
//! which the pathways are distinguishable (particle-like spin statistics) and
//! a *closed* one in which they interfere (wave-like, phase-controllable
//! statistics). Superposing the two field configurations entangles the spin
//! with the radiation field; the resulting state supports a Bell-CHSH test
//! built from a spin-asymmetry observable and a displaced photon-threshold
//! observable.
//!
//! The crate is organized bottom-up:
//!
//! - [`angular`]: exact Clebsch-Gordan coefficients, low-order spherical
//!   harmonics, spherical polarization components.
//! - [`amplitudes`]: one- and two-photon transition amplitudes built on the
//!   angular algebra, with the radial integrals as empirical inputs.
//! - [`config`]: beam geometry, amplitude balancing, material phases, and
//!   phase locking for both interferometer configurations.
//! - [`states`]: conditioned spin states of each configuration and the
//!   combined field-spin entangled state.
//! - [`bell`]: analytic correlators and the CHSH combination.
//! - [`oracle`]: brute-force Fock-space evaluation of the same correlators,
//!   with no closed-form shortcuts.
//! - [`optimizer`]: CMA-ES maximization of the CHSH violation over
//!   measurement settings.
//!
//! Everything here is pure computation over `f64`/`Complex64`; the crate
//! builds without `std` (with `alloc`).

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod amplitudes;
pub mod angular;
pub mod bell;
pub mod config;
mod error;
pub(crate) mod linalg;
pub mod optimizer;
pub mod oracle;
pub mod states;

pub use error::Error;

/// Double-precision complex number used throughout.
pub type C64 = num_complex::Complex64;

/// Crate-wide result type.
pub type Result<T> = core::result::Result<T, Error>;
