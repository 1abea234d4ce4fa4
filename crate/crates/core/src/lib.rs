//! Polymer-quantized Berry–Keating and Sierra–Rodríguez-Laguna models.
//!
//! The crate is organised bottom-up:
//!
//! * [`specfun`]: complex log-gamma, the Γ-ratio phase, the Riemann–Siegel
//!   theta function and a segmented prime sieve.
//! * [`riemann`]: the Z function by two independent routes, zero finding,
//!   the zero staircase and the smooth/prime-sum counting terms.
//! * [`phase_space`]: classical Hamiltonians, closed-form semiclassical counts
//!   and a quadrature oracle for the phase-space area.
//! * [`bk_model`] and [`sierra_model`]: closed-form eigenfunctions, boundary
//!   conditions and spectra of the two polymer operators.
//! * [`verify_numeric`]: model-independent checks (RK4 shooting, 5-point
//!   finite differences) for the closed forms.
//! * [`consistency`]: measured gaps between the closed forms, their small-μ₀
//!   expansions and the boundary conditions, reported as findings.
//!
//! Everything is a pure function of value types. Data-parallel sweeps go
//! through [`exec::Exec`], which uses rayon when the `parallel` feature is on
//! and plain iterators otherwise.

pub mod bk_model;
pub mod consistency;
pub mod error;
pub mod exec;
pub mod fit;
pub mod phase_space;
pub mod quad;
pub mod riemann;
pub mod sierra_model;
pub mod specfun;
pub mod verify_numeric;

pub use error::{Error, Result};
pub use exec::Exec;
pub use num_complex::Complex64;

/// Complex value used across the crate. Public operations never return
/// non-finite components; they fail with [`Error::NonFinite`] instead.
pub type ComplexValue = Complex64;
