//! Positive-P trajectory engine for single-pass second harmonic generation.
//!
//! The crate is `no_std` (with `alloc`) and carries everything that is pure
//! numerics:
//!
//! * [`states`]: pump specifications and phase-space samplers for coherent and
//!   quadrature-squeezed inputs, plus their analytic moments.
//! * [`sde`]: the four coupled stochastic equations for `(α, α⁺, β, β⁺)`, the
//!   Euler and semi-implicit midpoint steppers, and the classical sech/tanh
//!   solution.
//! * [`moments`] and [`observables`]: batched accumulation of the normally
//!   ordered monomials and their conversion into quadrature variances,
//!   Duan-Simon sums, Reid products, `g²(0)`, efficiency and batch-means errors.
//! * [`fock`]: an exact number-state reference for small photon numbers.
//!
//! IO, parallel orchestration and the command line live in the `shgsim` crate.
#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod error;
pub mod fock;
pub mod moments;
pub mod observables;
pub mod phase;
pub mod rng;
pub mod sde;
pub mod states;
mod tridiag;

pub use error::Error;
pub use moments::{BatchSums, MomentAccumulator, Monomial, NormalMoments};
pub use observables::{CorrelationReport, QuadStats, ReportWithErrors};
pub use phase::PhasePoint;
pub use rng::TrajectoryStreams;
pub use sde::{Scheme, SdeConfig, ZetaScale};
pub use states::{InputMoments, PumpSpec, SqueezeQuadrature};

pub use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;
