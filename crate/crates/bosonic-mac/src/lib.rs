//! # bosonic-mac
//!
//! Capacity regions, optimal photon allocations, and inner/outer bounds for
//! lossy Bosonic multiple-access channels (MACs), together with the
//! independent numerical oracles that verify every closed form:
//!
//! - [`gaussian`] — the thermal entropy function `g`, single-mode
//!   quadrature covariance matrices, squeeze transformations, and noise
//!   whitening.
//! - [`region`] — subset-constrained rate regions (polymatroid style) with
//!   vertex, containment, area, and boundary-trace queries.
//! - [`coherent`] — single-mode coherent-state MAC capacity regions under
//!   homodyne, heterodyne, and optimal (joint-measurement) reception, plus a
//!   Monte Carlo simulator of the classical-equivalent channels.
//! - [`wideband`] — frequency-multiplexed capacity regions, water-filling
//!   photon allocations, and a discretized Lagrange-multiplier oracle.
//! - [`hsh`] — the two-user displaced-Gaussian-state MAC: closed-form
//!   maximum rates, corner-achieving input covariances, the mapping from the
//!   beam-splitter optical MAC, covariance search, and a brute-force grid
//!   oracle.
//! - [`noise`] — single-user channel capacity under anisotropic Gaussian
//!   noise via whitening, with threshold photon number and special cases.
//! - [`bounds`] — outer bounds on the ultimate MAC capacity region and the
//!   squeezed-state/homodyne rates that approach them asymptotically.
//! - [`fock`] — truncated Fock-basis density-operator numerics
//!   (eigendecomposition entropies) validating the `g`-function closed forms.
//!
//! Rates are handled internally in nats; conversion to bits is a single
//! multiplication at the presentation layer (see [`gaussian::Entropy`]).

#![forbid(unsafe_code)]

use thiserror::Error;

pub mod bounds;
pub mod coherent;
pub mod fock;
pub mod gaussian;
pub mod hsh;
pub mod noise;
pub mod region;
pub mod wideband;

pub use gaussian::{g, gaussian_entropy, squeeze_covariance, whitening_params};
pub use gaussian::{CovMatrix, Entropy, RateUnit, SqueezeParams};
pub use region::RateRegion;

/// Errors shared by every module in the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("photon number must be nonnegative, got {0}")]
    NegativePhotonNumber(f64),

    #[error("covariance matrix is not positive semidefinite (v1={v1}, v2={v2}, v12={v12})")]
    NotPositiveSemidefinite { v1: f64, v2: f64, v12: f64 },

    #[error("covariance matrix violates the single-mode uncertainty bound: det = {det:.6e} < 1/16")]
    UnphysicalState { det: f64 },

    #[error("rate point has {point} entries but the region has {region} users")]
    DimensionMismatch { region: usize, point: usize },

    #[error(
        "subset bounds are not monotone: bound({smaller:?}) = {smaller_bound} exceeds \
         bound({larger:?}) = {larger_bound}"
    )]
    NonmonotoneBounds {
        smaller: Vec<usize>,
        larger: Vec<usize>,
        smaller_bound: f64,
        larger_bound: f64,
    },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error(
        "photon budget for {user} is infeasible: the input state alone carries \
         {state_photons} mean photons but the budget is {budget}"
    )]
    InfeasibleBudget {
        user: &'static str,
        state_photons: f64,
        budget: f64,
    },

    #[error("squeeze exceeds the photon budget: sinh^2 z = {used} > nbar = {budget}")]
    SqueezeBudgetExceeded { used: f64, budget: f64 },

    #[error("bisection did not converge after {iterations} iterations (residual {residual:.3e})")]
    Nonconvergence { iterations: usize, residual: f64 },

    #[error("Fock truncation K = {k} is too small for this state (need K >= {required})")]
    TruncationTooSmall { k: usize, required: usize },

    #[error("quadrature did not meet its accuracy budget (residual {residual:.3e})")]
    QuadratureResidual { residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
