//! Spatiotemporal disease infection-rate estimation over adjacent areal units.
//!
//! The library fits a convolution epidemiological model (Gamma infection
//! rate convolved with a stochastic lognormal incubation delay) to daily
//! case-count time series, couples the areal units through a proper-CAR
//! Gaussian Markov random field prior, and samples the posterior with an
//! adaptive pseudo-marginal Metropolis algorithm. The fitted posterior
//! drives probabilistic forecasts, CRPS scoring, and a forecast-anomaly
//! detector for new epidemic waves, with a GLR-Poisson surveillance
//! baseline for comparison.
//!
//! Pipeline, end to end:
//!
//! 1. [`data`] — ingest case counts, adjacency and populations; smooth and
//!    normalize.
//! 2. [`epimodel`] — forward model for predicted daily symptomatic counts.
//! 3. [`spatial`] — GMRF precision/covariance machinery and Moran's I.
//! 4. [`inference`] — posterior construction and adaptive MCMC with ESS
//!    diagnostics.
//! 5. [`forecast`] — posterior-predictive bands and CRPS.
//! 6. [`detect`] — infection-rate and GLR-Poisson wave detectors.
//! 7. [`analysis`] — distance-correlation dependence analysis of chains.
//!
//! The `epirate` binary wires these into `fit`, `forecast`, `detect` and
//! `diagnose` subcommands; see the crate README.

pub mod analysis;
pub mod cli;
pub mod data;
pub mod detect;
pub mod epimodel;
pub mod error;
pub mod forecast;
pub mod inference;
pub mod spatial;

pub use error::{Error, Result};
