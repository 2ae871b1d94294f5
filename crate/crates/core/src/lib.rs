//! Gaussian quantum discord for two-mode Gaussian states.
//!
//! The crate computes quantum mutual information, classical correlations,
//! discord and the inseparability of two-mode Gaussian states from their
//! covariance matrices, reconstructs those matrices from homodyne variance
//! data, and runs loss, spectrum and subchannel sweeps.
//!
//! Formulas work in units where the vacuum variance is 1/2; measured data and
//! files use shot-noise units (vacuum = 1). See [`units::Units`].

// `!(x > 0.0)` is used on purpose so NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channels;
pub mod covariance;
pub mod error;
pub mod homodyne;
pub mod io;
pub mod metrics;
pub mod oracle;
pub mod symplectic;
pub mod units;

pub use channels::{
    attenuate_symmetric, build_subchannels, classify_additivity, run_attenuation_sweep,
    run_spectrum_sweep, Additivity, AdditivityVerdict, AttenuationSweep, SpectrumSweep,
    SubchannelPair, SubchannelSet,
};
pub use covariance::{standard_form, StandardForm, TwoModeCovariance};
pub use error::{Error, Result};
pub use homodyne::{
    extract_standard_form, scan_minimum, simulate_dual_homodyne, ScanTrace, VarianceRecord,
};
pub use metrics::{CorrelationReport, Direction, EminBranch};
pub use oracle::{brute_force_e_min, GaussianMeasurement, OracleGrid};
pub use symplectic::{entropy_h, symplectic_data, SymplecticData};
pub use units::Units;
