//! Spectral solver and well-posedness classifier for periodic Cauchy
//! problems with time-dependent coefficients.
//!
//! The library studies evolution operators
//!
//! ```text
//! D_t - a2(t) Laplacian + sum_j a1j(t) D_j + a0(t)
//! ```
//!
//! on the N-torus. Fourier analysis turns the Cauchy problem into a family
//! of linear ODEs indexed by the lattice frequency, each with an explicit
//! integrating-factor solution. The crate provides:
//!
//! - exact/quadrature primitives of the time coefficients ([`time_coeffs`]);
//! - the closed-form per-frequency propagator in overflow-proof log-domain
//!   arithmetic, with an independent RK4 oracle ([`symbol_ode`]);
//! - batch solves, Sobolev norms, Gevrey decay fits and torus synthesis
//!   ([`spectral_field`]);
//! - the gauge transform removing real parts of the symbol ([`gauge`]);
//! - the well-posedness classifier across Sobolev, smooth, Gevrey and
//!   analytic scales ([`classifier`]);
//! - adversarial data and blow-up probes certifying the sharp thresholds
//!   ([`witness`]).

pub mod classifier;
pub mod error;
pub mod gauge;
pub mod log_complex;
mod polynomial;
pub mod quadrature;
mod regression;
pub mod spectral_field;
pub mod symbol_ode;
pub mod time_coeffs;
pub mod witness;

pub use error::{Error, Result};
pub use log_complex::{LogComplex, LogSum, OVERFLOW_GUARD};
pub use spectral_field::{
    axis_frequency, solve_cauchy, AxisSign, DataGen, DataSpec, DecayFit, DirectionMask, Frequency,
    SolveSettings, SpectralField,
};
pub use symbol_ode::{FrequencyOde, SymbolSpec};
pub use time_coeffs::{
    FactorSign, OrderEstimate, PrimitiveTable, TimeCoefficient, VanishingProfile,
};

pub use classifier::{
    classify, derive_structure, gevrey_threshold, hierarchy_check, DegeneratePoint, DriftKind,
    GevreyThreshold, ImaginaryStructure, LeadingSign, Provenance, SobolevVerdict, Verdict,
    WpVerdict,
};
pub use gauge::{gauge_forward, gauge_inverse, reduce_to_normal_form, GaugePhase};
pub use witness::{
    degenerate_witness, drift_violation_data, parabolic_violation_data, probe,
    GrowthClassification, ProbeEntry, ProbeReport, ProbeRow, ProbeSequence, DIVERGENCE_FLOOR,
};
