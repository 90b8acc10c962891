//! Calibration analyses on synthetic data: flux-distortion fitting, Z-gate
//! amplitude↔phase splines, coupler-mediated effective coupling and chevron
//! frequency extraction.

mod coupling;
mod distortion;
mod lm;
mod spline;

pub use coupling::{coupling_from_oscillation, effective_coupling, fit_oscillation_frequency, RESONANCE_TOLERANCE};
pub use distortion::{
    distortion_phase, fit_distortion, log_spaced, DistortionFit, DistortionModel, PulseContext, TAU_START_RANGE,
};
pub use spline::{zgate_calibrate, zgate_invert, SplineCalibration, INVERSION_TOLERANCE};
