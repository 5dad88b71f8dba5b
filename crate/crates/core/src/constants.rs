//! Physical constants (CODATA exact values) and unit helpers.

use std::f64::consts::TAU;

/// Reduced Planck constant, J·s.
pub const HBAR: f64 = 1.054_571_817e-34;

/// Boltzmann constant, J/K.
pub const K_B: f64 = 1.380_649e-23;

/// Internal rate unit used to keep polynomial and matrix entries near unity:
/// 2π × 1 MHz in rad/s.
pub const RATE_UNIT: f64 = TAU * 1.0e6;

/// Grouped constants, for callers that prefer passing a value around.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub k_b: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self {
            hbar: HBAR,
            k_b: K_B,
        }
    }
}

/// Converts an ordinary frequency `f = ω/2π` in Hz to an angular rate in rad/s.
#[inline]
pub fn hz_to_angular(f: f64) -> f64 {
    TAU * f
}

/// Converts an angular rate in rad/s to `ω/2π` in Hz.
#[inline]
pub fn angular_to_hz(omega: f64) -> f64 {
    omega / TAU
}
