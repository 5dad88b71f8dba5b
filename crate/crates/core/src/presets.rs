//! Parameter sets of the reference figures, in `ω/2π` Hz.

use crate::params::ParamSpec;

/// Reference hopping J₀/2π of the first amplification family.
pub const J0_HZ: f64 = 2.41e6;

/// Default power grid: log-spaced over [1e-7 W, 1e-1 W] at 400 points per decade.
pub const SWEEP_P_MIN_W: f64 = 1e-7;
pub const SWEEP_P_MAX_W: f64 = 1e-1;
pub const SWEEP_POINTS_PER_DECADE: usize = 400;

/// Noise settings of the NSR figure.
pub const NSR_THERMAL_PHONONS: f64 = 100.0;
pub const NSR_BANDWIDTH_HZ: f64 = 30.0;

/// Detuning pairs (Δ₁, Δ₂)/2π for the detuning-invariance family.
pub const FIG4_DETUNINGS_HZ: [(f64, f64); 4] =
    [(50e6, 20e6), (20e6, 50e6), (80e6, 60e6), (10e6, 100e6)];

/// External cavity-1 decays for the κ₁,e family.
pub const FIG5_KAPPA1_E_HZ: [f64; 3] = [20e6, 80e6, 200e6];

fn shared() -> ParamSpec {
    ParamSpec {
        omega_d_hz: Some(200e12),
        omega_m_hz: Some(200e6),
        gamma_m_hz: Some(50e3),
        g_hz: Some(0.8e3),
        kappa_eff_hz: Some(0.2e6),
        ..ParamSpec::default()
    }
}

/// First family, with J = `j_factor`·J₀.
pub fn fig2_params(j_factor: f64) -> ParamSpec {
    ParamSpec {
        j_hz: Some(j_factor * J0_HZ),
        delta1_hz: Some(50e6),
        delta2_hz: Some(20e6),
        kappa1_hz: Some(100e6),
        kappa1_e_hz: Some(100e6),
        kappa2_hz: Some(100e6),
        kappa2_e_hz: Some(100e6),
        ..shared()
    }
}

/// κ₁,e family at fixed κ₁/2π = 200 MHz.
pub fn fig5_params(kappa1_e_hz: f64) -> ParamSpec {
    ParamSpec {
        j_hz: Some(2.19e6),
        delta1_hz: Some(50e6),
        delta2_hz: Some(60e6),
        kappa1_hz: Some(200e6),
        kappa1_e_hz: Some(kappa1_e_hz),
        kappa2_hz: Some(100e6),
        kappa2_e_hz: Some(100e6),
        ..shared()
    }
}

/// Detuning family; J is set to the optimal coupling for `delta2_hz`.
pub fn fig4_params(delta1_hz: f64, delta2_hz: f64) -> ParamSpec {
    let kappa2 = 100e6;
    let kappa_eff = 0.2e6;
    let j = (kappa_eff * (kappa2 * kappa2 + 4.0 * delta2_hz * delta2_hz) / (4.0 * kappa2)).sqrt();
    ParamSpec {
        j_hz: Some(j),
        delta1_hz: Some(delta1_hz),
        delta2_hz: Some(delta2_hz),
        kappa1_hz: Some(50e6),
        kappa1_e_hz: Some(50e6),
        kappa2_hz: Some(kappa2),
        kappa2_e_hz: Some(kappa2),
        kappa_eff_hz: Some(kappa_eff),
        ..shared()
    }
}

/// The three hopping variants and three κ₁,e variants, labelled.
pub fn amplification_sets() -> Vec<(&'static str, ParamSpec)> {
    vec![
        ("fig2a", fig2_params(0.5)),
        ("fig2b", fig2_params(1.0)),
        ("fig2c", fig2_params(1.5)),
        ("fig5a", fig5_params(FIG5_KAPPA1_E_HZ[0])),
        ("fig5b", fig5_params(FIG5_KAPPA1_E_HZ[1])),
        ("fig5c", fig5_params(FIG5_KAPPA1_E_HZ[2])),
    ]
}
