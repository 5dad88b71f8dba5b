//! System parameters, propagation direction and the reduction of the
//! two-cavity model to an effective driven Kerr mode.
//!
//! All rates and detunings are angular frequencies in rad/s. User-facing
//! input (configs, presets) is expressed as `ω/2π` in Hz and converted via
//! [`ParamSpec`].

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::{hz_to_angular, HBAR, K_B};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("{name} must be strictly positive (got {value})")]
    NonPositiveRate { name: &'static str, value: f64 },
    #[error("gain leaves kappa_eff = {kappa_eff:e} rad/s; the net decay of cavity 1 must stay positive")]
    GainExceedsLoss { kappa_eff: f64 },
    #[error("{name}: external decay {external:e} exceeds total decay {total:e}")]
    ExternalExceedsTotal {
        name: &'static str,
        external: f64,
        total: f64,
    },
    #[error("{name} is not finite")]
    NonFinite { name: &'static str },
    #[error("missing parameter: {0}")]
    MissingField(&'static str),
    #[error("conflicting parameters: {0}")]
    ConflictingFields(String),
    #[error("input power must be non-negative (got {0:e} W)")]
    NegativePower(f64),
}

/// Which cavity is driven.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    /// Input into cavity 1, output read from cavity 2.
    Forward,
    /// Input into cavity 2, output read from cavity 1.
    Backward,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Forward, Direction::Backward];

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Forward => "forward",
            Direction::Backward => "backward",
        }
    }
}

impl std::fmt::Display for Direction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "forward" => Ok(Direction::Forward),
            "backward" => Ok(Direction::Backward),
            other => Err(format!("unknown direction '{other}'")),
        }
    }
}

/// Full physical parameter set, SI angular units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemParams {
    /// Drive angular frequency ω_d.
    pub omega_d: f64,
    /// Mechanical angular frequency ω_m.
    pub omega_m: f64,
    /// Mechanical damping γ_m.
    pub gamma_m: f64,
    /// Single-photon optomechanical coupling g.
    pub g: f64,
    /// Inter-cavity hopping J.
    pub j: f64,
    /// Cavity-1 detuning Δ₁ = ω₁ − ω_d.
    pub delta1: f64,
    /// Cavity-2 detuning Δ₂ = ω₂ − ω_d.
    pub delta2: f64,
    pub kappa1_e: f64,
    pub kappa1_o: f64,
    pub kappa2_e: f64,
    pub kappa2_o: f64,
    /// Optical gain rate 𝒢 on cavity 1.
    pub gain: f64,
}

impl SystemParams {
    /// κ₁ = κ₁,e + κ₁,o
    pub fn kappa1(&self) -> f64 {
        self.kappa1_e + self.kappa1_o
    }

    /// κ₂ = κ₂,e + κ₂,o
    pub fn kappa2(&self) -> f64 {
        self.kappa2_e + self.kappa2_o
    }

    /// κ_eff = κ₁ − 𝒢
    pub fn kappa_eff(&self) -> f64 {
        self.kappa1() - self.gain
    }

    /// κ₂² + 4Δ₂², the recurring cavity-2 Lorentzian denominator.
    pub fn cavity2_denominator(&self) -> f64 {
        let k2 = self.kappa2();
        k2 * k2 + 4.0 * self.delta2 * self.delta2
    }

    /// Effective Kerr coefficient seen by the forward-driven output (U).
    ///
    /// Zero when g = 0; unbounded when J = 0 (the output port is then dark).
    pub fn forward_nonlinearity(&self) -> f64 {
        if self.g == 0.0 {
            return 0.0;
        }
        if self.j == 0.0 {
            return f64::INFINITY;
        }
        self.g * self.g * self.cavity2_denominator()
            / (4.0 * self.omega_m * self.j * self.j * self.kappa2_e)
    }

    /// Effective Kerr coefficient seen by the backward-driven output (Ũ).
    pub fn backward_nonlinearity(&self) -> f64 {
        self.g * self.g / (self.omega_m * self.kappa1_e)
    }

    pub fn nonlinearity(&self, d: Direction) -> f64 {
        match d {
            Direction::Forward => self.forward_nonlinearity(),
            Direction::Backward => self.backward_nonlinearity(),
        }
    }

    /// Energy of one drive photon, ħω_d, in J.
    pub fn photon_energy(&self) -> f64 {
        HBAR * self.omega_d
    }

    /// Checks every invariant and returns the parameter set unchanged.
    pub fn validated(self) -> Result<Self, ParamError> {
        let fields = [
            ("omega_d", self.omega_d),
            ("omega_m", self.omega_m),
            ("gamma_m", self.gamma_m),
            ("g", self.g),
            ("J", self.j),
            ("Delta1", self.delta1),
            ("Delta2", self.delta2),
            ("kappa1_e", self.kappa1_e),
            ("kappa1_o", self.kappa1_o),
            ("kappa2_e", self.kappa2_e),
            ("kappa2_o", self.kappa2_o),
            ("gain", self.gain),
        ];
        for (name, value) in fields {
            if !value.is_finite() {
                return Err(ParamError::NonFinite { name });
            }
        }
        for (name, value) in [
            ("omega_d", self.omega_d),
            ("omega_m", self.omega_m),
            ("gamma_m", self.gamma_m),
            ("kappa1_e", self.kappa1_e),
            ("kappa2_e", self.kappa2_e),
        ] {
            if value <= 0.0 {
                return Err(ParamError::NonPositiveRate { name, value });
            }
        }
        // g = 0 (linear limit) and J = 0 (decoupled cavities) are legitimate
        // limiting cases; only negative values are rejected.
        for (name, value) in [
            ("g", self.g),
            ("J", self.j),
            ("kappa1_o", self.kappa1_o),
            ("kappa2_o", self.kappa2_o),
            ("gain", self.gain),
        ] {
            if value < 0.0 {
                return Err(ParamError::NonPositiveRate { name, value });
            }
        }
        let kappa_eff = self.kappa_eff();
        if kappa_eff <= 0.0 {
            return Err(ParamError::GainExceedsLoss { kappa_eff });
        }
        Ok(self)
    }
}

/// User-facing parameter specification in ordinary-frequency units
/// (`ω/2π`, Hz). Either `gain` or `kappa_eff` must be given; either the total
/// `kappa_j` or the intrinsic `kappa_j_o` may be given (intrinsic defaults to 0).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ParamSpec {
    pub omega_d_hz: Option<f64>,
    pub omega_m_hz: Option<f64>,
    pub gamma_m_hz: Option<f64>,
    pub g_hz: Option<f64>,
    pub j_hz: Option<f64>,
    pub delta1_hz: Option<f64>,
    pub delta2_hz: Option<f64>,
    pub kappa1_hz: Option<f64>,
    pub kappa1_e_hz: Option<f64>,
    pub kappa1_o_hz: Option<f64>,
    pub kappa2_hz: Option<f64>,
    pub kappa2_e_hz: Option<f64>,
    pub kappa2_o_hz: Option<f64>,
    pub kappa_eff_hz: Option<f64>,
    pub gain_hz: Option<f64>,
}

fn required(v: Option<f64>, name: &'static str) -> Result<f64, ParamError> {
    v.map(hz_to_angular).ok_or(ParamError::MissingField(name))
}

fn resolve_intrinsic(
    total: Option<f64>,
    external: f64,
    intrinsic: Option<f64>,
    name: &'static str,
) -> Result<f64, ParamError> {
    match (total.map(hz_to_angular), intrinsic.map(hz_to_angular)) {
        (Some(total), None) => {
            if external > total * (1.0 + 1e-12) {
                return Err(ParamError::ExternalExceedsTotal {
                    name,
                    external,
                    total,
                });
            }
            Ok((total - external).max(0.0))
        }
        (Some(total), Some(intr)) => {
            if external > total * (1.0 + 1e-12) {
                return Err(ParamError::ExternalExceedsTotal {
                    name,
                    external,
                    total,
                });
            }
            if ((external + intr) - total).abs() > 1e-9 * total {
                return Err(ParamError::ConflictingFields(format!(
                    "{name}: total decay disagrees with external + intrinsic"
                )));
            }
            Ok(intr)
        }
        (None, Some(intr)) => Ok(intr),
        (None, None) => Ok(0.0),
    }
}

impl ParamSpec {
    /// Converts to angular units, derives the missing member of
    /// (𝒢, κ_eff) and validates.
    pub fn resolve(&self) -> Result<SystemParams, ParamError> {
        let kappa1_e = required(self.kappa1_e_hz, "kappa1_e")?;
        let kappa2_e = required(self.kappa2_e_hz, "kappa2_e")?;
        let kappa1_o = resolve_intrinsic(self.kappa1_hz, kappa1_e, self.kappa1_o_hz, "kappa1")?;
        let kappa2_o = resolve_intrinsic(self.kappa2_hz, kappa2_e, self.kappa2_o_hz, "kappa2")?;
        let kappa1 = kappa1_e + kappa1_o;
        let gain = match (self.gain_hz, self.kappa_eff_hz) {
            (Some(_), Some(_)) => {
                return Err(ParamError::ConflictingFields(
                    "give either gain or kappa_eff, not both".into(),
                ))
            }
            (Some(gain), None) => hz_to_angular(gain),
            (None, Some(keff)) => {
                let keff = hz_to_angular(keff);
                if keff <= 0.0 {
                    return Err(ParamError::GainExceedsLoss { kappa_eff: keff });
                }
                kappa1 - keff
            }
            (None, None) => 0.0,
        };
        SystemParams {
            omega_d: required(self.omega_d_hz, "omega_d")?,
            omega_m: required(self.omega_m_hz, "omega_m")?,
            gamma_m: required(self.gamma_m_hz, "gamma_m")?,
            g: required(self.g_hz, "g")?,
            j: required(self.j_hz, "J")?,
            delta1: required(self.delta1_hz, "Delta1")?,
            delta2: required(self.delta2_hz, "Delta2")?,
            kappa1_e,
            kappa1_o,
            kappa2_e,
            kappa2_o,
            gain,
        }
        .validated()
    }
}

/// Direction-dependent reduced quantities of the effective single-mode
/// output equation `0 = −(κ/2 + iΔ)A + iU|A|²A + ε a_in`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EffectiveParams {
    /// Effective total linewidth κ.
    pub kappa: f64,
    /// Effective detuning Δ.
    pub delta: f64,
    /// Kerr coefficient U (forward) or Ũ (backward).
    pub nonlinearity: f64,
    /// Drive conversion ε.
    pub eps: Complex64,
    /// Transmission numerator λ = 4|ε|².
    pub lambda: f64,
}

impl EffectiveParams {
    /// Linear-response transmission λ/(κ² + 4Δ²).
    pub fn linear_transmission(&self) -> f64 {
        self.lambda / (self.kappa * self.kappa + 4.0 * self.delta * self.delta)
    }
}

pub fn effective_params(p: &SystemParams, d: Direction) -> EffectiveParams {
    let den = p.cavity2_denominator();
    let j2 = p.j * p.j;
    let kappa = p.kappa_eff() + 4.0 * j2 * p.kappa2() / den;
    let delta = p.delta1 - 4.0 * j2 * p.delta2 / den;
    let eps = Complex64::new(0.0, -2.0 * p.j * (p.kappa1_e * p.kappa2_e).sqrt())
        / Complex64::new(p.kappa2(), 2.0 * p.delta2);
    let lambda = 16.0 * j2 * p.kappa1_e * p.kappa2_e / den;
    EffectiveParams {
        kappa,
        delta,
        nonlinearity: p.nonlinearity(d),
        eps,
        lambda,
    }
}

/// Photon flux `s_in = P/(ħω_d)` for an input power in W.
pub fn photon_flux(power: f64, omega_d: f64) -> Result<f64, ParamError> {
    if power < 0.0 || power.is_nan() {
        return Err(ParamError::NegativePower(power));
    }
    Ok(power / (HBAR * omega_d))
}

/// Input power in W for a photon flux in 1/s.
pub fn power_of_flux(s_in: f64, omega_d: f64) -> f64 {
    s_in * HBAR * omega_d
}

/// Bose occupancy of the mechanical bath at `temperature` (K).
pub fn thermal_occupancy(temperature: f64, omega_m: f64) -> f64 {
    if temperature <= 0.0 {
        return 0.0;
    }
    let x = HBAR * omega_m / (K_B * temperature);
    1.0 / x.exp_m1()
}
