//! Input matrix, frequency-domain scattering matrix, output spectra and
//! noise-to-signal ratios.
//!
//! Ports are ordered (a₁,e, a₁,e†, a₁,o, a₁,o†, a₂,e, a₂,e†, a₂,o, a₂,o†,
//! a_G, a_G†, unused, mechanical bath). Optical baths are at zero temperature.

use std::f64::consts::TAU;

use num_complex::Complex64;
use thiserror::Error;

use crate::constants::RATE_UNIT;
use crate::exec::Execution;
use crate::numerics::{integrate, invert, ComplexMatrix, NumericsError};
use crate::params::{photon_flux, Direction, SystemParams};
use crate::stability::{build_drift, classify_branch, Stability};
use crate::steady::{steady_states, SteadyBranch};

pub const PORT_LABELS: [&str; 12] = [
    "a1e", "a1e_dag", "a1o", "a1o_dag", "a2e", "a2e_dag", "a2o", "a2o_dag", "aG", "aG_dag", "none",
    "zeta",
];

pub const N_PORTS: usize = 12;
pub const N_MODES: usize = 6;

/// Normalisation of every composed spectrum: the 1/(2π) of the correlator
/// integral, so that ∫S dω over rad/s counts photons per second.
pub const SPECTRAL_NORM: f64 = 1.0 / TAU;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NoiseError {
    #[error("output signal is zero; the noise-to-signal ratio is undefined")]
    ZeroSignal,
    #[error("spectra are only defined around stable steady states (branch is {0})")]
    UnstableBranch(Stability),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// Γ, 6×12 and real.
#[derive(Debug, Clone, PartialEq)]
pub struct InputMatrix {
    pub g: [[f64; N_PORTS]; N_MODES],
}

impl InputMatrix {
    /// Γ·Γᵀ (6×6).
    pub fn gram(&self) -> [[f64; N_MODES]; N_MODES] {
        let mut out = [[0.0; N_MODES]; N_MODES];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = (0..N_PORTS).map(|k| self.g[i][k] * self.g[j][k]).sum();
            }
        }
        out
    }
}

pub fn build_input_matrix(p: &SystemParams) -> InputMatrix {
    let mut g = [[0.0; N_PORTS]; N_MODES];
    let k1e = p.kappa1_e.sqrt();
    let k1o = p.kappa1_o.sqrt();
    let k2e = p.kappa2_e.sqrt();
    let k2o = p.kappa2_o.sqrt();
    let gain = p.gain.sqrt();
    for (row, col) in [(0, 0), (1, 1)] {
        g[row][col] = k1e;
        g[row][col + 2] = k1o;
        g[row][col + 8] = gain;
    }
    for (row, col) in [(2, 4), (3, 5)] {
        g[row][col] = k2e;
        g[row][col + 2] = k2o;
    }
    g[5][11] = (2.0 * p.gamma_m).sqrt();
    InputMatrix { g }
}

/// 𝒯(ω) = Γᵀ(M − iωI)⁻¹Γ − I.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatteringMatrix {
    pub omega: f64,
    pub t: [[Complex64; N_PORTS]; N_PORTS],
}

pub fn scattering_with(drift: &ComplexMatrix, gamma: &InputMatrix, omega: f64) -> Result<ScatteringMatrix, NumericsError> {
    // invert in units of RATE_UNIT; Γ entries carry √rate, so Γᵀ R Γ is unit-free
    let shifted = drift
        .scale(1.0 / RATE_UNIT)
        .shift_diagonal(Complex64::new(0.0, omega / RATE_UNIT));
    let r = invert(&shifted)?;
    let s = RATE_UNIT.sqrt();
    let gs: Vec<[f64; N_PORTS]> = gamma.g.iter().map(|row| row.map(|x| x / s)).collect();
    // R·Γ, 6×12
    let mut rg = [[Complex64::new(0.0, 0.0); N_PORTS]; N_MODES];
    for i in 0..N_MODES {
        for k in 0..N_MODES {
            let a = r[(i, k)];
            for j in 0..N_PORTS {
                rg[i][j] += a * gs[k][j];
            }
        }
    }
    let mut t = [[Complex64::new(0.0, 0.0); N_PORTS]; N_PORTS];
    for (i, row) in t.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in 0..N_MODES {
                acc += gs[k][i] * rg[k][j];
            }
            if i == j {
                acc -= 1.0;
            }
            *v = acc;
        }
    }
    Ok(ScatteringMatrix { omega, t })
}

pub fn scattering(p: &SystemParams, branch: &SteadyBranch, omega: f64) -> Result<ScatteringMatrix, NumericsError> {
    scattering_with(&build_drift(p, branch).m, &build_input_matrix(p), omega)
}

/// Contributions to the symmetrised output spectrum at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumDecomposition {
    pub omega: f64,
    pub s1e: f64,
    pub s1o: f64,
    pub s2e: f64,
    pub s2o: f64,
    pub s_g: f64,
    pub s_m: f64,
    pub total: f64,
    /// |Σ Im| / |Σ Re| of the composed products; physically zero.
    pub imag_residue: f64,
}

/// Rows (field, conjugate field) of the detected output port.
fn output_rows(d: Direction) -> (usize, usize) {
    match d {
        Direction::Forward => (4, 5),
        Direction::Backward => (0, 1),
    }
}

fn compose(
    plus: &ScatteringMatrix,
    minus: &ScatteringMatrix,
    (a, b): (usize, usize),
    n_m: f64,
) -> SpectrumDecomposition {
    let pair = |c: usize, c_dag: usize| {
        0.5 * (plus.t[a][c] * minus.t[b][c_dag] + plus.t[b][c] * minus.t[a][c_dag])
    };
    let terms = [
        pair(0, 1),
        pair(2, 3),
        pair(4, 5),
        pair(6, 7),
        // normally ordered gain bath: ⟨a_G a_G†⟩ vanishes, ⟨a_G† a_G⟩ does not
        pair(9, 8),
        plus.t[a][11] * minus.t[b][11] * (n_m + 0.5),
    ];
    let re: Vec<f64> = terms.iter().map(|z| z.re * SPECTRAL_NORM).collect();
    let im: f64 = terms.iter().map(|z| z.im * SPECTRAL_NORM).sum();
    let total: f64 = re.iter().sum();
    SpectrumDecomposition {
        omega: plus.omega,
        s1e: re[0],
        s1o: re[1],
        s2e: re[2],
        s2o: re[3],
        s_g: re[4],
        s_m: re[5],
        total,
        imag_residue: if total != 0.0 { im.abs() / total.abs() } else { im.abs() },
    }
}

pub fn output_spectrum(
    p: &SystemParams,
    branch: &SteadyBranch,
    omega: f64,
    n_m: f64,
) -> Result<SpectrumDecomposition, NumericsError> {
    let drift = build_drift(p, branch).m;
    let gamma = build_input_matrix(p);
    let plus = scattering_with(&drift, &gamma, omega)?;
    let minus = scattering_with(&drift, &gamma, -omega)?;
    Ok(compose(&plus, &minus, output_rows(branch.direction), n_m))
}

/// Default node count for the NSR quadrature.
pub const DEFAULT_NSR_POINTS: usize = 21;

/// ∫ S(ω) dω over [−Δω, Δω] divided by the output photon flux |out_amp|².
///
/// The trapezoid rule starts at `n_points` nodes (at least 11) and is refined
/// until successive values agree to 1e-6.
pub fn nsr(
    p: &SystemParams,
    branch: &SteadyBranch,
    delta_omega: f64,
    n_m: f64,
    n_points: usize,
) -> Result<f64, NoiseError> {
    if let Some(v @ (Stability::Unstable | Stability::Marginal)) = branch.stable {
        return Err(NoiseError::UnstableBranch(v));
    }
    let signal = branch.out_amp.norm_sqr();
    if signal == 0.0 {
        return Err(NoiseError::ZeroSignal);
    }
    if delta_omega == 0.0 {
        return Ok(0.0);
    }
    let drift = build_drift(p, branch).m;
    let gamma = build_input_matrix(p);
    let rows = output_rows(branch.direction);
    let failure: std::cell::RefCell<Option<NumericsError>> = std::cell::RefCell::new(None);
    let integral = integrate(
        |w| {
            let mut f = failure.borrow_mut();
            let r = scattering_with(&drift, &gamma, w).and_then(|plus| {
                Ok(compose(&plus, &scattering_with(&drift, &gamma, -w)?, rows, n_m))
            });
            match r {
                Ok(s) => s.total,
                Err(e) => {
                    f.get_or_insert(e);
                    f64::NAN
                }
            }
        },
        -delta_omega,
        delta_omega,
        n_points.max(11),
    );
    if let Some(e) = failure.into_inner() {
        return Err(e.into());
    }
    Ok(integral / signal)
}

/// Noise-to-signal ratios at one input power on the designated branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NsrRow {
    pub p_in: f64,
    /// Forward, on the largest stable root.
    pub nsr: Option<f64>,
    /// Backward, on the smallest stable root.
    pub nsr_tilde: Option<f64>,
}

/// Settings shared by every NSR evaluation in a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSettings {
    pub n_m: f64,
    /// Half-bandwidth Δω, rad/s.
    pub delta_omega: f64,
    pub n_points: usize,
}

fn stable_states(p: &SystemParams, d: Direction, s: f64) -> Result<Vec<SteadyBranch>, NumericsError> {
    let mut out = Vec::new();
    for mut b in steady_states(p, d, s) {
        classify_branch(p, &mut b)?;
        if b.stable == Some(Stability::Stable) {
            out.push(b);
        }
    }
    Ok(out)
}

pub fn nsr_at_power(p: &SystemParams, power: f64, cfg: &NoiseSettings) -> Result<NsrRow, crate::Error> {
    let s = photon_flux(power, p.omega_d)?;
    let fwd = stable_states(p, Direction::Forward, s)?;
    let bwd = stable_states(p, Direction::Backward, s)?;
    let ratio = |b: Option<&SteadyBranch>| -> Result<Option<f64>, NoiseError> {
        b.map(|b| nsr(p, b, cfg.delta_omega, cfg.n_m, cfg.n_points)).transpose()
    };
    Ok(NsrRow {
        p_in: power,
        nsr: ratio(fwd.last())?,
        nsr_tilde: ratio(bwd.first())?,
    })
}

pub fn nsr_scan(
    p: &SystemParams,
    powers: &[f64],
    cfg: &NoiseSettings,
    exec: Execution,
) -> Result<Vec<NsrRow>, crate::Error> {
    exec.map(powers, |&pw| nsr_at_power(p, pw, cfg))
        .into_iter()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::hz_to_angular;
    use crate::presets;
    use crate::stability::drift_for;
    use crate::steady::reconstruct;

    fn bare() -> SystemParams {
        let mut p = presets::fig2_params(1.0).resolve().unwrap();
        p.g = 0.0;
        p.j = 0.0;
        p.gain = 0.0;
        p
    }

    fn fig2b_upper(power: f64) -> SteadyBranch {
        let p = presets::fig2_params(1.0).resolve().unwrap();
        let s = photon_flux(power, p.omega_d).unwrap();
        stable_states(&p, Direction::Forward, s).unwrap().pop().unwrap()
    }

    #[test]
    fn input_matrix_structure() {
        let p = presets::fig5_params(20e6).resolve().unwrap();
        let g = build_input_matrix(&p);
        for row in g.g.iter() {
            assert_eq!(row[10], 0.0);
        }
        let gram = g.gram();
        let k1 = p.kappa1_e + p.kappa1_o + p.gain;
        assert!((gram[0][0] / k1 - 1.0).abs() < 1e-12);
        assert!((gram[1][1] / k1 - 1.0).abs() < 1e-12);
        assert!((gram[2][2] / p.kappa2() - 1.0).abs() < 1e-12);
        assert!((gram[5][5] / (2.0 * p.gamma_m) - 1.0).abs() < 1e-12);
        assert_eq!(gram[4][4], 0.0);
        for i in 0..N_MODES {
            for j in 0..N_MODES {
                if i != j {
                    assert_eq!(gram[i][j], 0.0);
                }
            }
        }
        let mut q = p;
        q.gain = 0.0;
        let g0 = build_input_matrix(&q);
        for row in g0.g.iter() {
            assert_eq!(row[8], 0.0);
            assert_eq!(row[9], 0.0);
        }
    }

    #[test]
    fn asymptotic_minus_identity() {
        let p = presets::fig2_params(1.0).resolve().unwrap();
        let b = fig2b_upper(1e-5);
        let w = 1e6 * p.omega_m.max(p.kappa1());
        let t = scattering(&p, &b, w).unwrap();
        for i in 0..N_PORTS {
            for j in 0..N_PORTS {
                let want = if i == j { -1.0 } else { 0.0 };
                assert!((t.t[i][j] - want).norm() < 1e-4);
            }
        }
        for k in 0..N_PORTS {
            let want = if k == 10 { -1.0 } else { 0.0 };
            assert_eq!(t.t[10][k], Complex64::new(want, 0.0));
            assert_eq!(t.t[k][10], Complex64::new(want, 0.0));
        }
    }

    #[test]
    fn bare_cavity_reflection() {
        let p = bare();
        let m = drift_for(&p, Complex64::new(0.0, 0.0), 0.0).m;
        let gamma = build_input_matrix(&p);
        for w in [-3e9, -1e8, 0.0, 2e7, hz_to_angular(50e6), 5e10] {
            let t = scattering_with(&m, &gamma, w).unwrap();
            let want = p.kappa1_e / Complex64::new(p.kappa1() / 2.0, p.delta1 - w) - 1.0;
            assert!((t.t[0][0] - want).norm() < 1e-10, "ω={w}: {} vs {want}", t.t[0][0]);
            assert!((t.t[0][0].norm() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn passive_flux_conservation() {
        let mut p = presets::fig5_params(80e6).resolve().unwrap();
        p.g = 0.0;
        p.gain = 0.0;
        let m = drift_for(&p, Complex64::new(0.0, 0.0), 0.0).m;
        let gamma = build_input_matrix(&p);
        for w in [-1e9, -3e8, 0.0, 1e6, 3.1e8, 1e9] {
            let t = scattering_with(&m, &gamma, w).unwrap();
            for row in [0, 2, 4, 6] {
                let sum: f64 = [0, 2, 4, 6].iter().map(|&c| t.t[row][c].norm_sqr()).sum();
                assert!((sum - 1.0).abs() < 1e-8, "row {row}, ω={w}: {sum}");
            }
        }
    }

    #[test]
    fn no_gain_no_gain_noise() {
        let mut p = presets::fig2_params(1.0).resolve().unwrap();
        p.gain = 0.0;
        let s = photon_flux(1e-5, p.omega_d).unwrap();
        let b = reconstruct(&p, Direction::Forward, s, crate::steady::transmission_roots(&p, Direction::Forward, s)[0]).unwrap();
        let sd = output_spectrum(&p, &b, 10.0, 100.0).unwrap();
        assert_eq!(sd.s_g, 0.0);
    }

    #[test]
    fn decoupled_mechanics_adds_nothing() {
        let mut p = presets::fig2_params(1.0).resolve().unwrap();
        p.g = 0.0;
        let s = photon_flux(1e-5, p.omega_d).unwrap();
        let b = steady_states(&p, Direction::Forward, s).pop().unwrap();
        let sd = output_spectrum(&p, &b, 5.0, 1000.0).unwrap();
        assert_eq!(sd.s_m, 0.0);
    }

    #[test]
    fn spectrum_is_real_and_grows_with_phonons() {
        let p = presets::fig2_params(1.0).resolve().unwrap();
        for power in [6e-6, 1e-4, 1e-3] {
            let b = fig2b_upper(power);
            let cold = output_spectrum(&p, &b, 20.0, 0.0).unwrap();
            let hot = output_spectrum(&p, &b, 20.0, 100.0).unwrap();
            assert!(hot.total >= cold.total);
            assert!(hot.imag_residue < 1e-10);
            let sum = hot.s1e + hot.s1o + hot.s2e + hot.s2o + hot.s_g + hot.s_m;
            assert!((sum - hot.total).abs() <= 1e-14 * hot.total.abs());
        }
    }

    #[test]
    fn nsr_bandwidth_behaviour() {
        let p = presets::fig2_params(1.0).resolve().unwrap();
        let b = fig2b_upper(1e-4);
        assert_eq!(nsr(&p, &b, 0.0, 100.0, 21).unwrap(), 0.0);
        let n10 = nsr(&p, &b, hz_to_angular(10.0), 100.0, 21).unwrap();
        let n100 = nsr(&p, &b, hz_to_angular(100.0), 100.0, 21).unwrap();
        assert!((n100 / n10 / 10.0 - 1.0).abs() < 0.01);
        let a = nsr(&p, &b, hz_to_angular(30.0), 100.0, 21).unwrap();
        let c = nsr(&p, &b, hz_to_angular(30.0), 100.0, 41).unwrap();
        assert!((a / c - 1.0).abs() < 1e-6);
    }

    #[test]
    fn nsr_rejects_zero_signal_and_unstable() {
        let p = presets::fig2_params(0.5).resolve().unwrap();
        let b = reconstruct(&p, Direction::Forward, 0.0, 1.0).unwrap();
        assert_eq!(nsr(&p, &b, 1.0, 0.0, 11), Err(NoiseError::ZeroSignal));
        let s = photon_flux(1e-4, p.omega_d).unwrap();
        let mut mid = steady_states(&p, Direction::Forward, s)[1];
        classify_branch(&p, &mut mid).unwrap();
        assert!(matches!(nsr(&p, &mid, 1.0, 0.0, 11), Err(NoiseError::UnstableBranch(_))));
    }
}
